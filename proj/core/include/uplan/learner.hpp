#pragma once

// Anytime learning of a shortest plan while a universal plan runs.
//
// The robot carries two detectors: one for the initial state and one for the
// goal set. Recording restarts on every visit to the initial state; reaching
// a goal with an active recording yields a candidate plan.

#include <cstdint>
#include <optional>
#include <vector>

#include "uplan/digits.hpp"
#include "uplan/gridworld.hpp"

namespace uplan {

struct LearnerState {
  std::optional<std::vector<Action>> best_plan;
  std::vector<Action> recording_buffer;
  bool recording = false;
  std::uint64_t steps_consumed = 0;
  std::uint64_t improvements = 0;
  std::uint64_t cap_hits = 0;
  /// Stage at which best_plan was last replaced, 0 if never.
  std::uint64_t found_at_step = 0;
};

/// 4 * |X| actions; a longer recording cannot be a shortest plan.
std::size_t default_buffer_cap(const GridEnv& env);

/// Executes c(alpha_offset), c(alpha_offset+1), ... for `budget` stages. At
/// every state the goal detector is consulted before the initial-state
/// detector resets the recording, so x_I in X_G yields the empty plan at
/// once. Only strictly shorter candidates replace best_plan, and each is
/// replayed from x_I before it is stored. cap = 0 selects default_buffer_cap.
LearnerState learn_optimal(const GridEnv& env, const DigitStream& stream, const ActionMap& map, std::uint64_t offset,
                           std::uint64_t budget, std::size_t cap = 0);

/// Shortest action sequence from `from` to any goal; see shortest_path.
std::vector<Action> bfs_shortest(const GridEnv& env, Cell from, const std::vector<Cell>& goals);

}  // namespace uplan
