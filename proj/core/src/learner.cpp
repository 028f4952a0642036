#include "uplan/learner.hpp"

#include <algorithm>
#include <stdexcept>

#include "uplan/automata.hpp"
#include "uplan/errors.hpp"

namespace uplan {

std::size_t default_buffer_cap(const GridEnv& env) { return 4 * env.free_count(); }

LearnerState learn_optimal(const GridEnv& env, const DigitStream& stream, const ActionMap& map, std::uint64_t offset,
                           std::uint64_t budget, std::size_t cap) {
  if (cap == 0) cap = default_buffer_cap(env);
  LearnerState state;
  const CellIndex start = env.start_index();

  auto offer = [&](std::uint64_t stage) {
    const auto& candidate = state.recording_buffer;
    if (state.best_plan && candidate.size() >= state.best_plan->size()) return;
    if (!env.is_goal(apply_actions(env, env.start(), candidate))) {
      throw std::logic_error("recorded plan does not reach the goal");
    }
    state.best_plan = candidate;
    ++state.improvements;
    state.found_at_step = stage;
  };

  // The empty plan cannot be improved on.
  if (env.is_goal_index(start)) {
    state.best_plan.emplace();
    return state;
  }
  state.recording = true;

  std::vector<int> lut(stream.base(), -1);
  for (unsigned d = 0; d < stream.base() && d < map.domain_size(); ++d) {
    lut[d] = static_cast<int>(map(static_cast<std::uint8_t>(d)));
  }
  DigitCursor cursor(stream, offset);
  CellIndex x = start;
  for (std::uint64_t s = 1; s <= budget; ++s) {
    const std::uint8_t digit = cursor.next();
    if (digit >= lut.size() || lut[digit] < 0) {
      throw InvalidArgument("digit " + std::to_string(digit) + " is outside the action map domain");
    }
    const auto a = static_cast<Action>(lut[digit]);
    x = env.next(x, a);
    state.steps_consumed = s;
    if (state.recording) {
      if (state.recording_buffer.size() == cap) {
        ++state.cap_hits;
        state.recording = false;
        state.recording_buffer.clear();
      } else {
        state.recording_buffer.push_back(a);
      }
    }
    if (state.recording && env.is_goal_index(x)) {
      offer(s);
      state.recording = false;
      state.recording_buffer.clear();
    }
    if (x == start) {
      state.recording = true;
      state.recording_buffer.clear();
    }
  }
  return state;
}

std::vector<Action> bfs_shortest(const GridEnv& env, Cell from, const std::vector<Cell>& goals) {
  return shortest_path(env, from, goals);
}

}  // namespace uplan
