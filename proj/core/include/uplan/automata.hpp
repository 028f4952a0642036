#pragma once

// Grid search problems viewed as deterministic finite automata.

#include <cstdint>
#include <vector>

#include "uplan/digits.hpp"
#include "uplan/gridworld.hpp"

namespace uplan {

/// States and letters are dense indices; delta is total.
class Dfa {
 public:
  Dfa(std::size_t states, std::size_t alphabet, std::vector<std::uint32_t> delta, std::uint32_t start,
      std::vector<bool> accepts);

  std::size_t state_count() const { return states_; }
  std::size_t alphabet_size() const { return alphabet_; }
  std::uint32_t next(std::uint32_t state, std::uint32_t letter) const {
    return delta_[state * alphabet_ + letter];
  }
  std::uint32_t start() const { return start_; }
  bool accepts(std::uint32_t state) const { return accepts_[state]; }

 private:
  std::size_t states_;
  std::size_t alphabet_;
  std::vector<std::uint32_t> delta_;
  std::uint32_t start_;
  std::vector<bool> accepts_;
};

/// A terminal strongly connected component: mutually reachable and closed
/// under every letter. Members are sorted.
struct EssentialClass {
  std::vector<std::uint32_t> members;
};

/// States are the env's cell indices, letters the actions in L, R, U, D order.
Dfa grid_to_dfa(const GridEnv& env);

/// Terminal SCCs ordered by smallest member.
std::vector<EssentialClass> essential_classes(const Dfa& dfa);

inline constexpr std::size_t kDefaultProductStateLimit = std::size_t{1} << 24;

/// States (q, u_1..u_k) encoded as q * |A|^k + window, u_1 the most
/// significant window digit. Letter u maps to (delta(q, u_1), u_2..u_k, u).
/// The start state carries the all-zero window.
Dfa product_automaton(const Dfa& dfa, unsigned k, std::size_t max_states = kDefaultProductStateLimit);

struct ExhaustivenessReport {
  unsigned k = 0;
  std::uint64_t horizon = 0;
  std::size_t total_pairs = 0;
  /// First stage after which every pair had been witnessed, 0 if never.
  std::uint64_t complete_at = 0;
  struct Pair {
    Cell state;
    std::vector<Action> window;
  };
  std::vector<Pair> unseen;
};

/// Runs the plan for `horizon` actions and records every (state, next k
/// actions) pair whose window lies inside the horizon.
ExhaustivenessReport verify_exhaustive(const GridEnv& env, const DigitStream& stream, const ActionMap& map, unsigned k,
                                       std::uint64_t horizon, std::uint64_t offset = 1,
                                       std::size_t max_pairs = kDefaultProductStateLimit);

/// One chase round: the shortest path from the first robot to the second,
/// and whether the second robot was blocked while following it.
struct ChaseRound {
  std::size_t length = 0;
  bool chased_blocked = false;
};

struct MergeResult {
  std::vector<Action> actions;
  std::vector<ChaseRound> rounds;
};

/// Chase construction: repeatedly append the shortest path from the first
/// robot's position to the second's until both coincide. Throws std::logic_error
/// if more than |X|^2 rounds are needed.
MergeResult merge_pair_detailed(const GridEnv& env, Cell x, Cell x2);
std::vector<Action> merge_pair(const GridEnv& env, Cell x, Cell x2);

/// Applies a sequence from a cell under the stay-put rule.
Cell apply_actions(const GridEnv& env, Cell x, const std::vector<Action>& actions);

/// Greedy pairwise merging of the set of all free cells, always merging the
/// two lexicographically smallest remaining cells.
std::vector<Action> synchronizing_sequence(const GridEnv& env);

bool verify_synchronizing(const GridEnv& env, const std::vector<Action>& sequence);

}  // namespace uplan
