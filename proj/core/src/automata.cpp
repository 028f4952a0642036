#include "uplan/automata.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "uplan/errors.hpp"

namespace uplan {

Dfa::Dfa(std::size_t states, std::size_t alphabet, std::vector<std::uint32_t> delta, std::uint32_t start,
         std::vector<bool> accepts)
    : states_(states), alphabet_(alphabet), delta_(std::move(delta)), start_(start), accepts_(std::move(accepts)) {
  if (states_ == 0 || alphabet_ == 0) throw InvalidArgument("a DFA needs at least one state and one letter");
  if (delta_.size() != states_ * alphabet_) throw InvalidArgument("transition table is not total");
  if (accepts_.size() != states_) throw InvalidArgument("accept flags must cover every state");
  if (start_ >= states_) throw InvalidArgument("start state out of range");
  for (auto q : delta_) {
    if (q >= states_) throw InvalidArgument("transition leads outside the state set");
  }
}

Dfa grid_to_dfa(const GridEnv& env) {
  const std::size_t n = env.free_count();
  std::vector<std::uint32_t> delta(4 * n);
  std::vector<bool> accepts(n);
  for (CellIndex i = 0; i < n; ++i) {
    for (Action a : kAllActions) delta[4 * i + static_cast<std::size_t>(a)] = env.next(i, a);
    accepts[i] = env.is_goal_index(i);
  }
  return Dfa(n, 4, std::move(delta), env.start_index(), std::move(accepts));
}

std::vector<EssentialClass> essential_classes(const Dfa& dfa) {
  // Iterative Tarjan.
  const std::size_t n = dfa.state_count();
  const std::size_t m = dfa.alphabet_size();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> order(n, kNone), low(n, 0), component(n, kNone);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t state;
    std::uint32_t letter;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  std::uint32_t components = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (order[root] != kNone) continue;
    call.push_back({root, 0});
    order[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.letter < m) {
        const std::uint32_t w = dfa.next(f.state, f.letter++);
        if (order[w] == kNone) {
          order[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.state] = std::min(low[f.state], order[w]);
        }
        continue;
      }
      const std::uint32_t v = f.state;
      call.pop_back();
      if (!call.empty()) low[call.back().state] = std::min(low[call.back().state], low[v]);
      if (low[v] == order[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component[w] = components;
        } while (w != v);
        ++components;
      }
    }
  }

  std::vector<bool> exits(components, false);
  for (std::uint32_t q = 0; q < n; ++q) {
    for (std::uint32_t a = 0; a < m; ++a) {
      if (component[dfa.next(q, a)] != component[q]) exits[component[q]] = true;
    }
  }
  std::vector<EssentialClass> classes(components);
  for (std::uint32_t q = 0; q < n; ++q) {
    if (!exits[component[q]]) classes[component[q]].members.push_back(q);
  }
  std::erase_if(classes, [](const EssentialClass& c) { return c.members.empty(); });
  std::sort(classes.begin(), classes.end(),
            [](const EssentialClass& a, const EssentialClass& b) { return a.members.front() < b.members.front(); });
  return classes;
}

Dfa product_automaton(const Dfa& dfa, unsigned k, std::size_t max_states) {
  if (k == 0) throw InvalidArgument("window length must be at least 1");
  const std::size_t m = dfa.alphabet_size();
  std::size_t windows = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (windows > max_states / m) throw ResourceLimit("product automaton exceeds the state limit");
    windows *= m;
  }
  if (dfa.state_count() > max_states / windows) throw ResourceLimit("product automaton exceeds the state limit");
  const std::size_t n = dfa.state_count() * windows;
  const std::size_t head_unit = windows / m;
  std::vector<std::uint32_t> delta(n * m);
  std::vector<bool> accepts(n);
  for (std::size_t q = 0; q < dfa.state_count(); ++q) {
    for (std::size_t w = 0; w < windows; ++w) {
      const std::size_t s = q * windows + w;
      const auto head = static_cast<std::uint32_t>(w / head_unit);
      const std::size_t moved = dfa.next(static_cast<std::uint32_t>(q), head);
      const std::size_t tail = (w % head_unit) * m;
      for (std::size_t u = 0; u < m; ++u) {
        delta[s * m + u] = static_cast<std::uint32_t>(moved * windows + tail + u);
      }
      accepts[s] = dfa.accepts(static_cast<std::uint32_t>(q));
    }
  }
  return Dfa(n, m, std::move(delta), static_cast<std::uint32_t>(dfa.start() * windows), std::move(accepts));
}

ExhaustivenessReport verify_exhaustive(const GridEnv& env, const DigitStream& stream, const ActionMap& map,
                                       unsigned k, std::uint64_t horizon, std::uint64_t offset,
                                       std::size_t max_pairs) {
  if (k == 0) throw InvalidArgument("window length must be at least 1");
  std::size_t windows = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (windows > max_pairs / 4) throw ResourceLimit("too many (state, window) pairs");
    windows *= 4;
  }
  if (env.free_count() > max_pairs / windows) throw ResourceLimit("too many (state, window) pairs");

  ExhaustivenessReport report;
  report.k = k;
  report.horizon = horizon;
  report.total_pairs = env.free_count() * windows;
  std::vector<std::uint8_t> seen(report.total_pairs, 0);
  std::size_t remaining = report.total_pairs;

  if (horizon >= k) {
    // Ring of the states at which each pending window started.
    std::vector<CellIndex> history(k);
    DigitCursor cursor(stream, offset);
    CellIndex state = env.start_index();
    std::size_t window = 0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      const Action a = map(cursor.next());
      history[(t - 1) % k] = state;
      window = (window * 4 + static_cast<std::size_t>(a)) % windows;
      state = env.next(state, a);
      if (t >= k) {
        const CellIndex origin = history[(t - k) % k];
        auto& flag = seen[origin * windows + window];
        if (!flag) {
          flag = 1;
          if (--remaining == 0 && report.complete_at == 0) report.complete_at = t;
        }
      }
    }
  }

  for (std::size_t p = 0; p < seen.size(); ++p) {
    if (seen[p]) continue;
    ExhaustivenessReport::Pair pair;
    pair.state = env.cell_at(static_cast<CellIndex>(p / windows));
    std::size_t w = p % windows;
    pair.window.resize(k);
    for (unsigned i = k; i-- > 0;) {
      pair.window[i] = static_cast<Action>(w % 4);
      w /= 4;
    }
    report.unseen.push_back(std::move(pair));
  }
  return report;
}

Cell apply_actions(const GridEnv& env, Cell x, const std::vector<Action>& actions) {
  CellIndex i = env.index_of(x);
  for (Action a : actions) i = env.next(i, a);
  return env.cell_at(i);
}

MergeResult merge_pair_detailed(const GridEnv& env, Cell x, Cell x2) {
  MergeResult result;
  CellIndex chaser = env.index_of(x);
  CellIndex chased = env.index_of(x2);
  const std::size_t budget = env.free_count() * env.free_count();
  while (chaser != chased) {
    if (result.rounds.size() >= budget) {
      throw std::logic_error("pairwise merge exceeded |X|^2 chase rounds");
    }
    const auto path = shortest_path(env, env.cell_at(chaser), {env.cell_at(chased)});
    ChaseRound round{path.size(), false};
    CellIndex moved = chased;
    for (Action a : path) {
      const CellIndex to = env.next(moved, a);
      if (to == moved) round.chased_blocked = true;
      moved = to;
    }
    chaser = chased;
    chased = moved;
    result.actions.insert(result.actions.end(), path.begin(), path.end());
    result.rounds.push_back(round);
  }
  return result;
}

std::vector<Action> merge_pair(const GridEnv& env, Cell x, Cell x2) {
  return merge_pair_detailed(env, x, x2).actions;
}

std::vector<Action> synchronizing_sequence(const GridEnv& env) {
  std::vector<CellIndex> current(env.free_count());
  for (CellIndex i = 0; i < current.size(); ++i) current[i] = i;
  std::vector<Action> sequence;
  while (current.size() > 1) {
    // Indices follow the lexicographic order of cells, and `current` stays sorted.
    const auto merge = merge_pair(env, env.cell_at(current[0]), env.cell_at(current[1]));
    for (auto& s : current) {
      for (Action a : merge) s = env.next(s, a);
    }
    std::sort(current.begin(), current.end());
    current.erase(std::unique(current.begin(), current.end()), current.end());
    sequence.insert(sequence.end(), merge.begin(), merge.end());
  }
  return sequence;
}

bool verify_synchronizing(const GridEnv& env, const std::vector<Action>& sequence) {
  const Cell target = apply_actions(env, env.free_cells().front(), sequence);
  return std::all_of(env.free_cells().begin(), env.free_cells().end(),
                     [&](Cell c) { return apply_actions(env, c, sequence) == target; });
}

}  // namespace uplan
