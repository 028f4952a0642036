#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "uplan/automata.hpp"
#include "uplan/errors.hpp"

using namespace uplan;

namespace {

Dfa random_dfa(std::mt19937_64& rng, std::size_t states, std::size_t letters) {
  std::vector<std::uint32_t> delta(states * letters);
  for (auto& d : delta) d = static_cast<std::uint32_t>(rng() % states);
  return Dfa(states, letters, std::move(delta), 0, std::vector<bool>(states, false));
}

// reach[a][b]: b reachable from a, by repeated relaxation.
std::vector<std::vector<bool>> reachability(const Dfa& dfa) {
  const std::size_t n = dfa.state_count();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    reach[a][a] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t b = 0; b < n; ++b) {
        if (!reach[a][b]) continue;
        for (std::size_t l = 0; l < dfa.alphabet_size(); ++l) {
          const auto c = dfa.next(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(l));
          if (!reach[a][c]) reach[a][c] = grew = true;
        }
      }
    }
  }
  return reach;
}

// Classes of mutually reachable states that nothing outside is reachable from.
std::set<std::vector<std::uint32_t>> oracle_terminal_classes(const Dfa& dfa) {
  const auto reach = reachability(dfa);
  const std::size_t n = dfa.state_count();
  std::set<std::vector<std::uint32_t>> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<std::uint32_t> cls;
    bool closed = true;
    for (std::size_t b = 0; b < n; ++b) {
      if (reach[a][b] && reach[b][a]) cls.push_back(static_cast<std::uint32_t>(b));
      else if (reach[a][b]) closed = false;
    }
    if (closed) out.insert(cls);
  }
  return out;
}

}  // namespace

TEST(GridToDfa, SmallCases) {
  const Dfa one = grid_to_dfa(GridEnv(1, 1, {true}, {0, 0}, {{0, 0}}));
  ASSERT_EQ(one.state_count(), 1u);
  for (std::uint32_t l = 0; l < 4; ++l) EXPECT_EQ(one.next(0, l), 0u);

  const GridEnv corridor = parse_env("SG\n");
  const Dfa d = grid_to_dfa(corridor);
  const auto left = corridor.index_of({0, 0});
  const auto right = corridor.index_of({1, 0});
  EXPECT_EQ(d.next(left, static_cast<std::uint32_t>(Action::kRight)), right);
  EXPECT_EQ(d.next(right, static_cast<std::uint32_t>(Action::kRight)), right);
  EXPECT_TRUE(d.accepts(right));
  EXPECT_FALSE(d.accepts(left));
  EXPECT_EQ(d.start(), left);
}

TEST(EssentialClasses, HandExamples) {
  const Dfa absorbing(2, 2, {1, 1, 1, 1}, 0, {false, false});
  const auto a = essential_classes(absorbing);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a.front().members, (std::vector<std::uint32_t>{1}));

  // 0 <-> 1 and 2 <-> 3, no cross edges.
  const Dfa cycles(4, 1, {1, 0, 3, 2}, 0, std::vector<bool>(4, false));
  const auto c = essential_classes(cycles);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].members, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(c[1].members, (std::vector<std::uint32_t>{2, 3}));
}

TEST(EssentialClasses, MatchBruteForceOnRandomDfas) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 300; ++iter) {
    const Dfa dfa = random_dfa(rng, 1 + rng() % 14, 1 + rng() % 3);
    std::set<std::vector<std::uint32_t>> got;
    for (const auto& cls : essential_classes(dfa)) got.insert(cls.members);
    ASSERT_EQ(got, oracle_terminal_classes(dfa)) << "iteration " << iter;
  }
}

TEST(EssentialClasses, ConnectedGridIsOneClass) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const GridEnv env = generate_random_grid(7, 6, 30, seed);
    const auto classes = essential_classes(grid_to_dfa(env));
    ASSERT_EQ(classes.size(), 1u);
    EXPECT_EQ(classes.front().members.size(), env.free_count());
  }
}

TEST(ProductAutomaton, TransitionsFollowTheWindowShift) {
  std::mt19937_64 rng(8);
  for (int iter = 0; iter < 40; ++iter) {
    const Dfa dfa = random_dfa(rng, 1 + rng() % 6, 2 + rng() % 3);
    const unsigned k = 1 + static_cast<unsigned>(rng() % 3);
    const Dfa prod = product_automaton(dfa, k);
    const std::size_t a = dfa.alphabet_size();
    std::size_t windows = 1;
    for (unsigned i = 0; i < k; ++i) windows *= a;
    ASSERT_EQ(prod.state_count(), dfa.state_count() * windows);
    for (std::uint32_t s = 0; s < prod.state_count(); ++s) {
      const std::uint32_t q = static_cast<std::uint32_t>(s / windows);
      const std::size_t window = s % windows;
      const auto head = static_cast<std::uint32_t>(window / (windows / a));
      for (std::uint32_t u = 0; u < a; ++u) {
        const std::size_t shifted = (window % (windows / a)) * a + u;
        ASSERT_EQ(prod.next(s, u), dfa.next(q, head) * windows + shifted);
      }
    }
  }
}

TEST(ProductAutomaton, LemmaOneOnSmallGrids) {
  const Dfa corridor = grid_to_dfa(parse_env("SG\n"));
  const auto c = essential_classes(product_automaton(corridor, 1));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.front().members.size(), 8u);

  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const GridEnv env = generate_polyomino(2 + seed % 8, seed);
    for (unsigned k : {1u, 2u}) {
      const auto classes = essential_classes(product_automaton(grid_to_dfa(env), k));
      ASSERT_EQ(classes.size(), 1u);
      EXPECT_EQ(classes.front().members.size(), env.free_count() * (k == 1 ? 4 : 16));
    }
  }
}

TEST(ProductAutomaton, Limits) {
  const Dfa d = grid_to_dfa(parse_env("SG\n"));
  EXPECT_THROW(product_automaton(d, 0), InvalidArgument);
  EXPECT_THROW(product_automaton(d, 3, 100), ResourceLimit);
}

TEST(VerifyExhaustive, OpenGrids) {
  const GridEnv two(2, 2, std::vector<bool>(4, true), {0, 0}, {{1, 1}});
  const auto r = verify_exhaustive(two, DigitStream::champernowne(4), ActionMap(), 1, 100'000);
  EXPECT_EQ(r.total_pairs, 16u);
  EXPECT_TRUE(r.unseen.empty());
  EXPECT_GT(r.complete_at, 0u);

  const auto none = verify_exhaustive(two, DigitStream::champernowne(4), ActionMap(), 1, 0);
  EXPECT_EQ(none.unseen.size(), 16u);

  const GridEnv three(3, 3, std::vector<bool>(9, true), {0, 0}, {{2, 2}});
  EXPECT_TRUE(verify_exhaustive(three, DigitStream::champernowne(4), ActionMap(), 2, 1'000'000).unseen.empty());
}

TEST(VerifyExhaustive, AgreesWithDirectEnumeration) {
  const GridEnv env = generate_polyomino(6, 4);
  const DigitStream s = DigitStream::pseudorandom(9, 4);
  for (std::uint64_t horizon : {5ull, 40ull, 200ull}) {
    const unsigned k = 2;
    // The plan never stops at the goal here, so walk it by hand.
    std::set<std::pair<Cell, std::vector<Action>>> seen;
    std::vector<Action> actions;
    for (std::uint64_t n = 1; n <= horizon; ++n) actions.push_back(ActionMap()(s.digit(n)));
    Cell x = env.start();
    for (std::uint64_t i = 0; i + k <= horizon; ++i) {
      seen.insert({x, std::vector<Action>(actions.begin() + i, actions.begin() + i + k)});
      x = step(env, x, actions[i]);
    }
    const auto r = verify_exhaustive(env, s, ActionMap(), k, horizon);
    EXPECT_EQ(r.unseen.size(), env.free_count() * 16 - seen.size()) << horizon;
    for (const auto& p : r.unseen) EXPECT_FALSE(seen.count({p.state, p.window}));
  }
}

TEST(MergePair, Examples) {
  const GridEnv corridor = parse_env("SG\n");
  EXPECT_TRUE(merge_pair(corridor, {0, 0}, {0, 0}).empty());
  EXPECT_EQ(merge_pair(corridor, {0, 0}, {1, 0}), (std::vector<Action>{Action::kRight}));
}

TEST(MergePair, DualExecutionAndChaseStructure) {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 200; ++iter) {
    const GridEnv env = generate_random_grid(6, 6, 25, rng());
    const auto& cells = env.free_cells();
    const Cell a = cells[rng() % cells.size()];
    const Cell b = cells[rng() % cells.size()];
    const MergeResult m = merge_pair_detailed(env, a, b);
    ASSERT_EQ(apply_actions(env, a, m.actions), apply_actions(env, b, m.actions));
    ASSERT_LE(m.rounds.size(), env.free_count() * env.free_count());
    std::size_t total = 0;
    for (std::size_t i = 0; i < m.rounds.size(); ++i) {
      total += m.rounds[i].length;
      if (m.rounds[i].chased_blocked && i + 1 < m.rounds.size()) {
        EXPECT_LT(m.rounds[i + 1].length, m.rounds[i].length);
      }
    }
    EXPECT_EQ(total, m.actions.size());
  }
}

TEST(Synchronizing, Examples) {
  const GridEnv one = GridEnv(1, 1, {true}, {0, 0}, {{0, 0}});
  EXPECT_TRUE(synchronizing_sequence(one).empty());
  EXPECT_TRUE(verify_synchronizing(one, {}));
  EXPECT_FALSE(verify_synchronizing(parse_env("SG\n"), {}));
  const GridEnv corridor = parse_env("S.G\n");
  const auto seq = synchronizing_sequence(corridor);
  EXPECT_EQ(seq, (std::vector<Action>{Action::kRight, Action::kRight}));
}

TEST(Synchronizing, RandomGridsMergeToOneCell) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const GridEnv env = generate_polyomino(5 + seed, 500 + seed);
    const auto seq = synchronizing_sequence(env);
    std::set<Cell> ends;
    for (Cell c : env.free_cells()) ends.insert(apply_actions(env, c, seq));
    EXPECT_EQ(ends.size(), 1u);
    EXPECT_TRUE(verify_synchronizing(env, seq));
  }
}
