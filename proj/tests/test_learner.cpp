#include <gtest/gtest.h>

#include "uplan/automata.hpp"
#include "uplan/learner.hpp"

using namespace uplan;

TEST(Learner, StartInGoalGivesEmptyPlan) {
  const GridEnv env = GridEnv(2, 1, {true, true}, {0, 0}, {{0, 0}});
  const LearnerState s = learn_optimal(env, DigitStream::champernowne(4), ActionMap(), 1, 1000);
  ASSERT_TRUE(s.best_plan.has_value());
  EXPECT_TRUE(s.best_plan->empty());
  EXPECT_EQ(s.steps_consumed, 0u);
}

TEST(Learner, CorridorReachesBfsLength) {
  const GridEnv env = parse_env("S.G\n");
  const LearnerState s = learn_optimal(env, DigitStream::champernowne(4), ActionMap(), 1, 100'000);
  ASSERT_TRUE(s.best_plan.has_value());
  EXPECT_EQ(s.best_plan->size(), 2u);
  EXPECT_EQ(bfs_shortest(env, env.start(), env.goals()).size(), 2u);
  EXPECT_EQ(s.steps_consumed, 100'000u);
}

TEST(Learner, StoredPlansReplayIntoTheGoal) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const GridEnv env = generate_random_grid(5, 4, 20, seed);
    const LearnerState s = learn_optimal(env, DigitStream::pseudorandom(seed, 4), ActionMap(), 1, 200'000);
    if (!s.best_plan) continue;
    EXPECT_TRUE(env.is_goal(apply_actions(env, env.start(), *s.best_plan)));
    EXPECT_GE(s.best_plan->size(), bfs_shortest(env, env.start(), env.goals()).size());
  }
}

TEST(Learner, PlanLengthNeverGrowsWithBudget) {
  const GridEnv env = generate_random_grid(6, 5, 20, 77);
  std::optional<std::size_t> previous;
  for (std::uint64_t budget : {100ull, 1000ull, 10'000ull, 100'000ull, 1'000'000ull}) {
    const LearnerState s = learn_optimal(env, DigitStream::champernowne(4), ActionMap(), 1, budget);
    if (previous) {
      ASSERT_TRUE(s.best_plan.has_value());
      EXPECT_LE(s.best_plan->size(), *previous);
    }
    if (s.best_plan) previous = s.best_plan->size();
  }
  ASSERT_TRUE(previous.has_value());
}

TEST(Learner, ConvergesToBfsOnSmallGrids) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const GridEnv env = generate_polyomino(6 + seed, 900 + seed);
    const LearnerState s = learn_optimal(env, DigitStream::champernowne(4), ActionMap(), 1, 5'000'000);
    ASSERT_TRUE(s.best_plan.has_value());
    EXPECT_EQ(s.best_plan->size(), bfs_shortest(env, env.start(), env.goals()).size()) << "seed " << seed;
  }
}

TEST(Learner, BufferCapIsCounted) {
  const GridEnv env = parse_env("S.........G\n");
  const LearnerState s = learn_optimal(env, DigitStream::champernowne(4), ActionMap(), 1, 50'000, 3);
  EXPECT_GT(s.cap_hits, 0u);
  EXPECT_FALSE(s.best_plan.has_value());
  EXPECT_EQ(default_buffer_cap(env), 44u);
}

TEST(BfsShortest, ExecutesIntoTheGoal) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridEnv env = generate_maze(11, 9, seed);
    const auto path = bfs_shortest(env, env.start(), env.goals());
    const PlanTrace t = [&] {
      std::string digits;
      for (Action a : path) digits += static_cast<char>('0' + static_cast<int>(a));
      return execute(env, DigitStream::from_digits(digits.empty() ? "0" : digits), ActionMap(), 1, path.size());
    }();
    EXPECT_EQ(t.outcome, Outcome::kGoalReached);
    EXPECT_EQ(t.steps_taken, path.size());
  }
  const GridEnv corridor = parse_env("S.G\n");
  EXPECT_TRUE(bfs_shortest(corridor, {2, 0}, corridor.goals()).empty());
}
