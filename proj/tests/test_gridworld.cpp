#include <gtest/gtest.h>

#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "uplan/errors.hpp"
#include "uplan/gridworld.hpp"

using namespace uplan;

namespace {

// Free cells read straight from the text, independent of GridEnv.
std::set<Cell> cells_of(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) rows.push_back(line);
  std::set<Cell> out;
  const int h = static_cast<int>(rows.size());
  for (int r = 0; r < h; ++r) {
    for (int x = 0; x < static_cast<int>(rows[r].size()); ++x) {
      if (rows[r][x] != '#') out.insert({x, h - 1 - r});
    }
  }
  return out;
}

int oracle_distance(const std::set<Cell>& cells, Cell from, const std::set<Cell>& goals) {
  std::map<Cell, int> dist{{from, 0}};
  std::queue<Cell> q;
  q.push(from);
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    if (goals.count(c)) return dist[c];
    for (Vec2i d : {Vec2i{1, 0}, Vec2i{-1, 0}, Vec2i{0, 1}, Vec2i{0, -1}}) {
      const Cell n{c.x + d.x, c.y + d.y};
      if (cells.count(n) && !dist.count(n)) {
        dist[n] = dist[c] + 1;
        q.push(n);
      }
    }
  }
  return -1;
}

std::string random_grid_text(std::mt19937_64& rng, int w, int h) {
  std::string text;
  for (int r = 0; r < h; ++r) {
    for (int x = 0; x < w; ++x) text += (rng() % 4 == 0) ? '#' : '.';
    text += '\n';
  }
  return text;
}

std::optional<GridEnv> env_from_mask(const std::string& text, Cell start, Cell goal) {
  std::istringstream is(text);
  std::vector<std::string> rows;
  for (std::string line; std::getline(is, line);) rows.push_back(line);
  const int h = static_cast<int>(rows.size());
  const int w = static_cast<int>(rows[0].size());
  std::vector<bool> mask(static_cast<std::size_t>(w * h), false);
  for (int r = 0; r < h; ++r) {
    for (int x = 0; x < w; ++x) mask[(h - 1 - r) * w + x] = rows[r][x] != '#';
  }
  try {
    return GridEnv(w, h, mask, start, {goal});
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

}  // namespace

TEST(ParseEnv, CoordinatesFollowTheTextLayout) {
  const GridEnv env = parse_env("S.\n.G\n");
  EXPECT_EQ(env.free_count(), 4u);
  EXPECT_EQ(env.start(), (Cell{0, 1}));
  ASSERT_EQ(env.goals().size(), 1u);
  EXPECT_EQ(env.goals().front(), (Cell{1, 0}));
  EXPECT_EQ(env.to_text(), "S.\n.G\n");
}

TEST(ParseEnv, DistinctErrors) {
  auto kind_of = [](const std::string& text) {
    try {
      parse_env(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << text;
    return ParseError::Kind::kEmpty;
  };
  EXPECT_EQ(kind_of("S#G"), ParseError::Kind::kDisconnected);
  EXPECT_EQ(kind_of("..G"), ParseError::Kind::kNoStart);
  EXPECT_EQ(kind_of("S.."), ParseError::Kind::kNoGoal);
  EXPECT_EQ(kind_of("S.\n.G.\n"), ParseError::Kind::kNonRectangular);
  EXPECT_EQ(kind_of("S.x\n..G\n"), ParseError::Kind::kBadCharacter);
  EXPECT_EQ(kind_of("SS\n.G\n"), ParseError::Kind::kMultipleStarts);
  EXPECT_EQ(kind_of(""), ParseError::Kind::kEmpty);
}

TEST(ParseEnv, LargeInstanceWithKnownFreeCount) {
  // 100 x 100 with 2876 blocked cells placed on a stride that keeps the rest connected.
  std::string text;
  int blocked = 0;
  for (int r = 0; r < 100; ++r) {
    for (int x = 0; x < 100; ++x) {
      char c = '.';
      if (r == 0 && x == 0) c = 'S';
      else if (r == 99 && x == 99) c = 'G';
      else if (r % 2 == 1 && x % 3 != 0 && blocked < 2876) {
        c = '#';
        ++blocked;
      }
      text += c;
    }
    text += '\n';
  }
  ASSERT_EQ(blocked, 2876);
  EXPECT_EQ(parse_env(text).free_count(), 7124u);
}

TEST(Step, StayPutSemantics) {
  const GridEnv open = parse_env("S.\n.G\n");
  EXPECT_EQ(step(open, {0, 0}, Action::kRight), (Cell{1, 0}));
  const GridEnv walled = parse_env("S#\n.G\n");
  EXPECT_EQ(step(walled, {0, 1}, Action::kRight), (Cell{0, 1}));
  EXPECT_EQ(step(walled, {0, 1}, Action::kLeft), (Cell{0, 1}));
  EXPECT_THROW(step(walled, {1, 1}, Action::kLeft), InvalidState);
}

TEST(Step, BlockedMovesThenDown) {
  const GridEnv env = parse_env("S#\n.G\n");
  Cell x = env.start();
  for (Action a : {Action::kRight, Action::kRight, Action::kRight, Action::kRight, Action::kDown}) x = step(env, x, a);
  EXPECT_EQ(x.x - env.start().x, 0);
  EXPECT_EQ(x.y - env.start().y, -1);
}

TEST(Step, TransitionTotalityOnRandomGrids) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 40; ++iter) {
    const GridEnv env = generate_random_grid(3 + iter % 7, 2 + iter % 5, 30, rng());
    for (Cell c : env.free_cells()) {
      for (Action a : kAllActions) {
        const Cell n = step(env, c, a);
        ASSERT_TRUE(env.is_free(n));
        const Cell target = c + unit_vector(a);
        ASSERT_EQ(n, env.is_free(target) ? target : c);
        ASSERT_EQ(env.cell_at(env.next(env.index_of(c), a)), n);
      }
    }
  }
}

TEST(Execute, StartInGoal) {
  const GridEnv env = GridEnv(2, 1, {true, true}, {0, 0}, {{0, 0}});
  const PlanTrace t = execute(env, DigitStream::champernowne(4), ActionMap(), 1, 100);
  EXPECT_EQ(t.outcome, Outcome::kGoalReached);
  EXPECT_EQ(t.steps_taken, 0u);
  EXPECT_EQ(t.goal_stage, 1u);
  EXPECT_EQ(t.states.size(), 1u);
}

TEST(Execute, CorridorSingleMove) {
  const GridEnv env = parse_env("SG\n");
  const PlanTrace t = execute(env, DigitStream::from_digits("1"), ActionMap(), 1, 10);
  EXPECT_EQ(t.outcome, Outcome::kGoalReached);
  EXPECT_EQ(t.steps_taken, 1u);
}

TEST(Execute, TwoByTwoHandReplay) {
  // Start bottom-left, goal top-right. Champernowne digits 0 1 2 3 1 0 ... map to
  // L R U D R L: (0,0) L-> (0,0) R-> (1,0) U-> (1,1) goal after 3 actions.
  const GridEnv env = parse_env(".G\nS.\n");
  const PlanTrace t = execute(env, DigitStream::champernowne(4), ActionMap(), 1, 100);
  EXPECT_EQ(t.outcome, Outcome::kGoalReached);
  EXPECT_EQ(t.steps_taken, 3u);
  EXPECT_EQ(t.blocked, (std::vector<bool>{true, false, false}));
}

TEST(Execute, TraceInvariantsAndReplay) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 30; ++iter) {
    const GridEnv env = generate_random_grid(6, 6, 25, rng());
    const PlanTrace t = execute(env, DigitStream::pseudorandom(iter, 4), ActionMap(), 1 + iter * 13, 2000);
    ASSERT_EQ(t.states.size(), t.actions.size() + 1);
    ASSERT_EQ(t.blocked.size(), t.actions.size());
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      const Cell target = t.states[i] + unit_vector(t.actions[i]);
      ASSERT_EQ(t.blocked[i], !env.is_free(target));
      ASSERT_EQ(t.states[i + 1], t.blocked[i] ? t.states[i] : target);
    }
    EXPECT_TRUE(replay_matches(env, t));
    const RunSummary s = run_plan(env, DigitStream::pseudorandom(iter, 4), ActionMap(), 1 + iter * 13, 2000);
    EXPECT_EQ(s.steps_taken, t.steps_taken);
    EXPECT_EQ(s.outcome, t.outcome);
    EXPECT_EQ(s.visited, coverage(t).first);
    EXPECT_EQ(s.final_state, t.states.back());
  }
}

TEST(Execute, ReplayDetectsTampering) {
  const GridEnv env = parse_env("S..\n..G\n");
  PlanTrace t = execute(env, DigitStream::champernowne(4), ActionMap(), 1, 50);
  ASSERT_GE(t.states.size(), 3u);
  t.states[2] = t.states[1] == Cell{0, 0} ? Cell{2, 1} : Cell{0, 0};
  EXPECT_FALSE(replay_matches(env, t));
}

TEST(Coverage, EmptyAndSweep) {
  const GridEnv env = parse_env("S.\n.G\n");
  PlanTrace empty;
  empty.states = {env.start()};
  empty.total_free = env.free_count();
  EXPECT_EQ(coverage(empty), (std::pair<std::size_t, std::size_t>{1, 4}));

  // R U L from the bottom-left corner visits all four cells, the last being the goal.
  const GridEnv open = parse_env("G.\nS.\n");
  const PlanTrace sweep = execute(open, DigitStream::from_digits("120"), ActionMap(), 1, 3);
  EXPECT_EQ(sweep.outcome, Outcome::kGoalReached);
  EXPECT_EQ(coverage(sweep).first, 4u);
}

TEST(ShortestPath, MatchesIndependentBfs) {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 60) {
    const std::string text = random_grid_text(rng, 2 + rng() % 7, 2 + rng() % 7);
    const auto cells = cells_of(text);
    if (cells.size() < 2) continue;
    std::vector<Cell> list(cells.begin(), cells.end());
    const Cell from = list[rng() % list.size()];
    const Cell to = list[rng() % list.size()];
    if (oracle_distance(cells, from, {to}) < 0) continue;
    const auto env = env_from_mask(text, from, to);
    if (!env) continue;  // free space disconnected elsewhere
    const auto path = shortest_path(*env, from, {to});
    ASSERT_EQ(static_cast<int>(path.size()), oracle_distance(cells, from, {to}));
    Cell x = from;
    for (Action a : path) {
      const Cell n = step(*env, x, a);
      ASSERT_NE(n, x) << "shortest path contains a blocked move";
      x = n;
    }
    EXPECT_EQ(x, to);
    ++checked;
  }
}

TEST(ShortestPath, TrivialCases) {
  const GridEnv env = parse_env("S.G\n");
  EXPECT_TRUE(shortest_path(env, {2, 0}, {{2, 0}}).empty());
  EXPECT_EQ(shortest_path(env, {0, 0}, {{2, 0}}), (std::vector<Action>{Action::kRight, Action::kRight}));
}

TEST(GenerateMaze, SmallestMaze) {
  const GridEnv env = generate_maze(3, 3, 9);
  EXPECT_EQ(env.free_count(), 1u);
  EXPECT_THROW(generate_maze(4, 5, 1), InvalidArgument);
  EXPECT_THROW(generate_maze(1, 5, 1), InvalidArgument);
}

TEST(GenerateMaze, DeterministicPerfectMaze) {
  const GridEnv a = generate_maze(41, 41, 7);
  const GridEnv b = generate_maze(41, 41, 7);
  EXPECT_EQ(a.to_text(), b.to_text());
  EXPECT_NE(a.to_text(), generate_maze(41, 41, 8).to_text());
  // A perfect maze is a tree: edges = vertices - 1, and BFS reaches every cell.
  const auto cells = cells_of(a.to_text());
  EXPECT_EQ(cells.size(), a.free_count());
  std::size_t edges = 0;
  for (Cell c : cells) {
    if (cells.count({c.x + 1, c.y})) ++edges;
    if (cells.count({c.x, c.y + 1})) ++edges;
  }
  EXPECT_EQ(edges, cells.size() - 1);
  EXPECT_EQ(a.start(), (Cell{1, 39}));
  EXPECT_EQ(a.goals().front(), (Cell{39, 1}));
  for (Cell c : cells) ASSERT_GE(oracle_distance(cells, a.start(), {c}), 0);
}

TEST(Generators, RandomGridAndPolyomino) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GridEnv g = generate_random_grid(12, 9, 35, seed);
    const auto cells = cells_of(g.to_text());
    for (Cell c : cells) ASSERT_GE(oracle_distance(cells, g.start(), {c}), 0);
    const GridEnv p = generate_polyomino(5 + seed, seed);
    EXPECT_EQ(p.free_count(), 5 + seed);
    EXPECT_EQ(generate_polyomino(5 + seed, seed).to_text(), p.to_text());
  }
}

TEST(TraceFormat, RoundTrip) {
  const GridEnv env = generate_random_grid(5, 5, 20, 3);
  const PlanTrace t = execute(env, DigitStream::pi4(), ActionMap(), 1, 300);
  std::stringstream ss;
  write_trace(ss, t);
  const PlanTrace back = read_trace(ss, env);
  EXPECT_EQ(back.states, t.states);
  EXPECT_EQ(back.actions, t.actions);
  EXPECT_EQ(back.blocked, t.blocked);
  EXPECT_EQ(back.outcome, t.outcome);
}
