#include "uplan/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "uplan/errors.hpp"

namespace uplan {

std::string to_string(Cell c) { return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

std::string_view to_string(Outcome o) {
  return o == Outcome::kGoalReached ? "goal" : "budget";
}

namespace {

std::size_t count_component(const std::vector<bool>& mask, int width, int height, int sx, int sy,
                            std::vector<int>* label = nullptr, int id = 0) {
  std::vector<bool> seen(mask.size(), false);
  std::deque<std::pair<int, int>> queue{{sx, sy}};
  seen[static_cast<std::size_t>(sy) * width + sx] = true;
  std::size_t count = 0;
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    ++count;
    if (label) (*label)[static_cast<std::size_t>(y) * width + x] = id;
    for (Action a : kAllActions) {
      const Vec2i d = unit_vector(a);
      const int nx = x + d.x;
      const int ny = y + d.y;
      if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
      const auto k = static_cast<std::size_t>(ny) * width + nx;
      if (!mask[k] || seen[k]) continue;
      seen[k] = true;
      queue.emplace_back(nx, ny);
    }
  }
  return count;
}

// Maps each digit value to an action index, -1 outside the map domain.
std::vector<int> action_lut(const ActionMap& map, unsigned base) {
  std::vector<int> lut(base, -1);
  for (unsigned d = 0; d < base && d < map.domain_size(); ++d) {
    lut[d] = static_cast<int>(map(static_cast<std::uint8_t>(d)));
  }
  return lut;
}

Action lookup(const std::vector<int>& lut, std::uint8_t digit) {
  if (digit >= lut.size() || lut[digit] < 0) {
    throw InvalidArgument("digit " + std::to_string(digit) + " is outside the action map domain");
  }
  return static_cast<Action>(lut[digit]);
}

// Drives the plan; on_step(from, action, to) is called for every applied action.
template <typename OnStep>
std::pair<std::uint64_t, Outcome> drive(const GridEnv& env, const DigitStream& stream, const ActionMap& map,
                                        std::uint64_t offset, std::uint64_t max_steps, OnStep&& on_step) {
  CellIndex state = env.start_index();
  if (env.is_goal_index(state)) return {0, Outcome::kGoalReached};
  if (max_steps == 0) return {0, Outcome::kBudgetExhausted};
  const auto lut = action_lut(map, stream.base());
  DigitCursor cursor(stream, offset);
  for (std::uint64_t step = 1; step <= max_steps; ++step) {
    const Action a = lookup(lut, cursor.next());
    const CellIndex to = env.next(state, a);
    on_step(state, a, to);
    state = to;
    if (env.is_goal_index(state)) return {step, Outcome::kGoalReached};
  }
  return {max_steps, Outcome::kBudgetExhausted};
}

}  // namespace

GridEnv::GridEnv(int width, int height, std::vector<bool> free_mask, Cell start, std::vector<Cell> goals) {
  if (width <= 0 || height <= 0) throw ParseError(ParseError::Kind::kEmpty, "environment has no cells");
  if (free_mask.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidArgument("free mask size does not match width * height");
  }
  auto topo = std::make_shared<Topology>();
  topo->width = width;
  topo->height = height;
  topo->index.assign(free_mask.size(), -1);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      if (free_mask[static_cast<std::size_t>(y) * width + x]) {
        topo->index[static_cast<std::size_t>(y) * width + x] = static_cast<std::int32_t>(topo->cells.size());
        topo->cells.push_back({x, y});
      }
    }
  }
  if (topo->cells.empty()) throw ParseError(ParseError::Kind::kEmpty, "environment has no free cells");
  const Cell first = topo->cells.front();
  if (count_component(free_mask, width, height, first.x, first.y) != topo->cells.size()) {
    throw ParseError(ParseError::Kind::kDisconnected, "free space is not 4-connected");
  }
  topo->next.resize(4 * topo->cells.size());
  for (std::size_t i = 0; i < topo->cells.size(); ++i) {
    for (Action a : kAllActions) {
      const Cell to = topo->cells[i] + unit_vector(a);
      CellIndex target = static_cast<CellIndex>(i);
      if (to.x >= 0 && to.y >= 0 && to.x < width && to.y < height) {
        const auto k = topo->index[static_cast<std::size_t>(to.y) * width + to.x];
        if (k >= 0) target = static_cast<CellIndex>(k);
      }
      topo->next[4 * i + static_cast<std::size_t>(a)] = target;
    }
  }
  topology_ = std::move(topo);
  set_task(start, std::move(goals));
}

GridEnv::GridEnv(std::shared_ptr<const Topology> topology, Cell start, std::vector<Cell> goals)
    : topology_(std::move(topology)) {
  set_task(start, std::move(goals));
}

void GridEnv::set_task(Cell start, std::vector<Cell> goals) {
  if (!is_free(start)) throw ParseError(ParseError::Kind::kNoStart, "start " + to_string(start) + " is not free");
  if (goals.empty()) throw ParseError(ParseError::Kind::kNoGoal, "goal set is empty");
  std::sort(goals.begin(), goals.end());
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());
  goal_mask_.assign(free_count(), 0);
  for (Cell g : goals) {
    if (!is_free(g)) throw ParseError(ParseError::Kind::kNoGoal, "goal " + to_string(g) + " is not free");
    goal_mask_[index_of(g)] = 1;
  }
  start_ = start;
  goals_ = std::move(goals);
}

bool GridEnv::is_free(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width() || c.y >= height()) return false;
  return topology_->index[static_cast<std::size_t>(c.y) * width() + c.x] >= 0;
}

CellIndex GridEnv::index_of(Cell c) const {
  if (!is_free(c)) throw InvalidState("cell " + to_string(c) + " is not free");
  return static_cast<CellIndex>(topology_->index[static_cast<std::size_t>(c.y) * width() + c.x]);
}

bool GridEnv::is_goal(Cell c) const { return is_free(c) && goal_mask_[index_of(c)] != 0; }

GridEnv GridEnv::with_task(Cell start, std::vector<Cell> goals) const {
  return GridEnv(topology_, start, std::move(goals));
}

std::string GridEnv::to_text() const {
  std::string out;
  for (int y = height() - 1; y >= 0; --y) {
    for (int x = 0; x < width(); ++x) {
      const Cell c{x, y};
      if (!is_free(c)) out.push_back('#');
      else if (c == start_) out.push_back('S');
      else if (is_goal(c)) out.push_back('G');
      else out.push_back('.');
    }
    out.push_back('\n');
  }
  return out;
}

GridEnv parse_env(std::string_view text) {
  std::vector<std::string> rows;
  std::string line;
  std::istringstream is{std::string(text)};
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    rows.push_back(line);
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty() || rows.front().empty()) throw ParseError(ParseError::Kind::kEmpty, "empty environment");

  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  std::vector<bool> mask(static_cast<std::size_t>(width) * height, false);
  std::optional<Cell> start;
  std::vector<Cell> goals;
  for (int r = 0; r < height; ++r) {
    const auto& row = rows[r];
    for (char c : row) {
      if (c != '#' && c != '.' && c != 'S' && c != 'G') {
        throw ParseError(ParseError::Kind::kBadCharacter, std::string("unexpected character '") + c + "'");
      }
    }
    if (static_cast<int>(row.size()) != width) {
      throw ParseError(ParseError::Kind::kNonRectangular,
                       "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                           " columns, expected " + std::to_string(width));
    }
    const int y = height - 1 - r;
    for (int x = 0; x < width; ++x) {
      const char c = row[x];
      if (c == '#') continue;
      mask[static_cast<std::size_t>(y) * width + x] = true;
      if (c == 'S') {
        if (start) throw ParseError(ParseError::Kind::kMultipleStarts, "more than one start cell");
        start = Cell{x, y};
      } else if (c == 'G') {
        goals.push_back({x, y});
      }
    }
  }
  if (!start) throw ParseError(ParseError::Kind::kNoStart, "no start cell");
  if (goals.empty()) throw ParseError(ParseError::Kind::kNoGoal, "no goal cell");
  return GridEnv(width, height, std::move(mask), *start, std::move(goals));
}

GridEnv load_env(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open environment file: " + path);
  std::ostringstream text;
  text << is.rdbuf();
  return parse_env(text.str());
}

Cell step(const GridEnv& env, Cell x, Action u) {
  if (!env.is_free(x)) throw InvalidState("state " + to_string(x) + " is not in the free space");
  const Cell to = x + unit_vector(u);
  return env.is_free(to) ? to : x;
}

PlanTrace execute(const GridEnv& env, const DigitStream& stream, const ActionMap& map, std::uint64_t offset,
                  std::uint64_t max_steps) {
  PlanTrace trace;
  trace.total_free = env.free_count();
  trace.states.push_back(env.start());
  const auto [steps, outcome] = drive(env, stream, map, offset, max_steps, [&](CellIndex from, Action a, CellIndex to) {
    trace.actions.push_back(a);
    trace.blocked.push_back(from == to);
    trace.states.push_back(env.cell_at(to));
  });
  trace.steps_taken = steps;
  trace.outcome = outcome;
  trace.goal_stage = outcome == Outcome::kGoalReached ? steps + 1 : 0;
  return trace;
}

RunSummary run_plan(const GridEnv& env, const DigitStream& stream, const ActionMap& map, std::uint64_t offset,
                    std::uint64_t max_steps) {
  std::vector<std::uint8_t> seen(env.free_count(), 0);
  CellIndex last = env.start_index();
  seen[last] = 1;
  std::size_t visited = 1;
  const auto [steps, outcome] = drive(env, stream, map, offset, max_steps, [&](CellIndex, Action, CellIndex to) {
    if (!seen[to]) {
      seen[to] = 1;
      ++visited;
    }
    last = to;
  });
  return {steps, outcome, visited, env.free_count(), env.cell_at(last)};
}

bool replay_matches(const GridEnv& env, const PlanTrace& trace) {
  if (trace.states.size() != trace.actions.size() + 1) return false;
  if (trace.blocked.size() != trace.actions.size()) return false;
  Cell x = trace.states.front();
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    const Cell to = step(env, x, trace.actions[i]);
    if (to != trace.states[i + 1]) return false;
    if (trace.blocked[i] != (to == x && !env.is_free(x + unit_vector(trace.actions[i])))) return false;
    x = to;
  }
  return true;
}

std::pair<std::size_t, std::size_t> coverage(const PlanTrace& trace) {
  std::set<Cell> distinct(trace.states.begin(), trace.states.end());
  return {distinct.size(), trace.total_free};
}

std::vector<Action> shortest_path(const GridEnv& env, Cell from, const std::vector<Cell>& targets) {
  const CellIndex source = env.index_of(from);
  std::vector<std::uint8_t> is_target(env.free_count(), 0);
  for (Cell t : targets) is_target[env.index_of(t)] = 1;
  if (is_target[source]) return {};

  constexpr CellIndex kUnseen = ~CellIndex{0};
  std::vector<CellIndex> parent(env.free_count(), kUnseen);
  std::vector<Action> via(env.free_count(), Action::kLeft);
  std::deque<CellIndex> queue{source};
  parent[source] = source;
  while (!queue.empty()) {
    const CellIndex u = queue.front();
    queue.pop_front();
    for (Action a : kAllActions) {
      const CellIndex v = env.next(u, a);
      if (parent[v] != kUnseen) continue;
      parent[v] = u;
      via[v] = a;
      if (is_target[v]) {
        std::vector<Action> path;
        for (CellIndex w = v; w != source; w = parent[w]) path.push_back(via[w]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(v);
    }
  }
  throw InvalidState("no target reachable from " + to_string(from));
}

GridEnv generate_maze(int width, int height, std::uint64_t seed) {
  if (width < 3 || height < 3 || width % 2 == 0 || height % 2 == 0) {
    throw InvalidArgument("maze dimensions must be odd and at least 3");
  }
  std::vector<bool> mask(static_cast<std::size_t>(width) * height, false);
  auto at = [&](int x, int y) { return mask[static_cast<std::size_t>(y) * width + x]; };
  auto carve = [&](int x, int y) { mask[static_cast<std::size_t>(y) * width + x] = true; };

  const Cell first{1, height - 2};
  carve(first.x, first.y);
  std::vector<Cell> stack{first};
  std::uint64_t draws = 0;
  while (!stack.empty()) {
    const Cell c = stack.back();
    std::vector<Action> options;
    for (Action a : kAllActions) {
      const Vec2i d = unit_vector(a);
      const int nx = c.x + 2 * d.x;
      const int ny = c.y + 2 * d.y;
      if (nx < 1 || ny < 1 || nx > width - 2 || ny > height - 2) continue;
      if (!at(nx, ny)) options.push_back(a);
    }
    if (options.empty()) {
      stack.pop_back();
      continue;
    }
    std::size_t pick = 0;
    if (options.size() > 1) {
      pick = pseudorandom_digit(seed, static_cast<unsigned>(options.size()), ++draws);
    }
    const Vec2i d = unit_vector(options[pick]);
    carve(c.x + d.x, c.y + d.y);
    carve(c.x + 2 * d.x, c.y + 2 * d.y);
    stack.push_back({c.x + 2 * d.x, c.y + 2 * d.y});
  }
  return GridEnv(width, height, std::move(mask), first, {Cell{width - 2, 1}});
}

GridEnv generate_random_grid(int width, int height, unsigned obstacle_percent, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw InvalidArgument("grid dimensions must be positive");
  if (obstacle_percent > 99) throw InvalidArgument("obstacle percentage must be below 100");
  const auto n = static_cast<std::size_t>(width) * height;
  std::vector<bool> mask(n, false);
  // Reading order: top row first.
  std::uint64_t counter = 0;
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      mask[static_cast<std::size_t>(y) * width + x] = pseudorandom_digit(seed, 100, ++counter) >= obstacle_percent;
    }
  }
  std::vector<int> label(n, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      const auto k = static_cast<std::size_t>(y) * width + x;
      if (!mask[k] || label[k] >= 0) continue;
      const std::size_t size = count_component(mask, width, height, x, y, &label, next_label);
      if (size > best_size) {
        best_size = size;
        best_label = next_label;
      }
      ++next_label;
    }
  }
  if (best_label < 0) {
    mask[static_cast<std::size_t>(height - 1) * width] = true;
    label[static_cast<std::size_t>(height - 1) * width] = best_label = 0;
  }
  std::optional<Cell> start;
  Cell goal;
  for (int y = height - 1; y >= 0; --y) {
    for (int x = 0; x < width; ++x) {
      const auto k = static_cast<std::size_t>(y) * width + x;
      mask[k] = mask[k] && label[k] == best_label;
      if (mask[k]) {
        if (!start) start = Cell{x, y};
        goal = {x, y};
      }
    }
  }
  return GridEnv(width, height, std::move(mask), *start, {goal});
}

GridEnv generate_polyomino(std::size_t cells, std::uint64_t seed) {
  if (cells == 0 || cells > 200) throw InvalidArgument("polyomino size must lie in [1, 200]");
  std::vector<Cell> grown{{0, 0}};
  std::set<Cell> members{{0, 0}};
  std::uint64_t draws = 0;
  while (grown.size() < cells) {
    std::set<Cell> frontier;
    for (Cell c : grown) {
      for (Action a : kAllActions) {
        const Cell n = c + unit_vector(a);
        if (!members.count(n)) frontier.insert(n);
      }
    }
    const std::vector<Cell> options(frontier.begin(), frontier.end());
    const std::size_t pick =
        options.size() > 1 ? pseudorandom_digit(seed, static_cast<unsigned>(std::min<std::size_t>(options.size(), 256)),
                                                ++draws)
                           : 0;
    grown.push_back(options[pick]);
    members.insert(options[pick]);
  }
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  for (Cell c : grown) {
    min_x = std::min(min_x, c.x);
    min_y = std::min(min_y, c.y);
    max_x = std::max(max_x, c.x);
    max_y = std::max(max_y, c.y);
  }
  const int width = max_x - min_x + 1;
  const int height = max_y - min_y + 1;
  std::vector<bool> mask(static_cast<std::size_t>(width) * height, false);
  for (Cell& c : grown) {
    c = {c.x - min_x, c.y - min_y};
    mask[static_cast<std::size_t>(c.y) * width + c.x] = true;
  }
  return GridEnv(width, height, std::move(mask), grown.front(), {grown.back()});
}

void write_trace(std::ostream& os, const PlanTrace& trace) {
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    os << trace.states[i].x << ' ' << trace.states[i].y << ' ' << action_letter(trace.actions[i]) << ' '
       << (trace.blocked[i] ? 1 : 0) << '\n';
  }
  const Cell last = trace.states.back();
  os << last.x << ' ' << last.y << " END " << to_string(trace.outcome) << '\n';
}

PlanTrace read_trace(std::istream& is, const GridEnv& env) {
  PlanTrace trace;
  trace.total_free = env.free_count();
  std::string line;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    Cell c;
    std::string action;
    std::string flag;
    if (!(fields >> c.x >> c.y >> action >> flag)) {
      throw ParseError(ParseError::Kind::kBadValue, "malformed trace line: " + line);
    }
    trace.states.push_back(c);
    if (action == "END") {
      trace.outcome = flag == "goal" ? Outcome::kGoalReached : Outcome::kBudgetExhausted;
      ended = true;
      break;
    }
    if (action.size() != 1) throw ParseError(ParseError::Kind::kBadValue, "bad action in trace: " + action);
    trace.actions.push_back(action_from_letter(action.front()));
    trace.blocked.push_back(flag == "1");
  }
  if (!ended) throw ParseError(ParseError::Kind::kBadValue, "trace has no END line");
  trace.steps_taken = trace.actions.size();
  trace.goal_stage = trace.outcome == Outcome::kGoalReached ? trace.steps_taken + 1 : 0;
  if (!replay_matches(env, trace)) throw ParseError(ParseError::Kind::kBadValue, "trace does not replay in environment");
  return trace;
}

}  // namespace uplan
