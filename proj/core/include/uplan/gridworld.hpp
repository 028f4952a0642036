#pragma once

// Discrete robot grid search: a finite, 4-connected set of free cells with
// the stay-put transition (a move into a blocked cell leaves the robot where
// it is).
//
// Coordinates: x grows to the right, y grows upward. In the text format the
// first line is the top row, so row r of an h-row grid has y = h - 1 - r.

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uplan/digits.hpp"

namespace uplan {

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline Cell operator+(Cell c, Vec2i v) { return {c.x + v.x, c.y + v.y}; }

std::string to_string(Cell c);

using CellIndex = std::uint32_t;

class GridEnv {
 public:
  /// `free_mask` is row-major with index y * width + x. Throws ParseError on
  /// disconnected free space, a start or goal outside it, or no goals.
  GridEnv(int width, int height, std::vector<bool> free_mask, Cell start, std::vector<Cell> goals);

  int width() const { return topology_->width; }
  int height() const { return topology_->height; }

  bool is_free(Cell c) const;
  std::size_t free_count() const { return topology_->cells.size(); }

  /// Free cells in lexicographic (x, then y) order; position in this list is the cell index.
  const std::vector<Cell>& free_cells() const { return topology_->cells; }
  CellIndex index_of(Cell c) const;
  Cell cell_at(CellIndex i) const { return topology_->cells[i]; }

  /// Stay-put transition on indices.
  CellIndex next(CellIndex i, Action a) const {
    return topology_->next[4 * static_cast<std::size_t>(i) + static_cast<std::size_t>(a)];
  }

  Cell start() const { return start_; }
  CellIndex start_index() const { return index_of(start_); }
  const std::vector<Cell>& goals() const { return goals_; }
  bool is_goal(Cell c) const;
  bool is_goal_index(CellIndex i) const { return goal_mask_[i] != 0; }

  /// Same free space with a different start and goal set.
  GridEnv with_task(Cell start, std::vector<Cell> goals) const;

  std::string to_text() const;

 private:
  struct Topology {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> index;  // y * width + x -> cell index, -1 when blocked
    std::vector<Cell> cells;
    std::vector<CellIndex> next;      // 4 entries per cell
  };

  GridEnv(std::shared_ptr<const Topology> topology, Cell start, std::vector<Cell> goals);
  void set_task(Cell start, std::vector<Cell> goals);

  std::shared_ptr<const Topology> topology_;
  Cell start_;
  std::vector<Cell> goals_;
  std::vector<std::uint8_t> goal_mask_;
};

/// Characters: '#' obstacle, '.' free, 'S' start (exactly one), 'G' goal (one or more).
GridEnv parse_env(std::string_view text);
GridEnv load_env(const std::string& path);

/// x + u when that cell is free, otherwise x. Throws InvalidState when x is not free.
Cell step(const GridEnv& env, Cell x, Action u);

enum class Outcome { kGoalReached, kBudgetExhausted };

std::string_view to_string(Outcome o);

struct PlanTrace {
  std::vector<Cell> states;  // x_1 = x_I onward
  std::vector<Action> actions;
  std::vector<bool> blocked;
  std::uint64_t steps_taken = 0;
  Outcome outcome = Outcome::kBudgetExhausted;
  std::uint64_t goal_stage = 0;  // 1-based stage of the first goal state, 0 when not reached
  std::size_t total_free = 0;
};

/// Applies c(alpha_offset), c(alpha_offset+1), ... from the start cell until a
/// goal is reached or max_steps actions have been applied. The start is tested
/// before the first action.
PlanTrace execute(const GridEnv& env, const DigitStream& stream, const ActionMap& map,
                  std::uint64_t offset, std::uint64_t max_steps);

/// Same plan as execute() without materializing the trace.
struct RunSummary {
  std::uint64_t steps_taken = 0;
  Outcome outcome = Outcome::kBudgetExhausted;
  std::size_t visited = 0;
  std::size_t total_free = 0;
  Cell final_state;
};

RunSummary run_plan(const GridEnv& env, const DigitStream& stream, const ActionMap& map,
                    std::uint64_t offset, std::uint64_t max_steps);

/// Re-applies trace.actions from trace.states.front() and compares state by state.
bool replay_matches(const GridEnv& env, const PlanTrace& trace);

/// (distinct states visited, number of free cells).
std::pair<std::size_t, std::size_t> coverage(const PlanTrace& trace);

/// Shortest action sequence from `from` to any cell of `targets`, BFS with
/// neighbours expanded left, right, up, down. Empty when from is a target.
std::vector<Action> shortest_path(const GridEnv& env, Cell from, const std::vector<Cell>& targets);

/// Perfect maze by depth-first backtracking over the odd-coordinate cells,
/// neighbour choices drawn from pseudorandom_digit(seed, ., counter). Width and
/// height must be odd and at least 3. Start top-left, goal bottom-right.
GridEnv generate_maze(int width, int height, std::uint64_t seed);

/// Obstacles placed independently with probability obstacle_percent/100, then
/// reduced to the largest 4-connected free component. Start is the first free
/// cell in reading order (top-left), goal the last.
GridEnv generate_random_grid(int width, int height, unsigned obstacle_percent, std::uint64_t seed);

/// Connected set of `cells` free cells grown one random frontier cell at a
/// time. Start is the first cell grown, goal the last.
GridEnv generate_polyomino(std::size_t cells, std::uint64_t seed);

/// Line-oriented trace format: one "x y ACTION BLOCKED" line per action
/// (ACTION in L/R/U/D, BLOCKED 0/1) followed by "x y END outcome".
void write_trace(std::ostream& os, const PlanTrace& trace);
PlanTrace read_trace(std::istream& is, const GridEnv& env);

}  // namespace uplan
