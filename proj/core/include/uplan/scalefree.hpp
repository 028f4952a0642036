#pragma once

// Continuous planar environments and scale-free universal plans.
//
// Free space X is the closed rectangle [0,W]x[0,H] minus a union of open
// discs. A point robot moves in the four axis directions by dyadic step
// sizes and stays put when the end point leaves X. Every coordinate is kept
// as anchor + unit * k * 2^-e with integer k, so no rounding ever happens.

#include <cstdint>
#include <iosfwd>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uplan/digits.hpp"
#include "uplan/gridworld.hpp"
#include "uplan/rational.hpp"

namespace uplan {

struct Disc {
  Rational cx;
  Rational cy;
  Rational radius;
};

class ContinuousEnv {
 public:
  /// Validates: positive extents, discs inside the rectangle, goal centre and
  /// starts in the open free space, positive goal radius, and connectivity of
  /// the free space by BFS on a fine lattice anchored at the goal centre.
  ContinuousEnv(Rational width, Rational height, std::vector<Disc> obstacles, RationalPoint goal_center,
                Rational goal_radius, std::vector<RationalPoint> starts = {});

  const Rational& width() const { return width_; }
  const Rational& height() const { return height_; }
  const std::vector<Disc>& obstacles() const { return obstacles_; }
  const RationalPoint& goal_center() const { return goal_center_; }
  const Rational& goal_radius() const { return goal_radius_; }
  const std::vector<RationalPoint>& starts() const { return starts_; }

  /// Closed free space: inside the closed rectangle, not inside any open disc.
  bool in_free_space(const RationalPoint& p) const;
  bool in_interior(const RationalPoint& p) const;
  /// Open goal ball intersected with the interior.
  bool in_goal(const RationalPoint& p) const;

  std::string to_text() const;

 private:
  Rational width_;
  Rational height_;
  std::vector<Disc> obstacles_;
  RationalPoint goal_center_;
  Rational goal_radius_;
  std::vector<RationalPoint> starts_;
};

/// Key-value text: "rect W H", "disc cx cy r" (repeatable), "goal cx cy r",
/// "start x y" (repeatable). Numbers are rationals ("3/4", "2", "0.5").
ContinuousEnv parse_continuous_env(std::string_view text);
ContinuousEnv load_continuous_env(const std::string& path);

/// Offset k * 2^-exponent from a frame's anchor, in units of the frame's unit.
struct DyadicPoint {
  BigInt x;
  BigInt y;
  unsigned exponent = 0;
};

bool same_position(const DyadicPoint& a, const DyadicPoint& b);

/// Move of length unit * 2^-exponent along an axis direction.
struct ScaledAction {
  Action direction = Action::kLeft;
  unsigned exponent = 0;
};

/// Exact membership tests for dyadic offsets from a fixed anchor.
///
/// All environment data is rescaled to integers once; comparisons at exponent
/// e use integer constants cached per level. Not safe for concurrent use.
class ExactFrame {
 public:
  ExactFrame(const ContinuousEnv& env, RationalPoint anchor, Rational unit = Rational(1));

  const ContinuousEnv& env() const { return *env_; }
  const RationalPoint& anchor() const { return anchor_; }
  const Rational& unit() const { return unit_; }

  RationalPoint to_point(const DyadicPoint& p) const;

  bool in_free_space(const DyadicPoint& p) const;
  bool in_interior(const DyadicPoint& p) const;
  bool in_goal_ball(const DyadicPoint& p) const;
  bool in_goal(const DyadicPoint& p) const { return in_goal_ball(p) && in_interior(p); }

  DyadicPoint moved(const DyadicPoint& p, ScaledAction u) const;

 private:
  struct DiscLevel {
    BigInt dx;  // (anchor - centre) * D * 2^e
    BigInt dy;
    BigInt r2;  // (radius * D)^2 * 4^e
  };
  struct Level {
    BigInt ax;  // anchor * D * 2^e
    BigInt ay;
    BigInt w;   // W * D * 2^e
    BigInt h;
    std::vector<DiscLevel> discs;
    DiscLevel goal;
  };

  const Level& level(unsigned e) const;
  bool rect_test(const Level& lv, bool strict) const;
  int disc_side(const DiscLevel& d) const;  // sign of |p - c|^2 - r^2 for the scaled point in sx_, sy_
  void scale_point(const DyadicPoint& p) const;

  const ContinuousEnv* env_;
  RationalPoint anchor_;
  Rational unit_;
  BigInt denom_;
  BigInt unit_scaled_;
  BigInt ax_, ay_, w_, h_;
  std::vector<std::pair<BigInt, BigInt>> disc_delta_;
  std::vector<BigInt> disc_radius_;
  std::pair<BigInt, BigInt> goal_delta_;
  BigInt goal_radius_;
  mutable std::vector<Level> levels_;
  mutable BigInt sx_, sy_, t0_, t1_;
};

/// p + u when the end point lies in the closed free space, otherwise p.
/// Throws InvalidState when p itself is not in the free space.
DyadicPoint step_continuous(const ExactFrame& frame, const DyadicPoint& p, ScaledAction u);

/// beta_n = max{k : k(k+1)/2 <= n}, phi(n) = n - beta_n(beta_n+1)/2.
std::pair<std::uint64_t, std::uint64_t> beta_phi(std::uint64_t n);

/// Segment lengths L_w(1) = 1, L_w(n) = ceil(w * (L_w(1) + ... + L_w(n-1))).
/// Memoized; concurrent readers, single writer when the table grows.
class Schedule {
 public:
  explicit Schedule(Rational weight);

  const Rational& weight() const { return weight_; }

  BigInt segment_length(std::uint64_t n) const;
  /// L_w(1) + ... + L_w(k); zero for k = 0.
  BigInt cumulative(std::uint64_t k) const;

  /// max{k : cumulative(k) <= n}.
  std::uint64_t eta(std::uint64_t n) const;

  /// The segment k holding stage n: cumulative(k-1) < n <= cumulative(k).
  std::uint64_t segment_of(std::uint64_t n) const;

  /// phi(segment_of(n)): stage n moves by 2^-step_exponent(n).
  unsigned step_exponent(std::uint64_t n) const;

 private:
  void extend_to_cover(std::uint64_t n) const;
  void extend_segments(std::uint64_t k) const;

  Rational weight_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<BigInt> lengths_;     // lengths_[k-1] = L_w(k)
  mutable std::vector<BigInt> cumulative_;  // cumulative_[k] = sum of the first k lengths
};

/// 2^-phi(segment_of(n)) * c(alpha_n).
ScaledAction gamma(const Schedule& schedule, const DigitStream& stream, const ActionMap& map, std::uint64_t n);

struct ContinuousStep {
  Action direction = Action::kLeft;
  unsigned exponent = 0;
  bool blocked = false;
};

struct ContinuousTrace {
  RationalPoint start;
  Rational unit{1};
  std::vector<ContinuousStep> steps;  // empty in summary mode
  std::vector<DyadicPoint> points;    // points[0] is the start; empty in summary mode
  DyadicPoint final_point;
  std::uint64_t steps_taken = 0;
  Outcome outcome = Outcome::kBudgetExhausted;
  std::size_t distinct_points = 0;  // counted in summary mode only
};

enum class TraceDetail { kFull, kSummary };

/// Scale-free plan from `start`: stage s = 1, 2, ... moves by
/// 2^-phi(segment_of(s)) in direction c(alpha_{offset + s - 1}). Stops on
/// entering the open goal ball (inside int X) or after max_steps stages.
ContinuousTrace execute_scalefree(const ContinuousEnv& env, const RationalPoint& start, const DigitStream& stream,
                                  const ActionMap& map, const Rational& weight, std::uint64_t offset,
                                  std::uint64_t max_steps, TraceDetail detail = TraceDetail::kFull);

/// Step-doubling variant. Step size starts at W/2; each iteration reads a
/// direction digit and a size digit, moves, then doubles the size (digits
/// 0, 1, 2; never above W/2) or halves it (digit 3).
ContinuousTrace execute_adaptive(const ContinuousEnv& env, const RationalPoint& start, const DigitStream& stream,
                                 const ActionMap& map, std::uint64_t offset, std::uint64_t max_steps,
                                 TraceDetail detail = TraceDetail::kFull);

/// Replays steps from trace.start and checks every recorded point exactly.
bool replay_matches(const ContinuousEnv& env, const ContinuousTrace& trace);

/// One line per step: "x y DIR exponent blocked" with exact rational
/// coordinates of the point before the step, then "x y END outcome".
void write_trace(std::ostream& os, const ContinuousEnv& env, const ContinuousTrace& trace);

/// int X intersected with anchor + 2^-m Z^2, stored in lattice coordinates
/// (i, j) relative to the anchor.
struct LatticeGrid {
  RationalPoint anchor;
  unsigned m = 0;
  std::int64_t i_min = 0;
  std::int64_t j_min = 0;
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::vector<std::uint8_t> mask;  // (j - j_min) * nx + (i - i_min)
  std::vector<std::pair<std::int64_t, std::int64_t>> nodes;  // sorted
  /// Lattice points inside the open goal ball (not clipped to int X).
  std::vector<std::pair<std::int64_t, std::int64_t>> goals;  // sorted

  bool contains(std::int64_t i, std::int64_t j) const;
};

inline constexpr std::size_t kDefaultLatticeLimit = std::size_t{1} << 22;

/// Throws InvalidState when the anchor is not interior and ResourceLimit when
/// the bounding box holds more than max_nodes lattice points.
LatticeGrid grid_at_resolution(const ContinuousEnv& env, const RationalPoint& anchor, unsigned m,
                               std::size_t max_nodes = kDefaultLatticeLimit);

/// Single 4-connected component (vacuously true for at most one node).
bool is_connected(const LatticeGrid& grid);
bool is_connected_at(const ContinuousEnv& env, const RationalPoint& anchor, unsigned m);

/// Smallest m >= 0 with 2^-m <= min(clearance, r) / 4, where clearance is the
/// minimum of the smallest disc radius, the smallest gap between two disc
/// boundaries, the smallest disc-to-wall gap, W and H. Evaluated exactly.
/// Throws DegenerateEnvironment when some gap is not positive.
unsigned estimate_sufficient_scaling(const ContinuousEnv& env, const Rational& goal_radius);

/// Number of distinct grids, up to translation, among the sampled anchors.
std::size_t enumerate_grid_classes(const ContinuousEnv& env, unsigned m, const std::vector<RationalPoint>& anchors);

/// Some translation maps A's nodes onto B's and A's goal points onto B's.
bool goal_equivalent(const LatticeGrid& a, const LatticeGrid& b);
/// As goal_equivalent with the translation fixed to the anchor difference.
bool grid_search_equivalent(const LatticeGrid& a, const LatticeGrid& b);

/// Random disc worlds on a 1/lattice coordinate grid, all gaps at least
/// min_clearance, goal in the lower right quadrant, starts anywhere at least
/// min(W, H)/2 from the goal centre.
struct DiscWorldSpec {
  int width = 4;
  int height = 4;
  unsigned discs = 5;
  Rational min_radius{1, 2};
  Rational max_radius{3, 4};
  Rational min_clearance{1, 2};
  Rational goal_radius{1, 2};
  unsigned starts = 4;
  unsigned lattice = 8;
};

ContinuousEnv random_disc_world(const DiscWorldSpec& spec, std::uint64_t seed);

}  // namespace uplan
