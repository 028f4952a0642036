#include "uplan/scalefree.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "uplan/errors.hpp"

namespace uplan {
namespace {

BigInt lcm(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// q * d for a denominator multiple d.
BigInt scaled(const Rational& q, const BigInt& d) { return q.get_num() * (d / q.get_den()); }

BigInt shifted(const BigInt& v, unsigned bits) {
  BigInt r;
  mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), bits);
  return r;
}

Rational squared_distance(const RationalPoint& a, const Rational& bx, const Rational& by) {
  const Rational dx = a.x - bx;
  const Rational dy = a.y - by;
  return dx * dx + dy * dy;
}

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

std::uint64_t clamp_u64(const BigInt& v) {
  if (mpz_sizeinbase(v.get_mpz_t(), 2) > 63) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(mpz_get_ui(v.get_mpz_t()));
}

void move_into(const DyadicPoint& p, ScaledAction u, DyadicPoint& out) {
  out.x = p.x;
  out.y = p.y;
  out.exponent = p.exponent;
  if (u.exponent > out.exponent) {
    const unsigned diff = u.exponent - out.exponent;
    mpz_mul_2exp(out.x.get_mpz_t(), out.x.get_mpz_t(), diff);
    mpz_mul_2exp(out.y.get_mpz_t(), out.y.get_mpz_t(), diff);
    out.exponent = u.exponent;
  }
  const unsigned shift = out.exponent - u.exponent;
  BigInt& axis = (u.direction == Action::kLeft || u.direction == Action::kRight) ? out.x : out.y;
  const bool negative = u.direction == Action::kLeft || u.direction == Action::kDown;
  if (shift == 0) {
    if (negative) axis -= 1;
    else axis += 1;
  } else {
    BigInt delta;
    mpz_setbit(delta.get_mpz_t(), shift);
    if (negative) axis -= delta;
    else axis += delta;
  }
}

// Counts distinct positions; keys are reduced to the smallest exponent.
class DistinctPoints {
 public:
  void add(const DyadicPoint& p) {
    unsigned e = p.exponent;
    unsigned tz = e;
    if (mpz_sgn(p.x.get_mpz_t()) != 0) tz = std::min<unsigned>(tz, mpz_scan1(p.x.get_mpz_t(), 0));
    if (mpz_sgn(p.y.get_mpz_t()) != 0) tz = std::min<unsigned>(tz, mpz_scan1(p.y.get_mpz_t(), 0));
    mpz_fdiv_q_2exp(x_.get_mpz_t(), p.x.get_mpz_t(), tz);
    mpz_fdiv_q_2exp(y_.get_mpz_t(), p.y.get_mpz_t(), tz);
    e -= tz;
    if (mpz_fits_slong_p(x_.get_mpz_t()) && mpz_fits_slong_p(y_.get_mpz_t())) {
      small_.insert(Key{mpz_get_si(x_.get_mpz_t()), mpz_get_si(y_.get_mpz_t()), e});
    } else {
      large_.insert(x_.get_str(16) + ":" + y_.get_str(16) + ":" + std::to_string(e));
    }
  }

  std::size_t size() const { return small_.size() + large_.size(); }

 private:
  struct Key {
    long x;
    long y;
    unsigned e;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
      h ^= static_cast<std::uint64_t>(k.y) + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
      h ^= static_cast<std::uint64_t>(k.e) * 0xBF58476D1CE4E5B9ull;
      return static_cast<std::size_t>(h);
    }
  };
  BigInt x_, y_;
  std::unordered_set<Key, KeyHash> small_;
  std::set<std::string> large_;
};

unsigned fine_oracle_level(const Rational& width, const Rational& height) {
  const Rational extent = std::min(width, height);
  unsigned m = 0;
  while (Rational(64) * pow2(-static_cast<long>(m)) > extent) ++m;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContinuousEnv

ContinuousEnv::ContinuousEnv(Rational width, Rational height, std::vector<Disc> obstacles, RationalPoint goal_center,
                             Rational goal_radius, std::vector<RationalPoint> starts)
    : width_(std::move(width)),
      height_(std::move(height)),
      obstacles_(std::move(obstacles)),
      goal_center_(std::move(goal_center)),
      goal_radius_(std::move(goal_radius)),
      starts_(std::move(starts)) {
  if (width_ <= 0 || height_ <= 0) throw InvalidArgument("rectangle extents must be positive");
  for (const Disc& d : obstacles_) {
    if (d.radius <= 0) throw InvalidArgument("disc radius must be positive");
    if (d.cx - d.radius < 0 || d.cx + d.radius > width_ || d.cy - d.radius < 0 || d.cy + d.radius > height_) {
      throw InvalidArgument("disc at (" + to_string(d.cx) + "," + to_string(d.cy) + ") leaves the rectangle");
    }
  }
  if (goal_radius_ <= 0) throw InvalidArgument("goal radius must be positive");
  if (!in_interior(goal_center_)) throw InvalidArgument("goal centre must lie in the open free space");
  for (const auto& s : starts_) {
    if (!in_interior(s)) {
      throw InvalidArgument("start (" + to_string(s.x) + "," + to_string(s.y) + ") is not in the open free space");
    }
  }

  unsigned m = fine_oracle_level(width_, height_);
  try {
    const unsigned est = estimate_sufficient_scaling(*this, goal_radius_);
    const Rational box = width_ * height_ * pow2(2 * static_cast<long>(est));
    if (est > m && box <= Rational(1 << 20)) m = est;
  } catch (const DegenerateEnvironment&) {
    // Touching obstacles are allowed; the fine lattice alone decides.
  }
  if (!is_connected(grid_at_resolution(*this, goal_center_, m))) {
    throw ParseError(ParseError::Kind::kDisconnected, "continuous free space is not connected");
  }
}

bool ContinuousEnv::in_free_space(const RationalPoint& p) const {
  if (p.x < 0 || p.x > width_ || p.y < 0 || p.y > height_) return false;
  return std::all_of(obstacles_.begin(), obstacles_.end(), [&](const Disc& d) {
    return squared_distance(p, d.cx, d.cy) >= d.radius * d.radius;
  });
}

bool ContinuousEnv::in_interior(const RationalPoint& p) const {
  if (p.x <= 0 || p.x >= width_ || p.y <= 0 || p.y >= height_) return false;
  return std::all_of(obstacles_.begin(), obstacles_.end(), [&](const Disc& d) {
    return squared_distance(p, d.cx, d.cy) > d.radius * d.radius;
  });
}

bool ContinuousEnv::in_goal(const RationalPoint& p) const {
  return squared_distance(p, goal_center_.x, goal_center_.y) < goal_radius_ * goal_radius_ && in_interior(p);
}

std::string ContinuousEnv::to_text() const {
  std::ostringstream os;
  os << "rect " << to_string(width_) << ' ' << to_string(height_) << '\n';
  for (const Disc& d : obstacles_) {
    os << "disc " << to_string(d.cx) << ' ' << to_string(d.cy) << ' ' << to_string(d.radius) << '\n';
  }
  os << "goal " << to_string(goal_center_.x) << ' ' << to_string(goal_center_.y) << ' ' << to_string(goal_radius_)
     << '\n';
  for (const auto& s : starts_) os << "start " << to_string(s.x) << ' ' << to_string(s.y) << '\n';
  return os.str();
}

ContinuousEnv parse_continuous_env(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  std::optional<std::pair<Rational, Rational>> rect;
  std::vector<Disc> discs;
  std::optional<std::pair<RationalPoint, Rational>> goal;
  std::vector<RationalPoint> starts;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    std::vector<std::string> values;
    for (std::string v; fields >> v;) values.push_back(v);
    auto expect = [&](std::size_t n) {
      if (values.size() != n) {
        throw ParseError(ParseError::Kind::kBadValue, "line " + std::to_string(line_no) + ": '" + key + "' takes " +
                                                          std::to_string(n) + " values");
      }
    };
    if (key == "rect") {
      expect(2);
      rect = {parse_rational(values[0]), parse_rational(values[1])};
    } else if (key == "disc") {
      expect(3);
      discs.push_back({parse_rational(values[0]), parse_rational(values[1]), parse_rational(values[2])});
    } else if (key == "goal") {
      expect(3);
      goal = {RationalPoint{parse_rational(values[0]), parse_rational(values[1])}, parse_rational(values[2])};
    } else if (key == "start") {
      expect(2);
      starts.push_back({parse_rational(values[0]), parse_rational(values[1])});
    } else {
      throw ParseError(ParseError::Kind::kUnknownKey, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!rect) throw ParseError(ParseError::Kind::kMissingKey, "missing 'rect' line");
  if (!goal) throw ParseError(ParseError::Kind::kMissingKey, "missing 'goal' line");
  return ContinuousEnv(rect->first, rect->second, std::move(discs), goal->first, goal->second, std::move(starts));
}

ContinuousEnv load_continuous_env(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open environment file: " + path);
  std::ostringstream text;
  text << is.rdbuf();
  return parse_continuous_env(text.str());
}

// ---------------------------------------------------------------------------
// Exact arithmetic

bool same_position(const DyadicPoint& a, const DyadicPoint& b) {
  const unsigned e = std::max(a.exponent, b.exponent);
  return shifted(a.x, e - a.exponent) == shifted(b.x, e - b.exponent) &&
         shifted(a.y, e - a.exponent) == shifted(b.y, e - b.exponent);
}

ExactFrame::ExactFrame(const ContinuousEnv& env, RationalPoint anchor, Rational unit)
    : env_(&env), anchor_(std::move(anchor)), unit_(std::move(unit)) {
  if (unit_ <= 0) throw InvalidArgument("frame unit must be positive");
  denom_ = 1;
  auto absorb = [&](const Rational& q) { denom_ = lcm(denom_, q.get_den()); };
  absorb(anchor_.x);
  absorb(anchor_.y);
  absorb(unit_);
  absorb(env.width());
  absorb(env.height());
  for (const Disc& d : env.obstacles()) {
    absorb(d.cx);
    absorb(d.cy);
    absorb(d.radius);
  }
  absorb(env.goal_center().x);
  absorb(env.goal_center().y);
  absorb(env.goal_radius());

  unit_scaled_ = scaled(unit_, denom_);
  ax_ = scaled(anchor_.x, denom_);
  ay_ = scaled(anchor_.y, denom_);
  w_ = scaled(env.width(), denom_);
  h_ = scaled(env.height(), denom_);
  for (const Disc& d : env.obstacles()) {
    disc_delta_.emplace_back(scaled(anchor_.x - d.cx, denom_), scaled(anchor_.y - d.cy, denom_));
    disc_radius_.push_back(scaled(d.radius, denom_));
  }
  goal_delta_ = {scaled(anchor_.x - env.goal_center().x, denom_), scaled(anchor_.y - env.goal_center().y, denom_)};
  goal_radius_ = scaled(env.goal_radius(), denom_);
}

const ExactFrame::Level& ExactFrame::level(unsigned e) const {
  while (levels_.size() <= e) {
    const auto k = static_cast<unsigned>(levels_.size());
    Level lv;
    lv.ax = shifted(ax_, k);
    lv.ay = shifted(ay_, k);
    lv.w = shifted(w_, k);
    lv.h = shifted(h_, k);
    auto make = [&](const std::pair<BigInt, BigInt>& delta, const BigInt& radius) {
      return DiscLevel{shifted(delta.first, k), shifted(delta.second, k), shifted(radius * radius, 2 * k)};
    };
    for (std::size_t i = 0; i < disc_delta_.size(); ++i) lv.discs.push_back(make(disc_delta_[i], disc_radius_[i]));
    lv.goal = make(goal_delta_, goal_radius_);
    levels_.push_back(std::move(lv));
  }
  return levels_[e];
}

void ExactFrame::scale_point(const DyadicPoint& p) const {
  mpz_mul(sx_.get_mpz_t(), p.x.get_mpz_t(), unit_scaled_.get_mpz_t());
  mpz_mul(sy_.get_mpz_t(), p.y.get_mpz_t(), unit_scaled_.get_mpz_t());
}

bool ExactFrame::rect_test(const Level& lv, bool strict) const {
  mpz_add(t0_.get_mpz_t(), lv.ax.get_mpz_t(), sx_.get_mpz_t());
  mpz_add(t1_.get_mpz_t(), lv.ay.get_mpz_t(), sy_.get_mpz_t());
  const int x_lo = mpz_sgn(t0_.get_mpz_t());
  const int x_hi = mpz_cmp(t0_.get_mpz_t(), lv.w.get_mpz_t());
  const int y_lo = mpz_sgn(t1_.get_mpz_t());
  const int y_hi = mpz_cmp(t1_.get_mpz_t(), lv.h.get_mpz_t());
  if (strict) return x_lo > 0 && x_hi < 0 && y_lo > 0 && y_hi < 0;
  return x_lo >= 0 && x_hi <= 0 && y_lo >= 0 && y_hi <= 0;
}

int ExactFrame::disc_side(const DiscLevel& d) const {
  mpz_add(t0_.get_mpz_t(), d.dx.get_mpz_t(), sx_.get_mpz_t());
  mpz_add(t1_.get_mpz_t(), d.dy.get_mpz_t(), sy_.get_mpz_t());
  mpz_mul(t0_.get_mpz_t(), t0_.get_mpz_t(), t0_.get_mpz_t());
  mpz_addmul(t0_.get_mpz_t(), t1_.get_mpz_t(), t1_.get_mpz_t());
  return mpz_cmp(t0_.get_mpz_t(), d.r2.get_mpz_t());
}

bool ExactFrame::in_free_space(const DyadicPoint& p) const {
  const Level& lv = level(p.exponent);
  scale_point(p);
  if (!rect_test(lv, false)) return false;
  for (const auto& d : lv.discs) {
    if (disc_side(d) < 0) return false;
  }
  return true;
}

bool ExactFrame::in_interior(const DyadicPoint& p) const {
  const Level& lv = level(p.exponent);
  scale_point(p);
  if (!rect_test(lv, true)) return false;
  for (const auto& d : lv.discs) {
    if (disc_side(d) <= 0) return false;
  }
  return true;
}

bool ExactFrame::in_goal_ball(const DyadicPoint& p) const {
  const Level& lv = level(p.exponent);
  scale_point(p);
  return disc_side(lv.goal) < 0;
}

RationalPoint ExactFrame::to_point(const DyadicPoint& p) const {
  const Rational scale = unit_ * pow2(-static_cast<long>(p.exponent));
  return {anchor_.x + Rational(p.x) * scale, anchor_.y + Rational(p.y) * scale};
}

DyadicPoint ExactFrame::moved(const DyadicPoint& p, ScaledAction u) const {
  DyadicPoint out;
  move_into(p, u, out);
  return out;
}

DyadicPoint step_continuous(const ExactFrame& frame, const DyadicPoint& p, ScaledAction u) {
  if (!frame.in_free_space(p)) throw InvalidState("point is not in the free space");
  DyadicPoint q = frame.moved(p, u);
  return frame.in_free_space(q) ? q : p;
}

// ---------------------------------------------------------------------------
// Schedule

std::pair<std::uint64_t, std::uint64_t> beta_phi(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("beta_phi is defined for n >= 1");
  __extension__ typedef unsigned __int128 u128;
  // Largest b with b(b+1)/2 <= n, by binary search on exact 128-bit values.
  std::uint64_t lo = 1;
  std::uint64_t hi = std::uint64_t{1} << 33;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (static_cast<u128>(mid) * (mid + 1) / 2 <= n) lo = mid;
    else hi = mid - 1;
  }
  const std::uint64_t tri = static_cast<std::uint64_t>(static_cast<u128>(lo) * (lo + 1) / 2);
  return {lo, n - tri};
}

Schedule::Schedule(Rational weight) : weight_(std::move(weight)) {
  if (weight_ <= 0) throw InvalidArgument("schedule weight must be positive");
  lengths_.emplace_back(1);
  cumulative_.emplace_back(0);
  cumulative_.emplace_back(1);
}

void Schedule::extend_segments(std::uint64_t k) const {
  {
    std::shared_lock lock(mutex_);
    if (lengths_.size() >= k) return;
  }
  std::unique_lock lock(mutex_);
  while (lengths_.size() < k) {
    BigInt next = ceil_of(weight_ * Rational(cumulative_.back()));
    cumulative_.push_back(cumulative_.back() + next);
    lengths_.push_back(std::move(next));
  }
}

void Schedule::extend_to_cover(std::uint64_t n) const {
  {
    std::shared_lock lock(mutex_);
    if (cumulative_.back() > n) return;
  }
  std::unique_lock lock(mutex_);
  while (!(cumulative_.back() > n)) {
    BigInt next = ceil_of(weight_ * Rational(cumulative_.back()));
    cumulative_.push_back(cumulative_.back() + next);
    lengths_.push_back(std::move(next));
  }
}

BigInt Schedule::segment_length(std::uint64_t n) const {
  if (n == 0) throw InvalidArgument("segments are numbered from 1");
  extend_segments(n);
  std::shared_lock lock(mutex_);
  return lengths_[n - 1];
}

BigInt Schedule::cumulative(std::uint64_t k) const {
  extend_segments(k);
  std::shared_lock lock(mutex_);
  return cumulative_[k];
}

std::uint64_t Schedule::eta(std::uint64_t n) const {
  if (n == 0) throw InvalidArgument("stages are numbered from 1");
  extend_to_cover(n);
  std::shared_lock lock(mutex_);
  const BigInt bound(static_cast<unsigned long>(n));
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), bound);
  return static_cast<std::uint64_t>(it - cumulative_.begin()) - 1;
}

std::uint64_t Schedule::segment_of(std::uint64_t n) const {
  if (n == 0) throw InvalidArgument("stages are numbered from 1");
  extend_to_cover(n);
  std::shared_lock lock(mutex_);
  const BigInt bound(static_cast<unsigned long>(n));
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), bound);
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

unsigned Schedule::step_exponent(std::uint64_t n) const {
  return static_cast<unsigned>(beta_phi(segment_of(n)).second);
}

ScaledAction gamma(const Schedule& schedule, const DigitStream& stream, const ActionMap& map, std::uint64_t n) {
  return {map(stream.digit(n)), schedule.step_exponent(n)};
}

// ---------------------------------------------------------------------------
// Execution

namespace {

struct Recorder {
  ContinuousTrace& trace;
  TraceDetail detail;
  DistinctPoints distinct;

  void start(const DyadicPoint& p) {
    if (detail == TraceDetail::kFull) trace.points.push_back(p);
    else distinct.add(p);
  }

  void step(Action dir, unsigned exponent, bool blocked, const DyadicPoint& p) {
    if (detail == TraceDetail::kFull) {
      trace.steps.push_back({dir, exponent, blocked});
      trace.points.push_back(p);
    } else if (!blocked) {
      distinct.add(p);
    }
  }

  void finish(const DyadicPoint& p, std::uint64_t steps, Outcome outcome) {
    trace.final_point = p;
    trace.steps_taken = steps;
    trace.outcome = outcome;
    if (detail == TraceDetail::kSummary) trace.distinct_points = distinct.size();
  }
};

template <typename NextAction>
ContinuousTrace run_continuous(const ContinuousEnv& env, const RationalPoint& start, const Rational& unit,
                               std::uint64_t max_steps, TraceDetail detail, NextAction&& next_action) {
  ContinuousTrace trace;
  trace.start = start;
  trace.unit = unit;
  ExactFrame frame(env, start, unit);
  DyadicPoint p;
  if (!frame.in_interior(p)) throw InvalidState("start point must lie in the open free space");
  Recorder rec{trace, detail, {}};
  rec.start(p);
  if (frame.in_goal(p)) {
    rec.finish(p, 0, Outcome::kGoalReached);
    return trace;
  }
  DyadicPoint candidate;
  for (std::uint64_t s = 1; s <= max_steps; ++s) {
    const ScaledAction u = next_action();
    move_into(p, u, candidate);
    const bool blocked = !frame.in_free_space(candidate);
    if (!blocked) std::swap(p, candidate);
    rec.step(u.direction, u.exponent, blocked, p);
    if (!blocked && frame.in_goal(p)) {
      rec.finish(p, s, Outcome::kGoalReached);
      return trace;
    }
  }
  rec.finish(p, max_steps, Outcome::kBudgetExhausted);
  return trace;
}

}  // namespace

ContinuousTrace execute_scalefree(const ContinuousEnv& env, const RationalPoint& start, const DigitStream& stream,
                                  const ActionMap& map, const Rational& weight, std::uint64_t offset,
                                  std::uint64_t max_steps, TraceDetail detail) {
  const Schedule schedule(weight);
  const auto lut = action_lut(map, stream.base());
  DigitCursor cursor(stream, offset);
  std::uint64_t segment = 1;
  std::uint64_t remaining = 1;  // L_w(1)
  unsigned exponent = 0;        // phi(1)
  return run_continuous(env, start, Rational(1), max_steps, detail, [&] {
    if (remaining == 0) {
      ++segment;
      remaining = clamp_u64(schedule.segment_length(segment));
      exponent = static_cast<unsigned>(beta_phi(segment).second);
    }
    --remaining;
    return ScaledAction{lookup(lut, cursor.next()), exponent};
  });
}

ContinuousTrace execute_adaptive(const ContinuousEnv& env, const RationalPoint& start, const DigitStream& stream,
                                 const ActionMap& map, std::uint64_t offset, std::uint64_t max_steps,
                                 TraceDetail detail) {
  if (stream.base() != 4) throw InvalidArgument("the step-doubling plan reads base-4 digits");
  const auto lut = action_lut(map, stream.base());
  DigitCursor cursor(stream, offset);
  unsigned exponent = 0;  // size = (W/2) * 2^-exponent
  bool first = true;
  std::uint8_t size_digit = 0;
  return run_continuous(env, start, env.width() / 2, max_steps, detail, [&] {
    if (!first) {
      if (size_digit == 3) ++exponent;
      else if (exponent > 0) --exponent;
    }
    first = false;
    const Action dir = lookup(lut, cursor.next());
    size_digit = cursor.next();
    return ScaledAction{dir, exponent};
  });
}

bool replay_matches(const ContinuousEnv& env, const ContinuousTrace& trace) {
  if (trace.steps.size() != trace.steps_taken) return false;
  if (trace.points.size() != trace.steps.size() + 1) return false;
  const ExactFrame frame(env, trace.start, trace.unit);
  DyadicPoint p;
  auto identical = [](const DyadicPoint& a, const DyadicPoint& b) {
    return a.exponent == b.exponent && a.x == b.x && a.y == b.y;
  };
  if (!identical(p, trace.points.front())) return false;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    DyadicPoint q = frame.moved(p, {s.direction, s.exponent});
    const bool blocked = !frame.in_free_space(q);
    if (blocked != s.blocked) return false;
    if (!blocked) p = std::move(q);
    if (!identical(p, trace.points[i + 1])) return false;
  }
  return identical(p, trace.final_point);
}

void write_trace(std::ostream& os, const ContinuousEnv& env, const ContinuousTrace& trace) {
  const ExactFrame frame(env, trace.start, trace.unit);
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const RationalPoint q = frame.to_point(trace.points[i]);
    os << to_string(q.x) << ' ' << to_string(q.y) << ' ' << action_letter(trace.steps[i].direction) << ' '
       << trace.steps[i].exponent << ' ' << (trace.steps[i].blocked ? 1 : 0) << '\n';
  }
  const RationalPoint last = frame.to_point(trace.final_point);
  os << to_string(last.x) << ' ' << to_string(last.y) << " END " << to_string(trace.outcome) << '\n';
}

// ---------------------------------------------------------------------------
// Lattice discretizations

bool LatticeGrid::contains(std::int64_t i, std::int64_t j) const {
  if (i < i_min || j < j_min || i >= i_min + nx || j >= j_min + ny) return false;
  return mask[static_cast<std::size_t>((j - j_min) * nx + (i - i_min))] != 0;
}

LatticeGrid grid_at_resolution(const ContinuousEnv& env, const RationalPoint& anchor, unsigned m,
                               std::size_t max_nodes) {
  const ExactFrame frame(env, anchor, Rational(1));
  if (!frame.in_interior(DyadicPoint{})) throw InvalidState("lattice anchor must lie in the open free space");
  const Rational scale = pow2(static_cast<long>(m));
  auto to_i64 = [](const BigInt& v) {
    if (!mpz_fits_slong_p(v.get_mpz_t())) throw ResourceLimit("lattice coordinates out of range");
    return static_cast<std::int64_t>(mpz_get_si(v.get_mpz_t()));
  };
  LatticeGrid grid;
  grid.anchor = anchor;
  grid.m = m;
  // Strict bounds 0 < anchor + i 2^-m < W.
  grid.i_min = to_i64(floor_of(-anchor.x * scale)) + 1;
  grid.j_min = to_i64(floor_of(-anchor.y * scale)) + 1;
  const std::int64_t i_max = to_i64(ceil_of((env.width() - anchor.x) * scale)) - 1;
  const std::int64_t j_max = to_i64(ceil_of((env.height() - anchor.y) * scale)) - 1;
  grid.nx = i_max - grid.i_min + 1;
  grid.ny = j_max - grid.j_min + 1;
  if (static_cast<double>(grid.nx) * static_cast<double>(grid.ny) > static_cast<double>(max_nodes)) {
    throw ResourceLimit("lattice at resolution 2^-" + std::to_string(m) + " exceeds " + std::to_string(max_nodes) +
                        " points");
  }
  grid.mask.assign(static_cast<std::size_t>(grid.nx * grid.ny), 0);
  DyadicPoint p;
  p.exponent = m;
  for (std::int64_t i = grid.i_min; i <= i_max; ++i) {
    p.x = static_cast<long>(i);
    for (std::int64_t j = grid.j_min; j <= j_max; ++j) {
      p.y = static_cast<long>(j);
      if (frame.in_interior(p)) {
        grid.mask[static_cast<std::size_t>((j - grid.j_min) * grid.nx + (i - grid.i_min))] = 1;
        grid.nodes.emplace_back(i, j);
      }
    }
  }

  const Rational& r = env.goal_radius();
  const auto& g = env.goal_center();
  const std::int64_t gi_lo = to_i64(floor_of((g.x - r - anchor.x) * scale));
  const std::int64_t gi_hi = to_i64(ceil_of((g.x + r - anchor.x) * scale));
  const std::int64_t gj_lo = to_i64(floor_of((g.y - r - anchor.y) * scale));
  const std::int64_t gj_hi = to_i64(ceil_of((g.y + r - anchor.y) * scale));
  if (static_cast<double>(gi_hi - gi_lo + 1) * static_cast<double>(gj_hi - gj_lo + 1) >
      static_cast<double>(max_nodes)) {
    throw ResourceLimit("discretized goal set exceeds the lattice limit");
  }
  for (std::int64_t i = gi_lo; i <= gi_hi; ++i) {
    p.x = static_cast<long>(i);
    for (std::int64_t j = gj_lo; j <= gj_hi; ++j) {
      p.y = static_cast<long>(j);
      if (frame.in_goal_ball(p)) grid.goals.emplace_back(i, j);
    }
  }
  return grid;
}

bool is_connected(const LatticeGrid& grid) {
  if (grid.nodes.size() <= 1) return true;
  std::vector<std::uint8_t> seen(grid.mask.size(), 0);
  auto slot = [&](std::int64_t i, std::int64_t j) {
    return static_cast<std::size_t>((j - grid.j_min) * grid.nx + (i - grid.i_min));
  };
  std::deque<std::pair<std::int64_t, std::int64_t>> queue{grid.nodes.front()};
  seen[slot(grid.nodes.front().first, grid.nodes.front().second)] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    ++reached;
    for (Action a : kAllActions) {
      const Vec2i d = unit_vector(a);
      const std::int64_t ni = i + d.x;
      const std::int64_t nj = j + d.y;
      if (!grid.contains(ni, nj) || seen[slot(ni, nj)]) continue;
      seen[slot(ni, nj)] = 1;
      queue.emplace_back(ni, nj);
    }
  }
  return reached == grid.nodes.size();
}

bool is_connected_at(const ContinuousEnv& env, const RationalPoint& anchor, unsigned m) {
  return is_connected(grid_at_resolution(env, anchor, m));
}

unsigned estimate_sufficient_scaling(const ContinuousEnv& env, const Rational& goal_radius) {
  if (goal_radius <= 0) throw InvalidArgument("goal radius must be positive");
  std::vector<Rational> limits{goal_radius, env.width(), env.height()};
  const auto& discs = env.obstacles();
  for (const Disc& d : discs) {
    limits.push_back(d.radius);
    limits.push_back(d.cx - d.radius);
    limits.push_back(env.width() - d.cx - d.radius);
    limits.push_back(d.cy - d.radius);
    limits.push_back(env.height() - d.cy - d.radius);
  }
  for (const Rational& v : limits) {
    if (v <= 0) throw DegenerateEnvironment("an obstacle touches the boundary or clearance is not positive");
  }
  struct PairGap {
    Rational radii;     // r_i + r_j
    Rational distance2; // |c_i - c_j|^2
  };
  std::vector<PairGap> pairs;
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      PairGap gap{discs[i].radius + discs[j].radius, squared_distance({discs[i].cx, discs[i].cy}, discs[j].cx, discs[j].cy)};
      if (gap.distance2 <= gap.radii * gap.radii) throw DegenerateEnvironment("discs touch or overlap");
      pairs.push_back(std::move(gap));
    }
  }
  const Rational smallest = *std::min_element(limits.begin(), limits.end());
  unsigned m = 0;
  Rational s(4);  // 4 * 2^-m
  auto fits = [&] {
    if (s > smallest) return false;
    return std::all_of(pairs.begin(), pairs.end(), [&](const PairGap& g) {
      const Rational reach = s + g.radii;
      return reach * reach <= g.distance2;
    });
  };
  while (!fits()) {
    ++m;
    s /= 2;
  }
  return m;
}

std::size_t enumerate_grid_classes(const ContinuousEnv& env, unsigned m, const std::vector<RationalPoint>& anchors) {
  std::set<std::vector<std::pair<std::int64_t, std::int64_t>>> classes;
  for (const auto& anchor : anchors) {
    auto nodes = grid_at_resolution(env, anchor, m).nodes;
    const auto origin = nodes.front();
    for (auto& n : nodes) n = {n.first - origin.first, n.second - origin.second};
    classes.insert(std::move(nodes));
  }
  return classes.size();
}

namespace {

bool translated_equal(const std::vector<std::pair<std::int64_t, std::int64_t>>& a,
                      const std::vector<std::pair<std::int64_t, std::int64_t>>& b, std::int64_t di,
                      std::int64_t dj) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].first + di != b[k].first || a[k].second + dj != b[k].second) return false;
  }
  return true;
}

}  // namespace

bool goal_equivalent(const LatticeGrid& a, const LatticeGrid& b) {
  if (a.m != b.m) throw InvalidArgument("grids must share a resolution");
  if (a.nodes.size() != b.nodes.size()) return false;
  if (a.nodes.empty()) return a.goals.size() == b.goals.size() && (a.goals.empty() ||
         translated_equal(a.goals, b.goals, b.goals.front().first - a.goals.front().first,
                          b.goals.front().second - a.goals.front().second));
  // A translation of finite lattice sets is fixed by where the smallest node goes.
  const std::int64_t di = b.nodes.front().first - a.nodes.front().first;
  const std::int64_t dj = b.nodes.front().second - a.nodes.front().second;
  return translated_equal(a.nodes, b.nodes, di, dj) && translated_equal(a.goals, b.goals, di, dj);
}

bool grid_search_equivalent(const LatticeGrid& a, const LatticeGrid& b) {
  if (a.m != b.m) throw InvalidArgument("grids must share a resolution");
  return translated_equal(a.nodes, b.nodes, 0, 0) && translated_equal(a.goals, b.goals, 0, 0);
}

// ---------------------------------------------------------------------------
// Random disc worlds

ContinuousEnv random_disc_world(const DiscWorldSpec& spec, std::uint64_t seed) {
  if (spec.width <= 0 || spec.height <= 0 || spec.lattice == 0) throw InvalidArgument("bad disc world extents");
  const Rational step(1, spec.lattice);
  std::uint64_t counter = 0;
  // Uniform integer in [0, n) from the counter-based generator.
  auto draw = [&](std::uint64_t n) -> std::uint64_t {
    if (n <= 1) return 0;
    if (n <= 256) return pseudorandom_digit(seed, static_cast<unsigned>(n), ++counter);
    std::uint64_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | pseudorandom_digit(seed, 256, ++counter);
    return v % n;
  };
  const Rational W(spec.width);
  const Rational H(spec.height);
  const std::uint64_t nx = static_cast<std::uint64_t>(spec.width) * spec.lattice;
  const std::uint64_t ny = static_cast<std::uint64_t>(spec.height) * spec.lattice;
  auto lattice_point = [&](std::uint64_t x_lo, std::uint64_t x_hi, std::uint64_t y_lo, std::uint64_t y_hi) {
    return RationalPoint{Rational(static_cast<long>(x_lo + 1 + draw(x_hi - x_lo - 1))) * step,
                         Rational(static_cast<long>(y_lo + 1 + draw(y_hi - y_lo - 1))) * step};
  };

  const RationalPoint goal = lattice_point(nx / 2, nx, 0, ny / 2);
  const Rational far = std::min(W, H) / 2;
  std::vector<RationalPoint> starts;
  for (unsigned attempt = 0; starts.size() < spec.starts && attempt < 10000; ++attempt) {
    RationalPoint s = lattice_point(0, nx, 0, ny);
    if (squared_distance(s, goal.x, goal.y) < far * far) continue;
    if (std::find(starts.begin(), starts.end(), s) != starts.end()) continue;
    starts.push_back(std::move(s));
  }

  const std::uint64_t radius_steps =
      static_cast<std::uint64_t>(mpz_get_ui(floor_of((spec.max_radius - spec.min_radius) / step).get_mpz_t()));
  std::vector<Disc> discs;
  for (unsigned attempt = 0; discs.size() < spec.discs && attempt < 20000; ++attempt) {
    Disc d;
    d.radius = spec.min_radius + Rational(static_cast<long>(draw(radius_steps + 1))) * step;
    const RationalPoint c = lattice_point(0, nx, 0, ny);
    d.cx = c.x;
    d.cy = c.y;
    const Rational& gap = spec.min_clearance;
    if (d.cx - d.radius < gap || W - d.cx - d.radius < gap || d.cy - d.radius < gap || H - d.cy - d.radius < gap) {
      continue;
    }
    auto far_from = [&](const RationalPoint& p, const Rational& extra) {
      const Rational reach = d.radius + extra;
      return squared_distance(p, d.cx, d.cy) >= reach * reach;
    };
    if (!far_from(goal, gap)) continue;
    if (!std::all_of(starts.begin(), starts.end(), [&](const RationalPoint& s) { return far_from(s, gap); })) continue;
    const bool clear = std::all_of(discs.begin(), discs.end(), [&](const Disc& o) {
      const Rational reach = d.radius + o.radius + gap;
      return squared_distance({o.cx, o.cy}, d.cx, d.cy) >= reach * reach;
    });
    if (clear) discs.push_back(std::move(d));
  }
  return ContinuousEnv(W, H, std::move(discs), goal, spec.goal_radius, std::move(starts));
}

}  // namespace uplan
