#include "uplan/verify.hpp"

#include <chrono>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "uplan/automata.hpp"
#include "uplan/errors.hpp"
#include "uplan/harness.hpp"
#include "uplan/learner.hpp"
#include "uplan/pi_base4.hpp"

namespace uplan {
namespace {

class Tally {
 public:
  Tally(const CheckSink& sink, std::string name) : sink_(sink), name_(std::move(name)) {}

  void record(const std::string& instance, bool pass, const std::string& witness) {
    ++total_;
    if (!pass) ++failed_;
    if (sink_) sink_({name_, instance, pass, witness});
  }

  CheckResult result(const std::string& extra = {}) const {
    std::ostringstream os;
    os << (total_ - failed_) << '/' << total_ << " passed";
    if (!extra.empty()) os << ", " << extra;
    return {failed_ == 0 && total_ > 0, os.str()};
  }

 private:
  const CheckSink& sink_;
  std::string name_;
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
};

std::string digits_text(const DigitStream& s, std::uint64_t first, std::size_t count) {
  std::string out;
  for (std::uint64_t i = 0; i < count; ++i) out += static_cast<char>('0' + s.digit(first + i));
  return out;
}

std::string plan_text(const std::vector<Action>& plan) {
  std::string out;
  for (Action a : plan) out += action_letter(a);
  return out.empty() ? "-" : out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

}  // namespace

std::string to_json_line(const CheckRecord& record) {
  const nlohmann::json j = {
      {"name", record.name}, {"instance", record.instance}, {"pass", record.pass}, {"witness", record.witness}};
  return j.dump();
}

CheckResult check_digit_fidelity(const CheckSink& sink, std::size_t pi_digits) {
  Tally tally(sink, "digit-fidelity");
  // The published prefix covers the numerals 0..101 (34 digits); digits 35
  // and 36 open the numeral 102.
  const std::string champ = digits_text(DigitStream::champernowne(4), 1, 36);
  tally.record("champernowne-base4-1..36", champ == std::string("0123101112132021222330313233100101") + "10", champ);
  const std::string pi = digits_text(DigitStream::pi4(), 1, 17);
  tally.record("pi-base4-1..17", pi == "30210033312222020", pi);

  const auto t0 = std::chrono::steady_clock::now();
  const auto computed = compute_pi_base4(pi_digits);
  const double elapsed = seconds_since(t0);
  const DigitStream table = DigitStream::pi4();
  bool agree = computed.size() == pi_digits;
  for (std::size_t i = 0; agree && i < computed.size(); i += 997) agree = computed[i] == table.digit(i + 1);
  agree = agree && computed.back() == table.digit(pi_digits);
  tally.record("pi-base4-" + std::to_string(pi_digits), agree && elapsed < 60.0, fixed(elapsed) + "s");
  return tally.result("pi " + std::to_string(pi_digits) + " digits in " + fixed(elapsed) + "s");
}

CheckResult check_schedule(const CheckSink& sink, std::uint64_t segments) {
  Tally tally(sink, "schedule");
  const std::uint64_t beta[] = {1, 1, 2, 2, 2, 3, 3, 3, 3};
  const std::uint64_t phi[] = {0, 1, 0, 1, 2, 0, 1, 2, 3};
  for (std::uint64_t n = 1; n <= 9; ++n) {
    const auto [b, p] = beta_phi(n);
    tally.record("beta_phi(" + std::to_string(n) + ")", b == beta[n - 1] && p == phi[n - 1],
                 std::to_string(b) + "," + std::to_string(p));
  }
  for (const auto& [num, den] : {std::pair<long, long>{1, 1}, {1, 2}, {3, 2}}) {
    const Schedule schedule(Rational(num, den));
    BigInt sum = 0;
    bool ok = true;
    std::string mismatch;
    for (std::uint64_t n = 1; n <= segments; ++n) {
      BigInt expected = 1;
      if (n > 1) {
        const BigInt scaled_sum = sum * num;
        mpz_cdiv_q(expected.get_mpz_t(), scaled_sum.get_mpz_t(), BigInt(den).get_mpz_t());
      }
      sum += expected;
      if (schedule.segment_length(n) != expected || schedule.cumulative(n) != sum) {
        ok = false;
        mismatch = "n=" + std::to_string(n);
        break;
      }
    }
    tally.record("L_w w=" + std::to_string(num) + "/" + std::to_string(den), ok,
                 ok ? "L(" + std::to_string(segments) + ")=" + schedule.segment_length(segments).get_str() : mismatch);
  }
  return tally.result();
}

CheckResult check_discrete_universality(const std::vector<Named<GridEnv>>& grids, std::uint64_t max_steps,
                                        const CheckSink& sink) {
  Tally tally(sink, "discrete-universality");
  const DigitStream stream = DigitStream::champernowne(4);
  const ActionMap map;
  std::uint64_t worst = 0;
  std::size_t pairs = 0;
  for (const auto& [name, env] : grids) {
    std::uint64_t grid_worst = 0;
    std::string failure;
    for (Cell s : env.free_cells()) {
      for (Cell g : env.free_cells()) {
        ++pairs;
        const RunSummary r = run_plan(env.with_task(s, {g}), stream, map, 1, max_steps);
        if (r.outcome != Outcome::kGoalReached) {
          if (failure.empty()) failure = to_string(s) + "->" + to_string(g);
        } else {
          grid_worst = std::max(grid_worst, r.steps_taken);
        }
      }
    }
    worst = std::max(worst, grid_worst);
    tally.record(name, failure.empty(), failure.empty() ? "max_steps=" + std::to_string(grid_worst) : failure);
  }
  return tally.result(std::to_string(pairs) + " pairs, worst " + std::to_string(worst) + " steps");
}

CheckResult check_exhaustiveness(const std::vector<ExhaustiveCase>& cases, std::uint64_t horizon,
                                 const CheckSink& sink) {
  Tally tally(sink, "exhaustiveness");
  const DigitStream stream = DigitStream::champernowne(4);
  const ActionMap map;
  for (const auto& c : cases) {
    const GridEnv env(c.width, c.height, std::vector<bool>(static_cast<std::size_t>(c.width) * c.height, true), {0, 0},
                      {{c.width - 1, c.height - 1}});
    const auto report = verify_exhaustive(env, stream, map, c.k, horizon);
    tally.record("open-" + std::to_string(c.width) + "x" + std::to_string(c.height) + "-k" + std::to_string(c.k),
                 report.unseen.empty(),
                 "pairs=" + std::to_string(report.total_pairs) + " complete_at=" + std::to_string(report.complete_at) +
                     " unseen=" + std::to_string(report.unseen.size()));
  }
  return tally.result();
}

CheckResult check_synchronization(const std::vector<Named<GridEnv>>& grids, const CheckSink& sink) {
  Tally tally(sink, "synchronization");
  std::size_t longest = 0;
  for (const auto& [name, env] : grids) {
    const auto seq = synchronizing_sequence(env);
    const bool ok = verify_synchronizing(env, seq);
    longest = std::max(longest, seq.size());
    tally.record(name + " (" + std::to_string(env.free_count()) + " cells)", ok,
                 "length=" + std::to_string(seq.size()));
  }
  return tally.result("longest sequence " + std::to_string(longest));
}

CheckResult check_essential_classes(const std::vector<Named<GridEnv>>& grids, std::size_t product_cells,
                                    const CheckSink& sink) {
  Tally tally(sink, "essential-classes");
  for (const auto& [name, env] : grids) {
    const Dfa dfa = grid_to_dfa(env);
    const auto classes = essential_classes(dfa);
    const bool whole = classes.size() == 1 && classes.front().members.size() == env.free_count();
    tally.record(name, whole, "classes=" + std::to_string(classes.size()));
    if (env.free_count() <= product_cells) {
      const auto product = essential_classes(product_automaton(dfa, 1));
      const bool ok = product.size() == 1 && product.front().members.size() == 4 * env.free_count();
      tally.record(name + " k=1 product", ok,
                   "classes=" + std::to_string(product.size()) +
                       " size=" + std::to_string(product.empty() ? 0 : product.front().members.size()));
    }
  }
  return tally.result();
}

CheckResult check_continuous_universality(const std::vector<Named<ContinuousEnv>>& worlds, const Rational& weight,
                                          std::uint64_t max_steps, const CheckSink& sink) {
  Tally tally(sink, "continuous-universality");
  const DigitStream stream = DigitStream::pi4();
  const ActionMap map;
  std::uint64_t worst = 0;
  for (const auto& [name, env] : worlds) {
    for (std::size_t i = 0; i < env.starts().size(); ++i) {
      const auto& start = env.starts()[i];
      const auto a = execute_scalefree(env, start, stream, map, weight, 1, max_steps, TraceDetail::kSummary);
      const auto b = execute_scalefree(env, start, stream, map, weight, 1, max_steps, TraceDetail::kSummary);
      const bool same = a.steps_taken == b.steps_taken && a.outcome == b.outcome &&
                        a.final_point.exponent == b.final_point.exponent && a.final_point.x == b.final_point.x &&
                        a.final_point.y == b.final_point.y && a.distinct_points == b.distinct_points;
      const bool ok = a.outcome == Outcome::kGoalReached && same;
      if (a.outcome == Outcome::kGoalReached) worst = std::max(worst, a.steps_taken);
      tally.record(name + " start " + std::to_string(i) + " (" + to_string(start.x) + "," + to_string(start.y) + ")",
                   ok, std::string(to_string(a.outcome)) + " steps=" + std::to_string(a.steps_taken) +
                           (same ? "" : " rerun differs"));
    }
  }
  return tally.result("worst " + std::to_string(worst) + " steps");
}

CheckResult check_learner(const std::vector<Named<GridEnv>>& grids, const DigitStream& stream, std::uint64_t budget,
                          std::uint64_t max_budget, const CheckSink& sink) {
  Tally tally(sink, "learner");
  const ActionMap map;
  std::size_t escalated = 0;
  for (const auto& [name, env] : grids) {
    const std::size_t target = bfs_shortest(env, env.start(), env.goals()).size();
    std::uint64_t b = budget;
    LearnerState state;
    std::string error;
    try {
      state = learn_optimal(env, stream, map, 1, b);
      while (!(state.best_plan && state.best_plan->size() == target) && b < max_budget) {
        b = std::min(max_budget, b * 10);
        state = learn_optimal(env, stream, map, 1, b);
      }
    } catch (const Error& e) {
      error = std::string(" error=") + e.what();
    }
    if (b > budget) ++escalated;
    const bool ok = error.empty() && state.best_plan && state.best_plan->size() == target;
    tally.record(name + " (" + std::to_string(env.free_count()) + " cells)", ok,
                 "bfs=" + std::to_string(target) + error + " learned=" +
                     (state.best_plan ? std::to_string(state.best_plan->size()) : std::string("none")) +
                     " plan=" + (state.best_plan ? plan_text(*state.best_plan) : std::string("-")) +
                     " budget=" + std::to_string(b) + " found_at=" + std::to_string(state.found_at_step));
  }
  return tally.result(std::to_string(escalated) + " escalated");
}

CheckResult check_gcgr(const std::vector<Named<ContinuousEnv>>& worlds, unsigned anchors, const CheckSink& sink) {
  Tally tally(sink, "gcgr");
  for (std::size_t w = 0; w < worlds.size(); ++w) {
    const auto& [name, env] = worlds[w];
    const unsigned m = estimate_sufficient_scaling(env, env.goal_radius());
    // Anchors on a non-dyadic grid of denominator 997.
    const long den = 997;
    const auto nx = static_cast<std::uint64_t>(mpz_get_ui(floor_of(env.width() * den).get_mpz_t()));
    const auto ny = static_cast<std::uint64_t>(mpz_get_ui(floor_of(env.height() * den).get_mpz_t()));
    unsigned tested = 0;
    std::string failure;
    for (std::uint64_t draw = 1; tested < anchors && draw < 1000ull * anchors; ++draw) {
      std::uint64_t rx = 0, ry = 0;
      for (int i = 0; i < 4; ++i) {
        rx = (rx << 8) | pseudorandom_digit(7000 + w, 256, 8 * draw + i);
        ry = (ry << 8) | pseudorandom_digit(7000 + w, 256, 8 * draw + 4 + i);
      }
      const RationalPoint anchor{Rational(static_cast<long>(rx % nx), den), Rational(static_cast<long>(ry % ny), den)};
      if (!env.in_interior(anchor)) continue;
      ++tested;
      for (unsigned level : {m, m + 1}) {
        if (!is_connected_at(env, anchor, level) && failure.empty()) {
          failure = "disconnected at m=" + std::to_string(level) + " anchor (" + to_string(anchor.x) + "," +
                    to_string(anchor.y) + ")";
        }
      }
    }
    const bool ok = failure.empty() && tested == anchors;
    tally.record(name, ok, ok ? "m=" + std::to_string(m) + " anchors=" + std::to_string(tested) : failure);
  }
  return tally.result();
}

CheckResult check_comparative(std::uint64_t trials, std::uint64_t stride, std::uint64_t budget, unsigned workers,
                              const CheckSink& sink) {
  Tally tally(sink, "comparative");
  ExperimentConfig config;
  config.kind = ProblemKind::kGrid;
  config.generator = "random 50 50 30 2024";
  config.trials = trials;
  config.stride = stride;
  config.budget = budget;
  config.workers = workers;
  auto mean_of = [&](DigitSource source) {
    config.source = source;
    const TrialStats stats = run_trials(config);
    tally.record(std::string(to_string(source)), stats.failures == 0 && stats.errors == 0,
                 "avg=" + (stats.steps_avg ? fixed(*stats.steps_avg, 1) : std::string("NA")) +
                     " min=" + std::to_string(stats.steps_min.value_or(0)) +
                     " max=" + std::to_string(stats.steps_max.value_or(0)) +
                     " failures=" + std::to_string(stats.failures) + " errors=" + std::to_string(stats.errors));
    return stats.steps_avg.value_or(0.0);
  };
  const double champ = mean_of(DigitSource::kChampernowne);
  const double pi = mean_of(DigitSource::kPi4);
  const double prng = mean_of(DigitSource::kPseudorandom);
  tally.record("champernowne > pi", champ > pi, fixed(champ, 1) + " vs " + fixed(pi, 1));
  tally.record("champernowne > pseudorandom", champ > prng, fixed(champ, 1) + " vs " + fixed(prng, 1));
  return tally.result("means champernowne " + fixed(champ, 1) + ", pi " + fixed(pi, 1) + ", pseudorandom " +
                      fixed(prng, 1));
}

CheckResult check_determinism(unsigned workers, const CheckSink& sink) {
  Tally tally(sink, "determinism");
  std::vector<std::pair<std::string, ExperimentConfig>> configs;
  auto add = [&](std::string name, ProblemKind kind, std::string generator, DigitSource source,
                 std::uint64_t trials, std::uint64_t budget) {
    ExperimentConfig c;
    c.kind = kind;
    c.generator = std::move(generator);
    c.source = source;
    c.trials = trials;
    c.budget = budget;
    configs.emplace_back(std::move(name), std::move(c));
  };
  add("grid-pi", ProblemKind::kGrid, "random 20 20 20 5", DigitSource::kPi4, 24, 200'000);
  add("maze-pseudorandom", ProblemKind::kMaze, "maze 15 15 3", DigitSource::kPseudorandom, 24, 200'000);
  add("grid-champernowne", ProblemKind::kGrid, "polyomino 30 9", DigitSource::kChampernowne, 24, 200'000);
  add("continuous-pi", ProblemKind::kContinuous, "discs 4", DigitSource::kPi4, 8, 100'000);
  add("adaptive-pseudorandom", ProblemKind::kContinuousAdaptive, "discs 6", DigitSource::kPseudorandom, 8, 100'000);
  add("learn-champernowne", ProblemKind::kLearn, "polyomino 12 2", DigitSource::kChampernowne, 8, 100'000);
  for (auto& [name, config] : configs) {
    std::string first;
    bool same = true;
    for (int run = 0; run < 2; ++run) {
      for (unsigned w : {1u, workers}) {
        config.workers = w;
        std::ostringstream os;
        write_csv(os, run_trials(config));
        if (first.empty()) first = os.str();
        else same = same && os.str() == first;
      }
    }
    tally.record(name, same, std::to_string(first.size()) + " bytes");
  }
  return tally.result();
}

bool run_suite(std::string_view suite, std::ostream& jsonl) {
  const bool full = suite == "full";
  if (!full && suite != "small") throw InvalidArgument("unknown suite '" + std::string(suite) + "'");
  bool pass = true;
  const CheckSink sink = [&](const CheckRecord& r) {
    pass = pass && r.pass;
    jsonl << to_json_line(r) << '\n' << std::flush;
  };
  auto take = [](std::vector<Named<GridEnv>> v, std::size_t n) {
    if (v.size() > n) v.erase(v.begin() + static_cast<std::ptrdiff_t>(n), v.end());
    return v;
  };

  check_digit_fidelity(sink, full ? 100'000 : 4096);
  check_schedule(sink, 20);
  const auto small = small_grid_catalog();
  check_discrete_universality(full ? small : take(small, 10), 1'000'000, sink);
  if (full) {
    check_exhaustiveness({{2, 2, 1}, {2, 2, 2}, {3, 3, 1}, {3, 3, 2}}, 1'000'000, sink);
  } else {
    check_exhaustiveness({{2, 2, 1}, {2, 2, 2}}, 100'000, sink);
  }
  const auto sync = sync_catalog();
  check_synchronization(full ? sync : take(sync, 5), sink);
  auto all_grids = small;
  all_grids.insert(all_grids.end(), sync.begin(), sync.end());
  check_essential_classes(full ? all_grids : small, 9, sink);
  auto worlds = disc_catalog();
  if (!full) worlds.erase(worlds.begin() + 3, worlds.end());
  check_gcgr(worlds, full ? 100 : 10, sink);
  if (full) {
    check_continuous_universality(worlds, Rational(1), 1'000'000, sink);
    check_learner(learner_catalog(), DigitStream::pi4(), 10'000'000, 1'000'000'000, sink);
    check_determinism(4, sink);
  } else {
    check_continuous_universality({worlds.front()}, Rational(1), 1'000'000, sink);
    check_learner({{"corridor-1x3", parse_env("S.G\n")}, {"poly-8", generate_polyomino(8, 11)}},
                  DigitStream::champernowne(4), 100'000, 10'000'000, sink);
    check_determinism(2, sink);
  }
  return pass;
}

}  // namespace uplan
