#include "uplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include "uplan/errors.hpp"
#include "uplan/learner.hpp"

namespace uplan {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ParseError(ParseError::Kind::kBadValue, "'" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return v;
}

std::vector<std::string> words(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

using AnyEnv = std::variant<GridEnv, ContinuousEnv>;

bool is_continuous(ProblemKind kind) {
  return kind == ProblemKind::kContinuous || kind == ProblemKind::kContinuousAdaptive;
}

AnyEnv build_env(const ExperimentConfig& config) {
  if (config.env_path) {
    if (is_continuous(config.kind)) return load_continuous_env(config.env_path->string());
    return load_env(config.env_path->string());
  }
  const auto w = words(config.generator);
  auto arg = [&](std::size_t i) { return parse_u64("generator", w.at(i)); };
  auto expect = [&](std::size_t n) {
    if (w.size() != n) throw ParseError(ParseError::Kind::kBadValue, "malformed generator '" + config.generator + "'");
  };
  if (w.empty()) throw ParseError(ParseError::Kind::kMissingKey, "config needs 'env' or 'generator'");
  if (w[0] == "discs") {
    expect(2);
    if (!is_continuous(config.kind)) throw InvalidArgument("'discs' generator needs a continuous problem kind");
    return random_disc_world(DiscWorldSpec{}, arg(1));
  }
  if (is_continuous(config.kind)) throw InvalidArgument("continuous problems need an env file or 'discs' generator");
  if (w[0] == "maze") {
    expect(4);
    return generate_maze(static_cast<int>(arg(1)), static_cast<int>(arg(2)), arg(3));
  }
  if (w[0] == "random") {
    expect(5);
    return generate_random_grid(static_cast<int>(arg(1)), static_cast<int>(arg(2)), static_cast<unsigned>(arg(3)),
                                arg(4));
  }
  if (w[0] == "polyomino") {
    expect(3);
    return generate_polyomino(arg(1), arg(2));
  }
  throw ParseError(ParseError::Kind::kBadValue, "unknown generator '" + w[0] + "'");
}

TrialRow run_one(const ExperimentConfig& config, const AnyEnv& env, const DigitStream& stream, const ActionMap& map,
                 std::uint64_t trial) {
  TrialRow row;
  row.trial = trial;
  row.offset = config.offset + config.stride * (trial - 1);
  try {
    if (const auto* grid = std::get_if<GridEnv>(&env)) {
      row.total = grid->free_count();
      if (config.kind == ProblemKind::kLearn) {
        const LearnerState s = learn_optimal(*grid, stream, map, row.offset, config.budget);
        row.steps = s.found_at_step;
        row.success = s.best_plan.has_value();
        row.outcome = row.success ? "plan:" + std::to_string(s.best_plan->size()) : "none";
      } else {
        const RunSummary s = run_plan(*grid, stream, map, row.offset, config.budget);
        row.steps = s.steps_taken;
        row.visited = s.visited;
        row.success = s.outcome == Outcome::kGoalReached;
        row.outcome = std::string(to_string(s.outcome));
      }
    } else {
      const auto& world = std::get<ContinuousEnv>(env);
      if (world.starts().empty()) throw InvalidArgument("continuous environment has no start points");
      const std::size_t k = config.start_index.value_or((trial - 1) % world.starts().size());
      if (k >= world.starts().size()) throw InvalidArgument("start index out of range");
      const RationalPoint& start = world.starts()[k];
      const ContinuousTrace t =
          config.kind == ProblemKind::kContinuous
              ? execute_scalefree(world, start, stream, map, config.weight, row.offset, config.budget,
                                  TraceDetail::kSummary)
              : execute_adaptive(world, start, stream, map, row.offset, config.budget, TraceDetail::kSummary);
      row.steps = t.steps_taken;
      row.visited = t.distinct_points;
      row.success = t.outcome == Outcome::kGoalReached;
      row.outcome = std::string(to_string(t.outcome));
    }
  } catch (const Error& e) {
    row = TrialRow{};
    row.trial = trial;
    row.offset = config.offset + config.stride * (trial - 1);
    row.outcome = "error";
    row.error = true;
    row.message = e.what();
  }
  return row;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kGrid: return "grid";
    case ProblemKind::kMaze: return "maze";
    case ProblemKind::kContinuous: return "continuous";
    case ProblemKind::kContinuousAdaptive: return "continuous-adaptive";
    case ProblemKind::kLearn: return "learn";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view text) {
  for (ProblemKind k : {ProblemKind::kGrid, ProblemKind::kMaze, ProblemKind::kContinuous,
                        ProblemKind::kContinuousAdaptive, ProblemKind::kLearn}) {
    if (to_string(k) == text) return k;
  }
  throw ParseError(ParseError::Kind::kBadValue, "unknown problem kind '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  auto resolve = [&](const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(ParseError::Kind::kBadValue, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "kind") {
      config.kind = parse_problem_kind(value);
    } else if (key == "env") {
      config.env_path = resolve(value);
    } else if (key == "generator") {
      config.generator = value;
    } else if (key == "source") {
      if (value == "champernowne") config.source = DigitSource::kChampernowne;
      else if (value == "pi" || value == "pi4") config.source = DigitSource::kPi4;
      else if (value == "pseudorandom") config.source = DigitSource::kPseudorandom;
      else if (value == "file") config.source = DigitSource::kFile;
      else throw ParseError(ParseError::Kind::kBadValue, "unknown digit source '" + value + "'");
    } else if (key == "base") {
      config.base = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "seed") {
      config.seed = parse_u64(key, value);
    } else if (key == "digits") {
      config.digits_path = resolve(value);
    } else if (key == "map") {
      config.map = value;
    } else if (key == "trials") {
      config.trials = parse_u64(key, value);
    } else if (key == "stride") {
      config.stride = parse_u64(key, value);
    } else if (key == "offset") {
      config.offset = parse_u64(key, value);
    } else if (key == "budget") {
      config.budget = parse_u64(key, value);
    } else if (key == "weight") {
      config.weight = parse_rational(value);
    } else if (key == "start") {
      if (value == "cycle") config.start_index.reset();
      else config.start_index = parse_u64(key, value);
    } else if (key == "workers") {
      config.workers = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "output") {
      config.output = resolve(value);
    } else {
      throw ParseError(ParseError::Kind::kUnknownKey, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file: " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

void validate(const ExperimentConfig& config) {
  if (config.trials == 0) throw InvalidArgument("trials must be at least 1");
  if (config.stride == 0) throw InvalidArgument("stride must be at least 1");
  if (config.offset == 0) throw InvalidArgument("offset must be at least 1");
  if (config.base < 2 || config.base > 36) throw InvalidArgument("base must lie in [2, 36]");
  if (config.source == DigitSource::kPi4 && config.base != 4) throw InvalidArgument("pi digits are base 4");
  if (config.weight <= 0) throw InvalidArgument("weight must be positive");
  if (config.workers == 0) throw InvalidArgument("workers must be at least 1");
  if (!config.env_path && config.generator.empty()) {
    throw ParseError(ParseError::Kind::kMissingKey, "config needs 'env' or 'generator'");
  }
  if (config.env_path && !std::filesystem::exists(*config.env_path)) {
    throw Error("environment file not found: " + config.env_path->string());
  }
  if (config.source == DigitSource::kFile) {
    if (!config.digits_path) throw ParseError(ParseError::Kind::kMissingKey, "source = file needs 'digits'");
    if (!std::filesystem::exists(*config.digits_path)) {
      throw Error("digit file not found: " + config.digits_path->string());
    }
  }
  if (config.output) {
    const auto dir = config.output->parent_path();
    if (!dir.empty() && !std::filesystem::is_directory(dir)) {
      throw Error("output directory does not exist: " + dir.string());
    }
  }
  ActionMap::parse(config.map);
}

DigitStream make_stream(const ExperimentConfig& config) {
  switch (config.source) {
    case DigitSource::kChampernowne: return DigitStream::champernowne(config.base);
    case DigitSource::kPi4: return DigitStream::pi4();
    case DigitSource::kPseudorandom: return DigitStream::pseudorandom(config.seed, config.base);
    case DigitSource::kFile: return DigitStream::from_file(*config.digits_path, config.base);
  }
  throw InvalidArgument("unknown digit source");
}

TrialStats aggregate(std::vector<TrialRow> rows) {
  TrialStats stats;
  std::uint64_t sum_steps = 0;
  for (const TrialRow& row : rows) {
    if (row.error) {
      ++stats.errors;
    } else if (row.success) {
      ++stats.successes;
      sum_steps += row.steps;
      stats.steps_min = std::min(stats.steps_min.value_or(row.steps), row.steps);
      stats.steps_max = std::max(stats.steps_max.value_or(row.steps), row.steps);
    } else {
      ++stats.failures;
    }
  }
  if (stats.successes > 0) stats.steps_avg = static_cast<double>(sum_steps) / static_cast<double>(stats.successes);
  stats.rows = std::move(rows);
  return stats;
}

TrialStats run_trials(const ExperimentConfig& config) {
  validate(config);
  const AnyEnv env = build_env(config);
  const DigitStream stream = make_stream(config);
  const ActionMap map = ActionMap::parse(config.map);
  if (map.domain_size() < config.base) {
    throw InvalidArgument("action map '" + config.map + "' does not cover base " + std::to_string(config.base));
  }

  std::vector<TrialRow> rows(config.trials);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t i = next++; i < config.trials; i = next++) rows[i] = run_one(config, env, stream, map, i + 1);
  };
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(config.workers, config.trials));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return aggregate(std::move(rows));
}

void write_csv(std::ostream& os, const TrialStats& stats) {
  os << "trial,offset,steps,outcome,visited,total\n";
  for (const TrialRow& r : stats.rows) {
    os << r.trial << ',' << r.offset << ',' << r.steps << ',' << r.outcome << ',' << r.visited << ',' << r.total
       << '\n';
  }
  os << "# trials," << stats.rows.size() << '\n';
  os << "# successes," << stats.successes << '\n';
  os << "# failures," << stats.failures << '\n';
  os << "# errors," << stats.errors << '\n';
  auto opt = [&](const char* key, const auto& value) {
    os << "# " << key << ',';
    if (value) os << *value;
    else os << "NA";
    os << '\n';
  };
  os << "# steps_avg,";
  if (stats.steps_avg) os << std::fixed << std::setprecision(3) << *stats.steps_avg << std::defaultfloat;
  else os << "NA";
  os << '\n';
  opt("steps_min", stats.steps_min);
  opt("steps_max", stats.steps_max);
}

}  // namespace uplan
