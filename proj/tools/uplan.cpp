// uplan: command line front end.
//
// Exit codes: 0 success, 1 failed verification or I/O error, 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uplan/automata.hpp"
#include "uplan/errors.hpp"
#include "uplan/harness.hpp"
#include "uplan/learner.hpp"
#include "uplan/render.hpp"
#include "uplan/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StreamOptions {
  std::string source = "pi";
  unsigned base = 4;
  std::uint64_t seed = 1;
  std::string digits_file;
  std::string map = "LRUD";

  void add(CLI::App* app) {
    app->add_option("--source", source, "champernowne | pi (or pi4) | pseudorandom | file")
        ->check(CLI::IsMember({"champernowne", "pi", "pi4", "pseudorandom", "file"}));
    app->add_option("--base", base, "digit base")->check(CLI::Range(2, 36));
    app->add_option("--seed", seed, "pseudorandom seed");
    app->add_option("--digits", digits_file, "digit file for --source file");
    app->add_option("--map", map, "action letters for digits 0, 1, ...");
  }

  uplan::DigitStream make() const {
    if (source == "champernowne") return uplan::DigitStream::champernowne(base);
    if (source == "pseudorandom") return uplan::DigitStream::pseudorandom(seed, base);
    if (source == "file") {
      if (digits_file.empty()) throw UsageError("--source file needs --digits");
      return uplan::DigitStream::from_file(digits_file, base);
    }
    if (base != 4) throw UsageError("pi digits are base 4");
    return uplan::DigitStream::pi4();
  }
};

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw uplan::Error("cannot write " + path);
  fn(os);
  os.flush();
  if (!os) throw uplan::Error("failed writing " + path);
}

uplan::GridEnv grid_from(const std::string& env_path, const std::string& generator) {
  if (!env_path.empty()) return uplan::load_env(env_path);
  if (generator.empty()) throw UsageError("give --env or --generator");
  std::istringstream is(generator);
  std::string kind;
  std::uint64_t a = 0, b = 0, c = 0, d = 0;
  is >> kind;
  if (kind == "maze" && is >> a >> b >> c) return uplan::generate_maze(int(a), int(b), c);
  if (kind == "random" && is >> a >> b >> c >> d) return uplan::generate_random_grid(int(a), int(b), unsigned(c), d);
  if (kind == "polyomino" && is >> a >> b) return uplan::generate_polyomino(a, b);
  throw UsageError("malformed generator '" + generator + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal plans: sensorless grid, maze and continuous planning driven by digit streams"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a batch of trials from a config file and write CSV");
  std::string config_path;
  std::optional<std::uint64_t> run_seed, run_offset, run_budget;
  std::optional<unsigned> run_workers;
  std::string run_out;
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "pseudorandom seed override");
  run->add_option("--offset", run_offset, "first digit index of trial 1");
  run->add_option("--budget", run_budget, "step budget per trial");
  run->add_option("--workers", run_workers, "worker threads");
  run->add_option("--out", run_out, "CSV output path ('-' for stdout)");

  // digits
  auto* digits = app.add_subcommand("digits", "Print digits of a stream");
  StreamOptions digit_stream;
  digit_stream.add(digits);
  std::uint64_t digits_from = 1, digits_count = 36;
  digits->add_option("--from", digits_from, "first index (1-based)")->check(CLI::PositiveNumber);
  digits->add_option("--count", digits_count, "number of digits");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification suite and print JSON lines");
  std::string suite = "small";
  std::string verify_out;
  verify->add_option("--suite", suite, "small | full")->check(CLI::IsMember({"small", "full"}));
  verify->add_option("--out", verify_out, "report path ('-' for stdout)");

  // learn
  auto* learn = app.add_subcommand("learn", "Learn a shortest plan while running the universal plan");
  StreamOptions learn_stream;
  learn_stream.source = "champernowne";
  learn_stream.add(learn);
  std::string learn_env, learn_generator;
  std::uint64_t learn_offset = 1, learn_budget = 10'000'000;
  learn->add_option("--env", learn_env, "grid file")->check(CLI::ExistingFile);
  learn->add_option("--generator", learn_generator, "\"maze W H SEED\" | \"random W H PCT SEED\" | \"polyomino N SEED\"");
  learn->add_option("--offset", learn_offset, "first digit index")->check(CLI::PositiveNumber);
  learn->add_option("--budget", learn_budget, "stages to run");

  // render
  auto* render = app.add_subcommand("render", "Run one trial and draw it as SVG");
  StreamOptions render_stream;
  render_stream.add(render);
  std::string render_env, render_generator, render_out, render_kind = "grid", render_weight = "1";
  std::uint64_t render_offset = 1, render_budget = 100'000;
  std::size_t render_start = 0;
  render->add_option("--env", render_env, "environment file")->check(CLI::ExistingFile);
  render->add_option("--generator", render_generator, "grid generator, or \"discs SEED\"");
  render->add_option("--kind", render_kind, "grid | continuous | continuous-adaptive")
      ->check(CLI::IsMember({"grid", "maze", "continuous", "continuous-adaptive"}));
  render->add_option("--offset", render_offset, "first digit index")->check(CLI::PositiveNumber);
  render->add_option("--budget", render_budget, "step budget");
  render->add_option("--start", render_start, "continuous start index");
  render->add_option("--weight", render_weight, "schedule weight w");
  render->add_option("--out", render_out, "SVG path ('-' for stdout)")->required();

  // gen-maze
  auto* gen = app.add_subcommand("gen-maze", "Generate a perfect maze in the grid text format");
  int maze_w = 21, maze_h = 21;
  std::uint64_t maze_seed = 1;
  std::string maze_out;
  gen->add_option("--width", maze_w, "odd width >= 3");
  gen->add_option("--height", maze_h, "odd height >= 3");
  gen->add_option("--seed", maze_seed, "generator seed");
  gen->add_option("--out", maze_out, "output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    if (*run) {
      uplan::ExperimentConfig config;
      try {
        config = uplan::load_config(config_path);
      } catch (const uplan::ParseError& e) {
        throw UsageError(e.what());
      } catch (const uplan::InvalidArgument& e) {
        throw UsageError(e.what());
      }
      if (run_seed) config.seed = *run_seed;
      if (run_offset) config.offset = *run_offset;
      if (run_budget) config.budget = *run_budget;
      if (run_workers) config.workers = *run_workers;
      if (!run_out.empty()) config.output = run_out;
      const uplan::TrialStats stats = uplan::run_trials(config);
      const std::string out = config.output ? config.output->string() : std::string();
      with_output(out, [&](std::ostream& os) { uplan::write_csv(os, stats); });
      for (const auto& row : stats.rows) {
        if (row.error) std::cerr << "trial " << row.trial << ": " << row.message << '\n';
      }
      return kOk;
    }
    if (*digits) {
      const uplan::DigitStream stream = digit_stream.make();
      uplan::DigitCursor cursor(stream, digits_from);
      std::string text;
      text.reserve(digits_count);
      for (std::uint64_t i = 0; i < digits_count; ++i) {
        const std::uint8_t d = cursor.next();
        text += static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10));
      }
      std::cout << text << '\n';
      return kOk;
    }
    if (*verify) {
      bool pass = false;
      with_output(verify_out, [&](std::ostream& os) { pass = uplan::run_suite(suite, os); });
      return pass ? kOk : kFailed;
    }
    if (*learn) {
      const uplan::GridEnv env = grid_from(learn_env, learn_generator);
      const uplan::DigitStream stream = learn_stream.make();
      const uplan::ActionMap map = uplan::ActionMap::parse(learn_stream.map);
      const uplan::LearnerState state = uplan::learn_optimal(env, stream, map, learn_offset, learn_budget);
      const auto oracle = uplan::bfs_shortest(env, env.start(), env.goals());
      std::string plan;
      if (state.best_plan) {
        for (uplan::Action a : *state.best_plan) plan += uplan::action_letter(a);
      }
      std::cout << "best_plan " << (state.best_plan ? (plan.empty() ? "(empty)" : plan) : "none") << '\n'
                << "length " << (state.best_plan ? std::to_string(state.best_plan->size()) : "none") << '\n'
                << "bfs_length " << oracle.size() << '\n'
                << "budget_consumed " << state.steps_consumed << '\n'
                << "found_at " << state.found_at_step << '\n'
                << "improvements " << state.improvements << '\n'
                << "cap_hits " << state.cap_hits << '\n';
      return kOk;
    }
    if (*render) {
      const uplan::DigitStream stream = render_stream.make();
      const uplan::ActionMap map = uplan::ActionMap::parse(render_stream.map);
      if (render_kind == "grid" || render_kind == "maze") {
        const uplan::GridEnv env = grid_from(render_env, render_generator);
        const uplan::PlanTrace trace = uplan::execute(env, stream, map, render_offset, render_budget);
        with_output(render_out, [&](std::ostream& os) { uplan::render_svg(os, env, trace); });
        std::cerr << uplan::to_string(trace.outcome) << " after " << trace.steps_taken << " steps\n";
        return kOk;
      }
      std::optional<uplan::ContinuousEnv> env;
      if (!render_env.empty()) {
        env = uplan::load_continuous_env(render_env);
      } else {
        std::istringstream is(render_generator);
        std::string kind;
        std::uint64_t seed = 0;
        if (!(is >> kind >> seed) || kind != "discs") throw UsageError("continuous render needs --env or \"discs SEED\"");
        env = uplan::random_disc_world(uplan::DiscWorldSpec{}, seed);
      }
      if (render_start >= env->starts().size()) throw UsageError("start index out of range");
      const auto& start = env->starts()[render_start];
      const uplan::ContinuousTrace trace =
          render_kind == "continuous"
              ? uplan::execute_scalefree(*env, start, stream, map, uplan::parse_rational(render_weight), render_offset,
                                         render_budget)
              : uplan::execute_adaptive(*env, start, stream, map, render_offset, render_budget);
      with_output(render_out, [&](std::ostream& os) { uplan::render_svg(os, *env, trace); });
      std::cerr << uplan::to_string(trace.outcome) << " after " << trace.steps_taken << " steps\n";
      return kOk;
    }
    if (*gen) {
      const uplan::GridEnv env = uplan::generate_maze(maze_w, maze_h, maze_seed);
      with_output(maze_out, [&](std::ostream& os) { os << env.to_text(); });
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const uplan::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const uplan::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
