#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "uplan/errors.hpp"
#include "uplan/harness.hpp"
#include "uplan/render.hpp"

using namespace uplan;

namespace {

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("uplan_harness_" + std::to_string(::getpid()) + "_" +
                                                               std::to_string(counter_++))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream os(path_ / name);
    os << text;
    return path_ / name;
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

std::string csv_of(const TrialStats& stats) {
  std::ostringstream os;
  write_csv(os, stats);
  return os.str();
}

// Checks tag nesting, attribute quoting and a single root element.
bool well_formed_xml(const std::string& text, std::map<std::string, int>* classes = nullptr) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  int roots = 0;
  const std::regex attr(R"(\s+([A-Za-z_:][-A-Za-z0-9_:.]*)\s*=\s*"([^"<&]*)\")");
  while ((i = text.find('<', i)) != std::string::npos) {
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.starts_with("?")) {
      if (!tag.ends_with("?")) return false;
      continue;
    }
    if (tag.starts_with("/")) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    if (self_closing) tag.pop_back();
    const std::size_t name_end = tag.find_first_of(" \t\n");
    const std::string name = tag.substr(0, name_end);
    if (name.empty()) return false;
    std::string rest = name_end == std::string::npos ? "" : tag.substr(name_end);
    const std::string leftover = std::regex_replace(rest, attr, "");
    if (leftover.find_first_not_of(" \t\n") != std::string::npos) return false;
    if (classes) {
      for (std::sregex_iterator it(rest.begin(), rest.end(), attr), e; it != e; ++it) {
        if ((*it)[1] == "class") ++(*classes)[(*it)[2]];
      }
    }
    if (stack.empty()) ++roots;
    if (!self_closing) stack.push_back(name);
  }
  return stack.empty() && roots == 1;
}

}  // namespace

TEST(Config, ParsesEveryKey) {
  TempDir dir;
  dir.write("env.txt", "S.\n.G\n");
  dir.write("d.txt", "0123");
  const auto path = dir.write("exp.cfg",
                              "# comment\n"
                              "kind = learn\n"
                              "env = env.txt\n"
                              "source = file\n"
                              "digits = d.txt\n"
                              "base = 4\n"
                              "seed = 9\n"
                              "map = RLDU\n"
                              "trials = 3\n"
                              "stride = 7\n"
                              "offset = 2\n"
                              "budget = 100\n"
                              "weight = 1/2\n"
                              "start = 1\n"
                              "workers = 2\n"
                              "output = out.csv\n");
  const ExperimentConfig c = load_config(path);
  EXPECT_EQ(c.kind, ProblemKind::kLearn);
  EXPECT_EQ(*c.env_path, dir.path() / "env.txt");
  EXPECT_EQ(c.source, DigitSource::kFile);
  EXPECT_EQ(*c.digits_path, dir.path() / "d.txt");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.map, "RLDU");
  EXPECT_EQ(c.trials, 3u);
  EXPECT_EQ(c.stride, 7u);
  EXPECT_EQ(c.offset, 2u);
  EXPECT_EQ(c.budget, 100u);
  EXPECT_EQ(c.weight, Rational(1, 2));
  EXPECT_EQ(c.start_index, 1u);
  EXPECT_EQ(c.workers, 2u);
  EXPECT_EQ(*c.output, dir.path() / "out.csv");
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("generator = maze 5 5 1\ncolour = red\n"), ParseError);
  EXPECT_THROW(parse_config("generator = maze 5 5 1\ntrials = 0\n"), InvalidArgument);
  EXPECT_THROW(parse_config("generator = maze 5 5 1\nstride = 0\n"), InvalidArgument);
  EXPECT_THROW(parse_config("generator = maze 5 5 1\ntrials = -3\n"), ParseError);
  EXPECT_THROW(parse_config("trials = 3\n"), ParseError);
  EXPECT_THROW(parse_config("env = /nonexistent/env.txt\n"), Error);
  EXPECT_THROW(parse_config("generator = maze 5 5 1\nkind = teleport\n"), ParseError);
  EXPECT_THROW(parse_config("generator = maze 5 5 1\nsource = pi\nbase = 10\n"), InvalidArgument);
}

TEST(RunTrials, SingleCorridorTrial) {
  TempDir dir;
  dir.write("corridor.txt", "SG\n");
  dir.write("ones.txt", "1111");
  const auto cfg = dir.write("c.cfg", "env = corridor.txt\nsource = file\ndigits = ones.txt\ntrials = 1\n");
  const TrialStats stats = run_trials(load_config(cfg));
  ASSERT_EQ(stats.rows.size(), 1u);
  EXPECT_EQ(stats.rows[0].steps, 1u);
  EXPECT_EQ(stats.rows[0].outcome, "goal");
  EXPECT_EQ(stats.rows[0].offset, 1u);
  EXPECT_EQ(csv_of(stats),
            "trial,offset,steps,outcome,visited,total\n"
            "1,1,1,goal,2,2\n"
            "# trials,1\n# successes,1\n# failures,0\n# errors,0\n"
            "# steps_avg,1.000\n# steps_min,1\n# steps_max,1\n");
}

TEST(RunTrials, DigitSupplyErrorsAreRowsNotAborts) {
  TempDir dir;
  dir.write("corridor.txt", "S...G\n");
  dir.write("few.txt", "0000000000");
  const auto cfg =
      dir.write("c.cfg", "env = corridor.txt\nsource = file\ndigits = few.txt\ntrials = 3\nstride = 1\nbudget = 50\n");
  const TrialStats stats = run_trials(load_config(cfg));
  ASSERT_EQ(stats.rows.size(), 3u);
  EXPECT_EQ(stats.errors, 3u);
  for (const auto& r : stats.rows) EXPECT_EQ(r.outcome, "error");
  EXPECT_FALSE(stats.steps_avg.has_value());
}

TEST(RunTrials, OffsetsFollowTheStride) {
  ExperimentConfig c;
  c.generator = "random 8 8 20 3";
  c.source = DigitSource::kChampernowne;
  c.trials = 5;
  c.stride = 1000;
  c.offset = 1;
  c.budget = 100'000;
  const TrialStats stats = run_trials(c);
  for (std::uint64_t i = 1; i <= 5; ++i) EXPECT_EQ(stats.rows[i - 1].offset, 1000 * (i - 1) + 1);
}

TEST(RunTrials, FooterMatchesRecomputationFromRows) {
  ExperimentConfig c;
  c.generator = "random 30 30 20 11";
  c.source = DigitSource::kPi4;
  c.trials = 100;
  c.stride = 1000;
  c.budget = 200'000;
  c.workers = 2;
  const std::string csv = csv_of(run_trials(c));

  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  ASSERT_EQ(line, "trial,offset,steps,outcome,visited,total");
  std::uint64_t n = 0, ok = 0, fail = 0, err = 0, sum = 0, lo = UINT64_MAX, hi = 0;
  std::map<std::string, std::string> footer;
  while (std::getline(is, line)) {
    if (line.starts_with("# ")) {
      const auto comma = line.find(',');
      footer[line.substr(2, comma - 2)] = line.substr(comma + 1);
      continue;
    }
    std::vector<std::string> f;
    std::istringstream fields(line);
    for (std::string x; std::getline(fields, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 6u);
    ++n;
    EXPECT_LE(std::stoull(f[4]), std::stoull(f[5]));
    if (f[3] == "goal") {
      ++ok;
      const auto steps = static_cast<std::uint64_t>(std::stoull(f[2]));
      sum += steps;
      lo = std::min(lo, steps);
      hi = std::max(hi, steps);
    } else if (f[3] == "budget") {
      ++fail;
    } else {
      ++err;
    }
  }
  EXPECT_EQ(footer["trials"], std::to_string(n));
  EXPECT_EQ(footer["successes"], std::to_string(ok));
  EXPECT_EQ(footer["failures"], std::to_string(fail));
  EXPECT_EQ(footer["errors"], std::to_string(err));
  ASSERT_GT(ok, 0u);
  char avg[64];
  std::snprintf(avg, sizeof avg, "%.3f", static_cast<double>(sum) / static_cast<double>(ok));
  EXPECT_EQ(footer["steps_avg"], avg);
  EXPECT_EQ(footer["steps_min"], std::to_string(lo));
  EXPECT_EQ(footer["steps_max"], std::to_string(hi));
  EXPECT_LE(std::stod(footer["steps_min"]), std::stod(footer["steps_avg"]));
  EXPECT_LE(std::stod(footer["steps_avg"]), std::stod(footer["steps_max"]));
}

TEST(RunTrials, SerialAndParallelAreIdentical) {
  for (ProblemKind kind : {ProblemKind::kGrid, ProblemKind::kContinuous, ProblemKind::kLearn}) {
    ExperimentConfig c;
    c.kind = kind;
    c.generator = kind == ProblemKind::kContinuous ? "discs 5" : "polyomino 20 4";
    c.source = DigitSource::kPseudorandom;
    c.trials = 12;
    c.budget = 50'000;
    c.workers = 1;
    const std::string serial = csv_of(run_trials(c));
    c.workers = 4;
    EXPECT_EQ(csv_of(run_trials(c)), serial);
    EXPECT_EQ(csv_of(run_trials(c)), serial);
  }
}

TEST(Render, EmptyTraceHasOneMarkerPair) {
  const GridEnv env = GridEnv(2, 2, {true, true, true, true}, {0, 1}, {{0, 1}});
  const PlanTrace t = execute(env, DigitStream::pi4(), ActionMap(), 1, 10);
  ASSERT_EQ(t.steps_taken, 0u);
  std::ostringstream os;
  render_svg(os, env, t);
  std::map<std::string, int> classes;
  ASSERT_TRUE(well_formed_xml(os.str(), &classes));
  EXPECT_EQ(classes["start-marker"], 1);
  EXPECT_EQ(classes["goal-marker"], 1);
}

TEST(Render, BlockedTraceShowsTwoCells) {
  const GridEnv env = parse_env("S#\n.G\n");
  const PlanTrace t = execute(env, DigitStream::from_digits("11113"), ActionMap(), 1, 5);
  ASSERT_EQ(t.steps_taken, 5u);
  std::ostringstream os;
  render_svg(os, env, t);
  std::map<std::string, int> classes;
  ASSERT_TRUE(well_formed_xml(os.str(), &classes));
  EXPECT_EQ(classes["visited"], 2);
}

TEST(Render, ContinuousTraceIsWellFormed) {
  const ContinuousEnv env = random_disc_world(DiscWorldSpec{}, 8);
  const auto t = execute_scalefree(env, env.starts()[0], DigitStream::pi4(), ActionMap(), Rational(1), 1, 3000);
  std::ostringstream os;
  render_svg(os, env, t);
  std::map<std::string, int> classes;
  ASSERT_TRUE(well_formed_xml(os.str(), &classes));
  EXPECT_EQ(classes["start-marker"], 1);
  EXPECT_EQ(classes["goal-marker"], 1);
  EXPECT_EQ(classes["obstacle"], static_cast<int>(env.obstacles().size()));
  EXPECT_GT(classes["path e0"], 0);
}

TEST(Render, RejectsUnwritablePath) {
  const GridEnv env = parse_env("SG\n");
  const PlanTrace t = execute(env, DigitStream::from_digits("1"), ActionMap(), 1, 1);
  EXPECT_THROW(render_trace_svg(env, t, "/nonexistent/dir/out.svg"), Error);
}

TEST(XmlChecker, DetectsBrokenDocuments) {
  EXPECT_TRUE(well_formed_xml("<a><b x=\"1\"/></a>"));
  EXPECT_FALSE(well_formed_xml("<a><b></a>"));
  EXPECT_FALSE(well_formed_xml("<a x=1></a>"));
  EXPECT_FALSE(well_formed_xml("<a></a><b></b>"));
}
