#pragma once

// Batch experiments: configuration files, trial execution and CSV output.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "uplan/digits.hpp"
#include "uplan/gridworld.hpp"
#include "uplan/rational.hpp"
#include "uplan/scalefree.hpp"

namespace uplan {

enum class ProblemKind { kGrid, kMaze, kContinuous, kContinuousAdaptive, kLearn };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

/// Flat "key = value" file; '#' starts a comment. Keys:
///
///   kind       grid | maze | continuous | continuous-adaptive | learn
///   env        environment file (grid text or continuous key-value text)
///   generator  "maze W H SEED" | "random W H PERCENT SEED" |
///              "polyomino CELLS SEED" | "discs SEED"  (instead of env)
///   source     champernowne | pi | pseudorandom | file
///   base       digit base (default 4)
///   seed       pseudorandom seed (default 1)
///   digits     digit file for source = file
///   map        action letters for digits 0, 1, ... (default LRUD)
///   trials     T >= 1 (default 100)
///   stride     S >= 1 (default 1000)
///   offset     index of trial 1's first digit (default 1)
///   budget     step budget per trial (default 1000000)
///   weight     schedule weight w for continuous (default 1)
///   start      continuous start index, or "cycle" to rotate through starts
///   workers    worker threads (default 1)
///   output     CSV path
///
/// Relative paths are resolved against the config file's directory.
struct ExperimentConfig {
  ProblemKind kind = ProblemKind::kGrid;
  std::optional<std::filesystem::path> env_path;
  std::string generator;
  DigitSource source = DigitSource::kPi4;
  unsigned base = 4;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> digits_path;
  std::string map = "LRUD";
  std::uint64_t trials = 100;
  std::uint64_t stride = 1000;
  std::uint64_t offset = 1;
  std::uint64_t budget = 1'000'000;
  Rational weight{1};
  std::optional<std::size_t> start_index;  // empty: cycle through starts
  unsigned workers = 1;
  std::optional<std::filesystem::path> output;
};

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Throws InvalidArgument when T, S, offset or the base are out of range and
/// Error when an input path does not exist.
void validate(const ExperimentConfig& config);

DigitStream make_stream(const ExperimentConfig& config);

struct TrialRow {
  std::uint64_t trial = 0;
  std::uint64_t offset = 0;
  std::uint64_t steps = 0;
  std::string outcome;  // goal | budget | error | plan:<length> | none
  std::uint64_t visited = 0;
  std::uint64_t total = 0;
  bool success = false;
  bool error = false;
  std::string message;
};

struct TrialStats {
  std::vector<TrialRow> rows;
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t errors = 0;
  /// Over successful trials only.
  std::optional<double> steps_avg;
  std::optional<std::uint64_t> steps_min;
  std::optional<std::uint64_t> steps_max;
};

TrialStats aggregate(std::vector<TrialRow> rows);

/// Runs every trial; trial i starts at digit offset + stride * (i - 1). Rows
/// come back ordered by trial index whatever the worker count.
TrialStats run_trials(const ExperimentConfig& config);

/// Header, one row per trial, then "# key,value" footer lines.
void write_csv(std::ostream& os, const TrialStats& stats);

}  // namespace uplan
