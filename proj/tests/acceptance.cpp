// Runs the eleven acceptance criteria and prints one PASS/FAIL line each.
// Per-instance records go to acceptance.jsonl in the working directory.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "uplan/catalog.hpp"
#include "uplan/errors.hpp"
#include "uplan/verify.hpp"

using namespace uplan;

namespace {

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<CheckResult(const CheckSink&)> run;
};

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::strtoull(v, nullptr, 10) : fallback;
}

}  // namespace

int main() {
  // Comparative trials at stride 100000 read pi digits past ten million.
  ::setenv("UPLAN_PI_MAX_DIGITS", "16000000", 0);
  std::ofstream jsonl("acceptance.jsonl");
  const unsigned workers = static_cast<unsigned>(env_u64("UPLAN_ACCEPTANCE_WORKERS", 4));
  const std::uint64_t comparative_budget = env_u64("UPLAN_COMPARATIVE_BUDGET", 300'000'000);

  const auto small = small_grid_catalog();
  const auto sync = sync_catalog();
  const auto worlds = disc_catalog();

  const std::vector<Criterion> criteria = {
      {1, "digit fidelity", 60, [](const CheckSink& s) { return check_digit_fidelity(s, 100'000); }},
      {2, "schedule fidelity", 1, [](const CheckSink& s) { return check_schedule(s, 20); }},
      {3, "discrete universality", 300,
       [&](const CheckSink& s) { return check_discrete_universality(small, 1'000'000, s); }},
      {4, "exhaustiveness", 120,
       [](const CheckSink& s) {
         return check_exhaustiveness({{2, 2, 1}, {2, 2, 2}, {3, 3, 1}, {3, 3, 2}}, 1'000'000, s);
       }},
      {5, "synchronization", 60, [&](const CheckSink& s) { return check_synchronization(sync, s); }},
      {6, "essential classes", 60,
       [&](const CheckSink& s) {
         auto all = small;
         all.insert(all.end(), sync.begin(), sync.end());
         const auto learn = learner_catalog();
         all.insert(all.end(), learn.begin(), learn.end());
         return check_essential_classes(all, 9, s);
       }},
      {7, "continuous universality", 600,
       [&](const CheckSink& s) { return check_continuous_universality(worlds, Rational(1), 1'000'000, s); }},
      {8, "learner optimality", 900,
       [](const CheckSink& s) { return check_learner(learner_catalog(), DigitStream::pi4(), 10'000'000, 1'000'000'000, s); }},
      {9, "gcgr oracle", 300, [&](const CheckSink& s) { return check_gcgr(worlds, 100, s); }},
      {10, "comparative trend", 1200,
       [&](const CheckSink& s) { return check_comparative(100, 100'000, comparative_budget, workers, s); }},
      {11, "determinism", 600, [&](const CheckSink& s) { return check_determinism(workers, s); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    std::size_t records = 0;
    std::size_t bad = 0;
    const CheckSink sink = [&](const CheckRecord& r) {
      ++records;
      if (!r.pass) ++bad;
      jsonl << to_json_line(r) << '\n' << std::flush;
    };
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult result;
    try {
      result = c.run(sink);
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool pass = result.pass && bad == 0 && in_time;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << records
              << " records, " << bad << " failing, " << secs << " s of " << c.limit_seconds << " s"
              << (in_time ? "" : ", over time") << ") " << result.summary << std::endl;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
