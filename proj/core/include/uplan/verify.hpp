#pragma once

// Verification checks over the instance catalogs. Each check reports one
// record per instance and returns an overall verdict.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "uplan/catalog.hpp"

namespace uplan {

struct CheckRecord {
  std::string name;
  std::string instance;
  bool pass = false;
  std::string witness;
};

using CheckSink = std::function<void(const CheckRecord&)>;

/// {"name":..,"instance":..,"pass":..,"witness":..}
std::string to_json_line(const CheckRecord& record);

struct CheckResult {
  bool pass = true;
  std::string summary;
};

/// Champernowne base 4 and pi base 4 prefixes, plus a timed pi computation of
/// `pi_digits` digits checked against the shared table.
CheckResult check_digit_fidelity(const CheckSink& sink, std::size_t pi_digits = 100'000);

/// beta/phi for n = 1..9 and L_w(1..segments) for w in {1, 1/2, 3/2} against an
/// integer-only recomputation.
CheckResult check_schedule(const CheckSink& sink, std::uint64_t segments = 20);

/// Every (start, goal) pair of every grid reaches the goal under Champernowne
/// base 4 within max_steps.
CheckResult check_discrete_universality(const std::vector<Named<GridEnv>>& grids, std::uint64_t max_steps,
                                        const CheckSink& sink);

/// Open w x h grids and window lengths k leave no (state, window) pair unseen.
struct ExhaustiveCase {
  int width;
  int height;
  unsigned k;
};
CheckResult check_exhaustiveness(const std::vector<ExhaustiveCase>& cases, std::uint64_t horizon,
                                 const CheckSink& sink);

CheckResult check_synchronization(const std::vector<Named<GridEnv>>& grids, const CheckSink& sink);

/// One essential class holding every state; for grids with at most
/// `product_cells` cells also a single class of 4|X| states in the k = 1
/// product automaton.
CheckResult check_essential_classes(const std::vector<Named<GridEnv>>& grids, std::size_t product_cells,
                                    const CheckSink& sink);

/// Scale-free plan with pi digits from every start of every world, run twice
/// and compared for identical results.
CheckResult check_continuous_universality(const std::vector<Named<ContinuousEnv>>& worlds, const Rational& weight,
                                          std::uint64_t max_steps, const CheckSink& sink);

/// Learned plan length equals the BFS length; budgets escalate by 10x up to
/// max_budget.
CheckResult check_learner(const std::vector<Named<GridEnv>>& grids, const DigitStream& stream, std::uint64_t budget,
                          std::uint64_t max_budget, const CheckSink& sink);

/// Lattice connectivity at m = estimate_sufficient_scaling and m + 1 for
/// `anchors` random interior anchors per world.
CheckResult check_gcgr(const std::vector<Named<ContinuousEnv>>& worlds, unsigned anchors, const CheckSink& sink);

/// Mean steps on the comparison grid: Champernowne above pi and above the
/// pseudorandom baseline.
CheckResult check_comparative(std::uint64_t trials, std::uint64_t stride, std::uint64_t budget, unsigned workers,
                              const CheckSink& sink);

/// Serial and parallel runs of a set of experiment configurations produce
/// identical CSV bytes, twice over.
CheckResult check_determinism(unsigned workers, const CheckSink& sink);

/// Suites "small" (seconds) and "full" (minutes). Writes JSON lines and
/// returns whether every record passed. Throws InvalidArgument for an
/// unknown suite.
bool run_suite(std::string_view suite, std::ostream& jsonl);

}  // namespace uplan
