#pragma once

// Fixed instance families used by the verification suites and the tests.

#include <string>
#include <vector>

#include "uplan/gridworld.hpp"
#include "uplan/scalefree.hpp"

namespace uplan {

template <typename Env>
struct Named {
  std::string name;
  Env env;
};

/// Connected grids with at most 12 free cells: open rectangles, corridors,
/// hand-drawn shapes and random polyominoes.
std::vector<Named<GridEnv>> small_grid_catalog();

/// 20 random connected grids with at most 25 free cells.
std::vector<Named<GridEnv>> sync_catalog();

/// 20 random grids with at most 30 free cells, start and goal far apart.
std::vector<Named<GridEnv>> learner_catalog();

/// 25 disc worlds from random_disc_world with the default spec.
std::vector<Named<ContinuousEnv>> disc_catalog();

/// The 50x50 instance used to compare digit sources.
GridEnv comparison_grid();

}  // namespace uplan
