#include "uplan/catalog.hpp"

namespace uplan {
namespace {

GridEnv open_rect(int w, int h) {
  return GridEnv(w, h, std::vector<bool>(static_cast<std::size_t>(w) * h, true), {0, 0}, {{w - 1, h - 1}});
}

}  // namespace

std::vector<Named<GridEnv>> small_grid_catalog() {
  std::vector<Named<GridEnv>> out;
  for (auto [w, h] : {std::pair{1, 1}, {1, 2}, {2, 2}, {3, 3}, {3, 4}, {1, 12}, {2, 6}, {4, 3}}) {
    out.push_back({"open-" + std::to_string(w) + "x" + std::to_string(h), open_rect(w, h)});
  }
  const char* shapes[] = {
      "S..\n.#.\n..G\n",
      "S##\n.##\n..G\n",
      "S.#\n#..\n##G\n",
      "S...\n##.#\nG...\n",
      ".S.\n#.#\n.G.\n",
      "S.#.\n#...\n.G.#\n",
  };
  int n = 0;
  for (const char* s : shapes) out.push_back({"shape-" + std::to_string(++n), parse_env(s)});
  for (std::size_t cells = 4; cells <= 12; ++cells) {
    out.push_back({"poly-" + std::to_string(cells), generate_polyomino(cells, 100 + cells)});
  }
  return out;
}

std::vector<Named<GridEnv>> sync_catalog() {
  std::vector<Named<GridEnv>> out;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    out.push_back({"poly-s" + std::to_string(seed), generate_polyomino(15 + seed, 200 + seed)});
  }
  for (std::uint64_t seed = 1; out.size() < 20; ++seed) {
    GridEnv env = generate_random_grid(5, 5, 25, 300 + seed);
    if (env.free_count() >= 8) out.push_back({"random-s" + std::to_string(seed), std::move(env)});
  }
  return out;
}

std::vector<Named<GridEnv>> learner_catalog() {
  std::vector<Named<GridEnv>> out;
  for (std::uint64_t seed = 1; out.size() < 20; ++seed) {
    GridEnv env = generate_random_grid(6, 5, 20, 400 + seed);
    if (env.free_count() >= 15) out.push_back({"learn-s" + std::to_string(seed), std::move(env)});
  }
  return out;
}

std::vector<Named<ContinuousEnv>> disc_catalog() {
  std::vector<Named<ContinuousEnv>> out;
  const DiscWorldSpec spec;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    out.push_back({"discs-s" + std::to_string(seed), random_disc_world(spec, seed)});
  }
  return out;
}

GridEnv comparison_grid() { return generate_random_grid(50, 50, 30, 2024); }

}  // namespace uplan
