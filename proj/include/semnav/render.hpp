#pragma once

#include <string>
#include <vector>

#include "semnav/sim.hpp"
#include "semnav/world.hpp"

namespace semnav {

struct RenderSpec {
  bool physical = true;
  bool mapped = false;
  bool model = false;
  int resolution = 64;
  void validate() const;
};

// Physical workspace with obstacles, goal and trajectories. With `mapped`
// set, dilated components and their collars are overlaid.
std::string render_world_svg(const Scenario& s, const std::vector<const Trajectory*>& trajectories,
                             const MappedSpace* mapped = nullptr, const DiffeoSnapshot* snap = nullptr);

struct GridSample {
  Point2 x;
  double det = 0.0;  // NaN outside the domain
  Point2 phi;
};

// N x N cell-centred samples over the enclosing workspace. Points inside
// mapped obstacles or at sharp corners get det = NaN.
std::vector<GridSample> diffeo_grid(const Scenario& s, const DiffeoSnapshot& snap, int n);

// Heatmap of log10 det(D Phi) over an N x N grid.
std::string render_logdet_svg(const Scenario& s, const std::vector<GridSample>& grid, int n);

}  // namespace semnav
