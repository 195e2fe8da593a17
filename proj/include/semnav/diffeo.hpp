#pragma once

#include <array>
#include <vector>

#include "semnav/geometry.hpp"
#include "semnav/implicit.hpp"
#include "semnav/jet.hpp"

namespace semnav {

struct DiffeoParams {
  double mu_gamma = 4.0;
  double mu_delta = 0.05;
  double eps_gamma = 2.0;
  void validate() const;
};

double zeta(double mu, double chi);
double zeta_prime(double mu, double chi);
double eta(double mu, double eps, double chi);

enum class StepKind { kLeaf, kRootDisk, kRootBoundary };

struct PurgeStep {
  StepKind kind = StepKind::kLeaf;
  Point2 x1, x2, x3;
  Point2 center;
  double radius = 0.0;            // root disk only
  Vec2 normal = Vec2::UnitY();    // R_{pi/2}(x2 - x1), unit; leaf and root boundary
  std::vector<Point2> gamma_region;
  std::vector<Point2> collar;
  ImplicitTree gamma;  // <= 0 on the gamma region
  ImplicitTree delta;  // >= 0 on the collar
  Point2 lo, hi;       // collar bounding box
  DiffeoParams params;
  int component = -1;
  int node = -1;
};

PurgeStep make_leaf_step(const Triangle& t, const Point2& center, const std::vector<Point2>& collar,
                         const DiffeoParams& params);
PurgeStep make_root_disk_step(const Triangle& t, const Point2& center, double radius,
                              const std::vector<Point2>& collar, const DiffeoParams& params);
PurgeStep make_root_boundary_step(const Triangle& t, const Point2& center, const std::vector<Point2>& collar,
                                  const DiffeoParams& params);

bool in_collar_box(const PurgeStep& s, const Point2& x);

double switch_eval(const PurgeStep& s, const Point2& x);
double deforming_factor(const PurgeStep& s, const Point2& x);
Point2 purge_map(const PurgeStep& s, const Point2& x);

// Value, gradient and Hessian of sigma and nu at x.
Jet switch_jet(const PurgeStep& s, const Point2& x);
Jet deforming_jet(const PurgeStep& s, const Point2& x);

// dJ[n](m, l) = d J_ml / d x_n
using SecondPartials = std::array<Mat2, 2>;

struct MapDerivatives {
  Point2 value;
  Mat2 J = Mat2::Identity();
  SecondPartials dJ{Mat2::Zero(), Mat2::Zero()};
};

MapDerivatives purge_map_derivatives(const PurgeStep& s, const Point2& x);
Mat2 purge_map_jacobian(const PurgeStep& s, const Point2& x);

struct ModelDisk {
  Point2 center;
  double radius = 0.0;
  int component = -1;
};

struct DiffeoSnapshot {
  std::vector<PurgeStep> steps;
  std::vector<int> mode;
  std::vector<ModelDisk> model_disks;
  std::vector<Polygon> obstacles;  // mapped-space components, for domain checks
  bool fd_second_partials = false;
};

Point2 diffeo_eval(const DiffeoSnapshot& snap, const Point2& x);
MapDerivatives diffeo_jacobian(const DiffeoSnapshot& snap, const Point2& x, bool second_partials = true);
// Same as diffeo_jacobian but the second partials come from central differences
// of the analytic Jacobian.
MapDerivatives diffeo_jacobian_fd(const DiffeoSnapshot& snap, const Point2& x, double h = 1e-6);
bool in_mapped_obstacle(const DiffeoSnapshot& snap, const Point2& x);

// A consolidated familiar obstacle in the mapped space.
struct FamiliarComponent {
  Polygon geometry;
  bool touches_boundary = false;
  double clearance = 0.3;  // collar dilation
  std::vector<int> members;
  TriangleTree tree;
};

// Triangulates the component and fills tree.purge with centers, collars and radii.
void compute_collars(FamiliarComponent& comp, const std::vector<Polygon>& others, const ConvexPolygon& enclosing);

// Ensures root collars are pairwise disjoint, carving where needed.
void separate_root_collars(std::vector<FamiliarComponent>& comps);

DiffeoSnapshot build_snapshot(const std::vector<FamiliarComponent>& comps, const std::vector<int>& mode,
                              const DiffeoParams& params);

}  // namespace semnav
