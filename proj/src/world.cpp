#include "semnav/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "semnav/errors.hpp"

namespace semnav {

namespace {

constexpr double kCollarGapShare = 0.45;

double components_gap(const Polygon& a, const Polygon& b) { return polygon_distance(a, b); }

bool overlaps(const Polygon& piece, const Polygon& comp) {
  for (const auto& v : piece.vertices())
    if (point_in_polygon(v, comp) != Location::kOutside) return true;
  return false;
}

double distance_to_hull_boundary(const Point2& x, const ConvexPolygon& hull) {
  const double d = distance_to_boundary(x, hull.vertices());
  return point_in_polygon(x, hull, 0.0) == Location::kOutside ? -d : d;
}

}  // namespace

std::vector<int> MappedSpace::dset() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < components.size(); ++i)
    if (!components[i].touches_boundary) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> MappedSpace::bset() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < components.size(); ++i)
    if (components[i].touches_boundary) out.push_back(static_cast<int>(i));
  return out;
}

MappedSpace mapped_space_recovery(const SemanticMapState& semantic, const Scenario& s) {
  MappedSpace ms;
  ms.enclosing_freespace = s.enclosing_freespace;
  if (semantic.mode.empty()) return ms;
  const auto& fe = s.enclosing_freespace;

  const auto unions = union_all(semantic.dilated, false);
  for (const auto& u : unions) {
    std::vector<int> members;
    double clearance = 0.0;
    for (std::size_t k = 0; k < semantic.mode.size(); ++k) {
      if (!overlaps(semantic.dilated[k], u)) continue;
      const int idx = semantic.mode[k];
      members.push_back(idx);
      const double c = s.familiar[idx].clearance;
      clearance = clearance == 0.0 ? c : std::min(clearance, c);
    }
    if (clearance == 0.0) clearance = 0.3;

    const auto inside = boolean_op(BoolOp::kIntersection, {u}, {fe});
    double inside_area = 0.0;
    for (const auto& p : inside) inside_area += p.area();
    if (inside_area >= u.area() * (1.0 - 1e-9)) {
      FamiliarComponent c;
      c.geometry = u;
      c.members = members;
      c.clearance = clearance;
      ms.components.push_back(std::move(c));
      continue;
    }
    for (const auto& p : inside) {
      FamiliarComponent c;
      c.geometry = p;
      c.touches_boundary = true;
      c.members = members;
      c.clearance = clearance;
      ms.components.push_back(std::move(c));
    }
  }

  const std::size_t n = ms.components.size();
  for (std::size_t i = 0; i < n; ++i) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) gap = std::min(gap, components_gap(ms.components[i].geometry, ms.components[j].geometry));
    if (std::isfinite(gap)) ms.components[i].clearance = std::min(ms.components[i].clearance, kCollarGapShare * gap);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Polygon> others;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) others.push_back(ms.components[j].geometry);
    compute_collars(ms.components[i], others, fe);
  }
  separate_root_collars(ms.components);
  return ms;
}

std::vector<int> sensed_familiar(const Scenario& s, const Point2& x, const std::vector<int>& mode) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.familiar.size(); ++i) {
    const int idx = static_cast<int>(i);
    if (std::binary_search(mode.begin(), mode.end(), idx)) continue;
    if (distance_to_polygon(x, s.familiar[i].geometry) <= s.sensor.range) out.push_back(idx);
  }
  return out;
}

std::vector<LidarHit> lidar_scan(const Scenario& s, const Point2& x) {
  struct Target {
    const Polygon* poly;
    bool familiar;
    int id;
  };
  std::vector<Target> near;
  for (std::size_t i = 0; i < s.familiar.size(); ++i)
    if (distance_to_polygon(x, s.familiar[i].geometry) <= s.sensor.range)
      near.push_back({&s.familiar[i].geometry, true, static_cast<int>(i)});
  for (std::size_t i = 0; i < s.unknown.size(); ++i)
    if (distance_to_polygon(x, s.unknown[i]) <= s.sensor.range)
      near.push_back({&s.unknown[i], false, static_cast<int>(i)});

  const int n = s.sensor.rays;
  std::vector<LidarHit> hits(n);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    const Vec2 d(std::cos(a), std::sin(a));
    LidarHit& h = hits[k];
    h.range = s.sensor.range;
    for (const auto& t : near) {
      auto r = ray_cast(x, d, t.poly->vertices());
      if (r && *r <= h.range) {
        h.range = *r;
        h.hit = true;
        h.familiar = t.familiar;
        h.id = t.id;
      }
    }
    h.point = x + h.range * d;
  }
  return hits;
}

SensorReading sensor_scan(const Scenario& s, const Point2& x, const std::vector<int>& mode) {
  return {sensed_familiar(s, x, mode), lidar_scan(s, x)};
}

std::optional<std::vector<int>> guard_check(const std::vector<int>& mode, const Point2& x, const Scenario& s) {
  const auto fresh = sensed_familiar(s, x, mode);
  if (fresh.empty()) return std::nullopt;
  std::vector<int> out = mode;
  out.insert(out.end(), fresh.begin(), fresh.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Point2> lidar_filter(const std::vector<LidarHit>& hits, const MappedSpace&) {
  std::vector<Point2> out;
  for (const auto& h : hits)
    if (h.hit && !h.familiar) out.push_back(h.point);
  return out;
}

SemanticMapState instantiate(const SemanticMapState& state, const std::vector<int>& new_mode, const Scenario& s) {
  SemanticMapState out;
  out.mode = new_mode;
  std::sort(out.mode.begin(), out.mode.end());
  for (int idx : out.mode) {
    auto it = std::find(state.mode.begin(), state.mode.end(), idx);
    if (it != state.mode.end())
      out.dilated.push_back(state.dilated[it - state.mode.begin()]);
    else
      out.dilated.push_back(dilate(s.familiar[idx].geometry, s.robot.radius));
  }
  return out;
}

FullMap instantiate_all(const Scenario& s) {
  FullMap m;
  std::vector<int> all;
  for (std::size_t i = 0; i < s.familiar.size(); ++i) all.push_back(static_cast<int>(i));
  m.semantic = instantiate(SemanticMapState{}, all, s);
  m.mapped = mapped_space_recovery(m.semantic, s);
  m.snap = build_snapshot(m.mapped.components, m.semantic.mode, s.diffeo);
  return m;
}

double physical_clearance(const Scenario& s, const Point2& x) {
  double d = distance_to_hull_boundary(x, s.enclosing_workspace);
  for (const auto& f : s.familiar) {
    const double q = point_in_polygon(x, f.geometry, 0.0) == Location::kOutside
                         ? distance_to_polygon(x, f.geometry)
                         : -distance_to_boundary(x, f.geometry.vertices());
    d = std::min(d, q);
  }
  for (const auto& u : s.unknown) {
    const double q = point_in_polygon(x, u, 0.0) == Location::kOutside ? distance_to_polygon(x, u)
                                                                        : -distance_to_boundary(x, u.vertices());
    d = std::min(d, q);
  }
  return d - s.robot.radius;
}

std::vector<ValidationIssue> validate_scenario(const Scenario& s) {
  std::vector<ValidationIssue> issues;
  auto add = [&](const std::string& kind, const std::string& detail) { issues.push_back({kind, detail}); };
  const double r = s.robot.radius;

  auto name_unknown = [](std::size_t i) { return "unknown[" + std::to_string(i) + "]"; };
  auto name_familiar = [&](std::size_t i) {
    return "familiar[" + std::to_string(i) + "] (" + s.familiar[i].cls + ")";
  };

  for (std::size_t i = 0; i < s.unknown.size(); ++i) {
    for (std::size_t j = i + 1; j < s.unknown.size(); ++j) {
      const double g = polygon_distance(s.unknown[i], s.unknown[j]);
      if (g <= 2 * r) {
        std::ostringstream os;
        os << name_unknown(i) << " and " << name_unknown(j) << " are " << g << " m apart, need > " << 2 * r;
        add("unknown_separation", os.str());
      }
    }
    double wall = std::numeric_limits<double>::infinity();
    for (const auto& v : s.unknown[i].vertices()) wall = std::min(wall, distance_to_hull_boundary(v, s.enclosing_workspace));
    if (wall <= 2 * r) {
      std::ostringstream os;
      os << name_unknown(i) << " is " << wall << " m from the workspace boundary, need > " << 2 * r;
      add("unknown_separation", os.str());
    }
    for (std::size_t j = 0; j < s.familiar.size(); ++j) {
      const double g = polygon_distance(s.unknown[i], s.familiar[j].geometry);
      const double need = 2 * r + s.familiar[j].clearance;
      if (g <= need) {
        std::ostringstream os;
        os << name_familiar(j) << " and " << name_unknown(i) << " are " << g << " m apart, need > " << need;
        add("unknown_near_familiar", os.str());
      }
    }
  }

  auto check_point = [&](const Point2& p, const std::string& what) {
    if (point_in_polygon(p, s.workspace, 0.0) == Location::kOutside || physical_clearance(s, p) <= 0)
      add("freespace", what + " is not in the freespace");
  };
  check_point(s.robot.goal, "goal");
  check_point(s.robot.start, "start");
  for (std::size_t i = 0; i < s.starts.size(); ++i) check_point(s.starts[i].x, "starts[" + std::to_string(i) + "]");

  for (std::size_t i = 0; i < s.familiar.size(); ++i) {
    try {
      const auto tri = ear_clip(s.familiar[i].geometry);
      const double a = s.familiar[i].geometry.area();
      for (std::size_t t = 0; t < tri.triangles.size(); ++t)
        if (tri.triangle(t).area() < geom_eps() * a) add("sliver", name_familiar(i) + " has a sliver triangle");
    } catch (const Error& e) {
      add("triangulation", name_familiar(i) + ": " + e.what());
    }
  }

  try {
    (void)instantiate_all(s);
  } catch (const Error& e) {
    const std::string kind = e.code() == ErrorCode::kTopologyError ? "topology" : "collar";
    add(kind, e.what());
  }
  return issues;
}

}  // namespace semnav
