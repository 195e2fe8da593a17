#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semnav/diffeo.hpp"
#include "semnav/geometry.hpp"
#include "semnav/params.hpp"

namespace semnav {

struct FamiliarPlacement {
  std::string cls;
  Pose2 pose;
  double clearance = 0.3;
  Polygon geometry;  // physical placement
  bool intrusion = false;  // generated from a workspace concavity
};

struct RobotSpec {
  double radius = 0.2;
  RobotType type = RobotType::kFullyActuated;
  Point2 start = Point2::Zero();
  double start_psi = 0.0;
  Point2 goal = Point2::Zero();
};

struct SensorSpec {
  double range = 5.0;
  double model_range = 4.0;
  int rays = 360;
};

struct StartPose {
  Point2 x = Point2::Zero();
  double psi = 0.0;
};

struct Scenario {
  std::string name;
  double epsilon = 1e-9;
  Polygon workspace;
  std::map<std::string, Polygon> catalogue;
  std::vector<FamiliarPlacement> familiar;
  std::vector<Polygon> unknown;
  RobotSpec robot;
  SensorSpec sensor;
  ControllerParams controller;
  DiffeoParams diffeo;
  int obstacle_power = 20;
  EpisodeConfig episode;
  std::vector<StartPose> starts;

  // Derived when the scenario is finalized.
  ConvexPolygon enclosing_workspace;
  ConvexPolygon enclosing_freespace;
};

// Parses the JSON scenario format documented in README.md. Throws ParseError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
// Computes enclosing workspace/freespace and adds workspace intrusions as familiar obstacles.
void finalize_scenario(Scenario& s);

// Convex hull of the workspace shrunk by the robot radius.
ConvexPolygon erode_convex(const ConvexPolygon& c, double r);

struct ValidationIssue {
  std::string kind;
  std::string detail;
};
// Unknown-obstacle separation, hole-producing unions, collar admissibility.
std::vector<ValidationIssue> validate_scenario(const Scenario& s);

struct SemanticMapState {
  std::vector<int> mode;  // sorted familiar indices
  std::vector<Polygon> dilated;  // parallel to mode
};

struct MappedSpace {
  std::vector<FamiliarComponent> components;
  ConvexPolygon enclosing_freespace;
  std::vector<int> dset() const;
  std::vector<int> bset() const;
};

MappedSpace mapped_space_recovery(const SemanticMapState& semantic, const Scenario& s);

struct LidarHit {
  Point2 point;
  double range = 0.0;
  bool hit = false;
  bool familiar = false;
  int id = -1;
};

struct SensorReading {
  std::vector<int> new_familiar;
  std::vector<LidarHit> lidar;
};

std::vector<int> sensed_familiar(const Scenario& s, const Point2& x, const std::vector<int>& mode);
std::vector<LidarHit> lidar_scan(const Scenario& s, const Point2& x);
SensorReading sensor_scan(const Scenario& s, const Point2& x, const std::vector<int>& mode);
std::optional<std::vector<int>> guard_check(const std::vector<int>& mode, const Point2& x, const Scenario& s);
// Hits on unknown obstacles, passed through unchanged.
std::vector<Point2> lidar_filter(const std::vector<LidarHit>& hits, const MappedSpace& mapped);

SemanticMapState instantiate(const SemanticMapState& state, const std::vector<int>& new_mode, const Scenario& s);

// Every familiar obstacle instantiated at once.
struct FullMap {
  SemanticMapState semantic;
  MappedSpace mapped;
  DiffeoSnapshot snap;
};
FullMap instantiate_all(const Scenario& s);

// Distance from the robot's disk to the nearest ground-truth obstacle or wall
// (negative when overlapping).
double physical_clearance(const Scenario& s, const Point2& x);

}  // namespace semnav
