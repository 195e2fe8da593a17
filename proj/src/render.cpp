#include "semnav/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

#include "semnav/errors.hpp"

namespace semnav {

void RenderSpec::validate() const {
  if (resolution < 8) throw Error(ErrorCode::kValidation, "render resolution must be at least 8");
  if (!physical && !mapped && !model) throw Error(ErrorCode::kValidation, "nothing to render");
}

namespace {

class Canvas {
 public:
  explicit Canvas(const Polygon& frame) {
    std::tie(lo_, hi_) = frame.bbox();
    const double pad = 0.05 * std::max(hi_.x() - lo_.x(), hi_.y() - lo_.y());
    lo_ -= Vec2(pad, pad);
    hi_ += Vec2(pad, pad);
    scale_ = kWidth / (hi_.x() - lo_.x());
    height_ = scale_ * (hi_.y() - lo_.y());
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height_
        << "\" viewBox=\"0 0 " << kWidth << ' ' << height_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  double sx(double x) const { return (x - lo_.x()) * scale_; }
  double sy(double y) const { return height_ - (y - lo_.y()) * scale_; }
  double len(double d) const { return d * scale_; }

  void polygon(const std::vector<Point2>& v, const std::string& fill, const std::string& stroke, double opacity = 1.0) {
    os_ << "<polygon points=\"";
    for (const auto& p : v) os_ << sx(p.x()) << ',' << sy(p.y()) << ' ';
    os_ << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"" << stroke
        << "\" stroke-width=\"1\"/>\n";
  }

  void polyline(const std::vector<Point2>& v, const std::string& stroke) {
    os_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : v) os_ << sx(p.x()) << ',' << sy(p.y()) << ' ';
    os_ << "\"/>\n";
  }

  void circle(const Point2& c, double r, const std::string& fill, const std::string& stroke = "none") {
    os_ << "<circle cx=\"" << sx(c.x()) << "\" cy=\"" << sy(c.y()) << "\" r=\"" << len(r) << "\" fill=\"" << fill
        << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void rect(const Point2& corner, double w, double h, const std::string& fill) {
    os_ << "<rect x=\"" << sx(corner.x()) << "\" y=\"" << sy(corner.y() + h) << "\" width=\"" << len(w)
        << "\" height=\"" << len(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  static constexpr double kWidth = 640.0;
  Point2 lo_, hi_;
  double scale_ = 1.0, height_ = 1.0;
  std::ostringstream os_;
};

std::string color_for(int i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};
  return palette[i % 7];
}

// Blue (low) to red (high) for t in [0, 1].
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
  const int g = static_cast<int>(255 * (1 - std::abs(2 * t - 1)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_world_svg(const Scenario& s, const std::vector<const Trajectory*>& trajectories,
                             const MappedSpace* mapped, const DiffeoSnapshot* snap) {
  Canvas c(s.enclosing_workspace);
  c.polygon(s.enclosing_workspace.vertices(), "#f4f4f4", "#444");
  c.polygon(s.enclosing_freespace.vertices(), "none", "#999");
  if (mapped) {
    for (const auto& comp : mapped->components) {
      for (const auto& pd : comp.tree.purge) c.polygon(pd.collar, "#ffd54f", "#e0a800", 0.15);
      c.polygon(comp.geometry.vertices(), "#b0bec5", "#546e7a", 0.8);
    }
  }
  if (snap)
    for (const auto& d : snap->model_disks) c.circle(d.center, d.radius, "none", "#6a1b9a");
  for (const auto& f : s.familiar) c.polygon(f.geometry.vertices(), f.intrusion ? "#444" : "#37474f", "#000");
  for (const auto& u : s.unknown) c.polygon(u.vertices(), "#8d6e63", "#000");
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    std::vector<Point2> pts;
    for (const auto& smp : trajectories[i]->samples) pts.push_back(smp.x);
    if (pts.empty()) continue;
    c.polyline(pts, color_for(static_cast<int>(i)));
    c.circle(pts.front(), 0.04, color_for(static_cast<int>(i)));
  }
  c.circle(s.robot.goal, 0.08, "#2e7d32");
  return c.finish();
}

std::vector<GridSample> diffeo_grid(const Scenario& s, const DiffeoSnapshot& snap, int n) {
  if (n < 8) throw Error(ErrorCode::kValidation, "grid resolution must be at least 8");
  const auto [lo, hi] = s.enclosing_workspace.bbox();
  std::vector<GridSample> out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      GridSample g;
      g.x = Point2(lo.x() + (i + 0.5) / n * (hi.x() - lo.x()), lo.y() + (j + 0.5) / n * (hi.y() - lo.y()));
      g.det = std::numeric_limits<double>::quiet_NaN();
      g.phi = Point2::Constant(std::numeric_limits<double>::quiet_NaN());
      if (point_in_polygon(g.x, s.enclosing_freespace, 0.0) != Location::kOutside && !in_mapped_obstacle(snap, g.x)) {
        try {
          const auto d = diffeo_jacobian(snap, g.x, false);
          g.det = d.J.determinant();
          g.phi = d.value;
        } catch (const Error&) {
        }
      }
      out.push_back(g);
    }
  }
  return out;
}

std::string render_logdet_svg(const Scenario& s, const std::vector<GridSample>& grid, int n) {
  Canvas c(s.enclosing_workspace);
  const auto [lo, hi] = s.enclosing_workspace.bbox();
  const double w = (hi.x() - lo.x()) / n, h = (hi.y() - lo.y()) / n;
  double mn = 0.0, mx = 0.0;
  for (const auto& g : grid)
    if (std::isfinite(g.det) && g.det > 0) {
      mn = std::min(mn, std::log10(g.det));
      mx = std::max(mx, std::log10(g.det));
    }
  const double span = std::max(mx - mn, 1e-12);
  for (const auto& g : grid) {
    const Point2 corner = g.x - Vec2(0.5 * w, 0.5 * h);
    if (!std::isfinite(g.det) || g.det <= 0) {
      c.rect(corner, w, h, "#222");
      continue;
    }
    c.rect(corner, w, h, ramp((std::log10(g.det) - mn) / span));
  }
  for (const auto& f : s.familiar) c.polygon(f.geometry.vertices(), "none", "#000");
  return c.finish();
}

}  // namespace semnav
