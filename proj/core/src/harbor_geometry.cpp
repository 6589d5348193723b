#include "dock/harbor_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "dock/vessel_model.hpp"

namespace dock::geom {
namespace {

using nlohmann::json;

constexpr double kOnSegmentTol = 1e-12;

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool on_segment(const Point& q, const Point& a, const Point& b) {
  const double len = (b - a).norm();
  if (len < kOnSegmentTol) return (q - a).norm() < kOnSegmentTol;
  const double c = cross2(a, b, q);
  if (std::abs(c) > kOnSegmentTol * std::max(1.0, len * len)) return false;
  const double t = (q - a).dot(b - a) / (len * len);
  return t >= -kOnSegmentTol && t <= 1.0 + kOnSegmentTol;
}

[[noreturn]] void fail_map(const std::string& msg) {
  throw std::invalid_argument("harbor map: " + msg);
}

}  // namespace

double polygon_signed_area(const std::vector<Point>& ring) {
  const int n = static_cast<int>(ring.size());
  double twice = 0.0;
  for (int i = 0; i < n; ++i) {
    const Point& p = ring[i];
    const Point& q = ring[(i + 1) % n];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * twice;
}

bool point_in_polygon(const Point& q, const std::vector<Point>& ring) {
  const int n = static_cast<int>(ring.size());
  for (int i = 0; i < n; ++i) {
    if (on_segment(q, ring[i], ring[(i + 1) % n])) return true;
  }
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    const bool straddles = (a[1] > q[1]) != (b[1] > q[1]);
    if (straddles &&
        q[0] < (b[0] - a[0]) * (q[1] - a[1]) / (b[1] - a[1]) + a[0]) {
      inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(const Point& a0, const Point& a1, const Point& b0,
                        const Point& b1) {
  const double d1 = cross2(b0, b1, a0);
  const double d2 = cross2(b0, b1, a1);
  const double d3 = cross2(a0, a1, b0);
  const double d4 = cross2(a0, a1, b1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return on_segment(a0, b0, b1) || on_segment(a1, b0, b1) ||
         on_segment(b0, a0, a1) || on_segment(b1, a0, a1);
}

bool polygons_intersect(const std::vector<Point>& p,
                        const std::vector<Point>& q) {
  for (const Point& v : p) {
    if (point_in_polygon(v, q)) return true;
  }
  for (const Point& v : q) {
    if (point_in_polygon(v, p)) return true;
  }
  const int np = static_cast<int>(p.size());
  const int nq = static_cast<int>(q.size());
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < nq; ++j) {
      if (segments_intersect(p[i], p[(i + 1) % np], q[j], q[(j + 1) % nq])) {
        return true;
      }
    }
  }
  return false;
}

std::vector<Point> clip_polygon_halfplane(const std::vector<Point>& poly,
                                          const Eigen::Vector2d& a, double b) {
  std::vector<Point> out;
  const int n = static_cast<int>(poly.size());
  out.reserve(poly.size() + 1);
  for (int i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % n];
    const double fc = a.dot(cur) - b;
    const double fn = a.dot(nxt) - b;
    if (fc <= 0.0) {
      out.push_back(cur);
      if (fn > 0.0) out.push_back(cur + (nxt - cur) * (fc / (fc - fn)));
    } else if (fn <= 0.0) {
      out.push_back(cur + (nxt - cur) * (fc / (fc - fn)));
    }
  }
  return out;
}

std::vector<std::array<int, 3>> triangulate(const Polygon& polygon) {
  const auto& pts = polygon.vertices;
  std::vector<int> ring(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) ring[i] = static_cast<int>(i);

  std::vector<std::array<int, 3>> tris;
  int guard = static_cast<int>(pts.size() * pts.size()) + 16;
  while (ring.size() > 3 && guard-- > 0) {
    bool clipped = false;
    const int m = static_cast<int>(ring.size());
    for (int i = 0; i < m; ++i) {
      const int ia = ring[(i + m - 1) % m];
      const int ib = ring[i];
      const int ic = ring[(i + 1) % m];
      const double c = cross2(pts[ia], pts[ib], pts[ic]);
      if (c <= 1e-12) continue;  // reflex or collinear
      bool blocked = false;
      for (int j : ring) {
        if (j == ia || j == ib || j == ic) continue;
        if (cross2(pts[ia], pts[ib], pts[j]) >= -1e-12 &&
            cross2(pts[ib], pts[ic], pts[j]) >= -1e-12 &&
            cross2(pts[ic], pts[ia], pts[j]) >= -1e-12) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      tris.push_back({ia, ib, ic});
      ring.erase(ring.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) {
      // Numerically stuck (near-degenerate ring): clip the widest corner.
      int best = 0;
      double best_c = -1e300;
      for (int i = 0; i < m; ++i) {
        const double c = cross2(pts[ring[(i + m - 1) % m]], pts[ring[i]],
                                pts[ring[(i + 1) % m]]);
        if (c > best_c) {
          best_c = c;
          best = i;
        }
      }
      tris.push_back({ring[(best + m - 1) % m], ring[best],
                      ring[(best + 1) % m]});
      ring.erase(ring.begin() + best);
    }
  }
  if (ring.size() == 3) tris.push_back({ring[0], ring[1], ring[2]});
  return tris;
}

void HarborMap::validate() const {
  if (bounds.north_max <= bounds.north_min ||
      bounds.east_max <= bounds.east_min) {
    fail_map("world bounds are empty");
  }
  for (const Polygon& poly : obstacles) {
    const std::string tag = poly.name.empty() ? "<unnamed>" : poly.name;
    const auto& v = poly.vertices;
    const int n = static_cast<int>(v.size());
    if (n < 3) fail_map("polygon " + tag + " has fewer than 3 vertices");
    for (int i = 0; i < n; ++i) {
      if ((v[i] - v[(i + 1) % n]).norm() < 1e-9) {
        fail_map("polygon " + tag + " has duplicate consecutive vertices");
      }
      if (!bounds.contains(v[i])) {
        fail_map("polygon " + tag + " leaves the world bounds");
      }
    }
    if (polygon_signed_area(v) <= 1e-9) {
      fail_map("polygon " + tag + " must be counter-clockwise with area > 0");
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // Skip edge pairs that share a vertex.
        if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
        if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
          fail_map("polygon " + tag + " self-intersects");
        }
      }
    }
  }
}

HarborMap load_map(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail_map("cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail_map(file.string() + ": " + e.what());
  }

  for (const auto& item : j.items()) {
    static const std::set<std::string> kTop = {"name", "bounds", "obstacles"};
    if (!kTop.count(item.key())) {
      fail_map("unknown key \"" + item.key() + "\"");
    }
  }
  if (!j.contains("bounds") || !j.contains("obstacles")) {
    fail_map("missing bounds or obstacles");
  }

  HarborMap map;
  map.name = j.value("name", std::string{});

  const json& jb = j["bounds"];
  for (const auto& item : jb.items()) {
    static const std::set<std::string> kBounds = {"north_min", "north_max",
                                                  "east_min", "east_max"};
    if (!kBounds.count(item.key())) {
      fail_map("unknown key \"" + item.key() + "\" in bounds");
    }
  }
  map.bounds.north_min = jb.at("north_min").get<double>();
  map.bounds.north_max = jb.at("north_max").get<double>();
  map.bounds.east_min = jb.at("east_min").get<double>();
  map.bounds.east_max = jb.at("east_max").get<double>();

  for (const json& jp : j.at("obstacles")) {
    for (const auto& item : jp.items()) {
      static const std::set<std::string> kPoly = {"name", "vertices"};
      if (!kPoly.count(item.key())) {
        fail_map("unknown key \"" + item.key() + "\" in obstacle");
      }
    }
    Polygon poly;
    poly.name = jp.value("name", std::string{});
    for (const json& jv : jp.at("vertices")) {
      if (!jv.is_array() || jv.size() != 2) {
        fail_map("vertices must be [north, east] pairs");
      }
      poly.vertices.push_back(Point(jv[0].get<double>(), jv[1].get<double>()));
    }
    if (poly.vertices.size() >= 3 &&
        polygon_signed_area(poly.vertices) < 0.0) {
      std::reverse(poly.vertices.begin(), poly.vertices.end());
      ++map.stats.winding_fixes;
    }
    map.obstacles.push_back(std::move(poly));
  }

  map.validate();
  return map;
}

Footprint Footprint::rectangle(double length, double width) {
  const double hl = 0.5 * length;
  const double hw = 0.5 * width;
  Footprint f;
  f.vertices = {Point(hl, -hw), Point(hl, hw), Point(-hl, hw), Point(-hl, -hw)};
  return f;
}

std::vector<Point> footprint_vertices(const model::Pose& pose,
                                      const Footprint& footprint) {
  const Eigen::Matrix2d r = model::rotation_matrix2(pose.heading);
  std::vector<Point> out;
  out.reserve(footprint.vertices.size());
  for (const Point& v : footprint.vertices) {
    out.push_back(r * v + pose.position());
  }
  return out;
}

bool region_contains(const ConvexRegion& region, const Point& p,
                     double slack) {
  if (region.rows() == 0) return true;
  return ((region.A * p - region.b).maxCoeff() <= slack);
}

}  // namespace dock::geom
