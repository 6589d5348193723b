#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include "dock/harbor_geometry.hpp"

namespace dock::geom {
namespace {

constexpr double kAreaTol = 1e-9;    // residual intersection area [m^2]
constexpr double kSeedMargin = 1e-9; // clearance kept around the seed
constexpr double kDepthTol = 1e-9;   // minimum useful cut depth [m]

struct Cut {
  Eigen::Vector2d a;
  double b;
};

struct TriRef {
  int obstacle;
  int tri;
};

struct Candidate {
  double distance;  // perpendicular distance from the seed to the edge line
  bool diagonal;
  double depth;
  int obstacle;
  int tri;
  int edge;
  Cut cut;
};

// The edge line closest to the seed wins, mirroring how a pilot reasons
// about the nearest quay face; ties prefer real obstacle edges over
// triangulation diagonals, then deeper cuts, then enumeration order.
bool better(const Candidate& x, const Candidate& y) {
  if (x.distance != y.distance) return x.distance < y.distance;
  if (x.diagonal != y.diagonal) return y.diagonal;
  if (x.depth != y.depth) return x.depth > y.depth;
  return std::tie(x.obstacle, x.tri, x.edge) <
         std::tie(y.obstacle, y.tri, y.edge);
}

std::vector<Point> clip_by_cuts(std::vector<Point> poly,
                                const std::vector<Cut>& cuts) {
  for (const Cut& c : cuts) {
    poly = clip_polygon_halfplane(poly, c.a, c.b);
    if (poly.size() < 3) return {};
  }
  return poly;
}

double depth_on(const std::vector<Point>& region, const Cut& cut) {
  double d = -1e300;
  for (const Point& v : region) d = std::max(d, cut.a.dot(v) - cut.b);
  return d;
}

}  // namespace

ConvexRegion extract_convex_region(const HarborMap& map, const Point& position,
                                   int edge_budget) {
  for (const Polygon& obst : map.obstacles) {
    if (obst.contains(position)) {
      throw PositionInsideObstacleError(
          "position lies inside obstacle " +
          (obst.name.empty() ? std::string("<unnamed>") : obst.name));
    }
  }
  if (!map.bounds.contains(position)) {
    throw EmptyRegionError("position lies outside the world bounds");
  }

  std::vector<std::vector<std::array<int, 3>>> tris;
  tris.reserve(map.obstacles.size());
  for (const Polygon& obst : map.obstacles) tris.push_back(triangulate(obst));

  std::vector<Cut> cuts = {
      {{1.0, 0.0}, map.bounds.north_max},
      {{-1.0, 0.0}, -map.bounds.north_min},
      {{0.0, 1.0}, map.bounds.east_max},
      {{0.0, -1.0}, -map.bounds.east_min},
  };
  std::vector<Point> region = {
      Point(map.bounds.north_min, map.bounds.east_min),
      Point(map.bounds.north_max, map.bounds.east_min),
      Point(map.bounds.north_max, map.bounds.east_max),
      Point(map.bounds.north_min, map.bounds.east_max),
  };

  auto edge_candidate = [&](const TriRef& tr, int e) -> std::optional<Candidate> {
    const auto& ring = map.obstacles[tr.obstacle].vertices;
    const int n = static_cast<int>(ring.size());
    const auto& t = tris[tr.obstacle][tr.tri];
    const int i = t[e];
    const int j = t[(e + 1) % 3];
    const Point& p = ring[i];
    const Eigen::Vector2d d = ring[j] - p;
    const double len = d.norm();
    if (len < 1e-12) return std::nullopt;
    // Inward normal of a counter-clockwise ring; the triangle lies in
    // {a.x >= b}, so keeping {a.x <= b} carves it away.
    Candidate c;
    c.cut.a = Eigen::Vector2d(-d[1], d[0]) / len;
    c.cut.b = c.cut.a.dot(p);
    c.distance = c.cut.b - c.cut.a.dot(position);
    if (c.distance < kSeedMargin) return std::nullopt;
    c.depth = depth_on(region, c.cut);
    if (c.depth <= kDepthTol) return std::nullopt;
    c.diagonal = (j != (i + 1) % n);
    c.obstacle = tr.obstacle;
    c.tri = tr.tri;
    c.edge = e;
    return c;
  };

  auto apply = [&](const Cut& cut) {
    region = clip_polygon_halfplane(region, cut.a, cut.b);
    if (region.size() < 3 ||
        std::abs(polygon_signed_area(region)) < kAreaTol) {
      throw EmptyRegionError("free-space region collapsed during carving");
    }
    cuts.push_back(cut);
  };

  // One conservative cut that pushes the whole remaining intersection of one
  // obstacle out of the region, used once the edge budget is spent.
  auto separating_cut = [&](int obstacle,
                            const std::vector<TriRef>& active)
      -> std::optional<Cut> {
    std::vector<Point> pts;
    for (const TriRef& tr : active) {
      if (tr.obstacle != obstacle) continue;
      const auto& ring = map.obstacles[tr.obstacle].vertices;
      const auto& t = tris[tr.obstacle][tr.tri];
      auto poly = clip_by_cuts({ring[t[0]], ring[t[1]], ring[t[2]]}, cuts);
      pts.insert(pts.end(), poly.begin(), poly.end());
    }
    if (pts.empty()) return std::nullopt;
    const Point* nearest = &pts.front();
    for (const Point& p : pts) {
      if ((p - position).squaredNorm() < (*nearest - position).squaredNorm()) {
        nearest = &p;
      }
    }
    const double dist = (*nearest - position).norm();
    if (dist < 1e-9) return std::nullopt;
    Cut cut;
    cut.a = (*nearest - position) / dist;
    cut.b = 1e300;
    for (const Point& p : pts) cut.b = std::min(cut.b, cut.a.dot(p));
    if (cut.a.dot(position) > cut.b - kSeedMargin) return std::nullopt;
    return cut;
  };

  int obstacle_cuts = 0;
  for (int guard = 0;; ++guard) {
    if (guard > 1000) {
      throw EmptyRegionError("region carving did not terminate");
    }

    std::vector<TriRef> active;
    for (int o = 0; o < static_cast<int>(map.obstacles.size()); ++o) {
      const auto& ring = map.obstacles[o].vertices;
      for (int t = 0; t < static_cast<int>(tris[o].size()); ++t) {
        const auto& tri = tris[o][t];
        auto poly =
            clip_by_cuts({ring[tri[0]], ring[tri[1]], ring[tri[2]]}, cuts);
        if (!poly.empty() && std::abs(polygon_signed_area(poly)) > kAreaTol) {
          active.push_back({o, t});
        }
      }
    }
    if (active.empty()) break;

    if (obstacle_cuts >= edge_budget) {
      if (auto cut = separating_cut(active.front().obstacle, active)) {
        apply(*cut);
        ++obstacle_cuts;
        continue;
      }
    }

    std::optional<Candidate> best;
    for (const TriRef& tr : active) {
      for (int e = 0; e < 3; ++e) {
        if (auto c = edge_candidate(tr, e)) {
          if (!best || better(*c, *best)) best = *c;
        }
      }
    }
    if (!best) {
      throw EmptyRegionError(
          "no admissible separating edge; position is pinched against an "
          "obstacle");
    }
    apply(best->cut);
    ++obstacle_cuts;
  }

  // Drop rows the final polygon never touches, then near-duplicates.
  std::vector<Cut> kept;
  for (const Cut& c : cuts) {
    if (depth_on(region, c) > -1e-9) kept.push_back(c);
  }
  std::vector<Cut> unique;
  for (const Cut& c : kept) {
    bool dup = false;
    for (const Cut& u : unique) {
      if ((u.a - c.a).norm() < 1e-9 && std::abs(u.b - c.b) < 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(c);
  }

  std::sort(unique.begin(), unique.end(), [](const Cut& x, const Cut& y) {
    const double ax = std::atan2(x.a[1], x.a[0]);
    const double ay = std::atan2(y.a[1], y.a[0]);
    if (ax != ay) return ax < ay;
    return x.b < y.b;
  });

  ConvexRegion out;
  out.A.resize(static_cast<int>(unique.size()), 2);
  out.b.resize(static_cast<int>(unique.size()));
  for (int i = 0; i < static_cast<int>(unique.size()); ++i) {
    out.A.row(i) = unique[i].a.transpose();
    out.b[i] = unique[i].b;
  }

  if (!region_contains(out, position, 0.0)) {
    throw EmptyRegionError("carved region does not contain the position");
  }
  return out;
}

}  // namespace dock::geom
