#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dock/vessel_types.hpp"

namespace dock::geom {

/// 2-D point in the earth frame, (north, east) in metres.
using Point = Eigen::Vector2d;

double polygon_signed_area(const std::vector<Point>& ring);

/// Even-odd test; points on the boundary count as inside.
bool point_in_polygon(const Point& q, const std::vector<Point>& ring);

bool segments_intersect(const Point& a0, const Point& a1, const Point& b0,
                        const Point& b1);

/// True when the two simple polygons share any point (touching counts).
bool polygons_intersect(const std::vector<Point>& p,
                        const std::vector<Point>& q);

/// Clips a polygon against the halfplane a.x <= b (Sutherland-Hodgman pass).
std::vector<Point> clip_polygon_halfplane(const std::vector<Point>& poly,
                                          const Eigen::Vector2d& a, double b);

struct Polygon {
  std::string name;
  std::vector<Point> vertices;  // simple ring, counter-clockwise

  double area() const { return polygon_signed_area(vertices); }
  bool contains(const Point& q) const { return point_in_polygon(q, vertices); }
};

/// Ear-clipping triangulation; returns index triples into polygon.vertices,
/// each counter-clockwise. Deterministic for a given input.
std::vector<std::array<int, 3>> triangulate(const Polygon& polygon);

struct WorldBounds {
  double north_min{0.0};
  double north_max{0.0};
  double east_min{0.0};
  double east_max{0.0};

  bool contains(const Point& p) const {
    return p[0] >= north_min && p[0] <= north_max && p[1] >= east_min &&
           p[1] <= east_max;
  }
};

struct MapLoadStats {
  int winding_fixes{0};
};

struct HarborMap {
  std::string name;
  WorldBounds bounds;
  std::vector<Polygon> obstacles;
  MapLoadStats stats;

  /// Checks simplicity, winding, vertex counts and bounds; throws
  /// std::invalid_argument with the offending polygon named.
  void validate() const;
};

/// Loads and validates a map. Inverted rings are fixed and counted in
/// stats.winding_fixes rather than rejected.
HarborMap load_map(const std::filesystem::path& file);

/// Convex vessel outline in the body frame, counter-clockwise, containing
/// the origin.
struct Footprint {
  std::vector<Point> vertices;

  static Footprint rectangle(double length, double width);
};

/// Footprint corners in the earth frame for a given pose; order preserved.
std::vector<Point> footprint_vertices(const model::Pose& pose,
                                      const Footprint& footprint);

/// Intersection of halfplanes a_i . p <= b_i with unit-norm rows, sorted by
/// row angle. Always bounded (world bounds participate) and non-empty.
struct ConvexRegion {
  Eigen::Matrix<double, Eigen::Dynamic, 2> A;
  Eigen::VectorXd b;

  int rows() const { return static_cast<int>(b.size()); }
};

bool region_contains(const ConvexRegion& region, const Point& p,
                     double slack = 0.0);

class PositionInsideObstacleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class EmptyRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carves an obstacle-free convex region around `position` out of the world
/// box by greedy halfplane cuts along obstacle (triangle) edges, taking the
/// edge line closest to `position` first. The budget caps the cuts spent in
/// the greedy phase; if obstacles still intersect the
/// region afterwards, one conservative separating cut per remaining obstacle
/// is tried before falling back to further greedy cuts, so the result is
/// obstacle-free in all cases, possibly with more than `edge_budget` rows on
/// adversarial maps. Throws PositionInsideObstacleError when `position` is
/// not strictly outside every obstacle and EmptyRegionError when the carve
/// collapses.
ConvexRegion extract_convex_region(const HarborMap& map, const Point& position,
                                   int edge_budget = 8);

}  // namespace dock::geom
