#include "dock/harbor_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

namespace {

using namespace dock;
using geom::Point;

const std::filesystem::path kDataDir = DOCK_DATA_DIR;

std::vector<Point> unit_square() {
  return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
}

TEST(PolygonArea, SignedByWinding) {
  EXPECT_DOUBLE_EQ(geom::polygon_signed_area(unit_square()), 1.0);
  auto cw = unit_square();
  std::reverse(cw.begin(), cw.end());
  EXPECT_DOUBLE_EQ(geom::polygon_signed_area(cw), -1.0);
  EXPECT_DOUBLE_EQ(
      geom::polygon_signed_area({{0.0, 0.0}, {4.0, 0.0}, {0.0, 3.0}}), 6.0);
}

TEST(PointInPolygon, SquareCases) {
  const auto sq = unit_square();
  EXPECT_TRUE(geom::point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(geom::point_in_polygon({1.5, 0.5}, sq));
  EXPECT_FALSE(geom::point_in_polygon({-0.001, 0.5}, sq));
  EXPECT_TRUE(geom::point_in_polygon({0.0, 0.5}, sq));  // boundary is inside
  EXPECT_TRUE(geom::point_in_polygon({0.0, 0.0}, sq));  // vertex too
}

TEST(PointInPolygon, NonConvexRing) {
  // L-shape: the notch must be outside
  const std::vector<Point> ell = {{0, 0}, {4, 0}, {4, 4}, {3, 4},
                                  {3, 1}, {0, 1}};
  EXPECT_TRUE(geom::point_in_polygon({0.5, 0.5}, ell));
  EXPECT_TRUE(geom::point_in_polygon({3.5, 3.0}, ell));
  EXPECT_FALSE(geom::point_in_polygon({1.0, 2.0}, ell));
}

TEST(Segments, IntersectionCases) {
  EXPECT_TRUE(
      geom::segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
  EXPECT_FALSE(
      geom::segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  // shared endpoint counts
  EXPECT_TRUE(
      geom::segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));
  // collinear overlap
  EXPECT_TRUE(
      geom::segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
}

TEST(PolygonsIntersect, TouchingCounts) {
  const auto a = unit_square();
  std::vector<Point> b = {{2, 2}, {3, 2}, {3, 3}, {2, 3}};
  EXPECT_FALSE(geom::polygons_intersect(a, b));
  std::vector<Point> c = {{1, 0}, {2, 0}, {2, 1}, {1, 1}};  // shares an edge
  EXPECT_TRUE(geom::polygons_intersect(a, c));
  std::vector<Point> d = {{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75},
                          {0.25, 0.75}};  // fully contained
  EXPECT_TRUE(geom::polygons_intersect(a, d));
}

TEST(ClipHalfplane, AreaNeverGrows) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto poly = unit_square();
    Eigen::Vector2d a{dist(rng), dist(rng)};
    if (a.norm() < 1e-6) continue;
    a.normalize();
    const double b = dist(rng);
    const auto clipped = geom::clip_polygon_halfplane(poly, a, b);
    if (clipped.size() >= 3) {
      const double area = geom::polygon_signed_area(clipped);
      EXPECT_GE(area, -1e-12);
      EXPECT_LE(area, 1.0 + 1e-12);
      for (const auto& p : clipped) EXPECT_LE(a.dot(p), b + 1e-9);
    }
  }
}

TEST(ClipHalfplane, ExactHalfSquare) {
  const auto clipped =
      geom::clip_polygon_halfplane(unit_square(), {1.0, 0.0}, 0.5);
  ASSERT_GE(clipped.size(), 3u);
  EXPECT_NEAR(geom::polygon_signed_area(clipped), 0.5, 1e-12);
}

TEST(Triangulate, CoversPolygonArea) {
  geom::Polygon ell;
  ell.vertices = {{0, 0}, {4, 0}, {4, 4}, {3, 4}, {3, 1}, {0, 1}};
  const auto tris = geom::triangulate(ell);
  EXPECT_EQ(tris.size(), ell.vertices.size() - 2);
  double area = 0.0;
  for (const auto& t : tris) {
    std::vector<Point> tri = {ell.vertices[t[0]], ell.vertices[t[1]],
                              ell.vertices[t[2]]};
    const double a = geom::polygon_signed_area(tri);
    EXPECT_GT(a, 0.0);  // counter-clockwise triangles
    area += a;
  }
  EXPECT_NEAR(area, ell.area(), 1e-12);
}

TEST(Footprint, RectangleCorners) {
  const auto fp = geom::Footprint::rectangle(5.0, 2.8);
  ASSERT_EQ(fp.vertices.size(), 4u);
  double max_x = 0.0, max_y = 0.0;
  for (const auto& v : fp.vertices) {
    max_x = std::max(max_x, std::abs(v[0]));
    max_y = std::max(max_y, std::abs(v[1]));
  }
  EXPECT_DOUBLE_EQ(max_x, 2.5);
  EXPECT_DOUBLE_EQ(max_y, 1.4);
  EXPECT_GT(geom::polygon_signed_area(fp.vertices), 0.0);
  EXPECT_NEAR(geom::polygon_signed_area(fp.vertices), 14.0, 1e-12);
}

TEST(Footprint, WorldVerticesFollowPose) {
  const auto fp = geom::Footprint::rectangle(5.0, 2.8);
  const model::Pose pose{100.0, 50.0, model::kPi / 2.0};
  const auto w = geom::footprint_vertices(pose, fp);
  ASSERT_EQ(w.size(), 4u);
  // body (2.5, 1.4) lands at (100 - 1.4, 50 + 2.5) under a 90 degree turn
  bool found = false;
  for (const auto& p : w) {
    if (std::abs(p[0] - 98.6) < 1e-9 && std::abs(p[1] - 52.5) < 1e-9)
      found = true;
  }
  EXPECT_TRUE(found);
}

TEST(MapLoad, HarborBasin) {
  const auto map = geom::load_map(kDataDir / "maps/harbor_basin.json");
  EXPECT_EQ(map.name, "harbor_basin");
  ASSERT_EQ(map.obstacles.size(), 2u);
  EXPECT_EQ(map.stats.winding_fixes, 0);
  EXPECT_DOUBLE_EQ(map.obstacles[0].area(), 800.0);
  EXPECT_DOUBLE_EQ(map.obstacles[1].area(), 100.0);
  EXPECT_NO_THROW(map.validate());
}

TEST(MapLoad, FixesClockwiseRings) {
  const auto file = std::filesystem::temp_directory_path() / "cw_map.json";
  {
    std::ofstream out(file);
    out << R"({"bounds": {"north_min": 0, "north_max": 10,
                          "east_min": 0, "east_max": 10},
               "obstacles": [{"vertices": [[2,2],[2,4],[4,4],[4,2]]}]})";
  }
  const auto map = geom::load_map(file);
  EXPECT_EQ(map.stats.winding_fixes, 1);
  EXPECT_GT(map.obstacles[0].area(), 0.0);
  std::filesystem::remove(file);
}

TEST(MapLoad, RejectsGarbage) {
  const auto file = std::filesystem::temp_directory_path() / "bad_map.json";
  auto write = [&](const char* body) {
    std::ofstream out(file);
    out << body;
  };
  write(R"({"obstacles": []})");  // no bounds
  EXPECT_THROW(geom::load_map(file), std::invalid_argument);
  write(R"({"bounds": {"north_min": 0, "north_max": 10, "east_min": 0,
            "east_max": 10}, "obstacles": [{"vertices": [[0,0],[1,0]]}]})");
  EXPECT_THROW(geom::load_map(file), std::invalid_argument);
  std::filesystem::remove(file);
}

TEST(ConvexRegion, RowsAreUnitNormAndSorted) {
  const auto map = geom::load_map(kDataDir / "maps/harbor_basin.json");
  const auto region = geom::extract_convex_region(map, {28.0, 34.0});
  ASSERT_GT(region.rows(), 0);
  double prev = -10.0;
  for (int i = 0; i < region.rows(); ++i) {
    EXPECT_NEAR(region.A.row(i).norm(), 1.0, 1e-12);
    const double ang = std::atan2(region.A(i, 1), region.A(i, 0));
    EXPECT_GE(ang, prev - 1e-12);
    prev = ang;
  }
  EXPECT_TRUE(geom::region_contains(region, {28.0, 34.0}));
}

TEST(ConvexRegion, ObstacleFreeBySampling) {
  const auto map = geom::load_map(kDataDir / "maps/harbor_basin.json");
  const Point seeds[] = {{28.0, 34.0}, {58.0, 10.0}, {10.0, 0.0}, {30.0, 60.0}};
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> un(0.0, 120.0);
  std::uniform_real_distribution<double> ue(-30.0, 80.0);
  for (const auto& seed : seeds) {
    const auto region = geom::extract_convex_region(map, seed);
    int tested = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point p{un(rng), ue(rng)};
      if (!geom::region_contains(region, p)) continue;
      ++tested;
      EXPECT_TRUE(map.bounds.contains(p));
      for (const auto& obstacle : map.obstacles) {
        EXPECT_FALSE(obstacle.contains(p))
            << "seed (" << seed.transpose() << "), point (" << p.transpose()
            << ")";
      }
    }
    EXPECT_GT(tested, 100);  // the region is not degenerate
  }
}

TEST(ConvexRegion, DeterministicAcrossCalls) {
  const auto map = geom::load_map(kDataDir / "maps/harbor_basin.json");
  const auto r1 = geom::extract_convex_region(map, {28.0, 34.0});
  const auto r2 = geom::extract_convex_region(map, {28.0, 34.0});
  ASSERT_EQ(r1.rows(), r2.rows());
  EXPECT_EQ((r1.A - r2.A).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((r1.b - r2.b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ConvexRegion, SeedInsideObstacleThrows) {
  const auto map = geom::load_map(kDataDir / "maps/harbor_basin.json");
  EXPECT_THROW(geom::extract_convex_region(map, {65.0, 10.0}),
               geom::PositionInsideObstacleError);
}

TEST(ConvexRegion, RandomMapsStayObstacleFree) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(5.0, 95.0);
  std::uniform_real_distribution<double> size(2.0, 12.0);
  for (int trial = 0; trial < 20; ++trial) {
    geom::HarborMap map;
    map.bounds = {0.0, 100.0, 0.0, 100.0};
    for (int k = 0; k < 4; ++k) {
      const double cn = dist(rng), ce = dist(rng);
      const double hn = size(rng) / 2.0, he = size(rng) / 2.0;
      geom::Polygon box;
      box.vertices = {{cn - hn, ce - he},
                      {cn + hn, ce - he},
                      {cn + hn, ce + he},
                      {cn - hn, ce + he}};
      map.obstacles.push_back(box);
    }
    Point seed;
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      seed = {dist(rng), dist(rng)};
      found = true;
      for (const auto& o : map.obstacles) {
        if (o.contains(seed)) found = false;
      }
    }
    if (!found) continue;
    const auto region = geom::extract_convex_region(map, seed);
    EXPECT_TRUE(geom::region_contains(region, seed));
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
      const Point p{u(rng), u(rng)};
      if (!geom::region_contains(region, p)) continue;
      for (const auto& o : map.obstacles) {
        EXPECT_FALSE(o.contains(p));
      }
    }
  }
}

}  // namespace
