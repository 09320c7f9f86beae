#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rfcharge {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Rectangular region whose opposite borders are glued together.
struct Area {
  double width = 500.0;
  double height = 500.0;

  void validate() const;
  bool contains(const Point& p) const {
    return p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < height;
  }
  double diagonal() const;
  /// Maps any point back into [0, width) x [0, height).
  Point wrap(Point p) const;
};

/// Shortest displacement from `from` to `to` on the torus.
Point torus_delta(const Point& from, const Point& to, const Area& area);

/// Minimum over the nine periodic images. Throws std::domain_error when a
/// point lies outside the area.
double torus_distance(const Point& a, const Point& b, const Area& area);

struct StraussConfig {
  std::size_t n_points = 30;
  double interaction_radius = 50.0;  // m
  double interaction_gamma = 0.3;
  std::uint64_t seed = 1;
  std::size_t burn_in_sweeps = 10'000;  // one sweep = n_points proposals

  void validate() const;
};

/// Fixed-count Strauss process on the torus: density proportional to
/// gamma^(number of pairs closer than the interaction radius), sampled by
/// Metropolis-Hastings with uniform single-point relocation. gamma = 0 is a
/// hard-core process; throws std::runtime_error if the initial packing fails.
std::vector<Point> sample_strauss(const StraussConfig& cfg, const Area& area);

/// Number of unordered pairs with torus distance < radius.
std::size_t close_pair_count(const std::vector<Point>& points, double radius,
                             const Area& area);

/// CSV with columns id, x_m, y_m.
std::string points_csv(const std::vector<Point>& points);

}  // namespace rfcharge
