#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "rfcharge/deployment.hpp"

using namespace rfcharge;
using doctest::Approx;

namespace {

double brute_torus(const Point& a, const Point& b, const Area& area) {
  double best = INFINITY;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const double dx = b.x + i * area.width - a.x;
      const double dy = b.y + j * area.height - a.y;
      best = std::min(best, std::hypot(dx, dy));
    }
  }
  return best;
}

double mean_pairs(double gamma, int seeds, std::size_t n = 30, double r = 50.0,
                  std::size_t burn = 300) {
  const Area area;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    StraussConfig cfg{n, r, gamma, static_cast<std::uint64_t>(1000 + s), burn};
    total += static_cast<double>(close_pair_count(sample_strauss(cfg, area), r, area));
  }
  return total / seeds;
}

}  // namespace

TEST_CASE("torus distance") {
  const Area area;
  CHECK(torus_distance({0, 0}, {499, 0}, area) == Approx(1.0));
  CHECK(torus_distance({3, 4}, {3, 4}, area) == 0.0);
  CHECK(torus_distance({0, 0}, {250, 250}, area) == Approx(353.55).epsilon(1e-4));
  CHECK(torus_distance({0, 0}, {250, 250}, area) == Approx(250.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(torus_distance({-1, 0}, {0, 0}, area), std::domain_error);
  CHECK_THROWS_AS(torus_distance({0, 0}, {500, 0}, area), std::domain_error);

  std::mt19937_64 rng(1);
  const Area rect{300.0, 120.0};
  std::uniform_real_distribution<double> ux(0.0, rect.width), uy(0.0, rect.height);
  for (int i = 0; i < 2000; ++i) {
    const Point a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
    const double d = torus_distance(a, b, rect);
    CHECK(d == Approx(brute_torus(a, b, rect)));
    CHECK(d == Approx(torus_distance(b, a, rect)));
    CHECK(d <= std::hypot(a.x - b.x, a.y - b.y) + 1e-12);
    const Point delta = torus_delta(a, b, rect);
    CHECK(std::hypot(delta.x, delta.y) == Approx(d));
  }
}

TEST_CASE("area wrap") {
  const Area area{100.0, 50.0};
  CHECK(area.wrap({-1.0, 51.0}) == Point{99.0, 1.0});
  CHECK(area.wrap({100.0, 0.0}) == Point{0.0, 0.0});
  CHECK(area.wrap({-1e-18, 0.0}).x < 100.0);
  CHECK(area.diagonal() == Approx(std::hypot(100.0, 50.0)));
  CHECK_THROWS(Area{0.0, 1.0}.validate());
}

TEST_CASE("strauss output cardinality and determinism") {
  const Area area;
  StraussConfig cfg;
  cfg.burn_in_sweeps = 500;
  const auto a = sample_strauss(cfg, area);
  CHECK(a.size() == cfg.n_points);
  for (const auto& p : a) CHECK(area.contains(p));
  CHECK(sample_strauss(cfg, area) == a);
  cfg.seed = 2;
  CHECK(sample_strauss(cfg, area) != a);

  cfg.n_points = 0;
  CHECK(sample_strauss(cfg, area).empty());
  cfg.n_points = 1;
  CHECK(sample_strauss(cfg, area).size() == 1);
}

TEST_CASE("strauss hard core") {
  const Area area;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    StraussConfig cfg{15, 50.0, 0.0, seed, 200};
    const auto pts = sample_strauss(cfg, area);
    CHECK(pts.size() == 15);
    CHECK(close_pair_count(pts, 50.0, area) == 0);
  }
  // 500 disks of radius 25 m cannot be packed into 500 x 500 m
  StraussConfig dense{500, 50.0, 0.0, 1, 10};
  CHECK_THROWS_AS(sample_strauss(dense, area), std::runtime_error);
}

TEST_CASE("strauss interaction reduces close pairs") {
  // Binomial expectation: C(n,2) * pi r^2 / A on the torus.
  const double expected_uniform = 30.0 * 29.0 / 2.0 * M_PI * 2500.0 / 250000.0;
  const double p1 = mean_pairs(1.0, 200);
  const double p03 = mean_pairs(0.3, 200);
  const double p0 = mean_pairs(0.0, 50);
  CHECK(p1 == Approx(expected_uniform).epsilon(0.1));
  CHECK(p03 < p1);
  CHECK(p0 <= p03);
  CHECK(p0 == 0.0);
}

TEST_CASE("strauss config validation") {
  const Area area;
  StraussConfig cfg;
  cfg.interaction_gamma = 1.5;
  CHECK_THROWS(sample_strauss(cfg, area));
  cfg.interaction_gamma = -0.1;
  CHECK_THROWS(sample_strauss(cfg, area));
}

TEST_CASE("points csv") {
  CHECK(points_csv({{1.5, 2.0}, {3.0, 4.25}}) == "id,x_m,y_m\n0,1.5,2\n1,3,4.25\n");
}
