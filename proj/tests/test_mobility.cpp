#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "rfcharge/mobility.hpp"

using namespace rfcharge;
using doctest::Approx;

namespace {

double rho(double h, double k) {
  return 0.5 * (std::pow(k + 1, 2 * h) - 2 * std::pow(k, 2 * h) + std::pow(std::abs(k - 1), 2 * h));
}

double lag_cov(const std::vector<double>& x, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i + k < x.size(); ++i) s += x[i] * x[i + k];
  return s / static_cast<double>(x.size() - k);
}

double hill(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(v[i] / v[k]);
  return static_cast<double>(k) / s;
}

double net_displacement(const MobilityConfig& cfg, std::uint64_t seed) {
  // unwrap by following the shortest torus step
  const Area area{1e6, 1e6};
  const auto t = build_trajectory(cfg, 1000.0, area, seed);
  const auto& p = t.positions;
  return std::hypot(torus_delta(p.front(), p.back(), area).x,
                    torus_delta(p.front(), p.back(), area).y);
}

}  // namespace

TEST_CASE("fgn lag-1 correlation") {
  for (auto [h, target] : {std::pair{0.5, 0.0}, {0.9, 0.7411}, {0.1, -0.4257}}) {
    CHECK(rho(h, 1) == Approx(target).epsilon(1e-3));
    const auto r = fgn_increments(h, 1 << 16, 1.0, 17);
    CHECK(r.method == FgnMethod::DaviesHarte);
    REQUIRE(r.samples.size() == (1u << 16));
    const double c0 = lag_cov(r.samples, 0);
    const double c1 = lag_cov(r.samples, 1) / c0;
    if (h == 0.5) {
      CHECK(std::abs(c1) <= 3.0 / std::sqrt(65536.0));
    } else {
      CHECK(c1 == Approx(target).epsilon(0.02 / std::abs(target)));
    }
  }
}

TEST_CASE("fgn autocovariance over replications") {
  const std::size_t n = 4096;
  const int reps = 40;
  for (double h : {0.1, 0.5, 0.9}) {
    FgnGenerator gen(h, n);
    Rng rng(99);
    std::vector<std::vector<double>> est(11);
    for (int r = 0; r < reps / 2; ++r) {
      const auto [a, b] = gen.sample_pair(rng, 2.0);
      for (std::size_t k = 0; k <= 10; ++k) {
        est[k].push_back(lag_cov(a, k));
        est[k].push_back(lag_cov(b, k));
      }
    }
    for (std::size_t k = 0; k <= 10; ++k) {
      const double mean = std::accumulate(est[k].begin(), est[k].end(), 0.0) / reps;
      double ss = 0.0;
      for (double x : est[k]) ss += (x - mean) * (x - mean);
      const double se = std::sqrt(ss / (reps - 1) / reps);
      CHECK(std::abs(mean - 4.0 * rho(h, static_cast<double>(k))) <= 4.0 * se);
    }
  }
}

TEST_CASE("hosking recursion matches the target covariance") {
  FgnGenerator gen(0.8, 256, FgnMethod::Hosking);
  CHECK(gen.method() == FgnMethod::Hosking);
  Rng rng(5);
  const int reps = 400;
  std::vector<double> c0, c1, c3;
  for (int r = 0; r < reps; ++r) {
    const auto x = gen.sample(rng, 1.0);
    c0.push_back(lag_cov(x, 0));
    c1.push_back(lag_cov(x, 1));
    c3.push_back(lag_cov(x, 3));
  }
  auto check = [&](const std::vector<double>& v, double target) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / reps;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(std::abs(mean - target) <= 4.0 * std::sqrt(ss / (reps - 1) / reps));
  };
  check(c0, 1.0);
  check(c1, rho(0.8, 1));
  check(c3, rho(0.8, 3));
}

TEST_CASE("fgn input validation and determinism") {
  CHECK_THROWS(fgn_increments(0.0, 10, 1.0, 1));
  CHECK_THROWS(fgn_increments(1.0, 10, 1.0, 1));
  CHECK_THROWS(fgn_increments(0.5, 0, 1.0, 1));
  CHECK(fgn_increments(0.3, 1, 1.0, 1).samples.size() == 1);
  CHECK(fgn_increments(0.7, 1000, 1.0, 3).samples == fgn_increments(0.7, 1000, 1.0, 3).samples);
  CHECK(fgn_increments(0.7, 1000, 1.0, 3).samples != fgn_increments(0.7, 1000, 1.0, 4).samples);
}

TEST_CASE("levy steps") {
  const double diag = Area{}.diagonal();
  const auto steps = levy_steps(1.5, 100000, 3.0 / 3.6, 7, diag);
  REQUIRE(steps.size() == 100000);
  std::vector<double> len;
  double sx = 0.0, sy = 0.0;
  for (const auto& s : steps) {
    len.push_back(s.length);
    CHECK(s.heading >= 0.0);
    CHECK(s.heading < 2.0 * std::numbers::pi);
    CHECK(s.length <= diag);
    sx += std::cos(s.heading);
    sy += std::sin(s.heading);
  }
  const double alpha = hill(len, 1000);
  CHECK(alpha >= 1.35);
  CHECK(alpha <= 1.65);
  CHECK(std::hypot(sx, sy) / 1e5 <= 3.0 / std::sqrt(1e5));
  CHECK_THROWS(levy_steps(2.5, 10, 1.0, 1, diag));
  CHECK_THROWS(levy_steps(1.0, 10, 1.0, 1, diag));
}

TEST_CASE("levy mean step length") {
  // sample mean of a heavy-tailed law converges slowly; average several seeds
  double total = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& s : levy_steps(1.5, 100000, 2.0, seed, 707.1)) total += s.length;
    count += 100000;
  }
  CHECK(total / static_cast<double>(count) == Approx(2.0).epsilon(0.02));
}

TEST_CASE("truncated pareto lower cutoff") {
  const double xm = truncated_pareto_min(1.5, 1.0, 1000.0);
  const double a = 1.5, L = 1000.0;
  const double mean = a * std::pow(xm, a) / (1 - std::pow(xm / L, a)) *
                      (std::pow(xm, 1 - a) - std::pow(L, 1 - a)) / (a - 1);
  CHECK(mean == Approx(1.0).epsilon(1e-9));
  // untruncated limit: mean = alpha xm / (alpha - 1)
  CHECK(truncated_pareto_min(1.5, 1.0, 1e12) == Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK_THROWS(truncated_pareto_min(1.5, 10.0, 5.0));
}

TEST_CASE("trajectory shape") {
  const Area area;
  MobilityConfig cfg;
  auto t = build_trajectory(cfg, 1.0, area, 1);
  CHECK(t.positions.size() == 2);
  t = build_trajectory(cfg, 1000.0, area, 1);
  CHECK(t.positions.size() == 1001);
  for (const auto& p : t.positions) CHECK(area.contains(p));
  CHECK(build_trajectory(cfg, 1000.0, area, 1).positions == t.positions);
  CHECK(build_trajectory(cfg, 1000.0, area, 2).positions != t.positions);
  CHECK_THROWS(build_trajectory(cfg, 0.5, area, 1));

  cfg.model = LevyModel{1.5};
  t = build_trajectory(cfg, 5000.0, area, 3);
  CHECK(t.positions.size() == 5001);
  for (const auto& p : t.positions) CHECK(area.contains(p));

  cfg.model = FbmModel{1.2};
  CHECK_THROWS(build_trajectory(cfg, 10.0, area, 1));
  cfg.model = LevyModel{2.0};
  CHECK_THROWS(build_trajectory(cfg, 10.0, area, 1));
}

TEST_CASE("speed normalization") {
  const Area area;
  for (double h : {0.1, 0.5, 0.9}) {
    MobilityConfig cfg;
    cfg.model = FbmModel{h};
    const auto t = build_trajectory(cfg, 1e5, area, 11);
    CHECK(mean_speed(t) == Approx(3.0 / 3.6).epsilon(0.02));
  }
  // a single 1e5-step Levy path has ~1.3% spread; pool a few users
  MobilityConfig cfg;
  cfg.model = LevyModel{1.5};
  TrajectoryBuilder builder(cfg, 1e5, area);
  double path = 0.0;
  for (std::uint64_t u = 0; u < 10; ++u) path += builder.build(u).path_length;
  CHECK(path / 1e6 == Approx(3.0 / 3.6).epsilon(0.02));
}

TEST_CASE("persistent motion travels farther") {
  MobilityConfig a, b;
  a.model = FbmModel{0.9};
  b.model = FbmModel{0.5};
  double da = 0.0, db = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    da += net_displacement(a, s);
    db += net_displacement(b, s);
  }
  CHECK(da > 2.0 * db);
}

TEST_CASE("trajectory csv") {
  Trajectory t;
  t.positions = {{1, 2}, {3, 4}};
  CHECK(trajectories_csv({t}) == "t_s,user_id,x_m,y_m\n0,0,1,2\n1,0,3,4\n");
  CHECK(model_name(FbmModel{0.9}) == "fbm(H=0.9)");
  CHECK(model_name(LevyModel{1.5}) == "levy(alpha=1.5)");
}
