#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rfcharge/linkbudget.hpp"

using namespace rfcharge;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double friis(double p, double gt, double gr, double lambda, double d) {
  const double f = lambda / (4.0 * kPi * d);
  return p * gt * gr * f * f;
}

}  // namespace

TEST_CASE("dBm conversions") {
  CHECK(dbm_to_watt(30.0) == Approx(1.0).epsilon(1e-15));
  CHECK(dbm_to_watt(-20.0) == Approx(1e-5).epsilon(1e-14));
  CHECK(dbm_to_watt(28.0) == Approx(std::pow(10.0, 2.8) / 1000.0).epsilon(1e-14));
  CHECK(dbm_to_watt(28.0) == Approx(0.63096).epsilon(1e-5));
  CHECK(db_to_linear(14.51) == Approx(std::pow(10.0, 1.451)));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-120.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::abs(watt_to_dbm(dbm_to_watt(x)) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }

  CHECK_THROWS_AS(watt_to_dbm(0.0), std::domain_error);
  CHECK_THROWS_AS(watt_to_dbm(-1.0), std::domain_error);
  CHECK_THROWS_AS(dbm_to_watt(NAN), std::domain_error);
  CHECK_THROWS_AS(dbm_to_watt(INFINITY), std::domain_error);
}

TEST_CASE("radio band wavelength") {
  const RadioBand b(915e6);
  CHECK(b.wavelength() == 299'792'458.0 / 915e6);
  CHECK(b.wavelength() == Approx(0.3277).epsilon(1e-3));
  CHECK_THROWS(RadioBand(0.0));
  CHECK_THROWS(RadioBand(-1.0));
}

TEST_CASE("received power") {
  CHECK(received_power(1.0, 1.6406, 1.0, 0.3277, 10.0) == Approx(11.17e-6).epsilon(0.01));
  CHECK(received_power(0.631, 28.25, 1.0, 0.3277, 10.0) == Approx(121.4e-6).epsilon(0.01));

  const double lambda = 0.1234;
  CHECK(received_power(2.5, 1.0, 1.0, lambda, lambda / (4.0 * kPi)) == Approx(2.5));
  CHECK(received_power(1.3, 2.0, 1.5, lambda, 7.0) == Approx(friis(1.3, 2.0, 1.5, lambda, 7.0)));

  CHECK_THROWS_AS(received_power(1.0, 1.0, 1.0, lambda, 0.0), std::domain_error);
  CHECK_THROWS_AS(received_power(1.0, 1.0, 1.0, lambda, -2.0), std::domain_error);
  CHECK_THROWS_AS(received_power(0.0, 1.0, 1.0, lambda, 2.0), std::domain_error);
}

TEST_CASE("received power falls as inverse square") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double p = u(rng), g = u(rng), lam = u(rng) * 0.01, d = u(rng);
    const double a = received_power(p, g, 1.0, lam, d);
    const double b = received_power(p, g, 1.0, lam, 2.0 * d);
    CHECK(b == Approx(a / 4.0).epsilon(1e-13));
    CHECK(b < a);
  }
}

TEST_CASE("energy radius") {
  CHECK(energy_radius(1.0, 1.6406, 1.0, 0.3277, 1e-5) == Approx(10.57).epsilon(0.01));
  CHECK(energy_radius(0.631, 28.25, 1.0, 0.3277, 1e-5) == Approx(34.85).epsilon(0.01));
  CHECK(energy_radius(0.7, 3.0, 1.0, 0.2, 0.7 * 3.0) == Approx(0.2 / (4.0 * kPi)));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = std::pow(10.0, lg(rng));
    const double gt = std::pow(10.0, lg(rng) / 2);
    const double gr = std::pow(10.0, lg(rng) / 2);
    const double lam = std::pow(10.0, lg(rng) / 3 - 1);
    const double s = std::pow(10.0, lg(rng) - 5);
    const double r = energy_radius(p, gt, gr, lam, s);
    worst = std::max(worst, std::abs(received_power(p, gt, gr, lam, r) - s) / s);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("regulatory power limit") {
  const RegulatoryRule rule;
  CHECK(max_conducted_power(2.15, rule) == Approx(1.0));
  CHECK(max_conducted_power(6.0, rule) == Approx(1.0));
  CHECK(max_conducted_power(14.51, rule) == Approx(std::pow(10.0, -0.2)));
  CHECK(max_conducted_power(14.51, rule) == Approx(0.631).epsilon(1e-3));
  CHECK(max_conducted_power(-10.0, rule) == Approx(1.0));

  RegulatoryRule cont = rule;
  cont.step_mode = StepMode::Continuous;
  CHECK(max_conducted_power(14.51, cont) == Approx(std::pow(10.0, -8.51 / 30.0)));

  RegulatoryRule one = rule;
  one.reduction_variant = ReductionVariant::OneDbPerOneDbi;
  CHECK(max_conducted_power(14.51, one) == Approx(std::pow(10.0, -0.8)));

  for (const auto& r : {rule, cont, one}) {
    double prev = max_conducted_power(-5.0, r);
    for (double g = -5.0; g <= 30.0; g += 0.01) {
      const double p = max_conducted_power(g, r);
      CHECK(p <= prev + 1e-15);
      prev = p;
    }
  }
}

TEST_CASE("beam cap") {
  const RegulatoryRule rule;
  CHECK(rule.max_beams() == 6);
  RegulatoryRule r10 = rule;
  r10.aggregate_headroom_db = 10.0;
  CHECK(r10.max_beams() == 10);
  RegulatoryRule r0 = rule;
  r0.aggregate_headroom_db = 0.0;
  CHECK(r0.max_beams() == 1);
  RegulatoryRule bad = rule;
  bad.aggregate_headroom_db = -1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("off-axis factor") {
  CHECK(off_axis_factor(3, 0.0) == 1.0);
  CHECK(off_axis_factor(5, 0.0) == 1.0);
  CHECK(off_axis_factor(1, 1.234) == 1.0);
  CHECK(off_axis_factor(3, kPi / 3) == Approx(4.0 / 9.0));
  CHECK(off_axis_factor(3, kPi / 3) == Approx(0.4444).epsilon(1e-4));
  for (double phi = -2.0 * kPi; phi <= 2.0 * kPi; phi += 0.013) {
    const double f = off_axis_factor(3, phi);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f == Approx(off_axis_factor(3, -phi)));
    if (std::abs(std::sin(phi / 2)) > 1e-6) {
      const double ref = std::sin(1.5 * phi) / (3.0 * std::sin(phi / 2));
      CHECK(f == Approx(ref * ref));
    }
  }
  // continuity at the boresight limit
  CHECK(off_axis_factor(3, 1e-9) == Approx(1.0));
}

TEST_CASE("aggregate beam capping") {
  const RegulatoryRule rule;
  const double cap = std::pow(10.0, 0.8);
  CHECK(aggregate_power_cap(1.0, rule) == Approx(cap));

  const std::vector<double> six(6, 1.0);
  CHECK(cap_aggregate_beams(six, 1.0, rule) == six);

  const std::vector<double> seven(7, 1.0);
  const auto out7 = cap_aggregate_beams(seven, 1.0, rule);
  REQUIRE(out7.size() == 7);
  for (int i = 0; i < 6; ++i) CHECK(out7[i] == 1.0);
  CHECK(out7[6] == 0.0);

  const std::vector<double> one{0.5};
  CHECK(cap_aggregate_beams(one, 1.0, rule) == one);

  // 3 dB of headroom leaves room for a single beam
  RegulatoryRule tight = rule;
  tight.aggregate_headroom_db = 3.0;
  CHECK(cap_aggregate_beams(std::vector<double>{0.4, 2.0}, 1.0, tight) ==
        std::vector<double>{0.4, 0.0});
  CHECK(cap_aggregate_beams(std::vector<double>{2.0, 0.5, 3.0}, 1.0, rule) ==
        std::vector<double>{1.0, 0.5, 1.0});

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_int_distribution<int> nb(0, 12);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> req(static_cast<std::size_t>(nb(rng)));
    for (auto& x : req) x = u(rng);
    const double limit = 0.631;
    const auto out = cap_aggregate_beams(req, limit, rule);
    REQUIRE(out.size() == req.size());
    double sum = 0.0;
    int nonzero = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      CHECK(out[k] >= 0.0);
      CHECK(out[k] <= req[k] + 1e-15);
      CHECK(out[k] <= limit + 1e-15);
      sum += out[k];
      nonzero += out[k] > 0.0;
    }
    CHECK(nonzero <= 6);
    CHECK(sum <= limit * cap + 1e-12);
  }
}

TEST_CASE("antenna modes") {
  const AntennaMode omni = OmniAntenna{};
  const AntennaMode dir = DirectionalArray{};
  CHECK_FALSE(is_directional(omni));
  CHECK(is_directional(dir));
  CHECK(transmit_gain_dbi(omni) == 2.15);
  CHECK(transmit_gain_dbi(dir) == 14.51);
  CHECK(mode_name(omni) == "omni");
  CHECK(mode_name(dir) == "directional");
  CHECK_NOTHROW(validate(dir));
  CHECK_THROWS(validate(AntennaMode{DirectionalArray{0}}));
  CHECK_THROWS(validate(AntennaMode{DirectionalArray{3, 2.15, 14.51, 0.0}}));
  CHECK_THROWS(validate(AntennaMode{DirectionalArray{3, 2.15, 14.51, 7.0}}));
  CHECK_THROWS(validate(AntennaMode{OmniAntenna{NAN}}));
}

TEST_CASE("receiver config validation") {
  ReceiverConfig rx;
  CHECK_NOTHROW(rx.validate());
  rx.sensitivity = 0.0;
  CHECK_THROWS(rx.validate());
  rx = {};
  rx.conversion_efficiency = 1.5;
  CHECK_THROWS(rx.validate());
}
