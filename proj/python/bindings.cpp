#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "rfcharge/config.hpp"
#include "rfcharge/deployment.hpp"
#include "rfcharge/feasibility.hpp"
#include "rfcharge/linkbudget.hpp"
#include "rfcharge/mobility.hpp"
#include "rfcharge/simengine.hpp"

namespace py = pybind11;
using namespace rfcharge;

namespace {

py::dict row_dict(const FeasibilityRow& r) {
  py::dict d;
  d["label"] = r.label;
  d["band_hz"] = r.band.center_frequency();
  d["mode"] = mode_name(r.mode);
  d["wavelength_m"] = r.band.wavelength();
  d["energy_radius_m"] = r.energy_radius;
  d["harvested_uw"] = r.harvested_power_at_ref * 1e6;
  d["replenishment_pct"] = r.replenishment_rate;
  d["positive_range_m"] = r.energy_positive_range;
  if (r.support_time) {
    d["support_time_min"] = *r.support_time / 60.0;
  } else {
    d["support_time_min"] = py::none();
  }
  return d;
}

py::list feasibility(double consumed_uw, double autonomy_min, bool apply_efficiency) {
  ConsumptionProfile profile;
  profile.consumed_power = consumed_uw / 1e6;
  profile.autonomy_target = autonomy_min * 60.0;
  FeasibilityOptions options;
  options.apply_efficiency = apply_efficiency;
  py::list out;
  for (const auto& r :
       feasibility_table(default_band_plan(), default_modes(), {}, {}, profile, options)) {
    out.append(row_dict(r));
  }
  return out;
}

py::dict reference_check() {
  const auto cmp = compare_with_reference(feasibility_table(default_band_plan(), default_modes()));
  py::dict d;
  d["max_rel_deviation"] = cmp.max_rel_deviation;
  d["max_support_time_deviation"] = cmp.max_support_time_deviation;
  d["na_mismatches"] = cmp.na_mismatches;
  d["failures"] = cmp.failures;
  d["within_tolerance"] = cmp.within(0.01, 0.02);
  return d;
}

py::dict simulate(const std::map<std::string, std::string>& settings) {
  ScenarioConfig cfg;
  apply_config(cfg, KeyValues(settings.begin(), settings.end()));
  SimMetrics m;
  {
    py::gil_scoped_release release;
    m = run_simulation(cfg);
  }
  py::dict d;
  d["discharge_rates_w"] = m.discharge_rates;
  d["andot_mean"] = m.andot_mean;
  d["andot_std"] = m.andot_std;
  d["outage_events"] = m.outage_events;
  d["mean_outage_duration_s"] = m.mean_outage_duration;
  d["receiving_fraction"] = m.receiving_fraction;
  d["user_collection_rates_w"] = m.user_collection_rates;
  d["replications"] = m.replications;
  d["regulatory_violations"] = m.audit.violations();
  d["max_active_beams"] = m.audit.max_active_beams;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rfcharge, m) {
  m.doc() = "RF wireless charging of wearables from small base stations";

  m.def("dbm_to_watt", &dbm_to_watt, py::arg("dbm"));
  m.def("watt_to_dbm", &watt_to_dbm, py::arg("watt"));
  m.def("wavelength", [](double hz) { return RadioBand(hz).wavelength(); }, py::arg("hz"));
  m.def("received_power", &received_power, py::arg("p_tx"), py::arg("g_tx"), py::arg("g_rx"),
        py::arg("wavelength"), py::arg("distance"));
  m.def("energy_radius", &energy_radius, py::arg("p_tx"), py::arg("g_tx"), py::arg("g_rx"),
        py::arg("wavelength"), py::arg("sensitivity"));
  m.def("max_conducted_power", [](double gain_dbi) { return max_conducted_power(gain_dbi); },
        py::arg("gain_dbi"));
  m.def("off_axis_factor", &off_axis_factor, py::arg("n_elements"), py::arg("phi"));
  m.def("max_beams", [] { return RegulatoryRule{}.max_beams(); });

  m.def("feasibility_table", &feasibility, py::arg("consumed_uw") = 5.0,
        py::arg("autonomy_min") = 10.0, py::arg("apply_efficiency") = false,
        "One dict per (band, antenna mode) of the default band plan.");
  m.def("reference_check", &reference_check,
        "Deviation of the default table from the published reference values.");

  m.def("torus_distance",
        [](std::pair<double, double> a, std::pair<double, double> b, double width,
           double height) {
          return torus_distance({a.first, a.second}, {b.first, b.second}, Area{width, height});
        },
        py::arg("a"), py::arg("b"), py::arg("width") = 500.0, py::arg("height") = 500.0);
  m.def("sample_strauss",
        [](std::size_t n, double radius, double gamma, std::uint64_t seed,
           std::size_t burn_in) {
          const auto pts = sample_strauss({n, radius, gamma, seed, burn_in}, Area{});
          std::vector<std::pair<double, double>> out;
          for (const auto& p : pts) out.emplace_back(p.x, p.y);
          return out;
        },
        py::arg("n") = 30, py::arg("radius") = 50.0, py::arg("gamma") = 0.3,
        py::arg("seed") = 1, py::arg("burn_in") = 10'000);

  m.def("fgn", [](double hurst, std::size_t n, double sigma,
                  std::uint64_t seed) { return fgn_increments(hurst, n, sigma, seed).samples; },
        py::arg("hurst"), py::arg("n"), py::arg("sigma") = 1.0, py::arg("seed") = 1);
  m.def("levy_step_lengths",
        [](double alpha, std::size_t n, double scale, std::uint64_t seed) {
          std::vector<double> out;
          for (const auto& s : levy_steps(alpha, n, scale, seed, Area{}.diagonal())) {
            out.push_back(s.length);
          }
          return out;
        },
        py::arg("alpha"), py::arg("n"), py::arg("scale") = 3.0 / 3.6, py::arg("seed") = 1);

  m.def("config_keys", &config_keys);
  m.def("simulate", &simulate, py::arg("settings") = std::map<std::string, std::string>{},
        "Runs the simulation with `section.key` overrides (string values) and returns "
        "summary metrics.");
}
