#include "rfcharge/feasibility.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rfcharge/format.hpp"

namespace rfcharge {

void ConsumptionProfile::validate() const {
  if (!(consumed_power > 0.0)) throw std::invalid_argument("consumed_power must be > 0");
  if (!(autonomy_target > 0.0)) throw std::invalid_argument("autonomy_target must be > 0");
}

std::vector<BandEntry> default_band_plan() {
  return {
      {"915 MHz", RadioBand(915e6)},   {"2.4 GHz", RadioBand(2441.75e6)},
      {"5.8 GHz", RadioBand(5800e6)},  {"850 MHz", RadioBand(850e6)},
      {"1.7 GHz", RadioBand(1700e6)},  {"2.1 GHz", RadioBand(2100e6)},
      {"1.9 GHz", RadioBand(1900e6)},  {"2.5 GHz", RadioBand(2500e6)},
  };
}

std::vector<AntennaMode> default_modes() { return {OmniAntenna{}, DirectionalArray{}}; }

double harvested_power_at(const RadioBand& band, const AntennaMode& mode,
                          const ReceiverConfig& rx, const RegulatoryRule& rule,
                          double d_ref, bool apply_efficiency) {
  const double gain_dbi = transmit_gain_dbi(mode);
  const double p = received_power(max_conducted_power(gain_dbi, rule),
                                  db_to_linear(gain_dbi), db_to_linear(rx.rx_gain_dbi),
                                  band.wavelength(), d_ref);
  return apply_efficiency ? p * rx.conversion_efficiency : p;
}

double replenishment_rate(double harvested, double consumed) {
  if (!(consumed > 0.0)) throw std::domain_error("consumed power must be > 0");
  return (harvested / consumed - 1.0) * 100.0;
}

double energy_positive_range(const RadioBand& band, const AntennaMode& mode,
                             const ReceiverConfig& rx, const RegulatoryRule& rule,
                             double consumed, bool apply_efficiency) {
  if (!(consumed > 0.0)) throw std::domain_error("consumed power must be > 0");
  constexpr double d_ref = 10.0;
  const double ph = harvested_power_at(band, mode, rx, rule, d_ref, apply_efficiency);
  return d_ref * std::sqrt(ph / consumed);
}

std::optional<double> support_time(double harvested, double consumed,
                                   double autonomy_target) {
  if (!(consumed > 0.0) || !(autonomy_target > 0.0) || !(harvested >= 0.0)) {
    throw std::domain_error("support_time inputs must be positive");
  }
  if (harvested <= consumed) return std::nullopt;
  return consumed * autonomy_target / (harvested - consumed);
}

std::vector<FeasibilityRow> feasibility_table(const std::vector<BandEntry>& bands,
                                              const std::vector<AntennaMode>& modes,
                                              const ReceiverConfig& rx,
                                              const RegulatoryRule& rule,
                                              const ConsumptionProfile& profile,
                                              const FeasibilityOptions& options) {
  if (bands.empty()) throw std::invalid_argument("band plan is empty");
  rx.validate();
  rule.validate();
  profile.validate();
  for (const auto& m : modes) validate(m);

  std::vector<FeasibilityRow> rows;
  rows.reserve(bands.size() * modes.size());
  for (const auto& entry : bands) {
    for (const auto& mode : modes) {
      const double gain_dbi = transmit_gain_dbi(mode);
      const double p_tx = max_conducted_power(gain_dbi, rule);
      const double eff = options.apply_efficiency ? rx.conversion_efficiency : 1.0;
      FeasibilityRow row{entry.label, entry.band, mode, 0.0, 0.0, 0.0, 0.0, 0.0, std::nullopt};
      row.array_side = entry.band.wavelength();
      row.energy_radius = energy_radius(p_tx * eff, db_to_linear(gain_dbi),
                                        db_to_linear(rx.rx_gain_dbi),
                                        entry.band.wavelength(), rx.sensitivity);
      row.harvested_power_at_ref =
          harvested_power_at(entry.band, mode, rx, rule, options.reference_distance,
                             options.apply_efficiency);
      row.replenishment_rate =
          replenishment_rate(row.harvested_power_at_ref, profile.consumed_power);
      row.energy_positive_range =
          options.reference_distance *
          std::sqrt(row.harvested_power_at_ref / profile.consumed_power);
      row.support_time = support_time(row.harvested_power_at_ref,
                                      profile.consumed_power, profile.autonomy_target);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const std::vector<ReferenceCell>& reference_table() {
  static const std::vector<ReferenceCell> table = {
      // 915 MHz
      {10.57, 11.17, 123, 14.95, 8.11},
      {34.85, 121.44, 2329, 49.28, 0.43},
      // 2.4 GHz
      {3.95, 1.56, -69, 5.58, std::nullopt},
      {13.01, 16.94, 242, 18.41, 4.19},
      // 5.8 GHz
      {1.67, 0.28, -94, 2.36, std::nullopt},
      {5.50, 3.02, -40, 7.77, std::nullopt},
      // 850 MHz
      {11.38, 12.94, 159, 16.09, 6.30},
      {37.51, 140.73, 2715, 53.05, 0.37},
      // 1.7 GHz
      {5.69, 3.24, -35, 8.04, std::nullopt},
      {18.76, 35.18, 604, 26.53, 1.66},
      // 2.1 GHz
      {4.60, 2.12, -58, 6.51, std::nullopt},
      {15.18, 23.06, 361, 21.47, 2.77},
      // 1.9 GHz
      {5.09, 2.59, -48, 7.20, std::nullopt},
      {16.78, 28.16, 463, 23.73, 2.16},
      // 2.5 GHz
      {3.87, 1.50, -70, 5.47, std::nullopt},
      {12.75, 16.27, 225, 18.04, 4.44},
  };
  return table;
}

ReferenceComparison compare_with_reference(const std::vector<FeasibilityRow>& rows,
                                           double tol, double support_tol) {
  const auto& ref = reference_table();
  if (rows.size() != ref.size()) {
    throw std::invalid_argument("reference comparison needs the default 16-row table");
  }
  ReferenceComparison out;
  auto check = [&](const FeasibilityRow& row, const char* what, double got,
                   double expected, double limit, double& worst) {
    const double dev = std::abs(got - expected) / std::abs(expected);
    worst = std::max(worst, dev);
    if (dev > limit) {
      out.failures.push_back(row.label + " " + mode_name(row.mode) + " " + what + ": " +
                             format_double(got) + " vs " + format_double(expected));
    }
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& cell = ref[i];
    check(row, "energy radius", row.energy_radius, cell.energy_radius_m, tol,
          out.max_rel_deviation);
    check(row, "harvested power", row.harvested_power_at_ref * 1e6, cell.harvested_uw,
          tol, out.max_rel_deviation);
    check(row, "replenishment", row.replenishment_rate, cell.replenishment_pct, tol,
          out.max_rel_deviation);
    check(row, "positive range", row.energy_positive_range, cell.positive_range_m, tol,
          out.max_rel_deviation);
    if (row.support_time.has_value() != cell.support_time_min.has_value()) {
      ++out.na_mismatches;
      out.failures.push_back(row.label + " " + mode_name(row.mode) +
                             " support time availability mismatch");
    } else if (row.support_time) {
      check(row, "support time", *row.support_time / 60.0, *cell.support_time_min,
            support_tol, out.max_support_time_deviation);
    }
  }
  return out;
}

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows) {
  std::ostringstream os;
  os << "band_hz,mode,wavelength_m,energy_radius_m,harvested_uW,replenishment_pct,"
        "positive_range_m,support_time_min\n";
  for (const auto& r : rows) {
    os << format_double(r.band.center_frequency()) << ',' << mode_name(r.mode) << ','
       << format_double(r.band.wavelength()) << ',' << format_double(r.energy_radius)
       << ',' << format_double(r.harvested_power_at_ref * 1e6) << ','
       << format_double(r.replenishment_rate) << ','
       << format_double(r.energy_positive_range) << ','
       << (r.support_time ? format_double(*r.support_time / 60.0) : "N/A") << '\n';
  }
  return os.str();
}

std::string feasibility_json(const std::vector<FeasibilityRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["label"] = r.label;
    j["band_hz"] = r.band.center_frequency();
    j["mode"] = mode_name(r.mode);
    j["wavelength_m"] = r.band.wavelength();
    j["array_size_m"] = {r.array_side, r.array_side};
    j["energy_radius_m"] = r.energy_radius;
    j["harvested_uW"] = r.harvested_power_at_ref * 1e6;
    j["replenishment_pct"] = r.replenishment_rate;
    j["positive_range_m"] = r.energy_positive_range;
    if (r.support_time) {
      j["support_time_min"] = *r.support_time / 60.0;
    } else {
      j["support_time_min"] = "N/A";
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<BandEntry> read_band_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open band file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("band file is empty: " + path);
  const auto header = split_csv_line(line);
  int hz_col = -1;
  int label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = trim(header[i]);
    if (name == "band_hz") hz_col = static_cast<int>(i);
    if (name == "label") label_col = static_cast<int>(i);
  }
  if (hz_col < 0) throw std::runtime_error("band file lacks a band_hz column: " + path);

  std::vector<BandEntry> bands;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) + " fields");
    }
    const auto text = trim(fields[hz_col]);
    double hz = 0.0;
    std::size_t used = 0;
    try {
      hz = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.empty() || !(hz > 0.0) || !std::isfinite(hz)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": invalid band_hz '" + text + "'");
    }
    std::string label = label_col >= 0 ? trim(fields[label_col]) : format_double(hz) + " Hz";
    bands.push_back({std::move(label), RadioBand(hz)});
  }
  if (bands.empty()) throw std::runtime_error("band file has no rows: " + path);
  return bands;
}

}  // namespace rfcharge
