#include "rfcharge/linkbudget.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rfcharge {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + " must be finite");
  }
}

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::domain_error(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

double dbm_to_watt(double dbm) {
  require_finite(dbm, "power in dBm");
  return std::pow(10.0, dbm / 10.0) / 1000.0;
}

double watt_to_dbm(double watt) {
  require_positive(watt, "power in W");
  return 10.0 * std::log10(watt * 1000.0);
}

double db_to_linear(double db) {
  require_finite(db, "gain in dB");
  return std::pow(10.0, db / 10.0);
}

RadioBand::RadioBand(double center_frequency_hz)
    : center_frequency_(center_frequency_hz) {
  require_positive(center_frequency_hz, "center frequency");
}

bool is_directional(const AntennaMode& mode) {
  return std::holds_alternative<DirectionalArray>(mode);
}

double transmit_gain_dbi(const AntennaMode& mode) {
  if (const auto* omni = std::get_if<OmniAntenna>(&mode)) return omni->gain_dbi;
  return std::get<DirectionalArray>(mode).array_gain_dbi;
}

std::string mode_name(const AntennaMode& mode) {
  return is_directional(mode) ? "directional" : "omni";
}

void validate(const AntennaMode& mode) {
  if (const auto* omni = std::get_if<OmniAntenna>(&mode)) {
    if (!std::isfinite(omni->gain_dbi)) {
      throw std::invalid_argument("omni gain must be finite");
    }
    return;
  }
  const auto& arr = std::get<DirectionalArray>(mode);
  if (arr.elements_per_side < 1) {
    throw std::invalid_argument("elements_per_side must be >= 1");
  }
  if (!(arr.beam_width > 0.0 && arr.beam_width < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("beam_width must lie in (0, 2*pi)");
  }
  if (!std::isfinite(arr.element_gain_dbi) || !std::isfinite(arr.array_gain_dbi)) {
    throw std::invalid_argument("array gains must be finite");
  }
}

std::size_t RegulatoryRule::max_beams() const {
  // Small epsilon so that e.g. 10*log10(6) dB of headroom still yields 6.
  return static_cast<std::size_t>(
      std::floor(std::pow(10.0, aggregate_headroom_db / 10.0) + 1e-9));
}

void RegulatoryRule::validate() const {
  if (!std::isfinite(base_limit_dbm) || base_limit_dbm < 0.0) {
    throw std::invalid_argument("base_limit_dbm must be >= 0");
  }
  if (!std::isfinite(aggregate_headroom_db) || aggregate_headroom_db < 0.0) {
    throw std::invalid_argument("aggregate_headroom_db must be >= 0");
  }
  if (!std::isfinite(gain_threshold_dbi)) {
    throw std::invalid_argument("gain_threshold_dbi must be finite");
  }
}

void ReceiverConfig::validate() const {
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sensitivity must be > 0");
  }
  if (!(conversion_efficiency >= 0.0 && conversion_efficiency <= 1.0)) {
    throw std::invalid_argument("conversion_efficiency must lie in [0, 1]");
  }
  if (!std::isfinite(rx_gain_dbi)) {
    throw std::invalid_argument("rx_gain_dbi must be finite");
  }
}

double received_power(double p_tx, double g_tx, double g_rx, double wavelength,
                      double distance) {
  require_positive(p_tx, "transmit power");
  require_positive(g_tx, "transmit gain");
  require_positive(g_rx, "receive gain");
  require_positive(wavelength, "wavelength");
  require_positive(distance, "distance");
  const double path = wavelength / (4.0 * std::numbers::pi * distance);
  return p_tx * g_tx * g_rx * path * path;
}

double energy_radius(double p_tx, double g_tx, double g_rx, double wavelength,
                     double sensitivity) {
  require_positive(p_tx, "transmit power");
  require_positive(g_tx, "transmit gain");
  require_positive(g_rx, "receive gain");
  require_positive(wavelength, "wavelength");
  require_positive(sensitivity, "sensitivity");
  return std::sqrt(p_tx * g_tx * g_rx / sensitivity) * wavelength /
         (4.0 * std::numbers::pi);
}

double max_conducted_power(double gain_dbi, const RegulatoryRule& rule) {
  require_finite(gain_dbi, "antenna gain");
  if (gain_dbi <= rule.gain_threshold_dbi) return dbm_to_watt(rule.base_limit_dbm);
  const double excess = gain_dbi - rule.gain_threshold_dbi;
  double reduction = rule.reduction_variant == ReductionVariant::OneDbPerThreeDbi
                         ? excess / 3.0
                         : excess;
  if (rule.step_mode == StepMode::FloorSteps) reduction = std::floor(reduction);
  return dbm_to_watt(rule.base_limit_dbm - reduction);
}

double off_axis_factor(int n_elements, double phi) {
  if (n_elements < 1) throw std::domain_error("n_elements must be >= 1");
  const double half = std::sin(phi / 2.0);
  if (n_elements == 1 || std::abs(half) < 1e-12) return 1.0;
  const double ratio = std::sin(n_elements * phi / 2.0) / (n_elements * half);
  return std::min(1.0, ratio * ratio);
}

double aggregate_power_cap(double single_beam_limit, const RegulatoryRule& rule) {
  return single_beam_limit * std::pow(10.0, rule.aggregate_headroom_db / 10.0);
}

std::vector<double> cap_aggregate_beams(std::span<const double> requested_powers,
                                        double single_beam_limit,
                                        const RegulatoryRule& rule) {
  std::vector<double> out(requested_powers.size(), 0.0);
  const std::size_t max_beams = rule.max_beams();
  std::size_t active = 0;
  for (std::size_t i = 0; i < requested_powers.size(); ++i) {
    const double p = requested_powers[i];
    if (!(p >= 0.0)) throw std::domain_error("requested beam power must be >= 0");
    if (p == 0.0) continue;
    if (active == max_beams) continue;
    out[i] = std::min(p, single_beam_limit);
    ++active;
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  const double cap = aggregate_power_cap(single_beam_limit, rule);
  if (total > cap) {
    const double scale = cap / total;
    for (double& p : out) p *= scale;
  }
  return out;
}

}  // namespace rfcharge
