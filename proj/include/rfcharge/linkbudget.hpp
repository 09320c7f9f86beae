#pragma once

// RF power-transfer link budget: unit conversions, free-space propagation,
// energy coverage radius, regulatory power limits and array off-axis loss.

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rfcharge {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);

/// Carrier of an energy transfer interface.
class RadioBand {
 public:
  explicit RadioBand(double center_frequency_hz);

  double center_frequency() const { return center_frequency_; }
  double wavelength() const { return kSpeedOfLight / center_frequency_; }

  bool operator==(const RadioBand&) const = default;

 private:
  double center_frequency_;
};

struct OmniAntenna {
  double gain_dbi = 2.15;

  bool operator==(const OmniAntenna&) const = default;
};

/// Square planar array steered electronically. `array_gain_dbi` is the total
/// boresight gain; `beam_width` is the angular resolution used for clustering.
struct DirectionalArray {
  int elements_per_side = 3;
  double element_gain_dbi = 2.15;
  double array_gain_dbi = 14.51;
  double beam_width = 30.0 * std::numbers::pi / 180.0;

  bool operator==(const DirectionalArray&) const = default;
};

using AntennaMode = std::variant<OmniAntenna, DirectionalArray>;

bool is_directional(const AntennaMode& mode);
/// Total transmit gain toward boresight in dBi.
double transmit_gain_dbi(const AntennaMode& mode);
std::string mode_name(const AntennaMode& mode);
/// Throws std::invalid_argument when the mode violates its invariants.
void validate(const AntennaMode& mode);

enum class ReductionVariant { OneDbPerThreeDbi, OneDbPerOneDbi };
enum class StepMode { FloorSteps, Continuous };

struct RegulatoryRule {
  double base_limit_dbm = 30.0;
  double gain_threshold_dbi = 6.0;
  ReductionVariant reduction_variant = ReductionVariant::OneDbPerThreeDbi;
  StepMode step_mode = StepMode::FloorSteps;
  double aggregate_headroom_db = 8.0;

  /// floor(10^(headroom/10)): 6 for the 8 dB default.
  std::size_t max_beams() const;
  void validate() const;
};

struct ReceiverConfig {
  double rx_gain_dbi = 0.0;
  double sensitivity = 1e-5;  // W, i.e. -20 dBm
  double conversion_efficiency = 0.5;

  void validate() const;
};

/// Friis free-space received power. Gains are linear. Throws
/// std::domain_error for non-positive inputs (distance 0 is near field).
double received_power(double p_tx, double g_tx, double g_rx, double wavelength,
                      double distance);

/// Distance at which received_power equals `sensitivity`.
double energy_radius(double p_tx, double g_tx, double g_rx, double wavelength,
                     double sensitivity);

/// Highest conducted power permitted for an antenna of `gain_dbi`.
double max_conducted_power(double gain_dbi, const RegulatoryRule& rule = {});

/// Linear array factor |sin(N phi/2) / (N sin(phi/2))|^2, 1 at boresight.
double off_axis_factor(int n_elements, double phi);

/// Enforces the simultaneous-beam rules on requested per-beam powers: beams
/// past rule.max_beams() (input order) get zero, each beam is clipped to
/// `single_beam_limit`, and if the total still exceeds the aggregate cap all
/// remaining beams are scaled by one common factor.
std::vector<double> cap_aggregate_beams(std::span<const double> requested_powers,
                                        double single_beam_limit,
                                        const RegulatoryRule& rule = {});

/// Aggregate conducted power allowed across all beams of one transmitter.
double aggregate_power_cap(double single_beam_limit, const RegulatoryRule& rule);

}  // namespace rfcharge
