#pragma once

// Per-band feasibility of RF charging: energy radius, harvested power at a
// reference distance, replenishment rate, energy-positive range and the
// charging time needed to fund a period of autonomous operation.

#include <optional>
#include <string>
#include <vector>

#include "rfcharge/linkbudget.hpp"

namespace rfcharge {

struct ConsumptionProfile {
  double consumed_power = 5e-6;  // W
  double autonomy_target = 600.0;  // s

  void validate() const;
};

struct BandEntry {
  std::string label;
  RadioBand band;
};

/// 915 MHz, 2.4 GHz, 5.8 GHz ISM plus the 850/1700/2100/1900/2500 MHz
/// cellular bands. The 2.4 GHz entry sits at the band center 2441.75 MHz.
std::vector<BandEntry> default_band_plan();

/// Omni 2.15 dBi and the 3x3 directional array.
std::vector<AntennaMode> default_modes();

struct FeasibilityOptions {
  double reference_distance = 10.0;  // m
  /// When set, harvested power includes the RF-to-storage conversion
  /// efficiency. The published table is reproduced with this off.
  bool apply_efficiency = false;
};

struct FeasibilityRow {
  std::string label;
  RadioBand band;
  AntennaMode mode;
  double array_side = 0.0;  // m; aperture is array_side x array_side
  double energy_radius = 0.0;  // m
  double harvested_power_at_ref = 0.0;  // W
  double replenishment_rate = 0.0;  // percent
  double energy_positive_range = 0.0;  // m
  std::optional<double> support_time;  // s; empty when not achievable
};

double harvested_power_at(const RadioBand& band, const AntennaMode& mode,
                          const ReceiverConfig& rx, const RegulatoryRule& rule,
                          double d_ref, bool apply_efficiency = false);

double replenishment_rate(double harvested, double consumed);

double energy_positive_range(const RadioBand& band, const AntennaMode& mode,
                             const ReceiverConfig& rx, const RegulatoryRule& rule,
                             double consumed, bool apply_efficiency = false);

/// Charging duration whose net surplus (harvested minus concurrent
/// consumption) equals consumed * autonomy_target; nullopt if harvested does
/// not exceed consumed.
std::optional<double> support_time(double harvested, double consumed,
                                   double autonomy_target);

std::vector<FeasibilityRow> feasibility_table(const std::vector<BandEntry>& bands,
                                              const std::vector<AntennaMode>& modes,
                                              const ReceiverConfig& rx = {},
                                              const RegulatoryRule& rule = {},
                                              const ConsumptionProfile& profile = {},
                                              const FeasibilityOptions& options = {});

/// Published values for the default band plan, in the same row order as
/// feasibility_table(default_band_plan(), default_modes()). Units match the
/// CSV columns: m, uW, percent, m, minutes.
struct ReferenceCell {
  double energy_radius_m;
  double harvested_uw;
  double replenishment_pct;
  double positive_range_m;
  std::optional<double> support_time_min;
};
const std::vector<ReferenceCell>& reference_table();

struct ReferenceComparison {
  double max_rel_deviation = 0.0;  // all quantities except support time
  double max_support_time_deviation = 0.0;
  std::size_t na_mismatches = 0;
  std::vector<std::string> failures;  // human-readable, one per violated cell

  bool within(double tol, double support_tol) const {
    return max_rel_deviation <= tol && max_support_time_deviation <= support_tol &&
           na_mismatches == 0;
  }
};

/// Compares rows of the default plan against reference_table(); failures are
/// listed against the given tolerances.
ReferenceComparison compare_with_reference(const std::vector<FeasibilityRow>& rows,
                                           double tol = 0.01,
                                           double support_tol = 0.02);

/// CSV columns: band_hz, mode, wavelength_m, energy_radius_m, harvested_uW,
/// replenishment_pct, positive_range_m, support_time_min ("N/A" when absent).
std::string feasibility_csv(const std::vector<FeasibilityRow>& rows);
std::string feasibility_json(const std::vector<FeasibilityRow>& rows);

/// Reads a band plan CSV: header row with a `band_hz` column and an optional
/// `label` column. Throws std::runtime_error on malformed input.
std::vector<BandEntry> read_band_plan(const std::string& path);

}  // namespace rfcharge
