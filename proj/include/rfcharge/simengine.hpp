#pragma once

// Discrete-time simulation of wearables charged by SBSs: deployment,
// mobility, scheduling and battery dynamics, with ANDOT (average normalized
// device operating time) and energy-collection statistics.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rfcharge/charging.hpp"
#include "rfcharge/deployment.hpp"
#include "rfcharge/linkbudget.hpp"
#include "rfcharge/mobility.hpp"

namespace rfcharge {

struct ScenarioConfig {
  Area area;
  std::size_t n_sbs = 30;
  double strauss_radius = 50.0;  // m
  double strauss_gamma = 0.3;
  std::size_t strauss_burn_in = 10'000;  // sweeps
  std::size_t n_users = 100;
  MobilityConfig mobility;
  RadioBand band{915e6};
  AntennaMode mode = DirectionalArray{};
  RegulatoryRule rule;
  ReceiverConfig rx;
  SchedulerOptions scheduler;
  std::vector<double> discharge_rates{5e-6, 5e-5, 5e-4};  // W
  double capacity = 1e-2;  // J
  double charging_threshold = 0.0;  // fraction of capacity; 0 = always charge
  double duration = 1e5;  // s
  double time_step = 1.0;  // s
  std::size_t replications = 10;
  bool one_beam_only = false;
  std::uint64_t master_seed = 1;
  double min_link_distance = 1.0;  // m
  /// Initial charges are uniform on [0, capacity] per user; when set they are
  /// drawn as a randomly permuted stratified sample across users.
  bool stratified_initial_charge = true;
  /// Worker threads for replications; 0 = hardware concurrency.
  std::size_t workers = 0;

  void validate() const;
  std::size_t steps() const;
};

/// Log-binned histogram of per-(user, step) collected power samples.
class SampleHistogram {
 public:
  static constexpr double kMinExp = -12.0;  // 1 pW
  static constexpr double kMaxExp = 2.0;  // 100 W
  static constexpr int kBinsPerDecade = 100;

  SampleHistogram();

  void add(double value);
  void merge(const SampleHistogram& other);
  std::uint64_t count() const { return total_; }
  /// (upper bin edge, cumulative probability) for every non-empty bin.
  std::vector<std::pair<double, double>> cdf() const;
  double quantile(double q) const;

 private:
  std::vector<std::uint64_t> bins_;
  std::uint64_t total_ = 0;
};

struct RegulatoryAudit {
  std::uint64_t sbs_steps_checked = 0;
  std::uint64_t beam_count_violations = 0;
  std::uint64_t power_violations = 0;
  std::size_t max_active_beams = 0;
  double max_power_ratio = 0.0;  // aggregate power / aggregate cap

  std::uint64_t violations() const { return beam_count_violations + power_violations; }
  void merge(const RegulatoryAudit& other);
};

struct EnergyAccount {
  double harvested = 0.0;  // J offered to storage
  double consumed = 0.0;  // J drawn by devices
  double overflow = 0.0;  // J lost at full capacity
  double stored_delta = 0.0;  // J, final minus initial battery energy
};

struct SimMetrics {
  std::vector<double> discharge_rates;
  std::vector<double> andot_mean;  // per rate, mean over replications
  std::vector<double> andot_std;  // per rate, sample std over replications
  std::vector<std::vector<double>> andot_replications;  // [rate][replication]
  std::vector<double> outage_events;  // per rate, mean per user per replication
  std::vector<double> mean_outage_duration;  // per rate, s
  std::vector<EnergyAccount> energy;  // per rate, summed over replications

  /// Per user and replication: collected energy / receiving time (J/s); users
  /// that never received are omitted.
  std::vector<double> user_collection_rates;
  /// Collected power per (user, step) while receiving.
  SampleHistogram step_samples;
  double receiving_fraction = 0.0;  // share of (user, step) pairs receiving

  RegulatoryAudit audit;
  std::size_t replications = 0;
};

SimMetrics run_simulation(const ScenarioConfig& cfg);

/// SBS positions used by replication `rep` of run_simulation.
std::vector<Point> replication_deployment(const ScenarioConfig& cfg, std::size_t rep);

/// User trajectories used by replication `rep`, truncated to `max_steps`.
std::vector<Trajectory> replication_trajectories(const ScenarioConfig& cfg, std::size_t rep,
                                                 std::size_t max_steps);

class EmpiricalCdf {
 public:
  /// Throws std::invalid_argument for an empty sample set.
  explicit EmpiricalCdf(std::vector<double> samples);

  /// Fraction of samples <= x.
  double operator()(double x) const;
  /// Smallest sample value v with cdf(v) >= q; q in [0, 1].
  double quantile(double q) const;
  double iqr() const { return quantile(0.75) - quantile(0.25); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf energy_cdf(const SimMetrics& metrics);

enum class SweepAxis { SbsDensity, UserSpeed, UserDensity };

SweepAxis parse_sweep_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

struct SweepPoint {
  double value = 0.0;
  std::string mode;  // "omni", "directional" (with "+one_beam" suffix)
  SimMetrics metrics;
};

struct SweepVariant {
  AntennaMode mode;
  bool one_beam_only = false;

  std::string label() const;
};

/// Runs one simulation per (value, variant); values are SBS counts, speeds in
/// m/s, or user counts. Every point is identical to a standalone
/// run_simulation with the corresponding config.
std::vector<SweepPoint> sweep(const ScenarioConfig& cfg, SweepAxis axis,
                              const std::vector<double>& values,
                              const std::vector<SweepVariant>& variants);

/// Applies one sweep value to a config.
ScenarioConfig with_axis_value(ScenarioConfig cfg, SweepAxis axis, double value);

}  // namespace rfcharge
