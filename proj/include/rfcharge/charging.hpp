#pragma once

// Per-step energy delivery from SBSs to wearables: directional beam
// scheduling with angular shadowing and regulatory beam caps, omni
// broadcast, and battery dynamics.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "rfcharge/deployment.hpp"
#include "rfcharge/linkbudget.hpp"

namespace rfcharge {

/// A user seen from one SBS.
struct UserPolar {
  std::size_t user_id = 0;
  double radial = 0.0;  // m
  double angle = 0.0;  // rad in [0, 2pi), relative to the SBS reference axis
};

/// One steering position of a beam and the share of the step spent there.
struct BeamSlice {
  double pointing = 0.0;  // rad
  double fraction = 1.0;
};

struct BeamAssignment {
  std::size_t sbs_id = 0;
  double boresight = 0.0;  // circular mean of the member angles
  std::vector<std::size_t> member_users;
  std::vector<double> shares;  // parallel to member_users, sums to 1
  std::vector<BeamSlice> slices;
  double conducted_power = 0.0;  // W
};

enum class ClusterPolicy {
  /// One beam per cluster, steered at each member in turn for equal time.
  TimeDivided,
  /// One static beam at the cluster's mean angle; members off its axis get
  /// the off-axis reduced power for the whole step.
  WideBeam,
};

struct SchedulerOptions {
  double shadow_epsilon = 2.0 * std::numbers::pi / 180.0;  // rad
  ClusterPolicy policy = ClusterPolicy::TimeDivided;
  /// Count off-axis energy from beams that do not target the user (other
  /// clusters of the same or other SBSs).
  bool cross_spillover = true;
};

struct SbsSchedule {
  std::size_t sbs_id = 0;
  std::vector<BeamAssignment> beams;
  std::vector<std::size_t> shadowed;  // receive nothing from this SBS
  std::vector<std::size_t> unserved;  // clusters beyond the beam cap

  bool is_shadowed(std::size_t user_id) const;
  double total_conducted_power() const;
  std::size_t active_beams() const;
};

/// Angular distance on the circle, in [0, pi].
double angular_separation(double a, double b);

/// Directional scheduling for one SBS:
///  - a user within shadow_epsilon of a radially closer user is shadowed;
///  - remaining users are clustered by single linkage on angle, joining any
///    two users closer than the beam width;
///  - clusters are served nearest-first (ties by lowest user id) up to
///    rule.max_beams();
///  - beam powers pass cap_aggregate_beams.
SbsSchedule schedule_beams(std::size_t sbs_id, std::span<const UserPolar> users_in_range,
                           const DirectionalArray& array, const RegulatoryRule& rule,
                           const SchedulerOptions& options = {});

/// Fixed link parameters shared by all SBS-user pairs.
struct LinkContext {
  double wavelength = 0.0;
  double tx_gain = 1.0;  // linear
  double rx_gain = 1.0;  // linear
  double sensitivity = 1e-5;  // W, per-link gate
  int n_elements = 1;  // off-axis factor order
  double min_distance = 1.0;  // m, far-field clamp

  static LinkContext make(const RadioBand& band, const AntennaMode& mode,
                          const ReceiverConfig& rx, double min_distance = 1.0);
};

/// Mean power a user draws from one SBS's schedule over a step. Each slice
/// contributes fraction * received_power * off_axis_factor, and each slice
/// is gated individually at the sensitivity.
double directional_power_from(const SbsSchedule& schedule, const UserPolar& user,
                              const LinkContext& link, bool cross_spillover = true);

/// Omni broadcast at `p_tx`, gated at the sensitivity.
double omni_power_from(double distance, double p_tx, const LinkContext& link);

/// Total power at `user` from all SBSs. For directional modes `schedules`
/// holds one schedule per SBS (same order as sbs_positions). With
/// `one_beam_only`, only the nearest SBS contributes.
double instantaneous_rx_power(const Point& user, std::size_t user_id,
                              std::span<const Point> sbs_positions,
                              std::span<const SbsSchedule> schedules, const Area& area,
                              const RadioBand& band, const AntennaMode& mode,
                              const ReceiverConfig& rx, const RegulatoryRule& rule,
                              bool one_beam_only, const SchedulerOptions& options = {},
                              double min_distance = 1.0);

/// Polar coordinates of `user` relative to `sbs` on the torus.
UserPolar to_polar(std::size_t user_id, const Point& sbs, const Point& user,
                   const Area& area);

struct WearableState {
  double battery_level = 0.0;  // J
  double capacity = 1e-2;  // J
  double discharge_rate = 5e-6;  // W
  double charging_threshold = 0.0;  // J; <= 0 means always request charging
  bool requesting = true;

  void validate() const;
  bool active() const { return battery_level > 0.0; }
};

struct BatteryFlows {
  WearableState state;
  double harvested = 0.0;  // J offered to storage, efficiency * p * dt
  double consumed = 0.0;  // J actually drawn by the device
  double overflow = 0.0;  // J discarded at full capacity
};

/// Level moves by (efficiency * p_rx - discharge) * dt, clamped to
/// [0, capacity]. Energy balance: (level' - level) + consumed = harvested -
/// overflow.
BatteryFlows battery_flows(const WearableState& state, double p_rx_total, double efficiency,
                           double dt);

WearableState battery_step(const WearableState& state, double p_rx_total, double efficiency,
                           double dt);

}  // namespace rfcharge
