#include "rfcharge/charging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rfcharge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double circular_mean(const std::vector<double>& angles) {
  double s = 0.0;
  double c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  if (std::abs(s) < 1e-15 && std::abs(c) < 1e-15) return angles.front();
  return wrap_angle(std::atan2(s, c));
}

}  // namespace

double angular_separation(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return d > std::numbers::pi ? kTwoPi - d : d;
}

bool SbsSchedule::is_shadowed(std::size_t user_id) const {
  return std::find(shadowed.begin(), shadowed.end(), user_id) != shadowed.end();
}

double SbsSchedule::total_conducted_power() const {
  double total = 0.0;
  for (const auto& b : beams) total += b.conducted_power;
  return total;
}

std::size_t SbsSchedule::active_beams() const {
  return static_cast<std::size_t>(std::count_if(
      beams.begin(), beams.end(), [](const BeamAssignment& b) { return b.conducted_power > 0.0; }));
}

SbsSchedule schedule_beams(std::size_t sbs_id, std::span<const UserPolar> users_in_range,
                           const DirectionalArray& array, const RegulatoryRule& rule,
                           const SchedulerOptions& options) {
  SbsSchedule out;
  out.sbs_id = sbs_id;
  const std::size_t n = users_in_range.size();
  if (n == 0) return out;

  // Shadowing: the radially farther user of an aligned pair is blocked.
  std::vector<bool> blocked(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = users_in_range[i];
      const auto& b = users_in_range[j];
      if (angular_separation(a.angle, b.angle) >= options.shadow_epsilon) continue;
      const bool a_behind =
          a.radial > b.radial || (a.radial == b.radial && a.user_id > b.user_id);
      blocked[a_behind ? i : j] = true;
    }
  }

  std::vector<UserPolar> visible;
  visible.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (blocked[i]) {
      out.shadowed.push_back(users_in_range[i].user_id);
    } else {
      visible.push_back(users_in_range[i]);
    }
  }
  std::sort(out.shadowed.begin(), out.shadowed.end());
  std::sort(visible.begin(), visible.end(), [](const UserPolar& a, const UserPolar& b) {
    return a.angle != b.angle ? a.angle < b.angle : a.user_id < b.user_id;
  });

  // Circular single-linkage clustering: cut wherever the gap to the next
  // user (in angular order) reaches the beam width.
  const std::size_t k = visible.size();
  std::vector<bool> cut_after(k, false);
  std::size_t first_cut = k;
  for (std::size_t i = 0; i < k; ++i) {
    const double next = i + 1 < k ? visible[i + 1].angle : visible[0].angle + kTwoPi;
    if (k > 1 && next - visible[i].angle >= array.beam_width) {
      cut_after[i] = true;
      if (first_cut == k) first_cut = i;
    }
  }
  std::vector<std::vector<UserPolar>> clusters;
  if (first_cut == k) {
    clusters.push_back(visible);
  } else {
    std::vector<UserPolar> current;
    for (std::size_t step = 1; step <= k; ++step) {
      const std::size_t i = (first_cut + step) % k;
      current.push_back(visible[i]);
      if (cut_after[i]) {
        clusters.push_back(std::move(current));
        current.clear();
      }
    }
  }

  auto nearest = [](const std::vector<UserPolar>& c) {
    double r = std::numeric_limits<double>::infinity();
    std::size_t id = std::numeric_limits<std::size_t>::max();
    for (const auto& u : c) {
      r = std::min(r, u.radial);
      id = std::min(id, u.user_id);
    }
    return std::pair{r, id};
  };
  std::stable_sort(clusters.begin(), clusters.end(),
                   [&](const auto& a, const auto& b) { return nearest(a) < nearest(b); });

  const std::size_t served = std::min(clusters.size(), rule.max_beams());
  for (std::size_t c = served; c < clusters.size(); ++c) {
    for (const auto& u : clusters[c]) out.unserved.push_back(u.user_id);
  }
  std::sort(out.unserved.begin(), out.unserved.end());

  const double single_limit = max_conducted_power(array.array_gain_dbi, rule);
  const std::vector<double> requested(served, single_limit);
  const std::vector<double> powers = cap_aggregate_beams(requested, single_limit, rule);

  for (std::size_t c = 0; c < served; ++c) {
    const auto& members = clusters[c];
    BeamAssignment beam;
    beam.sbs_id = sbs_id;
    beam.conducted_power = powers[c];
    std::vector<double> angles;
    const double share = 1.0 / static_cast<double>(members.size());
    for (const auto& u : members) {
      beam.member_users.push_back(u.user_id);
      beam.shares.push_back(share);
      angles.push_back(u.angle);
    }
    beam.boresight = circular_mean(angles);
    if (options.policy == ClusterPolicy::TimeDivided) {
      for (double a : angles) beam.slices.push_back({a, share});
    } else {
      beam.slices.push_back({beam.boresight, 1.0});
    }
    out.beams.push_back(std::move(beam));
  }
  return out;
}

LinkContext LinkContext::make(const RadioBand& band, const AntennaMode& mode,
                              const ReceiverConfig& rx, double min_distance) {
  LinkContext link;
  link.wavelength = band.wavelength();
  link.tx_gain = db_to_linear(transmit_gain_dbi(mode));
  link.rx_gain = db_to_linear(rx.rx_gain_dbi);
  link.sensitivity = rx.sensitivity;
  link.n_elements = is_directional(mode) ? std::get<DirectionalArray>(mode).elements_per_side : 1;
  link.min_distance = min_distance;
  return link;
}

double directional_power_from(const SbsSchedule& schedule, const UserPolar& user,
                              const LinkContext& link, bool cross_spillover) {
  if (schedule.is_shadowed(user.user_id)) return 0.0;
  const double d = std::max(user.radial, link.min_distance);
  double total = 0.0;
  for (const auto& beam : schedule.beams) {
    if (beam.conducted_power <= 0.0) continue;
    const double boresight_power =
        received_power(beam.conducted_power, link.tx_gain, link.rx_gain, link.wavelength, d);
    if (boresight_power < link.sensitivity) continue;
    const bool member = std::find(beam.member_users.begin(), beam.member_users.end(),
                                  user.user_id) != beam.member_users.end();
    if (!member && !cross_spillover) continue;
    for (const auto& slice : beam.slices) {
      const double p =
          boresight_power * off_axis_factor(link.n_elements, user.angle - slice.pointing);
      if (p >= link.sensitivity) total += slice.fraction * p;
    }
  }
  return total;
}

double omni_power_from(double distance, double p_tx, const LinkContext& link) {
  const double d = std::max(distance, link.min_distance);
  const double p = received_power(p_tx, link.tx_gain, link.rx_gain, link.wavelength, d);
  return p >= link.sensitivity ? p : 0.0;
}

UserPolar to_polar(std::size_t user_id, const Point& sbs, const Point& user,
                   const Area& area) {
  const Point d = torus_delta(sbs, user, area);
  return {user_id, std::hypot(d.x, d.y), wrap_angle(std::atan2(d.y, d.x))};
}

double instantaneous_rx_power(const Point& user, std::size_t user_id,
                              std::span<const Point> sbs_positions,
                              std::span<const SbsSchedule> schedules, const Area& area,
                              const RadioBand& band, const AntennaMode& mode,
                              const ReceiverConfig& rx, const RegulatoryRule& rule,
                              bool one_beam_only, const SchedulerOptions& options,
                              double min_distance) {
  const bool directional = is_directional(mode);
  if (directional && schedules.size() != sbs_positions.size()) {
    throw std::invalid_argument("need one schedule per SBS in directional mode");
  }
  const LinkContext link = LinkContext::make(band, mode, rx, min_distance);
  const double omni_power = max_conducted_power(transmit_gain_dbi(mode), rule);

  std::size_t nearest = sbs_positions.size();
  double nearest_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < sbs_positions.size(); ++j) {
    const Point d = torus_delta(sbs_positions[j], user, area);
    const double dist = std::hypot(d.x, d.y);
    if (dist < nearest_d) {
      nearest_d = dist;
      nearest = j;
    }
  }

  double total = 0.0;
  for (std::size_t j = 0; j < sbs_positions.size(); ++j) {
    if (one_beam_only && j != nearest) continue;
    const UserPolar polar = to_polar(user_id, sbs_positions[j], user, area);
    total += directional
                 ? directional_power_from(schedules[j], polar, link, options.cross_spillover)
                 : omni_power_from(polar.radial, omni_power, link);
  }
  return total;
}

void WearableState::validate() const {
  if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be > 0");
  if (!(discharge_rate > 0.0)) throw std::invalid_argument("discharge_rate must be > 0");
  if (!(battery_level >= 0.0 && battery_level <= capacity)) {
    throw std::invalid_argument("battery_level must lie in [0, capacity]");
  }
}

BatteryFlows battery_flows(const WearableState& state, double p_rx_total, double efficiency,
                           double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  BatteryFlows f;
  f.state = state;
  f.harvested = efficiency * p_rx_total * dt;
  const double demand = state.discharge_rate * dt;
  const double target = state.battery_level + f.harvested - demand;
  double level = target;
  if (target > state.capacity) {
    f.overflow = target - state.capacity;
    level = state.capacity;
  }
  f.consumed = demand;
  if (target < 0.0) {
    f.consumed = demand + target;
    level = 0.0;
  }
  f.state.battery_level = level;
  if (state.charging_threshold <= 0.0) {
    f.state.requesting = true;
  } else if (level <= state.charging_threshold) {
    f.state.requesting = true;
  } else if (level >= state.capacity) {
    f.state.requesting = false;
  }
  return f;
}

WearableState battery_step(const WearableState& state, double p_rx_total, double efficiency,
                           double dt) {
  return battery_flows(state, p_rx_total, efficiency, dt).state;
}

}  // namespace rfcharge
