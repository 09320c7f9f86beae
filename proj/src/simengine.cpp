#include "rfcharge/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "rfcharge/rng.hpp"

namespace rfcharge {

void ScenarioConfig::validate() const {
  area.validate();
  mobility.validate();
  rfcharge::validate(mode);
  rule.validate();
  rx.validate();
  if (n_users == 0) throw std::invalid_argument("n_users must be >= 1");
  if (!(strauss_gamma >= 0.0 && strauss_gamma <= 1.0)) {
    throw std::invalid_argument("strauss_gamma must lie in [0, 1]");
  }
  if (!(strauss_radius >= 0.0)) throw std::invalid_argument("strauss_radius must be >= 0");
  if (discharge_rates.empty()) throw std::invalid_argument("discharge_rates is empty");
  for (double r : discharge_rates) {
    if (!(r > 0.0)) throw std::invalid_argument("discharge rates must be > 0");
  }
  if (!(capacity > 0.0)) throw std::invalid_argument("capacity must be > 0");
  if (!(charging_threshold >= 0.0 && charging_threshold <= 1.0)) {
    throw std::invalid_argument("charging_threshold must lie in [0, 1]");
  }
  if (!(time_step > 0.0)) throw std::invalid_argument("time_step must be > 0");
  if (!(duration >= time_step)) throw std::invalid_argument("duration must be >= time_step");
  if (replications == 0) throw std::invalid_argument("replications must be >= 1");
  if (!(min_link_distance > 0.0)) throw std::invalid_argument("min_link_distance must be > 0");
  if (!(scheduler.shadow_epsilon >= 0.0)) {
    throw std::invalid_argument("shadow_epsilon must be >= 0");
  }
}

std::size_t ScenarioConfig::steps() const {
  return static_cast<std::size_t>(std::floor(duration / time_step + 1e-9));
}

// ---------------------------------------------------------------------------

SampleHistogram::SampleHistogram()
    : bins_(static_cast<std::size_t>((kMaxExp - kMinExp) * kBinsPerDecade) + 2, 0) {}

void SampleHistogram::add(double value) {
  if (!(value > 0.0)) return;
  const double pos = (std::log10(value) - kMinExp) * kBinsPerDecade;
  std::size_t bin = 0;
  if (pos >= 0.0) {
    bin = std::min(bins_.size() - 1, static_cast<std::size_t>(pos) + 1);
  }
  ++bins_[bin];
  ++total_;
}

void SampleHistogram::merge(const SampleHistogram& other) {
  for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i] += other.bins_[i];
  total_ += other.total_;
}

namespace {

double bin_upper_edge(std::size_t bin) {
  // Bin 0 collects everything below 10^kMinExp; the last bin is open-ended.
  return std::pow(10.0, SampleHistogram::kMinExp +
                            static_cast<double>(bin) / SampleHistogram::kBinsPerDecade);
}

}  // namespace

std::vector<std::pair<double, double>> SampleHistogram::cdf() const {
  std::vector<std::pair<double, double>> out;
  if (total_ == 0) return out;
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (bins_[i] == 0) continue;
    running += bins_[i];
    out.emplace_back(bin_upper_edge(i),
                     static_cast<double>(running) / static_cast<double>(total_));
  }
  return out;
}

double SampleHistogram::quantile(double q) const {
  if (total_ == 0) throw std::invalid_argument("empty histogram");
  const double target = std::clamp(q, 0.0, 1.0) * static_cast<double>(total_);
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    running += bins_[i];
    if (bins_[i] > 0 && static_cast<double>(running) >= target) return bin_upper_edge(i);
  }
  return bin_upper_edge(bins_.size() - 1);
}

void RegulatoryAudit::merge(const RegulatoryAudit& other) {
  sbs_steps_checked += other.sbs_steps_checked;
  beam_count_violations += other.beam_count_violations;
  power_violations += other.power_violations;
  max_active_beams = std::max(max_active_beams, other.max_active_beams);
  max_power_ratio = std::max(max_power_ratio, other.max_power_ratio);
}

// ---------------------------------------------------------------------------

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::invalid_argument("empirical CDF needs at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile level must lie in [0, 1]");
  const double n = static_cast<double>(sorted_.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * n - 1e-12));
  idx = idx == 0 ? 0 : idx - 1;
  return sorted_[std::min(idx, sorted_.size() - 1)];
}

EmpiricalCdf energy_cdf(const SimMetrics& metrics) {
  return EmpiricalCdf(metrics.user_collection_rates);
}

// ---------------------------------------------------------------------------

namespace {

/// User positions stored time-major: index t * n_users + u.
struct UserTracks {
  std::size_t n_users = 0;
  std::size_t steps = 0;
  std::vector<float> x;
  std::vector<float> y;
};

struct ReplicationInputs {
  UserTracks tracks;
  std::vector<double> initial_fraction;  // of capacity, per user
};

struct ReplicationResult {
  std::vector<double> andot;
  std::vector<double> outage_episodes;
  std::vector<double> outage_time;
  std::vector<EnergyAccount> energy;
  std::vector<double> user_rates;
  SampleHistogram samples;
  std::uint64_t receiving = 0;
  std::uint64_t user_steps = 0;
  RegulatoryAudit audit;
};

ReplicationInputs prepare_inputs(const ScenarioConfig& cfg, std::size_t rep,
                                 const TrajectoryBuilder& builder) {
  ReplicationInputs in;
  const std::size_t n = cfg.n_users;
  const std::size_t steps = builder.steps();
  in.tracks.n_users = n;
  in.tracks.steps = steps;
  in.tracks.x.resize((steps + 1) * n);
  in.tracks.y.resize((steps + 1) * n);
  for (std::size_t u = 0; u < n; ++u) {
    const Trajectory t = builder.build(derive_seed(
        cfg.master_seed, {rep, static_cast<std::uint64_t>(Stream::Mobility), u}));
    for (std::size_t i = 0; i <= steps; ++i) {
      in.tracks.x[i * n + u] = static_cast<float>(t.positions[i].x);
      in.tracks.y[i * n + u] = static_cast<float>(t.positions[i].y);
    }
  }

  Rng rng(derive_seed(cfg.master_seed, {rep, static_cast<std::uint64_t>(Stream::Battery)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  in.initial_fraction.resize(n);
  if (cfg.stratified_initial_charge) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t u = 0; u < n; ++u) {
      in.initial_fraction[u] = (static_cast<double>(perm[u]) + unit(rng)) / static_cast<double>(n);
    }
  } else {
    for (auto& f : in.initial_fraction) f = unit(rng);
  }
  return in;
}

std::vector<Point> deploy(const ScenarioConfig& cfg, std::size_t rep) {
  StraussConfig s;
  s.n_points = cfg.n_sbs;
  s.interaction_radius = cfg.strauss_radius;
  s.interaction_gamma = cfg.strauss_gamma;
  s.burn_in_sweeps = cfg.strauss_burn_in;
  s.seed = derive_seed(cfg.master_seed, {rep, static_cast<std::uint64_t>(Stream::Deployment)});
  return sample_strauss(s, cfg.area);
}

inline double wrap_delta(double d, double span) {
  if (d > 0.5 * span) return d - span;
  if (d < -0.5 * span) return d + span;
  return d;
}

/// Per-step power evaluation with buffers reused across steps.
class PowerEvaluator {
 public:
  PowerEvaluator(const ScenarioConfig& cfg, std::span<const Point> sbs)
      : cfg_(cfg),
        sbs_(sbs),
        link_(LinkContext::make(cfg.band, cfg.mode, cfg.rx, cfg.min_link_distance)),
        directional_(is_directional(cfg.mode)),
        in_range_(sbs.size()),
        nearest_(cfg.n_users) {
    single_limit_ = max_conducted_power(transmit_gain_dbi(cfg.mode), cfg.rule);
    aggregate_cap_ = aggregate_power_cap(single_limit_, cfg.rule);
    const double radius =
        energy_radius(single_limit_, link_.tx_gain, link_.rx_gain, link_.wavelength,
                      cfg.rx.sensitivity);
    range2_ = radius * radius * (1.0 + 1e-9);
    const double one[] = {single_limit_};
    lone_beam_power_ = cap_aggregate_beams(one, single_limit_, cfg.rule).front();
    boresight_gain_ = off_axis_factor(link_.n_elements, 0.0);
  }

  /// Fills `all` with the power each user draws from every SBS and, if
  /// non-empty, `nearest` with the power from its nearest SBS only (W per
  /// user). `eligible[u] == 0` excludes a user.
  void evaluate(const UserTracks& tracks, std::size_t t, std::span<const char> eligible,
                std::span<double> all, std::span<double> nearest, RegulatoryAudit& audit) {
    std::fill(all.begin(), all.end(), 0.0);
    std::fill(nearest.begin(), nearest.end(), 0.0);
    if (sbs_.empty()) return;
    const std::size_t n = tracks.n_users;
    const float* xs = tracks.x.data() + t * n;
    const float* ys = tracks.y.data() + t * n;
    const double w = cfg_.area.width;
    const double h = cfg_.area.height;
    for (auto& v : in_range_) v.clear();

    for (std::size_t u = 0; u < n; ++u) {
      if (!eligible[u]) continue;
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < sbs_.size(); ++j) {
        const double dx = wrap_delta(static_cast<double>(xs[u]) - sbs_[j].x, w);
        const double dy = wrap_delta(static_cast<double>(ys[u]) - sbs_[j].y, h);
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          best_j = j;
        }
        if (d2 <= range2_) {
          double angle = std::atan2(dy, dx);
          if (angle < 0.0) angle += 2.0 * std::numbers::pi;
          if (angle >= 2.0 * std::numbers::pi) angle = 0.0;
          in_range_[j].push_back({u, std::sqrt(d2), angle});
        }
      }
      nearest_[u] = best_j;
    }

    auto deposit = [&](std::size_t j, std::size_t u, double p) {
      all[u] += p;
      if (!nearest.empty() && nearest_[u] == j) nearest[u] += p;
    };
    for (std::size_t j = 0; j < sbs_.size(); ++j) {
      const auto& users = in_range_[j];
      if (directional_) {
        if (users.empty()) continue;
        if (users.size() == 1 && cfg_.scheduler.policy == ClusterPolicy::TimeDivided) {
          record(audit, lone_beam_power_ > 0.0 ? 1 : 0, lone_beam_power_);
          deposit(j, users.front().user_id, lone_user_power(users.front()));
          continue;
        }
        const SbsSchedule sched =
            schedule_beams(j, users, std::get<DirectionalArray>(cfg_.mode), cfg_.rule,
                           cfg_.scheduler);
        record(audit, sched.active_beams(), sched.total_conducted_power());
        for (const auto& up : users) {
          deposit(j, up.user_id,
                  directional_power_from(sched, up, link_, cfg_.scheduler.cross_spillover));
        }
      } else {
        record(audit, 1, single_limit_);
        for (const auto& up : users) {
          deposit(j, up.user_id, omni_power_from(up.radial, single_limit_, link_));
        }
      }
    }
  }

 private:
  // Same result as schedule_beams + directional_power_from for one user:
  // a single beam aimed straight at it.
  double lone_user_power(const UserPolar& up) const {
    if (lone_beam_power_ <= 0.0) return 0.0;
    const double d = std::max(up.radial, link_.min_distance);
    const double boresight = received_power(lone_beam_power_, link_.tx_gain, link_.rx_gain,
                                            link_.wavelength, d);
    if (boresight < link_.sensitivity) return 0.0;
    const double p = boresight * boresight_gain_;
    return p >= link_.sensitivity ? p : 0.0;
  }

  void record(RegulatoryAudit& audit, std::size_t beams, double total) const {
    ++audit.sbs_steps_checked;
    if (beams > cfg_.rule.max_beams()) ++audit.beam_count_violations;
    if (total > aggregate_cap_ * (1.0 + 1e-12)) ++audit.power_violations;
    audit.max_active_beams = std::max(audit.max_active_beams, beams);
    audit.max_power_ratio = std::max(audit.max_power_ratio, total / aggregate_cap_);
  }

  const ScenarioConfig& cfg_;
  std::span<const Point> sbs_;
  LinkContext link_;
  bool directional_;
  double single_limit_ = 0.0;
  double aggregate_cap_ = 0.0;
  double range2_ = 0.0;
  double lone_beam_power_ = 0.0;
  double boresight_gain_ = 1.0;
  std::vector<std::vector<UserPolar>> in_range_;
  std::vector<std::size_t> nearest_;
};

/// Simulates one replication. Without a request threshold, `with_one_beam`
/// also returns the one-beam variant of `cfg` from the same scheduling pass
/// (result[1]); result[0] always honours cfg.one_beam_only.
std::vector<ReplicationResult> simulate_replication(const ScenarioConfig& cfg,
                                                    const ReplicationInputs& in,
                                                    std::span<const Point> sbs,
                                                    bool with_one_beam = false) {
  const std::size_t n = cfg.n_users;
  const std::size_t n_rates = cfg.discharge_rates.size();
  const std::size_t steps = in.tracks.steps;
  const double dt = cfg.time_step;
  const double eta = cfg.rx.conversion_efficiency;
  const bool thresholded = cfg.charging_threshold > 0.0;
  if (with_one_beam && (thresholded || cfg.one_beam_only)) {
    throw std::logic_error("one-beam lane needs a multi-source config without threshold");
  }

  // A lane is one output variant; lane 0 follows cfg.one_beam_only.
  struct Lane {
    bool one_beam;
    ReplicationResult res;
    std::vector<double> power;
    std::vector<double> collected;
    std::vector<double> receiving_time;
  };
  std::vector<Lane> lanes;
  lanes.push_back({cfg.one_beam_only, {}, {}, {}, {}});
  if (with_one_beam) lanes.push_back({true, {}, {}, {}, {}});
  for (auto& lane : lanes) {
    lane.res.andot.assign(n_rates, 0.0);
    lane.res.outage_episodes.assign(n_rates, 0.0);
    lane.res.outage_time.assign(n_rates, 0.0);
    lane.res.energy.assign(n_rates, {});
    lane.power.assign(n, 0.0);
    lane.collected.assign(n, 0.0);
    lane.receiving_time.assign(n, 0.0);
  }
  std::vector<double> spare(n, 0.0);
  auto power_of = [&](bool one_beam) -> std::vector<double>& {
    for (auto& lane : lanes) {
      if (lane.one_beam == one_beam) return lane.power;
    }
    return spare;
  };
  const bool want_nearest = std::any_of(lanes.begin(), lanes.end(),
                                        [](const Lane& l) { return l.one_beam; });

  // Without a request threshold the received power does not depend on the
  // battery, so all rates share one pass. Otherwise each rate gets its own.
  std::vector<std::vector<std::size_t>> groups;
  if (thresholded) {
    for (std::size_t k = 0; k < n_rates; ++k) groups.push_back({k});
  } else {
    groups.emplace_back(n_rates);
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  }

  PowerEvaluator evaluator(cfg, sbs);
  std::vector<char> eligible(n, 1);
  RegulatoryAudit audit;

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& rates = groups[g];
    const bool record_samples = g == 0;
    // states[lane][rate][user]
    std::vector<std::vector<std::vector<WearableState>>> states(
        lanes.size(), std::vector<std::vector<WearableState>>(rates.size(),
                                                              std::vector<WearableState>(n)));
    std::vector<std::vector<std::vector<char>>> was_empty(
        lanes.size(),
        std::vector<std::vector<char>>(rates.size(), std::vector<char>(n, 0)));
    std::vector<std::vector<std::uint64_t>> active(lanes.size(),
                                                   std::vector<std::uint64_t>(rates.size(), 0));
    for (auto& per_lane : states) {
      for (std::size_t i = 0; i < rates.size(); ++i) {
        for (std::size_t u = 0; u < n; ++u) {
          auto& s = per_lane[i][u];
          s.capacity = cfg.capacity;
          s.discharge_rate = cfg.discharge_rates[rates[i]];
          s.battery_level = in.initial_fraction[u] * cfg.capacity;
          s.charging_threshold = cfg.charging_threshold * cfg.capacity;
          s.requesting = s.charging_threshold <= 0.0 || s.battery_level <= s.charging_threshold;
        }
      }
    }

    for (std::size_t t = 1; t <= steps; ++t) {
      if (thresholded) {
        for (std::size_t u = 0; u < n; ++u) eligible[u] = states[0][0][u].requesting ? 1 : 0;
      }
      std::span<double> nearest;
      if (want_nearest) nearest = power_of(true);
      evaluator.evaluate(in.tracks, t, eligible, power_of(false), nearest, audit);

      for (std::size_t l = 0; l < lanes.size(); ++l) {
        Lane& lane = lanes[l];
        ReplicationResult& res = lane.res;
        const std::vector<double>& power = lane.power;
        if (record_samples) {
          for (std::size_t u = 0; u < n; ++u) {
            ++res.user_steps;
            if (power[u] > 0.0) {
              ++res.receiving;
              res.samples.add(eta * power[u]);
              lane.collected[u] += eta * power[u] * dt;
              lane.receiving_time[u] += dt;
            }
          }
        }
        for (std::size_t i = 0; i < rates.size(); ++i) {
          auto& acct = res.energy[rates[i]];
          for (std::size_t u = 0; u < n; ++u) {
            auto& s = states[l][i][u];
            if (s.battery_level > 0.0) {
              ++active[l][i];
              was_empty[l][i][u] = 0;
            } else {
              if (!was_empty[l][i][u]) res.outage_episodes[rates[i]] += 1.0;
              was_empty[l][i][u] = 1;
              res.outage_time[rates[i]] += dt;
            }
            const BatteryFlows f = battery_flows(s, power[u], eta, dt);
            acct.harvested += f.harvested;
            acct.consumed += f.consumed;
            acct.overflow += f.overflow;
            s = f.state;
          }
        }
      }
    }

    for (std::size_t l = 0; l < lanes.size(); ++l) {
      for (std::size_t i = 0; i < rates.size(); ++i) {
        const std::size_t k = rates[i];
        lanes[l].res.andot[k] =
            static_cast<double>(active[l][i]) / static_cast<double>(n * steps);
        double stored = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
          stored += states[l][i][u].battery_level - in.initial_fraction[u] * cfg.capacity;
        }
        lanes[l].res.energy[k].stored_delta = stored;
      }
    }
  }

  std::vector<ReplicationResult> out;
  for (auto& lane : lanes) {
    for (std::size_t u = 0; u < n; ++u) {
      if (lane.receiving_time[u] > 0.0) {
        lane.res.user_rates.push_back(lane.collected[u] / lane.receiving_time[u]);
      }
    }
    lane.res.audit = audit;
    out.push_back(std::move(lane.res));
  }
  return out;
}

SimMetrics finalize(const ScenarioConfig& cfg, std::vector<ReplicationResult>& reps) {
  SimMetrics m;
  const std::size_t n_rates = cfg.discharge_rates.size();
  m.discharge_rates = cfg.discharge_rates;
  m.replications = reps.size();
  m.andot_replications.assign(n_rates, {});
  m.andot_mean.assign(n_rates, 0.0);
  m.andot_std.assign(n_rates, 0.0);
  m.outage_events.assign(n_rates, 0.0);
  m.mean_outage_duration.assign(n_rates, 0.0);
  m.energy.assign(n_rates, {});
  std::uint64_t receiving = 0;
  std::uint64_t user_steps = 0;
  std::vector<double> episodes(n_rates, 0.0);
  std::vector<double> outage_time(n_rates, 0.0);
  for (auto& r : reps) {
    for (std::size_t k = 0; k < n_rates; ++k) {
      m.andot_replications[k].push_back(r.andot[k]);
      episodes[k] += r.outage_episodes[k];
      outage_time[k] += r.outage_time[k];
      m.energy[k].harvested += r.energy[k].harvested;
      m.energy[k].consumed += r.energy[k].consumed;
      m.energy[k].overflow += r.energy[k].overflow;
      m.energy[k].stored_delta += r.energy[k].stored_delta;
    }
    m.user_collection_rates.insert(m.user_collection_rates.end(), r.user_rates.begin(),
                                   r.user_rates.end());
    m.step_samples.merge(r.samples);
    receiving += r.receiving;
    user_steps += r.user_steps;
    m.audit.merge(r.audit);
  }
  const double reps_n = static_cast<double>(reps.size());
  for (std::size_t k = 0; k < n_rates; ++k) {
    const auto& v = m.andot_replications[k];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / reps_n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    m.andot_mean[k] = mean;
    m.andot_std[k] = v.size() > 1 ? std::sqrt(ss / (reps_n - 1.0)) : 0.0;
    m.outage_events[k] = episodes[k] / (reps_n * static_cast<double>(cfg.n_users));
    m.mean_outage_duration[k] = episodes[k] > 0.0 ? outage_time[k] / episodes[k] : 0.0;
  }
  m.receiving_fraction =
      user_steps > 0 ? static_cast<double>(receiving) / static_cast<double>(user_steps) : 0.0;
  return m;
}

std::size_t worker_count(const ScenarioConfig& cfg, std::size_t jobs) {
  std::size_t w = cfg.workers;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, jobs));
}

/// Runs job(r) for r in [0, count) on the configured number of threads.
template <typename Job>
void for_each_replication(std::size_t count, std::size_t workers, Job&& job) {
  if (workers <= 1) {
    for (std::size_t r = 0; r < count; ++r) job(r);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t r = w; r < count; r += workers) job(r);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ScenarioConfig normalized(ScenarioConfig cfg) {
  cfg.mobility.time_step = cfg.time_step;
  return cfg;
}

}  // namespace

SimMetrics run_simulation(const ScenarioConfig& input) {
  const ScenarioConfig cfg = normalized(input);
  cfg.validate();
  const TrajectoryBuilder builder(cfg.mobility, cfg.steps() * cfg.time_step, cfg.area);
  std::vector<ReplicationResult> reps(cfg.replications);
  for_each_replication(cfg.replications, worker_count(cfg, cfg.replications),
                       [&](std::size_t r) {
                         const ReplicationInputs in = prepare_inputs(cfg, r, builder);
                         const std::vector<Point> sbs = deploy(cfg, r);
                         reps[r] = std::move(simulate_replication(cfg, in, sbs).front());
                       });
  return finalize(cfg, reps);
}

std::vector<Point> replication_deployment(const ScenarioConfig& input, std::size_t rep) {
  const ScenarioConfig cfg = normalized(input);
  cfg.validate();
  return deploy(cfg, rep);
}

std::vector<Trajectory> replication_trajectories(const ScenarioConfig& input, std::size_t rep,
                                                 std::size_t max_steps) {
  const ScenarioConfig cfg = normalized(input);
  cfg.validate();
  const TrajectoryBuilder builder(cfg.mobility, cfg.steps() * cfg.time_step, cfg.area);
  std::vector<Trajectory> out;
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    Trajectory t = builder.build(derive_seed(
        cfg.master_seed, {rep, static_cast<std::uint64_t>(Stream::Mobility), u}));
    if (t.positions.size() > max_steps + 1) t.positions.resize(max_steps + 1);
    out.push_back(std::move(t));
  }
  return out;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "sbs" || name == "sbs_density") return SweepAxis::SbsDensity;
  if (name == "speed" || name == "user_speed") return SweepAxis::UserSpeed;
  if (name == "users" || name == "user_density") return SweepAxis::UserDensity;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SbsDensity: return "sbs";
    case SweepAxis::UserSpeed: return "speed";
    case SweepAxis::UserDensity: return "users";
  }
  return "unknown";
}

std::string SweepVariant::label() const {
  return mode_name(mode) + (one_beam_only ? "+one_beam" : "");
}

ScenarioConfig with_axis_value(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::SbsDensity:
      if (!(value >= 0.0) || value != std::floor(value)) {
        throw std::invalid_argument("SBS count must be a non-negative integer");
      }
      cfg.n_sbs = static_cast<std::size_t>(value);
      break;
    case SweepAxis::UserSpeed:
      cfg.mobility.mean_speed = value;
      break;
    case SweepAxis::UserDensity:
      if (!(value >= 1.0) || value != std::floor(value)) {
        throw std::invalid_argument("user count must be a positive integer");
      }
      cfg.n_users = static_cast<std::size_t>(value);
      break;
  }
  return cfg;
}

std::vector<SweepPoint> sweep(const ScenarioConfig& input, SweepAxis axis,
                              const std::vector<double>& values,
                              const std::vector<SweepVariant>& variants) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (variants.empty()) throw std::invalid_argument("sweep needs at least one variant");
  const ScenarioConfig base = normalized(input);

  // One config per (value, variant), validated up front.
  std::vector<ScenarioConfig> configs;
  for (double v : values) {
    for (const auto& var : variants) {
      ScenarioConfig c = with_axis_value(base, axis, v);
      c.mode = var.mode;
      c.one_beam_only = var.one_beam_only;
      c.validate();
      configs.push_back(std::move(c));
    }
  }
  const std::size_t n_var = variants.size();
  const std::size_t reps_n = base.replications;

  // A one-beam variant shares the scheduling pass of the multi-source variant
  // with the same antenna mode, which is exact when no threshold gates requests.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> twin_of(n_var, kNone);
  std::vector<bool> paired(n_var, false);
  if (base.charging_threshold <= 0.0) {
    for (std::size_t k = 0; k < n_var; ++k) {
      if (variants[k].one_beam_only) continue;
      for (std::size_t m = 0; m < n_var; ++m) {
        if (variants[m].one_beam_only && !paired[m] &&
            variants[m].mode == variants[k].mode) {
          twin_of[k] = m;
          paired[m] = true;
          break;
        }
      }
    }
  }
  std::vector<std::vector<ReplicationResult>> results(
      configs.size(), std::vector<ReplicationResult>(reps_n));

  // Mobility only depends on the value for the speed and user axes; for the
  // SBS axis all points of a replication share one set of trajectories.
  std::vector<TrajectoryBuilder> builders;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    if (axis == SweepAxis::SbsDensity && vi > 0) break;
    const auto& c = configs[vi * n_var];
    builders.emplace_back(c.mobility, c.steps() * c.time_step, c.area);
  }

  for_each_replication(reps_n, worker_count(base, reps_n), [&](std::size_t r) {
    std::optional<ReplicationInputs> shared;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      const ScenarioConfig& head = configs[vi * n_var];
      std::optional<ReplicationInputs> own;
      const ReplicationInputs* in = nullptr;
      if (axis == SweepAxis::SbsDensity) {
        if (!shared) shared = prepare_inputs(head, r, builders.front());
        in = &*shared;
      } else {
        own = prepare_inputs(head, r, builders[vi]);
        in = &*own;
      }
      const std::vector<Point> sbs = deploy(head, r);
      for (std::size_t k = 0; k < n_var; ++k) {
        if (twin_of[k] == kNone && paired[k]) continue;  // filled by its multi-source twin
        auto lanes = simulate_replication(configs[vi * n_var + k], *in, sbs, twin_of[k] != kNone);
        results[vi * n_var + k][r] = std::move(lanes[0]);
        if (twin_of[k] != kNone) results[vi * n_var + twin_of[k]][r] = std::move(lanes[1]);
      }
    }
  });

  std::vector<SweepPoint> out;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t k = 0; k < n_var; ++k) {
      const std::size_t idx = vi * n_var + k;
      out.push_back({values[vi], variants[k].label(), finalize(configs[idx], results[idx])});
    }
  }
  return out;
}

}  // namespace rfcharge
