#include "rfcharge/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfcharge/config.hpp"
#include "rfcharge/feasibility.hpp"
#include "rfcharge/format.hpp"
#include "rfcharge/simengine.hpp"

namespace rfcharge {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out_dir = "out";
  std::string config_path;
};

class RunContext {
 public:
  RunContext(std::string command, std::vector<std::string> argv, const GlobalOptions& g)
      : command_(std::move(command)), argv_(std::move(argv)), global_(g),
        start_(std::chrono::steady_clock::now()) {
    fs::create_directories(g.out_dir);
  }

  std::string write(const std::string& name, const std::string& content) {
    const fs::path p = fs::path(global_.out_dir) / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
    outputs_.push_back(p.string());
    return p.string();
  }

  void write_manifest(const Json& config_snapshot, std::uint64_t seed) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json m;
    m["tool"] = "rfcharge";
    m["version"] = kToolVersion;
    m["command"] = command_;
    m["argv"] = argv_;
    m["master_seed"] = seed;
    m["config"] = config_snapshot;
    m["wall_clock_s"] = elapsed;
    m["outputs"] = outputs_;
    const fs::path p = fs::path(global_.out_dir) / "manifest.json";
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << m.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  GlobalOptions global_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
};

Json config_json(const KeyValues& kv) {
  Json j = Json::object();
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

std::string rate_label(double watts) {
  return format_double(std::round(watts * 1e6 * 1e6) / 1e6) + "uW";
}

// ---------------------------------------------------------------------------
// feasibility

struct FeasibilityArgs {
  std::string bands_path;
  double consumed_uw = 5.0;
  double autonomy_min = 10.0;
  double sensitivity_dbm = -20.0;
  double reference_m = 10.0;
  bool apply_efficiency = false;
  bool check_reference = false;
};

int cmd_feasibility(const FeasibilityArgs& a, const GlobalOptions& g,
                    const std::vector<std::string>& argv, std::ostream& out,
                    std::ostream& err) {
  if (a.check_reference && !a.bands_path.empty()) {
    err << "--check-reference compares the default band plan; drop --bands\n";
    return kExitUsage;
  }
  std::vector<BandEntry> bands;
  try {
    bands = a.bands_path.empty() ? default_band_plan() : read_band_plan(a.bands_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  ReceiverConfig rx;
  rx.sensitivity = dbm_to_watt(a.sensitivity_dbm);
  ConsumptionProfile profile{a.consumed_uw / 1e6, a.autonomy_min * 60.0};
  FeasibilityOptions opts{a.reference_m, a.apply_efficiency};
  const auto rows = feasibility_table(bands, default_modes(), rx, {}, profile, opts);

  RunContext ctx("feasibility", argv, g);
  ctx.write("feasibility.csv", feasibility_csv(rows));
  ctx.write("feasibility.json", feasibility_json(rows));
  Json snap;
  snap["bands"] = a.bands_path.empty() ? "default" : a.bands_path;
  snap["consumed_w"] = profile.consumed_power;
  snap["autonomy_s"] = profile.autonomy_target;
  snap["sensitivity_w"] = rx.sensitivity;
  snap["reference_distance_m"] = opts.reference_distance;
  snap["apply_efficiency"] = opts.apply_efficiency;
  ctx.write_manifest(snap, g.seed);

  out << "wrote " << rows.size() << " rows to " << g.out_dir << '\n';
  if (!a.check_reference) return kExitOk;

  const bool default_profile = a.consumed_uw == 5.0 && a.autonomy_min == 10.0 &&
                               a.sensitivity_dbm == -20.0 && a.reference_m == 10.0 &&
                               !a.apply_efficiency;
  if (!default_profile) {
    err << "--check-reference requires the default parameters\n";
    return kExitUsage;
  }
  const auto cmp = compare_with_reference(rows);
  out << "max relative deviation: " << format_double(cmp.max_rel_deviation * 100.0) << "%\n"
      << "max support-time deviation: "
      << format_double(cmp.max_support_time_deviation * 100.0) << "%\n"
      << "N/A mismatches: " << cmp.na_mismatches << '\n';
  for (const auto& f : cmp.failures) out << "  FAIL " << f << '\n';
  return cmp.within(0.01, 0.02) ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// simulate / sweep shared scenario options

struct ScenarioArgs {
  std::vector<std::string> overrides;  // key=value
  std::string mode;
  long sbs = -1;
  long users = -1;
  double speed_kmh = -1.0;
  double hurst = -1.0;
  double levy_alpha = -1.0;
  double duration = -1.0;
  long replications = -1;
  long workers = -1;
  bool one_beam = false;
};

void add_scenario_options(CLI::App* sub, ScenarioArgs& s) {
  sub->add_option("--set", s.overrides, "Config override, key=value (repeatable)");
  sub->add_option("--mode", s.mode, "Antenna mode")->check(CLI::IsMember({"omni", "directional"}));
  sub->add_option("--sbs", s.sbs, "Number of SBSs");
  sub->add_option("--users", s.users, "Number of users");
  sub->add_option("--speed-kmh", s.speed_kmh, "Mean user speed in km/h");
  sub->add_option("--hurst", s.hurst, "FBM mobility with this Hurst exponent");
  sub->add_option("--levy", s.levy_alpha, "Levy-flight mobility with this tail index");
  sub->add_option("--duration", s.duration, "Simulated seconds");
  sub->add_option("--replications", s.replications, "Independent replications");
  sub->add_option("--workers", s.workers, "Worker threads (0 = all cores)");
  sub->add_flag("--one-beam", s.one_beam, "Users draw energy from their nearest SBS only");
}

ScenarioConfig build_scenario(const ScenarioArgs& s, const GlobalOptions& g) {
  ScenarioConfig cfg;
  if (!g.config_path.empty()) apply_config(cfg, read_config_file(g.config_path));
  KeyValues kv;
  for (const auto& o : s.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
    kv[trim(o.substr(0, eq))] = trim(o.substr(eq + 1));
  }
  apply_config(cfg, kv);
  if (!s.mode.empty()) {
    if (s.mode == "omni" && !std::holds_alternative<OmniAntenna>(cfg.mode)) {
      cfg.mode = OmniAntenna{};
    } else if (s.mode == "directional" && !std::holds_alternative<DirectionalArray>(cfg.mode)) {
      cfg.mode = DirectionalArray{};
    }
  }
  if (s.sbs >= 0) cfg.n_sbs = static_cast<std::size_t>(s.sbs);
  if (s.users >= 0) cfg.n_users = static_cast<std::size_t>(s.users);
  if (s.speed_kmh >= 0.0) cfg.mobility.mean_speed = s.speed_kmh / 3.6;
  if (s.hurst >= 0.0 && s.levy_alpha >= 0.0) {
    throw ConfigError("--hurst and --levy are mutually exclusive");
  }
  if (s.hurst >= 0.0) cfg.mobility.model = FbmModel{s.hurst};
  if (s.levy_alpha >= 0.0) cfg.mobility.model = LevyModel{s.levy_alpha};
  if (s.duration >= 0.0) cfg.duration = s.duration;
  if (s.replications >= 0) cfg.replications = static_cast<std::size_t>(s.replications);
  if (s.workers >= 0) cfg.workers = static_cast<std::size_t>(s.workers);
  if (s.one_beam) cfg.one_beam_only = true;
  if (g.seed_given) cfg.master_seed = g.seed;
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

Json metrics_json(const SimMetrics& m) {
  Json j;
  Json andot = Json::array();
  for (std::size_t k = 0; k < m.discharge_rates.size(); ++k) {
    Json r;
    r["discharge_rate_w"] = m.discharge_rates[k];
    r["mean"] = m.andot_mean[k];
    r["std"] = m.andot_std[k];
    r["replications"] = m.andot_replications[k];
    r["outage_episodes_per_user"] = m.outage_events[k];
    r["mean_outage_duration_s"] = m.mean_outage_duration[k];
    r["energy_harvested_j"] = m.energy[k].harvested;
    r["energy_consumed_j"] = m.energy[k].consumed;
    r["energy_overflow_j"] = m.energy[k].overflow;
    r["energy_stored_delta_j"] = m.energy[k].stored_delta;
    andot.push_back(std::move(r));
  }
  j["andot"] = std::move(andot);
  for (std::size_t k = 0; k < m.discharge_rates.size(); ++k) {
    j["andot_" + rate_label(m.discharge_rates[k])] = m.andot_mean[k];
  }
  Json energy;
  energy["users_receiving"] = m.user_collection_rates.size();
  energy["receiving_fraction"] = m.receiving_fraction;
  if (!m.user_collection_rates.empty()) {
    const EmpiricalCdf cdf(m.user_collection_rates);
    energy["user_rate_median_w"] = cdf.quantile(0.5);
    energy["user_rate_iqr_w"] = cdf.iqr();
  }
  energy["step_samples"] = m.step_samples.count();
  j["energy_collection"] = std::move(energy);
  Json audit;
  audit["sbs_steps_checked"] = m.audit.sbs_steps_checked;
  audit["beam_count_violations"] = m.audit.beam_count_violations;
  audit["power_violations"] = m.audit.power_violations;
  audit["max_active_beams"] = m.audit.max_active_beams;
  audit["max_power_ratio"] = m.audit.max_power_ratio;
  j["regulatory"] = std::move(audit);
  j["replications"] = m.replications;
  return j;
}

std::string user_cdf_csv(const SimMetrics& m) {
  std::ostringstream os;
  os << "value,cumulative_probability\n";
  if (m.user_collection_rates.empty()) return os.str();
  const EmpiricalCdf cdf(m.user_collection_rates);
  const auto& s = cdf.sorted();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 1 < s.size() && s[i + 1] == s[i]) continue;
    os << format_double(s[i]) << ','
       << format_double(static_cast<double>(i + 1) / static_cast<double>(s.size())) << '\n';
  }
  return os.str();
}

std::string sample_cdf_csv(const SimMetrics& m) {
  std::ostringstream os;
  os << "value,cumulative_probability\n";
  for (const auto& [v, p] : m.step_samples.cdf()) {
    os << format_double(v) << ',' << format_double(p) << '\n';
  }
  return os.str();
}

struct SimulateArgs {
  ScenarioArgs scenario;
  bool dump_trajectories = false;
  bool dump_deployment = false;
  std::size_t dump_steps = 1000;
};

int cmd_simulate(const SimulateArgs& a, const GlobalOptions& g,
                 const std::vector<std::string>& argv, std::ostream& out) {
  const ScenarioConfig cfg = build_scenario(a.scenario, g);
  const SimMetrics m = run_simulation(cfg);

  RunContext ctx("simulate", argv, g);
  ctx.write("summary.json", metrics_json(m).dump(2) + "\n");
  ctx.write("energy_cdf.csv", user_cdf_csv(m));
  ctx.write("energy_samples_cdf.csv", sample_cdf_csv(m));
  if (a.dump_deployment) ctx.write("deployment.csv", points_csv(replication_deployment(cfg, 0)));
  if (a.dump_trajectories) {
    ctx.write("trajectories.csv",
              trajectories_csv(replication_trajectories(cfg, 0, a.dump_steps)));
  }
  ctx.write_manifest(config_json(dump_config(cfg)), cfg.master_seed);

  for (std::size_t k = 0; k < m.discharge_rates.size(); ++k) {
    out << "ANDOT @ " << rate_label(m.discharge_rates[k]) << ": "
        << format_double(m.andot_mean[k]) << " +- " << format_double(m.andot_std[k]) << '\n';
  }
  out << "regulatory violations: " << m.audit.violations() << '\n';
  return kExitOk;
}

struct SweepArgs {
  ScenarioArgs scenario;
  std::string axis;
  std::string values;
  std::string modes = "both";
};

int cmd_sweep(const SweepArgs& a, const GlobalOptions& g, const std::vector<std::string>& argv,
              std::ostream& out, std::ostream& err) {
  SweepAxis axis;
  try {
    axis = parse_sweep_axis(a.axis);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << " (expected sbs, speed or users)\n";
    return kExitUsage;
  }
  std::vector<double> values;
  try {
    values = parse_value_list(a.values);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const ScenarioConfig cfg = build_scenario(a.scenario, g);

  std::vector<SweepVariant> variants;
  const OmniAntenna omni =
      std::holds_alternative<OmniAntenna>(cfg.mode) ? std::get<OmniAntenna>(cfg.mode) : OmniAntenna{};
  const DirectionalArray array = std::holds_alternative<DirectionalArray>(cfg.mode)
                                     ? std::get<DirectionalArray>(cfg.mode)
                                     : DirectionalArray{};
  if (a.modes == "omni" || a.modes == "both") variants.push_back({omni, cfg.one_beam_only});
  if (a.modes == "directional" || a.modes == "both") {
    variants.push_back({array, cfg.one_beam_only});
  }
  if (a.scenario.one_beam) {
    // Also emit the multi-source baseline next to the nearest-SBS variant.
    std::vector<SweepVariant> both;
    for (auto v : variants) {
      v.one_beam_only = false;
      both.push_back(v);
      v.one_beam_only = true;
      both.push_back(v);
    }
    variants = std::move(both);
  }

  std::vector<double> engine_values = values;
  if (axis == SweepAxis::UserSpeed) {
    for (double& v : engine_values) v /= 3.6;
  }
  const auto points = sweep(cfg, axis, engine_values, variants);

  std::ostringstream andot;
  andot << "axis_value,mode,discharge_rate,andot_mean,andot_std\n";
  std::ostringstream energy;
  energy << "axis_value,mode,user_rate_median_w,user_rate_iqr_w,receiving_fraction\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const double shown = values[i / variants.size()];
    for (std::size_t k = 0; k < p.metrics.discharge_rates.size(); ++k) {
      andot << format_double(shown) << ',' << p.mode << ','
            << format_double(p.metrics.discharge_rates[k]) << ','
            << format_double(p.metrics.andot_mean[k]) << ','
            << format_double(p.metrics.andot_std[k]) << '\n';
    }
    energy << format_double(shown) << ',' << p.mode << ',';
    if (p.metrics.user_collection_rates.empty()) {
      energy << "0,0,";
    } else {
      const EmpiricalCdf cdf(p.metrics.user_collection_rates);
      energy << format_double(cdf.quantile(0.5)) << ',' << format_double(cdf.iqr()) << ',';
    }
    energy << format_double(p.metrics.receiving_fraction) << '\n';
  }

  RunContext ctx("sweep", argv, g);
  ctx.write("sweep_andot.csv", andot.str());
  ctx.write("sweep_energy.csv", energy.str());
  Json snap = config_json(dump_config(cfg));
  snap["sweep.axis"] = axis_name(axis);
  snap["sweep.values"] = a.values;
  snap["sweep.modes"] = a.modes;
  ctx.write_manifest(snap, cfg.master_seed);
  out << "wrote " << points.size() << " sweep points to " << g.out_dir << '\n';
  return kExitOk;
}

int cmd_replay(const std::string& manifest_path, const GlobalOptions& g, bool out_dir_given,
               std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) {
    err << "error: cannot open manifest " << manifest_path << '\n';
    return kExitUsage;
  }
  Json m;
  try {
    m = Json::parse(in);
  } catch (const std::exception& e) {
    err << "error: malformed manifest: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    err << "error: manifest has no argv\n";
    return kExitUsage;
  }
  std::vector<std::string> args;
  const auto& stored = m["argv"];
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const std::string a = stored[i].get<std::string>();
    if (out_dir_given && a == "--out-dir") {
      ++i;
      continue;
    }
    if (out_dir_given && a.rfind("--out-dir=", 0) == 0) continue;
    args.push_back(a);
  }
  if (out_dir_given) {
    args.insert(args.begin(), g.out_dir);
    args.insert(args.begin(), "--out-dir");
  }
  return run_cli(args, out, err);
}

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
  auto number = [](const std::string& s) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      throw std::invalid_argument("invalid value '" + s + "'");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("invalid range " + text);
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(number(p));
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"RF charging feasibility and system-level simulation for wearables", "rfcharge"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--config", g.config_path, "Scenario config file (key = value)");
  app.set_version_flag("--version", kToolVersion);

  FeasibilityArgs fa;
  auto* feas = app.add_subcommand("feasibility", "Per-band feasibility table (CSV + JSON)");
  feas->add_option("--bands", fa.bands_path, "Band plan CSV with a band_hz column");
  feas->add_option("--consumed-uw", fa.consumed_uw, "Device consumption, uW");
  feas->add_option("--autonomy-min", fa.autonomy_min, "Autonomy target, minutes");
  feas->add_option("--sensitivity-dbm", fa.sensitivity_dbm, "Rectifier sensitivity, dBm");
  feas->add_option("--reference-m", fa.reference_m, "Reference distance, m");
  feas->add_flag("--apply-efficiency", fa.apply_efficiency,
                 "Include conversion efficiency in harvested power");
  feas->add_flag("--check-reference,--check-paper", fa.check_reference,
                 "Compare against the published reference table");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run the charging simulation");
  add_scenario_options(sim, sa.scenario);
  sim->add_flag("--dump-trajectories", sa.dump_trajectories,
                "Write replication-0 trajectories (first --dump-steps steps)");
  sim->add_option("--dump-steps", sa.dump_steps, "Steps per trajectory in the dump");
  sim->add_flag("--dump-deployment", sa.dump_deployment, "Write replication-0 SBS positions");

  SweepArgs wa;
  auto* sw = app.add_subcommand("sweep", "Sweep one scenario parameter");
  add_scenario_options(sw, wa.scenario);
  sw->add_option("--axis", wa.axis, "sbs, speed (km/h) or users")->required();
  sw->add_option("--values", wa.values, "start:stop:step or comma list")->required();
  sw->add_option("--modes", wa.modes, "omni, directional or both")
      ->check(CLI::IsMember({"omni", "directional", "both"}));

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = app.count("--seed") > 0;

  try {
    if (*feas) return cmd_feasibility(fa, g, args, out, err);
    if (*sim) return cmd_simulate(sa, g, args, out);
    if (*sw) return cmd_sweep(wa, g, args, out, err);
    if (*replay) return cmd_replay(manifest_path, g, app.count("--out-dir") > 0, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace rfcharge
