#include "rfcharge/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "rfcharge/format.hpp"

namespace rfcharge {

namespace {

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid count for " + key + ": '" + text + "'");
  }
  return v;
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid seed for " + key + ": '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

std::string join(const std::vector<double>& v, double scale = 1.0) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i] * scale);
  }
  return out;
}

constexpr double kDeg = std::numbers::pi / 180.0;

DirectionalArray& array_of(ScenarioConfig& c) {
  // Array parameters are kept even while the omni mode is selected.
  static thread_local DirectionalArray scratch;
  if (auto* a = std::get_if<DirectionalArray>(&c.mode)) return *a;
  return scratch;
}

struct KeySpec {
  std::string key;
  std::string help;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;  // null: input-only alias
};

const std::vector<KeySpec>& specs() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    auto num = [&t](std::string key, std::string help, auto field) {
      t.push_back({key, std::move(help),
                   [key, field](ScenarioConfig& c, const std::string& v) {
                     field(c) = parse_number(key, v);
                   },
                   [field](const ScenarioConfig& c) {
                     return format_double(field(const_cast<ScenarioConfig&>(c)));
                   }});
    };
    auto count = [&t](std::string key, std::string help, auto field) {
      t.push_back({key, std::move(help),
                   [key, field](ScenarioConfig& c, const std::string& v) {
                     field(c) = parse_count(key, v);
                   },
                   [field](const ScenarioConfig& c) {
                     return std::to_string(field(const_cast<ScenarioConfig&>(c)));
                   }});
    };
    auto flag = [&t](std::string key, std::string help, auto field) {
      t.push_back({key, std::move(help),
                   [key, field](ScenarioConfig& c, const std::string& v) {
                     field(c) = parse_bool(key, v);
                   },
                   [field](const ScenarioConfig& c) {
                     return std::string(field(const_cast<ScenarioConfig&>(c)) ? "true"
                                                                              : "false");
                   }});
    };

    num("area.width_m", "area width", [](ScenarioConfig& c) -> double& { return c.area.width; });
    num("area.height_m", "area height",
        [](ScenarioConfig& c) -> double& { return c.area.height; });

    count("deployment.n_sbs", "number of SBSs",
          [](ScenarioConfig& c) -> std::size_t& { return c.n_sbs; });
    num("deployment.strauss_radius_m", "Strauss interaction radius",
        [](ScenarioConfig& c) -> double& { return c.strauss_radius; });
    num("deployment.strauss_gamma", "Strauss interaction parameter in [0,1]",
        [](ScenarioConfig& c) -> double& { return c.strauss_gamma; });
    count("deployment.burn_in_sweeps", "Metropolis-Hastings burn-in sweeps",
          [](ScenarioConfig& c) -> std::size_t& { return c.strauss_burn_in; });

    count("users.count", "number of users",
          [](ScenarioConfig& c) -> std::size_t& { return c.n_users; });
    t.push_back({"users.discharge_rates_w", "comma-separated device discharge rates, W",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.discharge_rates = parse_list("users.discharge_rates_w", v);
                 },
                 [](const ScenarioConfig& c) { return join(c.discharge_rates); }});
    t.push_back({"users.discharge_rates_uw", "comma-separated discharge rates, uW",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.discharge_rates = parse_list("users.discharge_rates_uw", v);
                   for (double& r : c.discharge_rates) r /= 1e6;
                 },
                 nullptr});
    num("users.capacity_j", "battery capacity, J",
        [](ScenarioConfig& c) -> double& { return c.capacity; });
    num("users.charging_threshold", "charge-request level as a fraction of capacity (0 = always)",
        [](ScenarioConfig& c) -> double& { return c.charging_threshold; });

    t.push_back({"mobility.model", "fbm or levy",
                 [](ScenarioConfig& c, const std::string& v) {
                   const auto m = trim(v);
                   if (m == "fbm") {
                     if (!std::holds_alternative<FbmModel>(c.mobility.model)) {
                       c.mobility.model = FbmModel{};
                     }
                   } else if (m == "levy") {
                     if (!std::holds_alternative<LevyModel>(c.mobility.model)) {
                       c.mobility.model = LevyModel{};
                     }
                   } else {
                     throw ConfigError("invalid value for mobility.model: '" + v + "'");
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(std::holds_alternative<FbmModel>(c.mobility.model)
                                          ? "fbm"
                                          : "levy");
                 }});
    t.push_back({"mobility.hurst", "FBM Hurst exponent",
                 [](ScenarioConfig& c, const std::string& v) {
                   auto* f = std::get_if<FbmModel>(&c.mobility.model);
                   if (!f) throw ConfigError("mobility.hurst requires mobility.model = fbm");
                   f->hurst = parse_number("mobility.hurst", v);
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   if (const auto* f = std::get_if<FbmModel>(&c.mobility.model)) {
                     return format_double(f->hurst);
                   }
                   return {};
                 }});
    t.push_back({"mobility.alpha", "Levy tail index",
                 [](ScenarioConfig& c, const std::string& v) {
                   auto* l = std::get_if<LevyModel>(&c.mobility.model);
                   if (!l) throw ConfigError("mobility.alpha requires mobility.model = levy");
                   l->alpha = parse_number("mobility.alpha", v);
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   if (const auto* l = std::get_if<LevyModel>(&c.mobility.model)) {
                     return format_double(l->alpha);
                   }
                   return {};
                 }});
    num("mobility.speed_mps", "mean user speed, m/s",
        [](ScenarioConfig& c) -> double& { return c.mobility.mean_speed; });
    t.push_back({"mobility.speed_kmh", "mean user speed, km/h",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.mobility.mean_speed = parse_number("mobility.speed_kmh", v) / 3.6;
                 },
                 nullptr});

    t.push_back({"radio.band_hz", "carrier frequency, Hz",
                 [](ScenarioConfig& c, const std::string& v) {
                   const double hz = parse_number("radio.band_hz", v);
                   if (!(hz > 0.0) || !std::isfinite(hz)) {
                     throw ConfigError("radio.band_hz must be > 0");
                   }
                   c.band = RadioBand(hz);
                 },
                 [](const ScenarioConfig& c) { return format_double(c.band.center_frequency()); }});
    t.push_back({"radio.mode", "omni or directional",
                 [](ScenarioConfig& c, const std::string& v) {
                   const auto m = trim(v);
                   if (m == "omni") {
                     if (!std::holds_alternative<OmniAntenna>(c.mode)) c.mode = OmniAntenna{};
                   } else if (m == "directional") {
                     if (!std::holds_alternative<DirectionalArray>(c.mode)) {
                       c.mode = DirectionalArray{};
                     }
                   } else {
                     throw ConfigError("invalid value for radio.mode: '" + v + "'");
                   }
                 },
                 [](const ScenarioConfig& c) { return mode_name(c.mode); }});
    t.push_back({"radio.omni_gain_dbi", "omni antenna gain, dBi",
                 [](ScenarioConfig& c, const std::string& v) {
                   const double g = parse_number("radio.omni_gain_dbi", v);
                   if (auto* o = std::get_if<OmniAntenna>(&c.mode)) o->gain_dbi = g;
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   if (const auto* o = std::get_if<OmniAntenna>(&c.mode)) {
                     return format_double(o->gain_dbi);
                   }
                   return {};
                 }});
    auto array_num = [&t](std::string key, std::string help, auto field) {
      t.push_back({key, std::move(help),
                   [key, field](ScenarioConfig& c, const std::string& v) {
                     field(array_of(c)) = parse_number(key, v);
                   },
                   [field](const ScenarioConfig& c) -> std::string {
                     if (const auto* a = std::get_if<DirectionalArray>(&c.mode)) {
                       return format_double(field(const_cast<DirectionalArray&>(*a)));
                     }
                     return {};
                   }});
    };
    array_num("radio.array_gain_dbi", "directional array gain, dBi",
              [](DirectionalArray& a) -> double& { return a.array_gain_dbi; });
    array_num("radio.element_gain_dbi", "array element gain, dBi",
              [](DirectionalArray& a) -> double& { return a.element_gain_dbi; });
    t.push_back({"radio.elements_per_side", "array elements per side",
                 [](ScenarioConfig& c, const std::string& v) {
                   array_of(c).elements_per_side =
                       static_cast<int>(parse_count("radio.elements_per_side", v));
                 },
                 [](const ScenarioConfig& c) -> std::string {
                   if (const auto* a = std::get_if<DirectionalArray>(&c.mode)) {
                     return std::to_string(a->elements_per_side);
                   }
                   return {};
                 }});
    t.push_back({"radio.beam_width_deg", "beam width used for clustering, degrees",
                 [](ScenarioConfig& c, const std::string& v) {
                   array_of(c).beam_width = parse_number("radio.beam_width_deg", v) * kDeg;
                 },
                 nullptr});
    array_num("radio.beam_width_rad", "beam width used for clustering, rad",
              [](DirectionalArray& a) -> double& { return a.beam_width; });

    num("regulatory.base_limit_dbm", "conducted power limit, dBm",
        [](ScenarioConfig& c) -> double& { return c.rule.base_limit_dbm; });
    num("regulatory.gain_threshold_dbi", "gain above which the limit is reduced",
        [](ScenarioConfig& c) -> double& { return c.rule.gain_threshold_dbi; });
    t.push_back({"regulatory.reduction", "one_per_three or one_per_one",
                 [](ScenarioConfig& c, const std::string& v) {
                   const auto m = trim(v);
                   if (m == "one_per_three") {
                     c.rule.reduction_variant = ReductionVariant::OneDbPerThreeDbi;
                   } else if (m == "one_per_one") {
                     c.rule.reduction_variant = ReductionVariant::OneDbPerOneDbi;
                   } else {
                     throw ConfigError("invalid value for regulatory.reduction: '" + v + "'");
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.rule.reduction_variant ==
                                              ReductionVariant::OneDbPerThreeDbi
                                          ? "one_per_three"
                                          : "one_per_one");
                 }});
    t.push_back({"regulatory.step_mode", "floor or continuous",
                 [](ScenarioConfig& c, const std::string& v) {
                   const auto m = trim(v);
                   if (m == "floor") {
                     c.rule.step_mode = StepMode::FloorSteps;
                   } else if (m == "continuous") {
                     c.rule.step_mode = StepMode::Continuous;
                   } else {
                     throw ConfigError("invalid value for regulatory.step_mode: '" + v + "'");
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.rule.step_mode == StepMode::FloorSteps ? "floor"
                                                                               : "continuous");
                 }});
    num("regulatory.headroom_db", "aggregate multi-beam headroom, dB",
        [](ScenarioConfig& c) -> double& { return c.rule.aggregate_headroom_db; });

    num("receiver.gain_dbi", "receiver antenna gain, dBi",
        [](ScenarioConfig& c) -> double& { return c.rx.rx_gain_dbi; });
    num("receiver.sensitivity_w", "rectifier sensitivity, W",
        [](ScenarioConfig& c) -> double& { return c.rx.sensitivity; });
    t.push_back({"receiver.sensitivity_dbm", "rectifier sensitivity, dBm",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.rx.sensitivity = dbm_to_watt(parse_number("receiver.sensitivity_dbm", v));
                 },
                 nullptr});
    num("receiver.efficiency", "RF-to-storage conversion efficiency",
        [](ScenarioConfig& c) -> double& { return c.rx.conversion_efficiency; });

    t.push_back({"scheduler.shadow_epsilon_deg", "shadowing angular tolerance, degrees",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.scheduler.shadow_epsilon =
                       parse_number("scheduler.shadow_epsilon_deg", v) * kDeg;
                 },
                 nullptr});
    num("scheduler.shadow_epsilon_rad", "shadowing angular tolerance, rad",
        [](ScenarioConfig& c) -> double& { return c.scheduler.shadow_epsilon; });
    t.push_back({"scheduler.policy", "time_divided or wide_beam",
                 [](ScenarioConfig& c, const std::string& v) {
                   const auto m = trim(v);
                   if (m == "time_divided") {
                     c.scheduler.policy = ClusterPolicy::TimeDivided;
                   } else if (m == "wide_beam") {
                     c.scheduler.policy = ClusterPolicy::WideBeam;
                   } else {
                     throw ConfigError("invalid value for scheduler.policy: '" + v + "'");
                   }
                 },
                 [](const ScenarioConfig& c) {
                   return std::string(c.scheduler.policy == ClusterPolicy::TimeDivided
                                          ? "time_divided"
                                          : "wide_beam");
                 }});
    flag("scheduler.cross_spillover", "count off-axis energy from beams aimed at others",
         [](ScenarioConfig& c) -> bool& { return c.scheduler.cross_spillover; });

    num("sim.duration_s", "simulated time, s",
        [](ScenarioConfig& c) -> double& { return c.duration; });
    num("sim.time_step_s", "time step, s",
        [](ScenarioConfig& c) -> double& { return c.time_step; });
    count("sim.replications", "independent replications",
          [](ScenarioConfig& c) -> std::size_t& { return c.replications; });
    flag("sim.one_beam_only", "users draw energy from their nearest SBS only",
         [](ScenarioConfig& c) -> bool& { return c.one_beam_only; });
    t.push_back({"sim.seed", "master seed",
                 [](ScenarioConfig& c, const std::string& v) {
                   c.master_seed = parse_seed("sim.seed", v);
                 },
                 [](const ScenarioConfig& c) { return std::to_string(c.master_seed); }});
    num("sim.min_link_distance_m", "far-field clamp on link distance, m",
        [](ScenarioConfig& c) -> double& { return c.min_link_distance; });
    flag("sim.stratified_initial_charge", "stratify initial charges across users",
         [](ScenarioConfig& c) -> bool& { return c.stratified_initial_charge; });
    count("sim.workers", "replication worker threads (0 = all cores)",
          [](ScenarioConfig& c) -> std::size_t& { return c.workers; });
    return t;
  }();
  return table;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    out[key] = value;
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(ScenarioConfig& cfg, const KeyValues& values) {
  std::vector<std::string> unknown;
  for (const auto& [key, _] : values) {
    const bool known = std::any_of(specs().begin(), specs().end(),
                                   [&](const KeySpec& s) { return s.key == key; });
    if (!known) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
  // Model and mode selectors first so that their parameters land in the
  // right variant alternative.
  for (const char* first : {"mobility.model", "radio.mode"}) {
    if (auto it = values.find(first); it != values.end()) {
      for (const auto& s : specs()) {
        if (s.key == first) s.set(cfg, it->second);
      }
    }
  }
  for (const auto& s : specs()) {
    if (s.key == "mobility.model" || s.key == "radio.mode") continue;
    if (auto it = values.find(s.key); it != values.end()) {
      if (it->second.empty()) continue;
      s.set(cfg, it->second);
    }
  }
}

KeyValues dump_config(const ScenarioConfig& cfg) {
  KeyValues out;
  for (const auto& s : specs()) {
    if (!s.get) continue;
    auto v = s.get(cfg);
    if (!v.empty()) out[s.key] = std::move(v);
  }
  return out;
}

std::string format_config(const KeyValues& values) {
  std::string out;
  for (const auto& [k, v] : values) out += k + " = " + v + "\n";
  return out;
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = [] {
    std::vector<std::pair<std::string, std::string>> k;
    for (const auto& s : specs()) k.emplace_back(s.key, s.help);
    return k;
  }();
  return keys;
}

}  // namespace rfcharge
