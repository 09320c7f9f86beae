#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfcharge/cli.hpp"
#include "rfcharge/config.hpp"
#include "rfcharge/format.hpp"

using namespace rfcharge;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rfcharge_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<std::string> kQuick{"--users", "20", "--duration", "2000",
                                      "--replications", "2", "--set",
                                      "deployment.burn_in_sweeps=100"};

std::vector<std::string> join(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto kv = parse_config_text(
      "# comment\n"
      "deployment.n_sbs = 12\n"
      "[users]\n"
      "count = 50 ; trailing\n"
      "discharge_rates_uw = 5, 50\n");
  CHECK(kv.at("deployment.n_sbs") == "12");
  CHECK(kv.at("users.count") == "50");
  ScenarioConfig c;
  apply_config(c, kv);
  CHECK(c.n_sbs == 12);
  CHECK(c.n_users == 50);
  CHECK(c.discharge_rates == std::vector<double>{5e-6, 5e-5});

  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[broken\n"), ConfigError);
}

TEST_CASE("config errors name the key") {
  ScenarioConfig c;
  try {
    apply_config(c, {{"users.count", "5"}, {"bogus.key", "1"}});
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_config(c, {{"users.count", "many"}}), ConfigError);
  CHECK_THROWS_AS(apply_config(c, {{"sim.one_beam_only", "maybe"}}), ConfigError);
  CHECK_THROWS_AS(apply_config(c, {{"mobility.model", "walk"}}), ConfigError);
  CHECK_THROWS_AS(apply_config(c, {{"mobility.alpha", "1.5"}}), ConfigError);
}

TEST_CASE("config dump round trip") {
  ScenarioConfig c;
  apply_config(c, {{"mobility.model", "levy"},
                   {"mobility.alpha", "1.3"},
                   {"radio.mode", "omni"},
                   {"radio.band_hz", "2.1e9"},
                   {"mobility.speed_kmh", "6"},
                   {"receiver.sensitivity_dbm", "-25"},
                   {"sim.seed", "18446744073709551615"},
                   {"scheduler.policy", "wide_beam"},
                   {"regulatory.step_mode", "continuous"}});
  CHECK(std::get<LevyModel>(c.mobility.model).alpha == 1.3);
  CHECK(c.mobility.mean_speed == Approx(6.0 / 3.6));
  CHECK(c.rx.sensitivity == Approx(dbm_to_watt(-25.0)));
  CHECK(c.master_seed == 18446744073709551615ull);
  const auto dumped = dump_config(c);
  ScenarioConfig d;
  apply_config(d, dumped);
  CHECK(dump_config(d) == dumped);
  CHECK(parse_config_text(format_config(dumped)) == dumped);
  for (const auto& [k, v] : dumped) {
    const bool documented = std::any_of(config_keys().begin(), config_keys().end(),
                                        [&](const auto& p) { return p.first == k; });
    CHECK(documented);
  }
}

TEST_CASE("value lists") {
  CHECK(parse_value_list("5:30:5") == std::vector<double>{5, 10, 15, 20, 25, 30});
  CHECK(parse_value_list("1,3,6,12") == std::vector<double>{1, 3, 6, 12});
  CHECK(parse_value_list("0.1:0.3:0.1").size() == 3);
  CHECK(parse_value_list("7") == std::vector<double>{7});
  CHECK_THROWS(parse_value_list("1:2"));
  CHECK_THROWS(parse_value_list("3:1:1"));
  CHECK_THROWS(parse_value_list("a,b"));
  CHECK_THROWS(parse_value_list(""));
}

TEST_CASE("feasibility command") {
  const auto dir = scratch("feas");
  auto r = cli({"--out-dir", dir.string(), "feasibility"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "feasibility.csv"));
  CHECK(fs::exists(dir / "feasibility.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "feasibility");
  CHECK(manifest["outputs"].size() == 2);
  CHECK(line_count(slurp(dir / "feasibility.csv")) == 17);

  r = cli({"--out-dir", dir.string(), "feasibility", "--consumed-uw", "10"});
  CHECK(r.code == 0);
  std::istringstream csv(slurp(dir / "feasibility.csv"));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(std::abs(std::stod(split_csv_line(first)[5]) - 11.7) < 0.2);

  std::ofstream(dir / "one.csv") << "band_hz\n915e6\n";
  r = cli({"--out-dir", dir.string(), "feasibility", "--bands", (dir / "one.csv").string()});
  CHECK(r.code == 0);
  CHECK(line_count(slurp(dir / "feasibility.csv")) == 3);

  std::ofstream(dir / "bad.csv") << "band_hz\nnot-a-number\n";
  r = cli({"--out-dir", dir.string(), "feasibility", "--bands", (dir / "bad.csv").string()});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());

  // The strict 1% gate trips on one rounded cell; see the README.
  r = cli({"--out-dir", dir.string(), "feasibility", "--check-reference"});
  CHECK(r.out.find("max relative deviation") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  const auto dir = scratch("usage");
  auto r = cli({"--out-dir", dir.string(), "sweep", "--axis", "altitude", "--values", "1"});
  CHECK(r.code == kExitUsage);
  r = cli({"--out-dir", dir.string(), "simulate", "--set", "no.such.key=1"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("no.such.key") != std::string::npos);
  std::ofstream(dir.string() + ".ini") << "users.nonsense = 3\n";
  r = cli({"--config", dir.string() + ".ini", "--out-dir", dir.string(), "simulate"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("users.nonsense") != std::string::npos);
  fs::remove(dir.string() + ".ini");
  fs::remove_all(dir);
}

TEST_CASE("simulate outputs and determinism") {
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  const auto args = join({"simulate", "--mode", "directional", "--sbs", "10", "--dump-deployment",
                          "--dump-trajectories", "--dump-steps", "20"},
                         kQuick);
  REQUIRE(cli(join({"--seed", "42", "--out-dir", a.string()}, args)).code == 0);
  REQUIRE(cli(join({"--seed", "42", "--out-dir", b.string()}, args)).code == 0);
  for (const char* f : {"summary.json", "energy_cdf.csv", "energy_samples_cdf.csv",
                        "deployment.csv", "trajectories.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(summary.contains("andot_5uW"));
  CHECK(summary["andot"].size() == 3);
  CHECK(summary["regulatory"]["power_violations"] == 0);
  CHECK(slurp(a / "energy_cdf.csv").rfind("value,cumulative_probability\n", 0) == 0);
  CHECK(line_count(slurp(a / "trajectories.csv")) == 1 + 20 * 21);
  CHECK(line_count(slurp(a / "deployment.csv")) == 11);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["master_seed"] == 42);
  CHECK(manifest["config"]["deployment.n_sbs"] == "10");
  CHECK(manifest["version"] == kToolVersion);

  // replay into a fresh directory reproduces every output
  const auto c = scratch("sim_c");
  REQUIRE(cli({"--out-dir", c.string(), "replay", (a / "manifest.json").string()}).code == 0);
  for (const char* f : {"summary.json", "energy_cdf.csv", "trajectories.csv"}) {
    CHECK(slurp(a / f) == slurp(c / f));
  }

  const auto d = scratch("sim_d");
  REQUIRE(cli(join({"--seed", "43", "--out-dir", d.string()}, args)).code == 0);
  CHECK(slurp(a / "summary.json") != slurp(d / "summary.json"));
  for (const auto& p : {a, b, c, d}) fs::remove_all(p);
}

TEST_CASE("simulate with no SBS") {
  const auto dir = scratch("zero");
  REQUIRE(cli(join({"--out-dir", dir.string(), "simulate", "--sbs", "0"}, kQuick)).code == 0);
  const auto s = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(s["andot_5uW"].get<double>() == Approx(1.0 / 2.0).epsilon(0.1));
  CHECK(slurp(dir / "energy_cdf.csv") == "value,cumulative_probability\n");
  fs::remove_all(dir);
}

TEST_CASE("sweep outputs") {
  const auto dir = scratch("sweep");
  auto r = cli(join({"--out-dir", dir.string(), "sweep", "--axis", "sbs", "--values", "5:30:5",
                     "--modes", "both", "--set", "sim.duration_s=300", "--set",
                     "users.count=10"},
                    {"--replications", "1", "--set", "deployment.burn_in_sweeps=20"}));
  REQUIRE(r.code == 0);
  const std::string andot = slurp(dir / "sweep_andot.csv");
  CHECK(andot.rfind("axis_value,mode,discharge_rate,andot_mean,andot_std\n", 0) == 0);
  CHECK(line_count(andot) == 1 + 2 * 6 * 3);
  CHECK(fs::exists(dir / "sweep_energy.csv"));

  r = cli({"--out-dir", dir.string(), "sweep", "--axis", "speed", "--values", "1,3,6,12",
           "--modes", "directional", "--users", "10", "--duration", "300", "--replications",
           "1"});
  REQUIRE(r.code == 0);
  CHECK(line_count(slurp(dir / "sweep_andot.csv")) == 1 + 4 * 3);
  CHECK(slurp(dir / "sweep_andot.csv").find("\n12,directional,") != std::string::npos);

  r = cli({"--out-dir", dir.string(), "sweep", "--axis", "sbs", "--values", "10", "--modes",
           "directional", "--one-beam", "--users", "10", "--duration", "300",
           "--replications", "1"});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "sweep_andot.csv").find("directional+one_beam") != std::string::npos);
  CHECK(line_count(slurp(dir / "sweep_andot.csv")) == 1 + 2 * 3);
  fs::remove_all(dir);
}
