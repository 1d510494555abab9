#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dlcz/cli.hpp"
#include "dlcz/presets.hpp"
#include "dlcz/scenario.hpp"
#include "json.hpp"

using namespace dlcz;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dlczsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "dlcz_scenario_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const auto path = scratch_dir() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kDecoherence = R"({
  "name": "test", "kind": "decoherence",
  "field": {"K_Hz": 1.1e6},
  "timeline": {
    "write": {"shape": "square", "start_ns": 0, "fwhm_ns": 150, "detuning_rad_per_s": 1.8849555921538759e10},
    "read": {"shape": "square", "start_ns": 0, "fwhm_ns": 120, "detuning_rad_per_s": 1.8849555921538759e10}
  },
  "sweep": {"delays_ns": [200, 400, 800]}
})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string patched(const std::string& text, const std::function<void(nlohmann::json&)>& edit) {
  auto j = nlohmann::json::parse(text);
  edit(j);
  return j.dump();
}

}  // namespace

TEST(Config, DefaultsAreFilledIn) {
  const auto c = parse_config(kDecoherence);
  EXPECT_EQ(c.backend, Backend::analytic);
  EXPECT_EQ(c.delays_ns, (std::vector<double>{200, 400, 800}));
  const auto eff = nlohmann::json::parse(c.effective_json);
  EXPECT_EQ(eff["scheme"], "cesium");
  EXPECT_EQ(eff["distribution"], "unpolarized");
  EXPECT_EQ(eff["polarizations"], "lin_perp_lin");
  EXPECT_EQ(eff["timeline"]["write"]["amplitude"], 1.0);
}

TEST(Config, RoundTripIsStable) {
  for (const auto& p : embedded_presets()) {
    const auto a = parse_config(p.json, p.name);
    const auto b = parse_config(a.effective_json, p.name);
    EXPECT_EQ(a.effective_json, b.effective_json) << p.name;
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(a.name, p.name) << "preset file name and name field differ";
  }
}

TEST(Config, UnknownKeysAreRejectedWithPath) {
  EXPECT_NE(config_error(patched(kDecoherence, [](auto& j) { j["colour"] = 1; })).find("colour: unknown key"),
            std::string::npos);
  const auto msg = config_error(
      patched(kDecoherence, [](auto& j) { j["timeline"]["write"]["phase"] = 0.1; }));
  EXPECT_NE(msg.find("timeline.write.phase: unknown key"), std::string::npos) << msg;
}

TEST(Config, FieldLevelValidation) {
  auto msg = config_error(patched(kDecoherence, [](auto& j) { j["timeline"]["read"]["fwhm_ns"] = -1; }));
  EXPECT_NE(msg.find("timeline.read.fwhm_ns: must be positive"), std::string::npos) << msg;
  msg = config_error(patched(kDecoherence, [](auto& j) { j.erase("field"); }));
  EXPECT_NE(msg.find("field: required"), std::string::npos) << msg;
  msg = config_error(patched(kDecoherence, [](auto& j) { j["sweep"]["delays_ns"] = {100, 50}; }));
  EXPECT_NE(msg.find("sweep"), std::string::npos) << msg;
  msg = config_error(patched(kDecoherence, [](auto& j) { j["correlations"] = {{"chi", 0.1}}; }));
  EXPECT_NE(msg.find("correlations: not used by decoherence"), std::string::npos) << msg;
  msg = config_error(patched(kDecoherence, [](auto& j) { j["distribution"] = {{"two_m", 9}}; }));
  EXPECT_NE(msg.find("distribution.two_m"), std::string::npos) << msg;
  msg = config_error(patched(kDecoherence, [](auto& j) { j["timeline"]["read"]["start_ns"] = -10; }));
  EXPECT_NE(msg.find("timeline"), std::string::npos) << msg;
  EXPECT_NE(config_error("{not json"), "");
}

TEST(Config, RangeSweep) {
  const auto c = parse_config(patched(kDecoherence, [](auto& j) {
    j["sweep"] = {{"start_ns", 100}, {"stop_ns", 200}, {"step_ns", 25}};
  }));
  EXPECT_EQ(c.delays_ns, (std::vector<double>{100, 125, 150, 175, 200}));
  EXPECT_NE(config_error(patched(kDecoherence, [](auto& j) {
              j["sweep"] = {{"start_ns", 100}, {"stop_ns", 200}, {"step_ns", 30}};
            })),
            "");
}

TEST(Config, OverridesChangeHash) {
  const auto base = parse_config(kDecoherence);
  const auto delta = parse_config(kDecoherence, "cfg", {Backend::delta, std::nullopt});
  EXPECT_EQ(delta.backend, Backend::delta);
  EXPECT_NE(config_hash(base), config_hash(delta));
  EXPECT_THROW(parse_config(kDecoherence, "cfg", {std::nullopt, 5}), ConfigError);
}

TEST(Output, CsvAndSidecarShareMetadata) {
  const auto c = parse_config(kDecoherence);
  const auto t = run_decoherence(c, 1);
  std::ostringstream csv, side;
  write_csv(csv, t);
  write_sidecar(side, t);
  const auto text = csv.str();
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.rfind("# program: dlczsim", 0), 0u);
  EXPECT_NE(text.find("\ndelay_ns,p12\n200,"), std::string::npos);
  const auto j = nlohmann::ordered_json::parse(side.str());
  std::size_t i = 0;
  for (const auto& [k, v] : j["metadata"].items()) {
    ASSERT_LT(i, t.metadata.size());
    EXPECT_EQ(k, t.metadata[i].first);
    EXPECT_EQ(v.get<std::string>(), t.metadata[i].second);
    EXPECT_NE(text.find("# " + k + ": " + v.get<std::string>() + "\n"), std::string::npos);
    ++i;
  }
  EXPECT_EQ(i, t.metadata.size());
  EXPECT_EQ(j["effective_config"].dump(), nlohmann::ordered_json::parse(c.effective_json).dump());
}

TEST(Output, NumberFormatRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(200.0), "200");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(sidecar_path("a/b.csv"), "a/b.json");
  EXPECT_EQ(sidecar_path("out"), "out.json");
}

TEST(Scenario, StretchedDelaysGiveSameCurveInDeltaMode) {
  const double c = 1.1e6 / 12e3;
  auto fast = parse_config(kDecoherence, "a", {Backend::delta, std::nullopt});
  auto slow = parse_config(patched(kDecoherence, [](auto& j) { j["field"]["K_Hz"] = 12e3; }), "b",
                           {Backend::delta, std::nullopt});
  for (double& d : slow.delays_ns) d *= c;
  const auto a = run_decoherence(fast, 1), b = run_decoherence(slow, 1);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_NEAR(std::stod(b.rows[i][1]) / std::stod(a.rows[i][1]), 1.0, 1e-9);
  }
}

TEST(Cli, ListsPresets) {
  const auto r = cli({"presets"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("fig7a\tdecoherence"), std::string::npos);
  EXPECT_NE(r.out.find("fig9-pumped-sigma"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"decoherence", "--config", "/no/such/file.json"}).code, 4);
  EXPECT_EQ(cli({"decoherence", "--config", write_file("bad.json", "{\"name\": 1}")}).code, 2);
  EXPECT_EQ(cli({"raman", "--config", "fig7a"}).code, 2);
  EXPECT_EQ(cli({"decoherence", "--config", "fig7a", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"decoherence", "--config", "fig7a", "--out", "/no/such/dir/x.csv"}).code, 4);
  const auto trapezoid = patched(kDecoherence, [](auto& j) {
    j["timeline"]["write"]["shape"] = "trapezoid";
    j["timeline"]["write"]["rise_ns"] = 20;
    j["timeline"]["read"]["shape"] = "trapezoid";
    j["timeline"]["read"]["rise_ns"] = 20;
  });
  const auto r = cli({"decoherence", "--config", write_file("trap.json", trapezoid)});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_EQ(cli({"decoherence", "--config", write_file("trap.json", trapezoid), "--backend", "delta"}).code, 0);
}

TEST(Cli, OutputIsIndependentOfThreads) {
  const auto dir = scratch_dir();
  for (const std::string preset : {"fig8b", "fig7a", "correlations-ideal"}) {
    const std::string kind = preset.rfind("fig8", 0) == 0   ? "wavepacket"
                             : preset.rfind("fig7", 0) == 0 ? "decoherence"
                                                            : "correlations";
    const auto a = (dir / (preset + "_1.csv")).string();
    const auto b = (dir / (preset + "_3.csv")).string();
    ASSERT_EQ(cli({kind, "--config", preset, "--out", a, "--threads", "1"}).code, 0);
    ASSERT_EQ(cli({kind, "--config", preset, "--out", b, "--threads", "3"}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b)) << preset;
    EXPECT_EQ(slurp(sidecar_path(a)), slurp(sidecar_path(b))) << preset;
  }
}

TEST(Cli, FitAndScaledSweep) {
  const auto dir = scratch_dir();
  const auto theory = (dir / "theory.csv").string();
  ASSERT_EQ(cli({"decoherence", "--config", "fig7a", "--out", theory}).code, 0);
  const auto data = write_file("g12.csv", "delay_ns,g12,sigma\n100,30,2\n500,12,1\n1500,6,0.5\n");
  const auto fit = cli({"fit", "--theory", theory, "--data", data});
  EXPECT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.out.find("xi,xi_sigma,xi_th,chi_squared,points\n"), std::string::npos);
  const auto scaled = cli({"decoherence", "--config", "fig7a", "--data", data});
  EXPECT_EQ(scaled.code, 0) << scaled.err;
  EXPECT_NE(scaled.out.find("delay_ns,p12,p12_scaled\n"), std::string::npos);
  EXPECT_NE(scaled.out.find("# xi: "), std::string::npos);
  const auto broken = write_file("broken.csv", "delay_ns,g12,sigma\n100,x,2\n");
  EXPECT_EQ(cli({"fit", "--theory", theory, "--data", broken}).code, 2);
  EXPECT_EQ(cli({"fit", "--theory", "/no/such.csv", "--data", data}).code, 4);
}
