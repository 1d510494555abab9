#include "dlcz/cli.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dlcz/output.hpp"
#include "dlcz/presets.hpp"
#include "dlcz/scenario.hpp"

namespace dlcz {

namespace {

struct RunOptions {
  std::string config;
  std::string out;
  std::string backend;
  std::string data;
  std::string theory;
  std::uint64_t seed = 0;
  int threads = 1;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<G12Point> load_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  try {
    return read_g12_data(in, path);
  } catch (const DataParseError& e) {
    throw ConfigError(e.what());
  }
}

void emit(const Table& table, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    write_csv(out, table);
    return;
  }
  auto write_file = [](const std::string& path, auto&& writer) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(path + ": cannot open for writing");
    writer(f);
    f.flush();
    if (!f) throw IoError(path + ": write failed");
  };
  write_file(out_path, [&](std::ostream& f) { write_csv(f, table); });
  write_file(sidecar_path(out_path), [&](std::ostream& f) { write_sidecar(f, table); });
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoherence and photon-pair statistics for atomic-ensemble memories", "dlczsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("dlczsim ") + kVersion);

  RunOptions o;
  auto add_run = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "Scenario JSON file or built-in preset name")->required();
    sub->add_option("--out", o.out, "CSV output path; a JSON sidecar is written next to it");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    return sub;
  };
  auto* decoherence = add_run("decoherence", "p12 as a function of the write-read delay");
  decoherence->add_option("--backend", o.backend, "analytic, numeric or delta")
      ->check(CLI::IsMember({"analytic", "numeric", "delta"}));
  decoherence->add_option("--data", o.data, "g12 data to fit; adds a scaled column");
  auto* wavepacket = add_run("wavepacket", "binned two-photon wavepacket");
  auto* correlations = add_run("correlations", "g11, g22, g12 and R, exact and Monte-Carlo");
  correlations->add_option("--seed", o.seed, "Monte-Carlo seed");
  auto* raman = add_run("raman", "Zeeman-broadened Raman spectrum");
  auto* fit = app.add_subcommand("fit", "scale a decoherence curve to g12 data");
  fit->add_option("--theory", o.theory, "CSV written by the decoherence command")->required();
  fit->add_option("--data", o.data, "g12 data: delay_ns, g12, sigma")->required();
  fit->add_option("--out", o.out, "CSV output path");
  auto* presets = app.add_subcommand("presets", "list built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (presets->parsed()) {
      for (const auto& p : embedded_presets()) {
        const auto j = nlohmann::json::parse(p.json);
        out << p.name << "\t" << j.value("kind", "") << "\t" << j.value("description", "") << "\n";
      }
      return 0;
    }
    if (fit->parsed()) {
      std::ifstream in(o.theory);
      if (!in) throw IoError(o.theory + ": cannot open");
      std::pair<std::vector<double>, std::vector<double>> curve;
      try {
        curve = read_csv_columns(in, "delay_ns", "p12", o.theory);
      } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
      }
      const auto data = load_data(o.data);
      emit(run_fit(curve.first, curve.second, data), o.out, out);
      return 0;
    }

    Overrides ov;
    if (decoherence->parsed() && !o.backend.empty()) ov.backend = parse_backend(o.backend);
    if (correlations->parsed() && correlations->count("--seed") > 0) ov.seed = o.seed;
    const std::string text = read_config_text(o.config);
    const ScenarioConfig cfg = parse_config(text, o.config, ov);

    const std::string wanted = decoherence->parsed()    ? "decoherence"
                               : wavepacket->parsed()   ? "wavepacket"
                               : correlations->parsed() ? "correlations"
                                                        : "raman";
    (void)raman;
    if (wanted != to_string(cfg.kind)) {
      throw ConfigError(o.config + ": kind: scenario is " + to_string(cfg.kind) +
                        ", not " + wanted);
    }
    std::vector<G12Point> data;
    if (!o.data.empty()) data = load_data(o.data);
    const Table table = run_scenario(cfg, resolve_threads(o.threads), o.data.empty() ? nullptr : &data);
    emit(table, o.out, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedRegime& e) {
    err << "unsupported regime: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dlcz
