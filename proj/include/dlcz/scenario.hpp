#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlcz/atomic_model.hpp"
#include "dlcz/output.hpp"
#include "dlcz/pair_amplitude.hpp"
#include "dlcz/photon_statistics.hpp"
#include "dlcz/pulse.hpp"
#include "dlcz/raman_probe.hpp"

namespace dlcz {

inline constexpr const char* kVersion = "1.0.0";

/// Invalid or inconsistent configuration. The message starts with the path of
/// the offending field, e.g. "timeline.write.fwhm_ns: must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind { decoherence, wavepacket, correlations, raman };

const char* to_string(ScenarioKind kind);
const char* to_string(Backend backend);
Backend parse_backend(const std::string& name);

struct CorrelationSettings {
  TwoModeState state;
  DetectionModel detection;
  std::uint64_t trials = 1000000;
};

struct RamanSettings {
  FieldProfile field;
  double probe_extent_mm = 0.0;
  std::vector<int> allowed_dm{-1, 0, 1};
  int n_bins = 101;
};

/// A validated scenario. Only the sections used by `kind` are meaningful.
struct ScenarioConfig {
  std::string name;
  std::string description;
  int version = 1;
  ScenarioKind kind = ScenarioKind::decoherence;

  PairModel model;
  Timeline timeline;
  std::vector<double> delays_ns;  ///< decoherence only, strictly increasing
  Backend backend = Backend::analytic;
  double bin_ns = 4.0;            ///< wavepacket only
  std::optional<GridRange> range;  ///< wavepacket only; default covers both pulses
  CorrelationSettings correlations;
  RamanSettings raman;
  std::uint64_t seed = 1;
  std::optional<double> paper_xi;
  std::optional<double> paper_xi_th;

  /// Input plus every default, as compact JSON with sorted keys. Parsing it
  /// again yields the same config and the same text.
  std::string effective_json;
};

struct Overrides {
  std::optional<Backend> backend;
  std::optional<std::uint64_t> seed;
};

/// Parses and validates a JSON scenario after applying command-line
/// overrides. Unknown keys, sections that the kind does not use, and
/// out-of-range values raise ConfigError.
ScenarioConfig parse_config(const std::string& json_text, const std::string& source = "<config>",
                            const Overrides& overrides = {});

/// Text of a config file, or of the built-in preset with that name when no
/// such file exists. Throws IoError when neither is found or the file cannot
/// be read.
std::string read_config_text(const std::string& path_or_preset);

/// 64-bit FNV-1a of the effective JSON, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

Table run_decoherence(const ScenarioConfig& config, int threads,
                      const std::vector<G12Point>* data = nullptr);
Table run_wavepacket(const ScenarioConfig& config, int threads);
Table run_correlations(const ScenarioConfig& config, int threads);
Table run_raman(const ScenarioConfig& config);
Table run_fit(const std::vector<double>& theory_delay_ns, const std::vector<double>& theory_p12,
              const std::vector<G12Point>& data);

/// Dispatches on config.kind.
Table run_scenario(const ScenarioConfig& config, int threads,
                   const std::vector<G12Point>* data = nullptr);

}  // namespace dlcz
