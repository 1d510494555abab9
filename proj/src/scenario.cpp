#include "dlcz/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dlcz/presets.hpp"
#include "json.hpp"

namespace dlcz {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown. Defaults are written back into the object, so
// the walked tree ends up as the effective config.
class Node {
 public:
  Node(json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + key;
    throw ConfigError(source_ + ": " + (where.empty() ? std::string("<root>") : where) + ": " + msg);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  void set_default(const std::string& key, json value) {
    if (!j_.contains(key)) j_[key] = std::move(value);
  }

  json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "required");
    return j_[key];
  }

  Node child(const std::string& key) { return Node(raw(key), sub(key), source_); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& source() const { return source_; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) fail(key, "required");
      j_[key] = *fallback;
    }
    const json& v = j_[key];
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(key, "must be positive");
    return x;
  }

  double non_negative(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const double x = number(key, fallback);
    if (x < 0.0) fail(key, "must not be negative");
    return x;
  }

  double probability(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x >= 0.0 && x <= 1.0)) fail(key, "must lie in [0, 1]");
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) fail(key, "required");
      j_[key] = *fallback;
    }
    const json& v = j_[key];
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) fail(key, "required");
      j_[key] = *fallback;
    }
    const json& v = j_[key];
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  void forbid(const std::string& key, const std::string& why) {
    if (j_.contains(key)) fail(key, why);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

 private:
  json& j_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

// Converts std::invalid_argument from domain validation into a config error
// pinned to a field.
template <class Fn>
auto guarded(const Node& node, const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    node.fail(key, e.what());
  }
}

ScenarioKind parse_kind(Node& root) {
  const std::string k = root.string("kind");
  if (k == "decoherence") return ScenarioKind::decoherence;
  if (k == "wavepacket") return ScenarioKind::wavepacket;
  if (k == "correlations") return ScenarioKind::correlations;
  if (k == "raman") return ScenarioKind::raman;
  root.fail("kind", "expected decoherence, wavepacket, correlations or raman");
}

LevelScheme parse_scheme(Node& root) {
  json& v = root.raw("scheme");
  if (v.is_string()) {
    if (v.get<std::string>() != "cesium") root.fail("scheme", "unknown scheme preset");
    return LevelScheme::cesium();
  }
  Node n(v, root.sub("scheme"), root.source());
  LevelScheme s;
  s.two_F_g = static_cast<int>(n.integer("two_F_g"));
  s.two_F_s = static_cast<int>(n.integer("two_F_s"));
  s.two_F_a = static_cast<int>(n.integer("two_F_a"));
  s.two_F_b = static_cast<int>(n.integer("two_F_b"));
  s.g_g_MHz_per_G = n.number("g_g_MHz_per_G");
  s.g_s_MHz_per_G = n.number("g_s_MHz_per_G");
  n.finish();
  guarded(root, "scheme", [&] {
    s.validate();
    return 0;
  });
  return s;
}

GroundDistribution parse_distribution(Node& root, const LevelScheme& scheme) {
  json& v = root.raw("distribution");
  if (v.is_string()) {
    if (v.get<std::string>() != "unpolarized") root.fail("distribution", "unknown distribution");
    return GroundDistribution::unpolarized(scheme.two_F_g);
  }
  Node n(v, root.sub("distribution"), root.source());
  if (n.has("two_m") == n.has("weights")) {
    root.fail("distribution", "give exactly one of two_m or weights");
  }
  if (n.has("two_m")) {
    const long long two_m = n.integer("two_m");
    n.finish();
    return guarded(n, "two_m", [&] {
      return GroundDistribution::polarized(scheme.two_F_g, static_cast<int>(two_m));
    });
  }
  json& w = n.raw("weights");
  if (!w.is_array()) n.fail("weights", "expected an array");
  std::vector<double> weights;
  for (const auto& x : w) {
    if (!x.is_number()) n.fail("weights", "expected numbers");
    weights.push_back(x.get<double>());
  }
  if (weights.size() != static_cast<std::size_t>(scheme.num_g())) {
    n.fail("weights", "needs one entry per ground projection (" + std::to_string(scheme.num_g()) + ")");
  }
  n.finish();
  return guarded(n, "weights",
                 [&] { return GroundDistribution::from_weights(scheme.two_F_g, weights); });
}

SphericalPolarization parse_polarization(Node& parent, const std::string& key) {
  json& v = parent.raw(key);
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "x") return SphericalPolarization::linear_x();
    if (s == "y") return SphericalPolarization::linear_y();
    if (s == "sigma+") return SphericalPolarization::sigma_plus();
    if (s == "sigma-") return SphericalPolarization::sigma_minus();
    if (s == "pi") return SphericalPolarization::pi();
    parent.fail(key, "expected x, y, sigma+, sigma- or pi");
  }
  Node n(v, parent.sub(key), parent.source());
  auto component = [&](const std::string& c) -> std::complex<double> {
    if (!n.has(c)) {
      n.set_default(c, json::array({0.0, 0.0}));
      n.raw(c);
      return 0.0;
    }
    const json& a = n.raw(c);
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
      n.fail(c, "expected [re, im]");
    }
    return {a[0].get<double>(), a[1].get<double>()};
  };
  const auto minus = component("minus");
  const auto zero = component("zero");
  const auto plus = component("plus");
  n.finish();
  return guarded(parent, key,
                 [&] { return SphericalPolarization::from_components(minus, zero, plus); });
}

PolarizationSet parse_polarizations(Node& root) {
  json& v = root.raw("polarizations");
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "lin_perp_lin") return PolarizationSet::lin_perp_lin();
    if (s == "sigma_clock") return PolarizationSet::sigma_clock();
    root.fail("polarizations", "expected lin_perp_lin, sigma_clock or an object");
  }
  Node n(v, root.sub("polarizations"), root.source());
  PolarizationSet p;
  p.write = parse_polarization(n, "write");
  p.field1 = parse_polarization(n, "field1");
  p.read = parse_polarization(n, "read");
  p.field2 = parse_polarization(n, "field2");
  n.finish();
  return p;
}

FieldProfile parse_profile(Node& n) {
  FieldProfile f;
  f.gradient_G_per_cm = n.number("gradient_G_per_cm");
  f.length_mm = n.positive("length_mm");
  f.bias_G = n.number("bias_G", 0.0);
  n.finish();
  return f;
}

FieldModel parse_field_model(Node& root, const LevelScheme& scheme) {
  Node n = root.child("field");
  if (n.has("K_Hz")) {
    FieldModel f;
    f.K_Hz = n.number("K_Hz");
    f.bias_Hz = n.number("bias_Hz", 0.0);
    n.finish();
    return f;
  }
  const FieldProfile profile = parse_profile(n);
  return guarded(root, "field", [&] { return FieldModel::from_profile(scheme, profile); });
}

Pulse parse_pulse(Node& parent, const std::string& key) {
  Node n = parent.child(key);
  Pulse p;
  const std::string shape = n.string("shape");
  if (shape == "square") {
    p.shape = PulseShape::square;
  } else if (shape == "trapezoid") {
    p.shape = PulseShape::trapezoid;
  } else if (shape == "delta") {
    p.shape = PulseShape::delta;
  } else {
    n.fail("shape", "expected square, trapezoid or delta");
  }
  p.start_ns = n.number("start_ns");
  p.fwhm_ns = n.positive("fwhm_ns");
  if (p.shape == PulseShape::trapezoid) {
    p.rise_ns = n.positive("rise_ns");
  } else {
    n.forbid("rise_ns", "only trapezoid pulses have a rise time");
  }
  p.detuning_rad_per_s = n.number("detuning_rad_per_s");
  if (p.detuning_rad_per_s == 0.0) n.fail("detuning_rad_per_s", "must be non-zero");
  p.amplitude = n.positive("amplitude", 1.0);
  n.finish();
  guarded(parent, key, [&] {
    p.validate();
    return 0;
  });
  return p;
}

Timeline parse_timeline(Node& root) {
  Node n = root.child("timeline");
  Timeline tl;
  tl.write = parse_pulse(n, "write");
  tl.read = parse_pulse(n, "read");
  n.finish();
  guarded(root, "timeline", [&] {
    tl.validate();
    return 0;
  });
  return tl;
}

std::vector<double> parse_sweep(Node& root) {
  Node n = root.child("sweep");
  std::vector<double> d;
  if (n.has("delays_ns")) {
    n.forbid("start_ns", "use either delays_ns or start_ns/stop_ns/step_ns");
    json& a = n.raw("delays_ns");
    if (!a.is_array() || a.empty()) n.fail("delays_ns", "expected a non-empty array");
    for (const auto& x : a) {
      if (!x.is_number()) n.fail("delays_ns", "expected numbers");
      d.push_back(x.get<double>());
    }
  } else {
    const double start = n.number("start_ns");
    const double stop = n.number("stop_ns");
    const double step = n.positive("step_ns");
    if (stop < start) n.fail("stop_ns", "must not be below start_ns");
    const double count = (stop - start) / step;
    const long long k = std::llround(count);
    if (std::abs(count - static_cast<double>(k)) > 1e-9 * std::max(1.0, count)) {
      n.fail("step_ns", "must divide stop_ns - start_ns");
    }
    if (k > 1000000) n.fail("step_ns", "more than 10^6 delays");
    for (long long i = 0; i <= k; ++i) d.push_back(start + static_cast<double>(i) * step);
  }
  n.finish();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || d[i] < 0.0) root.fail("sweep", "delays must be finite and >= 0");
    if (i > 0 && !(d[i] > d[i - 1])) root.fail("sweep", "delays must increase strictly");
  }
  return d;
}

void reject_unused(Node& root, ScenarioKind kind, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    root.forbid(k, std::string("not used by ") + to_string(kind) + " scenarios");
  }
}

}  // namespace

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::decoherence: return "decoherence";
    case ScenarioKind::wavepacket: return "wavepacket";
    case ScenarioKind::correlations: return "correlations";
    case ScenarioKind::raman: return "raman";
  }
  return "?";
}

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::analytic: return "analytic";
    case Backend::numeric: return "numeric";
    case Backend::delta: return "delta";
  }
  return "?";
}

Backend parse_backend(const std::string& name) {
  if (name == "analytic") return Backend::analytic;
  if (name == "numeric") return Backend::numeric;
  if (name == "delta") return Backend::delta;
  throw ConfigError("backend: expected analytic, numeric or delta, got '" + name + "'");
}

ScenarioConfig parse_config(const std::string& json_text, const std::string& source,
                            const Overrides& overrides) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
  Node root(j, "", source);
  ScenarioConfig c;
  c.name = root.string("name");
  c.description = root.string("description", "");
  c.version = static_cast<int>(root.integer("version", 1));
  if (c.version != 1) root.fail("version", "only version 1 is supported");
  c.kind = parse_kind(root);

  if (overrides.backend) {
    if (c.kind != ScenarioKind::decoherence) root.fail("backend", "only decoherence runs take a backend");
    j["backend"] = to_string(*overrides.backend);
  }
  if (overrides.seed) {
    if (c.kind != ScenarioKind::correlations) root.fail("seed", "only correlation runs take a seed");
    j["seed"] = *overrides.seed;
  }

  if (root.has("paper")) {
    Node p = root.child("paper");
    if (p.has("xi")) c.paper_xi = p.positive("xi");
    if (p.has("xi_th")) c.paper_xi_th = p.positive("xi_th");
    p.finish();
  }

  const bool pair = c.kind == ScenarioKind::decoherence || c.kind == ScenarioKind::wavepacket;
  if (pair || c.kind == ScenarioKind::raman) {
    if (!root.has("scheme")) j["scheme"] = "cesium";
    if (!root.has("distribution")) j["distribution"] = "unpolarized";
    c.model.scheme = parse_scheme(root);
    c.model.distribution = parse_distribution(root, c.model.scheme);
  }

  switch (c.kind) {
    case ScenarioKind::decoherence:
    case ScenarioKind::wavepacket: {
      reject_unused(root, c.kind, {"correlations", "raman", "seed"});
      if (!root.has("polarizations")) j["polarizations"] = "lin_perp_lin";
      c.model.polarizations = parse_polarizations(root);
      c.model.field = parse_field_model(root, c.model.scheme);
      c.timeline = parse_timeline(root);
      if (c.kind == ScenarioKind::decoherence) {
        reject_unused(root, c.kind, {"wavepacket"});
        c.delays_ns = parse_sweep(root);
        const std::string b = root.string("backend", "analytic");
        try {
          c.backend = parse_backend(b);
        } catch (const ConfigError&) {
          root.fail("backend", "expected analytic, numeric or delta");
        }
        if (c.backend == Backend::numeric && c.timeline.is_delta()) {
          root.fail("backend", "the numeric backend needs finite pulses");
        }
      } else {
        reject_unused(root, c.kind, {"sweep", "backend"});
        if (c.timeline.is_delta()) root.fail("timeline", "wavepackets need finite pulses");
        if (!root.has("wavepacket")) j["wavepacket"] = json::object();
        Node w = root.child("wavepacket");
        c.bin_ns = w.positive("bin_ns", 4.0);
        if (w.has("range")) {
          Node r = w.child("range");
          GridRange g{r.number("t1_begin_ns"), r.number("t1_end_ns"), r.number("t2_begin_ns"),
                      r.number("t2_end_ns")};
          if (!(g.t1_end_ns > g.t1_begin_ns)) r.fail("t1_end_ns", "must exceed t1_begin_ns");
          if (!(g.t2_end_ns > g.t2_begin_ns)) r.fail("t2_end_ns", "must exceed t2_begin_ns");
          r.finish();
          c.range = g;
        }
        w.finish();
      }
      break;
    }
    case ScenarioKind::correlations: {
      reject_unused(root, c.kind, {"scheme", "distribution", "polarizations", "field", "timeline",
                                   "sweep", "backend", "wavepacket", "raman"});
      Node n = root.child("correlations");
      c.correlations.state.chi = n.number("chi");
      if (!(c.correlations.state.chi > 0.0 && c.correlations.state.chi < 1.0)) {
        n.fail("chi", "must lie in (0, 1)");
      }
      const long long n_max = n.integer("n_max", 0);
      if (n_max < 0 || n_max > 100000) n.fail("n_max", "must lie in [0, 100000]");
      c.correlations.state.n_max = static_cast<int>(n_max);
      c.correlations.detection.eta1 = n.probability("eta1", 1.0);
      c.correlations.detection.eta2 = n.probability("eta2", 1.0);
      c.correlations.detection.bg1 = n.probability("bg1", 0.0);
      c.correlations.detection.bg2 = n.probability("bg2", 0.0);
      const long long trials = n.integer("trials", 1000000);
      if (trials < 0) n.fail("trials", "must not be negative");
      c.correlations.trials = static_cast<std::uint64_t>(trials);
      n.finish();
      guarded(root, "correlations", [&] { return c.correlations.state.distribution(); });
      const long long seed = root.integer("seed", 1);
      if (seed < 0) root.fail("seed", "must not be negative");
      c.seed = static_cast<std::uint64_t>(seed);
      break;
    }
    case ScenarioKind::raman: {
      reject_unused(root, c.kind, {"polarizations", "timeline", "sweep", "backend", "wavepacket",
                                   "correlations", "seed"});
      Node f = root.child("field");
      if (f.has("K_Hz")) root.fail("field", "Raman spectra need gradient_G_per_cm and length_mm");
      c.raman.field = parse_profile(f);
      guarded(root, "field", [&] {
        c.raman.field.validate();
        return 0;
      });
      Node n = root.child("raman");
      c.raman.probe_extent_mm = n.positive("probe_extent_mm", c.raman.field.length_mm);
      if (c.raman.probe_extent_mm > c.raman.field.length_mm) {
        n.fail("probe_extent_mm", "must not exceed field.length_mm");
      }
      n.set_default("allowed_dm", json::array({-1, 0, 1}));
      json& dm = n.raw("allowed_dm");
      if (!dm.is_array() || dm.empty()) n.fail("allowed_dm", "expected a non-empty array");
      c.raman.allowed_dm.clear();
      for (const auto& x : dm) {
        if (!x.is_number_integer()) n.fail("allowed_dm", "expected integers");
        c.raman.allowed_dm.push_back(x.get<int>());
      }
      const long long bins = n.integer("n_bins", 101);
      if (bins < 1 || bins % 2 == 0 || bins > 1000001) n.fail("n_bins", "must be odd and positive");
      c.raman.n_bins = static_cast<int>(bins);
      n.finish();
      break;
    }
  }
  root.finish();
  c.effective_json = j.dump();
  return c;
}

std::string read_config_text(const std::string& path_or_preset) {
  std::error_code ec;
  if (!std::filesystem::exists(path_or_preset, ec)) {
    if (const auto* p = find_preset(path_or_preset)) return p->json;
    throw IoError(path_or_preset + ": no such file or built-in preset");
  }
  std::ifstream in(path_or_preset, std::ios::binary);
  if (!in) throw IoError(path_or_preset + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(path_or_preset + ": read failed");
  return ss.str();
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.effective_json) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void common_metadata(Table& t, const ScenarioConfig& c) {
  t.add_meta("program", std::string("dlczsim ") + kVersion);
  t.add_meta("scenario", c.name);
  t.add_meta("kind", to_string(c.kind));
  t.add_meta("config_hash", config_hash(c));
  t.effective_config = c.effective_json;
}

void reference_metadata(Table& t, const ScenarioConfig& c) {
  if (c.paper_xi) t.add_meta("paper_xi", format_number(*c.paper_xi));
  if (c.paper_xi_th) t.add_meta("paper_xi_th", format_number(*c.paper_xi_th));
}

void fit_metadata(Table& t, const XiFit& fit) {
  t.add_meta("xi", format_number(fit.xi));
  t.add_meta("xi_sigma", format_number(fit.xi_sigma));
  t.add_meta("xi_th", format_number(fit.xi_th));
  t.add_meta("chi_squared", format_number(fit.chi_squared));
  t.add_meta("fit_points", std::to_string(fit.points));
}

}  // namespace

Table run_decoherence(const ScenarioConfig& c, int threads, const std::vector<G12Point>* data) {
  if (c.kind != ScenarioKind::decoherence) throw ConfigError("kind: not a decoherence scenario");
  EvalOptions opt;
  opt.backend = c.backend;
  opt.threads = threads;
  const auto p12 = p12_sweep(c.model, c.timeline, c.delays_ns, opt);

  Table t;
  common_metadata(t, c);
  t.add_meta("backend", to_string(c.backend));
  t.add_meta("units", "delay_ns in ns; p12 is |pair amplitude|^2 with C = 1 in ns units, arbitrary scale");
  t.add_meta("K_Hz", format_number(c.model.field.K_Hz));
  t.add_meta("bias_Hz", format_number(c.model.field.bias_Hz));
  reference_metadata(t, c);
  std::optional<XiFit> fit;
  if (data) {
    try {
      fit = scale_fit_xi(c.delays_ns, p12, *data);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("data: ") + e.what());
    }
    fit_metadata(t, *fit);
  }
  t.columns = {"delay_ns", "p12"};
  if (fit) t.columns.push_back("p12_scaled");
  for (std::size_t i = 0; i < p12.size(); ++i) {
    std::vector<std::string> row{format_number(c.delays_ns[i]), format_number(p12[i])};
    if (fit) row.push_back(format_number(fit->xi * p12[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table run_wavepacket(const ScenarioConfig& c, int threads) {
  if (c.kind != ScenarioKind::wavepacket) throw ConfigError("kind: not a wavepacket scenario");
  const GridRange range = c.range ? *c.range : default_grid_range(c.timeline);
  const auto grid = wavepacket_grid(c.model, c.timeline, c.bin_ns, range, threads);
  Table t;
  common_metadata(t, c);
  t.add_meta("units", "t1_ns and t2_ns are bin centres in ns; joint_density is |P|^2 averaged over the bin, ns units, arbitrary scale");
  t.add_meta("bin_ns", format_number(c.bin_ns));
  t.add_meta("delta_t_ns", format_number(c.timeline.delta_t_ns()));
  t.add_meta("K_Hz", format_number(c.model.field.K_Hz));
  t.columns = {"t1_ns", "t2_ns", "joint_density"};
  for (Eigen::Index j = 0; j < grid.values.cols(); ++j) {
    const double t1 = 0.5 * (grid.t1_edges_ns[j] + grid.t1_edges_ns[j + 1]);
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
      const double t2 = 0.5 * (grid.t2_edges_ns[i] + grid.t2_edges_ns[i + 1]);
      t.rows.push_back({format_number(t1), format_number(t2), format_number(grid.values(i, j))});
    }
  }
  return t;
}

Table run_correlations(const ScenarioConfig& c, int threads) {
  if (c.kind != ScenarioKind::correlations) throw ConfigError("kind: not a correlations scenario");
  const auto dist = c.correlations.state.distribution();
  const auto exact = correlation_functions(dist, c.correlations.detection);
  Table t;
  common_metadata(t, c);
  t.add_meta("units", "probabilities per trial; g and R dimensionless");
  t.add_meta("seed", std::to_string(c.seed));
  t.add_meta("trials", std::to_string(c.correlations.trials));
  t.add_meta("nonclassical", exact.nonclassical ? "true" : "false");
  std::optional<CorrelationEstimate> mc;
  if (c.correlations.trials > 0) {
    mc = simulate_trials(dist, c.correlations.detection, c.correlations.trials, c.seed, threads);
    t.add_meta("nonclassical_monte_carlo", mc->nonclassical ? "true" : "false");
  }
  t.columns = {"quantity", "exact", "monte_carlo", "std_error"};
  auto add = [&](const char* name, double CorrelationEstimate::*value,
                 double CorrelationEstimate::*se) {
    t.rows.push_back({name, format_number(exact.*value), mc ? format_number((*mc).*value) : "",
                      mc && se ? format_number((*mc).*se) : ""});
  };
  add("p1", &CorrelationEstimate::p1, nullptr);
  add("p2", &CorrelationEstimate::p2, nullptr);
  add("p11", &CorrelationEstimate::p11, nullptr);
  add("p22", &CorrelationEstimate::p22, nullptr);
  add("p12", &CorrelationEstimate::p12, nullptr);
  add("g11", &CorrelationEstimate::g11, &CorrelationEstimate::se_g11);
  add("g22", &CorrelationEstimate::g22, &CorrelationEstimate::se_g22);
  add("g12", &CorrelationEstimate::g12, &CorrelationEstimate::se_g12);
  add("R", &CorrelationEstimate::R, &CorrelationEstimate::se_R);
  return t;
}

Table run_raman(const ScenarioConfig& c) {
  if (c.kind != ScenarioKind::raman) throw ConfigError("kind: not a raman scenario");
  const auto s = zeeman_spectrum(c.model.scheme, c.model.distribution, c.raman.field,
                                 c.raman.probe_extent_mm, c.raman.allowed_dm, c.raman.n_bins);
  Table t;
  common_metadata(t, c);
  t.add_meta("units", "detuning_Hz is the two-photon Raman detuning in Hz; weight is the population fraction per bin");
  t.add_meta("bin_Hz", format_number(s.bin_Hz));
  t.add_meta("fwhm_Hz", format_number(fwhm(s)));
  t.add_meta("span_Hz", format_number(spectral_span(s)));
  t.add_meta("broadening", "inhomogeneous only; compare with measured widths after adding power broadening");
  t.columns = {"detuning_Hz", "weight"};
  for (std::size_t i = 0; i < s.weight.size(); ++i) {
    t.rows.push_back({format_number(s.detuning_Hz[i]), format_number(s.weight[i])});
  }
  return t;
}

Table run_fit(const std::vector<double>& theory_delay_ns, const std::vector<double>& theory_p12,
              const std::vector<G12Point>& data) {
  XiFit fit;
  try {
    fit = scale_fit_xi(theory_delay_ns, theory_p12, data);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fit: ") + e.what());
  }
  Table t;
  t.add_meta("program", std::string("dlczsim ") + kVersion);
  t.add_meta("kind", "fit");
  t.add_meta("units", "xi scales p12 to g12 and carries the inverse units of p12");
  t.columns = {"xi", "xi_sigma", "xi_th", "chi_squared", "points"};
  t.rows.push_back({format_number(fit.xi), format_number(fit.xi_sigma), format_number(fit.xi_th),
                    format_number(fit.chi_squared), std::to_string(fit.points)});
  return t;
}

Table run_scenario(const ScenarioConfig& c, int threads, const std::vector<G12Point>* data) {
  if (data && c.kind != ScenarioKind::decoherence) {
    throw ConfigError("data: only decoherence runs can be scaled to g12 data");
  }
  switch (c.kind) {
    case ScenarioKind::decoherence: return run_decoherence(c, threads, data);
    case ScenarioKind::wavepacket: return run_wavepacket(c, threads);
    case ScenarioKind::correlations: return run_correlations(c, threads);
    case ScenarioKind::raman: return run_raman(c);
  }
  throw ConfigError("kind: unsupported");
}

const EmbeddedPreset* find_preset(const std::string& name) {
  for (const auto& p : embedded_presets()) {
    if (name == p.name) return &p;
  }
  return nullptr;
}

}  // namespace dlcz
