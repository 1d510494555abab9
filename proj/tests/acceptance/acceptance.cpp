// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/SVD>

#include "dlcz/angular_momentum.hpp"
#include "dlcz/atomic_model.hpp"
#include "dlcz/cli.hpp"
#include "dlcz/pair_amplitude.hpp"
#include "dlcz/photon_statistics.hpp"
#include "dlcz/presets.hpp"
#include "dlcz/raman_probe.hpp"
#include "dlcz/scenario.hpp"
#include "oracles/sinc_quadrature.hpp"

using namespace dlcz;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kDelta = 2.0 * std::numbers::pi * 3e9;

// |S(400 ns)|² / |S(0)|² for the unpolarized lin⊥lin ensemble at K = 1.1 MHz,
// confirmed against the quadrature backend and frozen here.
constexpr double kFrozenRatio400 = 0.044997;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Timeline square_timeline(double write_ns, double read_ns, double dt_ns) {
  Timeline tl;
  tl.write = {PulseShape::square, 0.0, write_ns, 0.0, kDelta, 1.0};
  tl.read = {PulseShape::square, dt_ns, read_ns, 0.0, kDelta, 1.0};
  return tl;
}

Timeline delta_timeline(double dt_ns) {
  Timeline tl;
  tl.write = {PulseShape::delta, 0.0, 150.0, 0.0, kDelta, 1.0};
  tl.read = {PulseShape::delta, dt_ns, 120.0, 0.0, kDelta, 1.0};
  return tl;
}

Timeline trapezoid_timeline(double dt_ns) {
  Timeline tl;
  tl.write = {PulseShape::trapezoid, 0.0, 150.0, 20.0, kDelta, 1.0};
  tl.read = {PulseShape::trapezoid, dt_ns, 120.0, 20.0, kDelta, 1.0};
  return tl;
}

PairModel unpolarized(double K_Hz) {
  PairModel m;
  m.field.K_Hz = K_Hz;
  return m;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / std::abs(*lo);
}

Outcome gradient_parameter() {
  const double K = gradient_parameter_K(0.35, 8.7, 3.6);
  const double rel = std::abs(K - 1.1e6) / 1.1e6;
  return {rel <= 0.02, fmt("K = %.4f MHz, %.2f%% from 1.1 MHz", K * 1e-6, rel * 100)};
}

Outcome zero_field_memory() {
  const auto m = unpolarized(0.0);
  EvalOptions delta;
  delta.backend = Backend::delta;
  std::vector<double> pd, pa;
  for (double us : {0.0, 1.0, 5.0, 10.0, 20.0}) {
    pd.push_back(joint_probability_p12(m, delta_timeline(us * 1e3), delta));
    if (us > 0) pa.push_back(joint_probability_p12(m, square_timeline(150, 120, us * 1e3)));
  }
  const double sd = spread(pd), sa = spread(pa);
  return {sd <= 1e-9 && sa <= 1e-9,
          fmt("relative spread %.2e (delta), %.2e (square pulses, 1-20 us)", sd, sa)};
}

Outcome clock_immunity() {
  auto c = parse_config(read_config_text("fig9-pumped-sigma"), "fig9-pumped-sigma",
                        {Backend::delta, std::nullopt});
  std::vector<double> delays;
  for (int k = 0; k <= 100; ++k) delays.push_back(1000.0 * k);
  EvalOptions opt;
  opt.backend = Backend::delta;
  const auto p = p12_sweep(c.model, c.timeline, delays, opt);
  const double s = spread(p);
  return {s <= 1e-9, fmt("relative spread %.2e over 0-100 us (101 delays)", s)};
}

Outcome sinc_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20071);
  std::uniform_real_distribution<double> K(1e3, 2e6), tau(0.0, 20000.0);
  std::uniform_int_distribution<int> mg(-4, 4), ms(-3, 3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int g = 2 * mg(rng), s = 2 * ms(rng);
    const double k = K(rng), t = tau(rng);
    const auto ref = oracle::phase_average(k, 0.5 * (g + s), t, 1000000);
    const double v = spatial_average_phase(g, s, k, t);
    worst = std::max({worst, std::abs(v - ref.real()), std::abs(ref.imag())});
  }
  const double secs = elapsed_since(t0);
  return {worst <= 1e-10 && secs < 10.0,
          fmt("max deviation %.2e over 20 tuples in %.2f s", worst, secs)};
}

Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dur(120, 150), gap(0, 400);
  std::uniform_real_distribution<double> K(0.0, 1.1e6), s(-0.5, 0.5);
  std::uniform_int_distribution<int> mg(-4, 4), ms(-3, 3);
  const auto cs = LevelScheme::cesium();
  double worst = 0.0;
  int warned = 0;
  const int cases = 24;
  for (int i = 0; i < cases; ++i) {
    const int w = dur(rng), r = dur(rng);
    const auto tl = square_timeline(w, r, w + gap(rng));
    FieldModel f{K(rng), 0.0};
    const auto [a_g, a_s] = pathway_rates(cs, f, 2 * mg(rng), 2 * ms(rng), s(rng));
    const auto exact = F_numeric(kInf, a_g, a_s, tl, default_numeric_step_ns(tl, a_g, a_s));
    if (exact.quality_warning) ++warned;
    const auto closed = F_analytic_square(kInf, a_g, a_s, tl);
    worst = std::max(worst, std::abs(closed - exact.value) / std::abs(exact.value));
  }
  const double secs = elapsed_since(t0);
  return {worst <= 1e-3 && warned == 0 && secs <= 60.0,
          fmt("max relative error %.2e over %.0f cases in %.1f s", worst, cases, secs) +
              (warned ? ", quadrature warnings raised" : "")};
}

Outcome scaling_law() {
  EvalOptions opt;
  opt.backend = Backend::delta;
  double worst = 0.0;
  for (double c : {10.0, 91.7}) {
    for (double dt : {0.0, 50.0, 200.0, 700.0, 2000.0, 10000.0}) {
      const double a = joint_probability_p12(unpolarized(1.1e6), delta_timeline(dt), opt);
      const double b = joint_probability_p12(unpolarized(1.1e6 / c), delta_timeline(dt * c), opt);
      worst = std::max(worst, std::abs(b / a - 1.0));
    }
  }
  const double stretch = 1.1e6 / 12e3;
  return {worst <= 1e-9 && stretch > 90.0 && stretch < 95.0,
          fmt("max deviation %.2e; 1.1 MHz -> 12 kHz stretch %.1f", worst, stretch)};
}

Outcome wavepacket() {
  std::ostringstream d;
  bool ok = true;

  // Rank one at zero field.
  const auto zero = wavepacket_grid(unpolarized(0.0), trapezoid_timeline(200.0), 4.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(zero.values);
  const auto& sv = svd.singularValues();
  const double rank_residual = sv(1) / sv(0);
  ok &= rank_residual <= 1e-10;
  d << fmt("K=0 rank-1 residual %.1e", rank_residual);

  // Early-t1 column, normalised by the zero-field column, versus t2.
  auto decay = [](double K, double dt) {
    const auto tl = trapezoid_timeline(dt);
    const auto a = wavepacket_grid(unpolarized(K), tl, 4.0);
    const auto b = wavepacket_grid(unpolarized(0.0), tl, 4.0);
    const Eigen::Index col = 8;  // t1 in [32, 36) ns, on the write plateau
    const Eigen::Index first = 6, last = a.values.rows() - 7;  // read plateau
    return std::pair{a.values(first, col) / b.values(first, col),
                     a.values(last, col) / b.values(last, col)};
  };
  const auto [d_early, d_late] = decay(1.1e6, 200.0);
  const auto [f_early, f_late] = decay(12e3, 1000.0);
  ok &= d_late < d_early && f_late > 0.99;
  d << fmt("; K=1.1 MHz dt=200: %.3f -> %.3f", d_early, d_late)
    << fmt("; K=12 kHz dt=1000: %.4f -> %.4f", f_early, f_late);

  // Density at t2 - t1 = 400 ns relative to coincidence.
  const Coherence S(unpolarized(1.1e6));
  const double ratio = std::norm(S(400.0)) / std::norm(S(0.0));
  // Quadrature backend with short square pulses centred 400 ns apart.
  EvalOptions num;
  num.backend = Backend::numeric;
  num.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto m = unpolarized(1.1e6);
  const double num_ratio = joint_probability_p12(m, square_timeline(4, 4, 404), num) /
                           joint_probability_p12(m, square_timeline(4, 4, 8), num);
  const bool frozen = std::abs(ratio - kFrozenRatio400) <= 1e-6;
  const bool agree = std::abs(num_ratio / ratio - 1.0) <= 0.05;
  ok &= ratio <= 0.30 && num_ratio <= 0.30 && frozen && agree;
  d << fmt("; P(400 ns)/peak %.6f (quadrature %.6f, bound 0.30, frozen %.6f)", ratio, num_ratio,
           kFrozenRatio400);
  return {ok, d.str()};
}

Outcome photon_statistics() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto weak = correlation_functions(TwoModeState{1e-3, 0}.distribution(), {});
  const auto d = TwoModeState{0.1, 0}.distribution();
  const auto ideal = correlation_functions(d, {});
  const auto mc = simulate_trials(d, {}, 1000000, 20071,
                                  static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  const double secs = elapsed_since(t0);
  const bool analytic = std::abs(weak.g11 - 2.0) <= 1e-2 && std::abs(weak.g22 - 2.0) <= 1e-2 &&
                        std::abs(ideal.g12 - 11.0) <= 1e-6 && std::abs(ideal.R - 30.25) <= 1e-5;
  const double z = std::max({std::abs(mc.g11 - ideal.g11) / mc.se_g11,
                             std::abs(mc.g22 - ideal.g22) / mc.se_g22,
                             std::abs(mc.g12 - ideal.g12) / mc.se_g12,
                             std::abs(mc.R - ideal.R) / mc.se_R});
  std::ostringstream s;
  s << fmt("g11 %.5f g22 %.5f at chi=1e-3; ", weak.g11, weak.g22)
    << fmt("g12 %.6f R %.5f at chi=0.1; ", ideal.g12, ideal.R)
    << fmt("Monte Carlo worst %.2f sigma in %.1f s", z, secs);
  return {analytic && z <= 3.0 && secs < 60.0, s.str()};
}

Outcome raman_widths() {
  const auto a = parse_config(read_config_text("fig3a"), "fig3a");
  const auto sa = zeeman_spectrum(a.model.scheme, a.model.distribution, a.raman.field,
                                  a.raman.probe_extent_mm, a.raman.allowed_dm, a.raman.n_bins);
  const double width = fwhm(sa), span = spectral_span(sa);

  const auto b = parse_config(read_config_text("raman-bias"), "raman-bias");
  const auto sb = zeeman_spectrum(b.model.scheme, b.model.distribution, b.raman.field,
                                  b.raman.probe_extent_mm, b.raman.allowed_dm, b.raman.n_bins);
  const std::size_t mid = sb.detuning_Hz.size() / 2;
  const bool zero_line = sb.detuning_Hz[mid] == 0.0 && sb.weight[mid] > 0.0;

  const bool in_band = width >= 2.5e6 && width <= 7.5e6;
  std::ostringstream s;
  s << fmt("fig3a FWHM %.3f MHz (band 2.5-7.5), full span %.2f MHz", width * 1e-6, span * 1e-6)
    << fmt("; bias 0->0 line at %.1f Hz with weight %.4f", sb.detuning_Hz[mid], sb.weight[mid]);
  if (!in_band) {
    s << "; the m=0 population gives an unshifted line that sets the half maximum";
  }
  return {in_band && zero_line, s.str()};
}

Outcome diffusion() {
  const double a = diffusion_time(150.0), b = diffusion_time(60.0);
  return {a == 900.0 && b == 360.0, fmt("150 um -> %.17g us, 60 um -> %.17g us", a, b)};
}

Outcome angular_momentum() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  long checks = 0;
  const int jmax = 8;  // doubled
  auto cg = [](int j1, int m1, int j2, int m2, int J, int M) {
    if (std::abs(M) > J || (J - M) % 2 != 0) return 0.0;
    return clebsch_gordan({j1, m1}, {j2, m2}, {J, M});
  };
  for (int j1 = 0; j1 <= jmax; ++j1) {
    for (int j2 = 0; j2 <= jmax; ++j2) {
      std::vector<int> Js;
      for (int J = std::abs(j1 - j2); J <= j1 + j2; J += 2) Js.push_back(J);
      // Column orthonormality: sum over m1, m2 at fixed M.
      for (int M = -(j1 + j2); M <= j1 + j2; M += 2) {
        for (int J : Js) {
          for (int Jp : Js) {
            double sum = 0.0;
            for (int m1 = -j1; m1 <= j1; m1 += 2) {
              const int m2 = M - m1;
              if (std::abs(m2) > j2 || (j2 - m2) % 2 != 0) continue;
              sum += cg(j1, m1, j2, m2, J, M) * cg(j1, m1, j2, m2, Jp, M);
            }
            const bool active = std::abs(M) <= J && std::abs(M) <= Jp;
            const double expect = (J == Jp && active) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(sum - expect));
            ++checks;
          }
        }
      }
      // Row orthonormality: sum over J at fixed m1, m2 and m1', m2'.
      for (int m1 = -j1; m1 <= j1; m1 += 2) {
        for (int m2 = -j2; m2 <= j2; m2 += 2) {
          for (int m1p = -j1; m1p <= j1; m1p += 2) {
            const int m2p = m1 + m2 - m1p;
            if (std::abs(m2p) > j2 || (j2 - m2p) % 2 != 0) continue;
            double sum = 0.0;
            for (int J : Js) sum += cg(j1, m1, j2, m2, J, m1 + m2) * cg(j1, m1p, j2, m2p, J, m1 + m2);
            worst = std::max(worst, std::abs(sum - (m1 == m1p ? 1.0 : 0.0)));
            ++checks;
          }
        }
      }
    }
  }
  // 3j symmetries.
  for (int j1 = 0; j1 <= jmax; ++j1) {
    for (int j2 = 0; j2 <= jmax; ++j2) {
      for (int j3 = 0; j3 <= jmax; ++j3) {
        const double sign = ((j1 + j2 + j3) / 2) % 2 == 0 ? 1.0 : -1.0;
        for (int m1 = -j1; m1 <= j1; m1 += 2) {
          for (int m2 = -j2; m2 <= j2; m2 += 2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > j3 || (j3 - m3) % 2 != 0) continue;
            const AngMom a{j1, m1}, b{j2, m2}, c{j3, m3};
            const double w = wigner3j(a, b, c);
            const double dev = std::max(
                {std::abs(wigner3j(b, c, a) - w), std::abs(wigner3j(c, a, b) - w),
                 std::abs(wigner3j(b, a, c) - sign * w), std::abs(wigner3j(a, c, b) - sign * w),
                 std::abs(wigner3j(c, b, a) - sign * w),
                 std::abs(wigner3j({j1, -m1}, {j2, -m2}, {j3, -m3}) - sign * w)});
            worst = std::max(worst, dev);
            ++checks;
          }
        }
      }
    }
  }
  const double secs = elapsed_since(t0);
  return {worst <= 1e-12 && secs < 30.0,
          fmt("max deviation %.2e over %.0f identities in %.2f s", worst, static_cast<double>(checks),
              secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "dlcz_acceptance";
  fs::create_directories(dir);
  const int n = static_cast<int>(std::max(4u, std::thread::hardware_concurrency()));
  std::vector<std::string> mismatched;
  int count = 0;
  for (const auto& p : embedded_presets()) {
    const auto kind = to_string(parse_config(p.json, p.name).kind);
    std::vector<std::string> outputs;
    for (const auto& [tag, threads] :
         std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", n}}) {
      const auto out = (dir / (std::string(p.name) + "_" + tag + ".csv")).string();
      const std::string th = std::to_string(threads);
      const char* argv[] = {"dlczsim", kind, "--config", p.name, "--out", out.c_str(),
                            "--threads", th.c_str()};
      std::ostringstream o, e;
      if (run_cli(8, argv, o, e) != 0) throw std::runtime_error(std::string(p.name) + ": " + e.str());
      outputs.push_back(slurp(out) + slurp(sidecar_path(out)));
    }
    if (outputs[0] != outputs[1] || outputs[0] != outputs[2]) mismatched.push_back(p.name);
    ++count;
  }
  fs::remove_all(dir);
  std::string detail = std::to_string(count) + " presets, 2 runs at 1 thread and 1 at " +
                       std::to_string(n) + " threads";
  for (const auto& m : mismatched) detail += "; differs: " + m;
  return {mismatched.empty() && count > 0, detail};
}

}  // namespace

int main() {
  report(1, "gradient parameter", gradient_parameter);
  report(2, "zero-field memory", zero_field_memory);
  report(3, "clock-pathway immunity", clock_immunity);
  report(4, "sinc dephasing identity", sinc_identity);
  report(5, "closed form vs quadrature", oracle_equivalence);
  report(6, "scaling law", scaling_law);
  report(7, "wavepacket separability", wavepacket);
  report(8, "photon statistics", photon_statistics);
  report(9, "Raman widths", raman_widths);
  report(10, "diffusion scaling", diffusion);
  report(11, "angular-momentum suite", angular_momentum);
  report(12, "determinism", determinism);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
