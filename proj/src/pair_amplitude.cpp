#include "dlcz/pair_amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "numeric.hpp"
#include "parallel.hpp"

namespace dlcz {

using detail::cplx;

namespace {

constexpr double kNs = 1e-9;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRegimeMargin = 1e3;
// Amplitudes are reported in nanosecond units (times in ns, angular
// frequencies in rad/ns). A density with 1/(Δr·Δw) gains 1e18, a fourfold
// time integral 1e36.
constexpr double kDensityUnit = 1e18;
constexpr double kAmplitudeUnit = 1e36;

double max_zeeman_rate(const LevelScheme& scheme, const FieldModel& field,
                       const std::vector<Pathway>& pathways) {
  const double edge_Hz = std::abs(field.bias_Hz) + 0.5 * std::abs(field.K_Hz);
  const double ratio = std::abs(scheme.g_s_MHz_per_G / scheme.g_g_MHz_per_G);
  double m = 0.0;
  for (const auto& p : pathways) {
    m = std::max({m, 0.5 * std::abs(p.two_m_g), 0.5 * ratio * std::abs(p.two_m_s)});
  }
  return kTwoPi * m * edge_Hz;
}

// Inverse-duration margin check shared by F_analytic_square and p12.
void check_regime(const Timeline& tl, double zeeman_rate) {
  if (tl.write.shape == PulseShape::trapezoid || tl.read.shape == PulseShape::trapezoid) {
    throw UnsupportedRegime(
        "closed form covers square and delta pulses only; use the numeric backend");
  }
  double scale = zeeman_rate;
  if (!tl.is_delta()) {
    scale = std::max({scale, 1.0 / (tl.write.fwhm_ns * kNs), 1.0 / (tl.read.fwhm_ns * kNs)});
  }
  const double detuning =
      std::min(std::abs(tl.write.detuning_rad_per_s), std::abs(tl.read.detuning_rad_per_s));
  if (!(detuning >= kRegimeMargin * scale)) {
    std::ostringstream os;
    os << "detuning " << detuning << " rad/s is below 1e3 x " << scale
       << " rad/s required by the closed form; use the numeric backend";
    throw UnsupportedRegime(os.str());
  }
}

// ∫∫_{t1<t2<=t} f_r(t2) f_w(t1) e^{iω(t2−t1)} for square pulses, times in
// seconds relative to the write start.
cplx square_pair_integral(double omega, double w1, double r0, double r1, double t) {
  const double t_end = std::min(r1, t);
  cplx sum = 0.0;
  const double a = std::max(r0, 0.0);
  const double b = std::min(t_end, w1);
  if (b > a) {
    auto G = [omega](double x) { return x * x * detail::phi2(cplx(0.0, omega * x)); };
    sum += G(b) - G(a);
  }
  const double lo = std::max(r0, w1);
  if (t_end > lo) {
    sum += detail::exp_integral(-omega, 0.0, w1) * detail::exp_integral(omega, lo, t_end);
  }
  return sum;
}

}  // namespace

FieldModel FieldModel::from_profile(const LevelScheme& scheme, const FieldProfile& profile) {
  profile.validate();
  return {gradient_parameter_K(scheme.g_g_MHz_per_G, profile.gradient_G_per_cm, profile.length_mm),
          scheme.g_g_MHz_per_G * 1e6 * profile.bias_G};
}

std::pair<double, double> pathway_rates(const LevelScheme& scheme, const FieldModel& field,
                                        int two_m_g, int two_m_s, double s) {
  const double f = kTwoPi * (field.bias_Hz + field.K_Hz * s);
  const double ratio = scheme.g_s_MHz_per_G / scheme.g_g_MHz_per_G;
  return {f * 0.5 * two_m_g, f * ratio * 0.5 * two_m_s};
}

std::complex<double> F_analytic_square(double t_ns, double a_g, double a_s,
                                       const Timeline& timeline, Prefactor prefactor) {
  timeline.validate();
  check_regime(timeline, std::max(std::abs(a_g), std::abs(a_s)));

  const double dw = timeline.write.detuning_rad_per_s;
  const double dr = timeline.read.detuning_rad_per_s;
  const double omega = a_g - a_s;
  const double origin = timeline.write.start_ns;
  const double t = (t_ns - origin) * kNs;
  if (!(t > 0.0) && !(timeline.is_delta() && t == 0.0)) return 0.0;

  cplx J;
  if (timeline.is_delta()) {
    const double dt = timeline.delta_t_ns() * kNs;
    if (t < dt) return 0.0;
    J = timeline.write.area_ns() * kNs * timeline.read.area_ns() * kNs *
        std::polar(1.0, omega * dt);
  } else {
    const double w1 = timeline.write.fwhm_ns * kNs;
    const double r0 = timeline.delta_t_ns() * kNs;
    const double r1 = r0 + timeline.read.fwhm_ns * kNs;
    J = timeline.write.amplitude * timeline.read.amplitude *
        square_pair_integral(omega, w1, r0, r1, t);
  }
  const double denom =
      prefactor == Prefactor::edge_corrected ? (dw - a_s) * (dr - a_g) : dw * dr;
  return -J / denom * kAmplitudeUnit;
}

namespace {

struct NestedState {
  cplx I1, I2, I3, F;
};

class NestedSweep {
 public:
  NestedSweep(double a_g, double a_s, const Timeline& tl)
      : tl_(tl),
        alpha_(tl.write.detuning_rad_per_s - a_g),
        beta_(a_s - tl.write.detuning_rad_per_s),
        gamma_(tl.read.detuning_rad_per_s - a_s),
        delta_(a_g - tl.read.detuning_rad_per_s) {}

  double max_rate() const {
    return std::max({std::abs(alpha_), std::abs(beta_), std::abs(gamma_), std::abs(delta_)});
  }
  double delta() const { return delta_; }

  // Times are ns relative to the write start; exponents use seconds.
  void idle(NestedState& st, double a, double b) const {
    st.I2 += st.I1 * detail::exp_integral(beta_, a * kNs, b * kNs);
    st.F += st.I3 * detail::exp_integral(delta_, a * kNs, b * kNs);
  }

  void trapezoid(NestedState& st, double a, double b, long steps) const {
    const double origin = tl_.write.start_ns;
    const double hs = (b - a) / static_cast<double>(steps) * kNs;
    const double half = 0.5 * hs;
    double fw = envelope_right(tl_.write, origin + a);
    double fr = envelope_right(tl_.read, origin + a);
    double ts = a * kNs;
    cplx eg = std::polar(1.0, gamma_ * ts);
    cplx g1 = fw * std::polar(1.0, alpha_ * ts);
    cplx g2 = std::polar(1.0, beta_ * ts) * st.I1;
    cplx g3 = fr * eg * st.I2;
    cplx g4 = std::polar(1.0, delta_ * ts) * st.I3;
    for (long j = 1; j <= steps; ++j) {
      const double t_ns = j == steps ? b : a + (b - a) * static_cast<double>(j) / steps;
      if (j == steps) {
        fw = envelope_left(tl_.write, origin + t_ns);
        fr = envelope_left(tl_.read, origin + t_ns);
      } else {
        fw = envelope_value(tl_.write, origin + t_ns);
        fr = envelope_value(tl_.read, origin + t_ns);
      }
      ts = t_ns * kNs;
      const cplx n1 = fw * std::polar(1.0, alpha_ * ts);
      st.I1 += half * (g1 + n1);
      const cplx n2 = std::polar(1.0, beta_ * ts) * st.I1;
      st.I2 += half * (g2 + n2);
      const cplx n3 = fr * std::polar(1.0, gamma_ * ts) * st.I2;
      st.I3 += half * (g3 + n3);
      const cplx n4 = std::polar(1.0, delta_ * ts) * st.I3;
      st.F += half * (g4 + n4);
      g1 = n1;
      g2 = n2;
      g3 = n3;
      g4 = n4;
    }
  }

 private:
  const Timeline& tl_;
  double alpha_, beta_, gamma_, delta_;
};

bool both_idle(const Timeline& tl, double mid_abs_ns) {
  return envelope_value(tl.write, mid_abs_ns) == 0.0 && envelope_value(tl.read, mid_abs_ns) == 0.0;
}

}  // namespace

NumericF F_numeric(double t_ns, double a_g, double a_s, const Timeline& timeline,
                   double step_ns) {
  timeline.validate();
  if (timeline.is_delta()) {
    throw std::invalid_argument("numeric quadrature needs finite pulse envelopes");
  }
  if (!(step_ns > 0.0) || !std::isfinite(step_ns)) {
    throw std::invalid_argument("quadrature step must be positive");
  }
  const double origin = timeline.write.start_ns;
  std::vector<double> knots;
  for (const Pulse* p : {&timeline.write, &timeline.read}) {
    for (double k : p->knots_ns()) {
      const double rel = k - origin;
      const double ratio = rel / step_ns;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::abs(ratio))) {
        std::ostringstream os;
        os << "step " << step_ns << " ns does not divide pulse edge at " << k << " ns";
        throw std::invalid_argument(os.str());
      }
      knots.push_back(std::round(ratio) * step_ns);
    }
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  NumericF out;
  const double t_rel = t_ns - origin;
  if (!(t_rel > 0.0)) return out;

  const NestedSweep sweep(a_g, a_s, timeline);
  const double last = knots.back();
  const double stop = std::min(t_rel, last);
  std::vector<double> edges;
  for (double k : knots) {
    if (k < stop) edges.push_back(k);
  }
  edges.push_back(stop);

  auto run = [&](int refine) {
    NestedState st{};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double a = edges[i], b = edges[i + 1];
      if (both_idle(timeline, origin + 0.5 * (a + b))) {
        sweep.idle(st, a, b);
        continue;
      }
      const long base = std::max(1L, static_cast<long>(std::ceil((b - a) / step_ns - 1e-9)));
      sweep.trapezoid(st, a, b, base * refine);
    }
    if (t_rel > stop) {
      if (std::isfinite(t_rel)) {
        sweep.idle(st, stop, t_rel);
      } else {
        // Drop the term oscillating at the read detuning after the pulses.
        st.F -= st.I3 * std::polar(1.0, sweep.delta() * stop * kNs) / cplx(0.0, sweep.delta());
      }
    }
    return st.F;
  };

  const cplx f1 = run(1), f2 = run(2), f4 = run(4);
  const cplx r1 = (4.0 * f2 - f1) / 3.0;
  const cplx r1b = (4.0 * f4 - f2) / 3.0;
  const cplx r2 = (16.0 * r1b - r1) / 15.0;
  out.value = r2 * kAmplitudeUnit;
  out.error_estimate = std::abs(r2 - r1b) * kAmplitudeUnit;

  const double phase_per_step = sweep.max_rate() * step_ns * kNs;
  std::ostringstream msg;
  if (phase_per_step > 0.5) {
    out.quality_warning = true;
    msg << "step resolves the fastest oscillation with only " << phase_per_step
        << " rad per step (limit 0.5). ";
  }
  if (out.error_estimate > 1e-3 * std::abs(out.value)) {
    out.quality_warning = true;
    msg << "estimated relative error " << out.error_estimate / std::abs(out.value) << " exceeds 1e-3.";
  }
  out.message = msg.str();
  return out;
}

double default_numeric_step_ns(const Timeline& timeline, double a_g, double a_s) {
  const NestedSweep sweep(a_g, a_s, timeline);
  const double needed = sweep.max_rate() * kNs / 0.5;
  double n = 1.0;
  while (n < needed) n *= 2.0;
  return 1.0 / n;
}

std::complex<double> g_density(double t2_ns, double t1_ns, double a_g, double a_s,
                               const Timeline& timeline) {
  if (!(t2_ns > t1_ns)) return 0.0;
  const double fr = envelope_value(timeline.read, t2_ns);
  const double fw = envelope_value(timeline.write, t1_ns);
  if (fr == 0.0 || fw == 0.0) return 0.0;
  const double scale = -fr * fw * kDensityUnit /
                       (timeline.read.detuning_rad_per_s * timeline.write.detuning_rad_per_s);
  return scale * std::polar(1.0, (a_g - a_s) * (t2_ns - t1_ns) * kNs);
}

double spatial_average_phase(int two_m_g, int two_m_s, double K_Hz, double tau_ns) {
  const double w = 0.5 * (two_m_g + two_m_s);
  return detail::sinc(std::numbers::pi * K_Hz * w * tau_ns * kNs);
}

std::complex<double> spatial_average_factor(double weight, const FieldModel& field,
                                            double tau_ns) {
  const double tau = tau_ns * kNs;
  const double s = detail::sinc(std::numbers::pi * field.K_Hz * weight * tau);
  if (field.bias_Hz == 0.0) return s;
  return s * std::polar(1.0, kTwoPi * weight * field.bias_Hz * tau);
}

Coherence::Coherence(const std::vector<Pathway>& pathways, const LevelScheme& scheme,
                     const FieldModel& field)
    : field_(field) {
  for (const auto& p : pathways) {
    const double w = dephasing_weight(scheme, p.two_m_g, p.two_m_s);
    const cplx c = p.population * p.strength;
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [w](const Group& g) { return std::abs(g.weight - w) < 1e-9; });
    if (it == groups_.end()) {
      groups_.push_back({w, c});
    } else {
      it->coefficient += c;
    }
  }
  std::sort(groups_.begin(), groups_.end(),
            [](const Group& a, const Group& b) { return a.weight < b.weight; });
}

Coherence::Coherence(const PairModel& model)
    : Coherence(model.pathways(), model.scheme, model.field) {}

std::complex<double> Coherence::operator()(double tau_ns) const {
  cplx s = 0.0;
  for (const auto& g : groups_) {
    s += g.coefficient * (g.weight == 0.0 ? cplx(1.0) : spatial_average_factor(g.weight, field_, tau_ns));
  }
  return s;
}

std::complex<double> Coherence::total() const {
  cplx s = 0.0;
  for (const auto& g : groups_) s += g.coefficient;
  return s;
}

std::complex<double> Coherence::static_part() const {
  for (const auto& g : groups_) {
    if (std::abs(g.weight) < 1e-9) return g.coefficient;
  }
  return 0.0;
}

std::complex<double> P_density(double t2_ns, double t1_ns, const PairModel& model,
                               const Timeline& timeline) {
  if (!(t2_ns > t1_ns)) return 0.0;
  const double fr = envelope_value(timeline.read, t2_ns);
  const double fw = envelope_value(timeline.write, t1_ns);
  if (fr == 0.0 || fw == 0.0) return 0.0;
  const Coherence S(model);
  return -fr * fw * kDensityUnit /
         (timeline.read.detuning_rad_per_s * timeline.write.detuning_rad_per_s) * S(t2_ns - t1_ns);
}

double joint_density(double t2_ns, double t1_ns, const PairModel& model,
                     const Timeline& timeline) {
  return std::norm(P_density(t2_ns, t1_ns, model, timeline));
}

namespace {

Timeline as_delta(const Timeline& tl) {
  Timeline d = tl;
  for (Pulse* p : {&d.write, &d.read}) {
    p->shape = PulseShape::delta;
    p->rise_ns = 0.0;
  }
  return d;
}

// ∫_0^∞ C(τ) S(τ) dτ for square pulses, C the envelope cross-correlation.
cplx square_overlap_integral(const Timeline& tl, const Coherence& S) {
  const double w1 = tl.write.fwhm_ns;
  const double r0 = tl.delta_t_ns();
  const double r1 = r0 + tl.read.fwhm_ns;
  const double amp = tl.write.amplitude * tl.read.amplitude;
  auto C = [&](double tau) {
    return amp * std::max(0.0, std::min(w1, r1 - tau) - std::max(0.0, r0 - tau));
  };
  std::vector<double> breaks{0.0};
  for (double b : {r0 - w1, r0, r1 - w1, r1}) {
    if (b > 0.0) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Fastest phase rate of any sinc or bias factor, rad per ns.
  double rate = 0.0;
  for (const auto& g : S.groups()) {
    rate = std::max(rate, std::abs(g.weight) * kNs *
                              (std::numbers::pi * std::abs(S.field().K_Hz) +
                               kTwoPi * std::abs(S.field().bias_Hz)));
  }
  const auto& rule = detail::gauss_legendre(32);
  std::vector<cplx> pieces;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    const int sub = 1 + static_cast<int>(std::max((b - a) / 50.0, (b - a) * rate / 4.0));
    const double h = (b - a) / sub;
    for (int k = 0; k < sub; ++k) {
      const double lo = a + k * h;
      cplx acc = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double tau = lo + 0.5 * h * (rule.nodes[q] + 1.0);
        acc += rule.weights[q] * C(tau) * S(tau);
      }
      pieces.push_back(0.5 * h * acc);
    }
  }
  return detail::pairwise_sum(pieces) * kNs * kNs;
}

}  // namespace

double joint_probability_p12(const PairModel& model, const Timeline& timeline,
                             const EvalOptions& options) {
  timeline.validate();
  const auto pathways = model.pathways();
  const double dw = timeline.write.detuning_rad_per_s;
  const double dr = timeline.read.detuning_rad_per_s;

  if (options.backend == Backend::delta ||
      (options.backend == Backend::analytic && timeline.is_delta())) {
    const Coherence S(pathways, model.scheme, model.field);
    const Timeline d = as_delta(timeline);
    const cplx phi = -(d.write.area_ns() * kNs) * (d.read.area_ns() * kNs) / (dw * dr) *
                     S(d.delta_t_ns());
    return std::norm(phi * kAmplitudeUnit);
  }

  if (options.backend == Backend::analytic) {
    check_regime(timeline, max_zeeman_rate(model.scheme, model.field, pathways));
    const Coherence S(pathways, model.scheme, model.field);
    const cplx phi = -square_overlap_integral(timeline, S) / (dw * dr);
    return std::norm(phi * kAmplitudeUnit);
  }

  // Numeric backend.
  if (timeline.is_delta()) {
    throw UnsupportedRegime("the numeric backend needs finite pulse envelopes");
  }
  double step = options.step_ns;
  if (step <= 0.0) {
    double a_max = max_zeeman_rate(model.scheme, model.field, pathways);
    step = default_numeric_step_ns(timeline, a_max, -a_max);
  }
  const auto& rule = detail::gauss_legendre(options.gl_order);
  auto node_sum = [&](std::size_t k) {
    const double s = 0.5 * rule.nodes[k];
    cplx acc = 0.0;
    for (const auto& p : pathways) {
      const auto [a_g, a_s] = pathway_rates(model.scheme, model.field, p.two_m_g, p.two_m_s, s);
      const auto F = F_numeric(std::numeric_limits<double>::infinity(), a_g, a_s, timeline, step);
      acc += p.population * p.strength * F.value;
    }
    return 0.5 * rule.weights[k] * acc;
  };
  const auto parts = detail::parallel_map(rule.nodes.size(), options.threads, node_sum);
  return std::norm(detail::pairwise_sum(parts));
}

std::vector<double> p12_sweep(const PairModel& model, const Timeline& timeline,
                              const std::vector<double>& delays_ns, const EvalOptions& options) {
  EvalOptions inner = options;
  const bool outer = delays_ns.size() >= static_cast<std::size_t>(std::max(1, options.threads));
  inner.threads = outer ? 1 : options.threads;
  return detail::parallel_map(delays_ns.size(), outer ? options.threads : 1, [&](std::size_t i) {
    return joint_probability_p12(model, timeline.with_delay(delays_ns[i]), inner);
  });
}

double asymptotic_p12(const PairModel& model, const Timeline& timeline) {
  timeline.validate();
  const Coherence S(model);
  const double areas = timeline.write.area_ns() * kNs * timeline.read.area_ns() * kNs;
  return std::norm(S.static_part() * areas * kAmplitudeUnit /
                   (timeline.write.detuning_rad_per_s * timeline.read.detuning_rad_per_s));
}

SmallEnsembleTerms small_ensemble_p12(int N, const Eigen::VectorXd& D, const Eigen::MatrixXcd& A) {
  if (N < 1) throw std::invalid_argument("ensemble needs at least one atom");
  if (A.rows() != A.cols() || A.rows() != D.size()) {
    throw std::invalid_argument("amplitude matrix must be square and match the distribution");
  }
  cplx diag = 0.0;
  double incoherent = 0.0;
  for (Eigen::Index m = 0; m < D.size(); ++m) {
    diag += D(m) * A(m, m);
    for (Eigen::Index mp = 0; mp < D.size(); ++mp) incoherent += D(m) * std::norm(A(mp, m));
  }
  SmallEnsembleTerms t;
  const double n = N;
  t.coherent = n * n * std::norm(diag);
  t.incoherent = n * incoherent;
  t.correction = -n * std::norm(diag);
  return t;
}

}  // namespace dlcz
