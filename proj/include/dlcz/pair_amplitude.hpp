#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dlcz/atomic_model.hpp"
#include "dlcz/pulse.hpp"

namespace dlcz {

// Units: inputs take times in ns and angular frequencies in rad/s. Amplitudes
// are reported in nanosecond units (time in ns, angular frequency in rad/ns),
// so F and the pair amplitude are in ns⁴, densities g and P in ns², and p12 is
// |amplitude|² with C = 1. Only ratios and shapes carry physical meaning.

/// Raised when the closed-form backend is asked to work outside the regime it
/// was derived for. The numeric backend has no such restriction.
class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field seen by the ensemble, in frequency units of the |g> Zeeman rate:
/// a_g(s) = 2π·m_g·(bias_Hz + K_Hz·s) for s = z/L in [-1/2, 1/2].
struct FieldModel {
  double K_Hz = 0.0;
  double bias_Hz = 0.0;

  static FieldModel from_profile(const LevelScheme& scheme, const FieldProfile& profile);
};

/// Everything except the pulse timing needed to evaluate pair amplitudes.
struct PairModel {
  LevelScheme scheme = LevelScheme::cesium();
  GroundDistribution distribution = GroundDistribution::unpolarized(8);
  PolarizationSet polarizations = PolarizationSet::lin_perp_lin();
  FieldModel field;

  std::vector<Pathway> pathways() const {
    return enumerate_pathways(scheme, distribution, polarizations);
  }
};

/// Zeeman rates (rad/s) of a pathway for an atom at s = z/L.
std::pair<double, double> pathway_rates(const LevelScheme& scheme, const FieldModel& field,
                                        int two_m_g, int two_m_s, double s);

enum class Prefactor {
  /// 1/((Δw − a_s)(Δr − a_g)); tracks the sharp-edge contributions of
  /// square pulses and is the better single-atom approximation.
  edge_corrected,
  /// 1/(Δw·Δr); the pure large-detuning limit, which keeps the spatially
  /// averaged amplitude a function of K·τ only.
  far_detuned,
};

/// Closed-form F(t) for square or delta pulses at large detuning. t_ns may be
/// +infinity. Throws UnsupportedRegime for trapezoids or when |Δ| is below
/// 10³ times the Zeeman rates or inverse pulse durations.
std::complex<double> F_analytic_square(double t_ns, double a_g, double a_s,
                                       const Timeline& timeline,
                                       Prefactor prefactor = Prefactor::edge_corrected);

struct NumericF {
  std::complex<double> value;
  double error_estimate = 0.0;
  bool quality_warning = false;
  std::string message;
};

/// Four nested time integrals by cumulative trapezoid sweeps at h, h/2 and
/// h/4 followed by Richardson extrapolation. Intervals where both envelopes
/// vanish are propagated exactly. For t_ns = +infinity the value is the mean
/// over the residual detuning-rate oscillation after the read pulse.
///
/// Throws std::invalid_argument when step_ns does not divide the pulse knots
/// (measured from the write start) or the pulses are delta-shaped.
NumericF F_numeric(double t_ns, double a_g, double a_s, const Timeline& timeline,
                   double step_ns);

/// A step that keeps every oscillation below half a radian per step and
/// divides whole-nanosecond knots.
double default_numeric_step_ns(const Timeline& timeline, double a_g, double a_s);

/// Single-atom amplitude density −f_r(t2)·f_w(t1)/(Δr·Δw)·e^{i(a_g−a_s)(t2−t1)};
/// zero unless t2 > t1.
std::complex<double> g_density(double t2_ns, double t1_ns, double a_g, double a_s,
                               const Timeline& timeline);

/// Mean of e^{i2πK(m_g+m_s)sτ} over s in [-1/2, 1/2], i.e.
/// sinc(πK(m_g+m_s)τ). Projections are doubled.
double spatial_average_phase(int two_m_g, int two_m_s, double K_Hz, double tau_ns);

/// Mean of e^{i(a_g−a_s)τ} over the sample for dephasing weight w, including
/// a uniform bias.
std::complex<double> spatial_average_factor(double weight, const FieldModel& field,
                                            double tau_ns);

/// Ensemble coherence S(τ) = Σ D·d·<e^{i(a_g−a_s)τ}>, with pathways grouped
/// by dephasing weight.
class Coherence {
 public:
  Coherence(const std::vector<Pathway>& pathways, const LevelScheme& scheme,
            const FieldModel& field);
  explicit Coherence(const PairModel& model);

  std::complex<double> operator()(double tau_ns) const;
  /// S(0) = Σ D·d.
  std::complex<double> total() const;
  /// Contribution of field-insensitive (w = 0) pathways.
  std::complex<double> static_part() const;

  struct Group {
    double weight;
    std::complex<double> coefficient;
  };
  const std::vector<Group>& groups() const { return groups_; }
  const FieldModel& field() const { return field_; }

 private:
  FieldModel field_;
  std::vector<Group> groups_;
};

/// Ensemble amplitude density P(t2, t1) with C = 1.
std::complex<double> P_density(double t2_ns, double t1_ns, const PairModel& model,
                               const Timeline& timeline);
/// |P|².
double joint_density(double t2_ns, double t1_ns, const PairModel& model,
                     const Timeline& timeline);

enum class Backend { analytic, numeric, delta };

struct EvalOptions {
  Backend backend = Backend::analytic;
  int threads = 1;
  int gl_order = 64;     ///< Gauss-Legendre nodes over s (numeric backend)
  double step_ns = 0.0;  ///< numeric step; 0 selects default_numeric_step_ns
};

/// Total pair probability |Σ D·d·<F(∞)>|² with C = 1.
///
/// analytic: leading-order pathway sum, square or delta pulses only.
/// delta: each pulse collapsed to a delta of the same area at its start.
/// numeric: F_numeric at each Gauss-Legendre node in s.
double joint_probability_p12(const PairModel& model, const Timeline& timeline,
                             const EvalOptions& options = {});

/// p12 for each delay, evaluated in parallel and assembled by index.
std::vector<double> p12_sweep(const PairModel& model, const Timeline& timeline,
                              const std::vector<double>& delays_ns,
                              const EvalOptions& options = {});

/// Large-delay limit of the analytic/delta p12, where only field-insensitive
/// pathways stay in phase. Requires non-overlapping pulses at large delay.
double asymptotic_p12(const PairModel& model, const Timeline& timeline);

struct SmallEnsembleTerms {
  double coherent = 0.0;    ///< |Σ_i Σ_m D_m A_i(m,m)|², scales as N²
  double incoherent = 0.0;  ///< Σ_i Σ_{m',m} D_m |A_i(m',m)|²
  double correction = 0.0;  ///< −Σ_i |Σ_m D_m A_i(m,m)|²
  double total() const { return coherent + incoherent + correction; }
};

/// Exact finite-N pair probability for N identical atoms with transition
/// amplitudes A(m', m) (rows m', columns m) and populations D.
SmallEnsembleTerms small_ensemble_p12(int N, const Eigen::VectorXd& D,
                                      const Eigen::MatrixXcd& A);

/// Joint detection density averaged over uniform bins. Rows index t2 bins,
/// columns t1 bins; cells on or below the diagonal carry only their t2 > t1
/// part, averaged over the full cell.
struct WavepacketGrid {
  std::vector<double> t1_edges_ns;
  std::vector<double> t2_edges_ns;
  Eigen::MatrixXd values;
  double bin_ns = 4.0;
};

struct GridRange {
  double t1_begin_ns, t1_end_ns, t2_begin_ns, t2_end_ns;
};

/// Default range: t1 over the write support, t2 over the read support. Bins
/// start at each pulse start and the last bin may overhang the pulse end.
GridRange default_grid_range(const Timeline& timeline);

WavepacketGrid wavepacket_grid(const PairModel& model, const Timeline& timeline,
                               double bin_ns = 4.0, int threads = 1);
WavepacketGrid wavepacket_grid(const PairModel& model, const Timeline& timeline,
                               double bin_ns, const GridRange& range, int threads);

/// Σ over the default grid of the amplitude P integrated over each cell. Its
/// squared modulus equals the analytic p12 when the grid covers both pulses.
std::complex<double> wavepacket_total_amplitude(const PairModel& model,
                                                const Timeline& timeline, double bin_ns);

}  // namespace dlcz
