#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dlcz {

/// Joint photon-number distribution P(n1, n2); rows n1, columns n2.
struct JointDistribution {
  Eigen::MatrixXd P;

  int n_max() const { return static_cast<int>(P.rows()) - 1; }
  double mass() const { return P.sum(); }
};

/// Pair source with excitation probability chi, truncated at n_max photons.
struct TwoModeState {
  double chi = 0.1;
  int n_max = 0;  ///< 0 picks the smallest n_max keeping mass >= 1 - 1e-12

  /// Throws std::invalid_argument unless 0 < chi < 1 and the truncation keeps
  /// the mass within 1e-12 of one.
  JointDistribution distribution() const;
};

/// P(n, n) = (1 − χ)·χⁿ, zero off the diagonal. Not renormalized after
/// truncation. Throws std::invalid_argument for chi outside (0, 1), negative
/// n_max, or a truncation that loses more than 1e-12 of the mass.
JointDistribution ideal_joint_distribution(double chi, int n_max);

/// Product of independent Poissonian modes, a classical reference input.
JointDistribution poissonian_product(double mean1, double mean2, int n_max);

/// Each photon of field i reaches the detectors with probability eta_i and is
/// routed 50/50 to detector a or b. Each detector adds one background count
/// with probability bg_i per trial, independent of the source.
struct DetectionModel {
  double eta1 = 1.0;
  double eta2 = 1.0;
  double bg1 = 0.0;
  double bg2 = 0.0;

  void validate() const;
};

/// Normalized correlations. Detectors are linear counters: p1 is the mean
/// number of field-1 counts per trial (both detectors), p11 the mean product
/// of the two field-1 detector counts, and so on. At low rates these coincide
/// with click probabilities.
struct CorrelationEstimate {
  double p1 = 0.0, p2 = 0.0;
  double p11 = 0.0, p22 = 0.0, p12 = 0.0;
  double g11 = 0.0, g22 = 0.0, g12 = 0.0, R = 0.0;
  double se_g11 = 0.0, se_g22 = 0.0, se_g12 = 0.0, se_R = 0.0;
  std::uint64_t trials = 0;  ///< 0 for exact enumeration
  bool nonclassical = false;
};

/// Exact values by enumeration over the distribution.
CorrelationEstimate correlation_functions(const JointDistribution& dist,
                                          const DetectionModel& model);

struct CauchySchwarz {
  double R = 0.0;
  bool nonclassical = false;
};

/// R = g12²/(g11·g22), nonclassical when R > 1. Throws std::invalid_argument
/// unless g11 and g22 are positive.
CauchySchwarz cauchy_schwarz_R(double g11, double g22, double g12);

/// Monte-Carlo trials in fixed blocks of 2^16, each with its own generator
/// seeded from (seed, block index). Counts are accumulated as integers, so
/// the result is identical for any thread count. Standard errors use the
/// delta method on the per-trial moment covariance.
CorrelationEstimate simulate_trials(const JointDistribution& dist, const DetectionModel& model,
                                    std::uint64_t n_trials, std::uint64_t seed, int threads = 1);

struct G12Point {
  double delay_ns;
  double g12;
  double sigma;
};

struct XiFit {
  double xi = 0.0;
  double xi_sigma = 0.0;
  double xi_th = 0.0;
  double chi_squared = 0.0;
  std::size_t points = 0;
};

/// Weighted least-squares scale ξ between a theory curve p12(Δt), linearly
/// interpolated, and g12 data; ξ_th is the inverse of the mean of the last
/// tenth of the theory samples. Throws std::invalid_argument for an empty
/// data set, non-positive sigmas, data outside the theory range, or an
/// all-zero theory curve.
XiFit scale_fit_xi(const std::vector<double>& theory_delay_ns,
                   const std::vector<double>& theory_p12, const std::vector<G12Point>& data);

class DataParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads "delay_ns, g12, sigma" rows after a mandatory header row. Fields may
/// be separated by commas, semicolons, tabs or spaces; '#' starts a comment
/// line. Errors name the source and the 1-based line number.
std::vector<G12Point> read_g12_data(std::istream& in, const std::string& source = "<input>");

}  // namespace dlcz
