#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dlcz/angular_momentum.hpp"

namespace dlcz {

/// Four hyperfine manifolds of the write/read scheme: ground |g>, storage |s>,
/// and the excited states |a> (write) and |b> (read). All F values are doubled.
struct LevelScheme {
  int two_F_g = 8;
  int two_F_s = 6;
  int two_F_a = 8;
  int two_F_b = 8;
  double g_g_MHz_per_G = 0.35;   ///< signed Zeeman rate of |g>
  double g_s_MHz_per_G = -0.35;  ///< signed Zeeman rate of |s>

  /// Cesium D2 scheme: F=4 -> F'=4 -> F=3 -> F'=4 -> F=4.
  static LevelScheme cesium();

  /// Throws std::invalid_argument if a required dipole step is missing or a
  /// Zeeman rate is not finite, or if g_g is zero (K is defined through g_g).
  void validate() const;

  int num_g() const { return two_F_g + 1; }
  int num_s() const { return two_F_s + 1; }
};

/// Populations D_m over the ground manifold, indexed from m = -F_g upwards.
class GroundDistribution {
 public:
  /// Throws std::invalid_argument for negative entries or a sum off by more
  /// than 1e-12.
  GroundDistribution(int two_F_g, std::vector<double> weights);

  static GroundDistribution unpolarized(int two_F_g);
  /// All population in a single projection (doubled).
  static GroundDistribution polarized(int two_F_g, int two_m);
  /// Normalizes arbitrary non-negative weights.
  static GroundDistribution from_weights(int two_F_g, std::vector<double> weights);

  int two_F() const { return two_F_; }
  double at(int two_m) const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  int two_F_;
  std::vector<double> weights_;
};

/// Longitudinal field B(z) = bias + gradient * z for z in [-L/2, L/2].
struct FieldProfile {
  double gradient_G_per_cm = 0.0;
  double length_mm = 1.0;
  double bias_G = 0.0;

  void validate() const;
  double field_G(double z_mm) const { return bias_G + gradient_G_per_cm * z_mm / 10.0; }
};

/// Write, field-1 (Stokes), read and field-2 (anti-Stokes) polarizations.
struct PolarizationSet {
  SphericalPolarization write;
  SphericalPolarization field1;
  SphericalPolarization read;
  SphericalPolarization field2;

  /// Orthogonal linear write/read with each photon detected orthogonally to
  /// its pump: write x, field 1 y, read y, field 2 x.
  static PolarizationSet lin_perp_lin();
  /// sigma+ write and field 1, sigma- read and field 2.
  static PolarizationSet sigma_clock();
  PolarizationSet conjugate() const;
};

/// One excitation route m_g -> m_s -> m_g with its four-coupling strength and
/// the population of its starting projection.
struct Pathway {
  int two_m_g = 0;
  int two_m_s = 0;
  std::complex<double> strength;
  double population = 0.0;
};

/// 2π·g·10⁶·m·B in rad/s, with m doubled.
double zeeman_rate(double g_MHz_per_G, int two_m, double B_G);

/// K = g·10⁶·b·L in Hz (b in G/cm, L in mm).
double gradient_parameter_K(double g_MHz_per_G, double b_G_per_cm, double L_mm);

/// Dephasing weight w such that a_g - a_s = 2π·K·w·s along the sample
/// (s = z/L). For opposite ground-state g-factors this is m_g + m_s.
double dephasing_weight(const LevelScheme& scheme, int two_m_g, int two_m_s);

/// Sum over m_a, m_b of the four couplings; emitted photons enter conjugated.
std::complex<double> pathway_strength(const LevelScheme& scheme, int two_m_g,
                                      int two_m_s, const PolarizationSet& pols);

/// All pathways with populated m_g and non-vanishing strength, ordered by
/// (m_g, m_s). Strengths below 1e-12 of the largest are treated as zero.
std::vector<Pathway> enumerate_pathways(const LevelScheme& scheme,
                                        const GroundDistribution& distribution,
                                        const PolarizationSet& pols);

}  // namespace dlcz
