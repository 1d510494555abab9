#pragma once

#include <complex>

namespace dlcz {

/// Angular momentum state |j, m> stored with doubled quantum numbers, so that
/// half-integer electronic momenta never need floating representations.
class AngMom {
 public:
  /// Throws std::invalid_argument unless two_j >= 0, |two_m| <= two_j and the
  /// two numbers share parity.
  AngMom(int two_j, int two_m);

  static bool valid(int two_j, int two_m) noexcept;

  int two_j() const noexcept { return two_j_; }
  int two_m() const noexcept { return two_m_; }
  double j() const noexcept { return 0.5 * two_j_; }
  double m() const noexcept { return 0.5 * two_m_; }

  friend bool operator==(const AngMom&, const AngMom&) = default;

 private:
  int two_j_;
  int two_m_;
};

/// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3), evaluated with the Racah sum in
/// exact rational arithmetic and rounded once. Returns 0 when the triangle
/// rule, the projection sum or the integrality of j1+j2+j3 fails.
double wigner3j(const AngMom& a, const AngMom& b, const AngMom& c);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley phase).
double clebsch_gordan(const AngMom& a, const AngMom& b, const AngMom& coupled);

/// Polarization vector expressed by the amplitudes that drive Delta m = q
/// transitions in absorption (q = -1, 0, +1).
struct SphericalPolarization {
  std::complex<double> minus{};
  std::complex<double> zero{};
  std::complex<double> plus{};

  /// Normalizes the components; throws std::invalid_argument for a zero vector.
  static SphericalPolarization from_components(std::complex<double> minus,
                                               std::complex<double> zero,
                                               std::complex<double> plus);
  static SphericalPolarization sigma_plus();
  static SphericalPolarization sigma_minus();
  static SphericalPolarization pi();
  /// Transverse linear polarizations for light propagating along the
  /// quantization axis.
  static SphericalPolarization linear_x();
  static SphericalPolarization linear_y();

  std::complex<double> component(int q) const;
  SphericalPolarization conjugate() const;
  double norm_squared() const;
  bool is_normalized(double tol = 1e-12) const;
};

/// Absorption amplitude sum_q pol_q <F_lo m_lo; 1 q | F_hi m_hi> for a dipole
/// transition with unit reduced matrix element. Emission of a photon with the
/// same polarization is the complex conjugate.
///
/// Throws std::invalid_argument when |F_hi - F_lo| > 1, when the lower
/// projection lies outside its manifold, or when a projection has the wrong
/// parity. An upper projection outside its manifold yields 0.
std::complex<double> dipole_coupling(int two_F_lo, int two_m_lo, int two_F_hi,
                                     int two_m_hi,
                                     const SphericalPolarization& pol);

}  // namespace dlcz
