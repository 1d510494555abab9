#include "dlcz/angular_momentum.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlcz {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int factorial(int n) {
  static std::mutex mutex;
  static std::vector<mp::cpp_int> table{mp::cpp_int(1)};
  std::lock_guard lock(mutex);
  while (static_cast<int>(table.size()) <= n) {
    // Evaluate before push_back; the expression template refers into table.
    mp::cpp_int next = table.back() * static_cast<unsigned>(table.size());
    table.push_back(std::move(next));
  }
  return table[static_cast<std::size_t>(n)];
}

bool triangle(int two_a, int two_b, int two_c) {
  return two_c >= std::abs(two_a - two_b) && two_c <= two_a + two_b &&
         (two_a + two_b + two_c) % 2 == 0;
}

}  // namespace

AngMom::AngMom(int two_j, int two_m) : two_j_(two_j), two_m_(two_m) {
  if (!valid(two_j, two_m)) {
    throw std::invalid_argument("invalid angular momentum (2j=" +
                                std::to_string(two_j) +
                                ", 2m=" + std::to_string(two_m) + ")");
  }
}

bool AngMom::valid(int two_j, int two_m) noexcept {
  return two_j >= 0 && std::abs(two_m) <= two_j &&
         (two_j - two_m) % 2 == 0;
}

double wigner3j(const AngMom& a, const AngMom& b, const AngMom& c) {
  const int j1 = a.two_j(), j2 = b.two_j(), j3 = c.two_j();
  const int m1 = a.two_m(), m2 = b.two_m(), m3 = c.two_m();
  if (m1 + m2 + m3 != 0 || !triangle(j1, j2, j3)) return 0.0;

  // All factorial arguments below are integers once halved.
  const int t1 = (j1 + j2 - j3) / 2;
  const int t2 = (j1 - j2 + j3) / 2;
  const int t3 = (-j1 + j2 + j3) / 2;
  const int total = (j1 + j2 + j3) / 2;

  const int k_min = std::max({0, (j2 - j3 - m1) / 2, (j1 - j3 + m2) / 2});
  const int k_max = std::min({t1, (j1 - m1) / 2, (j2 + m2) / 2});
  if (k_min > k_max) return 0.0;

  mp::cpp_rational sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    mp::cpp_int denom = factorial(k) * factorial((j3 - j2 + m1) / 2 + k) *
                        factorial((j3 - j1 - m2) / 2 + k) * factorial(t1 - k) *
                        factorial((j1 - m1) / 2 - k) *
                        factorial((j2 + m2) / 2 - k);
    mp::cpp_rational term(mp::cpp_int(1), denom);
    if (k % 2 != 0) term = -term;
    sum += term;
  }
  if (sum == 0) return 0.0;

  mp::cpp_int num = factorial(t1) * factorial(t2) * factorial(t3) *
                    factorial((j1 + m1) / 2) * factorial((j1 - m1) / 2) *
                    factorial((j2 + m2) / 2) * factorial((j2 - m2) / 2) *
                    factorial((j3 + m3) / 2) * factorial((j3 - m3) / 2);
  const mp::cpp_rational squared =
      mp::cpp_rational(num, factorial(total + 1)) * sum * sum;

  const double magnitude = std::sqrt(squared.convert_to<double>());
  const int phase = ((j1 - j2 - m3) / 2) % 2 == 0 ? 1 : -1;
  return sum > 0 ? phase * magnitude : -phase * magnitude;
}

double clebsch_gordan(const AngMom& a, const AngMom& b, const AngMom& coupled) {
  if (a.two_m() + b.two_m() != coupled.two_m()) return 0.0;
  const double three_j =
      wigner3j(a, b, AngMom(coupled.two_j(), -coupled.two_m()));
  if (three_j == 0.0) return 0.0;
  const int exponent = (a.two_j() - b.two_j() + coupled.two_m()) / 2;
  const double phase = exponent % 2 == 0 ? 1.0 : -1.0;
  return phase * std::sqrt(coupled.two_j() + 1.0) * three_j;
}

SphericalPolarization SphericalPolarization::from_components(
    std::complex<double> minus, std::complex<double> zero,
    std::complex<double> plus) {
  const double n2 = std::norm(minus) + std::norm(zero) + std::norm(plus);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::invalid_argument("polarization vector must be non-zero");
  }
  const double s = 1.0 / std::sqrt(n2);
  return {minus * s, zero * s, plus * s};
}

SphericalPolarization SphericalPolarization::sigma_plus() {
  return {0.0, 0.0, 1.0};
}

SphericalPolarization SphericalPolarization::sigma_minus() {
  return {1.0, 0.0, 0.0};
}

SphericalPolarization SphericalPolarization::pi() { return {0.0, 1.0, 0.0}; }

// For a Cartesian vector e, the amplitude driving Delta m = q is
// (-1)^q e_{-q} with e_{+1} = -(e_x + i e_y)/sqrt2, e_{-1} = (e_x - i e_y)/sqrt2.
SphericalPolarization SphericalPolarization::linear_x() {
  const double h = 1.0 / std::sqrt(2.0);
  return {h, 0.0, -h};
}

SphericalPolarization SphericalPolarization::linear_y() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{0.0, h}, 0.0, {0.0, h}};
}

std::complex<double> SphericalPolarization::component(int q) const {
  switch (q) {
    case -1: return minus;
    case 0: return zero;
    case 1: return plus;
    default: return 0.0;
  }
}

SphericalPolarization SphericalPolarization::conjugate() const {
  return {std::conj(minus), std::conj(zero), std::conj(plus)};
}

double SphericalPolarization::norm_squared() const {
  return std::norm(minus) + std::norm(zero) + std::norm(plus);
}

bool SphericalPolarization::is_normalized(double tol) const {
  return std::abs(norm_squared() - 1.0) <= tol;
}

std::complex<double> dipole_coupling(int two_F_lo, int two_m_lo, int two_F_hi,
                                     int two_m_hi,
                                     const SphericalPolarization& pol) {
  if (two_F_lo < 0 || two_F_hi < 0 || std::abs(two_F_hi - two_F_lo) > 2 ||
      (two_F_hi - two_F_lo) % 2 != 0) {
    throw std::invalid_argument("manifolds are not dipole-connected");
  }
  if (!AngMom::valid(two_F_lo, two_m_lo)) {
    throw std::invalid_argument("lower projection outside its manifold");
  }
  if ((two_F_hi - two_m_hi) % 2 != 0) {
    throw std::invalid_argument("upper projection has the wrong parity");
  }
  if (std::abs(two_m_hi) > two_F_hi) return 0.0;

  const int two_q = two_m_hi - two_m_lo;
  if (std::abs(two_q) > 2) return 0.0;
  const double cg = clebsch_gordan(AngMom(two_F_lo, two_m_lo), AngMom(2, two_q),
                                   AngMom(two_F_hi, two_m_hi));
  return pol.component(two_q / 2) * cg;
}

}  // namespace dlcz
