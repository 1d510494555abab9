#pragma once

// Small numerical helpers shared by the library sources.

#include <cmath>
#include <complex>
#include <vector>

namespace dlcz::detail {

using cplx = std::complex<double>;

inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// (e^z − 1)/z
inline cplx phi1(cplx z) {
  if (std::abs(z) < 1e-3) {
    return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0 + z * z * z * z / 120.0;
  }
  return (std::exp(z) - 1.0) / z;
}

/// (e^z − 1 − z)/z²
inline cplx phi2(cplx z) {
  if (std::abs(z) < 1e-2) {
    cplx term = 0.5, sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      sum += term;
      term *= z / static_cast<double>(k + 3);
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

/// ∫_a^b e^{iλτ} dτ
inline cplx exp_integral(double lambda, double a, double b) {
  const double len = b - a;
  return len * std::polar(1.0, lambda * a) * phi1(cplx(0.0, lambda * len));
}

struct GaussLegendre {
  std::vector<double> nodes;    ///< on [-1, 1]
  std::vector<double> weights;
};

/// Cached rule of the given order (Newton iteration on P_n).
const GaussLegendre& gauss_legendre(int order);

/// Pairwise (cascade) summation with a fixed reduction tree.
template <class T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v, 0, v.size());
}

}  // namespace dlcz::detail
