#pragma once

// Exact nested time integrals for square pulses. With b = e^{-iαt}I1,
// c = e^{i(γ+δ)t}I2 and d = e^{iδt}I3 the four integrals become a linear
// system with constant coefficients between pulse edges (α+β+γ+δ = 0), so
// each piece is one matrix exponential.

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

struct SquarePulse {
  double start_ns, fwhm_ns, detuning_rad_per_s, amplitude = 1.0;
  double level(double t) const {
    return t >= start_ns && t < start_ns + fwhm_ns ? amplitude : 0.0;
  }
};

// F in ns^4 for rates in rad/s; t_ns may be +infinity.
inline std::complex<double> nested_F(double t_ns, double a_g, double a_s, const SquarePulse& w,
                                     const SquarePulse& r) {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  const double alpha = (w.detuning_rad_per_s - a_g) * 1e-9;
  const double gamma = (r.detuning_rad_per_s - a_s) * 1e-9;
  const double delta = (a_g - r.detuning_rad_per_s) * 1e-9;
  std::vector<double> edges{w.start_ns, w.start_ns + w.fwhm_ns, r.start_ns, r.start_ns + r.fwhm_ns};
  std::sort(edges.begin(), edges.end());
  const double end = edges.back();
  const double stop = std::min(t_ns, end);
  Eigen::Matrix<C, 5, 1> x;
  x << 1.0, 0.0, 0.0, 0.0, 0.0;
  double t = w.start_ns;
  for (double e : edges) {
    const double b = std::min(e, stop);
    if (b <= t) continue;
    const double mid = 0.5 * (t + b);
    Eigen::Matrix<C, 5, 5> M = Eigen::Matrix<C, 5, 5>::Zero();
    M(1, 0) = w.level(mid);
    M(1, 1) = -I * alpha;
    M(2, 1) = 1.0;
    M(2, 2) = I * (gamma + delta);
    M(3, 2) = r.level(mid);
    M(3, 3) = I * delta;
    M(4, 3) = 1.0;
    const Eigen::Matrix<C, 5, 5> step = (M * (b - t)).exp();
    x = step * x;
    t = b;
  }
  C F = x(4);
  if (t_ns > end) {
    if (t_ns == std::numeric_limits<double>::infinity()) {
      F -= x(3) / (I * delta);
    } else {
      F += x(3) * (std::exp(I * delta * (t_ns - end)) - 1.0) / (I * delta);
    }
  }
  return F;
}

}  // namespace oracle
