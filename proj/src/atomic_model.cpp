#include "dlcz/atomic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dlcz {

namespace {

bool dipole_connected(int two_a, int two_b) {
  const int d = std::abs(two_a - two_b);
  return (d == 0 && two_a > 0) || d == 2;
}

}  // namespace

LevelScheme LevelScheme::cesium() { return LevelScheme{}; }

void LevelScheme::validate() const {
  for (int f : {two_F_g, two_F_s, two_F_a, two_F_b}) {
    if (f < 0) throw std::invalid_argument("negative hyperfine F");
  }
  if (!dipole_connected(two_F_g, two_F_a) || !dipole_connected(two_F_s, two_F_a)) {
    throw std::invalid_argument("excited state |a> is not dipole-connected to |g> and |s>");
  }
  if (!dipole_connected(two_F_g, two_F_b) || !dipole_connected(two_F_s, two_F_b)) {
    throw std::invalid_argument("excited state |b> is not dipole-connected to |g> and |s>");
  }
  if (!std::isfinite(g_g_MHz_per_G) || !std::isfinite(g_s_MHz_per_G) ||
      g_g_MHz_per_G == 0.0) {
    throw std::invalid_argument("Zeeman rates must be finite with g_g != 0");
  }
}

GroundDistribution::GroundDistribution(int two_F_g, std::vector<double> weights)
    : two_F_(two_F_g), weights_(std::move(weights)) {
  if (two_F_ < 0 || static_cast<int>(weights_.size()) != two_F_ + 1) {
    throw std::invalid_argument("distribution needs 2F+1 weights");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("distribution weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("distribution weights must sum to 1");
  }
}

GroundDistribution GroundDistribution::unpolarized(int two_F_g) {
  return GroundDistribution(two_F_g, std::vector<double>(two_F_g + 1, 1.0 / (two_F_g + 1)));
}

GroundDistribution GroundDistribution::polarized(int two_F_g, int two_m) {
  if (!AngMom::valid(two_F_g, two_m)) {
    throw std::invalid_argument("polarized projection outside manifold");
  }
  std::vector<double> w(two_F_g + 1, 0.0);
  w[(two_m + two_F_g) / 2] = 1.0;
  return GroundDistribution(two_F_g, std::move(w));
}

GroundDistribution GroundDistribution::from_weights(int two_F_g, std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("distribution weights must be non-negative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("distribution is empty");
  for (double& w : weights) w /= sum;
  return GroundDistribution(two_F_g, std::move(weights));
}

double GroundDistribution::at(int two_m) const {
  if (!AngMom::valid(two_F_, two_m)) return 0.0;
  return weights_[(two_m + two_F_) / 2];
}

void FieldProfile::validate() const {
  if (!(length_mm > 0.0) || !std::isfinite(length_mm)) {
    throw std::invalid_argument("field length must be positive");
  }
  if (!std::isfinite(gradient_G_per_cm) || !std::isfinite(bias_G)) {
    throw std::invalid_argument("field parameters must be finite");
  }
}

PolarizationSet PolarizationSet::lin_perp_lin() {
  const auto x = SphericalPolarization::linear_x();
  const auto y = SphericalPolarization::linear_y();
  return {x, y, y, x};
}

PolarizationSet PolarizationSet::sigma_clock() {
  const auto p = SphericalPolarization::sigma_plus();
  const auto m = SphericalPolarization::sigma_minus();
  return {p, p, m, m};
}

PolarizationSet PolarizationSet::conjugate() const {
  return {write.conjugate(), field1.conjugate(), read.conjugate(), field2.conjugate()};
}

double zeeman_rate(double g_MHz_per_G, int two_m, double B_G) {
  return 2.0 * std::numbers::pi * g_MHz_per_G * 1e6 * (0.5 * two_m) * B_G;
}

double gradient_parameter_K(double g_MHz_per_G, double b_G_per_cm, double L_mm) {
  return g_MHz_per_G * 1e6 * b_G_per_cm * (L_mm / 10.0);
}

double dephasing_weight(const LevelScheme& scheme, int two_m_g, int two_m_s) {
  const double ratio = scheme.g_s_MHz_per_G / scheme.g_g_MHz_per_G;
  return 0.5 * two_m_g - ratio * 0.5 * two_m_s;
}

std::complex<double> pathway_strength(const LevelScheme& scheme, int two_m_g,
                                      int two_m_s, const PolarizationSet& pols) {
  if (!AngMom::valid(scheme.two_F_g, two_m_g) || !AngMom::valid(scheme.two_F_s, two_m_s)) {
    throw std::invalid_argument("pathway projection outside its manifold");
  }
  // write absorbed g->a, field 1 emitted a->s, read absorbed s->b,
  // field 2 emitted b->g.
  std::complex<double> write_leg = 0.0;
  for (int two_m_a = -scheme.two_F_a; two_m_a <= scheme.two_F_a; two_m_a += 2) {
    const auto kw = dipole_coupling(scheme.two_F_g, two_m_g, scheme.two_F_a, two_m_a, pols.write);
    if (kw == 0.0) continue;
    const auto k1 = std::conj(
        dipole_coupling(scheme.two_F_s, two_m_s, scheme.two_F_a, two_m_a, pols.field1));
    write_leg += k1 * kw;
  }
  if (write_leg == 0.0) return 0.0;
  std::complex<double> read_leg = 0.0;
  for (int two_m_b = -scheme.two_F_b; two_m_b <= scheme.two_F_b; two_m_b += 2) {
    const auto kr = dipole_coupling(scheme.two_F_s, two_m_s, scheme.two_F_b, two_m_b, pols.read);
    if (kr == 0.0) continue;
    const auto k2 = std::conj(
        dipole_coupling(scheme.two_F_g, two_m_g, scheme.two_F_b, two_m_b, pols.field2));
    read_leg += k2 * kr;
  }
  return read_leg * write_leg;
}

std::vector<Pathway> enumerate_pathways(const LevelScheme& scheme,
                                        const GroundDistribution& distribution,
                                        const PolarizationSet& pols) {
  scheme.validate();
  if (distribution.two_F() != scheme.two_F_g) {
    throw std::invalid_argument("distribution does not match the ground manifold");
  }
  std::vector<Pathway> all;
  double largest = 0.0;
  for (int two_m_g = -scheme.two_F_g; two_m_g <= scheme.two_F_g; two_m_g += 2) {
    const double D = distribution.at(two_m_g);
    for (int two_m_s = -scheme.two_F_s; two_m_s <= scheme.two_F_s; two_m_s += 2) {
      const auto d = pathway_strength(scheme, two_m_g, two_m_s, pols);
      largest = std::max(largest, std::abs(d));
      if (D > 0.0) all.push_back({two_m_g, two_m_s, d, D});
    }
  }
  std::vector<Pathway> kept;
  for (const auto& p : all) {
    if (std::abs(p.strength) > 1e-12 * largest) kept.push_back(p);
  }
  return kept;
}

}  // namespace dlcz
