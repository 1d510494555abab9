#include "dlcz/raman_probe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlcz {

RamanSpectrum zeeman_spectrum(const LevelScheme& scheme, const GroundDistribution& distribution,
                              const FieldProfile& field, double probe_extent_mm,
                              const std::vector<int>& allowed_dm, int n_bins, int n_z) {
  scheme.validate();
  field.validate();
  if (allowed_dm.empty()) throw std::invalid_argument("allowed delta-m set is empty");
  if (!(probe_extent_mm > 0.0) || probe_extent_mm > field.length_mm) {
    throw std::invalid_argument("probe extent must be positive and within the field length");
  }
  if (n_bins < 1 || n_bins % 2 == 0) throw std::invalid_argument("bin count must be odd");
  if (n_z < 1) throw std::invalid_argument("need at least one z sample");
  if (distribution.two_F() != scheme.two_F_g) {
    throw std::invalid_argument("distribution does not match the ground manifold");
  }

  struct Line {
    double rate_Hz_per_G;
    double weight;
  };
  std::vector<Line> lines;
  for (int two_m_g = -scheme.two_F_g; two_m_g <= scheme.two_F_g; two_m_g += 2) {
    const double D = distribution.at(two_m_g);
    if (D == 0.0) continue;
    for (int dm : allowed_dm) {
      const int two_m_s = two_m_g + 2 * dm;
      if (!AngMom::valid(scheme.two_F_s, two_m_s)) continue;
      const double rate =
          (scheme.g_g_MHz_per_G * 0.5 * two_m_g - scheme.g_s_MHz_per_G * 0.5 * two_m_s) * 1e6;
      lines.push_back({rate, D});
    }
  }
  if (lines.empty()) throw std::invalid_argument("no populated transition in the allowed set");

  std::vector<double> z(n_z);
  for (int k = 0; k < n_z; ++k) {
    z[k] = probe_extent_mm * ((k + 0.5) / n_z - 0.5);
  }
  double max_shift = 0.0;
  for (const auto& l : lines) {
    for (double zk : z) max_shift = std::max(max_shift, std::abs(l.rate_Hz_per_G * field.field_G(zk)));
  }

  RamanSpectrum out;
  const int half = max_shift > 0.0 ? n_bins / 2 : 0;
  out.bin_Hz = half > 0 ? max_shift / half : 0.0;
  out.detuning_Hz.resize(2 * half + 1);
  out.weight.assign(2 * half + 1, 0.0);
  for (int k = -half; k <= half; ++k) out.detuning_Hz[k + half] = k * out.bin_Hz;
  double total = 0.0;
  for (const auto& l : lines) {
    for (double zk : z) {
      const double shift = l.rate_Hz_per_G * field.field_G(zk);
      int k = half > 0 ? static_cast<int>(std::lround(shift / out.bin_Hz)) : 0;
      k = std::clamp(k, -half, half);
      out.weight[k + half] += l.weight / n_z;
    }
    total += l.weight;
  }
  for (double& w : out.weight) w /= total;
  return out;
}

double fwhm(const RamanSpectrum& s) {
  if (s.weight.empty() || s.weight.size() != s.detuning_Hz.size()) {
    throw std::invalid_argument("spectrum is empty");
  }
  const auto peak_it = std::max_element(s.weight.begin(), s.weight.end());
  if (!(*peak_it > 0.0)) throw std::invalid_argument("spectrum is all zero");
  const double half = 0.5 * *peak_it;
  const std::size_t n = s.weight.size();
  std::size_t lo = 0;
  while (s.weight[lo] < half) ++lo;
  std::size_t hi = n - 1;
  while (s.weight[hi] < half) --hi;

  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double wi = s.weight[inside], wo = s.weight[outside];
    const double f = (wi - half) / (wi - wo);
    return s.detuning_Hz[inside] + f * (s.detuning_Hz[outside] - s.detuning_Hz[inside]);
  };
  const double left = lo > 0 ? crossing(lo, lo - 1) : s.detuning_Hz[lo];
  const double right = hi + 1 < n ? crossing(hi, hi + 1) : s.detuning_Hz[hi];
  return right - left;
}

double spectral_span(const RamanSpectrum& s) {
  std::size_t lo = 0, hi = s.weight.size();
  while (lo < hi && s.weight[lo] == 0.0) ++lo;
  while (hi > lo && s.weight[hi - 1] == 0.0) --hi;
  if (lo == hi) throw std::invalid_argument("spectrum is all zero");
  return s.detuning_Hz[hi - 1] - s.detuning_Hz[lo];
}

void DiffusionModel::validate() const {
  if (!(tau_ref_us > 0.0) || !(d_ref_um > 0.0)) {
    throw std::invalid_argument("diffusion reference values must be positive");
  }
}

double diffusion_time(double beam_diameter_um, const DiffusionModel& model) {
  model.validate();
  if (!(beam_diameter_um > 0.0)) throw std::invalid_argument("beam diameter must be positive");
  return model.tau_ref_us * beam_diameter_um / model.d_ref_um;
}

double decay_curve(double t_us, double tau_us) {
  if (!(tau_us > 0.0)) throw std::invalid_argument("decay time must be positive");
  return std::exp(-t_us / tau_us);
}

}  // namespace dlcz
