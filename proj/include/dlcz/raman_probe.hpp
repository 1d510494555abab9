#pragma once

#include <vector>

#include "dlcz/atomic_model.hpp"

namespace dlcz {

/// Histogram of two-photon Raman shifts relative to the hyperfine clock
/// frequency. Bins are uniform and symmetric, with the centre bin at 0 Hz.
struct RamanSpectrum {
  std::vector<double> detuning_Hz;  ///< bin centres
  std::vector<double> weight;       ///< sums to 1
  double bin_Hz = 0.0;              ///< 0 when every shift vanishes
};

/// Shifts (g_g·m_g − g_s·m_s)·10⁶·B(z) for populated m_g and every m_s with
/// m_s − m_g in `allowed_dm` (whole numbers), with z sampled at n_z midpoints
/// of the probed segment [-extent/2, extent/2]. Each (m_g, m_s, z) sample
/// carries weight D_{m_g}/n_z. Throws std::invalid_argument for an empty
/// allowed set, an extent beyond the field length, an even or zero bin count,
/// or no populated transition.
RamanSpectrum zeeman_spectrum(const LevelScheme& scheme, const GroundDistribution& distribution,
                              const FieldProfile& field, double probe_extent_mm,
                              const std::vector<int>& allowed_dm, int n_bins, int n_z = 2001);

/// Full width at half the largest bin weight. The outermost bins at or above
/// half maximum are located and each edge is interpolated linearly towards
/// the neighbouring bin. Throws std::invalid_argument for an empty or all-zero
/// spectrum.
double fwhm(const RamanSpectrum& spectrum);

/// Distance between the outermost bins with non-zero weight. For a linear
/// gradient this is the full inhomogeneous spread of the allowed lines.
double spectral_span(const RamanSpectrum& spectrum);

struct DiffusionModel {
  double tau_ref_us = 900.0;  ///< decay time at the reference diameter
  double d_ref_um = 150.0;

  void validate() const;
};

/// τ = τ_ref·(diameter/d_ref), μs.
double diffusion_time(double beam_diameter_um, const DiffusionModel& model = {});

/// exp(−t/τ).
double decay_curve(double t_us, double tau_us);

}  // namespace dlcz
