#pragma once

#include <vector>

namespace dlcz {

enum class PulseShape { square, trapezoid, delta };

/// Classical write or read pulse. Times are in ns, detuning in rad/s.
///
/// A trapezoid with FWHM f and rise r ramps linearly over [start, start+r],
/// stays flat, and falls over the last r, so its support is f + r long and its
/// area is amplitude * f. A square pulse is the r -> 0 limit. A delta pulse
/// has area amplitude * fwhm concentrated at start.
struct Pulse {
  PulseShape shape = PulseShape::square;
  double start_ns = 0.0;
  double fwhm_ns = 100.0;
  double rise_ns = 0.0;
  double detuning_rad_per_s = 0.0;
  double amplitude = 1.0;

  void validate() const;
  double end_ns() const;
  double area_ns() const { return amplitude * fwhm_ns; }

  /// Breakpoints of the piecewise linear envelope, ascending.
  std::vector<double> knots_ns() const;
};

/// f(t) at t (ns). At a square-pulse edge the value is that of the closed
/// support [start, end]. Delta pulses have no pointwise value and return 0.
double envelope_value(const Pulse& pulse, double t_ns);

/// One-sided limits, used where quadrature segments meet envelope kinks.
double envelope_left(const Pulse& pulse, double t_ns);
double envelope_right(const Pulse& pulse, double t_ns);

struct Timeline {
  Pulse write;
  Pulse read;

  /// Read start minus write start.
  double delta_t_ns() const { return read.start_ns - write.start_ns; }

  /// Throws std::invalid_argument unless both pulses are valid, read starts no
  /// earlier than write, and both share one family (both delta or neither).
  void validate() const;

  bool is_delta() const { return write.shape == PulseShape::delta; }

  /// Copy with the read pulse moved so that delta_t_ns() == dt_ns.
  Timeline with_delay(double dt_ns) const;
};

}  // namespace dlcz
