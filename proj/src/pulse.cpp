#include "dlcz/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace dlcz {

void Pulse::validate() const {
  if (!std::isfinite(start_ns) || !std::isfinite(fwhm_ns) || !std::isfinite(rise_ns) ||
      !std::isfinite(detuning_rad_per_s) || !std::isfinite(amplitude)) {
    throw std::invalid_argument("pulse parameters must be finite");
  }
  if (!(fwhm_ns > 0.0)) throw std::invalid_argument("pulse fwhm must be positive");
  if (amplitude < 0.0) throw std::invalid_argument("pulse amplitude must be non-negative");
  if (shape == PulseShape::trapezoid) {
    if (!(rise_ns > 0.0)) throw std::invalid_argument("trapezoid rise must be positive");
    if (rise_ns > fwhm_ns) throw std::invalid_argument("trapezoid rise exceeds fwhm");
  } else if (rise_ns != 0.0) {
    throw std::invalid_argument("rise time only applies to trapezoid pulses");
  }
}

double Pulse::end_ns() const {
  switch (shape) {
    case PulseShape::square: return start_ns + fwhm_ns;
    case PulseShape::trapezoid: return start_ns + fwhm_ns + rise_ns;
    case PulseShape::delta: return start_ns;
  }
  return start_ns;
}

std::vector<double> Pulse::knots_ns() const {
  switch (shape) {
    case PulseShape::square: return {start_ns, end_ns()};
    case PulseShape::trapezoid:
      return {start_ns, start_ns + rise_ns, start_ns + fwhm_ns, end_ns()};
    case PulseShape::delta: return {start_ns};
  }
  return {};
}

namespace {

// Value strictly inside a linear piece, or at a point where it is continuous.
double trapezoid_value(const Pulse& p, double t) {
  const double x = t - p.start_ns;
  const double total = p.fwhm_ns + p.rise_ns;
  if (x <= 0.0 || x >= total) return 0.0;
  if (x < p.rise_ns) return p.amplitude * x / p.rise_ns;
  if (x > p.fwhm_ns) return p.amplitude * (total - x) / p.rise_ns;
  return p.amplitude;
}

}  // namespace

double envelope_value(const Pulse& pulse, double t_ns) {
  switch (pulse.shape) {
    case PulseShape::square:
      return (t_ns >= pulse.start_ns && t_ns <= pulse.end_ns()) ? pulse.amplitude : 0.0;
    case PulseShape::trapezoid: return trapezoid_value(pulse, t_ns);
    case PulseShape::delta: return 0.0;
  }
  return 0.0;
}

double envelope_left(const Pulse& pulse, double t_ns) {
  if (pulse.shape == PulseShape::square) {
    return (t_ns > pulse.start_ns && t_ns <= pulse.end_ns()) ? pulse.amplitude : 0.0;
  }
  return envelope_value(pulse, t_ns);
}

double envelope_right(const Pulse& pulse, double t_ns) {
  if (pulse.shape == PulseShape::square) {
    return (t_ns >= pulse.start_ns && t_ns < pulse.end_ns()) ? pulse.amplitude : 0.0;
  }
  return envelope_value(pulse, t_ns);
}

void Timeline::validate() const {
  write.validate();
  read.validate();
  if ((write.shape == PulseShape::delta) != (read.shape == PulseShape::delta)) {
    throw std::invalid_argument("write and read must both be delta pulses or neither");
  }
  if (delta_t_ns() < 0.0) throw std::invalid_argument("read must not start before write");
}

Timeline Timeline::with_delay(double dt_ns) const {
  Timeline t = *this;
  t.read.start_ns = write.start_ns + dt_ns;
  return t;
}

}  // namespace dlcz
