#include "lsds/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lsds {

double normalize_bearing(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("bearing must be finite");
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;  // now in [0, 2pi)
  if (t > kPi) t = 2.0 * kPi - t;
  return t;
}

PolarLocation::PolarLocation(double distance, double bearing)
    : d(distance), theta(normalize_bearing(bearing)) {
  if (!(distance > 0.0)) throw std::invalid_argument("polar distance must be > 0");
}

UlaConfig::UlaConfig(int elements, double element_spacing, double pointing_angle)
    : n(elements), spacing(element_spacing), orientation(pointing_angle) {
  if (n < 1) throw std::invalid_argument("ULA needs at least one element");
  if (!(spacing > 0.0)) throw std::invalid_argument("ULA element spacing must be > 0");
}

double phase_constant(double spacing, double f0, double c) {
  double tau = 2.0 * kPi * f0 * spacing / c;
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("phase constant must be finite and positive");
  return tau;
}

double phase_constant(const UlaConfig& array, const PathLossModel& model) {
  return phase_constant(array.spacing, model.f0, model.c);
}

double half_wavelength_spacing(const PathLossModel& model) {
  return model.c / (2.0 * model.f0);
}

CVector steering_vector(int n, double tau, double angle) {
  if (n < 1) throw std::invalid_argument("steering vector length must be >= 1");
  if (!std::isfinite(tau)) throw std::invalid_argument("phase constant must be finite");
  CVector v(n);
  const double step = tau * std::cos(angle);
  for (int k = 0; k < n; ++k) v(k) = std::polar(1.0, step * static_cast<double>(k));
  return v;
}

double path_loss_gain(const PathLossModel& model, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("path loss distance must be > 0");
  const double ref = model.c / (4.0 * kPi * model.f0 * model.d0);
  return ref * ref * std::pow(model.d0 / d, model.eta);
}

double euclidean_distance(const PolarLocation& a, const PolarLocation& b) {
  const double sq = a.d * a.d + b.d * b.d - 2.0 * a.d * b.d * std::cos(a.theta - b.theta);
  return std::sqrt(std::max(sq, 0.0));
}

}  // namespace lsds
