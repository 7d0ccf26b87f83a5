#pragma once

#include <complex>

#include <Eigen/Dense>

namespace lsds {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Reflects an angle into [0, pi]. A ULA cannot distinguish a bearing theta
/// from -theta, so every angle outside the range is an alias of one inside.
double normalize_bearing(double theta);

/// Point in the BS-centered polar frame.
struct PolarLocation {
  double d;      // distance from the BS origin, meters, > 0
  double theta;  // bearing, radians, kept in [0, pi]

  PolarLocation(double distance, double bearing);
};

/// One uniform linear array.
struct UlaConfig {
  int n;               // element count, >= 1
  double spacing;      // inter-element distance rho, meters, > 0
  double orientation;  // array pointing angle psi, radians

  UlaConfig(int elements, double element_spacing, double pointing_angle = kPi / 2.0);
};

/// Log-distance path loss g(d) = (c / (4 pi f0 d0))^2 (d0 / d)^eta.
/// Defaults: 5.9 GHz carrier (DSRC band), free-space exponent.
struct PathLossModel {
  double f0 = 5.9e9;  // carrier frequency, Hz
  double c = 3.0e8;   // propagation speed, m/s
  double d0 = 1.0;    // reference distance, m
  double eta = 2.0;   // path loss exponent
};

/// Per-element phase constant tau = 2 pi f0 rho / c.
double phase_constant(double spacing, double f0, double c);
double phase_constant(const UlaConfig& array, const PathLossModel& model);

/// Element spacing that gives tau = pi.
double half_wavelength_spacing(const PathLossModel& model);

/// ULA response at a bearing: element k (0-indexed) is exp(j k tau cos(angle)).
CVector steering_vector(int n, double tau, double angle);

double path_loss_gain(const PathLossModel& model, double d);

/// Law-of-cosines distance between two polar points.
double euclidean_distance(const PolarLocation& a, const PolarLocation& b);

}  // namespace lsds
