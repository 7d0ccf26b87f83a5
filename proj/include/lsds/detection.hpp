#pragma once

#include "lsds/channel.hpp"
#include "lsds/geometry.hpp"
#include "lsds/random.hpp"

namespace lsds {

/// Observation distribution under one hypothesis: complex Gaussian with the
/// given mean and covariance cov_scale * I.
struct GaussianObservationModel {
  CVector mean;
  double cov_scale = 1.0;
};

/// Scaling of the LOS observation mean. The matched transmit beamformer
/// b = t^dag / ||t|| concentrates the transmit array, so the mean magnitude
/// carries a sqrt(N) factor; `tx_elements` takes N from the transmit array
/// (consistent with expanding H b), `bs_elements` takes it from the BS array.
enum class MeanScaleConvention {
  tx_elements,
  bs_elements,
};

/// All scenario constants. Angles live inside the locations and arrays;
/// powers, noise variances and K-factors are linear scale.
struct ScenarioParams {
  PolarLocation claimed;  // x_L, also the claimed location under attack
  UlaConfig bs_array;
  UlaConfig leg_array;
  UlaConfig mal_array;

  ScenarioParams(PolarLocation claimed_location, UlaConfig bs, UlaConfig leg, UlaConfig mal)
      : claimed(claimed_location), bs_array(bs), leg_array(leg), mal_array(mal) {}
  double k_leg = 1.0;    // K_L
  double k_mal = 1.0;    // K_M
  double noise_leg = 1.0;  // sigma_L^2
  double noise_mal = 1.0;  // sigma_M^2
  double p_leg = 1.0;    // P_L
  PathLossModel path_loss;
  double falsehood_radius = 20.0;  // r_m, meters
  MeanScaleConvention mean_convention = MeanScaleConvention::tx_elements;

  void validate() const;

  /// Average legitimate SNR, P_L g(d_L) / sigma_L^2.
  double legitimate_snr() const;

  /// Transmit power giving the requested average legitimate SNR.
  double power_for_snr(double snr_linear) const;
};

/// Observation model for a legitimate vehicle at the claimed location.
GaussianObservationModel null_model(const ScenarioParams& params);

/// Observation model for an attacker at `attacker_loc` transmitting with the
/// given power and unit-norm beamformer of length N_M.
GaussianObservationModel alt_model(const ScenarioParams& params,
                                   const PolarLocation& attacker_loc, double p_mal,
                                   const CVector& beamformer);

CVector sample_observation(const GaussianObservationModel& model, RandomStream& rng);

/// log f(y) = -N ln(pi c) - ||y - m||^2 / c for covariance c * I.
double log_likelihood(const GaussianObservationModel& model, const CVector& y);

/// Log likelihood ratio ln[f(y|alt) / f(y|null)]. Valid for unequal
/// covariance scales as well.
double log_lrt(const GaussianObservationModel& null, const GaussianObservationModel& alt,
               const CVector& y);

/// Equal-covariance linear test statistic T(y) = 2 Re{(m1 - m0)^dag y} / c.
/// Requires the two covariance scales to match (relative 1e-9); use log_lrt
/// otherwise.
double test_statistic(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                      const CVector& y);

/// Threshold on T equivalent to comparing the log likelihood ratio with
/// ln_lambda: Gamma = ln_lambda + Re{(m1 - m0)^dag (m1 + m0)} / c.
double test_threshold(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                      double ln_lambda);

}  // namespace lsds
