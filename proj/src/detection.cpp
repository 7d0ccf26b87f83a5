#include "lsds/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace lsds {

namespace {

void check_equal_cov(double c0, double c1) {
  if (std::abs(c0 - c1) > 1e-9 * std::max(std::abs(c0), std::abs(c1)))
    throw std::invalid_argument("covariance scales differ; equal-covariance statistic is invalid");
}

void check_length(const GaussianObservationModel& model, const CVector& y) {
  if (y.size() != model.mean.size())
    throw std::invalid_argument("observation length does not match model dimension");
}

}  // namespace

void ScenarioParams::validate() const {
  if (!(p_leg > 0.0)) throw std::invalid_argument("legitimate transmit power must be > 0");
  if (!(noise_leg > 0.0) || !(noise_mal > 0.0))
    throw std::invalid_argument("noise variances must be > 0");
  if (!(k_leg >= 0.0) || !(k_mal >= 0.0)) throw std::invalid_argument("K-factors must be >= 0");
  if (!(falsehood_radius > 0.0)) throw std::invalid_argument("falsehood radius must be > 0");
}

double ScenarioParams::legitimate_snr() const {
  return p_leg * path_loss_gain(path_loss, claimed.d) / noise_leg;
}

double ScenarioParams::power_for_snr(double snr_linear) const {
  return snr_linear * noise_leg / path_loss_gain(path_loss, claimed.d);
}

GaussianObservationModel null_model(const ScenarioParams& params) {
  params.validate();
  const double g = path_loss_gain(params.path_loss, params.claimed.d);
  const double k = params.k_leg;
  const double n_scale = params.mean_convention == MeanScaleConvention::tx_elements
                             ? static_cast<double>(params.leg_array.n)
                             : static_cast<double>(params.bs_array.n);
  const double amp = std::sqrt(params.p_leg * g * k * n_scale / (1.0 + k));
  const double tau_b = phase_constant(params.bs_array, params.path_loss);
  GaussianObservationModel model;
  model.mean = amp * steering_vector(params.bs_array.n, tau_b, params.claimed.theta);
  model.cov_scale = params.p_leg * g / (k + 1.0) + params.noise_leg;
  return model;
}

GaussianObservationModel alt_model(const ScenarioParams& params,
                                   const PolarLocation& attacker_loc, double p_mal,
                                   const CVector& beamformer) {
  params.validate();
  if (!(p_mal > 0.0)) throw std::invalid_argument("attacker transmit power must be > 0");
  if (beamformer.size() != params.mal_array.n)
    throw std::invalid_argument("beamformer length does not match the attacker array");
  if (std::abs(beamformer.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("beamformer must have unit norm");

  const double g = path_loss_gain(params.path_loss, attacker_loc.d);
  const double k = params.k_mal;
  RicianChannelSpec spec{k,
                         params.bs_array,
                         params.mal_array,
                         attacker_loc.theta,
                         params.mal_array.orientation,
                         params.path_loss.f0,
                         params.path_loss.c};
  GaussianObservationModel model;
  model.mean = std::sqrt(p_mal * g * k / (1.0 + k)) * (los_component(spec) * beamformer);
  model.cov_scale = p_mal * g / (k + 1.0) + params.noise_mal;
  return model;
}

CVector sample_observation(const GaussianObservationModel& model, RandomStream& rng) {
  return model.mean + std::sqrt(model.cov_scale) *
                          complex_gaussian_vector(static_cast<int>(model.mean.size()), rng);
}

double log_likelihood(const GaussianObservationModel& model, const CVector& y) {
  check_length(model, y);
  const double n = static_cast<double>(model.mean.size());
  return -n * std::log(kPi * model.cov_scale) - (y - model.mean).squaredNorm() / model.cov_scale;
}

double log_lrt(const GaussianObservationModel& null, const GaussianObservationModel& alt,
               const CVector& y) {
  return log_likelihood(alt, y) - log_likelihood(null, y);
}

double test_statistic(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                      const CVector& y) {
  check_equal_cov(null.cov_scale, alt.cov_scale);
  check_length(null, y);
  check_length(alt, y);
  // dot() conjugates its first operand: (m1 - m0)^dag y.
  return 2.0 * (alt.mean - null.mean).dot(y).real() / null.cov_scale;
}

double test_threshold(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                      double ln_lambda) {
  check_equal_cov(null.cov_scale, alt.cov_scale);
  return ln_lambda + (alt.mean - null.mean).dot(alt.mean + null.mean).real() / null.cov_scale;
}

}  // namespace lsds
