#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsds/detection.hpp"

namespace lsds {

/// The two hypotheses are identical and no threshold separates them.
class DegenerateDetectorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// False positive rate and detection rate at one threshold. Standard errors
/// are zero for closed-form results.
struct DetectionMetrics {
  double alpha = 0.0;
  double beta = 0.0;
  double ln_lambda = 0.0;
  double alpha_stderr = 0.0;
  double beta_stderr = 0.0;
};

/// Minimum of 1 - beta + alpha over thresholds, with the minimizing
/// threshold and the rates attained there.
struct MinErrorEstimate {
  double value = 1.0;
  double std_error = 0.0;
  double ln_lambda = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
};

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (alpha, beta), alpha decreasing
  std::vector<double> thresholds;                 // matching ln lambda values
  std::vector<double> alpha_stderr;               // empty for closed form
  std::vector<double> beta_stderr;
};

enum class RocMethod { closed_form, monte_carlo };

/// Gaussian upper-tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

/// Inverse of q_function on (0, 1).
double q_function_inv(double p);

/// Deflection q = (m1 - m0)^dag R0^-1 (m1 - m0) = ||m1 - m0||^2 / cov0.
/// Requires equal covariance scales.
double deflection(const GaussianObservationModel& null, const GaussianObservationModel& alt);

/// Theorem-style closed forms: alpha = Q((ln l + q) / sqrt(2q)),
/// beta = Q((ln l - q) / sqrt(2q)). Throws DegenerateDetectorError at q = 0.
DetectionMetrics closed_form_rates(double q, double ln_lambda);

/// min over thresholds of 1 - beta + alpha, attained at ln lambda = 0:
/// 2 Q(sqrt(q / 2)). Returns 1 for q = 0 (uninformative detector).
double min_total_error(double q);

/// Empirical rates at one threshold under the general log-LRT. Deterministic
/// for a given seed independent of the worker count.
DetectionMetrics monte_carlo_rates(const GaussianObservationModel& null,
                                   const GaussianObservationModel& alt, double ln_lambda,
                                   long trials, std::uint64_t seed, unsigned workers = 1);

/// Empirical minimum total error: samples the log-LRT under both hypotheses
/// and scans every candidate threshold exactly.
MinErrorEstimate monte_carlo_min_total_error(const GaussianObservationModel& null,
                                             const GaussianObservationModel& alt, long trials,
                                             std::uint64_t seed, unsigned workers = 1);

/// Threshold sweep covering alpha from ~1 down to ~0; the grid comes from
/// inverting the closed-form alpha at uniformly spaced targets.
RocCurve roc_curve(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                   int n_points, RocMethod method, long trials = 10000, std::uint64_t seed = 0,
                   unsigned workers = 1);

/// Trapezoidal area under the curve, extended to the (0,0) and (1,1) corners.
double roc_auc(const RocCurve& curve);

}  // namespace lsds
