#include "lsds/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "lsds/random.hpp"

namespace lsds {

namespace {

// Trials are sampled in fixed blocks, each with its own counter-derived
// substream, so results do not depend on how blocks are split over workers.
constexpr long kTrialBlock = 4096;

void check_pair(const GaussianObservationModel& null, const GaussianObservationModel& alt) {
  if (null.mean.size() != alt.mean.size())
    throw std::invalid_argument("model dimensions do not match");
}

// Fills log_lrt samples under both hypotheses at fixed per-trial positions.
void sample_log_lrt(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                    long trials, std::uint64_t seed, unsigned workers,
                    std::vector<double>& under_null, std::vector<double>& under_alt) {
  check_pair(null, alt);
  if (trials < 1) throw std::invalid_argument("trial count must be >= 1");
  under_null.resize(static_cast<std::size_t>(trials));
  under_alt.resize(static_cast<std::size_t>(trials));

  const long blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  auto run_blocks = [&](long first, long last) {
    for (long b = first; b < last; ++b) {
      RandomStream rng = substream(seed, static_cast<std::uint64_t>(b));
      const long begin = b * kTrialBlock;
      const long end = std::min(trials, begin + kTrialBlock);
      for (long t = begin; t < end; ++t) {
        under_null[static_cast<std::size_t>(t)] = log_lrt(null, alt, sample_observation(null, rng));
        under_alt[static_cast<std::size_t>(t)] = log_lrt(null, alt, sample_observation(alt, rng));
      }
    }
  };

  if (workers <= 1 || blocks == 1) {
    run_blocks(0, blocks);
    return;
  }
  const unsigned n_workers = std::min<unsigned>(workers, static_cast<unsigned>(blocks));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) {
    const long first = blocks * w / n_workers;
    const long last = blocks * (w + 1) / n_workers;
    pool.emplace_back(run_blocks, first, last);
  }
  for (auto& th : pool) th.join();
}

double binomial_stderr(double p, long n) {
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double q_function_inv(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("q_function_inv argument must be in (0, 1)");

  // Acklam's rational approximation to the standard normal quantile,
  // refined below to full double precision. Q^-1(p) = -Phi^-1(p).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double u = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double u = p - 0.5;
    const double r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }

  // One Halley step against Phi(x) - p restores ~1e-15 accuracy.
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
  const double u = err / pdf;
  x -= u / (1.0 + 0.5 * x * u);
  return -x;
}

double deflection(const GaussianObservationModel& null, const GaussianObservationModel& alt) {
  check_pair(null, alt);
  if (std::abs(null.cov_scale - alt.cov_scale) >
      1e-9 * std::max(std::abs(null.cov_scale), std::abs(alt.cov_scale)))
    throw std::invalid_argument("deflection requires equal covariance scales");
  return (alt.mean - null.mean).squaredNorm() / null.cov_scale;
}

DetectionMetrics closed_form_rates(double q, double ln_lambda) {
  if (q < 0.0) throw std::invalid_argument("deflection must be >= 0");
  if (q == 0.0)
    throw DegenerateDetectorError("zero deflection: the detector is uninformative");
  const double spread = std::sqrt(2.0 * q);
  DetectionMetrics m;
  m.alpha = q_function((ln_lambda + q) / spread);
  m.beta = q_function((ln_lambda - q) / spread);
  m.ln_lambda = ln_lambda;
  return m;
}

double min_total_error(double q) {
  if (q < 0.0) throw std::invalid_argument("deflection must be >= 0");
  if (q == 0.0) return 1.0;
  return 2.0 * q_function(std::sqrt(q / 2.0));
}

DetectionMetrics monte_carlo_rates(const GaussianObservationModel& null,
                                   const GaussianObservationModel& alt, double ln_lambda,
                                   long trials, std::uint64_t seed, unsigned workers) {
  std::vector<double> under_null, under_alt;
  sample_log_lrt(null, alt, trials, seed, workers, under_null, under_alt);
  long n_alpha = 0, n_beta = 0;
  for (double v : under_null) n_alpha += v > ln_lambda;
  for (double v : under_alt) n_beta += v > ln_lambda;
  DetectionMetrics m;
  m.alpha = static_cast<double>(n_alpha) / static_cast<double>(trials);
  m.beta = static_cast<double>(n_beta) / static_cast<double>(trials);
  m.ln_lambda = ln_lambda;
  m.alpha_stderr = binomial_stderr(m.alpha, trials);
  m.beta_stderr = binomial_stderr(m.beta, trials);
  return m;
}

MinErrorEstimate monte_carlo_min_total_error(const GaussianObservationModel& null,
                                             const GaussianObservationModel& alt, long trials,
                                             std::uint64_t seed, unsigned workers) {
  std::vector<double> under_null, under_alt;
  sample_log_lrt(null, alt, trials, seed, workers, under_null, under_alt);
  std::sort(under_null.begin(), under_null.end());
  std::sort(under_alt.begin(), under_alt.end());

  // Walk candidate thresholds at the sample values; with a strict comparison
  // all samples <= t drop out, so rates only change at those points.
  const double n = static_cast<double>(trials);
  MinErrorEstimate best;  // t = -inf: alpha = beta = 1, total error 1
  std::size_t i0 = 0, i1 = 0;
  while (i0 < under_null.size() || i1 < under_alt.size()) {
    double t;
    if (i1 >= under_alt.size() || (i0 < under_null.size() && under_null[i0] <= under_alt[i1]))
      t = under_null[i0];
    else
      t = under_alt[i1];
    while (i0 < under_null.size() && under_null[i0] <= t) ++i0;
    while (i1 < under_alt.size() && under_alt[i1] <= t) ++i1;
    const double alpha = (n - static_cast<double>(i0)) / n;
    const double beta = (n - static_cast<double>(i1)) / n;
    const double err = 1.0 - beta + alpha;
    if (err < best.value) {
      best.value = err;
      best.ln_lambda = t;
      best.alpha = alpha;
      best.beta = beta;
    }
  }
  best.std_error = std::sqrt(best.alpha * (1.0 - best.alpha) / n +
                             best.beta * (1.0 - best.beta) / n);
  return best;
}

RocCurve roc_curve(const GaussianObservationModel& null, const GaussianObservationModel& alt,
                   int n_points, RocMethod method, long trials, std::uint64_t seed,
                   unsigned workers) {
  check_pair(null, alt);
  if (n_points < 2) throw std::invalid_argument("an ROC curve needs at least two points");

  // Threshold grid from inverting the closed-form alpha on a uniform target
  // grid, so points stay spread out instead of clustering at the corners.
  const double q_raw = method == RocMethod::closed_form
                           ? deflection(null, alt)
                           : (alt.mean - null.mean).squaredNorm() / null.cov_scale;
  const double q = std::max(q_raw, 1e-12);
  const double spread = std::sqrt(2.0 * q);
  constexpr double kAlphaLo = 1e-4;
  RocCurve curve;
  curve.points.reserve(static_cast<std::size_t>(n_points));
  curve.thresholds.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double alpha_target =
        (1.0 - kAlphaLo) -
        (1.0 - 2.0 * kAlphaLo) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    curve.thresholds.push_back(spread * q_function_inv(alpha_target) - q);
  }

  if (method == RocMethod::closed_form) {
    for (double t : curve.thresholds) {
      const DetectionMetrics m = closed_form_rates(q_raw, t);
      curve.points.emplace_back(m.alpha, m.beta);
    }
    return curve;
  }

  std::vector<double> under_null, under_alt;
  sample_log_lrt(null, alt, trials, seed, workers, under_null, under_alt);
  std::sort(under_null.begin(), under_null.end());
  std::sort(under_alt.begin(), under_alt.end());
  const double n = static_cast<double>(trials);
  for (double t : curve.thresholds) {
    const auto gt = [t](const std::vector<double>& v) {
      return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), t));
    };
    const double alpha = gt(under_null) / n;
    const double beta = gt(under_alt) / n;
    curve.points.emplace_back(alpha, beta);
    curve.alpha_stderr.push_back(binomial_stderr(alpha, trials));
    curve.beta_stderr.push_back(binomial_stderr(beta, trials));
  }
  return curve;
}

double roc_auc(const RocCurve& curve) {
  // Points run from alpha ~1 down to ~0; extend to both corners.
  double auc = 0.0;
  double prev_a = 1.0, prev_b = 1.0;
  for (const auto& [a, b] : curve.points) {
    auc += (prev_a - a) * 0.5 * (prev_b + b);
    prev_a = a;
    prev_b = b;
  }
  auc += prev_a * 0.5 * prev_b;
  return auc;
}

}  // namespace lsds
