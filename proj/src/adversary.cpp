#include "lsds/adversary.hpp"

#include <cmath>
#include <optional>

namespace lsds {

namespace {

// Scale and geometry shared by every phi evaluation: with the rank-one LOS
// G_o = r_M^T t_M, the spoofed mean is m1(phi) = c(phi) r_M with the scalar
// c(phi) = s * (t_M p(phi)), so the norm objective needs only N_M + O(1)
// work per direction.
struct BeamSearchContext {
  double mean_amp;     // s = sqrt(P_M g(d_M) K_M / (1 + K_M))
  double tau_m;        // attacker per-element phase constant
  double cos_psi_m;    // attacker array pointing
  int n_m;
  int n_b;
  double m0_sq;        // ||m0||^2
  Complex rx_dot_m0;   // r_M^dag m0
};

BeamSearchContext make_context(const ScenarioParams& params, const PolarLocation& attacker_loc,
                               double p_mal) {
  const GaussianObservationModel null = null_model(params);
  const double g = path_loss_gain(params.path_loss, attacker_loc.d);
  const double k = params.k_mal;
  const double tau_b = phase_constant(params.bs_array, params.path_loss);
  const CVector rx = steering_vector(params.bs_array.n, tau_b, attacker_loc.theta);
  BeamSearchContext ctx;
  ctx.mean_amp = std::sqrt(p_mal * g * k / (1.0 + k));
  ctx.tau_m = phase_constant(params.mal_array, params.path_loss);
  ctx.cos_psi_m = std::cos(params.mal_array.orientation);
  ctx.n_m = params.mal_array.n;
  ctx.n_b = params.bs_array.n;
  ctx.m0_sq = null.mean.squaredNorm();
  ctx.rx_dot_m0 = rx.dot(null.mean);
  return ctx;
}

double objective(const BeamSearchContext& ctx, double phi) {
  // c(phi) = s / sqrt(N_M) * sum_l exp(j l tau_M (cos psi_M + cos phi))
  const double step = ctx.tau_m * (ctx.cos_psi_m + std::cos(phi));
  Complex sum = 0.0;
  for (int l = 0; l < ctx.n_m; ++l) sum += std::polar(1.0, step * static_cast<double>(l));
  const Complex c = ctx.mean_amp / std::sqrt(static_cast<double>(ctx.n_m)) * sum;
  const double sq = ctx.m0_sq + std::norm(c) * static_cast<double>(ctx.n_b) -
                    2.0 * (std::conj(c) * ctx.rx_dot_m0).real();
  return std::sqrt(std::max(sq, 0.0));
}

double golden_section(const BeamSearchContext& ctx, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(ctx, x1);
  double f2 = objective(ctx, x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(ctx, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(ctx, x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

PolarLocation optimal_location(const RoadGeometry& road, const PolarLocation& claimed,
                               double r_m) {
  if (road.candidates.empty()) throw InfeasibleScenarioError("road has no candidate locations");
  std::optional<PolarLocation> best;
  double best_angle = 0.0, best_radial = 0.0;
  for (const PolarLocation& cand : road.candidates) {
    if (euclidean_distance(cand, claimed) < r_m) continue;
    const double angle = std::abs(cand.theta - claimed.theta);
    const double radial = std::abs(cand.d - claimed.d);
    if (!best || angle < best_angle || (angle == best_angle && radial < best_radial)) {
      best = cand;
      best_angle = angle;
      best_radial = radial;
    }
  }
  if (!best)
    throw InfeasibleScenarioError("no road candidate clears the falsehood radius");
  return *best;
}

double optimal_power(const ScenarioParams& params, const PolarLocation& attacker_loc) {
  const double g_leg = path_loss_gain(params.path_loss, params.claimed.d);
  const double g_mal = path_loss_gain(params.path_loss, attacker_loc.d);
  return params.p_leg * g_leg * params.noise_mal / (g_mal * params.noise_leg);
}

CVector directional_beamformer(int n_m, double tau_m, double phi) {
  return steering_vector(n_m, tau_m, phi) / std::sqrt(static_cast<double>(n_m));
}

double beam_direction_objective(const ScenarioParams& params, const PolarLocation& attacker_loc,
                                double p_mal, double phi) {
  return objective(make_context(params, attacker_loc, p_mal), phi);
}

double optimal_beam_direction(const ScenarioParams& params, const PolarLocation& attacker_loc,
                              double p_mal) {
  if (params.mal_array.n == 1) return 0.0;  // p = [1] regardless of phi
  const BeamSearchContext ctx = make_context(params, attacker_loc, p_mal);

  constexpr int kGridPoints = 2048;
  const double step = kPi / (kGridPoints - 1);
  double best_phi = 0.0;
  double best_val = objective(ctx, 0.0);
  for (int i = 1; i < kGridPoints; ++i) {
    const double phi = i * step;
    const double val = objective(ctx, phi);
    if (val < best_val) {
      best_val = val;
      best_phi = phi;
    }
  }

  const double lo = std::max(0.0, best_phi - step);
  const double hi = std::min(kPi, best_phi + step);
  const double refined = golden_section(ctx, lo, hi, 1e-6);
  return objective(ctx, refined) <= best_val ? refined : best_phi;
}

double kl_divergence(const GaussianObservationModel& alt, const GaussianObservationModel& null) {
  if (alt.mean.size() != null.mean.size())
    throw std::invalid_argument("model dimensions do not match");
  const double n = static_cast<double>(null.mean.size());
  const double ratio = alt.cov_scale / null.cov_scale;
  const double cov_term = n * (ratio - 1.0 - std::log(ratio));
  const double mean_term = (null.mean - alt.mean).squaredNorm() / null.cov_scale;
  return std::max(cov_term + mean_term, 0.0);
}

AttackStrategy build_attack(const ScenarioParams& params, const RoadGeometry& road) {
  return build_attack_at(
      params, optimal_location(road, params.claimed, params.falsehood_radius));
}

AttackStrategy build_attack_at(const ScenarioParams& params, const PolarLocation& attacker_loc) {
  const double power = optimal_power(params, attacker_loc);
  const double phi = optimal_beam_direction(params, attacker_loc, power);
  const double tau_m = phase_constant(params.mal_array, params.path_loss);
  return AttackStrategy{attacker_loc, power, phi,
                        directional_beamformer(params.mal_array.n, tau_m, phi)};
}

}  // namespace lsds
