#pragma once

#include <stdexcept>
#include <vector>

#include "lsds/detection.hpp"
#include "lsds/geometry.hpp"

namespace lsds {

/// No attacker placement can satisfy the scenario constraints.
class InfeasibleScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The attacker's resolved parameters: true location, transmit power,
/// beam direction phi* and the unit-norm beamformer built from it.
struct AttackStrategy {
  PolarLocation location;
  double tx_power;
  double beam_direction;
  CVector beamformer;
};

/// Discretized on-road candidate positions inside the illegal region.
struct RoadGeometry {
  std::vector<PolarLocation> candidates;
};

/// Feasible candidate closest in bearing to the claimed location. Ties break
/// by smaller |d - d_L|, then by list order.
PolarLocation optimal_location(const RoadGeometry& road, const PolarLocation& claimed,
                               double r_m);

/// SNR-matching transmit power P_L g(d_L) sigma_M^2 / (g(d_M) sigma_L^2).
double optimal_power(const ScenarioParams& params, const PolarLocation& attacker_loc);

/// Normalized steering vector pointed at phi.
CVector directional_beamformer(int n_m, double tau_m, double phi);

/// ||m0 - m1(phi)|| for the directional beamformer pointed at phi.
double beam_direction_objective(const ScenarioParams& params, const PolarLocation& attacker_loc,
                                double p_mal, double phi);

/// Beam direction minimizing ||m0 - m1(phi)|| over [0, pi]: 2048-point grid
/// scan followed by golden-section refinement to 1e-6.
double optimal_beam_direction(const ScenarioParams& params, const PolarLocation& attacker_loc,
                              double p_mal);

/// KL divergence D(alt || null) between scaled-identity complex Gaussians;
/// the expected log likelihood ratio when the attacker is present.
double kl_divergence(const GaussianObservationModel& alt, const GaussianObservationModel& null);

/// Composes location, power and beam direction into the attacker's strategy.
AttackStrategy build_attack(const ScenarioParams& params, const RoadGeometry& road);

/// Same composition with the true location fixed by the caller; used when a
/// scenario pins (d_M, theta_M) directly instead of searching a road.
AttackStrategy build_attack_at(const ScenarioParams& params, const PolarLocation& attacker_loc);

}  // namespace lsds
