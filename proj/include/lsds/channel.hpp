#pragma once

#include "lsds/geometry.hpp"
#include "lsds/random.hpp"

namespace lsds {

using ChannelMatrix = CMatrix;  // rx elements x tx elements

/// One Rician vehicle-to-BS link. k_factor is linear: 0 is pure Rayleigh,
/// +inf is pure line of sight.
struct RicianChannelSpec {
  double k_factor;
  UlaConfig rx_array;        // the BS side
  UlaConfig tx_array;        // the vehicle side
  double bearing_at_bs;      // theta of the vehicle seen from the BS
  double tx_pointing_angle;  // psi between the vehicle array axis and the BS direction
  double carrier_hz = 5.9e9;
  double wave_speed = 3.0e8;
};

/// Rank-one LOS component: receive steering (column) times transmit steering (row).
ChannelMatrix los_component(const RicianChannelSpec& spec);

/// Draws sqrt(K/(1+K)) * LOS + sqrt(1/(1+K)) * W with W i.i.d. standard
/// circularly-symmetric complex Gaussian.
ChannelMatrix sample_channel(const RicianChannelSpec& spec, RandomStream& rng);

}  // namespace lsds
