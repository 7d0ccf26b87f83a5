#include "lsds/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace lsds {

namespace {

void check_spec(const RicianChannelSpec& spec) {
  if (!(spec.k_factor >= 0.0)) throw std::invalid_argument("Rician K-factor must be >= 0");
}

}  // namespace

ChannelMatrix los_component(const RicianChannelSpec& spec) {
  check_spec(spec);
  const double tau_rx = phase_constant(spec.rx_array.spacing, spec.carrier_hz, spec.wave_speed);
  const double tau_tx = phase_constant(spec.tx_array.spacing, spec.carrier_hz, spec.wave_speed);
  const CVector rx = steering_vector(spec.rx_array.n, tau_rx, spec.bearing_at_bs);
  const CVector tx = steering_vector(spec.tx_array.n, tau_tx, spec.tx_pointing_angle);
  return rx * tx.transpose();
}

ChannelMatrix sample_channel(const RicianChannelSpec& spec, RandomStream& rng) {
  const ChannelMatrix los = los_component(spec);
  const double k = spec.k_factor;
  const double los_amp = std::sqrt(k / (1.0 + k));
  const double scatter_amp = std::sqrt(1.0 / (1.0 + k));
  return los_amp * los +
         scatter_amp * complex_gaussian_matrix(spec.rx_array.n, spec.tx_array.n, rng);
}

}  // namespace lsds
