#include "forcesense/sensor.hpp"

#include <cmath>

namespace forcesense {

void SensorModel::validate() const {
  for (int i = 0; i < 6; ++i) {
    if (noise_sigma[i] < 0.0) {
      throw ConfigError("sensor: noise_sigma must be non-negative");
    }
  }
  if (bias_kind == BiasKind::OuDrift && !(ou_theta > 0.0)) {
    throw ConfigError("sensor: ou_theta must be positive for ou_drift bias");
  }
  if (ou_sigma < 0.0) {
    throw ConfigError("sensor: ou_sigma must be non-negative");
  }
}

Vec6 SensorModel::initial_bias() const {
  return bias_kind == BiasKind::Static ? static_bias : Vec6::Zero();
}

Vec6 measured_torque(const Mat6& J, const Vec6& tau_free, const SensorModel& sensor,
                     const std::optional<Wrench>& contact, Vec6& bias_state, double dt,
                     GaussStream& noise) {
  Vec6 tau = tau_free;
  if (contact) {
    if (!contact->allFinite()) {
      throw DataError("measured_torque: non-finite contact wrench");
    }
    tau += J.transpose() * contact->vec();
  }
  tau += bias_state;
  for (int i = 0; i < 6; ++i) {
    if (sensor.noise_sigma[i] > 0.0) {
      tau[i] += sensor.noise_sigma[i] * noise.next();
    }
  }
  if (sensor.bias_kind == BiasKind::OuDrift) {
    const double sq = sensor.ou_sigma * std::sqrt(dt);
    for (int i = 0; i < 6; ++i) {
      bias_state[i] += -sensor.ou_theta * bias_state[i] * dt + sq * noise.next();
    }
  }
  return tau;
}

Vec6 measured_torque(const KinematicChain& chain, const JointState& state,
                     const SensorModel& sensor, const std::optional<Wrench>& contact,
                     Vec6& bias_state, double dt, GaussStream& noise) {
  const Mat6 J = jacobian(chain, state.q);
  const Vec6 tau_free = freespace_torque(chain, state);
  return measured_torque(J, tau_free, sensor, contact, bias_state, dt, noise);
}

}  // namespace forcesense
