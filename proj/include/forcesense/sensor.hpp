#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "forcesense/chain.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

enum class BiasKind { Static, OuDrift };

/// Torque-sensor error model. "classic" profiles use a time-invariant
/// static bias; "si" profiles use an Ornstein-Uhlenbeck drifting bias.
struct SensorModel {
  Vec6 noise_sigma = Vec6::Zero();   // per-joint white noise std, torque units
  BiasKind bias_kind = BiasKind::Static;
  Vec6 static_bias = Vec6::Zero();
  double ou_theta = 0.1;             // mean-reversion rate, 1/s
  double ou_sigma = 0.0;             // diffusion, torque-units/sqrt(s)
  std::uint64_t seed = 0;

  void validate() const;

  /// Starting value for the threaded bias state: the static bias itself for
  /// the static kind, zero for the OU drift.
  Vec6 initial_bias() const;
};

/// Deterministic stream of standard-normal draws. The distribution object is
/// part of the stream so two identically seeded streams are bit-identical.
class GaussStream {
 public:
  explicit GaussStream(std::uint64_t seed) : rng_(seed) {}

  double next() { return dist_(rng_); }

  Vec6 next6() {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = next();
    return v;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

/// Sensor-reading kernel:
///   tau = tau_free + J^T F_contact + bias_state + eps,
/// eps_i ~ N(0, noise_sigma_i^2). Uses the current bias_state, then (for the
/// OU kind) advances it one Euler-Maruyama step of size dt:
///   b <- b + theta (0 - b) dt + ou_sigma sqrt(dt) eta.
Vec6 measured_torque(const Mat6& J, const Vec6& tau_free, const SensorModel& sensor,
                     const std::optional<Wrench>& contact, Vec6& bias_state, double dt,
                     GaussStream& noise);

/// Chain-level wrapper: computes J and the free-space torque from the state.
Vec6 measured_torque(const KinematicChain& chain, const JointState& state,
                     const SensorModel& sensor, const std::optional<Wrench>& contact,
                     Vec6& bias_state, double dt, GaussStream& noise);

}  // namespace forcesense
