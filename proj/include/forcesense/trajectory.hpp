#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "forcesense/chain.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

/// Sum-of-sinusoids excitation, one independent signal per joint:
///   q_i(t) = mid_i + env(t) * sum_k A_ik sin(w_ik t + phi_ik)
/// A, w, phi are drawn from the seed. env(t) is a smoothstep envelope that is
/// zero for the first dwell_s seconds (the zero-velocity segment the bias
/// baseline needs) and ramps to one over ramp_s. Amplitudes are scaled so q
/// stays inside the joint limits and |qd| never exceeds max_velocity.
struct TrajectoryConfig {
  double duration_s = 600.0;
  double rate_hz = 100.0;
  int n_harmonics = 3;
  Vec6 amplitude_fraction = Vec6::Constant(0.7);  // of half joint range
  Vec6 max_velocity = Vec6::Constant(0.8);        // rad/s or m/s
  std::uint64_t seed = 0;
  double dwell_s = 5.0;
  double ramp_s = 4.0;

  void validate() const;
};

enum class ContactProfileKind { RampHoldRelease, SinusoidalPush };

/// Sequential per-axis pushes at the tool tip while the arm dwells near a
/// probing configuration. The session splits into three equal segments, one
/// per Cartesian force axis.
struct ContactProfile {
  ContactProfileKind kind = ContactProfileKind::RampHoldRelease;
  Vec3 peaks = Vec3(30.0, 30.0, 35.0);          // N
  double ramp_s = 4.0;                          // per-segment ramp up and down
  Vec6 probe_q = Vec6::Zero();
  Vec6 dwell_amplitude = Vec6::Constant(0.02);  // rad or m, probing micro-motion
  double dwell_freq_hz = 0.15;

  void validate(const KinematicChain& chain, const TrajectoryConfig& cfg) const;
};

std::vector<JointState> generate_freespace_trajectory(const KinematicChain& chain,
                                                      const TrajectoryConfig& cfg);

std::vector<std::pair<JointState, Wrench>> generate_contact_trajectory(
    const KinematicChain& chain, const TrajectoryConfig& cfg, const ContactProfile& profile);

}  // namespace forcesense
