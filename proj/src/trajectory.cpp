#include "forcesense/trajectory.hpp"

#include <cmath>
#include <random>

namespace forcesense {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Smoothstep envelope: 0 during the dwell, 1 after the ramp.
double envelope(double t, double dwell_s, double ramp_s, double* deriv) {
  if (t <= dwell_s) {
    *deriv = 0.0;
    return 0.0;
  }
  if (t >= dwell_s + ramp_s) {
    *deriv = 0.0;
    return 1.0;
  }
  const double s = (t - dwell_s) / ramp_s;
  *deriv = 6.0 * s * (1.0 - s) / ramp_s;
  return s * s * (3.0 - 2.0 * s);
}

struct Harmonic {
  double amp;
  double omega;
  double phase;
};

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("trajectory: duration_s must be positive");
  if (!(rate_hz > 0.0)) throw ConfigError("trajectory: rate_hz must be positive");
  if (n_harmonics < 0) throw ConfigError("trajectory: n_harmonics must be non-negative");
  for (int i = 0; i < kNumJoints; ++i) {
    if (amplitude_fraction[i] < 0.0 || amplitude_fraction[i] > 1.0) {
      throw ConfigError("trajectory: amplitude budget infeasible for joint limits "
                        "(amplitude_fraction must lie in [0, 1])");
    }
    if (!(max_velocity[i] > 0.0)) {
      throw ConfigError("trajectory: max_velocity must be positive");
    }
  }
  if (dwell_s < 0.0 || !(ramp_s > 0.0)) {
    throw ConfigError("trajectory: dwell_s must be >= 0 and ramp_s > 0");
  }
}

std::vector<JointState> generate_freespace_trajectory(const KinematicChain& chain,
                                                      const TrajectoryConfig& cfg) {
  chain.validate();
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> amp_draw(0.3, 1.0);
  std::uniform_real_distribution<double> freq_draw(0.02, 0.30);  // Hz
  std::uniform_real_distribution<double> phase_draw(0.0, kTwoPi);

  // Per-joint harmonic sets, scaled to both the position and velocity budgets.
  std::array<std::vector<Harmonic>, kNumJoints> harmonics;
  const double env_rate = 1.5 / cfg.ramp_s;  // max smoothstep slope
  for (int i = 0; i < kNumJoints; ++i) {
    auto& set = harmonics[i];
    set.resize(static_cast<size_t>(cfg.n_harmonics));
    double amp_sum = 0.0;
    for (auto& h : set) {
      h.amp = amp_draw(rng);
      h.omega = kTwoPi * freq_draw(rng);
      h.phase = phase_draw(rng);
      amp_sum += h.amp;
    }
    if (set.empty() || amp_sum == 0.0) continue;

    const double half_range = 0.5 * (chain.joint_limits[i].second - chain.joint_limits[i].first);
    const double amp_budget = cfg.amplitude_fraction[i] * half_range;
    double scale = amp_budget / amp_sum;

    double vel_bound = 0.0;
    for (const auto& h : set) vel_bound += scale * h.amp * (h.omega + env_rate);
    if (vel_bound > cfg.max_velocity[i]) {
      scale *= cfg.max_velocity[i] / vel_bound;
    }
    for (auto& h : set) h.amp *= scale;
  }

  const auto n = static_cast<size_t>(std::llround(cfg.duration_s * cfg.rate_hz));
  std::vector<JointState> states(n);
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.rate_hz;
    double denv;
    const double env = envelope(t, cfg.dwell_s, cfg.ramp_s, &denv);
    JointState& st = states[k];
    st.t = t;
    for (int i = 0; i < kNumJoints; ++i) {
      const double mid = 0.5 * (chain.joint_limits[i].first + chain.joint_limits[i].second);
      double s = 0.0, sd = 0.0;
      for (const auto& h : harmonics[i]) {
        s += h.amp * std::sin(h.omega * t + h.phase);
        sd += h.amp * h.omega * std::cos(h.omega * t + h.phase);
      }
      st.q[i] = mid + env * s;
      st.qd[i] = denv * s + env * sd;
    }
  }
  return states;
}

void ContactProfile::validate(const KinematicChain& chain, const TrajectoryConfig& cfg) const {
  for (int a = 0; a < 3; ++a) {
    if (peaks[a] < 0.0) throw ConfigError("contact: peak forces must be non-negative");
  }
  if (!(ramp_s > 0.0)) throw ConfigError("contact: ramp_s must be positive");
  if (kind == ContactProfileKind::RampHoldRelease && 2.0 * ramp_s >= cfg.duration_s / 3.0) {
    throw ConfigError("contact: per-axis segment too short for ramp-hold-release");
  }
  for (int i = 0; i < kNumJoints; ++i) {
    if (dwell_amplitude[i] < 0.0) {
      throw ConfigError("contact: dwell_amplitude must be non-negative");
    }
    if (probe_q[i] - dwell_amplitude[i] < chain.joint_limits[i].first ||
        probe_q[i] + dwell_amplitude[i] > chain.joint_limits[i].second) {
      throw ConfigError("contact: probing motion exceeds limits of joint " +
                        std::to_string(i + 1));
    }
  }
}

std::vector<std::pair<JointState, Wrench>> generate_contact_trajectory(
    const KinematicChain& chain, const TrajectoryConfig& cfg, const ContactProfile& profile) {
  chain.validate();
  cfg.validate();
  profile.validate(chain, cfg);

  const double seg = cfg.duration_s / 3.0;
  const double omega = kTwoPi * profile.dwell_freq_hz;
  const auto n = static_cast<size_t>(std::llround(cfg.duration_s * cfg.rate_hz));

  std::vector<std::pair<JointState, Wrench>> out(n);
  for (size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / cfg.rate_hz;
    JointState st;
    st.t = t;
    for (int i = 0; i < kNumJoints; ++i) {
      // fixed golden-angle phase offsets keep the probing micro-motion from
      // synchronizing across joints
      const double phase = 2.399963229728653 * i;
      st.q[i] = profile.probe_q[i] + profile.dwell_amplitude[i] * std::sin(omega * t + phase);
      st.qd[i] = profile.dwell_amplitude[i] * omega * std::cos(omega * t + phase);
    }

    Wrench w = Wrench::Zero();
    int axis = static_cast<int>(t / seg);
    if (axis > 2) axis = 2;
    const double tl = t - axis * seg;
    double f = 0.0;
    if (profile.kind == ContactProfileKind::RampHoldRelease) {
      if (tl < profile.ramp_s) {
        f = profile.peaks[axis] * tl / profile.ramp_s;
      } else if (tl > seg - profile.ramp_s) {
        f = profile.peaks[axis] * (seg - tl) / profile.ramp_s;
      } else {
        f = profile.peaks[axis];
      }
    } else {
      const double s = std::sin(M_PI * tl / seg);
      f = profile.peaks[axis] * s * s;
    }
    w.force[axis] = f;
    out[k] = {st, w};
  }
  return out;
}

}  // namespace forcesense
