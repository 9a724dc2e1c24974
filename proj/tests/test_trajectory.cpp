#include "doctest.h"

#include <cmath>

#include "forcesense/trajectory.hpp"
#include "test_helpers.hpp"

using namespace forcesense;

namespace {

TrajectoryConfig short_cfg() {
  TrajectoryConfig cfg;
  cfg.duration_s = 10.0;
  cfg.rate_hz = 100.0;
  cfg.n_harmonics = 3;
  cfg.amplitude_fraction = Vec6::Constant(0.7);
  cfg.max_velocity << 0.8, 0.8, 0.15, 1.2, 1.2, 1.2;
  cfg.seed = 42;
  cfg.dwell_s = 2.0;
  cfg.ramp_s = 1.5;
  return cfg;
}

}  // namespace

TEST_CASE("freespace trajectory: zero harmonics holds the joint midpoints at rest") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  cfg.n_harmonics = 0;
  const auto states = generate_freespace_trajectory(chain, cfg);
  REQUIRE(states.size() == 1000);
  for (const auto& st : states) {
    for (int i = 0; i < kNumJoints; ++i) {
      const double mid = 0.5 * (chain.joint_limits[i].first + chain.joint_limits[i].second);
      CHECK(st.q[i] == doctest::Approx(mid).epsilon(1e-15));
      CHECK(st.qd[i] == 0.0);
    }
  }
}

TEST_CASE("freespace trajectory: velocity budget and joint limits hold for any seed") {
  const auto chain = reference_chain();
  for (std::uint64_t seed : {1ull, 7ull, 1234ull, 987654321ull}) {
    auto cfg = short_cfg();
    cfg.seed = seed;
    cfg.duration_s = 30.0;
    const auto states = generate_freespace_trajectory(chain, cfg);
    for (const auto& st : states) {
      for (int i = 0; i < kNumJoints; ++i) {
        CHECK(std::abs(st.qd[i]) <= cfg.max_velocity[i] * (1.0 + 1e-12));
        CHECK(st.q[i] >= chain.joint_limits[i].first);
        CHECK(st.q[i] <= chain.joint_limits[i].second);
      }
    }
  }
}

TEST_CASE("freespace trajectory: deterministic, bit-identical across runs") {
  const auto chain = reference_chain();
  const auto cfg = short_cfg();
  const auto a = generate_freespace_trajectory(chain, cfg);
  const auto b = generate_freespace_trajectory(chain, cfg);
  REQUIRE(a.size() == 1000);
  REQUIRE(b.size() == 1000);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].t == b[k].t);
    CHECK((a[k].q - b[k].q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a[k].qd - b[k].qd).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("freespace trajectory: dwell segment sits at zero velocity") {
  const auto chain = reference_chain();
  const auto cfg = short_cfg();
  const auto states = generate_freespace_trajectory(chain, cfg);
  int dwell_count = 0;
  for (const auto& st : states) {
    if (st.t < cfg.dwell_s) {
      CHECK(st.qd.cwiseAbs().maxCoeff() == 0.0);
      ++dwell_count;
    }
  }
  CHECK(dwell_count == 200);
}

TEST_CASE("freespace trajectory: timestamps strictly increase") {
  const auto chain = reference_chain();
  const auto states = generate_freespace_trajectory(chain, short_cfg());
  for (std::size_t k = 1; k < states.size(); ++k) {
    CHECK(states[k].t > states[k - 1].t);
  }
}

TEST_CASE("trajectory config validation: infeasible amplitude budget is rejected") {
  auto cfg = short_cfg();
  cfg.amplitude_fraction = Vec6::Constant(1.2);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  auto cfg2 = short_cfg();
  cfg2.duration_s = 0.0;
  CHECK_THROWS_AS(cfg2.validate(), ConfigError);

  auto cfg3 = short_cfg();
  cfg3.max_velocity[2] = 0.0;
  CHECK_THROWS_AS(cfg3.validate(), ConfigError);
}

TEST_CASE("contact trajectory: zero-amplitude profile emits all-zero wrenches") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  cfg.duration_s = 30.0;
  ContactProfile profile;
  profile.peaks = Vec3::Zero();
  profile.ramp_s = 2.0;
  profile.probe_q << 0.3, 0.4, 0.15, 0.4, 0.5, -0.5;
  const auto series = generate_contact_trajectory(chain, cfg, profile);
  REQUIRE(series.size() == 3000);
  for (const auto& [st, w] : series) {
    CHECK(w.vec().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("contact trajectory: linear ramp midpoint") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  cfg.duration_s = 30.0;
  ContactProfile profile;
  profile.peaks = Vec3(10.0, 0.0, 0.0);
  profile.ramp_s = 2.0;
  profile.probe_q << 0.3, 0.4, 0.15, 0.4, 0.5, -0.5;
  const auto series = generate_contact_trajectory(chain, cfg, profile);
  const auto& [st, w] = series[100];  // t = 1 s, halfway up the X ramp
  CHECK(st.t == doctest::Approx(1.0));
  CHECK(w.force[0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(w.force[1] == 0.0);
  CHECK(w.force[2] == 0.0);
  CHECK(w.torque.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("contact trajectory: per-axis ground-truth range equals the configured peak") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  cfg.duration_s = 60.0;
  ContactProfile profile;
  profile.peaks = Vec3(20.0, 20.0, 25.0);
  profile.ramp_s = 4.0;
  profile.probe_q << 0.35, 0.45, 0.16, 0.4, 0.55, -0.5;

  for (auto kind : {ContactProfileKind::RampHoldRelease, ContactProfileKind::SinusoidalPush}) {
    profile.kind = kind;
    const auto series = generate_contact_trajectory(chain, cfg, profile);
    for (int a = 0; a < 3; ++a) {
      double lo = 1e300, hi = -1e300;
      for (const auto& [st, w] : series) {
        lo = std::min(lo, w.force[a]);
        hi = std::max(hi, w.force[a]);
      }
      if (kind == ContactProfileKind::RampHoldRelease) {
        CHECK(std::abs((hi - lo) - profile.peaks[a]) < 1e-9);
      } else {
        // sinusoidal pushes reach the peak only at the exact segment middle
        CHECK(hi - lo <= profile.peaks[a] + 1e-12);
        CHECK(hi - lo > 0.95 * profile.peaks[a]);
      }
      CHECK(lo == 0.0);
    }
  }
}

TEST_CASE("contact trajectory: each axis is covered and the motion stays within limits") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  cfg.duration_s = 30.0;
  ContactProfile profile;
  profile.peaks = Vec3(5.0, 6.0, 7.0);
  profile.ramp_s = 2.0;
  profile.probe_q << 0.35, 0.45, 0.16, 0.4, 0.55, -0.5;
  const auto series = generate_contact_trajectory(chain, cfg, profile);
  Vec3 peak_seen = Vec3::Zero();
  for (const auto& [st, w] : series) {
    for (int a = 0; a < 3; ++a) peak_seen[a] = std::max(peak_seen[a], w.force[a]);
    for (int i = 0; i < kNumJoints; ++i) {
      CHECK(st.q[i] >= chain.joint_limits[i].first);
      CHECK(st.q[i] <= chain.joint_limits[i].second);
    }
  }
  for (int a = 0; a < 3; ++a) CHECK(peak_seen[a] == doctest::Approx(profile.peaks[a]));
}

TEST_CASE("contact profile validation: probing motion must respect joint limits") {
  const auto chain = reference_chain();
  auto cfg = short_cfg();
  ContactProfile profile;
  profile.probe_q << 0.0, 0.0, 0.0, 0.0, 0.0, 0.0;  // prismatic at its lower limit
  profile.dwell_amplitude = Vec6::Constant(0.05);
  CHECK_THROWS_AS(profile.validate(chain, cfg), ConfigError);
}
