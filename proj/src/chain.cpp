#include "forcesense/chain.hpp"

#include <cmath>

namespace forcesense {

void KinematicChain::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    const bool prismatic = joints[i].kind == JointKind::Prismatic;
    if (i == 2 && !prismatic) {
      throw ConfigError("chain: joint 3 (index 2) must be prismatic");
    }
    if (i != 2 && prismatic) {
      throw ConfigError("chain: joint " + std::to_string(i + 1) + " must be revolute");
    }
    if (viscous[i] < 0.0 || coulomb[i] < 0.0) {
      throw ConfigError("chain: friction coefficients must be non-negative");
    }
    if (!(joint_limits[i].first < joint_limits[i].second)) {
      throw ConfigError("chain: joint " + std::to_string(i + 1) +
                        " limits must satisfy lo < hi");
    }
    if (link_masses[i] < 0.0) {
      throw ConfigError("chain: link masses must be non-negative");
    }
  }
  if (!(gravity.norm() > 0.0)) {
    throw ConfigError("chain: |gravity| must be positive");
  }
}

KinematicChain reference_chain() {
  KinematicChain c;
  const double pi = M_PI;
  // Shoulder yaw/pitch, prismatic insertion, 3-joint wrist. The wrist keeps
  // non-zero link lengths so the 6x6 Jacobian stays well conditioned over
  // the working envelope.
  c.joints[0] = {JointKind::Revolute, {0.0, pi / 2.0, 0.20, 0.0}};
  c.joints[1] = {JointKind::Revolute, {0.0, -pi / 2.0, 0.0, -pi / 2.0}};
  c.joints[2] = {JointKind::Prismatic, {0.0, 0.0, 0.10, 0.0}};
  c.joints[3] = {JointKind::Revolute, {0.0, pi / 2.0, 0.0, 0.0}};
  c.joints[4] = {JointKind::Revolute, {0.14, -pi / 2.0, 0.0, -pi / 2.0}};
  c.joints[5] = {JointKind::Revolute, {0.11, pi / 2.0, 0.0, pi / 2.0}};

  c.gravity = Vec3(0.0, 0.0, -9.81);
  c.link_masses = {3.0, 2.0, 0.45, 0.18, 0.12, 0.10};
  c.link_coms = {Vec3(0.0, 0.02, -0.06), Vec3(0.04, 0.0, 0.01),
                 Vec3(0.0, 0.0, -0.08),  Vec3(0.0, 0.01, -0.03),
                 Vec3(0.04, 0.0, 0.0),   Vec3(0.03, 0.0, 0.0)};
  c.viscous << 1.1, 0.9, 3.0, 0.10, 0.08, 0.06;
  c.coulomb << 0.10, 0.08, 0.30, 0.010, 0.008, 0.006;
  c.joint_limits = {std::pair{-1.4, 1.4}, {-0.9, 0.9},   {0.0, 0.30},
                    {-2.2, 2.2},          {-1.35, 1.35}, {-1.35, 1.35}};
  return c;
}

Mat4 dh_transform(const JointDesc& joint, double q) {
  double theta = joint.dh.theta;
  double d = joint.dh.d;
  if (joint.kind == JointKind::Revolute) {
    theta += q;
  } else {
    d += q;
  }
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(joint.dh.alpha);
  const double sa = std::sin(joint.dh.alpha);
  const double a = joint.dh.a;

  Mat4 T;
  T << ct, -st * ca, st * sa, a * ct,
       st, ct * ca, -ct * sa, a * st,
       0.0, sa, ca, d,
       0.0, 0.0, 0.0, 1.0;
  return T;
}

std::array<Mat4, kNumJoints + 1> link_frames(const KinematicChain& chain, const Vec6& q) {
  std::array<Mat4, kNumJoints + 1> frames;
  frames[0] = Mat4::Identity();
  for (int i = 0; i < kNumJoints; ++i) {
    frames[i + 1] = frames[i] * dh_transform(chain.joints[i], q[i]);
  }
  return frames;
}

Mat4 forward_kinematics(const KinematicChain& chain, const Vec6& q) {
  if (!q.allFinite()) {
    throw DataError("forward_kinematics: non-finite joint configuration");
  }
  return link_frames(chain, q)[kNumJoints];
}

Mat6 jacobian(const KinematicChain& chain, const Vec6& q) {
  if (!q.allFinite()) {
    throw DataError("jacobian: non-finite joint configuration");
  }
  const auto frames = link_frames(chain, q);
  const Vec3 p_tip = frames[kNumJoints].block<3, 1>(0, 3);

  Mat6 J;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 z = frames[i].block<3, 1>(0, 2);   // joint axis, base frame
    const Vec3 p = frames[i].block<3, 1>(0, 3);
    if (chain.joints[i].kind == JointKind::Revolute) {
      J.block<3, 1>(0, i) = z.cross(p_tip - p);
      J.block<3, 1>(3, i) = z;
    } else {
      J.block<3, 1>(0, i) = z;
      J.block<3, 1>(3, i) = Vec3::Zero();
    }
  }
  return J;
}

Vec3 link_com_position(const KinematicChain& chain, const Vec6& q, int link) {
  const auto frames = link_frames(chain, q);
  const Mat4& T = frames[link + 1];
  return T.block<3, 3>(0, 0) * chain.link_coms[link] + T.block<3, 1>(0, 3);
}

Vec6 gravity_torque(const KinematicChain& chain, const Vec6& q) {
  const auto frames = link_frames(chain, q);
  Vec6 tau = Vec6::Zero();
  for (int link = 0; link < kNumJoints; ++link) {
    if (chain.link_masses[link] == 0.0) continue;
    const Mat4& Tl = frames[link + 1];
    const Vec3 p_com = Tl.block<3, 3>(0, 0) * chain.link_coms[link] + Tl.block<3, 1>(0, 3);
    const Vec3 w = chain.link_masses[link] * chain.gravity;
    // Linear Jacobian of the COM: joints distal to the link contribute nothing.
    for (int j = 0; j <= link; ++j) {
      const Vec3 z = frames[j].block<3, 1>(0, 2);
      if (chain.joints[j].kind == JointKind::Revolute) {
        const Vec3 p = frames[j].block<3, 1>(0, 3);
        tau[j] += z.cross(p_com - p).dot(w);
      } else {
        tau[j] += z.dot(w);
      }
    }
  }
  return tau;
}

Vec6 freespace_torque(const KinematicChain& chain, const JointState& state) {
  Vec6 tau = gravity_torque(chain, state.q);
  for (int i = 0; i < kNumJoints; ++i) {
    tau[i] += chain.viscous[i] * state.qd[i];
    if (state.qd[i] > 0.0) {
      tau[i] += chain.coulomb[i];
    } else if (state.qd[i] < 0.0) {
      tau[i] -= chain.coulomb[i];
    }
  }
  return tau;
}

}  // namespace forcesense
