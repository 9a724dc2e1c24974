#pragma once

#include <array>
#include <utility>
#include <vector>

#include "forcesense/types.hpp"

namespace forcesense {

enum class JointKind { Revolute, Prismatic };

/// Classic Denavit-Hartenberg row: T = Rz(theta) Tz(d) Tx(a) Rx(alpha).
/// For a revolute joint q adds to theta; for a prismatic joint q adds to d.
struct DhRow {
  double a = 0.0;       // link length, m
  double alpha = 0.0;   // link twist, rad
  double d = 0.0;       // link offset, m
  double theta = 0.0;   // joint angle offset, rad
};

struct JointDesc {
  JointKind kind = JointKind::Revolute;
  DhRow dh;
};

/// Serial 6-joint chain with lumped link masses for the gravity model and
/// per-joint viscous/Coulomb friction. Joint 2 (0-indexed) is prismatic,
/// mirroring a surgical-manipulator insertion axis; the rest are revolute.
struct KinematicChain {
  std::array<JointDesc, kNumJoints> joints;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);          // m/s^2
  std::array<double, kNumJoints> link_masses{};  // kg
  std::array<Vec3, kNumJoints> link_coms{};      // m, in link frame i
  Vec6 viscous = Vec6::Zero();                   // N·m·s/rad or N·s/m
  Vec6 coulomb = Vec6::Zero();                   // N·m or N
  std::array<std::pair<double, double>, kNumJoints> joint_limits{};

  /// Throws ConfigError if any structural invariant is violated.
  void validate() const;
};

/// Fixed desk-scale stand-in for a patient-side manipulator: two revolute
/// shoulder joints, a prismatic insertion axis, and a 3-joint wrist.
KinematicChain reference_chain();

/// Homogeneous transform of the elementary DH step for joint i at value q.
Mat4 dh_transform(const JointDesc& joint, double q);

/// Base-frame pose of every joint frame: element 0 is the base (identity),
/// element i is the pose after joint i. Size 7.
std::array<Mat4, kNumJoints + 1> link_frames(const KinematicChain& chain, const Vec6& q);

/// Base-to-tip transform. Rejects non-finite q.
Mat4 forward_kinematics(const KinematicChain& chain, const Vec6& q);

/// Geometric Jacobian at the tool tip, base frame. Rows 0-2 linear,
/// rows 3-5 angular; column i is the tip twist per unit joint-i velocity.
Mat6 jacobian(const KinematicChain& chain, const Vec6& q);

/// Base-frame position of link i's centre of mass at configuration q.
Vec3 link_com_position(const KinematicChain& chain, const Vec6& q, int link);

/// Generalized gravity term: sum over links of Jv_i^T (m_i * gravity),
/// with Jv_i the linear Jacobian of link i's COM.
Vec6 gravity_torque(const KinematicChain& chain, const Vec6& q);

/// Free-space joint torque model:
///   tau = g(q) + diag(viscous) qd + diag(coulomb) sign(qd),  sign(0) = 0.
/// No inertial terms; motions are treated as quasi-static.
Vec6 freespace_torque(const KinematicChain& chain, const JointState& state);

}  // namespace forcesense
