#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace forcesense {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr int kNumJoints = 6;

/// Timestamped joint-space state: positions (rad or m) and velocities.
struct JointState {
  double t = 0.0;
  Vec6 q = Vec6::Zero();
  Vec6 qd = Vec6::Zero();
};

/// 6-DoF Cartesian wrench: force (N) and torque (N·m) at a frame.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  static Wrench Zero() { return Wrench{}; }

  static Wrench FromVec(const Vec6& v) {
    Wrench w;
    w.force = v.head<3>();
    w.torque = v.tail<3>();
    return w;
  }

  Vec6 vec() const {
    Vec6 v;
    v << force, torque;
    return v;
  }

  bool allFinite() const { return force.allFinite() && torque.allFinite(); }
};

// Error taxonomy mirroring the CLI exit-code contract:
// config errors exit 2, data errors 3, numeric failures 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by the exact wrench solve when the Jacobian is singular or its
/// condition estimate exceeds the policy threshold. Carries the estimate so
/// the caller can decide to retry with damping.
struct SingularityError : NumericError {
  explicit SingularityError(const std::string& msg, double condition)
      : NumericError(msg), condition(condition) {}
  double condition;
};

/// Splitmix-style mix of a base seed with a purpose tag. Used to derive
/// independent, reproducible sub-seeds from the single config seed.
std::uint64_t derive_seed(std::uint64_t base, const std::string& tag);

/// FNV-1a over a byte string; stable across runs and platforms.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace forcesense
