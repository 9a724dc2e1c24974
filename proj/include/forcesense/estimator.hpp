#pragma once

#include <optional>
#include <vector>

#include "forcesense/dataset.hpp"
#include "forcesense/torque_predictor.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

enum class SolveKind { Exact, Damped };

/// Residual-torque to wrench solve policy. The exact policy refuses
/// Jacobians whose estimated condition exceeds kappa_max; the damped policy
/// regularizes with lambda (default 1e-6 * ||J||_F when unset).
struct EstimatorPolicy {
  SolveKind kind = SolveKind::Exact;
  double kappa_max = 1e8;
  std::optional<double> lambda;
};

enum class EstimateStatus { Ok, Unavailable, Singular };

struct WrenchEstimate {
  EstimateStatus status = EstimateStatus::Unavailable;
  Wrench wrench;
  Vec6 residual_torque = Vec6::Zero();  // tau - tau_hat, bit-exact
  double jacobian_condition = 1.0;
  Method method_tag = Method::MeasureOnly;
};

/// Recovers the external Cartesian wrench from the residual joint torque:
/// solves J^T F = tau - tau_hat (exact policy, dense LU) or applies the
/// Tikhonov-regularized form F = (J J^T + lambda^2 I)^{-1} J (tau - tau_hat)
/// (damped policy). Throws SingularityError under the exact policy when the
/// condition estimate exceeds the policy threshold.
WrenchEstimate estimate_wrench(const Mat6& J, const Vec6& tau, const Vec6& tau_hat,
                               const EstimatorPolicy& policy,
                               Method tag = Method::MeasureOnly);

/// Applies estimate_wrench per timestep with the method's predicted torque.
/// Timesteps without a prediction are marked Unavailable; singular solves are
/// marked Singular without aborting the series.
std::vector<WrenchEstimate> estimate_series(const TorquePredictor& predictor,
                                            const Dataset& dataset,
                                            const EstimatorPolicy& policy);

}  // namespace forcesense
