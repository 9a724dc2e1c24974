#include "forcesense/estimator.hpp"

#include <cmath>
#include <limits>

namespace forcesense {

WrenchEstimate estimate_wrench(const Mat6& J, const Vec6& tau, const Vec6& tau_hat,
                               const EstimatorPolicy& policy, Method tag) {
  if (!J.allFinite() || !tau.allFinite() || !tau_hat.allFinite()) {
    throw NumericError("estimate_wrench: non-finite input");
  }

  WrenchEstimate est;
  est.method_tag = tag;
  est.residual_torque = tau - tau_hat;

  const Eigen::PartialPivLU<Mat6> lu(J.transpose());
  const double rcond = lu.rcond();
  const double condition =
      (rcond > 0.0 && std::isfinite(rcond)) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  est.jacobian_condition = std::max(condition, 1.0);

  if (policy.kind == SolveKind::Exact) {
    if (!(est.jacobian_condition <= policy.kappa_max)) {
      throw SingularityError(
          "estimate_wrench: Jacobian condition estimate " + std::to_string(est.jacobian_condition) +
              " exceeds kappa_max " + std::to_string(policy.kappa_max),
          est.jacobian_condition);
    }
    const Vec6 f = lu.solve(est.residual_torque);
    if (!f.allFinite()) {
      throw SingularityError("estimate_wrench: singular Jacobian", est.jacobian_condition);
    }
    est.wrench = Wrench::FromVec(f);
  } else {
    const double lambda = policy.lambda ? *policy.lambda : 1e-6 * J.norm();
    const Mat6 m = J * J.transpose() + lambda * lambda * Mat6::Identity();
    const Vec6 f = Eigen::LDLT<Mat6>(m).solve(J * est.residual_torque);
    if (!f.allFinite()) {
      throw NumericError("estimate_wrench: damped solve failed");
    }
    est.wrench = Wrench::FromVec(f);
  }
  est.status = EstimateStatus::Ok;
  return est;
}

std::vector<WrenchEstimate> estimate_series(const TorquePredictor& predictor,
                                            const Dataset& dataset,
                                            const EstimatorPolicy& policy) {
  const auto tau_hat = predictor.predict_series(dataset);
  if (tau_hat.size() != dataset.samples.size()) {
    throw DataError("estimate_series: prediction length mismatch");
  }

  std::vector<WrenchEstimate> out(dataset.samples.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const Sample& s = dataset.samples[i];
    if (!tau_hat[i]) {
      out[i].status = EstimateStatus::Unavailable;
      out[i].method_tag = predictor.method();
      continue;
    }
    try {
      out[i] = estimate_wrench(s.jacobian, s.tau_measured, *tau_hat[i], policy,
                               predictor.method());
    } catch (const SingularityError& e) {
      out[i].status = EstimateStatus::Singular;
      out[i].method_tag = predictor.method();
      out[i].residual_torque = s.tau_measured - *tau_hat[i];
      out[i].jacobian_condition = e.condition;
    }
  }
  return out;
}

}  // namespace forcesense
