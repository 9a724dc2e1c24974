#include "forcesense/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace forcesense {

BiasModel fit_bias(const Dataset& dataset, double velocity_eps) {
  if (!(velocity_eps > 0.0)) {
    throw ConfigError("fit_bias: velocity_eps must be positive");
  }
  BiasModel model;
  model.velocity_eps = velocity_eps;

  Vec6 sum = Vec6::Zero();
  std::size_t count = 0;
  for (std::size_t i = 0; i < dataset.partition.train_end; ++i) {
    const Sample& s = dataset.samples[i];
    if (s.state.qd.cwiseAbs().maxCoeff() < velocity_eps) {
      sum += s.tau_measured;
      ++count;
    }
  }
  if (count == 0) {
    throw ConfigError(
        "fit_bias: no training samples with ||qd||_inf < " + std::to_string(velocity_eps) +
        "; increase velocity_eps or include dwell segments in the trajectory");
  }
  model.bias = sum / static_cast<double>(count);
  model.n_samples_used = count;
  return model;
}

LookupIndex build_index(const Dataset& dataset, int k) {
  const auto n = dataset.partition.train_end;
  if (k < 1) {
    throw ConfigError("build_index: k must be >= 1 (got k=" + std::to_string(k) + ")");
  }
  if (n < static_cast<std::size_t>(k)) {
    throw ConfigError("build_index: k=" + std::to_string(k) +
                      " exceeds the number of training samples N=" + std::to_string(n));
  }

  LookupIndex index;
  index.k = k;
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), 12);
  for (std::size_t i = 0; i < n; ++i) {
    const Sample& s = dataset.samples[i];
    raw.row(static_cast<Eigen::Index>(i)).head<6>() = s.state.q.transpose();
    raw.row(static_cast<Eigen::Index>(i)).tail<6>() = s.state.qd.transpose();
  }

  index.feature_means = raw.colwise().mean().transpose();
  index.feature_stds.resize(12);
  for (int c = 0; c < 12; ++c) {
    const double var =
        (raw.col(c).array() - index.feature_means[c]).square().sum() / static_cast<double>(n);
    double s = std::sqrt(var);
    if (!(s > 0.0)) {
      index.warnings.push_back("feature " + std::to_string(c) +
                               " has zero variance; std clamped to 1");
      s = 1.0;
    }
    index.feature_stds[c] = s;
  }

  index.keys = raw;
  index.keys.rowwise() -= index.feature_means.transpose();
  index.keys.array().rowwise() /= index.feature_stds.transpose().array();

  index.values.resize(static_cast<Eigen::Index>(n), 6);
  for (std::size_t i = 0; i < n; ++i) {
    index.values.row(static_cast<Eigen::Index>(i)) = dataset.samples[i].tau_measured.transpose();
  }
  return index;
}

Vec6 lookup(const LookupIndex& index, const JointState& query) {
  const auto n = index.keys.rows();
  Eigen::Matrix<double, 12, 1> qv;
  qv.head<6>() = query.q;
  qv.tail<6>() = query.qd;
  qv = (qv - index.feature_means).cwiseQuotient(index.feature_stds);

  // Plain scalar accumulation in feature order: the exactness contract is
  // bit-for-bit agreement with a brute-force scan doing the same arithmetic.
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < 12; ++c) {
      const double d = index.keys(r, c) - qv[c];
      s += d * d;
    }
    dist[static_cast<std::size_t>(r)] = s;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto by_distance_then_row = [&dist](Eigen::Index a, Eigen::Index b) {
    const double da = dist[static_cast<std::size_t>(a)];
    const double db = dist[static_cast<std::size_t>(b)];
    return da < db || (da == db && a < b);
  };
  const auto kth = order.begin() + index.k;
  std::nth_element(order.begin(), kth - 1, order.end(), by_distance_then_row);
  std::sort(order.begin(), kth, by_distance_then_row);

  Vec6 sum = Vec6::Zero();
  for (int i = 0; i < index.k; ++i) {
    sum += index.values.row(order[static_cast<std::size_t>(i)]).transpose();
  }
  return sum / static_cast<double>(index.k);
}

std::vector<std::optional<Vec6>> MeasureOnlyPredictor::predict_series(
    const Dataset& dataset) const {
  return std::vector<std::optional<Vec6>>(dataset.samples.size(), Vec6::Zero().eval());
}

std::vector<std::optional<Vec6>> BiasPredictor::predict_series(const Dataset& dataset) const {
  return std::vector<std::optional<Vec6>>(dataset.samples.size(), model_.bias);
}

std::vector<std::optional<Vec6>> VectorSearchPredictor::predict_series(
    const Dataset& dataset) const {
  std::vector<std::optional<Vec6>> out(dataset.samples.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    out[i] = lookup(index_, dataset.samples[i].state);
  }
  return out;
}

}  // namespace forcesense
