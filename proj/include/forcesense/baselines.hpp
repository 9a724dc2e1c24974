#pragma once

#include <string>
#include <vector>

#include "forcesense/dataset.hpp"
#include "forcesense/predictor.hpp"
#include "forcesense/torque_predictor.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

/// Constant torque offset estimated from near-zero-velocity training samples.
struct BiasModel {
  Vec6 bias = Vec6::Zero();
  std::size_t n_samples_used = 0;
  double velocity_eps = 0.0;
};

/// bias = mean tau_measured over training samples with ||qd||_inf < velocity_eps.
/// Fails with a ConfigError if no sample qualifies.
BiasModel fit_bias(const Dataset& dataset, double velocity_eps);

/// Exact k-nearest-neighbour lookup over the training split. Keys are
/// z-score-normalized (q, qd) 12-vectors; values are the measured torques.
struct LookupIndex {
  Eigen::MatrixXd keys;     // N x 12, normalized
  Eigen::MatrixXd values;   // N x 6
  Eigen::VectorXd feature_means;
  Eigen::VectorXd feature_stds;
  int k = 1;
  std::vector<std::string> warnings;  // e.g. degenerate features clamped
};

LookupIndex build_index(const Dataset& dataset, int k);

/// Mean of the stored torques of the k nearest keys by Euclidean distance in
/// normalized feature space; distance ties broken by lower stored row index.
Vec6 lookup(const LookupIndex& index, const JointState& query);

// The four estimation methods behind the common predictor interface.

class MeasureOnlyPredictor final : public TorquePredictor {
 public:
  Method method() const override { return Method::MeasureOnly; }
  std::vector<std::optional<Vec6>> predict_series(const Dataset& dataset) const override;
};

class BiasPredictor final : public TorquePredictor {
 public:
  explicit BiasPredictor(BiasModel model) : model_(std::move(model)) {}
  Method method() const override { return Method::Bias; }
  std::vector<std::optional<Vec6>> predict_series(const Dataset& dataset) const override;
  const BiasModel& model() const { return model_; }

 private:
  BiasModel model_;
};

class VectorSearchPredictor final : public TorquePredictor {
 public:
  explicit VectorSearchPredictor(LookupIndex index) : index_(std::move(index)) {}
  Method method() const override { return Method::VectorSearch; }
  std::vector<std::optional<Vec6>> predict_series(const Dataset& dataset) const override;
  const LookupIndex& index() const { return index_; }

 private:
  LookupIndex index_;
};

class NnPredictor final : public TorquePredictor {
 public:
  explicit NnPredictor(JointModelSet models) : models_(std::move(models)) {}
  Method method() const override { return Method::Nn; }
  std::vector<std::optional<Vec6>> predict_series(const Dataset& dataset) const override {
    return nn_predict_series(models_, dataset);
  }
  const JointModelSet& models() const { return models_; }

 private:
  JointModelSet models_;
};

}  // namespace forcesense
