#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forcesense/dataset.hpp"
#include "forcesense/lstm.hpp"
#include "forcesense/types.hpp"

#include "json.hpp"

namespace forcesense {

/// Per-feature z-score statistics, fitted on the training split only.
struct Normalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;

  static Normalizer fit(const Eigen::MatrixXd& rows);

  Eigen::VectorXd normalize(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseQuotient(std);
  }
  Eigen::VectorXd denormalize(const Eigen::VectorXd& z) const {
    return z.cwiseProduct(std) + mean;
  }
};

struct PredictorConfig {
  int input_dim = 12;     // 12 = all joint positions + velocities; 2 = own joint only
  int hidden_dim = 16;
  int window_len = 10;
  AdamConfig adam;
  int batch_size = 64;
  int max_epochs = 10;
  int early_stop_patience = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
};

/// One joint's trained network plus the statistics needed to map between
/// engineering units and the normalized training space.
struct JointModel {
  LstmParams params;
  Normalizer input_norm;
  double out_mean = 0.0;
  double out_std = 1.0;
  std::vector<EpochStats> history;

  /// Window rows are raw (un-normalized) feature vectors; result is in
  /// torque units.
  double predict(const Eigen::MatrixXd& raw_window) const;
};

struct JointModelSet {
  PredictorConfig cfg;
  std::array<JointModel, kNumJoints> joints;
};

/// Input features for one sample: all 12 (q, qd) entries, or the joint's own
/// (q_j, qd_j) pair when input_dim == 2.
Eigen::VectorXd sample_features(const Sample& sample, int input_dim, int joint);

/// Trains the six per-joint networks on the free-space dataset: z-score
/// normalization from the train split, sliding windows of length W with
/// stride 1 (windows kept inside their split), Adam on mean L2 loss, early
/// stopping on validation loss, best-validation parameters retained.
/// Deterministic given (dataset, cfg).
JointModelSet train(const Dataset& dataset, const PredictorConfig& cfg);

/// Mean normalized L2 loss of a model set over a dataset's validation-split
/// windows, for one joint. Matches the quantity recorded in the history.
double validation_loss(const JointModelSet& models, const Dataset& dataset, int joint);

/// Per-timestep torque predictions over a dataset. Timesteps before the
/// first full window (t < W-1) have no prediction.
std::vector<std::optional<Vec6>> nn_predict_series(const JointModelSet& models,
                                                   const Dataset& dataset);

/// Model serialization: single JSON document, format-versioned, matrices in
/// row-major order.
nlohmann::json model_to_json(const JointModelSet& models);
JointModelSet model_from_json(const nlohmann::json& j);
void save_model(const JointModelSet& models, const std::string& path);
JointModelSet load_model(const std::string& path);

}  // namespace forcesense
