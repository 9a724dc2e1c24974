#include "doctest.h"

#include <cmath>
#include <random>

#include "forcesense/predictor.hpp"
#include "forcesense/trajectory.hpp"
#include "test_helpers.hpp"

using namespace forcesense;

namespace {

// Free-space dataset whose measured torque follows a known linear law
// tau_j = a q_j + b qd_j, assembled directly from a trajectory.
Dataset linear_law_dataset(double duration_s, double rate_hz, std::uint64_t seed,
                           double a = 2.0, double b = 0.8) {
  const auto chain = reference_chain();
  TrajectoryConfig cfg;
  cfg.duration_s = duration_s;
  cfg.rate_hz = rate_hz;
  cfg.n_harmonics = 2;
  cfg.max_velocity << 0.8, 0.8, 0.15, 1.2, 1.2, 1.2;
  cfg.seed = seed;
  cfg.dwell_s = 2.0;
  cfg.ramp_s = 2.0;
  const auto states = generate_freespace_trajectory(chain, cfg);

  Dataset ds;
  ds.rate_hz = rate_hz;
  ds.meta.profile = "synthetic";
  ds.samples.resize(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    ds.samples[i].state = states[i];
    for (int j = 0; j < kNumJoints; ++j) {
      ds.samples[i].tau_measured[j] = a * states[i].q[j] + b * states[i].qd[j];
    }
    ds.samples[i].tau_free_truth = ds.samples[i].tau_measured;
    ds.samples[i].jacobian = Mat6::Identity();
  }
  ds.partition = chronological_split(ds.samples.size());
  return ds;
}

PredictorConfig small_cfg() {
  PredictorConfig cfg;
  cfg.input_dim = 12;
  cfg.hidden_dim = 8;
  cfg.window_len = 5;
  cfg.adam.lr = 5e-3;
  cfg.batch_size = 64;
  cfg.max_epochs = 12;
  cfg.early_stop_patience = 3;
  cfg.seed = 97;
  return cfg;
}

}  // namespace

TEST_CASE("train: learns a linear torque law to under 5% of the target spread") {
  const Dataset ds = linear_law_dataset(600.0, 20.0, 3);
  const auto cfg = small_cfg();
  const JointModelSet models = train(ds, cfg);

  for (int j = 0; j < kNumJoints; ++j) {
    // Validation RMSE in torque units vs the target's standard deviation.
    double best_val = std::numeric_limits<double>::infinity();
    for (const auto& e : models.joints[j].history) best_val = std::min(best_val, e.val_loss);
    const double val_rmse = std::sqrt(best_val) * models.joints[j].out_std;

    double mean = 0.0, var = 0.0;
    for (const auto& s : ds.samples) mean += s.tau_measured[j];
    mean /= static_cast<double>(ds.samples.size());
    for (const auto& s : ds.samples) {
      var += (s.tau_measured[j] - mean) * (s.tau_measured[j] - mean);
    }
    var /= static_cast<double>(ds.samples.size());
    const double target_std = std::sqrt(var);

    INFO("joint ", j, ": val rmse ", val_rmse, " target std ", target_std);
    CHECK(val_rmse < 0.05 * target_std);
  }
}

TEST_CASE("train: deterministic, two runs produce bit-identical parameters") {
  const Dataset ds = linear_law_dataset(60.0, 20.0, 5);
  auto cfg = small_cfg();
  cfg.max_epochs = 3;
  const JointModelSet a = train(ds, cfg);
  const JointModelSet b = train(ds, cfg);
  for (int j = 0; j < kNumJoints; ++j) {
    CHECK((a.joints[j].params.flatten() - b.joints[j].params.flatten()).cwiseAbs().maxCoeff() ==
          0.0);
    REQUIRE(a.joints[j].history.size() == b.joints[j].history.size());
    for (std::size_t e = 0; e < a.joints[j].history.size(); ++e) {
      CHECK(a.joints[j].history[e].train_loss == b.joints[j].history[e].train_loss);
      CHECK(a.joints[j].history[e].val_loss == b.joints[j].history[e].val_loss);
    }
  }
}

TEST_CASE("train: six models share shapes and are mutually independent") {
  const Dataset ds = linear_law_dataset(60.0, 20.0, 7);
  auto cfg = small_cfg();
  cfg.max_epochs = 2;
  const JointModelSet models = train(ds, cfg);
  for (int j = 0; j < kNumJoints; ++j) {
    CHECK(models.joints[j].params.w_x.rows() == 4 * cfg.hidden_dim);
    CHECK(models.joints[j].params.w_x.cols() == cfg.input_dim);
    CHECK(models.joints[j].params.w_h.cols() == cfg.hidden_dim);
  }
  // Different joints see different targets, so their trained weights differ.
  CHECK((models.joints[0].params.flatten() - models.joints[1].params.flatten())
            .cwiseAbs()
            .maxCoeff() > 0.0);
}

TEST_CASE("train: patience 0 stops after the first non-improving epoch") {
  const Dataset ds = linear_law_dataset(30.0, 20.0, 9);
  auto cfg = small_cfg();
  cfg.adam.lr = 1000.0;  // guaranteed to diverge
  cfg.max_epochs = 10;
  cfg.early_stop_patience = 0;
  const JointModelSet models = train(ds, cfg);
  for (int j = 0; j < kNumJoints; ++j) {
    const auto& hist = models.joints[j].history;
    REQUIRE(!hist.empty());
    // find the first epoch whose validation loss did not improve
    double best = std::numeric_limits<double>::infinity();
    std::size_t stop_at = hist.size();
    for (std::size_t e = 0; e < hist.size(); ++e) {
      if (hist[e].val_loss < best) {
        best = hist[e].val_loss;
      } else {
        stop_at = e + 1;
        break;
      }
    }
    CHECK(hist.size() == stop_at);
  }
}

TEST_CASE("train: rejects contact datasets and too-small training splits") {
  Dataset contact_ds = linear_law_dataset(30.0, 20.0, 11);
  contact_ds.samples[5].contact_wrench_truth = Wrench::Zero();
  CHECK_THROWS_AS(train(contact_ds, small_cfg()), DataError);

  Dataset tiny = linear_law_dataset(30.0, 20.0, 13);
  tiny.samples.resize(10);
  tiny.partition = chronological_split(10);
  auto cfg = small_cfg();
  cfg.window_len = 8;  // train split has 8 samples < W+1
  CHECK_THROWS_AS(train(tiny, cfg), ConfigError);
}

TEST_CASE("predict_series: constant input gives constant output, warm-up is marked") {
  const Dataset base = linear_law_dataset(30.0, 20.0, 15);
  auto cfg = small_cfg();
  cfg.max_epochs = 2;
  const JointModelSet models = train(base, cfg);

  Dataset constant_ds = base;
  for (auto& s : constant_ds.samples) {
    s.state.q = Vec6::Constant(0.2);
    s.state.q[2] = 0.12;
    s.state.qd = Vec6::Zero();
  }
  const auto pred = nn_predict_series(models, constant_ds);
  REQUIRE(pred.size() == constant_ds.samples.size());
  for (int t = 0; t < cfg.window_len - 1; ++t) {
    CHECK(!pred[static_cast<std::size_t>(t)].has_value());
  }
  REQUIRE(pred[static_cast<std::size_t>(cfg.window_len - 1)].has_value());
  const Vec6 first = *pred[static_cast<std::size_t>(cfg.window_len - 1)];
  for (std::size_t t = cfg.window_len; t < pred.size(); ++t) {
    REQUIRE(pred[t].has_value());
    CHECK((*pred[t] - first).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("predict_series: causal, a future perturbation cannot change the present") {
  const Dataset base = linear_law_dataset(30.0, 20.0, 17);
  auto cfg = small_cfg();
  cfg.max_epochs = 2;
  const JointModelSet models = train(base, cfg);

  const auto pred_clean = nn_predict_series(models, base);
  Dataset perturbed = base;
  const std::size_t t = 100;
  perturbed.samples[t + 1].state.q = Vec6::Constant(1.0);
  perturbed.samples[t + 1].state.qd = Vec6::Constant(0.5);
  const auto pred_perturbed = nn_predict_series(models, perturbed);

  REQUIRE(pred_clean[t].has_value());
  REQUIRE(pred_perturbed[t].has_value());
  CHECK((*pred_clean[t] - *pred_perturbed[t]).cwiseAbs().maxCoeff() == 0.0);
  // and the perturbation is visible strictly after t
  bool differs_later = false;
  for (std::size_t s = t + 1; s < pred_clean.size(); ++s) {
    if ((*pred_clean[s] - *pred_perturbed[s]).cwiseAbs().maxCoeff() > 0.0) {
      differs_later = true;
      break;
    }
  }
  CHECK(differs_later);
}

TEST_CASE("model serialization: JSON round-trip preserves parameters bit-for-bit") {
  const Dataset ds = linear_law_dataset(30.0, 20.0, 19);
  auto cfg = small_cfg();
  cfg.max_epochs = 2;
  const JointModelSet models = train(ds, cfg);

  const auto j = model_to_json(models);
  const JointModelSet back = model_from_json(j);
  CHECK(back.cfg.hidden_dim == cfg.hidden_dim);
  CHECK(back.cfg.window_len == cfg.window_len);
  for (int jj = 0; jj < kNumJoints; ++jj) {
    CHECK((models.joints[jj].params.flatten() - back.joints[jj].params.flatten())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((models.joints[jj].input_norm.mean - back.joints[jj].input_norm.mean)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(models.joints[jj].out_mean == back.joints[jj].out_mean);
    CHECK(models.joints[jj].out_std == back.joints[jj].out_std);
    REQUIRE(models.joints[jj].history.size() == back.joints[jj].history.size());
  }

  // Reloaded parameters reproduce the recorded best validation loss.
  for (int jj = 0; jj < kNumJoints; ++jj) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : models.joints[jj].history) best = std::min(best, e.val_loss);
    const double replayed = validation_loss(back, ds, jj);
    CHECK(std::abs(replayed - best) < 1e-9);
  }
}
