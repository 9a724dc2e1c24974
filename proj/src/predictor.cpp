#include "forcesense/predictor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

namespace forcesense {

namespace {

Eigen::MatrixXd feature_matrix(const Dataset& ds, int input_dim, int joint) {
  const auto n = static_cast<Eigen::Index>(ds.samples.size());
  Eigen::MatrixXd f(n, input_dim);
  for (Eigen::Index t = 0; t < n; ++t) {
    f.row(t) = sample_features(ds.samples[static_cast<std::size_t>(t)], input_dim, joint).transpose();
  }
  return f;
}

// Window indices whose full W-sample history stays inside [begin, end).
std::vector<Eigen::Index> window_ends(std::size_t begin, std::size_t end, int window_len) {
  std::vector<Eigen::Index> idx;
  const auto first = static_cast<long long>(begin) + window_len - 1;
  for (long long t = first; t < static_cast<long long>(end); ++t) {
    idx.push_back(static_cast<Eigen::Index>(t));
  }
  return idx;
}

void gather_windows(const Eigen::MatrixXd& features, const std::vector<Eigen::Index>& ends,
                    std::size_t lo, std::size_t hi, int window_len,
                    std::vector<Eigen::MatrixXd>& x_steps) {
  const auto batch = static_cast<Eigen::Index>(hi - lo);
  const int d = static_cast<int>(features.cols());
  x_steps.assign(static_cast<std::size_t>(window_len), Eigen::MatrixXd(batch, d));
  for (std::size_t b = lo; b < hi; ++b) {
    const Eigen::Index end = ends[b];
    for (int w = 0; w < window_len; ++w) {
      x_steps[static_cast<std::size_t>(w)].row(static_cast<Eigen::Index>(b - lo)) =
          features.row(end - window_len + 1 + w);
    }
  }
}

double batched_loss(const LstmParams& params, const Eigen::MatrixXd& features,
                    const Eigen::VectorXd& targets, const std::vector<Eigen::Index>& ends,
                    int window_len) {
  constexpr std::size_t kChunk = 512;
  double se = 0.0;
  std::vector<Eigen::MatrixXd> x_steps;
  for (std::size_t lo = 0; lo < ends.size(); lo += kChunk) {
    const std::size_t hi = std::min(ends.size(), lo + kChunk);
    gather_windows(features, ends, lo, hi, window_len, x_steps);
    const Eigen::VectorXd y = forward_batch(params, x_steps, nullptr);
    for (std::size_t b = lo; b < hi; ++b) {
      se += loss(y[static_cast<Eigen::Index>(b - lo)], targets[ends[b]]);
    }
  }
  return se / static_cast<double>(ends.size());
}

JointModel train_one_joint(const Dataset& dataset, const PredictorConfig& cfg, int joint) {
  const auto& part = dataset.partition;
  const int W = cfg.window_len;

  JointModel model;

  // Normalization statistics from the training split only.
  Eigen::MatrixXd raw = feature_matrix(dataset, cfg.input_dim, joint);
  model.input_norm = Normalizer::fit(raw.topRows(static_cast<Eigen::Index>(part.train_end)));

  Eigen::VectorXd targets_raw(static_cast<Eigen::Index>(dataset.samples.size()));
  for (std::size_t t = 0; t < dataset.samples.size(); ++t) {
    targets_raw[static_cast<Eigen::Index>(t)] = dataset.samples[t].tau_measured[joint];
  }
  const auto train_targets = targets_raw.head(static_cast<Eigen::Index>(part.train_end));
  model.out_mean = train_targets.mean();
  const double var =
      (train_targets.array() - model.out_mean).square().sum() / static_cast<double>(part.train_end);
  model.out_std = std::sqrt(var);
  if (!(model.out_std > 0.0)) model.out_std = 1.0;

  Eigen::MatrixXd features = raw;
  features.rowwise() -= model.input_norm.mean.transpose();
  features.array().rowwise() /= model.input_norm.std.transpose().array();
  const Eigen::VectorXd targets = (targets_raw.array() - model.out_mean) / model.out_std;

  const auto train_idx_all = window_ends(0, part.train_end, W);
  const auto val_idx = window_ends(part.train_end, part.val_end, W);

  std::mt19937_64 rng(derive_seed(cfg.seed, "train-joint-" + std::to_string(joint)));
  LstmParams params = LstmParams::init(cfg.input_dim, cfg.hidden_dim, rng);
  Eigen::VectorXd theta = params.flatten();
  AdamState adam(params.parameter_count());

  std::vector<Eigen::Index> order = train_idx_all;
  std::vector<Eigen::MatrixXd> x_steps;
  LstmParams grads = LstmParams::zeros(cfg.input_dim, cfg.hidden_dim);

  double best_val = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta = theta;
  int stall = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);

    double train_se = 0.0;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t lo = 0; lo < order.size(); lo += batch) {
      const std::size_t hi = std::min(order.size(), lo + batch);
      gather_windows(features, order, lo, hi, W, x_steps);
      Eigen::VectorXd batch_targets(static_cast<Eigen::Index>(hi - lo));
      for (std::size_t b = lo; b < hi; ++b) {
        batch_targets[static_cast<Eigen::Index>(b - lo)] = targets[order[b]];
      }
      const double batch_loss = loss_and_gradients(params, x_steps, batch_targets, grads);
      train_se += batch_loss * static_cast<double>(hi - lo);

      adam_step(theta, grads.flatten(), adam, cfg.adam);
      params.set_from_flat(theta);
    }

    EpochStats stats;
    stats.train_loss = train_se / static_cast<double>(order.size());
    stats.val_loss = batched_loss(params, features, targets, val_idx, W);
    model.history.push_back(stats);

    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best_theta = theta;
      stall = 0;
    } else {
      ++stall;
      if (stall > cfg.early_stop_patience) break;
    }
  }

  params.set_from_flat(best_theta);
  model.params = std::move(params);
  return model;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& arr, Eigen::Index rows,
                                 Eigen::Index cols, const char* what) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols) {
    throw DataError(std::string("model: field ") + what + " has the wrong size");
  }
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr[static_cast<std::size_t>(k++)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, Eigen::Index n, const char* what) {
  return matrix_from_json(arr, n, 1, what).col(0);
}

}  // namespace

Normalizer Normalizer::fit(const Eigen::MatrixXd& rows) {
  Normalizer n;
  const auto count = static_cast<double>(rows.rows());
  n.mean = rows.colwise().mean().transpose();
  n.std.resize(rows.cols());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    const double var = (rows.col(c).array() - n.mean[c]).square().sum() / count;
    const double s = std::sqrt(var);
    n.std[c] = s > 0.0 ? s : 1.0;  // constant feature: pass through unscaled
  }
  return n;
}

void PredictorConfig::validate() const {
  if (input_dim != 12 && input_dim != 2) {
    throw ConfigError("predictor: input_dim must be 12 or 2");
  }
  if (hidden_dim < 1) throw ConfigError("predictor: hidden_dim must be >= 1");
  if (window_len < 1) throw ConfigError("predictor: window_len must be >= 1");
  if (batch_size < 1) throw ConfigError("predictor: batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("predictor: max_epochs must be >= 1");
  if (early_stop_patience < 0) throw ConfigError("predictor: early_stop_patience must be >= 0");
  if (!(adam.lr > 0.0)) throw ConfigError("predictor: learning rate must be positive");
}

double JointModel::predict(const Eigen::MatrixXd& raw_window) const {
  Eigen::MatrixXd win = raw_window;
  win.rowwise() -= input_norm.mean.transpose();
  win.array().rowwise() /= input_norm.std.transpose().array();
  return out_mean + out_std * forward_window(params, win);
}

Eigen::VectorXd sample_features(const Sample& sample, int input_dim, int joint) {
  if (input_dim == 2) {
    Eigen::VectorXd f(2);
    f << sample.state.q[joint], sample.state.qd[joint];
    return f;
  }
  Eigen::VectorXd f(12);
  f << sample.state.q, sample.state.qd;
  return f;
}

JointModelSet train(const Dataset& dataset, const PredictorConfig& cfg) {
  cfg.validate();
  if (dataset.has_contact()) {
    throw DataError("train: expected a free-space dataset (contact samples present)");
  }
  const auto& part = dataset.partition;
  if (part.train_size() < static_cast<std::size_t>(cfg.window_len) + 1) {
    throw ConfigError("train: fewer than window_len+1 training samples");
  }
  if (part.val_size() < static_cast<std::size_t>(cfg.window_len)) {
    throw ConfigError("train: validation split shorter than one window");
  }

  JointModelSet set;
  set.cfg = cfg;

  // The six trainings are independent; spread them over the available cores.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(kNumJoints, hw);
  if (workers <= 1) {
    for (int j = 0; j < kNumJoints; ++j) set.joints[j] = train_one_joint(dataset, cfg, j);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          const int j = next.fetch_add(1);
          if (j >= kNumJoints) return;
          set.joints[j] = train_one_joint(dataset, cfg, j);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return set;
}

double validation_loss(const JointModelSet& models, const Dataset& dataset, int joint) {
  const auto& cfg = models.cfg;
  const auto& model = models.joints[joint];
  const auto& part = dataset.partition;

  Eigen::MatrixXd features = feature_matrix(dataset, cfg.input_dim, joint);
  features.rowwise() -= model.input_norm.mean.transpose();
  features.array().rowwise() /= model.input_norm.std.transpose().array();

  Eigen::VectorXd targets(static_cast<Eigen::Index>(dataset.samples.size()));
  for (std::size_t t = 0; t < dataset.samples.size(); ++t) {
    targets[static_cast<Eigen::Index>(t)] =
        (dataset.samples[t].tau_measured[joint] - model.out_mean) / model.out_std;
  }
  const auto val_idx = window_ends(part.train_end, part.val_end, cfg.window_len);
  if (val_idx.empty()) {
    throw DataError("validation_loss: validation split shorter than one window");
  }
  return batched_loss(model.params, features, targets, val_idx, cfg.window_len);
}

std::vector<std::optional<Vec6>> nn_predict_series(const JointModelSet& models,
                                                   const Dataset& dataset) {
  const int W = models.cfg.window_len;
  const auto n = dataset.samples.size();
  std::vector<std::optional<Vec6>> out(n);
  if (n < static_cast<std::size_t>(W)) return out;

  const auto ends = window_ends(0, n, W);
  Eigen::MatrixXd pred(static_cast<Eigen::Index>(ends.size()), kNumJoints);

  for (int j = 0; j < kNumJoints; ++j) {
    const auto& model = models.joints[j];
    Eigen::MatrixXd features = feature_matrix(dataset, models.cfg.input_dim, j);
    features.rowwise() -= model.input_norm.mean.transpose();
    features.array().rowwise() /= model.input_norm.std.transpose().array();

    constexpr std::size_t kChunk = 512;
    std::vector<Eigen::MatrixXd> x_steps;
    for (std::size_t lo = 0; lo < ends.size(); lo += kChunk) {
      const std::size_t hi = std::min(ends.size(), lo + kChunk);
      gather_windows(features, ends, lo, hi, W, x_steps);
      const Eigen::VectorXd y = forward_batch(model.params, x_steps, nullptr);
      for (std::size_t b = lo; b < hi; ++b) {
        pred(static_cast<Eigen::Index>(b), j) =
            model.out_mean + model.out_std * y[static_cast<Eigen::Index>(b - lo)];
      }
    }
  }

  for (std::size_t b = 0; b < ends.size(); ++b) {
    Vec6 tau;
    for (int j = 0; j < kNumJoints; ++j) tau[j] = pred(static_cast<Eigen::Index>(b), j);
    out[static_cast<std::size_t>(ends[b])] = tau;
  }
  return out;
}

nlohmann::json model_to_json(const JointModelSet& models) {
  const auto& cfg = models.cfg;
  nlohmann::json j;
  j["format_version"] = 1;
  j["config"] = {
      {"input_dim", cfg.input_dim},
      {"hidden_dim", cfg.hidden_dim},
      {"window_len", cfg.window_len},
      {"optimizer",
       {{"kind", "adam"},
        {"lr", cfg.adam.lr},
        {"betas", {cfg.adam.beta1, cfg.adam.beta2}},
        {"eps", cfg.adam.eps}}},
      {"batch_size", cfg.batch_size},
      {"max_epochs", cfg.max_epochs},
      {"early_stop_patience", cfg.early_stop_patience},
      {"seed", cfg.seed},
  };

  nlohmann::json joints = nlohmann::json::array();
  for (const auto& m : models.joints) {
    const LstmParams& p = m.params;
    nlohmann::json mj;
    mj["input_mean"] = matrix_to_json(m.input_norm.mean);
    mj["input_std"] = matrix_to_json(m.input_norm.std);
    mj["output_mean"] = m.out_mean;
    mj["output_std"] = m.out_std;
    mj["W_i"] = matrix_to_json(p.w_i());
    mj["W_f"] = matrix_to_json(p.w_f());
    mj["W_g"] = matrix_to_json(p.w_g());
    mj["W_o"] = matrix_to_json(p.w_o());
    mj["U_i"] = matrix_to_json(p.u_i());
    mj["U_f"] = matrix_to_json(p.u_f());
    mj["U_g"] = matrix_to_json(p.u_g());
    mj["U_o"] = matrix_to_json(p.u_o());
    mj["b_i"] = matrix_to_json(p.b_i());
    mj["b_f"] = matrix_to_json(p.b_f());
    mj["b_g"] = matrix_to_json(p.b_g());
    mj["b_o"] = matrix_to_json(p.b_o());
    mj["W_out"] = matrix_to_json(p.w_out);
    mj["b_out"] = p.b_out;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& e : m.history) {
      hist.push_back({{"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
    }
    mj["history"] = hist;
    joints.push_back(std::move(mj));
  }
  j["joints"] = std::move(joints);
  return j;
}

JointModelSet model_from_json(const nlohmann::json& j) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1) {
    throw DataError("model: unsupported or missing format_version");
  }
  JointModelSet set;
  const auto& cj = j.at("config");
  set.cfg.input_dim = cj.at("input_dim").get<int>();
  set.cfg.hidden_dim = cj.at("hidden_dim").get<int>();
  set.cfg.window_len = cj.at("window_len").get<int>();
  const auto& oj = cj.at("optimizer");
  if (oj.at("kind").get<std::string>() != "adam") {
    throw DataError("model: unknown optimizer kind");
  }
  set.cfg.adam.lr = oj.at("lr").get<double>();
  set.cfg.adam.beta1 = oj.at("betas").at(0).get<double>();
  set.cfg.adam.beta2 = oj.at("betas").at(1).get<double>();
  set.cfg.adam.eps = oj.at("eps").get<double>();
  set.cfg.batch_size = cj.at("batch_size").get<int>();
  set.cfg.max_epochs = cj.at("max_epochs").get<int>();
  set.cfg.early_stop_patience = cj.at("early_stop_patience").get<int>();
  set.cfg.seed = cj.at("seed").get<std::uint64_t>();
  set.cfg.validate();

  const int D = set.cfg.input_dim;
  const int H = set.cfg.hidden_dim;
  const auto& joints = j.at("joints");
  if (!joints.is_array() || joints.size() != kNumJoints) {
    throw DataError("model: expected exactly six joint models");
  }
  for (int jj = 0; jj < kNumJoints; ++jj) {
    const auto& mj = joints[static_cast<std::size_t>(jj)];
    JointModel& m = set.joints[jj];
    m.input_norm.mean = vector_from_json(mj.at("input_mean"), D, "input_mean");
    m.input_norm.std = vector_from_json(mj.at("input_std"), D, "input_std");
    m.out_mean = mj.at("output_mean").get<double>();
    m.out_std = mj.at("output_std").get<double>();
    m.params = LstmParams::zeros(D, H);
    m.params.w_i() = matrix_from_json(mj.at("W_i"), H, D, "W_i");
    m.params.w_f() = matrix_from_json(mj.at("W_f"), H, D, "W_f");
    m.params.w_g() = matrix_from_json(mj.at("W_g"), H, D, "W_g");
    m.params.w_o() = matrix_from_json(mj.at("W_o"), H, D, "W_o");
    m.params.u_i() = matrix_from_json(mj.at("U_i"), H, H, "U_i");
    m.params.u_f() = matrix_from_json(mj.at("U_f"), H, H, "U_f");
    m.params.u_g() = matrix_from_json(mj.at("U_g"), H, H, "U_g");
    m.params.u_o() = matrix_from_json(mj.at("U_o"), H, H, "U_o");
    m.params.b_i() = vector_from_json(mj.at("b_i"), H, "b_i");
    m.params.b_f() = vector_from_json(mj.at("b_f"), H, "b_f");
    m.params.b_g() = vector_from_json(mj.at("b_g"), H, "b_g");
    m.params.b_o() = vector_from_json(mj.at("b_o"), H, "b_o");
    m.params.w_out = vector_from_json(mj.at("W_out"), H, "W_out");
    m.params.b_out = mj.at("b_out").get<double>();
    for (const auto& e : mj.at("history")) {
      m.history.push_back({e.at("train_loss").get<double>(), e.at("val_loss").get<double>()});
    }
  }
  return set;
}

void save_model(const JointModelSet& models, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("save_model: cannot open '" + path + "'");
  f << model_to_json(models).dump(2) << "\n";
  if (!f) throw DataError("save_model: write to '" + path + "' failed");
}

JointModelSet load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("load_model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("load_model: " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace forcesense
