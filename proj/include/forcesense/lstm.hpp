#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "forcesense/types.hpp"

namespace forcesense {

/// Parameters of one LSTM cell plus a scalar linear head. Gate weights are
/// packed in row blocks ordered i, f, g, o:
///   w_x = [W_i; W_f; W_g; W_o]  (4H x D)
///   w_h = [U_i; U_f; U_g; U_o]  (4H x H)
///   b   = [b_i; b_f; b_g; b_o]  (4H)
/// The head maps the final hidden state to a scalar: y = w_out . h + b_out.
struct LstmParams {
  Eigen::MatrixXd w_x;
  Eigen::MatrixXd w_h;
  Eigen::VectorXd b;
  Eigen::VectorXd w_out;
  double b_out = 0.0;

  int hidden() const { return static_cast<int>(w_h.cols()); }
  int input() const { return static_cast<int>(w_x.cols()); }

  static LstmParams zeros(int input_dim, int hidden_dim);

  /// Small uniform init; the forget-gate bias starts at 1 so early training
  /// does not wash out the cell state.
  static LstmParams init(int input_dim, int hidden_dim, std::mt19937_64& rng);

  // Gate views (blocks of the packed storage).
  auto w_i() { return w_x.topRows(hidden()); }
  auto w_f() { return w_x.middleRows(hidden(), hidden()); }
  auto w_g() { return w_x.middleRows(2 * hidden(), hidden()); }
  auto w_o() { return w_x.bottomRows(hidden()); }
  auto u_i() { return w_h.topRows(hidden()); }
  auto u_f() { return w_h.middleRows(hidden(), hidden()); }
  auto u_g() { return w_h.middleRows(2 * hidden(), hidden()); }
  auto u_o() { return w_h.bottomRows(hidden()); }
  auto b_i() { return b.head(hidden()); }
  auto b_f() { return b.segment(hidden(), hidden()); }
  auto b_g() { return b.segment(2 * hidden(), hidden()); }
  auto b_o() { return b.tail(hidden()); }

  auto w_i() const { return w_x.topRows(hidden()); }
  auto w_f() const { return w_x.middleRows(hidden(), hidden()); }
  auto w_g() const { return w_x.middleRows(2 * hidden(), hidden()); }
  auto w_o() const { return w_x.bottomRows(hidden()); }
  auto u_i() const { return w_h.topRows(hidden()); }
  auto u_f() const { return w_h.middleRows(hidden(), hidden()); }
  auto u_g() const { return w_h.middleRows(2 * hidden(), hidden()); }
  auto u_o() const { return w_h.bottomRows(hidden()); }
  auto b_i() const { return b.head(hidden()); }
  auto b_f() const { return b.segment(hidden(), hidden()); }
  auto b_g() const { return b.segment(2 * hidden(), hidden()); }
  auto b_o() const { return b.tail(hidden()); }

  std::size_t parameter_count() const;
  Eigen::VectorXd flatten() const;
  void set_from_flat(const Eigen::VectorXd& theta);
};

/// One cell update:
///   i = sig(W_i x + U_i h + b_i)    f = sig(W_f x + U_f h + b_f)
///   g = tanh(W_g x + U_g h + b_g)   o = sig(W_o x + U_o h + b_o)
///   c' = f.c + i.g                  h' = o.tanh(c')
void cell_step(const LstmParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
               const Eigen::VectorXd& c, Eigen::VectorXd& h_next, Eigen::VectorXd& c_next);

/// Per-step activations over a batch of windows, kept for backprop.
/// Every matrix is batch x hidden.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> gate_i, gate_f, gate_g, gate_o;
  std::vector<Eigen::MatrixXd> c, tanh_c, h;
  Eigen::VectorXd y;
};

/// Runs the recurrence from h = c = 0 over a window of length W for a batch
/// of windows. x_steps[t] is the batch x input matrix at window position t.
/// Returns the head output per batch row; fills `cache` when given.
Eigen::VectorXd forward_batch(const LstmParams& params,
                              const std::vector<Eigen::MatrixXd>& x_steps,
                              ForwardCache* cache);

/// Single-window convenience wrapper: rows of `window` are the W inputs.
double forward_window(const LstmParams& params, const Eigen::MatrixXd& window);

/// Squared-error loss; batch loss is the mean.
inline double loss(double pred, double target) {
  const double r = pred - target;
  return r * r;
}

/// Reverse accumulation through the unrolled recurrence. `dLdy` is the loss
/// gradient at the head output for each batch row. Returns exact gradients
/// for every parameter (same packing as LstmParams).
LstmParams backward_batch(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x_steps,
                          const ForwardCache& cache, const Eigen::VectorXd& dLdy);

/// Gradient of mean squared error over one batch of windows with targets.
/// Returns the batch loss and fills `grads`.
double loss_and_gradients(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x_steps,
                          const Eigen::VectorXd& targets, LstmParams& grads);

/// Adam with bias correction, operating on the flattened parameter vector.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  explicit AdamState(std::size_t n) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace forcesense
