#include "forcesense/lstm.hpp"

#include <cmath>

namespace forcesense {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams LstmParams::zeros(int input_dim, int hidden_dim) {
  LstmParams p;
  p.w_x = Eigen::MatrixXd::Zero(4 * hidden_dim, input_dim);
  p.w_h = Eigen::MatrixXd::Zero(4 * hidden_dim, hidden_dim);
  p.b = Eigen::VectorXd::Zero(4 * hidden_dim);
  p.w_out = Eigen::VectorXd::Zero(hidden_dim);
  p.b_out = 0.0;
  return p;
}

LstmParams LstmParams::init(int input_dim, int hidden_dim, std::mt19937_64& rng) {
  LstmParams p = zeros(input_dim, hidden_dim);
  const double rx = 1.0 / std::sqrt(static_cast<double>(input_dim));
  const double rh = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  std::uniform_real_distribution<double> ux(-rx, rx);
  std::uniform_real_distribution<double> uh(-rh, rh);
  for (Eigen::Index j = 0; j < p.w_x.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.w_x.rows(); ++i) p.w_x(i, j) = ux(rng);
  }
  for (Eigen::Index j = 0; j < p.w_h.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.w_h.rows(); ++i) p.w_h(i, j) = uh(rng);
  }
  for (Eigen::Index i = 0; i < p.w_out.size(); ++i) p.w_out[i] = uh(rng);
  p.b_f().setConstant(1.0);
  return p;
}

std::size_t LstmParams::parameter_count() const {
  return static_cast<std::size_t>(w_x.size() + w_h.size() + b.size() + w_out.size()) + 1;
}

Eigen::VectorXd LstmParams::flatten() const {
  Eigen::VectorXd theta(parameter_count());
  Eigen::Index o = 0;
  theta.segment(o, w_x.size()) = Eigen::Map<const Eigen::VectorXd>(w_x.data(), w_x.size());
  o += w_x.size();
  theta.segment(o, w_h.size()) = Eigen::Map<const Eigen::VectorXd>(w_h.data(), w_h.size());
  o += w_h.size();
  theta.segment(o, b.size()) = b;
  o += b.size();
  theta.segment(o, w_out.size()) = w_out;
  o += w_out.size();
  theta[o] = b_out;
  return theta;
}

void LstmParams::set_from_flat(const Eigen::VectorXd& theta) {
  Eigen::Index o = 0;
  Eigen::Map<Eigen::VectorXd>(w_x.data(), w_x.size()) = theta.segment(o, w_x.size());
  o += w_x.size();
  Eigen::Map<Eigen::VectorXd>(w_h.data(), w_h.size()) = theta.segment(o, w_h.size());
  o += w_h.size();
  b = theta.segment(o, b.size());
  o += b.size();
  w_out = theta.segment(o, w_out.size());
  o += w_out.size();
  b_out = theta[o];
}

void cell_step(const LstmParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
               const Eigen::VectorXd& c, Eigen::VectorXd& h_next, Eigen::VectorXd& c_next) {
  const int H = params.hidden();
  if (x.size() != params.input() || h.size() != H || c.size() != H) {
    throw NumericError("cell_step: input/state shape mismatch");
  }
  const Eigen::VectorXd a = params.w_x * x + params.w_h * h + params.b;
  c_next.resize(H);
  h_next.resize(H);
  for (int k = 0; k < H; ++k) {
    const double gi = sigmoid(a[k]);
    const double gf = sigmoid(a[H + k]);
    const double gg = std::tanh(a[2 * H + k]);
    const double go = sigmoid(a[3 * H + k]);
    c_next[k] = gf * c[k] + gi * gg;
    h_next[k] = go * std::tanh(c_next[k]);
  }
}

Eigen::VectorXd forward_batch(const LstmParams& params,
                              const std::vector<Eigen::MatrixXd>& x_steps,
                              ForwardCache* cache) {
  const int H = params.hidden();
  if (x_steps.empty()) {
    throw NumericError("forward_batch: empty window");
  }
  const Eigen::Index B = x_steps[0].rows();
  const std::size_t W = x_steps.size();

  if (cache) {
    cache->gate_i.assign(W, {});
    cache->gate_f.assign(W, {});
    cache->gate_g.assign(W, {});
    cache->gate_o.assign(W, {});
    cache->c.assign(W, {});
    cache->tanh_c.assign(W, {});
    cache->h.assign(W, {});
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(B, H);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(B, H);
  Eigen::MatrixXd a(B, 4 * H);

  for (std::size_t t = 0; t < W; ++t) {
    if (x_steps[t].cols() != params.input() || x_steps[t].rows() != B) {
      throw NumericError("forward_batch: window step shape mismatch");
    }
    a.noalias() = x_steps[t] * params.w_x.transpose();
    a.noalias() += h * params.w_h.transpose();
    a.rowwise() += params.b.transpose();

    Eigen::MatrixXd gi = a.leftCols(H).unaryExpr([](double v) { return sigmoid(v); });
    Eigen::MatrixXd gf = a.middleCols(H, H).unaryExpr([](double v) { return sigmoid(v); });
    Eigen::MatrixXd gg = a.middleCols(2 * H, H).array().tanh().matrix();
    Eigen::MatrixXd go = a.rightCols(H).unaryExpr([](double v) { return sigmoid(v); });

    c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    Eigen::MatrixXd tc = c.array().tanh().matrix();
    h = go.cwiseProduct(tc);

    if (cache) {
      cache->gate_i[t] = std::move(gi);
      cache->gate_f[t] = std::move(gf);
      cache->gate_g[t] = std::move(gg);
      cache->gate_o[t] = std::move(go);
      cache->c[t] = c;
      cache->tanh_c[t] = std::move(tc);
      cache->h[t] = h;
    }
  }

  Eigen::VectorXd y = (h * params.w_out).array() + params.b_out;
  if (cache) cache->y = y;
  return y;
}

double forward_window(const LstmParams& params, const Eigen::MatrixXd& window) {
  std::vector<Eigen::MatrixXd> steps(static_cast<std::size_t>(window.rows()));
  for (Eigen::Index t = 0; t < window.rows(); ++t) {
    steps[static_cast<std::size_t>(t)] = window.row(t);
  }
  return forward_batch(params, steps, nullptr)[0];
}

LstmParams backward_batch(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x_steps,
                          const ForwardCache& cache, const Eigen::VectorXd& dLdy) {
  const int H = params.hidden();
  const std::size_t W = x_steps.size();
  const Eigen::Index B = x_steps[0].rows();

  LstmParams g = LstmParams::zeros(params.input(), H);

  // Head.
  g.w_out.noalias() = cache.h[W - 1].transpose() * dLdy;
  g.b_out = dLdy.sum();

  Eigen::MatrixXd dh = dLdy * params.w_out.transpose();  // B x H
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(B, H);
  Eigen::MatrixXd da(B, 4 * H);

  for (std::size_t t = W; t-- > 0;) {
    const Eigen::MatrixXd& gi = cache.gate_i[t];
    const Eigen::MatrixXd& gf = cache.gate_f[t];
    const Eigen::MatrixXd& gg = cache.gate_g[t];
    const Eigen::MatrixXd& go = cache.gate_o[t];
    const Eigen::MatrixXd& tc = cache.tanh_c[t];

    // h = o.tanh(c):   dL/do, then dL/dc via the tanh path.
    const Eigen::MatrixXd do_ = dh.cwiseProduct(tc);
    dc += dh.cwiseProduct(go).cwiseProduct(
        (1.0 - tc.array().square()).matrix());

    // c = f.c_prev + i.g
    const Eigen::MatrixXd c_prev =
        (t == 0) ? Eigen::MatrixXd::Zero(B, H) : cache.c[t - 1];
    const Eigen::MatrixXd di = dc.cwiseProduct(gg);
    const Eigen::MatrixXd df = dc.cwiseProduct(c_prev);
    const Eigen::MatrixXd dg = dc.cwiseProduct(gi);

    // pre-activation gradients
    da.leftCols(H) = di.cwiseProduct(gi).cwiseProduct((1.0 - gi.array()).matrix());
    da.middleCols(H, H) = df.cwiseProduct(gf).cwiseProduct((1.0 - gf.array()).matrix());
    da.middleCols(2 * H, H) = dg.cwiseProduct((1.0 - gg.array().square()).matrix());
    da.rightCols(H) = do_.cwiseProduct(go).cwiseProduct((1.0 - go.array()).matrix());

    const Eigen::MatrixXd h_prev =
        (t == 0) ? Eigen::MatrixXd::Zero(B, H) : cache.h[t - 1];
    g.w_x.noalias() += da.transpose() * x_steps[t];
    g.w_h.noalias() += da.transpose() * h_prev;
    g.b += da.colwise().sum().transpose();

    dh.noalias() = da * params.w_h;
    dc = dc.cwiseProduct(gf);
  }
  return g;
}

double loss_and_gradients(const LstmParams& params, const std::vector<Eigen::MatrixXd>& x_steps,
                          const Eigen::VectorXd& targets, LstmParams& grads) {
  ForwardCache cache;
  const Eigen::VectorXd y = forward_batch(params, x_steps, &cache);
  const Eigen::Index B = y.size();
  const Eigen::VectorXd r = y - targets;
  const double batch_loss = r.squaredNorm() / static_cast<double>(B);
  const Eigen::VectorXd dLdy = 2.0 * r / static_cast<double>(B);
  grads = backward_batch(params, x_steps, cache, dLdy);
  return batch_loss;
}

void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad, AdamState& state,
               const AdamConfig& cfg) {
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  theta.array() -= cfg.lr * (state.m.array() / bc1) /
                   ((state.v.array() / bc2).sqrt() + cfg.eps);
}

}  // namespace forcesense
