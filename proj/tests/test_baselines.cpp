#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "forcesense/baselines.hpp"
#include "test_helpers.hpp"

using namespace forcesense;

namespace {

Dataset dataset_from_samples(std::vector<Sample> samples, double rate_hz = 100.0) {
  Dataset ds;
  ds.samples = std::move(samples);
  ds.rate_hz = rate_hz;
  ds.partition = chronological_split(ds.samples.size());
  return ds;
}

Sample make_sample(double t, const Vec6& q, const Vec6& qd, const Vec6& tau) {
  Sample s;
  s.state.t = t;
  s.state.q = q;
  s.state.qd = qd;
  s.tau_measured = tau;
  s.tau_free_truth = tau;
  s.jacobian = Mat6::Identity();
  return s;
}

// Independent brute-force oracle: full sort by (distance, row), scalar
// distance accumulation in feature order.
Vec6 knn_oracle(const LookupIndex& index, const JointState& query) {
  Eigen::Matrix<double, 12, 1> qv;
  qv.head<6>() = query.q;
  qv.tail<6>() = query.qd;
  for (int c = 0; c < 12; ++c) {
    qv[c] = (qv[c] - index.feature_means[c]) / index.feature_stds[c];
  }
  struct Entry {
    double d;
    Eigen::Index row;
  };
  std::vector<Entry> entries;
  for (Eigen::Index r = 0; r < index.keys.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < 12; ++c) {
      const double diff = index.keys(r, c) - qv[c];
      s += diff * diff;
    }
    entries.push_back({s, r});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.d < b.d || (a.d == b.d && a.row < b.row);
  });
  Vec6 sum = Vec6::Zero();
  for (int i = 0; i < index.k; ++i) {
    sum += index.values.row(entries[static_cast<std::size_t>(i)].row).transpose();
  }
  return sum / static_cast<double>(index.k);
}

std::vector<Sample> random_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    Vec6 q, qd, tau;
    for (int j = 0; j < 6; ++j) {
      q[j] = u(rng);
      qd[j] = u(rng);
      tau[j] = u(rng);
    }
    samples.push_back(make_sample(0.01 * static_cast<double>(i), q, qd, tau));
  }
  return samples;
}

}  // namespace

TEST_CASE("measurement-only predictor returns the zero torque everywhere") {
  const Dataset ds = dataset_from_samples(random_samples(25, 1));
  MeasureOnlyPredictor p;
  const auto series = p.predict_series(ds);
  REQUIRE(series.size() == 25);
  for (const auto& tau : series) {
    REQUIRE(tau.has_value());
    CHECK(tau->cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(p.method() == Method::MeasureOnly);
}

TEST_CASE("fit_bias: exact recovery of a constant bias from dwell samples") {
  const Vec6 b = (Vec6() << 0.5, -0.25, 1.0, 0.125, -0.5, 0.75).finished();
  std::vector<Sample> samples;
  for (int i = 0; i < 40; ++i) {
    const bool dwell = i < 10;
    Vec6 qd = dwell ? Vec6::Zero() : Vec6::Constant(0.3);
    samples.push_back(make_sample(0.01 * i, Vec6::Constant(0.1), qd,
                                  dwell ? b : (b + Vec6::Constant(2.0)).eval()));
  }
  const Dataset ds = dataset_from_samples(std::move(samples));
  const BiasModel model = fit_bias(ds, 1e-3);
  CHECK(model.n_samples_used == 10);
  CHECK((model.bias - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_bias: two symmetric dwell segments average to the true bias") {
  const double base = 0.5, delta = 0.125;
  std::vector<Sample> samples;
  for (int i = 0; i < 10; ++i) {
    samples.push_back(make_sample(0.01 * i, Vec6::Zero(), Vec6::Zero(),
                                  Vec6::Constant(base + delta)));
  }
  for (int i = 10; i < 20; ++i) {
    samples.push_back(make_sample(0.01 * i, Vec6::Zero(), Vec6::Zero(),
                                  Vec6::Constant(base - delta)));
  }
  for (int i = 20; i < 25; ++i) {  // moving tail so the dwells sit in train
    samples.push_back(make_sample(0.01 * i, Vec6::Zero(), Vec6::Constant(1.0), Vec6::Zero()));
  }
  const Dataset ds = dataset_from_samples(std::move(samples));
  const BiasModel model = fit_bias(ds, 1e-3);
  CHECK(model.n_samples_used == 20);
  CHECK((model.bias - Vec6::Constant(base)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_bias: no qualifying samples is an instructive error") {
  std::vector<Sample> samples;
  for (int i = 0; i < 20; ++i) {
    samples.push_back(make_sample(0.01 * i, Vec6::Zero(), Vec6::Constant(0.5), Vec6::Zero()));
  }
  const Dataset ds = dataset_from_samples(std::move(samples));
  try {
    fit_bias(ds, 1e-3);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("velocity_eps") != std::string::npos);
    CHECK(msg.find("dwell") != std::string::npos);
  }
}

TEST_CASE("fit_bias: invariant to sample order") {
  auto samples = random_samples(50, 2);
  for (auto& s : samples) s.state.qd = Vec6::Zero();  // all qualify
  Dataset ds = dataset_from_samples(samples);
  const BiasModel a = fit_bias(ds, 1e-3);

  // permute within the training split (the fit only sees that split)
  std::mt19937_64 rng(3);
  std::shuffle(samples.begin(), samples.begin() + static_cast<long>(ds.partition.train_end),
               rng);
  Dataset ds2 = dataset_from_samples(samples);
  const BiasModel b = fit_bias(ds2, 1e-3);
  CHECK(a.n_samples_used == b.n_samples_used);
  CHECK((a.bias - b.bias).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("build_index: k greater than N is a configuration error naming both") {
  const Dataset ds = dataset_from_samples(random_samples(10, 4));  // train split = 8
  try {
    build_index(ds, 9);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("k=9") != std::string::npos);
    CHECK(msg.find("N=8") != std::string::npos);
  }
}

TEST_CASE("build_index: degenerate feature std is clamped and a warning recorded") {
  auto samples = random_samples(20, 5);
  for (auto& s : samples) s.state.q = Vec6::Constant(0.4);  // positions constant
  const Dataset ds = dataset_from_samples(std::move(samples));
  const LookupIndex index = build_index(ds, 2);
  CHECK(index.warnings.size() == 6);
  for (int c = 0; c < 6; ++c) CHECK(index.feature_stds[c] == 1.0);
  for (int c = 6; c < 12; ++c) CHECK(index.feature_stds[c] > 0.0);
}

TEST_CASE("lookup: single-row index answers every query with that torque") {
  auto samples = random_samples(1, 6);
  Dataset ds = dataset_from_samples(std::move(samples));
  ds.partition.train_end = 1;  // one-sample train split
  ds.partition.val_end = 1;
  const LookupIndex index = build_index(ds, 1);
  JointState far;
  far.q = Vec6::Constant(5.0);
  far.qd = Vec6::Constant(-5.0);
  CHECK((lookup(index, far) - ds.samples[0].tau_measured).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lookup: exact-key query with k=1 returns exactly that sample's torque") {
  const Dataset ds = dataset_from_samples(random_samples(50, 7));
  const LookupIndex index = build_index(ds, 1);
  const auto& probe = ds.samples[17];
  const Vec6 tau = lookup(index, probe.state);
  CHECK((tau - probe.tau_measured).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lookup: duplicate keys, ties broken by lower row index; k covering them averages") {
  std::vector<Sample> samples;
  const Vec6 q = Vec6::Constant(0.3);
  const Vec6 qd = Vec6::Constant(-0.1);
  samples.push_back(make_sample(0.00, q, qd, Vec6::Constant(1.0)));
  samples.push_back(make_sample(0.01, q, qd, Vec6::Constant(3.0)));
  // spread the rest far away so only the duplicates are near
  for (int i = 2; i < 10; ++i) {
    samples.push_back(make_sample(0.01 * i, Vec6::Constant(-2.0 - i), Vec6::Constant(2.0 + i),
                                  Vec6::Constant(100.0)));
  }
  const Dataset ds = dataset_from_samples(std::move(samples));

  JointState query;
  query.q = q;
  query.qd = qd;

  const LookupIndex k1 = build_index(ds, 1);
  CHECK((lookup(k1, query) - Vec6::Constant(1.0)).cwiseAbs().maxCoeff() == 0.0);

  const LookupIndex k2 = build_index(ds, 2);
  CHECK((lookup(k2, query) - Vec6::Constant(2.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lookup: k = N returns the column mean of all stored torques") {
  const Dataset ds = dataset_from_samples(random_samples(10, 8));
  const auto n = static_cast<int>(ds.partition.train_end);
  const LookupIndex index = build_index(ds, n);
  JointState query;
  query.q = Vec6::Constant(0.1);
  query.qd = Vec6::Constant(0.2);
  const Vec6 got = lookup(index, query);
  Vec6 mean = Vec6::Zero();
  for (int i = 0; i < n; ++i) mean += ds.samples[static_cast<std::size_t>(i)].tau_measured;
  mean /= static_cast<double>(n);
  CHECK((got - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lookup: identical to the brute-force oracle on 100 random queries") {
  const Dataset ds = dataset_from_samples(random_samples(1250, 9));  // train split = 1000
  REQUIRE(ds.partition.train_end == 1000);
  const LookupIndex index = build_index(ds, 4);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 100; ++trial) {
    JointState query;
    for (int j = 0; j < 6; ++j) {
      query.q[j] = u(rng);
      query.qd[j] = u(rng);
    }
    const Vec6 got = lookup(index, query);
    const Vec6 expected = knn_oracle(index, query);
    CHECK((got - expected).cwiseAbs().maxCoeff() == 0.0);  // bit-for-bit
  }
}

TEST_CASE("baseline predictors share the common interface") {
  const Dataset ds = dataset_from_samples(random_samples(40, 11));
  Dataset dwell_ds = ds;
  for (std::size_t i = 0; i < 10; ++i) dwell_ds.samples[i].state.qd = Vec6::Zero();

  std::vector<std::unique_ptr<TorquePredictor>> predictors;
  predictors.push_back(std::make_unique<MeasureOnlyPredictor>());
  predictors.push_back(std::make_unique<BiasPredictor>(fit_bias(dwell_ds, 1e-3)));
  predictors.push_back(std::make_unique<VectorSearchPredictor>(build_index(ds, 3)));

  for (const auto& p : predictors) {
    const auto series = p->predict_series(ds);
    CHECK(series.size() == ds.samples.size());
    for (const auto& tau : series) CHECK(tau.has_value());
  }
}
