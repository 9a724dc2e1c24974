#include "forcesense/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "forcesense/baselines.hpp"

namespace forcesense {

namespace {

const char* axis_name(int axis) {
  switch (axis) {
    case 0: return "Fx";
    case 1: return "Fy";
    case 2: return "Fz";
  }
  return "?";
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

std::array<double, kNumJoints> torque_rmse_on_test_split(
    const TorquePredictor& predictor, const Dataset& freespace) {
  Dataset test;
  test.rate_hz = freespace.rate_hz;
  test.meta = freespace.meta;
  test.samples.assign(freespace.samples.begin() +
                          static_cast<std::ptrdiff_t>(freespace.partition.val_end),
                      freespace.samples.end());
  test.partition = chronological_split(test.samples.size());

  const auto tau_hat = predictor.predict_series(test);
  std::array<double, kNumJoints> out{};
  std::array<double, kNumJoints> se{};
  std::size_t n = 0;
  for (std::size_t i = 0; i < test.samples.size(); ++i) {
    if (!tau_hat[i]) continue;
    ++n;
    for (int j = 0; j < kNumJoints; ++j) {
      const double r = (*tau_hat[i])[j] - test.samples[i].tau_measured[j];
      se[j] += r * r;
    }
  }
  if (n == 0) throw DataError("torque_rmse_on_test_split: no evaluable timesteps");
  for (int j = 0; j < kNumJoints; ++j) out[j] = std::sqrt(se[j] / static_cast<double>(n));
  return out;
}

}  // namespace

double rmse(const std::vector<double>& est, const std::vector<double>& truth) {
  if (est.size() != truth.size()) {
    throw DataError("rmse: series lengths differ");
  }
  if (est.empty()) {
    throw DataError("rmse: empty overlap between estimate and truth");
  }
  double se = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double r = est[i] - truth[i];
    se += r * r;
  }
  return std::sqrt(se / static_cast<double>(est.size()));
}

double force_range(const std::vector<double>& truth) {
  if (truth.empty()) {
    throw DataError("force_range: empty series");
  }
  const auto [lo, hi] = std::minmax_element(truth.begin(), truth.end());
  return *hi - *lo;
}

BenchmarkRun run_benchmark(const RunConfig& cfg, const std::string& profile,
                           const std::vector<Method>& methods) {
  cfg.validate();
  if (methods.empty()) {
    throw ConfigError("run_benchmark: no methods selected");
  }
  const std::string fingerprint = config_fingerprint(cfg);

  // Free-space training session.
  TrajectoryConfig free_cfg = cfg.freespace;
  free_cfg.seed = derive_seed(cfg.seed, "trajectory-freespace-" + profile);
  const auto free_states = generate_freespace_trajectory(cfg.chain, free_cfg);

  SensorModel free_sensor = cfg.profile(profile);
  free_sensor.seed = derive_seed(cfg.seed, "sensor-freespace-" + profile);
  DatasetMeta free_meta{profile, cfg.seed, free_cfg.duration_s, fingerprint};
  const Dataset free_ds =
      build_dataset(cfg.chain, free_sensor, free_states, nullptr, free_cfg.rate_hz, free_meta);

  // Contact benchmark session.
  TrajectoryConfig contact_cfg = cfg.contact_traj;
  contact_cfg.seed = derive_seed(cfg.seed, "trajectory-contact-" + profile);
  const auto contact_pairs = generate_contact_trajectory(cfg.chain, contact_cfg, cfg.contact);
  std::vector<JointState> contact_states(contact_pairs.size());
  std::vector<Wrench> contact_wrenches(contact_pairs.size());
  for (std::size_t i = 0; i < contact_pairs.size(); ++i) {
    contact_states[i] = contact_pairs[i].first;
    contact_wrenches[i] = contact_pairs[i].second;
  }
  SensorModel contact_sensor = cfg.profile(profile);
  contact_sensor.seed = derive_seed(cfg.seed, "sensor-contact-" + profile);
  DatasetMeta contact_meta{profile, cfg.seed, contact_cfg.duration_s, fingerprint};
  const Dataset contact_ds = build_dataset(cfg.chain, contact_sensor, contact_states,
                                           &contact_wrenches, contact_cfg.rate_hz, contact_meta);

  // Estimators.
  std::vector<std::unique_ptr<TorquePredictor>> predictors;
  for (const Method m : methods) {
    switch (m) {
      case Method::MeasureOnly:
        predictors.push_back(std::make_unique<MeasureOnlyPredictor>());
        break;
      case Method::Bias:
        predictors.push_back(
            std::make_unique<BiasPredictor>(fit_bias(free_ds, cfg.velocity_eps)));
        break;
      case Method::VectorSearch:
        predictors.push_back(
            std::make_unique<VectorSearchPredictor>(build_index(free_ds, cfg.knn_k)));
        break;
      case Method::Nn: {
        PredictorConfig pc = cfg.predictor;
        pc.seed = derive_seed(cfg.seed, "predictor-" + profile);
        predictors.push_back(std::make_unique<NnPredictor>(train(free_ds, pc)));
        break;
      }
    }
  }

  // Wrench estimates per method on the contact session.
  std::vector<std::vector<WrenchEstimate>> estimates;
  estimates.reserve(predictors.size());
  for (const auto& p : predictors) {
    estimates.push_back(estimate_series(*p, contact_ds, cfg.policy));
  }

  // Warm-up fairness: every method is scored on the same timesteps. The
  // recurrent warm-up (first W-1 samples) is excluded for all methods, as is
  // any timestep where any selected method failed to produce an estimate.
  const std::size_t warmup = static_cast<std::size_t>(cfg.predictor.window_len) - 1;
  std::vector<std::size_t> mask;
  for (std::size_t i = warmup; i < contact_ds.samples.size(); ++i) {
    bool ok = true;
    for (const auto& series : estimates) {
      if (series[i].status != EstimateStatus::Ok) {
        ok = false;
        break;
      }
    }
    if (ok) mask.push_back(i);
  }
  if (mask.empty()) {
    throw DataError("run_benchmark: no commonly evaluable timesteps on the contact session");
  }

  BenchmarkRun run;
  run.report.profile = profile;
  run.report.fingerprint = fingerprint;
  run.report.seed = cfg.seed;
  run.trace.profile = profile;
  run.trace.fingerprint = fingerprint;

  std::array<std::vector<double>, 3> truth;
  for (const std::size_t i : mask) {
    const Wrench& w = *contact_ds.samples[i].contact_wrench_truth;
    run.trace.t.push_back(contact_ds.samples[i].state.t);
    run.trace.truth.push_back(w.force);
    for (int a = 0; a < 3; ++a) truth[a].push_back(w.force[a]);
  }

  double range_sum = 0.0;
  std::array<double, 3> ranges{};
  for (int a = 0; a < 3; ++a) {
    ranges[a] = force_range(truth[a]);
    range_sum += ranges[a];
  }
  run.report.avg_range = range_sum / 3.0;

  for (std::size_t m = 0; m < predictors.size(); ++m) {
    MethodMetrics mm;
    mm.method = predictors[m]->method();

    std::vector<Vec3> est_trace;
    est_trace.reserve(mask.size());
    std::array<std::vector<double>, 3> est;
    for (const std::size_t i : mask) {
      const Vec3 f = estimates[m][i].wrench.force;
      est_trace.push_back(f);
      for (int a = 0; a < 3; ++a) est[a].push_back(f[a]);
    }

    double rmse_sum = 0.0;
    for (int a = 0; a < 3; ++a) {
      mm.axes[a].axis = a;
      mm.axes[a].rmse = rmse(est[a], truth[a]);
      mm.axes[a].range = ranges[a];
      mm.axes[a].n_points = mask.size();
      rmse_sum += mm.axes[a].rmse;
    }
    mm.avg_rmse = rmse_sum / 3.0;
    mm.ratio = mm.avg_rmse / run.report.avg_range;
    run.report.methods.push_back(mm);
    run.trace.estimates.emplace_back(mm.method, std::move(est_trace));

    run.freespace_torque_rmse.emplace_back(
        mm.method, torque_rmse_on_test_split(*predictors[m], free_ds));
  }
  return run;
}

nlohmann::json report_to_json(const std::vector<BenchmarkReport>& reports) {
  nlohmann::json j;
  j["format_version"] = 1;
  if (!reports.empty()) {
    j["fingerprint"] = reports.front().fingerprint;
    j["seed"] = reports.front().seed;
  }
  nlohmann::json profiles = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json pj;
    pj["profile"] = r.profile;
    pj["avg_range"] = r.avg_range;
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : r.methods) {
      nlohmann::json mj;
      mj["method"] = method_name(m.method);
      nlohmann::json axes = nlohmann::json::array();
      for (const auto& a : m.axes) {
        axes.push_back({{"axis", axis_name(a.axis)},
                        {"rmse", a.rmse},
                        {"range", a.range},
                        {"n_points", a.n_points}});
      }
      mj["axes"] = axes;
      mj["avg_rmse"] = m.avg_rmse;
      mj["ratio"] = m.ratio;
      methods.push_back(std::move(mj));
    }
    pj["methods"] = std::move(methods);
    profiles.push_back(std::move(pj));
  }
  j["profiles"] = std::move(profiles);
  return j;
}

std::string render_table(const std::vector<BenchmarkReport>& reports) {
  static const char* kMethodHeader[] = {"Measure Only", "Measure w. Bias", "Vector Search",
                                        "NN-based"};
  std::string out;
  char buf[64];

  out += "Force Estimation Benchmark: Estimation RMSE (N) and Range of Contact Force (N)\n";
  if (!reports.empty()) {
    out += "config " + reports.front().fingerprint +
           "  seed " + std::to_string(reports.front().seed) + "\n";
  }

  std::vector<Method> columns;
  if (!reports.empty()) {
    for (const auto& m : reports.front().methods) columns.push_back(m.method);
  }

  std::snprintf(buf, sizeof(buf), "%-9s", "");
  out += buf;
  for (const Method m : columns) {
    std::snprintf(buf, sizeof(buf), "%16s", kMethodHeader[static_cast<int>(m)]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%16s", "Range of Force");
  out += buf;
  out += '\n';

  for (const auto& r : reports) {
    const std::string tag = r.profile == "classic" ? "Cls" : (r.profile == "si" ? "Si" : r.profile);
    for (int a = 0; a < 3; ++a) {
      std::snprintf(buf, sizeof(buf), "%-9s", (std::string(axis_name(a)) + " " + tag).c_str());
      out += buf;
      for (const auto& m : r.methods) {
        std::snprintf(buf, sizeof(buf), "%16.2f", m.axes[a].rmse);
        out += buf;
      }
      std::snprintf(buf, sizeof(buf), "%16.2f", r.methods.empty() ? 0.0 : r.methods.front().axes[a].range);
      out += buf;
      out += '\n';
    }
    std::snprintf(buf, sizeof(buf), "%-9s", ("Ave. " + tag).c_str());
    out += buf;
    for (const auto& m : r.methods) {
      std::snprintf(buf, sizeof(buf), "%16.2f", m.avg_rmse);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%16.2f", r.avg_range);
    out += buf;
    out += '\n';
  }
  return out;
}

void export_trace(const TraceSeries& trace, const std::string& path) {
  if (trace.t.size() != trace.truth.size()) {
    throw DataError("export_trace: truth series length mismatch");
  }
  for (const auto& [method, series] : trace.estimates) {
    if (series.size() != trace.t.size()) {
      throw DataError(std::string("export_trace: estimate series length mismatch for ") +
                      method_name(method));
    }
  }

  std::string out;
  out.reserve(trace.t.size() * 256 + 1024);
  out += "# forcesense-trace v1 profile=" + trace.profile +
         " fingerprint=" + trace.fingerprint + "\n";
  out += "t,truth_fx,truth_fy,truth_fz";
  for (const auto& [method, series] : trace.estimates) {
    const std::string n = method_name(method);
    out += "," + n + "_fx," + n + "_fy," + n + "_fz";
  }
  out += "\n";

  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    append_double(out, trace.t[i]);
    for (int a = 0; a < 3; ++a) {
      out += ',';
      append_double(out, trace.truth[i][a]);
    }
    for (const auto& [method, series] : trace.estimates) {
      for (int a = 0; a < 3; ++a) {
        out += ',';
        append_double(out, series[i][a]);
      }
    }
    out += '\n';
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("export_trace: cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("export_trace: write to '" + path + "' failed");
}

}  // namespace forcesense
