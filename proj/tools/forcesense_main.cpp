// forcesense: desk-scale external force estimation workbench.
//
// Subcommands: gen-data, train, eval, bench. All runs are driven by a JSON
// config (defaults used when --config is omitted) and are deterministic
// given (config, seed). FORCESENSE_SEED overrides the config seed.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "forcesense/baselines.hpp"
#include "forcesense/config.hpp"
#include "forcesense/dataset.hpp"
#include "forcesense/estimator.hpp"
#include "forcesense/evaluation.hpp"
#include "forcesense/predictor.hpp"
#include "forcesense/types.hpp"

namespace fs = forcesense;
namespace stdfs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

fs::RunConfig load_effective_config(const std::string& config_path) {
  fs::RunConfig cfg = config_path.empty() ? fs::default_config() : fs::load_config(config_path);
  if (const char* env = std::getenv("FORCESENSE_SEED")) {
    std::uint64_t seed = 0;
    const std::string s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw fs::ConfigError("FORCESENSE_SEED must be an unsigned integer, got '" + s + "'");
    }
    cfg.seed = seed;
  }
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw fs::DataError("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw fs::DataError("write to '" + path + "' failed");
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

int run_gen_data(const std::string& config_path, const std::string& profile,
                 const std::string& out_dir) {
  const fs::RunConfig cfg = load_effective_config(config_path);
  const fs::SensorModel& sensor_cfg = cfg.profile(profile);
  const std::string fingerprint = fs::config_fingerprint(cfg);
  stdfs::create_directories(out_dir);

  fs::TrajectoryConfig free_cfg = cfg.freespace;
  free_cfg.seed = fs::derive_seed(cfg.seed, "trajectory-freespace-" + profile);
  const auto free_states = fs::generate_freespace_trajectory(cfg.chain, free_cfg);
  fs::SensorModel free_sensor = sensor_cfg;
  free_sensor.seed = fs::derive_seed(cfg.seed, "sensor-freespace-" + profile);
  const fs::Dataset free_ds =
      fs::build_dataset(cfg.chain, free_sensor, free_states, nullptr, free_cfg.rate_hz,
                        {profile, cfg.seed, free_cfg.duration_s, fingerprint});

  fs::TrajectoryConfig contact_cfg = cfg.contact_traj;
  contact_cfg.seed = fs::derive_seed(cfg.seed, "trajectory-contact-" + profile);
  const auto pairs = fs::generate_contact_trajectory(cfg.chain, contact_cfg, cfg.contact);
  std::vector<fs::JointState> states(pairs.size());
  std::vector<fs::Wrench> wrenches(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    states[i] = pairs[i].first;
    wrenches[i] = pairs[i].second;
  }
  fs::SensorModel contact_sensor = sensor_cfg;
  contact_sensor.seed = fs::derive_seed(cfg.seed, "sensor-contact-" + profile);
  const fs::Dataset contact_ds =
      fs::build_dataset(cfg.chain, contact_sensor, states, &wrenches, contact_cfg.rate_hz,
                        {profile, cfg.seed, contact_cfg.duration_s, fingerprint});

  const std::string free_file = "freespace_" + profile + ".csv";
  const std::string contact_file = "contact_" + profile + ".csv";
  fs::save_csv(free_ds, (stdfs::path(out_dir) / free_file).string());
  fs::save_csv(contact_ds, (stdfs::path(out_dir) / contact_file).string());

  nlohmann::json manifest;
  manifest["fingerprint"] = fingerprint;
  manifest["seed"] = cfg.seed;
  manifest["profile"] = profile;
  manifest["bias_kind"] =
      sensor_cfg.bias_kind == fs::BiasKind::Static ? "static" : "ou_drift";
  manifest["freespace"] = {{"file", free_file},
                           {"duration_s", free_cfg.duration_s},
                           {"rate_hz", free_cfg.rate_hz},
                           {"rows", free_ds.samples.size()}};
  manifest["contact"] = {{"file", contact_file},
                         {"duration_s", contact_cfg.duration_s},
                         {"rate_hz", contact_cfg.rate_hz},
                         {"rows", contact_ds.samples.size()}};
  write_text((stdfs::path(out_dir) / ("manifest_" + profile + ".json")).string(),
             manifest.dump(2) + "\n");

  std::cout << "wrote " << free_file << " (" << free_ds.samples.size() << " rows), "
            << contact_file << " (" << contact_ds.samples.size() << " rows)\n";
  return kExitOk;
}

int run_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_dir) {
  const fs::RunConfig cfg = load_effective_config(config_path);
  const fs::Dataset ds = fs::load_csv(data_path);
  stdfs::create_directories(out_dir);

  fs::PredictorConfig pc = cfg.predictor;
  const std::string profile = ds.meta.profile.empty() ? "custom" : ds.meta.profile;
  pc.seed = fs::derive_seed(cfg.seed, "predictor-" + profile);
  const fs::JointModelSet models = fs::train(ds, pc);

  const std::string model_path = (stdfs::path(out_dir) / "model.json").string();
  fs::save_model(models, model_path);

  std::string hist = "# forcesense-history v1 fingerprint=" + fs::config_fingerprint(cfg) + "\n";
  hist += "joint,epoch,train_loss,val_loss\n";
  for (int j = 0; j < fs::kNumJoints; ++j) {
    for (std::size_t e = 0; e < models.joints[j].history.size(); ++e) {
      hist += std::to_string(j + 1) + "," + std::to_string(e + 1) + ",";
      append_double(hist, models.joints[j].history[e].train_loss);
      hist += ',';
      append_double(hist, models.joints[j].history[e].val_loss);
      hist += '\n';
    }
  }
  write_text((stdfs::path(out_dir) / "history.csv").string(), hist);

  std::cout << "wrote model.json and history.csv to " << out_dir << "\n";
  return kExitOk;
}

int run_eval(const std::string& config_path, const std::string& model_path,
             const std::string& data_path, const std::string& train_data_path,
             const std::string& method_name_str, const std::string& out_path) {
  const fs::RunConfig cfg = load_effective_config(config_path);
  const fs::Method method = fs::method_from_name(method_name_str);

  if (method == fs::Method::Nn && model_path.empty()) {
    throw fs::ConfigError("eval: --method nn requires --model");
  }
  if (method != fs::Method::Nn && !model_path.empty()) {
    throw fs::ConfigError(std::string("eval: --model is only valid with --method nn, not '") +
                          fs::method_name(method) + "'");
  }
  if ((method == fs::Method::Bias || method == fs::Method::VectorSearch) &&
      train_data_path.empty()) {
    throw fs::ConfigError(std::string("eval: --method ") + fs::method_name(method) +
                          " requires --train-data (free-space dataset to fit on)");
  }

  const fs::Dataset data = fs::load_csv(data_path);

  std::unique_ptr<fs::TorquePredictor> predictor;
  int window_len = 1;
  switch (method) {
    case fs::Method::MeasureOnly:
      predictor = std::make_unique<fs::MeasureOnlyPredictor>();
      break;
    case fs::Method::Bias: {
      const fs::Dataset train_ds = fs::load_csv(train_data_path);
      predictor = std::make_unique<fs::BiasPredictor>(fs::fit_bias(train_ds, cfg.velocity_eps));
      break;
    }
    case fs::Method::VectorSearch: {
      const fs::Dataset train_ds = fs::load_csv(train_data_path);
      predictor =
          std::make_unique<fs::VectorSearchPredictor>(fs::build_index(train_ds, cfg.knn_k));
      break;
    }
    case fs::Method::Nn: {
      fs::JointModelSet models = fs::load_model(model_path);
      window_len = models.cfg.window_len;
      predictor = std::make_unique<fs::NnPredictor>(std::move(models));
      break;
    }
  }

  const auto estimates = fs::estimate_series(*predictor, data, cfg.policy);

  const auto warmup = static_cast<std::size_t>(window_len - 1);
  std::array<std::vector<double>, 3> est, truth;
  for (std::size_t i = warmup; i < data.samples.size(); ++i) {
    if (estimates[i].status != fs::EstimateStatus::Ok) continue;
    if (!data.samples[i].contact_wrench_truth) continue;
    for (int a = 0; a < 3; ++a) {
      est[a].push_back(estimates[i].wrench.force[a]);
      truth[a].push_back(data.samples[i].contact_wrench_truth->force[a]);
    }
  }
  if (est[0].empty()) {
    throw fs::DataError("eval: no evaluable timesteps with ground-truth contact wrench");
  }

  static const char* kAxisNames[] = {"Fx", "Fy", "Fz"};
  nlohmann::json out;
  out["fingerprint"] = fs::config_fingerprint(cfg);
  out["method"] = fs::method_name(method);
  out["profile"] = data.meta.profile;
  nlohmann::json axes = nlohmann::json::array();
  double rmse_sum = 0.0, range_sum = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double r = fs::rmse(est[a], truth[a]);
    const double rng = fs::force_range(truth[a]);
    rmse_sum += r;
    range_sum += rng;
    axes.push_back({{"axis", kAxisNames[a]},
                    {"rmse", r},
                    {"range", rng},
                    {"n_points", est[a].size()}});
  }
  out["axes"] = axes;
  out["avg_rmse"] = rmse_sum / 3.0;
  out["avg_range"] = range_sum / 3.0;
  out["ratio"] = (rmse_sum / 3.0) / (range_sum / 3.0);

  const std::string text = out.dump(2) + "\n";
  if (!out_path.empty()) write_text(out_path, text);
  std::cout << text;
  return kExitOk;
}

int run_bench(const std::string& config_path, const std::string& out_dir,
              const std::vector<std::string>& method_names) {
  const fs::RunConfig cfg = load_effective_config(config_path);
  std::vector<fs::Method> methods;
  if (method_names.empty()) {
    methods = {fs::Method::MeasureOnly, fs::Method::Bias, fs::Method::VectorSearch,
               fs::Method::Nn};
  } else {
    for (const auto& n : method_names) methods.push_back(fs::method_from_name(n));
  }
  stdfs::create_directories(out_dir);

  std::vector<fs::BenchmarkReport> reports;
  for (const std::string profile : {"classic", "si"}) {
    fs::BenchmarkRun leg;
    try {
      leg = fs::run_benchmark(cfg, profile, methods);
    } catch (const fs::ConfigError& e) {
      throw fs::ConfigError("bench stage '" + profile + "': " + e.what());
    } catch (const fs::DataError& e) {
      throw fs::DataError("bench stage '" + profile + "': " + e.what());
    } catch (const fs::NumericError& e) {
      throw fs::NumericError("bench stage '" + profile + "': " + e.what());
    }
    fs::export_trace(leg.trace,
                     (stdfs::path(out_dir) / ("trace_" + profile + ".csv")).string());
    reports.push_back(std::move(leg.report));
  }

  write_text((stdfs::path(out_dir) / "report.json").string(),
             fs::report_to_json(reports).dump(2) + "\n");
  const std::string table = fs::render_table(reports);
  write_text((stdfs::path(out_dir) / "table.txt").string(), table);
  std::cout << table;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcesense: external force estimation benchmark workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", profile = "si";
  std::string data_path, train_data_path, model_path, method, out_file;
  std::vector<std::string> method_names;

  auto* gen = app.add_subcommand("gen-data", "generate free-space and contact datasets");
  gen->add_option("--config", config_path, "JSON config path (defaults when omitted)");
  gen->add_option("--profile", profile, "sensor profile: classic or si")
      ->check(CLI::IsMember({"classic", "si"}));
  gen->add_option("--out", out_dir, "output directory");

  auto* train_cmd = app.add_subcommand("train", "train the six per-joint torque networks");
  train_cmd->add_option("--config", config_path, "JSON config path");
  train_cmd->add_option("--data", data_path, "free-space dataset CSV")->required();
  train_cmd->add_option("--out", out_dir, "output directory");

  auto* eval_cmd = app.add_subcommand("eval", "single-method evaluation on a contact dataset");
  eval_cmd->add_option("--config", config_path, "JSON config path");
  eval_cmd->add_option("--model", model_path, "model JSON (nn only)");
  eval_cmd->add_option("--data", data_path, "contact dataset CSV")->required();
  eval_cmd->add_option("--train-data", train_data_path,
                       "free-space dataset CSV (bias and vector_search fitting)");
  eval_cmd->add_option("--method", method, "measure_only | bias | vector_search | nn")
      ->required();
  eval_cmd->add_option("--out", out_file, "also write the metrics JSON here");

  auto* bench = app.add_subcommand("bench", "full two-profile benchmark");
  bench->add_option("--config", config_path, "JSON config path");
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--methods", method_names, "subset of methods to benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return run_gen_data(config_path, profile, out_dir);
    if (train_cmd->parsed()) return run_train(config_path, data_path, out_dir);
    if (eval_cmd->parsed()) {
      return run_eval(config_path, model_path, data_path, train_data_path, method, out_file);
    }
    if (bench->parsed()) return run_bench(config_path, out_dir, method_names);
  } catch (const fs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
