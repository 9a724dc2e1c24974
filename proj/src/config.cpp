#include "forcesense/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace forcesense {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& path) {
  if (!j.is_object()) {
    throw ConfigError("config: " + path + " must be an object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("config: unknown key '" + path + "." + item.key() + "'");
    }
  }
}

double get_num(const json& j, const char* key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError("config: " + path + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& j, const char* key, int fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("config: " + path + "." + key + " must be an integer");
  }
  return v.get<int>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback,
                    const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError("config: " + path + "." + key + " must be a string");
  return v.get<std::string>();
}

// A 6-vector parameter: a single number broadcasts to all joints.
Vec6 get_vec6(const json& j, const char* key, const Vec6& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return Vec6::Constant(v.get<double>());
  if (v.is_array() && v.size() == 6) {
    Vec6 out;
    for (int i = 0; i < 6; ++i) {
      if (!v[i].is_number()) {
        throw ConfigError("config: " + path + "." + key + " entries must be numbers");
      }
      out[i] = v[i].get<double>();
    }
    return out;
  }
  throw ConfigError("config: " + path + "." + key + " must be a number or an array of 6");
}

Vec3 get_vec3(const json& j, const char* key, const Vec3& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("config: " + path + "." + key + " must be an array of 3 numbers");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[i] = v[i].get<double>();
  return out;
}

KinematicChain chain_from_json(const json& j, const KinematicChain& fallback) {
  reject_unknown(j, {"joints", "gravity", "link_masses", "link_coms", "viscous", "coulomb",
                     "joint_limits"},
                 "chain");
  KinematicChain c = fallback;
  if (j.contains("joints")) {
    const auto& joints = j.at("joints");
    if (!joints.is_array() || joints.size() != kNumJoints) {
      throw ConfigError("config: chain.joints must be an array of 6 joint descriptors");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      const auto& jd = joints[static_cast<std::size_t>(i)];
      const std::string jpath = "chain.joints[" + std::to_string(i) + "]";
      reject_unknown(jd, {"kind", "a", "alpha", "d", "theta_offset"}, jpath);
      const std::string kind = get_str(jd, "kind", i == 2 ? "prismatic" : "revolute", jpath);
      if (kind == "revolute") {
        c.joints[i].kind = JointKind::Revolute;
      } else if (kind == "prismatic") {
        c.joints[i].kind = JointKind::Prismatic;
      } else {
        throw ConfigError("config: " + jpath + ".kind must be 'revolute' or 'prismatic'");
      }
      c.joints[i].dh.a = get_num(jd, "a", c.joints[i].dh.a, jpath);
      c.joints[i].dh.alpha = get_num(jd, "alpha", c.joints[i].dh.alpha, jpath);
      c.joints[i].dh.d = get_num(jd, "d", c.joints[i].dh.d, jpath);
      c.joints[i].dh.theta = get_num(jd, "theta_offset", c.joints[i].dh.theta, jpath);
    }
  }
  c.gravity = get_vec3(j, "gravity", c.gravity, "chain");
  if (j.contains("link_masses")) {
    const Vec6 m = get_vec6(j, "link_masses", Vec6::Zero(), "chain");
    for (int i = 0; i < kNumJoints; ++i) c.link_masses[i] = m[i];
  }
  if (j.contains("link_coms")) {
    const auto& coms = j.at("link_coms");
    if (!coms.is_array() || coms.size() != kNumJoints) {
      throw ConfigError("config: chain.link_coms must be an array of 6 [x,y,z] triples");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      const auto& v = coms[static_cast<std::size_t>(i)];
      if (!v.is_array() || v.size() != 3) {
        throw ConfigError("config: chain.link_coms entries must be [x,y,z]");
      }
      for (int a = 0; a < 3; ++a) c.link_coms[i][a] = v[a].get<double>();
    }
  }
  c.viscous = get_vec6(j, "viscous", c.viscous, "chain");
  c.coulomb = get_vec6(j, "coulomb", c.coulomb, "chain");
  if (j.contains("joint_limits")) {
    const auto& lim = j.at("joint_limits");
    if (!lim.is_array() || lim.size() != kNumJoints) {
      throw ConfigError("config: chain.joint_limits must be an array of 6 [lo,hi] pairs");
    }
    for (int i = 0; i < kNumJoints; ++i) {
      const auto& v = lim[static_cast<std::size_t>(i)];
      if (!v.is_array() || v.size() != 2) {
        throw ConfigError("config: chain.joint_limits entries must be [lo,hi]");
      }
      c.joint_limits[i] = {v[0].get<double>(), v[1].get<double>()};
    }
  }
  return c;
}

SensorModel sensor_from_json(const json& j, const SensorModel& fallback,
                             const std::string& path) {
  reject_unknown(j, {"noise_sigma", "bias_kind", "static_bias", "ou_theta", "ou_sigma"}, path);
  SensorModel s = fallback;
  s.noise_sigma = get_vec6(j, "noise_sigma", s.noise_sigma, path);
  const std::string kind =
      get_str(j, "bias_kind", s.bias_kind == BiasKind::Static ? "static" : "ou_drift", path);
  if (kind == "static") {
    s.bias_kind = BiasKind::Static;
  } else if (kind == "ou_drift") {
    s.bias_kind = BiasKind::OuDrift;
  } else {
    throw ConfigError("config: " + path + ".bias_kind must be 'static' or 'ou_drift'");
  }
  s.static_bias = get_vec6(j, "static_bias", s.static_bias, path);
  s.ou_theta = get_num(j, "ou_theta", s.ou_theta, path);
  s.ou_sigma = get_num(j, "ou_sigma", s.ou_sigma, path);
  return s;
}

TrajectoryConfig trajectory_from_json(const json& j, const TrajectoryConfig& fallback,
                                      const std::string& path) {
  reject_unknown(j, {"duration_s", "rate_hz", "n_harmonics", "amplitude_fraction",
                     "max_velocity", "dwell_s", "ramp_s"},
                 path);
  TrajectoryConfig t = fallback;
  t.duration_s = get_num(j, "duration_s", t.duration_s, path);
  t.rate_hz = get_num(j, "rate_hz", t.rate_hz, path);
  t.n_harmonics = get_int(j, "n_harmonics", t.n_harmonics, path);
  t.amplitude_fraction = get_vec6(j, "amplitude_fraction", t.amplitude_fraction, path);
  t.max_velocity = get_vec6(j, "max_velocity", t.max_velocity, path);
  t.dwell_s = get_num(j, "dwell_s", t.dwell_s, path);
  t.ramp_s = get_num(j, "ramp_s", t.ramp_s, path);
  return t;
}

json vec6_to_json(const Vec6& v) {
  json a = json::array();
  for (int i = 0; i < 6; ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

const SensorModel& RunConfig::profile(const std::string& name) const {
  if (name == "classic") return classic_sensor;
  if (name == "si") return si_sensor;
  throw ConfigError("unknown sensor profile '" + name + "' (expected 'classic' or 'si')");
}

void RunConfig::validate() const {
  chain.validate();
  classic_sensor.validate();
  si_sensor.validate();
  freespace.validate();
  contact_traj.validate();
  contact.validate(chain, contact_traj);
  predictor.validate();
  if (!(velocity_eps > 0.0)) throw ConfigError("config: baselines.velocity_eps must be positive");
  if (knn_k < 1) throw ConfigError("config: baselines.k must be >= 1");
  if (!(policy.kappa_max >= 1.0)) throw ConfigError("config: estimator.kappa_max must be >= 1");
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.chain = reference_chain();

  cfg.classic_sensor.noise_sigma << 0.02, 0.02, 0.04, 0.004, 0.004, 0.004;
  cfg.classic_sensor.bias_kind = BiasKind::Static;
  cfg.classic_sensor.static_bias << 0.6, -0.45, 1.0, 0.03, -0.025, 0.02;

  cfg.si_sensor.noise_sigma = cfg.classic_sensor.noise_sigma;
  cfg.si_sensor.bias_kind = BiasKind::OuDrift;
  cfg.si_sensor.static_bias = Vec6::Zero();
  cfg.si_sensor.ou_theta = 100.0;
  cfg.si_sensor.ou_sigma = 3.0;

  cfg.freespace.duration_s = 600.0;
  cfg.freespace.rate_hz = 100.0;
  cfg.freespace.n_harmonics = 3;
  cfg.freespace.amplitude_fraction << 0.6, 0.3, 0.6, 0.5, 0.5, 0.5;
  cfg.freespace.max_velocity << 0.8, 0.8, 0.15, 1.2, 1.2, 1.2;
  cfg.freespace.dwell_s = 5.0;
  cfg.freespace.ramp_s = 4.0;

  cfg.contact_traj = cfg.freespace;
  cfg.contact_traj.duration_s = 60.0;
  cfg.contact_traj.dwell_s = 0.0;
  cfg.contact_traj.ramp_s = 4.0;

  cfg.contact.kind = ContactProfileKind::RampHoldRelease;
  cfg.contact.peaks = Vec3(30.0, 30.0, 35.0);
  cfg.contact.ramp_s = 4.0;
  cfg.contact.probe_q << 0.3, 0.0, 0.175, 0.2, 0.25, -0.25;
  cfg.contact.dwell_amplitude << 0.07, 0.07, 0.012, 0.08, 0.08, 0.08;
  cfg.contact.dwell_freq_hz = 0.5;

  cfg.predictor = PredictorConfig{};
  cfg.velocity_eps = 1e-3;
  cfg.knn_k = 8;
  cfg.policy = EstimatorPolicy{};
  return cfg;
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j, {"seed", "chain", "profiles", "freespace", "contact", "predictor",
                     "baselines", "estimator"},
                 "$");
  RunConfig cfg = default_config();

  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      throw ConfigError("config: $.seed must be an integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("chain")) cfg.chain = chain_from_json(j.at("chain"), cfg.chain);
  if (j.contains("profiles")) {
    const auto& p = j.at("profiles");
    reject_unknown(p, {"classic", "si"}, "profiles");
    if (p.contains("classic")) {
      cfg.classic_sensor = sensor_from_json(p.at("classic"), cfg.classic_sensor,
                                            "profiles.classic");
    }
    if (p.contains("si")) {
      cfg.si_sensor = sensor_from_json(p.at("si"), cfg.si_sensor, "profiles.si");
    }
  }
  if (j.contains("freespace")) {
    cfg.freespace = trajectory_from_json(j.at("freespace"), cfg.freespace, "freespace");
  }
  if (j.contains("contact")) {
    const auto& cj = j.at("contact");
    reject_unknown(cj, {"duration_s", "rate_hz", "profile"}, "contact");
    cfg.contact_traj.duration_s = get_num(cj, "duration_s", cfg.contact_traj.duration_s, "contact");
    cfg.contact_traj.rate_hz = get_num(cj, "rate_hz", cfg.contact_traj.rate_hz, "contact");
    if (cj.contains("profile")) {
      const auto& pj = cj.at("profile");
      reject_unknown(pj, {"kind", "peaks", "ramp_s", "probe_q", "dwell_amplitude",
                          "dwell_freq_hz"},
                     "contact.profile");
      const std::string kind = get_str(
          pj, "kind",
          cfg.contact.kind == ContactProfileKind::RampHoldRelease ? "ramp_hold_release"
                                                                  : "sinusoidal_push",
          "contact.profile");
      if (kind == "ramp_hold_release") {
        cfg.contact.kind = ContactProfileKind::RampHoldRelease;
      } else if (kind == "sinusoidal_push") {
        cfg.contact.kind = ContactProfileKind::SinusoidalPush;
      } else {
        throw ConfigError(
            "config: contact.profile.kind must be 'ramp_hold_release' or 'sinusoidal_push'");
      }
      cfg.contact.peaks = get_vec3(pj, "peaks", cfg.contact.peaks, "contact.profile");
      cfg.contact.ramp_s = get_num(pj, "ramp_s", cfg.contact.ramp_s, "contact.profile");
      cfg.contact.probe_q = get_vec6(pj, "probe_q", cfg.contact.probe_q, "contact.profile");
      cfg.contact.dwell_amplitude =
          get_vec6(pj, "dwell_amplitude", cfg.contact.dwell_amplitude, "contact.profile");
      cfg.contact.dwell_freq_hz =
          get_num(pj, "dwell_freq_hz", cfg.contact.dwell_freq_hz, "contact.profile");
    }
  }
  if (j.contains("predictor")) {
    const auto& pj = j.at("predictor");
    reject_unknown(pj, {"input_dim", "hidden_dim", "window_len", "optimizer", "batch_size",
                        "max_epochs", "early_stop_patience"},
                   "predictor");
    cfg.predictor.input_dim = get_int(pj, "input_dim", cfg.predictor.input_dim, "predictor");
    cfg.predictor.hidden_dim = get_int(pj, "hidden_dim", cfg.predictor.hidden_dim, "predictor");
    cfg.predictor.window_len = get_int(pj, "window_len", cfg.predictor.window_len, "predictor");
    if (pj.contains("optimizer")) {
      const auto& oj = pj.at("optimizer");
      reject_unknown(oj, {"kind", "lr", "betas", "eps"}, "predictor.optimizer");
      const std::string kind = get_str(oj, "kind", "adam", "predictor.optimizer");
      if (kind != "adam") {
        throw ConfigError("config: predictor.optimizer.kind must be 'adam'");
      }
      cfg.predictor.adam.lr = get_num(oj, "lr", cfg.predictor.adam.lr, "predictor.optimizer");
      if (oj.contains("betas")) {
        const auto& b = oj.at("betas");
        if (!b.is_array() || b.size() != 2) {
          throw ConfigError("config: predictor.optimizer.betas must be [beta1, beta2]");
        }
        cfg.predictor.adam.beta1 = b[0].get<double>();
        cfg.predictor.adam.beta2 = b[1].get<double>();
      }
      cfg.predictor.adam.eps = get_num(oj, "eps", cfg.predictor.adam.eps, "predictor.optimizer");
    }
    cfg.predictor.batch_size = get_int(pj, "batch_size", cfg.predictor.batch_size, "predictor");
    cfg.predictor.max_epochs = get_int(pj, "max_epochs", cfg.predictor.max_epochs, "predictor");
    cfg.predictor.early_stop_patience =
        get_int(pj, "early_stop_patience", cfg.predictor.early_stop_patience, "predictor");
  }
  if (j.contains("baselines")) {
    const auto& bj = j.at("baselines");
    reject_unknown(bj, {"velocity_eps", "k"}, "baselines");
    cfg.velocity_eps = get_num(bj, "velocity_eps", cfg.velocity_eps, "baselines");
    cfg.knn_k = get_int(bj, "k", cfg.knn_k, "baselines");
  }
  if (j.contains("estimator")) {
    const auto& ej = j.at("estimator");
    reject_unknown(ej, {"policy", "kappa_max", "lambda"}, "estimator");
    const std::string kind =
        get_str(ej, "policy", cfg.policy.kind == SolveKind::Exact ? "exact" : "damped",
                "estimator");
    if (kind == "exact") {
      cfg.policy.kind = SolveKind::Exact;
    } else if (kind == "damped") {
      cfg.policy.kind = SolveKind::Damped;
    } else {
      throw ConfigError("config: estimator.policy must be 'exact' or 'damped'");
    }
    cfg.policy.kappa_max = get_num(ej, "kappa_max", cfg.policy.kappa_max, "estimator");
    if (ej.contains("lambda") && !ej.at("lambda").is_null()) {
      cfg.policy.lambda = ej.at("lambda").get<double>();
    }
  }

  cfg.validate();
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;

  json joints = json::array();
  for (int i = 0; i < kNumJoints; ++i) {
    joints.push_back({{"kind", cfg.chain.joints[i].kind == JointKind::Revolute ? "revolute"
                                                                               : "prismatic"},
                      {"a", cfg.chain.joints[i].dh.a},
                      {"alpha", cfg.chain.joints[i].dh.alpha},
                      {"d", cfg.chain.joints[i].dh.d},
                      {"theta_offset", cfg.chain.joints[i].dh.theta}});
  }
  json masses = json::array(), coms = json::array(), limits = json::array();
  for (int i = 0; i < kNumJoints; ++i) {
    masses.push_back(cfg.chain.link_masses[i]);
    coms.push_back({cfg.chain.link_coms[i][0], cfg.chain.link_coms[i][1],
                    cfg.chain.link_coms[i][2]});
    limits.push_back({cfg.chain.joint_limits[i].first, cfg.chain.joint_limits[i].second});
  }
  j["chain"] = {{"joints", joints},
                {"gravity", {cfg.chain.gravity[0], cfg.chain.gravity[1], cfg.chain.gravity[2]}},
                {"link_masses", masses},
                {"link_coms", coms},
                {"viscous", vec6_to_json(cfg.chain.viscous)},
                {"coulomb", vec6_to_json(cfg.chain.coulomb)},
                {"joint_limits", limits}};

  auto sensor_json = [](const SensorModel& s) {
    return json{{"noise_sigma", vec6_to_json(s.noise_sigma)},
                {"bias_kind", s.bias_kind == BiasKind::Static ? "static" : "ou_drift"},
                {"static_bias", vec6_to_json(s.static_bias)},
                {"ou_theta", s.ou_theta},
                {"ou_sigma", s.ou_sigma}};
  };
  j["profiles"] = {{"classic", sensor_json(cfg.classic_sensor)},
                   {"si", sensor_json(cfg.si_sensor)}};

  auto traj_json = [](const TrajectoryConfig& t) {
    return json{{"duration_s", t.duration_s},
                {"rate_hz", t.rate_hz},
                {"n_harmonics", t.n_harmonics},
                {"amplitude_fraction", vec6_to_json(t.amplitude_fraction)},
                {"max_velocity", vec6_to_json(t.max_velocity)},
                {"dwell_s", t.dwell_s},
                {"ramp_s", t.ramp_s}};
  };
  j["freespace"] = traj_json(cfg.freespace);
  j["contact"] = {
      {"duration_s", cfg.contact_traj.duration_s},
      {"rate_hz", cfg.contact_traj.rate_hz},
      {"profile",
       {{"kind", cfg.contact.kind == ContactProfileKind::RampHoldRelease ? "ramp_hold_release"
                                                                         : "sinusoidal_push"},
        {"peaks", {cfg.contact.peaks[0], cfg.contact.peaks[1], cfg.contact.peaks[2]}},
        {"ramp_s", cfg.contact.ramp_s},
        {"probe_q", vec6_to_json(cfg.contact.probe_q)},
        {"dwell_amplitude", vec6_to_json(cfg.contact.dwell_amplitude)},
        {"dwell_freq_hz", cfg.contact.dwell_freq_hz}}}};

  j["predictor"] = {{"input_dim", cfg.predictor.input_dim},
                    {"hidden_dim", cfg.predictor.hidden_dim},
                    {"window_len", cfg.predictor.window_len},
                    {"optimizer",
                     {{"kind", "adam"},
                      {"lr", cfg.predictor.adam.lr},
                      {"betas", {cfg.predictor.adam.beta1, cfg.predictor.adam.beta2}},
                      {"eps", cfg.predictor.adam.eps}}},
                    {"batch_size", cfg.predictor.batch_size},
                    {"max_epochs", cfg.predictor.max_epochs},
                    {"early_stop_patience", cfg.predictor.early_stop_patience}};
  j["baselines"] = {{"velocity_eps", cfg.velocity_eps}, {"k", cfg.knn_k}};
  j["estimator"] = {{"policy", cfg.policy.kind == SolveKind::Exact ? "exact" : "damped"},
                    {"kappa_max", cfg.policy.kappa_max}};
  if (cfg.policy.lambda) {
    j["estimator"]["lambda"] = *cfg.policy.lambda;
  } else {
    j["estimator"]["lambda"] = nullptr;
  }
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_fingerprint(const RunConfig& cfg) {
  const std::uint64_t h = fnv1a64(config_to_json(cfg).dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace forcesense
