#pragma once

#include <cstdint>
#include <string>

#include "forcesense/chain.hpp"
#include "forcesense/estimator.hpp"
#include "forcesense/predictor.hpp"
#include "forcesense/sensor.hpp"
#include "forcesense/trajectory.hpp"
#include "forcesense/types.hpp"

#include "json.hpp"

namespace forcesense {

/// Everything a run needs, loaded from one JSON document. Parsing is strict:
/// unknown keys anywhere in the document are configuration errors. Missing
/// keys fall back to the documented defaults. All stochastic sub-seeds are
/// derived from the single global seed.
struct RunConfig {
  std::uint64_t seed = 20250801;
  KinematicChain chain;
  SensorModel classic_sensor;
  SensorModel si_sensor;
  TrajectoryConfig freespace;
  TrajectoryConfig contact_traj;   // duration/rate of the contact session
  ContactProfile contact;
  PredictorConfig predictor;
  double velocity_eps = 1e-3;
  int knn_k = 4;
  EstimatorPolicy policy;

  const SensorModel& profile(const std::string& name) const;
  void validate() const;
};

RunConfig default_config();

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

RunConfig load_config(const std::string& path);

/// Stable hash of the fully-expanded config document, carried by every
/// output file for provenance.
std::string config_fingerprint(const RunConfig& cfg);

}  // namespace forcesense
