#pragma once

#include <array>
#include <string>
#include <vector>

#include "forcesense/config.hpp"
#include "forcesense/estimator.hpp"
#include "forcesense/types.hpp"

#include "json.hpp"

namespace forcesense {

/// sqrt(mean((est - truth)^2)); series must be equally long and non-empty.
double rmse(const std::vector<double>& est, const std::vector<double>& truth);

/// max - min of the ground-truth series.
double force_range(const std::vector<double>& truth);

struct AxisMetrics {
  int axis = 0;  // 0 = Fx, 1 = Fy, 2 = Fz
  double rmse = 0.0;
  double range = 0.0;
  std::size_t n_points = 0;
};

struct MethodMetrics {
  Method method = Method::MeasureOnly;
  std::array<AxisMetrics, 3> axes;
  double avg_rmse = 0.0;   // unweighted mean over the three axes
  double ratio = 0.0;      // avg_rmse / avg_range
};

struct BenchmarkReport {
  std::string profile;
  std::vector<MethodMetrics> methods;
  double avg_range = 0.0;
  std::string fingerprint;
  std::uint64_t seed = 0;
};

/// Time series for the measured-vs-estimated force plots: ground truth and
/// one estimate per method, on the common evaluated timestep set.
struct TraceSeries {
  std::string profile;
  std::string fingerprint;
  std::vector<double> t;
  std::vector<Vec3> truth;
  std::vector<std::pair<Method, std::vector<Vec3>>> estimates;
};

/// Artifacts of one benchmark leg. The torque-level RMSE on the free-space
/// test split (per joint, per method) backs the predictor-level comparison.
struct BenchmarkRun {
  BenchmarkReport report;
  TraceSeries trace;
  std::vector<std::pair<Method, std::array<double, kNumJoints>>> freespace_torque_rmse;
};

/// End to end for one sensor profile: generate free-space and contact data,
/// train the per-joint networks, fit the baselines, estimate on the contact
/// session, and assemble the report. Deterministic given (config, methods).
BenchmarkRun run_benchmark(const RunConfig& cfg, const std::string& profile,
                           const std::vector<Method>& methods);

nlohmann::json report_to_json(const std::vector<BenchmarkReport>& reports);

/// Fixed-width text table mirroring the benchmark layout: Fx/Fy/Fz/Ave. rows
/// per profile, one RMSE column per method plus the force range.
std::string render_table(const std::vector<BenchmarkReport>& reports);

/// Columnar plot data (t, truth, per-method estimates); deterministic and
/// byte-stable for identical inputs.
void export_trace(const TraceSeries& trace, const std::string& path);

}  // namespace forcesense
