#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forcesense/chain.hpp"
#include "forcesense/sensor.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

/// One logged timestep: state, sensor reading, simulator-only ground truth,
/// and the Jacobian at that configuration (logged alongside the torques,
/// as the downstream wrench estimate needs it).
struct Sample {
  JointState state;
  Vec6 tau_measured = Vec6::Zero();
  Vec6 tau_free_truth = Vec6::Zero();
  std::optional<Wrench> contact_wrench_truth;
  Mat6 jacobian = Mat6::Zero();
};

/// Contiguous chronological split: [0,train_end) train, [train_end,val_end)
/// val, [val_end,n) test.
struct Partition {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
  std::size_t n = 0;

  std::size_t train_size() const { return train_end; }
  std::size_t val_size() const { return val_end - train_end; }
  std::size_t test_size() const { return n - val_end; }
};

/// 80/10/10 chronological split, each share rounded to the nearest sample.
Partition chronological_split(std::size_t n);

struct DatasetMeta {
  std::string profile;       // "classic" or "si"
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  std::string fingerprint;   // config hash, for provenance
};

struct Dataset {
  std::vector<Sample> samples;
  double rate_hz = 0.0;
  Partition partition;
  DatasetMeta meta;

  bool has_contact() const;
};

/// Runs the sensor over a chronological state sequence, threading the bias
/// state and noise stream, and applies the 80/10/10 split. `contacts`, when
/// given, must be one wrench per state.
Dataset build_dataset(const KinematicChain& chain, const SensorModel& sensor,
                      const std::vector<JointState>& states,
                      const std::vector<Wrench>* contacts, double rate_hz,
                      const DatasetMeta& meta);

/// CSV round-trip. Column order (documented in the header row):
///   t, q1..q6, qd1..qd6, tau_meas1..6, tau_free1..6, fx, fy, fz, tx, ty, tz,
///   J11..J66 (row-major), has_contact
/// Values are written in shortest round-trip decimal form, so load(save(d))
/// reproduces every numeric field bit-for-bit. A leading '#' metadata line
/// carries rate, partition, and provenance.
void save_csv(const Dataset& dataset, const std::string& path);
Dataset load_csv(const std::string& path);

}  // namespace forcesense
