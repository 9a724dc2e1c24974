#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "forcesense/dataset.hpp"
#include "forcesense/trajectory.hpp"
#include "test_helpers.hpp"

using namespace forcesense;

namespace {

std::vector<JointState> simple_states(std::size_t n, double rate_hz = 100.0) {
  std::vector<JointState> states(n);
  for (std::size_t k = 0; k < n; ++k) {
    states[k].t = static_cast<double>(k) / rate_hz;
    states[k].q = Vec6::Constant(0.1 + 0.0001 * static_cast<double>(k));
    states[k].q[2] = 0.1;
    states[k].qd = Vec6::Constant(0.01);
  }
  return states;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("chronological split: 80/10/10 within one sample for any size >= 10") {
  for (std::size_t n = 10; n <= 500; ++n) {
    const Partition p = chronological_split(n);
    CHECK(p.train_size() + p.val_size() + p.test_size() == n);
    CHECK(p.val_size() >= 1);
    CHECK(p.test_size() >= 1);
    CHECK(std::abs(static_cast<double>(p.train_size()) - 0.8 * static_cast<double>(n)) <= 1.0);
    CHECK(std::abs(static_cast<double>(p.val_size()) - 0.1 * static_cast<double>(n)) <= 1.0);
    CHECK(std::abs(static_cast<double>(p.test_size()) - 0.1 * static_cast<double>(n)) <= 1.0);
  }
  const Partition p1000 = chronological_split(1000);
  CHECK(p1000.train_size() == 800);
  CHECK(p1000.val_size() == 100);
  CHECK(p1000.test_size() == 100);

  const Partition p10 = chronological_split(10);
  CHECK(p10.train_size() == 8);
  CHECK(p10.val_size() == 1);
  CHECK(p10.test_size() == 1);
}

TEST_CASE("build_dataset: rejects empty input and mismatched contacts") {
  const auto chain = reference_chain();
  SensorModel sensor;
  CHECK_THROWS_AS(
      build_dataset(chain, sensor, {}, nullptr, 100.0, DatasetMeta{}), DataError);

  const auto states = simple_states(5);
  std::vector<Wrench> contacts(3);
  CHECK_THROWS_AS(
      build_dataset(chain, sensor, states, &contacts, 100.0, DatasetMeta{}), DataError);
}

TEST_CASE("build_dataset: zeroed sensor reproduces the free-space truth") {
  const auto chain = reference_chain();
  SensorModel sensor;  // all zero
  const auto states = simple_states(50);
  const Dataset ds = build_dataset(chain, sensor, states, nullptr, 100.0, DatasetMeta{});
  REQUIRE(ds.samples.size() == 50);
  for (const auto& s : ds.samples) {
    CHECK((s.tau_measured - s.tau_free_truth).cwiseAbs().maxCoeff() == 0.0);
    CHECK(!s.contact_wrench_truth.has_value());
  }
}

TEST_CASE("build_dataset: logs the Jacobian and the contact wrench") {
  const auto chain = reference_chain();
  SensorModel sensor;
  const auto states = simple_states(20);
  std::vector<Wrench> contacts(20);
  for (auto& w : contacts) w.force = Vec3(1.0, 0.0, 0.0);
  const Dataset ds = build_dataset(chain, sensor, states, &contacts, 100.0, DatasetMeta{});
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    REQUIRE(s.contact_wrench_truth.has_value());
    const Mat6 J = jacobian(chain, s.state.q);
    CHECK((s.jacobian - J).cwiseAbs().maxCoeff() == 0.0);
    const Vec6 expected = s.tau_free_truth + J.transpose() * s.contact_wrench_truth->vec();
    CHECK((s.tau_measured - expected).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dataset partition sizes: 1000 samples split 800/100/100") {
  const auto chain = reference_chain();
  SensorModel sensor;
  const Dataset ds =
      build_dataset(chain, sensor, simple_states(1000), nullptr, 100.0, DatasetMeta{});
  CHECK(ds.partition.train_size() == 800);
  CHECK(ds.partition.val_size() == 100);
  CHECK(ds.partition.test_size() == 100);

  const Dataset tiny =
      build_dataset(chain, sensor, simple_states(10), nullptr, 100.0, DatasetMeta{});
  CHECK(tiny.partition.train_size() == 8);
  CHECK(tiny.partition.val_size() == 1);
  CHECK(tiny.partition.test_size() == 1);
}

TEST_CASE("CSV round-trip: every numeric field is restored bit-for-bit") {
  const auto chain = reference_chain();
  SensorModel sensor;
  sensor.noise_sigma = Vec6::Constant(0.05);
  sensor.bias_kind = BiasKind::OuDrift;
  sensor.ou_theta = 0.1;
  sensor.ou_sigma = 0.03;
  sensor.seed = 77;

  TrajectoryConfig cfg;
  cfg.duration_s = 3.0;
  cfg.rate_hz = 50.0;
  cfg.n_harmonics = 2;
  cfg.max_velocity << 0.8, 0.8, 0.15, 1.2, 1.2, 1.2;
  cfg.seed = 5;
  cfg.dwell_s = 0.5;
  cfg.ramp_s = 0.5;
  const auto states = generate_freespace_trajectory(chain, cfg);
  std::vector<Wrench> contacts(states.size());
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    contacts[i].force = Vec3(0.1 * static_cast<double>(i), -0.2, 0.3);
    contacts[i].torque = Vec3(0.0, 0.01, -0.02);
  }
  DatasetMeta meta{"si", 123456789ull, 3.0, "deadbeef00000000"};
  const Dataset ds = build_dataset(chain, sensor, states, &contacts, cfg.rate_hz, meta);

  const std::string path = temp_path("fs_roundtrip.csv");
  save_csv(ds, path);
  const Dataset back = load_csv(path);

  CHECK(back.rate_hz == ds.rate_hz);
  CHECK(back.meta.profile == ds.meta.profile);
  CHECK(back.meta.seed == ds.meta.seed);
  CHECK(back.meta.duration_s == ds.meta.duration_s);
  CHECK(back.meta.fingerprint == ds.meta.fingerprint);
  CHECK(back.partition.train_end == ds.partition.train_end);
  CHECK(back.partition.val_end == ds.partition.val_end);
  CHECK(back.partition.n == ds.partition.n);
  REQUIRE(back.samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& a = ds.samples[i];
    const auto& b = back.samples[i];
    CHECK(a.state.t == b.state.t);
    CHECK((a.state.q - b.state.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.state.qd - b.state.qd).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.tau_measured - b.tau_measured).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.tau_free_truth - b.tau_free_truth).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.jacobian - b.jacobian).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.contact_wrench_truth.has_value() == b.contact_wrench_truth.has_value());
    if (a.contact_wrench_truth) {
      CHECK((a.contact_wrench_truth->vec() - b.contact_wrench_truth->vec())
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("CSV: 60 s at 100 Hz gives 6000 data rows and one header row") {
  const auto chain = reference_chain();
  SensorModel sensor;
  const Dataset ds =
      build_dataset(chain, sensor, simple_states(6000), nullptr, 100.0, DatasetMeta{});
  const std::string path = temp_path("fs_rowcount.csv");
  save_csv(ds, path);

  std::ifstream f(path);
  std::string line;
  int header_rows = 0, data_rows = 0, comment_rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      ++comment_rows;
    } else if (line.rfind("t,", 0) == 0) {
      ++header_rows;
    } else {
      ++data_rows;
    }
  }
  CHECK(header_rows == 1);
  CHECK(data_rows == 6000);
  CHECK(comment_rows == 1);
  std::remove(path.c_str());
}

TEST_CASE("CSV: wrong column count is a parse error naming the offending line") {
  const auto chain = reference_chain();
  SensorModel sensor;
  const Dataset ds =
      build_dataset(chain, sensor, simple_states(5), nullptr, 100.0, DatasetMeta{});
  const std::string path = temp_path("fs_badcols.csv");
  save_csv(ds, path);

  // truncate one data row
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  lines[4] = "1.0,2.0,3.0";
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << "\n";
  out.close();

  try {
    load_csv(path);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":5:") != std::string::npos);  // 1-based line number
    CHECK(msg.find("columns") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("CSV: malformed numeric field names line and column") {
  const auto chain = reference_chain();
  SensorModel sensor;
  const Dataset ds =
      build_dataset(chain, sensor, simple_states(5), nullptr, 100.0, DatasetMeta{});
  const std::string path = temp_path("fs_badnum.csv");
  save_csv(ds, path);

  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  // corrupt the third field of the first data row
  auto& target = lines[2];
  std::size_t first = target.find(',');
  std::size_t second = target.find(',', first + 1);
  std::size_t third = target.find(',', second + 1);
  target = target.substr(0, second + 1) + "not_a_number" + target.substr(third);
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << "\n";
  out.close();

  try {
    load_csv(path);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);
    CHECK(msg.find("not_a_number") != std::string::npos);
  }
  std::remove(path.c_str());
}
