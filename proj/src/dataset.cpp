#include "forcesense/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace forcesense {

namespace {

constexpr int kNumColumns = 68;  // t + 6q + 6qd + 6tau_m + 6tau_f + 6 wrench + 36 J + flag

std::string column_header() {
  std::string h = "t";
  auto block = [&h](const char* stem) {
    for (int i = 1; i <= 6; ++i) {
      h += ',';
      h += stem;
      h += static_cast<char>('0' + i);
    }
  };
  block("q");
  block("qd");
  block("tau_meas");
  block("tau_free");
  h += ",fx,fy,fz,tx,ty,tz";
  for (int r = 1; r <= 6; ++r) {
    for (int c = 1; c <= 6; ++c) {
      h += ",J";
      h += static_cast<char>('0' + r);
      h += static_cast<char>('0' + c);
    }
  }
  h += ",has_contact";
  return h;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& path, std::size_t line,
                    int column) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || field.empty()) {
    throw DataError(path + ":" + std::to_string(line) + ": column " + std::to_string(column) +
                    ": cannot parse '" + std::string(field) + "' as a number");
  }
  return v;
}

}  // namespace

Partition chronological_split(std::size_t n) {
  Partition p;
  p.n = n;
  p.train_end = (8 * n + 5) / 10;
  std::size_t val = (n + 5) / 10;
  p.val_end = std::min(p.train_end + val, n);
  return p;
}

bool Dataset::has_contact() const {
  for (const auto& s : samples) {
    if (s.contact_wrench_truth) return true;
  }
  return false;
}

Dataset build_dataset(const KinematicChain& chain, const SensorModel& sensor,
                      const std::vector<JointState>& states,
                      const std::vector<Wrench>* contacts, double rate_hz,
                      const DatasetMeta& meta) {
  if (states.empty()) {
    throw DataError("build_dataset: empty state sequence");
  }
  if (contacts && contacts->size() != states.size()) {
    throw DataError("build_dataset: contact series length does not match states");
  }
  if (!(rate_hz > 0.0)) {
    throw ConfigError("build_dataset: rate_hz must be positive");
  }
  sensor.validate();

  Dataset ds;
  ds.rate_hz = rate_hz;
  ds.meta = meta;
  ds.samples.resize(states.size());

  const double dt = 1.0 / rate_hz;
  Vec6 bias = sensor.initial_bias();
  GaussStream noise(sensor.seed);
  for (std::size_t i = 0; i < states.size(); ++i) {
    Sample& s = ds.samples[i];
    s.state = states[i];
    s.jacobian = jacobian(chain, states[i].q);
    s.tau_free_truth = freespace_torque(chain, states[i]);
    if (contacts) {
      s.contact_wrench_truth = (*contacts)[i];
    }
    s.tau_measured =
        measured_torque(s.jacobian, s.tau_free_truth, sensor, s.contact_wrench_truth, bias, dt, noise);
  }
  ds.partition = chronological_split(ds.samples.size());
  return ds;
}

void save_csv(const Dataset& dataset, const std::string& path) {
  std::string out;
  out.reserve(dataset.samples.size() * 1024 + 4096);

  out += "# forcesense-dataset v1 rate_hz=";
  append_double(out, dataset.rate_hz);
  out += " seed=" + std::to_string(dataset.meta.seed);
  out += " duration_s=";
  append_double(out, dataset.meta.duration_s);
  out += " profile=" + (dataset.meta.profile.empty() ? "none" : dataset.meta.profile);
  out += " fingerprint=" + (dataset.meta.fingerprint.empty() ? "none" : dataset.meta.fingerprint);
  out += " train_end=" + std::to_string(dataset.partition.train_end);
  out += " val_end=" + std::to_string(dataset.partition.val_end);
  out += "\n";
  out += column_header();
  out += "\n";

  for (const auto& s : dataset.samples) {
    append_double(out, s.state.t);
    auto vec6 = [&out](const Vec6& v) {
      for (int i = 0; i < 6; ++i) {
        out += ',';
        append_double(out, v[i]);
      }
    };
    vec6(s.state.q);
    vec6(s.state.qd);
    vec6(s.tau_measured);
    vec6(s.tau_free_truth);
    vec6(s.contact_wrench_truth ? s.contact_wrench_truth->vec() : Vec6::Zero().eval());
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        out += ',';
        append_double(out, s.jacobian(r, c));
      }
    }
    out += s.contact_wrench_truth ? ",1\n" : ",0\n";
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw DataError("save_csv: cannot open '" + path + "' for writing");
  }
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw DataError("save_csv: write to '" + path + "' failed");
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw DataError("load_csv: cannot open '" + path + "'");
  }

  Dataset ds;
  std::string line;
  std::size_t lineno = 0;

  // metadata line
  if (!std::getline(f, line)) {
    throw DataError(path + ": empty file");
  }
  ++lineno;
  {
    std::istringstream meta(line);
    std::string tok;
    meta >> tok;
    if (tok != "#") {
      throw DataError(path + ":1: missing '# forcesense-dataset' metadata line");
    }
    meta >> tok;
    if (tok != "forcesense-dataset") {
      throw DataError(path + ":1: not a forcesense dataset file");
    }
    meta >> tok;  // version
    if (tok != "v1") {
      throw DataError(path + ":1: unsupported dataset version '" + tok + "'");
    }
    while (meta >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) {
        throw DataError(path + ":1: malformed metadata token '" + tok + "'");
      }
      const std::string key = tok.substr(0, eq);
      const std::string val = tok.substr(eq + 1);
      if (key == "rate_hz") {
        ds.rate_hz = parse_double(val, path, 1, 0);
      } else if (key == "seed") {
        ds.meta.seed = std::stoull(val);
      } else if (key == "duration_s") {
        ds.meta.duration_s = parse_double(val, path, 1, 0);
      } else if (key == "profile") {
        ds.meta.profile = (val == "none") ? "" : val;
      } else if (key == "fingerprint") {
        ds.meta.fingerprint = (val == "none") ? "" : val;
      } else if (key == "train_end") {
        ds.partition.train_end = std::stoull(val);
      } else if (key == "val_end") {
        ds.partition.val_end = std::stoull(val);
      } else {
        throw DataError(path + ":1: unknown metadata key '" + key + "'");
      }
    }
  }

  if (!std::getline(f, line)) {
    throw DataError(path + ": missing header row");
  }
  ++lineno;
  if (line != column_header()) {
    throw DataError(path + ":2: header row does not match the documented column order");
  }

  std::vector<std::string_view> fields;
  fields.reserve(kNumColumns);
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    fields.clear();
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.emplace_back(line.data() + start, line.size() - start);
        break;
      }
      fields.emplace_back(line.data() + start, comma - start);
      start = comma + 1;
    }
    if (fields.size() != kNumColumns) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(kNumColumns) + " columns, found " +
                      std::to_string(fields.size()));
    }

    Sample s;
    int col = 0;
    auto next = [&]() {
      const int c = col++;
      return parse_double(fields[static_cast<std::size_t>(c)], path, lineno, c + 1);
    };
    s.state.t = next();
    for (int i = 0; i < 6; ++i) s.state.q[i] = next();
    for (int i = 0; i < 6; ++i) s.state.qd[i] = next();
    for (int i = 0; i < 6; ++i) s.tau_measured[i] = next();
    for (int i = 0; i < 6; ++i) s.tau_free_truth[i] = next();
    Vec6 w;
    for (int i = 0; i < 6; ++i) w[i] = next();
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) s.jacobian(r, c) = next();
    }
    const auto flag = fields[static_cast<std::size_t>(col)];
    if (flag == "1") {
      s.contact_wrench_truth = Wrench::FromVec(w);
    } else if (flag != "0") {
      throw DataError(path + ":" + std::to_string(lineno) + ": column " +
                      std::to_string(kNumColumns) + ": has_contact must be 0 or 1");
    }
    ds.samples.push_back(std::move(s));
  }

  ds.partition.n = ds.samples.size();
  if (ds.partition.val_end == 0 && ds.partition.train_end == 0) {
    ds.partition = chronological_split(ds.samples.size());
  }
  if (ds.partition.train_end > ds.partition.val_end || ds.partition.val_end > ds.partition.n) {
    throw DataError(path + ": metadata partition is inconsistent with the row count");
  }
  return ds;
}

}  // namespace forcesense
