#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forcesense/dataset.hpp"
#include "forcesense/types.hpp"

namespace forcesense {

enum class Method { MeasureOnly, Bias, VectorSearch, Nn };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// Common contract over the four torque estimators: map a dataset to a
/// per-timestep predicted free-space torque. Entries without a valid
/// prediction (e.g. the recurrent warm-up) are nullopt. Implementations are
/// immutable after construction and safe for concurrent use.
class TorquePredictor {
 public:
  virtual ~TorquePredictor() = default;
  virtual Method method() const = 0;
  virtual std::vector<std::optional<Vec6>> predict_series(const Dataset& dataset) const = 0;
};

}  // namespace forcesense
