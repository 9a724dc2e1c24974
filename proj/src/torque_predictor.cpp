#include "forcesense/torque_predictor.hpp"

namespace forcesense {

const char* method_name(Method m) {
  switch (m) {
    case Method::MeasureOnly: return "measure_only";
    case Method::Bias: return "bias";
    case Method::VectorSearch: return "vector_search";
    case Method::Nn: return "nn";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "measure_only") return Method::MeasureOnly;
  if (name == "bias") return Method::Bias;
  if (name == "vector_search") return Method::VectorSearch;
  if (name == "nn") return Method::Nn;
  throw ConfigError("unknown method '" + name +
                    "' (expected measure_only, bias, vector_search, or nn)");
}

}  // namespace forcesense
