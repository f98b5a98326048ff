#include "lqm/types.hpp"

#include <algorithm>

namespace lqm {

const char* to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::common: return "common";
    case LinkKind::turn: return "turn";
    case LinkKind::origin: return "origin";
    case LinkKind::sink: return "sink";
  }
  return "unknown";
}

LinkKind link_kind_from_string(const std::string& s) {
  if (s == "common") return LinkKind::common;
  if (s == "turn") return LinkKind::turn;
  if (s == "origin") return LinkKind::origin;
  if (s == "sink") return LinkKind::sink;
  throw std::invalid_argument("unknown link kind: " + s);
}

bool StepSeries::is_constant() const {
  if (values_.size() <= 1) return true;
  return std::all_of(values_.begin(), values_.end(),
                     [&](double v) { return v == values_.front(); });
}

double StepSeries::min_value() const {
  if (values_.empty()) throw std::logic_error("StepSeries: empty series queried");
  return *std::min_element(values_.begin(), values_.end());
}

double StepSeries::max_value() const {
  if (values_.empty()) throw std::logic_error("StepSeries: empty series queried");
  return *std::max_element(values_.begin(), values_.end());
}

}  // namespace lqm
