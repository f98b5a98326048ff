#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqm {

using LinkId = std::int32_t;
using NodeId = std::int32_t;
using Step = std::int32_t;

enum class LinkKind { common, turn, origin, sink };

const char* to_string(LinkKind kind);
LinkKind link_kind_from_string(const std::string& s);

/// A step-indexed series of values. Queries beyond the stored range
/// return the last value (inputs shorter than the horizon are extended).
class StepSeries {
 public:
  StepSeries() = default;
  explicit StepSeries(double constant) : values_{constant} {}
  explicit StepSeries(std::vector<double> values) : values_(std::move(values)) {}

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  bool is_constant() const;

  double at(Step k) const {
    if (values_.empty()) throw std::logic_error("StepSeries: empty series queried");
    if (k < 0) k = 0;
    const auto idx = static_cast<std::size_t>(k);
    return idx < values_.size() ? values_[idx] : values_.back();
  }

  double min_value() const;
  double max_value() const;

  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Raised by the simulation when a runtime invariant is broken; carries the
/// offending link or node and the step.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(std::string entity, Step step, const std::string& what)
      : std::runtime_error("invariant breach at step " + std::to_string(step) + " on " + entity +
                           ": " + what),
        entity_(std::move(entity)),
        step_(step) {}

  const std::string& entity() const { return entity_; }
  Step step() const { return step_; }

 private:
  std::string entity_;
  Step step_;
};

inline double kmh_to_ms(double v) { return v / 3.6; }
inline double veh_per_km_to_veh_per_m(double d) { return d / 1000.0; }

}  // namespace lqm
