#pragma once

#include <optional>
#include <string>
#include <vector>

#include "superrad/integrator.hpp"

namespace superrad {

struct BatchItem {
  PhaseState state;
  MetricModel model;
  Direction direction = Direction::Forward;
  StopSpec stops;
};

struct BatchResult {
  std::optional<GeodesicPath> path;
  std::string error;  // set when the integration threw
};

// Results are ordered by input index regardless of scheduling.
std::vector<BatchResult> integrate_batch(const std::vector<BatchItem>& items);
// Serial reference with identical results.
std::vector<BatchResult> integrate_batch_serial(const std::vector<BatchItem>& items);

}  // namespace superrad
