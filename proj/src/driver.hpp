#pragma once

#include <functional>
#include <string>

#include "remu/corrected.hpp"
#include "remu/trust_region.hpp"

namespace remu::detail {

struct WeightPolicy {
  WeightCoefficients initial = WeightCoefficients::barycentric();
  const CoefficientMenu* menu = nullptr;  // null keeps the weights fixed
  bool accompany_with_trial = false;
};

SolverResult drive(const Objective& objective, const Vector& x0, const SolverConfig& config,
                   const WeightPolicy& policy, const std::string& problem,
                   const IterationObserver& observer);

}  // namespace remu::detail
