#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "remu/trust_region.hpp"

namespace remu {

/// Ordered menu of distinct weight choices for the corrected strategy.
class CoefficientMenu {
 public:
  /// [(0,0,1), (1/3,1/3,1/3)]
  CoefficientMenu();
  explicit CoefficientMenu(std::vector<WeightCoefficients> entries);

  const std::vector<WeightCoefficients>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const WeightCoefficients& C) const;

 private:
  std::vector<WeightCoefficients> entries_;
};

/// First menu entry that differs from `trial`.
WeightCoefficients accompanying_of(const WeightCoefficients& trial, const CoefficientMenu& menu);

/// Trial wins when |rho_trial - 1| <= |rho_acc - 1|.
WeightCoefficients correct_weights(double rho_trial, double rho_acc, const WeightCoefficients& trial,
                                   const WeightCoefficients& acc);

struct CorrectedOptions {
  WeightCoefficients initial = WeightCoefficients::barycentric();
  /// Builds the accompanying model with the trial weights. Only useful to check
  /// that the corrected loop collapses to the fixed-weight loop.
  bool accompany_with_trial = false;
};

SolverResult run_corrected(const Objective& objective, const Vector& x0, const SolverConfig& config,
                           const CoefficientMenu& menu = CoefficientMenu(),
                           const CorrectedOptions& options = {}, const std::string& problem = "");

}  // namespace remu
