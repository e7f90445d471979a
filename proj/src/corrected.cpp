#include "remu/corrected.hpp"

#include <cmath>
#include <stdexcept>

#include "driver.hpp"

namespace remu {

CoefficientMenu::CoefficientMenu()
    : CoefficientMenu({WeightCoefficients::frobenius(), WeightCoefficients::barycentric()}) {}

CoefficientMenu::CoefficientMenu(std::vector<WeightCoefficients> entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) throw std::invalid_argument("CoefficientMenu: need at least two entries");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i] == entries_[j]) throw std::invalid_argument("CoefficientMenu: duplicate entry");
    }
  }
}

bool CoefficientMenu::contains(const WeightCoefficients& C) const {
  for (const auto& e : entries_) {
    if (e == C) return true;
  }
  return false;
}

WeightCoefficients accompanying_of(const WeightCoefficients& trial, const CoefficientMenu& menu) {
  if (!menu.contains(trial)) throw std::invalid_argument("accompanying_of: trial weights not in menu");
  for (const auto& e : menu.entries()) {
    if (!(e == trial)) return e;
  }
  throw std::invalid_argument("accompanying_of: menu has no alternative");
}

WeightCoefficients correct_weights(double rho_trial, double rho_acc, const WeightCoefficients& trial,
                                   const WeightCoefficients& acc) {
  // -inf loses every comparison; two -inf values tie and keep the trial weights.
  if (std::isinf(rho_trial) && rho_trial < 0) {
    return (std::isinf(rho_acc) && rho_acc < 0) ? trial : acc;
  }
  if (std::isinf(rho_acc) && rho_acc < 0) return trial;
  return std::abs(rho_trial - 1.0) <= std::abs(rho_acc - 1.0) ? trial : acc;
}

SolverResult run_corrected(const Objective& objective, const Vector& x0, const SolverConfig& config,
                           const CoefficientMenu& menu, const CorrectedOptions& options,
                           const std::string& problem) {
  detail::WeightPolicy policy;
  policy.initial = options.initial;
  policy.menu = &menu;
  policy.accompany_with_trial = options.accompany_with_trial;
  return detail::drive(objective, x0, config, policy, problem, {});
}

}  // namespace remu
