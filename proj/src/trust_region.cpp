#include "remu/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "driver.hpp"
#include "remu/errors.hpp"

namespace remu {

void SolverConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SolverConfig: ") + what);
  };
  require(delta0 <= 0.0 || delta_max <= 0.0 || delta_max >= delta0, "delta_max must be >= delta0");
  require(gamma > 1.0, "gamma must exceed 1");
  require(0.0 <= accept_low && accept_low <= accept_high && accept_high <= 1.0,
          "need 0 <= accept_low <= accept_high <= 1");
  require(mu > 0.0 && eps_c > 0.0, "mu and eps_c must be positive");
  require(tol_delta > 0.0 && tol_f > 0.0 && tol_grad > 0.0, "tolerances must be positive");
  require(max_evals > 0, "max_evals must be positive");
}

std::size_t set_cardinality(SetSize size, Eigen::Index n) {
  const auto nn = static_cast<std::size_t>(n);
  return size == SetSize::n_plus_3 ? nn + 3 : 2 * nn + 1;
}

std::vector<Vector> initial_points(const Vector& x0, double delta, SetSize size) {
  const Eigen::Index n = x0.size();
  std::vector<Vector> pts{x0};
  auto shifted = [&](Eigen::Index i, double sign) {
    Vector y = x0;
    y[i] += sign * delta;
    return y;
  };
  if (size == SetSize::two_n_plus_1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      pts.push_back(shifted(i, 1.0));
      pts.push_back(shifted(i, -1.0));
    }
  } else {
    if (n < 2) throw std::invalid_argument("initial_points: n+3 points need n >= 2");
    for (Eigen::Index i = 0; i < n; ++i) pts.push_back(shifted(i, 1.0));
    pts.push_back(shifted(0, -1.0));
    pts.push_back(shifted(1, -1.0));
  }
  return pts;
}

double norm_radius(RadiusRule rule, double delta, const InterpolationSet& set, const Vector& center) {
  if (rule == RadiusRule::delta) return delta;
  double far = 0.0;
  for (const auto& y : set.points()) far = std::max(far, (y - center).norm());
  return std::max(10.0 * delta, far);
}

double compute_rho(double f_old, double f_new, double m_old, double m_new) {
  const double drop = m_old - m_new;
  if (!(std::abs(drop) > 1e-300)) throw DegenerateModelDecrease("compute_rho: zero model decrease");
  return (f_old - f_new) / drop;
}

TrustRegionState update_iterate(const TrustRegionState& state, const Vector& step, double f_trial,
                                double rho, const SolverConfig& config) {
  TrustRegionState next = state;
  if (rho >= config.accept_low) {
    next.x = state.x + step;
    next.f = f_trial;
  }
  const double delta_max =
      config.delta_max > 0.0 ? config.delta_max : std::numeric_limits<double>::infinity();
  if (rho >= config.accept_high) {
    next.delta = std::min(config.gamma * state.delta, delta_max);
  } else if (rho < config.accept_low) {
    next.delta = state.delta / config.gamma;
  }
  return next;
}

InterpolationSet update_set(const InterpolationSet& set, const Vector& new_point, double new_value,
                            const Vector& next_center) {
  InterpolationSet out = set;
  const std::size_t dup = set.find(new_point);
  if (dup < set.size()) {
    out.set_value(dup, new_value);
    out.set_newest(dup);
    return out;
  }
  std::size_t far = 0;
  double far_dist = -1.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double d = (set.point(i) - next_center).norm();
    if (d > far_dist) {
      far_dist = d;
      far = i;
    }
  }
  out.replace(far, new_point, new_value);
  return out;
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::max_evals: return "max_evals";
    case Termination::tol_delta: return "tol_delta";
    case Termination::tol_f: return "tol_f";
    case Termination::tol_grad: return "tol_grad";
    case Termination::criticality: return "criticality";
  }
  return "unknown";
}

std::string format_weights(const WeightCoefficients& C) {
  std::ostringstream os;
  os.precision(17);
  os << C.c1() << ',' << C.c2() << ',' << C.c3();
  return os.str();
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

nlohmann::json to_json(const SolverResult& result) {
  nlohmann::json j;
  j["problem"] = result.problem;
  j["weights"] = result.weights;
  j["history"] = nlohmann::json::array();
  for (const auto& [k, f] : result.history) j["history"].push_back({k, f});
  j["best_x"] = vector_json(result.best_x);
  j["best_f"] = result.best_f;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : result.iterations) {
    nlohmann::json row{{"rho", it.rho}, {"delta", it.delta}, {"kkt_residual", it.kkt_residual},
                       {"accepted", it.accepted}, {"evals", it.evals}};
    if (it.rho_acc) row["rho_acc"] = *it.rho_acc;
    if (result.is_corrected) row["corrected"] = it.corrected;
    j["iterations"].push_back(std::move(row));
  }
  j["termination"] = to_string(result.termination);
  j["kkt_warnings"] = result.kkt_warnings;
  j["model_resets"] = result.model_resets;
  j["final_center"] = vector_json(result.final_center);
  j["final_delta"] = result.final_delta;
  if (result.is_corrected) {
    j["weights_trajectory"] = nlohmann::json::array();
    for (const auto& [k, C] : result.weights_trajectory) {
      j["weights_trajectory"].push_back({k, C.c1(), C.c2(), C.c3()});
    }
    j["switch_count"] = result.switch_count;
  }
  return j;
}

SolverResult run(const Objective& objective, const Vector& x0, const SolverConfig& config,
                 const WeightCoefficients& weights, const std::string& problem,
                 const IterationObserver& observer) {
  detail::WeightPolicy policy;
  policy.initial = weights;
  return detail::drive(objective, x0, config, policy, problem, observer);
}

}  // namespace remu
