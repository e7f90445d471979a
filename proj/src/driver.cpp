#include "driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "remu/errors.hpp"

namespace remu::detail {

namespace {

constexpr double kFailedResidual = std::numeric_limits<double>::infinity();
constexpr int kMaxPullbacks = 40;

std::optional<BuildReport> try_build(const QuadraticModel& prev, const InterpolationSet& set,
                                     const Vector& center, const WeightCoefficients& C, double r) {
  try {
    return build_model_report(prev, set, center, C, r);
  } catch (const IllConditionedKkt&) {
  } catch (const ModelQualityError&) {
  } catch (const DegenerateWeights&) {
  }
  return std::nullopt;
}

double rho_or_reject(double f_old, double f_new, double m_old, double m_new) {
  if (!std::isfinite(f_new)) return -std::numeric_limits<double>::infinity();
  try {
    return compute_rho(f_old, f_new, m_old, m_new);
  } catch (const DegenerateModelDecrease&) {
    return -std::numeric_limits<double>::infinity();
  }
}

SolverConfig resolved(SolverConfig config, const Vector& x0) {
  if (config.delta0 <= 0.0) {
    config.delta0 = std::max(1.0, x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0);
  }
  if (config.delta_max <= 0.0) config.delta_max = 1e3 * config.delta0;
  config.validate();
  return config;
}

class Evaluator {
 public:
  Evaluator(const Objective& objective, SolverResult& result, const SolverConfig& config)
      : objective_(objective), result_(result), config_(config) {}

  bool exhausted() const { return result_.history.size() >= config_.max_evals; }

  double operator()(const Vector& x) {
    const std::size_t index = result_.history.size() + 1;
    double f = 0.0;
    try {
      f = objective_(x);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "objective failed at evaluation " << index << " x = [" << x.transpose() << "]: " << e.what();
      throw ObjectiveError(os.str());
    }
    result_.history.emplace_back(index, f);
    if (f < result_.best_f || result_.best_x.size() == 0) {
      result_.best_f = f;
      result_.best_x = x;
    }
    return f;
  }

 private:
  const Objective& objective_;
  SolverResult& result_;
  const SolverConfig& config_;
};

}  // namespace

SolverResult drive(const Objective& objective, const Vector& x0, const SolverConfig& raw_config,
                   const WeightPolicy& policy, const std::string& problem,
                   const IterationObserver& observer) {
  if (x0.size() < 1) throw DimensionError("run: x0 must be nonempty");
  const SolverConfig config = resolved(raw_config, x0);
  const bool correcting = policy.menu != nullptr;
  if (correcting && !policy.menu->contains(policy.initial)) {
    throw std::invalid_argument("run_corrected: initial weights are not in the menu");
  }

  SolverResult result;
  result.problem = problem;
  result.weights = correcting ? "corrected" : format_weights(policy.initial);
  result.is_corrected = correcting;
  Evaluator eval(objective, result, config);

  double delta = config.delta0;
  Vector x = x0;
  result.final_center = x;
  result.final_delta = delta;

  auto pts = initial_points(x0, delta, config.set_size);
  std::vector<double> vals;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (eval.exhausted()) return result;
    double f = eval(pts[i]);
    // Non-finite values are pulled toward x0 until they become usable.
    for (int tries = 0; i > 0 && !std::isfinite(f) && tries < kMaxPullbacks; ++tries) {
      if (eval.exhausted()) return result;
      pts[i] = x0 + 0.5 * (pts[i] - x0);
      f = eval(pts[i]);
    }
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "objective is not finite at initial point " << i << " x = [" << pts[i].transpose() << "]";
      throw ObjectiveError(os.str());
    }
    vals.push_back(f);
  }
  InterpolationSet set(pts, vals, pts.size() - 1);
  set.validate();
  double fx = vals.front();

  WeightCoefficients weights = policy.initial;
  if (correcting) result.weights_trajectory.emplace_back(0, weights);
  QuadraticModel selected = QuadraticModel::constant(x0, fx);

  for (std::size_t k = 0;; ++k) {
    if (eval.exhausted()) {
      result.termination = Termination::max_evals;
      break;
    }
    const QuadraticModel prev = recenter(selected, x);
    double r = norm_radius(config.r_rule, delta, set, x);
    std::optional<BuildReport> trial = try_build(prev, set, x, weights, r);
    if (!trial) {
      ++result.kkt_warnings;
      delta /= config.gamma;
      r = norm_radius(config.r_rule, delta, set, x);
      trial = try_build(prev, set, x, weights, r);
    }
    QuadraticModel model = prev;
    double kkt_residual = kFailedResidual;
    if (trial) {
      model = trial->model;
      kkt_residual = trial->kkt_residual;
    } else {
      ++result.kkt_warnings;
      ++result.model_resets;
    }
    if (observer) observer(IterationSnapshot{k, x, delta, r, set, prev, model, weights});

    // A reset model carries no fresh gradient information, so skip the gradient exits.
    const double gnorm = model.g.norm();
    if (trial && gnorm <= config.tol_grad) {
      result.termination = Termination::tol_grad;
      break;
    }
    if (trial && gnorm <= config.eps_c) {
      if (delta <= config.mu * gnorm) {
        result.termination = Termination::criticality;
        break;
      }
      delta /= config.gamma;
      if (delta < config.tol_delta) {
        result.termination = Termination::tol_delta;
        break;
      }
      continue;
    }

    // The accompanying model shares the set, the radius and the starting model.
    std::optional<QuadraticModel> acc_model;
    std::optional<WeightCoefficients> acc_weights;
    if (correcting) {
      acc_weights = policy.accompany_with_trial ? weights : accompanying_of(weights, *policy.menu);
      if (auto acc = try_build(prev, set, x, *acc_weights, r)) {
        acc_model = acc->model;
      } else {
        ++result.kkt_warnings;
      }
    }

    const Vector step = solve_subproblem(model, delta, config.subproblem);
    const Vector x_new = x + step;
    const double f_new = eval(x_new);
    const bool usable = std::isfinite(f_new);
    const bool fresh = usable && set.find(x_new) == set.size();
    const double rho = rho_or_reject(fx, f_new, model.c, evaluate(model, x_new));

    IterationRecord record;
    record.iteration = k;
    record.rho = rho;
    record.delta = delta;
    record.kkt_residual = kkt_residual;
    record.evals = result.history.size();

    QuadraticModel next_selected = model;
    if (acc_model && fresh) {
      const double rho_acc = rho_or_reject(fx, f_new, acc_model->c, evaluate(*acc_model, x_new));
      record.rho_acc = rho_acc;
      record.corrected = true;
      const WeightCoefficients chosen = correct_weights(rho, rho_acc, weights, *acc_weights);
      if (!(chosen == weights)) {
        next_selected = *acc_model;
        weights = chosen;
        ++result.switch_count;
      }
      result.weights_trajectory.emplace_back(k + 1, weights);
    }

    TrustRegionState state;
    state.x = x;
    state.f = fx;
    state.delta = delta;
    const TrustRegionState next = update_iterate(state, step, f_new, rho, config);
    record.accepted = rho >= config.accept_low;
    result.iterations.push_back(record);

    if (usable) set = update_set(set, x_new, f_new, next.x);
    x = next.x;
    fx = next.f;
    delta = next.delta;
    selected = next_selected;
    result.final_center = x;
    result.final_delta = delta;

    if (delta < config.tol_delta) {
      result.termination = Termination::tol_delta;
      break;
    }
    const auto [lo, hi] = std::minmax_element(set.values().begin(), set.values().end());
    if (*hi - *lo <= config.tol_f * std::max(1.0, std::abs(fx))) {
      result.termination = Termination::tol_f;
      break;
    }
  }
  result.final_center = x;
  result.final_delta = delta;
  return result;
}

}  // namespace remu::detail
