#include "remu/tn_experiment.hpp"

#include <algorithm>
#include <cmath>

#include "remu/errors.hpp"
#include "remu/trust_region.hpp"

namespace remu {

std::vector<double> TnExperimentResult::errors_for(std::size_t weight_index) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.weight_index == weight_index) out.push_back(r.error);
  }
  return out;
}

LocalDerivatives finite_difference_derivatives(const ResidualFn& residuals, const Vector& x) {
  const Eigen::Index n = x.size();
  auto f = [&](const Vector& y) { return residuals(y).squaredNorm(); };
  Vector h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = 1e-4 * std::max(1.0, std::abs(x[i]));
  LocalDerivatives d{Vector::Zero(n), Matrix::Zero(n, n)};
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    const double fp = f(xp), fm = f(xm);
    d.g[i] = (fp - fm) / (2.0 * h[i]);
    d.H(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      Vector a = x, b = x, c = x, e = x;
      a[i] += h[i], a[j] += h[j];
      b[i] += h[i], b[j] -= h[j];
      c[i] -= h[i], c[j] += h[j];
      e[i] -= h[i], e[j] -= h[j];
      d.H(i, j) = d.H(j, i) = (f(a) - f(b) - f(c) + f(e)) / (4.0 * h[i] * h[j]);
    }
  }
  return d;
}

TnExperimentResult tn_error_experiment(const TnExperimentConfig& config) {
  const TestProblem& prob = config.problem;
  const Vector& x0 = prob.base.x0;
  const auto objective = make_objective(prob);

  TnExperimentResult result;
  result.weights = config.weights;
  std::vector<QuadraticModel> chains(config.weights.size(), QuadraticModel::constant(x0, objective(x0)));

  auto step = [&](const LocalDerivatives& d, double delta) {
    try {
      return truncated_newton_step(d.g, d.H, delta);
    } catch (const SingularHessian&) {
      ++result.singular_fallbacks;
      return truncated_newton_step_lstsq(d.g, d.H, delta);
    }
  };

  SolverConfig cfg;
  cfg.set_size = config.set_size;
  cfg.max_evals = set_cardinality(config.set_size, x0.size()) + config.iterations;
  // Only the iteration count should stop the replay.
  cfg.tol_delta = cfg.tol_f = cfg.tol_grad = cfg.eps_c = 1e-300;

  run(objective, x0, cfg, config.generator, prob.key(), [&](const IterationSnapshot& s) {
    if (s.iteration >= config.iterations) return;
    const LocalDerivatives truth = finite_difference_derivatives(prob.base.residuals, s.center);
    const Vector reference = step(truth, s.delta);
    for (std::size_t w = 0; w < chains.size(); ++w) {
      QuadraticModel prev = recenter(chains[w], s.center);
      try {
        chains[w] = build_model(prev, s.set, s.center, config.weights[w], s.r);
      } catch (const IllConditionedKkt&) {
        ++result.build_failures;
        chains[w] = prev;
      } catch (const ModelQualityError&) {
        ++result.build_failures;
        chains[w] = prev;
      }
      const Vector mine = step(derivatives_at(chains[w], s.center), s.delta);
      result.rows.push_back({s.iteration, w, (mine - reference).norm() / s.delta});
    }
  });
  return result;
}

void write_tn_error_csv(std::ostream& out, const TnExperimentResult& result) {
  out << "iteration,weights,error\n";
  out.precision(17);
  for (const auto& r : result.rows) {
    out << r.iteration << ",\"" << format_weights(result.weights[r.weight_index]) << "\"," << r.error << "\n";
  }
}

void write_tn_quantiles_csv(std::ostream& out, const TnExperimentResult& result) {
  out << "weights,q30,q50,q70\n";
  out.precision(17);
  for (std::size_t w = 0; w < result.weights.size(); ++w) {
    const auto e = result.errors_for(w);
    if (e.empty()) continue;
    out << "\"" << format_weights(result.weights[w]) << "\"," << quantile(e, 0.3) << "," << quantile(e, 0.5) << ","
        << quantile(e, 0.7) << "\n";
  }
}

}  // namespace remu
