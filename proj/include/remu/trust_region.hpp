#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "remu/builder.hpp"
#include "remu/model.hpp"
#include "remu/subproblem.hpp"

namespace remu {

using Objective = std::function<double(const Vector&)>;

enum class SetSize { n_plus_3, two_n_plus_1 };
enum class RadiusRule {
  delta,     ///< r = Delta_k
  footnote,  ///< r = max{10 Delta_k, max_i ||y_i - x_k||}
};

struct SolverConfig {
  double delta0 = 0.0;     ///< <= 0 selects max{1, ||x0||_inf}.
  double delta_max = 0.0;  ///< <= 0 selects 1e3 * delta0.
  double gamma = 2.0;
  double accept_low = 0.25;
  double accept_high = 0.75;
  double mu = 0.1;
  double eps_c = 1e-8;
  double tol_delta = 1e-8;
  double tol_f = 1e-8;
  double tol_grad = 1e-8;
  std::size_t max_evals = 100;
  SetSize set_size = SetSize::two_n_plus_1;
  RadiusRule r_rule = RadiusRule::delta;
  std::uint64_t rng_seed = 0;
  SubproblemMethod subproblem = SubproblemMethod::exact;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

std::size_t set_cardinality(SetSize size, Eigen::Index n);

/// x0 followed by coordinate displacements of length delta in the documented order.
std::vector<Vector> initial_points(const Vector& x0, double delta, SetSize size);

/// Radius of the ball that defines the ReMU norm.
double norm_radius(RadiusRule rule, double delta, const InterpolationSet& set, const Vector& center);

/// (f_old - f_new) / (m_old - m_new). Throws DegenerateModelDecrease when the
/// model change is below 1e-300 in magnitude.
double compute_rho(double f_old, double f_new, double m_old, double m_new);

struct TrustRegionState {
  Vector x;
  double f = 0.0;
  double delta = 0.0;
  QuadraticModel model;
  InterpolationSet set;
  std::size_t eval_count = 0;
  Vector best_point;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, double>> history;
};

/// Center and radius update. `f_trial` is f(x + step). Only x, f and delta change.
TrustRegionState update_iterate(const TrustRegionState& state, const Vector& step, double f_trial,
                                double rho, const SolverConfig& config);

/// Drops the point farthest from `next_center` (lowest index on ties) and puts the
/// new point in its slot. A point already present only has its value refreshed.
InterpolationSet update_set(const InterpolationSet& set, const Vector& new_point, double new_value,
                            const Vector& next_center);

enum class Termination { max_evals, tol_delta, tol_f, tol_grad, criticality };

std::string to_string(Termination reason);

struct IterationRecord {
  std::size_t iteration = 0;
  double rho = 0.0;
  double delta = 0.0;  ///< Radius used for the trial step.
  double kkt_residual = 0.0;
  bool accepted = false;
  std::size_t evals = 0;  ///< Evaluation count after this iteration.
  // Corrected runs only.
  std::optional<double> rho_acc;
  bool corrected = false;
};

struct SolverResult {
  std::string problem;
  std::string weights;  ///< "C1,C2,C3" or "corrected".
  std::vector<std::pair<std::size_t, double>> history;  ///< (1-based eval index, f).
  Vector best_x;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::max_evals;
  std::size_t kkt_warnings = 0;  ///< Failed builds that forced a shrink or a model reset.
  std::size_t model_resets = 0;
  Vector final_center;
  double final_delta = 0.0;
  // Corrected runs only.
  std::vector<std::pair<std::size_t, WeightCoefficients>> weights_trajectory;
  std::size_t switch_count = 0;
  bool is_corrected = false;
};

nlohmann::json to_json(const SolverResult& result);

/// State seen by an observer right after the model of an iteration is built.
struct IterationSnapshot {
  std::size_t iteration = 0;
  const Vector& center;
  double delta;
  double r;
  const InterpolationSet& set;
  const QuadraticModel& previous;  ///< Model the update started from, recentered.
  const QuadraticModel& model;
  const WeightCoefficients& weights;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

std::string format_weights(const WeightCoefficients& C);

/// Trust-region method with ReMU models built from fixed weights.
SolverResult run(const Objective& objective, const Vector& x0, const SolverConfig& config,
                 const WeightCoefficients& weights, const std::string& problem = "",
                 const IterationObserver& observer = {});

}  // namespace remu
