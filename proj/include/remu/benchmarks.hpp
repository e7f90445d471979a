#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "remu/corrected.hpp"
#include "remu/problems.hpp"
#include "remu/trust_region.hpp"

namespace remu {

constexpr double kUnsolved = std::numeric_limits<double>::infinity();

/// (f(x_N) - f0) / (f_best - f0) clamped to [0, 1], with x_N the best of the first
/// history.size() evaluations. Throws std::invalid_argument when f_best >= f0.
double f_accuracy(const std::vector<double>& history, double f0, double f_best);

/// Smallest N <= n_max with f_accuracy of the first N values >= 1 - tau; kUnsolved otherwise.
double evals_to_accuracy(const std::vector<double>& history, double tau, double f0, double f_best,
                         std::size_t n_max);

struct ProfileProblem {
  std::string key;
  int n = 0;
};

/// N_{a,p} for every solver a and problem p; kUnsolved marks a failure.
struct ProfileTable {
  std::vector<std::string> solvers;
  std::vector<ProfileProblem> problems;
  std::vector<std::vector<double>> evals;  ///< evals[a][p]

  double at(std::size_t a, std::size_t p) const { return evals.at(a).at(p); }
};

using ProfileCurves = std::map<std::string, std::vector<double>>;

/// rho_a(alpha) = |{p : r_{a,p} <= alpha}| / |P|, r_{a,p} = N_{a,p} / min_b N_{b,p}.
ProfileCurves performance_profile(const ProfileTable& table, const std::vector<double>& alpha_grid);

/// delta_a(beta) = |{p : N_{a,p} <= beta (n_p + 1)}| / |P|.
ProfileCurves data_profile(const ProfileTable& table, const std::vector<double>& beta_grid);

/// A solver is either fixed weights or the corrected strategy.
struct SolverSpec {
  std::string name;
  std::optional<WeightCoefficients> weights;  ///< nullopt selects the corrected strategy
  CoefficientMenu menu;
  SolverConfig config;  ///< max_evals is overwritten per problem

  static SolverSpec fixed(const WeightCoefficients& w, SolverConfig config = {});
  static SolverSpec corrected(SolverConfig config = {}, CoefficientMenu menu = CoefficientMenu());
};

/// Runs one solver on one objective with the given evaluation budget.
SolverResult run_solver(const SolverSpec& solver, const Objective& objective, const Vector& x0,
                        std::size_t budget, const std::string& problem);

struct RunRecord {
  std::string solver;
  std::string problem;
  std::string variant;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> history;
  bool failed = false;
  std::string error;
  std::size_t kkt_warnings = 0;
  bool any_kkt_warning = false;
};

struct SuiteResult {
  std::vector<RunRecord> runs;  ///< Sorted by (solver, problem, variant).
  std::vector<std::string> solvers;
  std::vector<TestProblem> problems;

  /// f0 and f_best for a problem: f0 is the first history value, f_best the smaller of
  /// the registry value (smooth forms only) and the best observed value over all solvers.
  std::pair<double, double> reference_values(const TestProblem& problem) const;

  /// Problems with f_best >= f0 are dropped.
  ProfileTable table(double tau) const;
};

/// Every (solver, problem) pair with budget = budget_multiplier * (n + 1), on `workers` threads.
/// Results do not depend on the worker count.
SuiteResult run_suite(const std::vector<TestProblem>& problems, const std::vector<SolverSpec>& solvers,
                      double budget_multiplier, unsigned workers = 1);

/// solver,problem,variant,n,seed,eval_index,f
void write_histories_csv(std::ostream& out, const SuiteResult& suite);

/// Inverse of write_histories_csv. Failed runs, which have no rows, read back as absent.
SuiteResult read_histories_csv(std::istream& in);

/// kind,solver,tau,x,value for performance (alpha) and data (beta) curves.
void write_profiles_csv(std::ostream& out, const SuiteResult& suite, const std::vector<double>& taus,
                        const std::vector<double>& alpha_grid, const std::vector<double>& beta_grid);

/// Problem instances for every registry entry (or the named subset) and variant list.
std::vector<TestProblem> make_problems(const std::vector<std::string>& names, const std::vector<Variant>& variants,
                                       double sigma, std::uint64_t seed);

}  // namespace remu
