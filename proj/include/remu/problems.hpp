#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "remu/model.hpp"

namespace remu {

/// Residual vector F(x) of a least-squares test function.
using ResidualFn = std::function<Vector(const Vector&)>;

struct ProblemDescriptor {
  std::string name;
  int n = 0;
  int p = 0;
  Vector x0;
  double f_best = 0.0;  ///< Best known value of sum F_i^2.
  ResidualFn residuals;
};

/// Moré-Garbow-Hillstrom residual functions shipped with the library, in registry order.
const std::vector<ProblemDescriptor>& problem_registry();

/// Registry entry by name; throws std::out_of_range for unknown names.
const ProblemDescriptor& find_problem(const std::string& name);

/// Registry as JSON descriptors {name, n, p, x0, f_best}.
nlohmann::json registry_json();

/// Descriptors read from JSON. Each entry must name a registry function and may override
/// x0 and f_best; n and p must match the function.
std::vector<ProblemDescriptor> load_registry(const nlohmann::json& descriptors);

enum class Variant {
  smooth,
  nondiff,
  det_add,
  det_mult3,
  det_mult,
  stoch_add_gauss,
  stoch_add_unif,
  stoch_rel_gauss,
  stoch_rel_unif,
  smooth_repeat,
};

const std::vector<Variant>& all_variants();
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
bool is_stochastic(Variant v);

/// Deterministic oscillatory noise of Moré and Wild (2009), values in [-1, 1].
double oscillatory_noise(const Vector& x);

/// Seeded hash of x with coordinates quantized to 1e-12.
std::uint64_t point_hash(const Vector& x, std::uint64_t seed);

struct TestProblem {
  ProblemDescriptor base;
  Variant variant = Variant::smooth;
  double sigma = 1e-2;
  std::uint64_t seed = 0;

  /// Registry best value, known only for the smooth forms.
  std::optional<double> known_f_best() const;
  std::string key() const;  ///< "name/variant"
};

/// Objective for the chosen variant. Stochastic noise is a function of (seed, point), so
/// repeated evaluation at one point returns one value.
std::function<double(const Vector&)> make_objective(const TestProblem& problem);

}  // namespace remu
