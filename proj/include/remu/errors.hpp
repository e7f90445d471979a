#pragma once

#include <stdexcept>
#include <string>

namespace remu {

/// Input vectors or matrices whose sizes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The ReMU KKT matrix is numerically singular for the current point set.
class IllConditionedKkt : public std::runtime_error {
 public:
  IllConditionedKkt(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}

  /// Reciprocal condition estimate of the equilibrated matrix.
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

/// A freshly built model fails its interpolation or trace consistency check.
class ModelQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weight coefficients that make eta1 vanish.
class DegenerateWeights : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Predicted model decrease is zero, so the reduction ratio is undefined.
class DegenerateModelDecrease : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularHessian : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The user objective threw; the message carries the evaluation index and point.
class ObjectiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace remu
