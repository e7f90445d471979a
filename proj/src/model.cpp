#include "remu/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "remu/errors.hpp"

namespace remu {

namespace {

void require_dim(const QuadraticModel& m, const Vector& x, const char* what) {
  if (x.size() != m.dim()) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(m.dim()) +
                         ", got " + std::to_string(x.size()));
  }
}

void require_same_base(const QuadraticModel& a, const QuadraticModel& b) {
  if (a.dim() != b.dim()) throw DimensionError("model arithmetic: dimension mismatch");
  if (a.base_point != b.base_point) {
    throw std::invalid_argument("model arithmetic: models must share a base point");
  }
}

}  // namespace

QuadraticModel::QuadraticModel(Vector base, double c_, Vector g_, Matrix H_)
    : base_point(std::move(base)), c(c_), g(std::move(g_)), H(std::move(H_)) {
  const auto n = base_point.size();
  if (g.size() != n || H.rows() != n || H.cols() != n) {
    throw DimensionError("QuadraticModel: inconsistent sizes");
  }
  if (symmetry_defect(H) > 1e-12) throw std::invalid_argument("QuadraticModel: H is not symmetric");
}

QuadraticModel QuadraticModel::constant(const Vector& base, double value) {
  const auto n = base.size();
  return {base, value, Vector::Zero(n), Matrix::Zero(n, n)};
}

WeightCoefficients::WeightCoefficients(double c1, double c2, double c3) : c_{c1, c2, c3} {
  if (!(c1 >= 0.0 && c2 >= 0.0 && c3 >= 0.0)) {
    throw std::invalid_argument("weight coefficients must be nonnegative");
  }
  if (std::abs(c1 + c2 + c3 - 1.0) > 1e-12) {
    throw std::invalid_argument("weight coefficients must sum to one");
  }
}

const std::vector<WeightCoefficients>& standard_weight_rows() {
  static const std::vector<WeightCoefficients> rows = {
      {1.0, 0.0, 0.0},           {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, WeightCoefficients::barycentric(),
      {0.5, 0.5, 0.0},           {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5},
  };
  return rows;
}

namespace {

double parse_entry(const std::string& token) {
  auto number = [&](const std::string& t) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) {
      throw std::invalid_argument("weights: cannot parse '" + token + "'");
    }
    return v;
  };
  const auto slash = token.find('/');
  if (slash == std::string::npos) return number(token);
  const double den = number(token.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("weights: zero denominator in '" + token + "'");
  return number(token.substr(0, slash)) / den;
}

}  // namespace

WeightCoefficients parse_weights(const std::string& text) {
  std::vector<double> c;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    std::string token = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    token.erase(0, token.find_first_not_of(" \t"));
    token.erase(token.find_last_not_of(" \t") + 1);
    c.push_back(parse_entry(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (c.size() != 3) throw std::invalid_argument("weights: expected three comma-separated entries");
  const double sum = c[0] + c[1] + c[2];
  if (!(std::abs(sum - 1.0) <= 1e-9)) throw std::invalid_argument("weights: entries must sum to one");
  return {c[0] / sum, c[1] / sum, c[2] / sum};
}

double evaluate(const QuadraticModel& model, const Vector& x) {
  require_dim(model, x, "evaluate");
  const Vector s = x - model.base_point;
  return 0.5 * s.dot(model.H * s) + model.g.dot(s) + model.c;
}

Vector gradient(const QuadraticModel& model, const Vector& x) {
  require_dim(model, x, "gradient");
  return model.H * (x - model.base_point) + model.g;
}

QuadraticModel recenter(const QuadraticModel& model, const Vector& new_base) {
  require_dim(model, new_base, "recenter");
  QuadraticModel out = model;
  out.base_point = new_base;
  out.c = evaluate(model, new_base);
  out.g = gradient(model, new_base);
  return out;
}

QuadraticModel operator+(const QuadraticModel& lhs, const QuadraticModel& rhs) {
  require_same_base(lhs, rhs);
  QuadraticModel out = lhs;
  out.c += rhs.c;
  out.g += rhs.g;
  out.H += rhs.H;
  return out;
}

QuadraticModel operator-(const QuadraticModel& lhs, const QuadraticModel& rhs) {
  return lhs + (-1.0) * rhs;
}

QuadraticModel operator*(double s, const QuadraticModel& model) {
  QuadraticModel out = model;
  out.c *= s;
  out.g *= s;
  out.H *= s;
  return out;
}

EtaCoefficients eta_coefficients(const WeightCoefficients& C, int n, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("eta_coefficients: radius must be positive");
  if (n < 1) throw std::invalid_argument("eta_coefficients: dimension must be positive");
  const double np2 = n + 2.0;
  const double np4 = n + 4.0;
  const double r2 = r * r;
  const double r4 = r2 * r2;
  EtaCoefficients e;
  e.eta1 = C.c1() * r4 / (2.0 * np4 * np2) + C.c2() * r2 / np2 + C.c3();
  e.eta2 = C.c1() * r2 / np2 + C.c2();
  e.eta3 = C.c1() * r4 / (4.0 * np4 * np2);
  e.eta4 = C.c1() * r2 / np2;
  e.eta5 = C.c1();
  return e;
}

double unit_ball_volume(int n) {
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double weighted_norm_sq(const QuadraticModel& model, const Vector& center, double r,
                        const WeightCoefficients& C) {
  require_dim(model, center, "weighted_norm_sq");
  if (!(r > 0.0)) throw std::invalid_argument("weighted_norm_sq: radius must be positive");
  if (model.base_point != center) {
    throw std::invalid_argument("weighted_norm_sq: model must be expressed about the ball center");
  }
  const int n = static_cast<int>(model.dim());
  const auto e = eta_coefficients(C, n, r);
  const double trace = model.H.trace();
  const double bracket = e.eta1 * model.H.squaredNorm() + e.eta2 * model.g.squaredNorm() +
                         e.eta3 * trace * trace + e.eta4 * model.c * trace +
                         e.eta5 * model.c * model.c;
  return unit_ball_volume(n) * std::pow(r, n) * bracket;
}

double symmetry_defect(const Matrix& H) {
  if (H.size() == 0) return 0.0;
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  return asym / (1.0 + H.cwiseAbs().maxCoeff());
}

}  // namespace remu
