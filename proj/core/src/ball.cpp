#include "hgde/ball.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hgde/errors.hpp"

namespace hgde {

Curvature::Curvature(double kappa) : kappa_(kappa), sqrt_scale_(0.0) {
  if (!std::isfinite(kappa) || !(kappa < 0.0)) {
    throw InputError("curvature must be finite and strictly negative, got " +
                     std::to_string(kappa));
  }
  sqrt_scale_ = std::sqrt(-kappa);
}

namespace ball {
namespace {

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) {
    throw InputError(std::string(what) + " has non-finite entries");
  }
}

void require_same_dim(const Vector& x, const Vector& y, const char* op) {
  if (x.size() != y.size()) {
    throw InputError(std::string(op) + ": dimension mismatch (" +
                     std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                     ")");
  }
}

double clamped_atanh(double z) { return std::atanh(std::min(z, kAtanhMax)); }

// Mobius addition without the boundary projection; used for intermediates such
// as -x (+) y whose norm is only ever fed to atanh.
Vector add_raw(const Vector& x, const Vector& y, double kappa) {
  const double xy = x.dot(y);
  const double x2 = x.squaredNorm();
  const double y2 = y.squaredNorm();
  const double num_x = 1.0 - 2.0 * kappa * xy - kappa * y2;
  const double num_y = 1.0 + kappa * x2;
  const double den = 1.0 - 2.0 * kappa * xy + kappa * kappa * x2 * y2;
  return (num_x * x + num_y * y) / den;
}

}  // namespace

Vector project_to_ball(const Vector& x, Curvature k) {
  require_finite(x, "project_to_ball input");
  const double norm = x.norm();
  const double limit = k.max_norm();
  if (norm > limit) {
    return x * (limit / norm);
  }
  return x;
}

double conformal_factor(const Vector& x, Curvature k) {
  const double limit = k.max_norm();
  const double x2 = std::min(x.squaredNorm(), limit * limit);
  return 2.0 / (1.0 + k.kappa() * x2);
}

Vector mobius_add(const Vector& x, const Vector& y, Curvature k) {
  require_same_dim(x, y, "mobius_add");
  require_finite(x, "mobius_add lhs");
  require_finite(y, "mobius_add rhs");
  return project_to_ball(add_raw(x, y, k.kappa()), k);
}

Vector mobius_scalar(double r, const Vector& x, Curvature k) {
  if (!std::isfinite(r)) {
    throw InputError("mobius_scalar: non-finite scalar");
  }
  require_finite(x, "mobius_scalar input");
  const double norm = x.norm();
  if (norm == 0.0) {
    return Vector::Zero(x.size());
  }
  const double sk = k.sqrt_scale();
  const double scaled = std::tanh(r * clamped_atanh(sk * norm)) / (sk * norm);
  return project_to_ball(scaled * x, k);
}

Vector mobius_matvec(const Matrix& w, const Vector& x, Curvature k) {
  if (w.cols() != x.size()) {
    throw InputError("mobius_matvec: matrix has " + std::to_string(w.cols()) +
                     " columns but the point has dimension " +
                     std::to_string(x.size()));
  }
  return exp0(w * log0(x, k), k);
}

Vector exp_map(const Vector& x, const Vector& v, Curvature k) {
  require_same_dim(x, v, "exp_map");
  require_finite(x, "exp_map base");
  require_finite(v, "exp_map tangent");
  const double vn = v.norm();
  if (vn == 0.0) {
    return x;
  }
  const double sk = k.sqrt_scale();
  const double lam = conformal_factor(x, k);
  const Vector step = (std::tanh(sk * lam * vn / 2.0) / (sk * vn)) * v;
  return project_to_ball(add_raw(x, step, k.kappa()), k);
}

Vector log_map(const Vector& x, const Vector& y, Curvature k) {
  require_same_dim(x, y, "log_map");
  require_finite(x, "log_map base");
  require_finite(y, "log_map target");
  if (x == y) {
    return Vector::Zero(x.size());
  }
  const Vector u = add_raw(-x, y, k.kappa());
  const double un = u.norm();
  if (un == 0.0) {
    return Vector::Zero(x.size());
  }
  const double sk = k.sqrt_scale();
  const double lam = conformal_factor(x, k);
  return (2.0 * clamped_atanh(sk * un) / (sk * lam * un)) * u;
}

Vector exp0(const Vector& v, Curvature k) {
  require_finite(v, "exp0 tangent");
  const double vn = v.norm();
  if (vn == 0.0) {
    return Vector::Zero(v.size());
  }
  const double sk = k.sqrt_scale();
  return project_to_ball((std::tanh(sk * vn) / (sk * vn)) * v, k);
}

Vector log0(const Vector& y, Curvature k) {
  require_finite(y, "log0 point");
  const double yn = y.norm();
  if (yn == 0.0) {
    return Vector::Zero(y.size());
  }
  const double sk = k.sqrt_scale();
  return (clamped_atanh(sk * yn) / (sk * yn)) * y;
}

double distance(const Vector& x, const Vector& y, Curvature k) {
  require_same_dim(x, y, "distance");
  require_finite(x, "distance lhs");
  require_finite(y, "distance rhs");
  if (x == y) {
    return 0.0;
  }
  const double sk = k.sqrt_scale();
  return 2.0 / sk * clamped_atanh(sk * add_raw(-x, y, k.kappa()).norm());
}

Vector gyration(const Vector& a, const Vector& b, const Vector& c, Curvature k) {
  require_same_dim(a, b, "gyration");
  require_same_dim(a, c, "gyration");
  const double kappa = k.kappa();
  const double k2 = kappa * kappa;
  const double a2 = a.squaredNorm();
  const double b2 = b.squaredNorm();
  const double ab = a.dot(b);
  const double ac = a.dot(c);
  const double bc = b.dot(c);
  const double coef_a = -k2 * ac * b2 - kappa * bc + 2.0 * k2 * ab * bc;
  const double coef_b = -k2 * bc * a2 + kappa * ac;
  const double den = 1.0 - 2.0 * kappa * ab + k2 * a2 * b2;
  return c + 2.0 * (coef_a * a + coef_b * b) / den;
}

Vector parallel_transport(const Vector& x, const Vector& y, const Vector& v,
                          Curvature k) {
  require_same_dim(x, y, "parallel_transport");
  require_same_dim(x, v, "parallel_transport");
  require_finite(v, "parallel_transport tangent");
  if (x == y) {
    return v;
  }
  const double ratio = conformal_factor(x, k) / conformal_factor(y, k);
  return ratio * gyration(y, -x, v, k);
}

Vector gyromidpoint(std::span<const Vector> points, std::span<const double> weights,
                    Curvature k) {
  if (points.empty() || points.size() != weights.size()) {
    throw InputError("gyromidpoint: need equally many (>0) points and weights");
  }
  const auto dim = points.front().size();
  Vector num = Vector::Zero(dim);
  double den = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != dim) {
      throw InputError("gyromidpoint: points have inconsistent dimensions");
    }
    if (!std::isfinite(weights[j])) {
      throw InputError("gyromidpoint: non-finite weight");
    }
    const double lam = conformal_factor(points[j], k);
    num += (weights[j] * lam) * points[j];
    den += std::abs(weights[j]) * (lam - 1.0);
  }
  if (!(den > 1e-12)) {
    throw NumericalError("gyromidpoint: ill-posed weights (denominator " +
                         std::to_string(den) + ")");
  }
  return mobius_scalar(0.5, num / den, k);
}

namespace {

template <typename Op>
Matrix rowwise(const Matrix& a, const Matrix& b, const char* what, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError(std::string(what) + ": shape mismatch");
  }
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    out.row(i) = op(Vector(a.row(i)), Vector(b.row(i))).transpose();
  }
  return out;
}

}  // namespace

Matrix exp_rows(const Matrix& base, const Matrix& tangents, Curvature k) {
  return rowwise(base, tangents, "exp_rows",
                 [k](const Vector& x, const Vector& v) { return exp_map(x, v, k); });
}

Matrix log_rows(const Matrix& base, const Matrix& targets, Curvature k) {
  return rowwise(base, targets, "log_rows",
                 [k](const Vector& x, const Vector& y) { return log_map(x, y, k); });
}

Matrix transport_rows(const Matrix& from, const Matrix& to, const Matrix& tangents,
                      Curvature k) {
  if (from.rows() != to.rows() || from.cols() != to.cols() ||
      from.rows() != tangents.rows() || from.cols() != tangents.cols()) {
    throw InputError("transport_rows: shape mismatch");
  }
  Matrix out(from.rows(), from.cols());
  for (Eigen::Index i = 0; i < from.rows(); ++i) {
    out.row(i) = parallel_transport(Vector(from.row(i)), Vector(to.row(i)),
                                    Vector(tangents.row(i)), k)
                     .transpose();
  }
  return out;
}

Matrix exp0_rows(const Matrix& tangents, Curvature k) {
  Matrix out(tangents.rows(), tangents.cols());
  for (Eigen::Index i = 0; i < tangents.rows(); ++i) {
    out.row(i) = exp0(Vector(tangents.row(i)), k).transpose();
  }
  return out;
}

Matrix log0_rows(const Matrix& points, Curvature k) {
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) = log0(Vector(points.row(i)), k).transpose();
  }
  return out;
}

Matrix project_rows(const Matrix& points, Curvature k) {
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row(i) = project_to_ball(Vector(points.row(i)), k).transpose();
  }
  return out;
}

}  // namespace ball
}  // namespace hgde
