#pragma once

// Closed-form geometry of the Poincare ball with constant curvature kappa < 0.
//
// Points and tangent vectors are plain Eigen vectors; a tangent vector is
// always paired with the base point passed alongside it. Every function that
// returns a ball point passes its result through project_to_ball().

#include <span>

#include <Eigen/Core>

namespace hgde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative margin kept between any point and the ball boundary.
inline constexpr double kBoundaryEps = 1e-5;

/// Upper clamp for atanh arguments.
inline constexpr double kAtanhMax = 1.0 - 1e-15;

/// Sectional curvature of the ball. Always strictly negative.
class Curvature {
 public:
  explicit Curvature(double kappa);

  double kappa() const { return kappa_; }
  /// |kappa|
  double scale() const { return -kappa_; }
  double sqrt_scale() const { return sqrt_scale_; }
  /// Radius 1/sqrt(|kappa|) of the open ball.
  double radius() const { return 1.0 / sqrt_scale_; }
  /// Largest admissible norm, (1 - kBoundaryEps) * radius().
  double max_norm() const { return (1.0 - kBoundaryEps) * radius(); }

  friend bool operator==(const Curvature&, const Curvature&) = default;

 private:
  double kappa_;
  double sqrt_scale_;
};

namespace ball {

/// Rescales x onto the shrunken ball if it lies outside; identity otherwise.
Vector project_to_ball(const Vector& x, Curvature k);

/// lambda_x = 2 / (1 + kappa |x|^2).
double conformal_factor(const Vector& x, Curvature k);

Vector mobius_add(const Vector& x, const Vector& y, Curvature k);
Vector mobius_scalar(double r, const Vector& x, Curvature k);
Vector mobius_matvec(const Matrix& w, const Vector& x, Curvature k);

Vector exp_map(const Vector& x, const Vector& v, Curvature k);
Vector log_map(const Vector& x, const Vector& y, Curvature k);

/// exp/log at the origin.
Vector exp0(const Vector& v, Curvature k);
Vector log0(const Vector& y, Curvature k);

double distance(const Vector& x, const Vector& y, Curvature k);

/// gyr[a, b]c, evaluated through its closed-form linear expansion. `c` may be
/// any vector (gyrations act linearly on tangent vectors too).
Vector gyration(const Vector& a, const Vector& b, const Vector& c, Curvature k);

/// Carries v from the tangent space at x to the tangent space at y.
Vector parallel_transport(const Vector& x, const Vector& y, const Vector& v,
                          Curvature k);

/// Weighted Mobius gyromidpoint of `points`. Throws NumericalError when
/// sum_j |w_j| (lambda_j - 1) vanishes.
Vector gyromidpoint(std::span<const Vector> points, std::span<const double> weights,
                    Curvature k);

// Row-wise versions over n x d matrices, one point (or tangent) per row.

Matrix exp_rows(const Matrix& base, const Matrix& tangents, Curvature k);
Matrix log_rows(const Matrix& base, const Matrix& targets, Curvature k);
Matrix transport_rows(const Matrix& from, const Matrix& to, const Matrix& tangents,
                      Curvature k);
Matrix exp0_rows(const Matrix& tangents, Curvature k);
Matrix log0_rows(const Matrix& points, Curvature k);
Matrix project_rows(const Matrix& points, Curvature k);

}  // namespace ball
}  // namespace hgde
