#pragma once

// Projective integrators on the Poincare ball.
//
// A state is an n x d matrix holding one ball point per row. The dynamics are
// given as a vector *flow*: a map from (state, t) to ball points, whose
// tangent field is recovered row-wise as log_h(F(h, t)). Every stepper moves
// along exp_h(tau * X) with X assembled in the tangent space at h.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hgde/ball.hpp"

namespace hgde {

using State = Matrix;
using FlowFn = std::function<State(const State& state, double t)>;

enum class Method { heuler, hrk4, ham };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

struct SolverSpec {
  Method method = Method::heuler;
  double tau = 1.0;
  double horizon = 1.0;
  int s_min = 2;
  int s_max = 4;
  bool record_trace = true;

  /// Throws InputError on an inconsistent specification.
  void validate() const;
};

struct TrajectoryPoint {
  double t;
  State state;
};

using Trajectory = std::vector<TrajectoryPoint>;

struct SolveResult {
  State final_state;
  Trajectory trajectory;
};

/// Adams-Bashforth / Adams-Moulton coefficient rows for orders 1..4. Row s has
/// s entries, newest slope first; every row is normalized to sum to one.
struct AdamsTables {
  static constexpr int kMaxOrder = 4;
  std::array<std::vector<double>, kMaxOrder> bashforth;
  std::array<std::vector<double>, kMaxOrder> moulton;

  static const AdamsTables& standard();
};

/// Stage weights {1, 3, 3, 1} of the four-stage scheme, normalized.
std::array<double, 4> hrk4_weights();

State heuler_step(const State& h, double t, double tau, const FlowFn& flow,
                  Curvature k);
State hrk4_step(const State& h, double t, double tau, const FlowFn& flow,
                Curvature k);

/// Row-wise exp_x(ratio * log_x(y)); ratio must lie in [0, 1].
Vector geodesic_interpolate(const Vector& x, const Vector& y, double ratio,
                            Curvature k);
State geodesic_interpolate(const State& x, const State& y, double ratio, Curvature k);

/// Adams predictor-corrector run with a four-stage warm-up.
SolveResult ham_solve(const State& h0, const FlowFn& flow, const SolverSpec& spec,
                      Curvature k);

/// Integrates over [0, spec.horizon] with the configured method. When the last
/// grid step overshoots the horizon, the final state is obtained by geodesic
/// interpolation between the last two grid states.
SolveResult solve(const State& h0, const FlowFn& flow, const SolverSpec& spec,
                  Curvature k);

/// Closed-form test problem for convergence studies.
///
/// Each row i moves along the geodesic exp_{h0_i}(g v0_i). The field at a point
/// with geodesic parameter g is (g + cos t) PT_{h0 -> h}(v0), so the exact
/// parameter is g(t) = (e^t + sin t - cos t) / 2.
class GeodesicOracle {
 public:
  GeodesicOracle(State origin, State direction, Curvature k);

  /// The vector flow exp_h(field(h, t)).
  FlowFn flow() const;
  State exact(double t) const;
  static double parameter(double t);

  const State& origin() const { return origin_; }

 private:
  State origin_;
  State direction_;
  Curvature k_;
};

}  // namespace hgde
