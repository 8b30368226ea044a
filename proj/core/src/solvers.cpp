#include "hgde/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "hgde/errors.hpp"

namespace hgde {

Method parse_method(std::string_view name) {
  if (name == "heuler") return Method::heuler;
  if (name == "hrk4") return Method::hrk4;
  if (name == "ham") return Method::ham;
  throw InputError("unknown integration method '" + std::string(name) +
                   "' (expected heuler, hrk4 or ham)");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::heuler: return "heuler";
    case Method::hrk4: return "hrk4";
    case Method::ham: return "ham";
  }
  return "unknown";
}

void SolverSpec::validate() const {
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw InputError("step size tau must be positive");
  }
  if (!std::isfinite(horizon) || horizon <= 0.0) {
    throw InputError("horizon T must be positive");
  }
  if (tau > horizon * (1.0 + 1e-12)) {
    throw InputError("step size tau must not exceed the horizon T");
  }
  if (s_min < 1 || s_max < s_min || s_max > AdamsTables::kMaxOrder) {
    throw InputError("Adams orders must satisfy 1 <= s_min <= s_max <= 4");
  }
}

namespace {

std::vector<double> normalized(std::vector<double> row) {
  const double sum = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& c : row) c /= sum;
  return row;
}

AdamsTables make_standard_tables() {
  AdamsTables t;
  t.bashforth = {
      normalized({1.0}),
      normalized({3.0 / 2.0, -1.0 / 2.0}),
      normalized({23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0}),
      normalized({55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0}),
  };
  t.moulton = {
      normalized({1.0}),
      normalized({1.0 / 2.0, 1.0 / 2.0}),
      normalized({5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0}),
      normalized({9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0}),
  };
  return t;
}

// Evaluates the flow and rejects malformed or non-finite output.
State evaluate(const FlowFn& flow, const State& h, double t) {
  State out = flow(h, t);
  if (out.rows() != h.rows() || out.cols() != h.cols()) {
    throw InputError("flow output has shape " + std::to_string(out.rows()) + "x" +
                     std::to_string(out.cols()) + ", expected " +
                     std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  if (!out.allFinite()) {
    throw NumericalError("flow produced non-finite values at t=" + std::to_string(t));
  }
  return out;
}

// Tangent field at h: log_h(F(h, t)).
Matrix field(const FlowFn& flow, const State& h, double t, Curvature k) {
  return ball::log_rows(h, evaluate(flow, h, t), k);
}

// Field at a stage point, carried back to the tangent space at h.
Matrix stage_slope(const FlowFn& flow, const State& h, const State& stage, double t,
                   Curvature k) {
  return ball::transport_rows(stage, h, field(flow, stage, t, k), k);
}

struct Hrk4Step {
  Matrix slope;  // field at the start point
  State next;
};

Hrk4Step hrk4_with_slope(const State& h, double t, double tau, const FlowFn& flow,
                         Curvature k) {
  static const std::array<double, 4> w = hrk4_weights();
  const Matrix s1 = field(flow, h, t, k);
  const State p2 = ball::exp_rows(h, (tau / 3.0) * s1, k);
  const Matrix s2 = stage_slope(flow, h, p2, t + tau / 3.0, k);
  const State p3 = ball::exp_rows(h, tau * (s2 - s1 / 3.0), k);
  const Matrix s3 = stage_slope(flow, h, p3, t + 2.0 * tau / 3.0, k);
  const State p4 = ball::exp_rows(h, tau * (s1 - s2 + s3), k);
  const Matrix s4 = stage_slope(flow, h, p4, t + tau, k);
  const Matrix x = w[0] * s1 + w[1] * s2 + w[2] * s3 + w[3] * s4;
  return {s1, ball::exp_rows(h, tau * x, k)};
}

struct Grid {
  int steps;
  double last_ratio;  // fraction of the final step that lies inside [0, T]
  bool partial;
};

Grid make_grid(const SolverSpec& spec) {
  const double q = spec.horizon / spec.tau;
  int steps = static_cast<int>(std::ceil(q - 1e-9));
  steps = std::max(steps, 1);
  const double delta = spec.horizon - (steps - 1) * spec.tau;
  const double ratio = std::clamp(delta / spec.tau, 0.0, 1.0);
  return {steps, ratio, std::abs(ratio - 1.0) > 1e-9};
}

void require_finite_state(const State& h, int step) {
  if (!h.allFinite()) {
    throw NumericalError("non-finite state at step " + std::to_string(step));
  }
}

double grid_time(const Grid& g, const SolverSpec& spec, int index) {
  return index >= g.steps ? spec.horizon : index * spec.tau;
}

// Applies the terminal interpolation, records the state and returns it.
State finish_step(const State& h, State next, int step, const Grid& g,
                  const SolverSpec& spec, Curvature k, Trajectory& trace) {
  require_finite_state(next, step + 1);
  if (step == g.steps - 1 && g.partial) {
    next = geodesic_interpolate(h, next, g.last_ratio, k);
  }
  if (spec.record_trace) {
    trace.push_back({grid_time(g, spec, step + 1), next});
  }
  return next;
}

struct QueueEntry {
  Matrix tangent;
  State base;
};

}  // namespace

const AdamsTables& AdamsTables::standard() {
  static const AdamsTables tables = make_standard_tables();
  return tables;
}

std::array<double, 4> hrk4_weights() {
  std::array<double, 4> phi{1.0, 3.0, 3.0, 1.0};
  const double sum = phi[0] + phi[1] + phi[2] + phi[3];
  for (double& p : phi) p /= sum;
  return phi;
}

State heuler_step(const State& h, double t, double tau, const FlowFn& flow,
                  Curvature k) {
  return ball::exp_rows(h, tau * field(flow, h, t, k), k);
}

State hrk4_step(const State& h, double t, double tau, const FlowFn& flow,
                Curvature k) {
  return hrk4_with_slope(h, t, tau, flow, k).next;
}

Vector geodesic_interpolate(const Vector& x, const Vector& y, double ratio,
                            Curvature k) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw InputError("interpolation ratio must lie in [0, 1]");
  }
  if (ratio == 0.0) return x;
  if (ratio == 1.0) return y;
  return ball::exp_map(x, ratio * ball::log_map(x, y, k), k);
}

State geodesic_interpolate(const State& x, const State& y, double ratio, Curvature k) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw InputError("geodesic_interpolate: shape mismatch");
  }
  State out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out.row(i) =
        geodesic_interpolate(Vector(x.row(i)), Vector(y.row(i)), ratio, k).transpose();
  }
  return out;
}

SolveResult ham_solve(const State& h0, const FlowFn& flow, const SolverSpec& spec,
                      Curvature k) {
  spec.validate();
  if (spec.method != Method::ham) {
    throw InputError("ham_solve called with a non-HAM solver spec");
  }
  const Grid g = make_grid(spec);
  if (spec.s_min > g.steps) {
    throw InputError("s_min=" + std::to_string(spec.s_min) + " exceeds the " +
                     std::to_string(g.steps) + " steps available before T");
  }
  const AdamsTables& tables = AdamsTables::standard();
  const double tau = spec.tau;

  Trajectory trace;
  if (spec.record_trace) trace.push_back({0.0, h0});

  // Newest entry at the front.
  std::deque<QueueEntry> queue;
  State h = h0;

  // Warm-up: the first s_min states come from the four-stage scheme.
  for (int i = 0; i + 1 < spec.s_min; ++i) {
    Hrk4Step step = hrk4_with_slope(h, i * tau, tau, flow, k);
    queue.push_front({std::move(step.slope), h});
    h = finish_step(h, std::move(step.next), i, g, spec, k, trace);
  }
  queue.push_front({field(flow, h, (spec.s_min - 1) * tau, k), h});

  for (int i = spec.s_min - 1; i < g.steps; ++i) {
    const double t = i * tau;

    // Predict with Adams-Bashforth over the transported queue slopes.
    const int s_ab = std::min<int>(static_cast<int>(queue.size()), spec.s_max);
    const auto& ab = tables.bashforth[s_ab - 1];
    Matrix x_ab = Matrix::Zero(h.rows(), h.cols());
    for (int j = 0; j < s_ab; ++j) {
      x_ab += ab[j] * ball::transport_rows(queue[j].base, h, queue[j].tangent, k);
    }
    const State predicted = ball::exp_rows(h, tau * x_ab, k);

    // Evaluate at the prediction, then correct with Adams-Moulton.
    const Matrix slope_pred = field(flow, predicted, t + tau, k);
    const int s_am = std::min<int>(static_cast<int>(queue.size()) + 1, spec.s_max);
    const auto& am = tables.moulton[s_am - 1];
    Matrix x_am = am[0] * ball::transport_rows(predicted, h, slope_pred, k);
    for (int j = 1; j < s_am; ++j) {
      x_am += am[j] *
              ball::transport_rows(queue[j - 1].base, h, queue[j - 1].tangent, k);
    }
    State next = ball::exp_rows(h, tau * x_am, k);
    require_finite_state(next, i + 1);

    // Final evaluation at the corrected state feeds the next step.
    if (i + 1 < g.steps) {
      queue.push_front({field(flow, next, t + tau, k), next});
      if (static_cast<int>(queue.size()) > spec.s_max) queue.pop_back();
    }
    h = finish_step(h, std::move(next), i, g, spec, k, trace);
  }
  return {h, std::move(trace)};
}

SolveResult solve(const State& h0, const FlowFn& flow, const SolverSpec& spec,
                  Curvature k) {
  spec.validate();
  if (spec.method == Method::ham) {
    return ham_solve(h0, flow, spec, k);
  }
  if (!h0.allFinite()) {
    throw InputError("initial state has non-finite entries");
  }
  const Grid g = make_grid(spec);
  Trajectory trace;
  if (spec.record_trace) trace.push_back({0.0, h0});

  State h = h0;
  for (int i = 0; i < g.steps; ++i) {
    const double t = i * spec.tau;
    State next = spec.method == Method::heuler ? heuler_step(h, t, spec.tau, flow, k)
                                               : hrk4_step(h, t, spec.tau, flow, k);
    h = finish_step(h, std::move(next), i, g, spec, k, trace);
  }
  return {h, std::move(trace)};
}

GeodesicOracle::GeodesicOracle(State origin, State direction, Curvature k)
    : origin_(std::move(origin)), direction_(std::move(direction)), k_(k) {
  if (origin_.rows() != direction_.rows() || origin_.cols() != direction_.cols()) {
    throw InputError("GeodesicOracle: origin and direction shapes differ");
  }
  for (Eigen::Index i = 0; i < direction_.rows(); ++i) {
    if (direction_.row(i).squaredNorm() == 0.0) {
      throw InputError("GeodesicOracle: zero direction row");
    }
  }
}

double GeodesicOracle::parameter(double t) {
  return 0.5 * (std::exp(t) + std::sin(t) - std::cos(t));
}

FlowFn GeodesicOracle::flow() const {
  return [origin = origin_, direction = direction_, k = k_](const State& h, double t) {
    State out(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const Vector o = origin.row(i);
      const Vector v = direction.row(i);
      const Vector p = h.row(i);
      const double g = ball::log_map(o, p, k).dot(v) / v.squaredNorm();
      const Vector x = (g + std::cos(t)) * ball::parallel_transport(o, p, v, k);
      out.row(i) = ball::exp_map(p, x, k).transpose();
    }
    return out;
  };
}

State GeodesicOracle::exact(double t) const {
  return ball::exp_rows(origin_, parameter(t) * direction_, k_);
}

}  // namespace hgde
