#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "hgde/errors.hpp"
#include "hgde/solvers.hpp"

namespace hgde {
namespace {

using testing::Gen;

const Curvature kUnit(-1.0);
const Curvature kFlat(-1e-8);

FlowFn identity_flow() {
  return [](const State& h, double) { return h; };
}

// Flat-space linear field dy/dt = y A^T + c, realized as the flow exp_h(field).
FlowFn linear_flow(const Matrix& a, const Matrix& c, Curvature k) {
  return [a, c, k](const State& h, double) {
    return ball::exp_rows(h, h * a.transpose() + c, k);
  };
}

Matrix linear_field(const Matrix& y, const Matrix& a, const Matrix& c) {
  return y * a.transpose() + c;
}

Matrix kutta38(const Matrix& y, double tau, const Matrix& a, const Matrix& c) {
  const Matrix k1 = linear_field(y, a, c);
  const Matrix k2 = linear_field(y + tau * k1 / 3.0, a, c);
  const Matrix k3 = linear_field(y + tau * (k2 - k1 / 3.0), a, c);
  const Matrix k4 = linear_field(y + tau * (k1 - k2 + k3), a, c);
  return y + tau * (k1 + 3.0 * k2 + 3.0 * k3 + k4) / 8.0;
}

SolverSpec make_spec(Method m, double tau, double horizon) {
  SolverSpec s;
  s.method = m;
  s.tau = tau;
  s.horizon = horizon;
  return s;
}

TEST(SolverSpec, ParsesAndValidates) {
  EXPECT_EQ(parse_method("hrk4"), Method::hrk4);
  EXPECT_EQ(to_string(Method::ham), "ham");
  EXPECT_THROW(parse_method("rk45"), InputError);
  EXPECT_THROW(make_spec(Method::heuler, 0.0, 1.0).validate(), InputError);
  EXPECT_THROW(make_spec(Method::heuler, 2.0, 1.0).validate(), InputError);
  SolverSpec s = make_spec(Method::ham, 0.1, 1.0);
  s.s_min = 3;
  s.s_max = 2;
  EXPECT_THROW(s.validate(), InputError);
  s.s_max = 5;
  EXPECT_THROW(s.validate(), InputError);
  s.s_min = 0;
  s.s_max = 4;
  EXPECT_THROW(s.validate(), InputError);
}

TEST(Coefficients, RowsSumToOneAndMatchClassicalValues) {
  const AdamsTables& t = AdamsTables::standard();
  for (int order = 1; order <= AdamsTables::kMaxOrder; ++order) {
    const auto& ab = t.bashforth[order - 1];
    const auto& am = t.moulton[order - 1];
    ASSERT_EQ(ab.size(), static_cast<std::size_t>(order));
    ASSERT_EQ(am.size(), static_cast<std::size_t>(order));
    EXPECT_NEAR(std::accumulate(ab.begin(), ab.end(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(std::accumulate(am.begin(), am.end(), 0.0), 1.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(t.bashforth[3][1], -59.0 / 24.0);
  EXPECT_DOUBLE_EQ(t.moulton[2][0], 5.0 / 12.0);
  const auto w = hrk4_weights();
  EXPECT_DOUBLE_EQ(w[0], 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(w[1], 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(w[2], 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(w[3], 1.0 / 8.0);
}

TEST(Steppers, IdentityFlowLeavesStateUnchanged) {
  Gen gen(1);
  const State h = gen.state(5, 3, kUnit);
  EXPECT_EQ(heuler_step(h, 0.0, 0.3, identity_flow(), kUnit), h);
  EXPECT_EQ(hrk4_step(h, 0.0, 0.3, identity_flow(), kUnit), h);
  SolverSpec s = make_spec(Method::ham, 0.25, 2.0);
  const SolveResult r = solve(h, identity_flow(), s, kUnit);
  for (const auto& p : r.trajectory) EXPECT_EQ(p.state, h);
}

TEST(Steppers, UnitStepHEulerReturnsFlowOutput) {
  Gen gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const State h = gen.state(4, 3, kUnit);
    const State target = gen.state(4, 3, kUnit);
    const FlowFn flow = [&](const State&, double) { return target; };
    EXPECT_LE((heuler_step(h, 0.0, 1.0, flow, kUnit) - target).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Steppers, HEulerLocalErrorIsSecondOrder) {
  Gen gen(3);
  const State origin = gen.state(3, 4, kUnit, 0.4);
  const State direction = Matrix::Random(3, 4) * 0.3;
  const GeodesicOracle oracle(origin, direction, kUnit);
  auto local_error = [&](double tau) {
    const State next = heuler_step(origin, 0.0, tau, oracle.flow(), kUnit);
    const State exact = oracle.exact(tau);
    double err = 0.0;
    for (Eigen::Index i = 0; i < 3; ++i)
      err = std::max(err, ball::distance(next.row(i).transpose(), exact.row(i).transpose(), kUnit));
    return err;
  };
  const double ratio = local_error(0.1) / local_error(0.05);
  EXPECT_NEAR(std::log2(ratio), 2.0, 0.2);
}

TEST(Steppers, Hrk4MatchesKutta38InFlatLimit) {
  Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = Matrix::Random(3, 3);
    const Matrix c = Matrix::Random(5, 3) * 0.1;
    const State y = gen.state(5, 3, Curvature(-1.0), 0.5);
    const double tau = gen.uniform(0.05, 1.0);
    const State got = hrk4_step(y, 0.0, tau, linear_flow(a, c, kFlat), kFlat);
    EXPECT_LE((got - kutta38(y, tau, a, c)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Ham, MatchesFlatAdamsPredictorCorrector) {
  Gen gen(5);
  const AdamsTables& tables = AdamsTables::standard();
  for (int s_min = 1; s_min <= 4; ++s_min) {
    for (int s_max = s_min; s_max <= 4; ++s_max) {
      const Matrix a = Matrix::Random(2, 2) * 0.5;
      const Matrix c = Matrix::Random(3, 2) * 0.1;
      const State y0 = gen.state(3, 2, Curvature(-1.0), 0.5);
      const double tau = 0.1;
      SolverSpec spec = make_spec(Method::ham, tau, 1.0);
      spec.s_min = s_min;
      spec.s_max = s_max;
      const SolveResult r = solve(y0, linear_flow(a, c, kFlat), spec, kFlat);

      std::deque<Matrix> q;
      Matrix y = y0;
      for (int i = 0; i + 1 < s_min; ++i) {
        q.push_front(linear_field(y, a, c));
        y = kutta38(y, tau, a, c);
      }
      q.push_front(linear_field(y, a, c));
      for (int i = s_min - 1; i < 10; ++i) {
        const int s_ab = std::min<int>(static_cast<int>(q.size()), s_max);
        Matrix x = Matrix::Zero(y.rows(), y.cols());
        for (int j = 0; j < s_ab; ++j) x += tables.bashforth[s_ab - 1][j] * q[j];
        const Matrix pred = y + tau * x;
        const int s_am = std::min<int>(static_cast<int>(q.size()) + 1, s_max);
        Matrix xc = tables.moulton[s_am - 1][0] * linear_field(pred, a, c);
        for (int j = 1; j < s_am; ++j) xc += tables.moulton[s_am - 1][j] * q[j - 1];
        y = y + tau * xc;
        q.push_front(linear_field(y, a, c));
        if (static_cast<int>(q.size()) > s_max) q.pop_back();
      }
      EXPECT_LE((r.final_state - y).cwiseAbs().maxCoeff(), 1e-6)
          << "s_min=" << s_min << " s_max=" << s_max;
    }
  }
}

TEST(Ham, WarmupEqualsHrk4Bitwise) {
  Gen gen(6);
  const State h0 = gen.state(4, 3, kUnit, 0.5);
  const Matrix a = Matrix::Random(3, 3);
  const Matrix c = Matrix::Random(4, 3) * 0.2;
  const FlowFn flow = linear_flow(a, c, kUnit);
  for (int s_min = 1; s_min <= 4; ++s_min) {
    SolverSpec ham = make_spec(Method::ham, 0.2, 2.0);
    ham.s_min = s_min;
    const SolveResult hr = solve(h0, flow, ham, kUnit);
    const SolveResult rk = solve(h0, flow, make_spec(Method::hrk4, 0.2, 2.0), kUnit);
    for (int i = 0; i < s_min; ++i) {
      EXPECT_EQ(hr.trajectory[i].t, rk.trajectory[i].t);
      EXPECT_TRUE(hr.trajectory[i].state == rk.trajectory[i].state) << "state " << i;
    }
  }
}

TEST(Ham, RejectsWarmupLongerThanRun) {
  SolverSpec s = make_spec(Method::ham, 0.5, 1.0);
  s.s_min = 3;
  EXPECT_THROW(solve(Matrix::Zero(1, 2), identity_flow(), s, kUnit), InputError);
  s.s_min = 2;
  EXPECT_NO_THROW(solve(Matrix::Zero(1, 2), identity_flow(), s, kUnit));
}

TEST(Solve, TrajectoryTimesAndTerminalInterpolation) {
  Gen gen(7);
  const State h0 = gen.state(3, 2, kUnit, 0.5);
  const Matrix a = Matrix::Random(2, 2);
  const Matrix c = Matrix::Random(3, 2) * 0.2;
  const FlowFn flow = linear_flow(a, c, kUnit);

  const SolveResult exact = solve(h0, flow, make_spec(Method::heuler, 0.25, 1.0), kUnit);
  ASSERT_EQ(exact.trajectory.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(exact.trajectory[i].t, 0.25 * i);

  const SolveResult partial = solve(h0, flow, make_spec(Method::heuler, 1.0, 1.5), kUnit);
  ASSERT_EQ(partial.trajectory.size(), 3u);
  EXPECT_DOUBLE_EQ(partial.trajectory[2].t, 1.5);
  const State h1 = heuler_step(h0, 0.0, 1.0, flow, kUnit);
  const State h2 = heuler_step(h1, 1.0, 1.0, flow, kUnit);
  EXPECT_EQ(partial.final_state, geodesic_interpolate(h1, h2, 0.5, kUnit));
}

TEST(Solve, RejectsBadFlowOutput) {
  const State h0 = Matrix::Zero(2, 2);
  const FlowFn wrong_shape = [](const State&, double) { return State::Zero(3, 2); };
  EXPECT_THROW(solve(h0, wrong_shape, make_spec(Method::hrk4, 0.5, 1.0), kUnit), InputError);
  const FlowFn nan_flow = [](const State& h, double) {
    State out = h;
    out(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return out;
  };
  EXPECT_THROW(solve(h0, nan_flow, make_spec(Method::heuler, 0.5, 1.0), kUnit), NumericalError);
}

TEST(Solve, StatesStayInsideShrunkenBall) {
  const FlowFn outward = [](const State& h, double) {
    State v = State::Constant(h.rows(), h.cols(), 5.0);
    return ball::exp_rows(h, v, kUnit);
  };
  for (Method m : {Method::heuler, Method::hrk4, Method::ham}) {
    const SolveResult r = solve(State::Zero(2, 3), outward, make_spec(m, 0.5, 4.0), kUnit);
    for (const auto& p : r.trajectory) {
      EXPECT_LE(p.state.rowwise().norm().maxCoeff(), kUnit.max_norm() * (1 + 1e-15));
    }
  }
}

TEST(GeodesicInterpolation, EndpointsRatioAndFlatLimit) {
  Gen gen(8);
  const Vector x = gen.ball_point(3, kUnit, 0.8);
  const Vector y = gen.ball_point(3, kUnit, 0.8);
  EXPECT_EQ(geodesic_interpolate(x, y, 0.0, kUnit), x);
  EXPECT_EQ(geodesic_interpolate(x, y, 1.0, kUnit), y);
  EXPECT_THROW(geodesic_interpolate(x, y, 1.5, kUnit), InputError);
  EXPECT_THROW(geodesic_interpolate(x, y, -0.1, kUnit), InputError);
  for (int trial = 0; trial < 1000; ++trial) {
    const Curvature k(-gen.uniform(0.1, 2.0));
    const Vector a = gen.ball_point(4, k, 0.9);
    const Vector b = gen.ball_point(4, k, 0.9);
    const double r = gen.uniform(0.01, 1.0);
    const double got = ball::distance(a, geodesic_interpolate(a, b, r, k), k) /
                       ball::distance(a, b, k);
    EXPECT_NEAR(got / r, 1.0, 1e-8);
  }
  const Vector fx = gen.tangent(3, 1.0);
  const Vector fy = gen.tangent(3, 1.0);
  EXPECT_LE((geodesic_interpolate(fx, fy, 0.3, kFlat) - (fx + 0.3 * (fy - fx))).norm(), 1e-6);
}

TEST(GeodesicOracle, ExactSolutionSatisfiesFlow) {
  Gen gen(9);
  const State origin = gen.state(2, 3, kUnit, 0.4);
  const State dir = Matrix::Random(2, 3) * 0.3;
  const GeodesicOracle oracle(origin, dir, kUnit);
  EXPECT_NEAR(GeodesicOracle::parameter(0.0), 0.0, 1e-15);
  EXPECT_LE((oracle.exact(0.0) - origin).cwiseAbs().maxCoeff(), 1e-15);
  // Central difference of the exact path against the field.
  const double t = 0.6;
  const double eps = 1e-5;
  const State here = oracle.exact(t);
  const Matrix field = ball::log_rows(here, oracle.flow()(here, t), kUnit);
  const Matrix fd = (ball::log_rows(here, oracle.exact(t + eps), kUnit) -
                     ball::log_rows(here, oracle.exact(t - eps), kUnit)) /
                    (2 * eps);
  EXPECT_LE((field - fd).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_THROW(GeodesicOracle(origin, Matrix::Zero(2, 3), kUnit), InputError);
}

TEST(GeodesicOracle, FittedOrders) {
  Gen gen(10);
  const State origin = gen.state(4, 4, kUnit, 0.3);
  const State dir = Matrix::Random(4, 4) * 0.3;
  const GeodesicOracle oracle(origin, dir, kUnit);
  const std::vector<double> taus{0.2, 0.1, 0.05, 0.025};
  auto slope = [&](Method m) {
    std::vector<double> lx, ly;
    for (double tau : taus) {
      const SolveResult r = solve(origin, oracle.flow(), make_spec(m, tau, 1.0), kUnit);
      const State e = oracle.exact(1.0);
      double err = 0.0;
      for (Eigen::Index i = 0; i < 4; ++i)
        err = std::max(err, ball::distance(r.final_state.row(i).transpose(), e.row(i).transpose(), kUnit));
      lx.push_back(std::log(tau));
      ly.push_back(std::log(err));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      num += (lx[i] - mx) * (ly[i] - my);
      den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
  };
  EXPECT_NEAR(slope(Method::heuler), 1.0, 0.2);
  EXPECT_NEAR(slope(Method::hrk4), 4.0, 0.5);
  EXPECT_GE(slope(Method::ham), 2.0);
}

}  // namespace
}  // namespace hgde
