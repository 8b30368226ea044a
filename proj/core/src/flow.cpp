#include "hgde/flow.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hgde/errors.hpp"

namespace hgde {

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  throw InputError("unknown activation '" + std::string(name) +
                   "' (expected identity or tanh)");
}

std::string_view to_string(Activation a) {
  return a == Activation::identity ? "identity" : "tanh";
}

Matrix gradient(const State& z, std::span<const std::pair<std::size_t, std::size_t>> pairs,
                Curvature k) {
  const auto n = static_cast<std::size_t>(z.rows());
  Matrix out(static_cast<Eigen::Index>(pairs.size()), z.cols());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (i >= n || j >= n) {
      throw InputError("gradient pair (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") is out of range");
    }
    out.row(static_cast<Eigen::Index>(p)) =
        ball::log_map(z.row(static_cast<Eigen::Index>(i)).transpose(),
                      z.row(static_cast<Eigen::Index>(j)).transpose(), k)
            .transpose();
  }
  return out;
}

State hgde_flow(const State& z, const DiffusivityMatrix& d, Activation sigma, Curvature k) {
  const Eigen::Index n = z.rows();
  const Eigen::Index dim = z.cols();
  if (static_cast<Eigen::Index>(d.num_nodes()) != n) {
    throw InputError("diffusivity covers " + std::to_string(d.num_nodes()) +
                     " nodes but the state has " + std::to_string(n));
  }
  const Eigen::Index channels = d.channels();
  if (!d.columns.empty() && channels != 1 && channels != dim) {
    throw InputError("diffusivity has " + std::to_string(channels) +
                     " channels; expected 1 or " + std::to_string(dim));
  }
  if (d.global && (d.global->rows() != n || d.global->cols() != n)) {
    throw InputError("global diffusivity shape does not match the state");
  }

  State out(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector zi = z.row(i).transpose();
    Vector agg = Vector::Zero(dim);
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t e = d.offsets[ui]; e < d.offsets[ui + 1]; ++e) {
      const Vector g = ball::log_map(zi, z.row(static_cast<Eigen::Index>(d.columns[e])).transpose(), k);
      const auto row = static_cast<Eigen::Index>(e);
      if (channels == 1) {
        agg += d.local(row, 0) * g;
      } else {
        agg += d.local.row(row).transpose().cwiseProduct(g);
      }
    }
    if (d.global) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        agg += (*d.global)(i, j) * ball::log_map(zi, z.row(j).transpose(), k);
      }
    }
    if (sigma == Activation::tanh) agg = agg.array().tanh().matrix();
    if (!agg.allFinite()) {
      throw NumericalError("non-finite diffusion aggregate at node " + std::to_string(i));
    }
    out.row(i) = ball::exp_map(zi, agg, k).transpose();
  }
  return out;
}

State residual_flow(const State& z_dot, const State& z_t, const State& z_0,
                    const ResidualSpec& spec, Curvature k) {
  if (z_dot.rows() != z_t.rows() || z_dot.cols() != z_t.cols() ||
      z_0.rows() != z_t.rows() || z_0.cols() != z_t.cols()) {
    throw InputError("residual flow inputs must share one shape");
  }
  State out(z_t.rows(), z_t.cols());
  std::array<Vector, 3> points;
  for (Eigen::Index i = 0; i < z_t.rows(); ++i) {
    points[0] = z_dot.row(i).transpose();
    points[1] = z_t.row(i).transpose();
    points[2] = z_0.row(i).transpose();
    out.row(i) = ball::gyromidpoint(points, spec.eta, k).transpose();
  }
  return out;
}

double dirichlet_energy(const State& z, const Graph& g, Curvature k) {
  if (static_cast<std::size_t>(z.rows()) != g.num_nodes()) {
    throw InputError("state has " + std::to_string(z.rows()) + " rows but the graph has " +
                     std::to_string(g.num_nodes()) + " nodes");
  }
  State y(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double scale =
        1.0 / std::sqrt(1.0 + static_cast<double>(g.degree(static_cast<std::size_t>(i))));
    y.row(i) = ball::exp0(ball::log0(z.row(i).transpose(), k) * scale, k).transpose();
  }
  double energy = 0.0;
  for (const Edge& e : g.edges()) {
    const double dist = ball::distance(y.row(static_cast<Eigen::Index>(e.u)).transpose(),
                                       y.row(static_cast<Eigen::Index>(e.v)).transpose(), k);
    energy += dist * dist;
  }
  return 0.5 * energy;
}

DiffusivityMatrix base_diffusivity(const Graph& g, const DiffusivityConfig& cfg,
                                   const AttentionParams& params) {
  if (cfg.scheme == Scheme::local || cfg.scheme == Scheme::local_global) {
    return local_diffusivity(g, orc_curvatures(g, cfg.alpha), params, cfg.channel_mode);
  }
  return isotropic_weights(g);
}

FlowFn make_diffusion_flow(const Graph& g, const DiffusivityConfig& cfg,
                           const AttentionParams& params,
                           const std::optional<ResidualSpec>& residual, Activation sigma,
                           const State& z0, Curvature k) {
  cfg.validate();
  DiffusivityMatrix base = base_diffusivity(g, cfg, params);
  const bool dense = cfg.scheme == Scheme::global || cfg.scheme == Scheme::local_global;
  return [base = std::move(base), dense, params, beta = cfg.beta, residual, sigma, z0,
          k](const State& z, double) -> State {
    State dot = dense ? hgde_flow(z, mix(base, global_diffusivity(z, params, k), beta), sigma, k)
                      : hgde_flow(z, base, sigma, k);
    if (residual) return residual_flow(dot, z, z0, *residual, k);
    return dot;
  };
}

DiffusionResult run_diffusion(const State& z0, const Graph& g, const DiffusivityConfig& cfg,
                              const SolverSpec& spec,
                              const std::optional<ResidualSpec>& residual,
                              Activation sigma, Curvature k) {
  if (static_cast<std::size_t>(z0.rows()) != g.num_nodes()) {
    throw InputError("initial state has " + std::to_string(z0.rows()) +
                     " rows but the graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
  if (z0.cols() < 1) throw InputError("embedding dimension must be positive");
  cfg.validate();
  const AttentionParams params = AttentionParams::random(z0.cols(), cfg.heads, cfg.seed);
  const FlowFn flow = make_diffusion_flow(g, cfg, params, residual, sigma, z0, k);

  SolverSpec traced = spec;
  traced.record_trace = true;
  SolveResult solved = solve(z0, flow, traced, k);

  DiffusionResult out;
  out.energy.reserve(solved.trajectory.size());
  for (const TrajectoryPoint& p : solved.trajectory) {
    out.energy.push_back({p.t, dirichlet_energy(p.state, g, k)});
  }
  out.final_state = std::move(solved.final_state);
  if (spec.record_trace) out.trajectory = std::move(solved.trajectory);
  return out;
}

State random_initial_state(std::size_t n, Eigen::Index d, std::uint64_t seed, Curvature k,
                           double scale) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix tangents(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < tangents.rows(); ++i)
    for (Eigen::Index c = 0; c < d; ++c) tangents(i, c) = scale * normal(engine);
  return ball::exp0_rows(tangents, k);
}

}  // namespace hgde
