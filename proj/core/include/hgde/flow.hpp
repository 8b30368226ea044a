#pragma once

// Graph diffusion on the Poincare ball: the diffusion vector flow, the
// gyromidpoint residual, and the degree-normalized Dirichlet energy.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hgde/ball.hpp"
#include "hgde/diffusivity.hpp"
#include "hgde/graph.hpp"
#include "hgde/solvers.hpp"

namespace hgde {

enum class Activation { identity, tanh };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

struct ResidualSpec {
  std::array<double, 3> eta{1.0, 0.6, 0.1};
};

struct EnergySample {
  double t;
  double energy;
};

using EnergyTrace = std::vector<EnergySample>;

/// log_{z_i}(z_j) for every (i, j) in `pairs`, one tangent per row.
Matrix gradient(const State& z, std::span<const std::pair<std::size_t, std::size_t>> pairs,
                Curvature k);

/// Row i becomes exp_{z_i}(sigma(sum_j a_ij * log_{z_i}(z_j))), summing the
/// sparse part over neighbors and the dense part (if any) over all nodes.
State hgde_flow(const State& z, const DiffusivityMatrix& d, Activation sigma, Curvature k);

/// Row-wise gyromidpoint of (z_dot, z_t, z_0) weighted by spec.eta.
State residual_flow(const State& z_dot, const State& z_t, const State& z_0,
                    const ResidualSpec& spec, Curvature k);

double dirichlet_energy(const State& z, const Graph& g, Curvature k);

/// The flow used by run_diffusion, exposed for tests and benchmarks. The
/// global attention part (if the scheme has one) is recomputed at every call.
FlowFn make_diffusion_flow(const Graph& g, const DiffusivityConfig& cfg,
                           const AttentionParams& params,
                           const std::optional<ResidualSpec>& residual, Activation sigma,
                           const State& z0, Curvature k);

/// Fixed part of the diffusivity for a scheme: isotropic weights for the
/// isotropic and global schemes, ORC attention for the local ones.
DiffusivityMatrix base_diffusivity(const Graph& g, const DiffusivityConfig& cfg,
                                   const AttentionParams& params);

struct DiffusionResult {
  State final_state;
  EnergyTrace energy;
  Trajectory trajectory;
};

DiffusionResult run_diffusion(const State& z0, const Graph& g, const DiffusivityConfig& cfg,
                              const SolverSpec& spec,
                              const std::optional<ResidualSpec>& residual,
                              Activation sigma, Curvature k);

/// Seeded Gaussian tangents at the origin, scaled by `scale`, mapped by exp_o.
State random_initial_state(std::size_t n, Eigen::Index d, std::uint64_t seed, Curvature k,
                           double scale = 0.1);

}  // namespace hgde
