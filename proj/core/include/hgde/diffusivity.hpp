#pragma once

// Pairwise diffusivity weights for graph diffusion on the ball.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hgde/ball.hpp"
#include "hgde/graph.hpp"
#include "hgde/transport.hpp"

namespace hgde {

enum class Scheme { isotropic, local, global, local_global };
enum class ChannelMode { scalar, per_channel };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);
ChannelMode parse_channel_mode(std::string_view name);
std::string_view to_string(ChannelMode m);

struct DiffusivityConfig {
  Scheme scheme = Scheme::isotropic;
  double beta = 0.5;
  int heads = 1;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  ChannelMode channel_mode = ChannelMode::per_channel;

  void validate() const;
};

/// Sparse per-edge weights stored in CSR order matching Graph::neighbors(),
/// plus an optional dense row-stochastic part over all node pairs.
struct DiffusivityMatrix {
  std::vector<std::size_t> offsets;   // num_nodes + 1
  std::vector<std::size_t> columns;   // neighbor ids
  Matrix local;                       // nnz x channels (1 or d)
  std::optional<Matrix> global;       // num_nodes x num_nodes

  std::size_t num_nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  Eigen::Index channels() const { return local.cols(); }
  /// Local weight of (i, j) in `channel`, or 0 when j is not a neighbor of i.
  double local_weight(std::size_t i, std::size_t j, Eigen::Index channel = 0) const;
};

/// Score network R -> R^d -> LeakyReLU -> R^d.
struct CurvatureMlp {
  Vector w1;
  Vector b1;
  Matrix w2;
  Vector b2;
  double negative_slope = 0.01;

  Vector operator()(double curvature) const;
};

struct AttentionParams {
  Matrix w_q;  // d x (heads * d)
  Matrix w_k;  // d x (heads * d)
  CurvatureMlp mlp;

  int heads() const;
  Eigen::Index dim() const { return w_q.rows(); }

  /// Uniform entries on [-1/sqrt(d), 1/sqrt(d)] drawn from a seeded engine.
  static AttentionParams random(Eigen::Index dim, int heads, std::uint64_t seed);
  static AttentionParams zeros(Eigen::Index dim, int heads);
};

struct EdgeCurvature {
  std::size_t u;
  std::size_t v;
  double curvature;
  double wasserstein;
  double gap;
};

/// One entry per edge, in Graph::edges() order.
struct OrcResult {
  std::vector<EdgeCurvature> edges;

  /// Curvature of edge {i, j}; throws InputError when absent.
  double curvature(std::size_t i, std::size_t j) const;
};

/// Transportation problem between the lazy random-walk measures of u and v.
/// Rows follow {u} + N(u), columns {v} + N(v).
transport::Problem edge_transport_problem(const Graph& g, std::size_t u, std::size_t v,
                                          double alpha);

OrcResult orc_curvatures(const Graph& g, double alpha);

/// One channel with 1/sqrt(d_i d_j) on every edge.
DiffusivityMatrix isotropic_weights(const Graph& g);

DiffusivityMatrix local_diffusivity(const Graph& g, const OrcResult& orc,
                                    const AttentionParams& params, ChannelMode mode);

/// Head-averaged, row-normalized sigmoid attention over tangent images at the origin.
Matrix global_diffusivity(const Matrix& z, const AttentionParams& params, Curvature k);

/// Returns beta * global + (1 - beta) * local. `local` must not carry a global part.
DiffusivityMatrix mix(const DiffusivityMatrix& local, const Matrix& global, double beta);

}  // namespace hgde
