#include "hgde/diffusivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hgde/errors.hpp"

namespace hgde {
namespace {

constexpr int kOrcMaxDepth = 3;
constexpr double kCertificateTol = 1e-9;

DiffusivityMatrix csr_skeleton(const Graph& g, Eigen::Index channels) {
  DiffusivityMatrix m;
  m.offsets.reserve(g.num_nodes() + 1);
  m.offsets.push_back(0);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (std::size_t j : g.neighbors(i)) m.columns.push_back(j);
    m.offsets.push_back(m.columns.size());
  }
  m.local = Matrix::Zero(static_cast<Eigen::Index>(m.columns.size()), channels);
  return m;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Scheme parse_scheme(std::string_view name) {
  if (name == "isotropic") return Scheme::isotropic;
  if (name == "local") return Scheme::local;
  if (name == "global") return Scheme::global;
  if (name == "local_global") return Scheme::local_global;
  throw InputError("unknown diffusivity scheme '" + std::string(name) +
                   "' (expected isotropic, local, global or local_global)");
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::isotropic: return "isotropic";
    case Scheme::local: return "local";
    case Scheme::global: return "global";
    case Scheme::local_global: return "local_global";
  }
  return "?";
}

ChannelMode parse_channel_mode(std::string_view name) {
  if (name == "scalar") return ChannelMode::scalar;
  if (name == "per_channel") return ChannelMode::per_channel;
  throw InputError("unknown channel mode '" + std::string(name) +
                   "' (expected scalar or per_channel)");
}

std::string_view to_string(ChannelMode m) {
  return m == ChannelMode::scalar ? "scalar" : "per_channel";
}

void DiffusivityConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError("beta must lie in [0, 1], got " + std::to_string(beta));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (heads < 1) throw InputError("heads must be positive, got " + std::to_string(heads));
}

double DiffusivityMatrix::local_weight(std::size_t i, std::size_t j,
                                       Eigen::Index channel) const {
  const auto first = columns.begin() + static_cast<std::ptrdiff_t>(offsets.at(i));
  const auto last = columns.begin() + static_cast<std::ptrdiff_t>(offsets.at(i + 1));
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return local(it - columns.begin(), channel);
}

Vector CurvatureMlp::operator()(double curvature) const {
  Vector hidden = w1 * curvature + b1;
  for (Eigen::Index c = 0; c < hidden.size(); ++c) {
    if (hidden[c] < 0.0) hidden[c] *= negative_slope;
  }
  return w2 * hidden + b2;
}

int AttentionParams::heads() const {
  return w_q.rows() == 0 ? 0 : static_cast<int>(w_q.cols() / w_q.rows());
}

AttentionParams AttentionParams::random(Eigen::Index dim, int heads, std::uint64_t seed) {
  if (dim < 1 || heads < 1) throw InputError("attention needs dim >= 1 and heads >= 1");
  std::mt19937_64 engine(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  auto fill = [&](auto& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform(engine);
  };
  AttentionParams p;
  p.w_q.resize(dim, heads * dim);
  p.w_k.resize(dim, heads * dim);
  p.mlp.w1.resize(dim);
  p.mlp.b1.resize(dim);
  p.mlp.w2.resize(dim, dim);
  p.mlp.b2.resize(dim);
  fill(p.w_q);
  fill(p.w_k);
  fill(p.mlp.w1);
  fill(p.mlp.b1);
  fill(p.mlp.w2);
  fill(p.mlp.b2);
  return p;
}

AttentionParams AttentionParams::zeros(Eigen::Index dim, int heads) {
  if (dim < 1 || heads < 1) throw InputError("attention needs dim >= 1 and heads >= 1");
  AttentionParams p;
  p.w_q = Matrix::Zero(dim, heads * dim);
  p.w_k = Matrix::Zero(dim, heads * dim);
  p.mlp.w1 = Vector::Zero(dim);
  p.mlp.b1 = Vector::Zero(dim);
  p.mlp.w2 = Matrix::Zero(dim, dim);
  p.mlp.b2 = Vector::Zero(dim);
  return p;
}

double OrcResult::curvature(std::size_t i, std::size_t j) const {
  const Edge key{std::min(i, j), std::max(i, j)};
  const auto it = std::lower_bound(
      edges.begin(), edges.end(), key,
      [](const EdgeCurvature& e, const Edge& k) { return Edge{e.u, e.v} < k; });
  if (it == edges.end() || it->u != key.u || it->v != key.v) {
    throw InputError("no curvature for edge (" + std::to_string(i) + ", " +
                     std::to_string(j) + ")");
  }
  return it->curvature;
}

transport::Problem edge_transport_problem(const Graph& g, std::size_t u, std::size_t v,
                                          double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  auto support = [&](std::size_t x) {
    std::vector<std::size_t> s{x};
    for (std::size_t y : g.neighbors(x)) s.push_back(y);
    return s;
  };
  auto masses = [&](std::size_t x) {
    const std::size_t deg = g.degree(x);
    if (deg == 0) throw InputError("node " + std::to_string(x) + " has no neighbors");
    std::vector<double> m(deg + 1, (1.0 - alpha) / static_cast<double>(deg));
    m[0] = alpha;
    return m;
  };
  const auto su = support(u);
  const auto sv = support(v);

  transport::Problem p;
  p.supply = masses(u);
  p.demand = masses(v);
  p.cost.resize(static_cast<Eigen::Index>(su.size()), static_cast<Eigen::Index>(sv.size()));
  for (std::size_t a = 0; a < su.size(); ++a) {
    const std::vector<int> dist = g.hop_distances(su[a], kOrcMaxDepth);
    for (std::size_t b = 0; b < sv.size(); ++b) {
      p.cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = dist[sv[b]];
    }
  }
  return p;
}

OrcResult orc_curvatures(const Graph& g, double alpha) {
  OrcResult result;
  result.edges.reserve(g.num_edges());
  for (const Edge& e : g.edges()) {
    const transport::Problem problem = edge_transport_problem(g, e.u, e.v, alpha);
    const transport::Solution sol = transport::solve(problem);
    const transport::Certificate cert = transport::certify(problem, sol);
    if (!cert.holds(kCertificateTol)) {
      throw NumericalError("transport certificate failed on edge (" + std::to_string(e.u) +
                           ", " + std::to_string(e.v) + "): gap " +
                           std::to_string(cert.gap));
    }
    result.edges.push_back({e.u, e.v, 1.0 - sol.cost, sol.cost, cert.gap});
  }
  return result;
}

DiffusivityMatrix isotropic_weights(const Graph& g) {
  DiffusivityMatrix m = csr_skeleton(g, 1);
  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    for (std::size_t e = m.offsets[i]; e < m.offsets[i + 1]; ++e) {
      const std::size_t j = m.columns[e];
      m.local(static_cast<Eigen::Index>(e), 0) =
          1.0 / std::sqrt(static_cast<double>(g.degree(i) * g.degree(j)));
    }
  }
  return m;
}

DiffusivityMatrix local_diffusivity(const Graph& g, const OrcResult& orc,
                                    const AttentionParams& params, ChannelMode mode) {
  const Eigen::Index d = params.mlp.w2.rows();
  const Eigen::Index channels = mode == ChannelMode::scalar ? 1 : d;
  DiffusivityMatrix m = csr_skeleton(g, channels);

  for (std::size_t i = 0; i < g.num_nodes(); ++i) {
    const auto begin = static_cast<Eigen::Index>(m.offsets[i]);
    const auto count = static_cast<Eigen::Index>(m.offsets[i + 1]) - begin;
    if (count == 0) continue;
    Matrix scores(count, channels);
    for (Eigen::Index r = 0; r < count; ++r) {
      const Vector s = params.mlp(orc.curvature(i, m.columns[begin + r]));
      if (mode == ChannelMode::scalar) {
        scores(r, 0) = s.mean();
      } else {
        scores.row(r) = s.transpose();
      }
    }
    for (Eigen::Index c = 0; c < channels; ++c) {
      const double peak = scores.col(c).maxCoeff();
      Vector w = (scores.col(c).array() - peak).exp().matrix();
      w /= w.sum();
      m.local.block(begin, c, count, 1) = w;
    }
  }
  return m;
}

Matrix global_diffusivity(const Matrix& z, const AttentionParams& params, Curvature k) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  if (params.w_q.rows() != d || params.w_k.rows() != d ||
      params.w_q.cols() != params.w_k.cols() || params.w_q.cols() % d != 0 ||
      params.w_q.cols() == 0) {
    throw InputError("attention weights must be d x (heads * d) with d = " +
                     std::to_string(d));
  }
  const int heads = params.heads();
  const Matrix tangent = ball::log0_rows(z, k);
  const Matrix q = tangent * params.w_q;
  const Matrix kk = tangent * params.w_k;

  Matrix out = Matrix::Zero(n, n);
  for (int h = 0; h < heads; ++h) {
    const Matrix scores = q.middleCols(h * d, d) * kk.middleCols(h * d, d).transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector row(n);
      for (Eigen::Index j = 0; j < n; ++j) row[j] = sigmoid(scores(i, j));
      const double total = row.sum();
      if (!(total > 0.0) || !std::isfinite(total)) {
        throw NumericalError("global attention row " + std::to_string(i) + " is degenerate");
      }
      out.row(i) += (row / total).transpose();
    }
  }
  if (heads > 1) out /= static_cast<double>(heads);
  return out;
}

DiffusivityMatrix mix(const DiffusivityMatrix& local, const Matrix& global, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw InputError("beta must lie in [0, 1], got " + std::to_string(beta));
  }
  if (local.global) throw InputError("local diffusivity already carries a global part");
  const auto n = static_cast<Eigen::Index>(local.num_nodes());
  if (global.rows() != n || global.cols() != n) {
    throw InputError("global diffusivity must be " + std::to_string(n) + "x" +
                     std::to_string(n));
  }
  DiffusivityMatrix out = local;
  out.local *= (1.0 - beta);
  out.global = beta * global;
  return out;
}

}  // namespace hgde
