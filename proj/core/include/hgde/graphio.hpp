#pragma once

// Text formats, kNN graphs, and the forward encoder/decoder maps.
//
// Edge lists are `u v` per line with 0-based ids and `#` comments; a comment
// of the form `# nodes: N` fixes the node count. Matrices are headerless CSV.
// Every writer goes through a temporary file and a rename.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "hgde/ball.hpp"
#include "hgde/diffusivity.hpp"
#include "hgde/flow.hpp"
#include "hgde/graph.hpp"

namespace hgde::io {

Graph parse_edge_list(std::istream& in, std::optional<std::size_t> num_nodes = {});
Graph load_edge_list(const std::filesystem::path& path,
                     std::optional<std::size_t> num_nodes = {});
void save_edge_list(const std::filesystem::path& path, const Graph& g);

Matrix parse_csv_matrix(std::istream& in);
Matrix load_features(const std::filesystem::path& path);
/// Throws InputError unless x has one row per graph node.
void require_matching_rows(const Matrix& x, const Graph& g);
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

void save_energy_csv(const std::filesystem::path& path, const EnergyTrace& trace);
void save_orc_csv(const std::filesystem::path& path, const OrcResult& orc);

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hgde::io

namespace hgde {

enum class Metric { euclidean, cosine };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric m);

/// Links every row to its k nearest other rows (ties to the lower index) and
/// symmetrizes by union.
Graph knn_graph(const Matrix& x, int k, Metric metric);

struct EncoderParams {
  Matrix w;       // f x d
  Vector bias;    // point of the source ball
  Curvature source{-1.0};
  Curvature target{-1.0};
};

/// Maps feature rows into the target ball: exp_o, Mobius matvec by w^T,
/// bias translation, then the curvature-changing activation.
State encode(const Matrix& x, const EncoderParams& p, Activation sigma = Activation::identity);

/// Edge probability 1 / (exp((d^2 - r) / t) + 1).
double fermi_dirac(const Vector& zi, const Vector& zj, double r, double t, Curvature k);

}  // namespace hgde
