#include "hgde/graphio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hgde/errors.hpp"

namespace hgde::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::string format_double(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace

Graph parse_edge_list(std::istream& in, std::optional<std::size_t> num_nodes) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::optional<std::size_t> header;
  std::size_t max_id = 0;
  bool any = false;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      std::string_view comment = trim(line.substr(hash + 1));
      if (comment.starts_with("nodes:")) {
        const std::string_view value = trim(comment.substr(6));
        std::size_t n = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
          throw InputError(line_error(lineno, "malformed node-count header"));
        }
        header = n;
      }
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    std::istringstream fields{std::string(line)};
    std::string a;
    std::string b;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw InputError(line_error(lineno, "expected two node ids, got '" +
                                              std::string(line) + "'"));
    }
    auto parse_id = [&](const std::string& tok) {
      if (!tok.empty() && tok[0] == '-') {
        throw InputError(line_error(lineno, "negative node id " + tok));
      }
      std::size_t id = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw InputError(line_error(lineno, "invalid node id '" + tok + "'"));
      }
      return id;
    };
    const std::size_t u = parse_id(a);
    const std::size_t v = parse_id(b);
    if (u == v) throw InputError(line_error(lineno, "self-loop on node " + a));
    max_id = std::max({max_id, u, v});
    any = true;
    edges.emplace_back(u, v);
  }

  const std::size_t needed = any ? max_id + 1 : 0;
  std::size_t n = num_nodes.value_or(header.value_or(needed));
  if (n < needed) {
    throw InputError("node count " + std::to_string(n) + " is smaller than max id + 1 = " +
                     std::to_string(needed));
  }
  return Graph(n, edges);
}

Graph load_edge_list(const std::filesystem::path& path, std::optional<std::size_t> num_nodes) {
  std::ifstream in = open_input(path);
  try {
    return parse_edge_list(in, num_nodes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::string out = "# nodes: " + std::to_string(g.num_nodes()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
  }
  write_file_atomic(path, out);
}

Matrix parse_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view cell =
          trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw InputError(line_error(lineno, "non-numeric cell '" + std::string(cell) + "'"));
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError(line_error(lineno, "expected " + std::to_string(rows.front().size()) +
                                              " columns, got " + std::to_string(row.size())));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("matrix file is empty");

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

Matrix load_features(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return parse_csv_matrix(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void require_matching_rows(const Matrix& x, const Graph& g) {
  if (static_cast<std::size_t>(x.rows()) != g.num_nodes()) {
    throw InputError("feature matrix has " + std::to_string(x.rows()) +
                     " rows but the graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void save_energy_csv(const std::filesystem::path& path, const EnergyTrace& trace) {
  std::string out = "t,energy\n";
  for (const EnergySample& s : trace) {
    out += format_double(s.t) + "," + format_double(s.energy) + "\n";
  }
  write_file_atomic(path, out);
}

void save_orc_csv(const std::filesystem::path& path, const OrcResult& orc) {
  std::string out = "u,v,curvature,wasserstein\n";
  for (const EdgeCurvature& e : orc.edges) {
    out += std::to_string(e.u) + "," + std::to_string(e.v) + "," +
           format_double(e.curvature) + "," + format_double(e.wasserstein) + "\n";
  }
  write_file_atomic(path, out);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw InputError("cannot move '" + tmp.string() + "' to '" + path.string() +
                     "': " + ec.message());
  }
}

}  // namespace hgde::io

namespace hgde {

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "cosine") return Metric::cosine;
  throw InputError("unknown metric '" + std::string(name) + "' (expected euclidean or cosine)");
}

std::string_view to_string(Metric m) { return m == Metric::euclidean ? "euclidean" : "cosine"; }

Graph knn_graph(const Matrix& x, int k, Metric metric) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (k <= 0) throw InputError("k must be positive, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) >= n) {
    throw InputError("k = " + std::to_string(k) + " needs more than " + std::to_string(n) +
                     " points");
  }
  if (!x.allFinite()) throw InputError("features contain non-finite values");

  const Vector norms = x.rowwise().norm();
  auto dist = [&](std::size_t i, std::size_t j) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    if (metric == Metric::euclidean) return (x.row(a) - x.row(b)).squaredNorm();
    const double denom = norms[a] * norms[b];
    return denom > 0.0 ? 1.0 - x.row(a).dot(x.row(b)) / denom : 1.0;
  };

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(n * static_cast<std::size_t>(k));
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) cand.emplace_back(dist(i, j), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int r = 0; r < k; ++r) edges.emplace_back(i, cand[static_cast<std::size_t>(r)].second);
  }
  return Graph(n, edges);
}

State encode(const Matrix& x, const EncoderParams& p, Activation sigma) {
  if (p.w.rows() != x.cols()) {
    throw InputError("encoder weight has " + std::to_string(p.w.rows()) +
                     " rows but features have " + std::to_string(x.cols()) + " columns");
  }
  if (p.bias.size() != p.w.cols()) {
    throw InputError("encoder bias dimension does not match the weight columns");
  }
  if (!p.bias.allFinite() || p.bias.norm() > p.source.max_norm()) {
    throw InputError("encoder bias lies outside the source ball");
  }
  const Vector bias_tangent = ball::log0(p.bias, p.source);
  const Vector origin = Vector::Zero(p.w.cols());
  State out(x.rows(), p.w.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector xh = ball::exp0(x.row(i).transpose(), p.source);
    const Vector zp = ball::exp0(p.w.transpose() * ball::log0(xh, p.source), p.source);
    const Vector z =
        ball::exp_map(zp, ball::parallel_transport(origin, zp, bias_tangent, p.source), p.source);
    Vector t = ball::log0(z, p.source);
    if (sigma == Activation::tanh) t = t.array().tanh().matrix();
    out.row(i) = ball::exp0(t, p.target).transpose();
  }
  return out;
}

double fermi_dirac(const Vector& zi, const Vector& zj, double r, double t, Curvature k) {
  if (!(t > 0.0)) throw InputError("Fermi-Dirac temperature must be positive");
  const double d = ball::distance(zi, zj, k);
  return 1.0 / (std::exp((d * d - r) / t) + 1.0);
}

}  // namespace hgde
