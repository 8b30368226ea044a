#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "hgde/errors.hpp"
#include "hgde/graphio.hpp"

namespace hgde {
namespace {

namespace fs = std::filesystem;
using testing::Gen;

const Curvature kUnit(-1.0);

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_edge_list(in);
}

Matrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return io::parse_csv_matrix(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "hgde_graphio_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(EdgeList, ParsesPathAndDeduplicates) {
  const Graph g = parse("0 1\n1 2");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(2), 1u);
  EXPECT_EQ(parse("0 1\n1 0\n").num_edges(), 1u);
  const Graph c = parse("# a comment\n# nodes: 6\n\n2 3   # trailing\n");
  EXPECT_EQ(c.num_nodes(), 6u);
  EXPECT_TRUE(c.has_edge(3, 2));
}

TEST(EdgeList, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("0 1\n0 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("0 1\n1 x\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("0 -1\n").find("negative"), std::string::npos);
  EXPECT_NE(message("0 1 2\n").find("line 1"), std::string::npos);
  std::istringstream small("# nodes: 2\n0 5\n");
  EXPECT_THROW(io::parse_edge_list(small), InputError);
  std::istringstream over("0 1\n");
  EXPECT_EQ(io::parse_edge_list(over, 10).num_nodes(), 10u);
  EXPECT_THROW(io::load_edge_list(scratch("missing.txt")), InputError);
}

TEST(EdgeList, SaveLoadRoundTrip) {
  Gen gen(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = gen.erdos_renyi(5 + gen.index(20), 0.2);
    const fs::path p = scratch("roundtrip.txt");
    io::save_edge_list(p, g);
    const Graph back = io::load_edge_list(p);
    EXPECT_EQ(back.num_nodes(), g.num_nodes());
    EXPECT_EQ(back.edges(), g.edges());
  }
}

TEST(Features, ParsesAndRejectsBadInput) {
  const Matrix m = parse_matrix("1,2\n3.5, -4\n5e-1,6\n");
  ASSERT_EQ(m.rows(), 3);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_EQ(m(1, 0), 3.5);
  EXPECT_EQ(m(2, 0), 0.5);
  EXPECT_THROW(parse_matrix(""), InputError);
  EXPECT_THROW(parse_matrix("1,2\n3\n"), InputError);
  EXPECT_THROW(parse_matrix("1,abc\n"), InputError);
  EXPECT_THROW(io::require_matching_rows(m, parse("0 1\n")), InputError);
  EXPECT_NO_THROW(io::require_matching_rows(m, parse("0 1\n1 2\n")));
}

TEST(Features, MatrixCsvRoundTripsExactly) {
  Gen gen(2);
  const Matrix m = gen.state(7, 5, kUnit);
  const fs::path p = scratch("matrix.csv");
  io::save_matrix_csv(p, m);
  EXPECT_EQ(io::load_features(p), m);
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST(Knn, CollinearPoints) {
  Matrix x(3, 1);
  x << 0.0, 1.0, 10.0;
  const Graph g = knn_graph(x, 1, Metric::euclidean);
  ASSERT_EQ(g.num_edges(), 2u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
}

TEST(Knn, CompleteGraphAndNoSelfLoops) {
  Gen gen(3);
  const Matrix x = Matrix::Random(6, 3);
  const Graph g = knn_graph(x, 5, Metric::cosine);
  EXPECT_EQ(g.num_edges(), 15u);
  const Graph h = knn_graph(x, 2, Metric::euclidean);
  for (const Edge& e : h.edges()) EXPECT_NE(e.u, e.v);
  EXPECT_THROW(knn_graph(x, 0, Metric::euclidean), InputError);
  EXPECT_THROW(knn_graph(x, 6, Metric::euclidean), InputError);
}

TEST(Knn, MatchesBruteForceAndTieBreaksByIndex) {
  Gen gen(4);
  const Matrix x = Matrix::Random(15, 2);
  const int k = 3;
  const Graph g = knn_graph(x, k, Metric::euclidean);
  for (Eigen::Index i = 0; i < 15; ++i) {
    int taken = 0;
    std::vector<bool> used(15, false);
    used[static_cast<std::size_t>(i)] = true;
    while (taken < k) {
      Eigen::Index best = -1;
      for (Eigen::Index j = 0; j < 15; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        if (best < 0 || (x.row(i) - x.row(j)).squaredNorm() < (x.row(i) - x.row(best)).squaredNorm())
          best = j;
      }
      used[static_cast<std::size_t>(best)] = true;
      EXPECT_TRUE(g.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(best)));
      ++taken;
    }
  }
  Matrix tie(5, 1);
  tie << 0.0, -1.0, 1.0, -1.1, 1.1;
  const Graph t = knn_graph(tie, 1, Metric::euclidean);
  EXPECT_TRUE(t.has_edge(0, 1));
  EXPECT_FALSE(t.has_edge(0, 2));
}

TEST(Knn, PermutationEquivariant) {
  Gen gen(5);
  const Matrix x = Matrix::Random(20, 4);
  const auto perm = gen.permutation(20);
  Matrix px(20, 4);
  for (std::size_t i = 0; i < 20; ++i) px.row(static_cast<Eigen::Index>(perm[i])) = x.row(static_cast<Eigen::Index>(i));
  for (Metric m : {Metric::euclidean, Metric::cosine}) {
    const Graph a = knn_graph(x, 3, m);
    const Graph b = knn_graph(px, 3, m);
    EXPECT_EQ(testing::relabel(a, perm).edges(), b.edges());
  }
}

TEST(Encoder, IdentityCompositionAndZeros) {
  Gen gen(6);
  const Matrix x = Matrix::Random(5, 3) * 0.5;
  EncoderParams p;
  p.w = Matrix::Identity(3, 3);
  p.bias = Vector::Zero(3);
  const State z = encode(x, p);
  EXPECT_LE((z - ball::exp0_rows(x, kUnit)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(encode(Matrix::Zero(2, 3), p).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Encoder, MatchesStepwiseComposition) {
  Gen gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    EncoderParams p;
    p.source = Curvature(-gen.uniform(0.2, 2.0));
    p.target = Curvature(-gen.uniform(0.2, 2.0));
    p.w = Matrix::Random(4, 3);
    p.bias = gen.ball_point(3, p.source, 0.5);
    const Matrix x = Matrix::Random(3, 4);
    for (Activation sigma : {Activation::identity, Activation::tanh}) {
      const State z = encode(x, p, sigma);
      for (Eigen::Index i = 0; i < 3; ++i) {
        const Vector xh = ball::exp0(x.row(i).transpose(), p.source);
        const Vector zp = ball::mobius_matvec(p.w.transpose(), xh, p.source);
        const Vector zb = ball::exp_map(
            zp, ball::parallel_transport(Vector::Zero(3), zp, ball::log0(p.bias, p.source), p.source),
            p.source);
        Vector t = ball::log0(zb, p.source);
        if (sigma == Activation::tanh) t = t.array().tanh().matrix();
        EXPECT_LE((z.row(i).transpose() - ball::exp0(t, p.target)).norm(), 1e-12);
      }
    }
  }
}

TEST(Encoder, RejectsBadShapesAndBias) {
  EncoderParams p;
  p.w = Matrix::Identity(2, 2);
  p.bias = Vector::Constant(2, 5.0);
  EXPECT_THROW(encode(Matrix::Zero(1, 2), p), InputError);
  p.bias = Vector::Zero(2);
  EXPECT_THROW(encode(Matrix::Zero(1, 3), p), InputError);
}

TEST(FermiDirac, Values) {
  const Vector o = Vector::Zero(2);
  EXPECT_NEAR(fermi_dirac(o, o, 2.0, 1.0, kUnit), 1.0 / (std::exp(-2.0) + 1.0), 1e-15);
  Vector y(2);
  y << std::tanh(0.5), 0.0;
  EXPECT_NEAR(fermi_dirac(o, y, 1.0, 0.7, kUnit), 0.5, 1e-14);
  Vector far(2);
  far << 0.99999, 0.0;
  EXPECT_LT(fermi_dirac(o, far, 1.0, 1.0, kUnit), 1e-10);
  double prev = 1.0;
  for (double r = 0.0; r < 0.95; r += 0.1) {
    Vector p(2);
    p << r, 0.0;
    const double v = fermi_dirac(o, p, 1.0, 1.0, kUnit);
    EXPECT_LE(v, prev);
    EXPECT_GT(v, 0.0);
    prev = v;
  }
  EXPECT_THROW(fermi_dirac(o, o, 1.0, 0.0, kUnit), InputError);
}

}  // namespace
}  // namespace hgde
