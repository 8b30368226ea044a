#include "hgde/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hgde/errors.hpp"

namespace hgde::transport {
namespace {

constexpr double kReducedCostTol = 1e-12;
constexpr int kDegenerateBeforeBland = 50;

struct Cell {
  int row;
  int col;
};

// Basis bookkeeping: basic cells form a spanning tree of the bipartite graph
// rows x columns (m + n - 1 cells, zero-valued cells allowed).
class Basis {
 public:
  Basis(int m, int n) : m_(m), n_(n), basic_(static_cast<std::size_t>(m) * n, false) {}

  bool is_basic(int i, int j) const { return basic_[index(i, j)]; }
  void set(int i, int j, bool on) { basic_[index(i, j)] = on; }

  // Potentials u_i + v_j = c_ij on every basic cell, anchored at u_0 = 0.
  void potentials(const Eigen::MatrixXd& cost, std::vector<double>& u,
                  std::vector<double>& v) const {
    constexpr double unset = std::numeric_limits<double>::quiet_NaN();
    u.assign(m_, unset);
    v.assign(n_, unset);
    u[0] = 0.0;
    std::deque<int> frontier{0};  // rows as [0, m), columns as m + j
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop_front();
      if (node < m_) {
        for (int j = 0; j < n_; ++j) {
          if (is_basic(node, j) && std::isnan(v[j])) {
            v[j] = cost(node, j) - u[node];
            frontier.push_back(m_ + j);
          }
        }
      } else {
        const int j = node - m_;
        for (int i = 0; i < m_; ++i) {
          if (is_basic(i, j) && std::isnan(u[i])) {
            u[i] = cost(i, j) - v[j];
            frontier.push_back(i);
          }
        }
      }
    }
    for (double x : u)
      if (std::isnan(x)) throw NumericalError("transport basis is not spanning");
    for (double x : v)
      if (std::isnan(x)) throw NumericalError("transport basis is not spanning");
  }

  // Tree path from row p to column q, as the list of basic cells traversed
  // starting next to column q.
  std::vector<Cell> path(int p, int q) const {
    const int total = m_ + n_;
    std::vector<int> parent(total, -1);
    std::vector<bool> seen(total, false);
    std::deque<int> frontier{p};
    seen[p] = true;
    while (!frontier.empty()) {
      const int node = frontier.front();
      frontier.pop_front();
      if (node == m_ + q) break;
      if (node < m_) {
        for (int j = 0; j < n_; ++j) {
          if (is_basic(node, j) && !seen[m_ + j]) {
            seen[m_ + j] = true;
            parent[m_ + j] = node;
            frontier.push_back(m_ + j);
          }
        }
      } else {
        const int j = node - m_;
        for (int i = 0; i < m_; ++i) {
          if (is_basic(i, j) && !seen[i]) {
            seen[i] = true;
            parent[i] = node;
            frontier.push_back(i);
          }
        }
      }
    }
    if (!seen[m_ + q]) throw NumericalError("transport basis has no cycle path");
    std::vector<Cell> cells;
    for (int node = m_ + q; node != p; node = parent[node]) {
      const int prev = parent[node];
      if (node >= m_) {
        cells.push_back({prev, node - m_});
      } else {
        cells.push_back({node, prev - m_});
      }
    }
    return cells;
  }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int m_;
  int n_;
  std::vector<bool> basic_;
};

}  // namespace

void Problem::validate() const {
  const auto m = static_cast<Eigen::Index>(supply.size());
  const auto n = static_cast<Eigen::Index>(demand.size());
  if (m == 0 || n == 0) throw InputError("transport problem needs supplies and demands");
  if (cost.rows() != m || cost.cols() != n) {
    throw InputError("transport cost matrix must be " + std::to_string(m) + "x" +
                     std::to_string(n));
  }
  if (!cost.allFinite()) throw InputError("transport cost has non-finite entries");
  for (double s : supply)
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("negative or non-finite supply");
  for (double d : demand)
    if (!(d >= 0.0) || !std::isfinite(d)) throw InputError("negative or non-finite demand");
  const double ts = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double td = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(ts - td) > 1e-9 * std::max(1.0, ts)) {
    throw InputError("transport problem is unbalanced: supply " + std::to_string(ts) +
                     " vs demand " + std::to_string(td));
  }
}

Solution solve(const Problem& problem) {
  problem.validate();
  const int m = static_cast<int>(problem.supply.size());
  const int n = static_cast<int>(problem.demand.size());
  const Eigen::MatrixXd& c = problem.cost;

  Solution sol;
  sol.plan = Eigen::MatrixXd::Zero(m, n);
  Basis basis(m, n);

  // North-west corner start; on ties only the row advances, which leaves a
  // zero-valued basic cell and keeps the basis a spanning tree.
  {
    std::vector<double> ra = problem.supply;
    std::vector<double> rb = problem.demand;
    int i = 0;
    int j = 0;
    while (true) {
      const double q = std::max(0.0, std::min(ra[i], rb[j]));
      sol.plan(i, j) = q;
      basis.set(i, j, true);
      ra[i] -= q;
      rb[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const int max_pivots = 50 * (m + 1) * (n + 1) + 1000;
  int degenerate_run = 0;
  std::vector<double>& u = sol.row_potential;
  std::vector<double>& v = sol.col_potential;

  while (true) {
    basis.potentials(c, u, v);

    // Entering cell: most negative reduced cost, or the first negative one
    // (Bland) after a run of degenerate pivots.
    const bool bland = degenerate_run >= kDegenerateBeforeBland;
    int p = -1;
    int q = -1;
    double best = -kReducedCostTol;
    for (int i = 0; i < m && !(bland && p >= 0); ++i) {
      for (int j = 0; j < n; ++j) {
        if (basis.is_basic(i, j)) continue;
        const double reduced = c(i, j) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          p = i;
          q = j;
          if (bland) break;
        }
      }
    }
    if (p < 0) break;
    if (sol.pivots >= max_pivots) {
      throw NumericalError("transport simplex exceeded its pivot budget");
    }

    // Cycle: (p,q) gains, then cells along the tree path alternate lose/gain.
    const std::vector<Cell> cycle = basis.path(p, q);
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    for (std::size_t s = 0; s < cycle.size(); s += 2) {
      const double x = sol.plan(cycle[s].row, cycle[s].col);
      const bool better = x < theta ||
                          (x == theta && (cycle[s].row < cycle[leaving].row ||
                                          (cycle[s].row == cycle[leaving].row &&
                                           cycle[s].col < cycle[leaving].col)));
      if (leaving < 0 || better) {
        theta = x;
        leaving = static_cast<int>(s);
      }
    }
    for (std::size_t s = 0; s < cycle.size(); ++s) {
      double& x = sol.plan(cycle[s].row, cycle[s].col);
      x += (s % 2 == 0) ? -theta : theta;
      if (x < 0.0) x = 0.0;
    }
    sol.plan(p, q) = theta;
    sol.plan(cycle[leaving].row, cycle[leaving].col) = 0.0;
    basis.set(p, q, true);
    basis.set(cycle[leaving].row, cycle[leaving].col, false);

    degenerate_run = theta == 0.0 ? degenerate_run + 1 : 0;
    ++sol.pivots;
  }

  sol.cost = (c.array() * sol.plan.array()).sum();
  return sol;
}

Certificate certify(const Problem& problem, const Solution& solution) {
  const auto m = static_cast<Eigen::Index>(problem.supply.size());
  const auto n = static_cast<Eigen::Index>(problem.demand.size());
  Certificate cert;
  if (solution.plan.rows() != m || solution.plan.cols() != n ||
      solution.row_potential.size() != static_cast<std::size_t>(m) ||
      solution.col_potential.size() != static_cast<std::size_t>(n)) {
    throw InputError("transport solution does not match the problem shape");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    cert.primal_infeasibility = std::max(
        cert.primal_infeasibility, std::abs(solution.plan.row(i).sum() - problem.supply[i]));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    cert.primal_infeasibility = std::max(
        cert.primal_infeasibility, std::abs(solution.plan.col(j).sum() - problem.demand[j]));
  }
  cert.primal_infeasibility =
      std::max(cert.primal_infeasibility, std::max(0.0, -solution.plan.minCoeff()));

  double primal = 0.0;
  double dual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    dual += problem.supply[i] * solution.row_potential[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      primal += problem.cost(i, j) * solution.plan(i, j);
      const double slack =
          solution.row_potential[i] + solution.col_potential[j] - problem.cost(i, j);
      cert.dual_infeasibility = std::max(cert.dual_infeasibility, slack);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) dual += problem.demand[j] * solution.col_potential[j];
  cert.gap = std::abs(primal - dual);
  return cert;
}

}  // namespace hgde::transport
