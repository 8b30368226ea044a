#pragma once

// Exact solver for small balanced transportation problems.
//
//   min  sum_ij c_ij x_ij
//   s.t. sum_j x_ij = supply_i,  sum_i x_ij = demand_j,  x >= 0
//
// Solved with the transportation simplex (north-west corner start, MODI
// potentials, cycle pivots). The returned potentials form a dual solution that
// certifies optimality.

#include <vector>

#include <Eigen/Core>

namespace hgde::transport {

struct Problem {
  std::vector<double> supply;
  std::vector<double> demand;
  Eigen::MatrixXd cost;  // supply.size() x demand.size()

  void validate() const;
};

struct Solution {
  Eigen::MatrixXd plan;
  double cost = 0.0;
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  int pivots = 0;
};

/// Primal residuals, dual violation and primal-dual gap of a solution.
struct Certificate {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double gap = 0.0;

  bool holds(double tol) const {
    return primal_infeasibility <= tol && dual_infeasibility <= tol && gap <= tol;
  }
};

Solution solve(const Problem& problem);
Certificate certify(const Problem& problem, const Solution& solution);

}  // namespace hgde::transport
