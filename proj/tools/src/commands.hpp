#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "hgde/solvers.hpp"

namespace hgde::cli {

void cmd_diffuse(const RunConfig& cfg);
void cmd_convergence(const RunConfig& cfg);
void cmd_orc(const RunConfig& cfg);
void cmd_knn(const RunConfig& cfg);

struct ConvergenceRow {
  Method method;
  double tau;
  double error;
  double fitted_order;
};

struct ConvergenceStudy {
  double kappa = -1.0;
  Eigen::Index dim = 4;
  Eigen::Index rows = 8;
  double horizon = 1.0;
  int s_min = 2;
  int s_max = 4;
  std::uint64_t seed = 0;
};

/// Max geodesic error at the horizon against GeodesicOracle, per method and tau.
std::vector<ConvergenceRow> convergence_study(std::span<const Method> methods,
                                              std::span<const double> taus,
                                              const ConvergenceStudy& study);

/// Least-squares slope of log(error) against log(tau).
double fit_order(std::span<const double> taus, std::span<const double> errors);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hgde::cli
