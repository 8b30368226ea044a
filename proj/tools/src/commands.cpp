#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "hgde/errors.hpp"
#include "hgde/flow.hpp"
#include "hgde/graphio.hpp"

namespace hgde::cli {
namespace {

namespace fs = std::filesystem;

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir = cfg.text("out");
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

int checked_int(const RunConfig& cfg, std::string_view key) {
  const long long v = cfg.integer(key);
  if (v < 0 || v > 1'000'000) {
    throw InputError("key '" + std::string(key) + "' is out of range: " + std::to_string(v));
  }
  return static_cast<int>(v);
}

SolverSpec solver_spec(const RunConfig& cfg) {
  SolverSpec spec;
  spec.method = parse_method(cfg.text("method"));
  spec.tau = cfg.number("tau");
  spec.horizon = cfg.number("T");
  spec.s_min = checked_int(cfg, "s_min");
  spec.s_max = checked_int(cfg, "s_max");
  spec.validate();
  return spec;
}

}  // namespace

void cmd_diffuse(const RunConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const Curvature k(cfg.number("kappa"));
  const Graph g = io::load_edge_list(cfg.required("graph"));

  DiffusivityConfig dcfg;
  dcfg.scheme = parse_scheme(cfg.text("scheme"));
  dcfg.channel_mode = parse_channel_mode(cfg.text("channel_mode"));
  dcfg.beta = cfg.number("beta");
  dcfg.heads = checked_int(cfg, "heads");
  dcfg.alpha = cfg.number("alpha");
  dcfg.seed = cfg.unsigned_integer("seed");
  dcfg.validate();

  const SolverSpec spec = solver_spec(cfg);
  const Activation sigma = parse_activation(cfg.text("sigma"));
  std::optional<ResidualSpec> residual;
  if (cfg.boolean("residual")) {
    residual = ResidualSpec{{cfg.number("eta1"), cfg.number("eta2"), cfg.number("eta3")}};
  }

  State z0;
  if (const std::string& features = cfg.text("features"); !features.empty()) {
    const Matrix x = io::load_features(features);
    io::require_matching_rows(x, g);
    z0 = ball::exp0_rows(x, k);
  } else {
    const int dim = checked_int(cfg, "dim");
    if (dim < 1) throw InputError("key 'dim' must be positive");
    z0 = random_initial_state(g.num_nodes(), dim, dcfg.seed, k);
  }

  SolverSpec run_spec = spec;
  run_spec.record_trace = false;
  const DiffusionResult result = run_diffusion(z0, g, dcfg, run_spec, residual, sigma, k);

  const fs::path dir = output_dir(cfg);
  io::save_matrix_csv(dir / "embeddings.csv", result.final_state);
  io::save_energy_csv(dir / "energy.csv", result.energy);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  nlohmann::ordered_json run;
  run["command"] = "diffuse";
  run["config"] = cfg.to_json();
  run["nodes"] = g.num_nodes();
  run["edges"] = g.num_edges();
  run["dim"] = z0.cols();
  run["wall_time_seconds"] = seconds;
  io::write_file_atomic(dir / "run.json", run.dump(2) + "\n");
}

double fit_order(std::span<const double> taus, std::span<const double> errors) {
  if (taus.size() != errors.size() || taus.size() < 2) {
    throw InputError("order fit needs at least two (tau, error) pairs");
  }
  const double n = static_cast<double>(taus.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]);
    const double y = std::log(std::max(errors[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw InputError("order fit needs distinct tau values");
  return (n * sxy - sx * sy) / denom;
}

std::vector<ConvergenceRow> convergence_study(std::span<const Method> methods,
                                              std::span<const double> taus,
                                              const ConvergenceStudy& study) {
  if (taus.size() < 2) throw InputError("convergence study needs at least two tau values");
  const Curvature k(study.kappa);
  const State origin = random_initial_state(static_cast<std::size_t>(study.rows), study.dim,
                                            study.seed, k, 0.3);
  std::mt19937_64 engine(study.seed + 1);
  std::normal_distribution<double> normal(0.0, 0.3);
  State direction(study.rows, study.dim);
  for (Eigen::Index i = 0; i < direction.rows(); ++i)
    for (Eigen::Index c = 0; c < direction.cols(); ++c) direction(i, c) = normal(engine);

  const GeodesicOracle oracle(origin, direction, k);
  const FlowFn flow = oracle.flow();
  const State exact = oracle.exact(study.horizon);

  std::vector<ConvergenceRow> rows;
  for (Method m : methods) {
    std::vector<double> errors;
    for (double tau : taus) {
      SolverSpec spec;
      spec.method = m;
      spec.tau = tau;
      spec.horizon = study.horizon;
      spec.s_min = study.s_min;
      spec.s_max = study.s_max;
      spec.record_trace = false;
      const SolveResult r = solve(origin, flow, spec, k);
      double err = 0.0;
      for (Eigen::Index i = 0; i < exact.rows(); ++i) {
        err = std::max(err, ball::distance(r.final_state.row(i).transpose(),
                                           exact.row(i).transpose(), k));
      }
      errors.push_back(err);
    }
    const double order = fit_order(taus, errors);
    for (std::size_t t = 0; t < taus.size(); ++t) rows.push_back({m, taus[t], errors[t], order});
  }
  return rows;
}

void cmd_convergence(const RunConfig& cfg) {
  std::vector<Method> methods;
  for (const std::string& name : cfg.list("methods")) methods.push_back(parse_method(name));
  if (methods.empty()) throw InputError("key 'methods' lists no method");
  const std::vector<double> taus = cfg.numbers("taus");
  for (double t : taus)
    if (!(t > 0.0)) throw InputError("tau values must be positive");

  ConvergenceStudy study;
  study.kappa = cfg.number("kappa");
  study.dim = checked_int(cfg, "dim");
  if (study.dim < 1) throw InputError("key 'dim' must be positive");
  study.horizon = cfg.number("T");
  study.s_min = checked_int(cfg, "s_min");
  study.s_max = checked_int(cfg, "s_max");
  study.seed = cfg.unsigned_integer("seed");
  const auto rows = convergence_study(methods, taus, study);

  std::string out = "method,tau,error,fitted_order\n";
  char buf[128];
  for (const ConvergenceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g\n", std::string(to_string(r.method)).c_str(),
                  r.tau, r.error, r.fitted_order);
    out += buf;
  }
  io::write_file_atomic(output_dir(cfg) / "convergence.csv", out);
}

void cmd_orc(const RunConfig& cfg) {
  const Graph g = io::load_edge_list(cfg.required("graph"));
  const double alpha = cfg.number("alpha");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("key 'alpha' must lie in [0, 1], got " + cfg.text("alpha"));
  }
  io::save_orc_csv(output_dir(cfg) / "orc.csv", orc_curvatures(g, alpha));
}

void cmd_knn(const RunConfig& cfg) {
  const Matrix x = io::load_features(cfg.required("features"));
  const long long k = cfg.integer("k");
  if (k <= 0 || k >= x.rows()) {
    throw InputError("key 'k' must lie in [1, " + std::to_string(x.rows() - 1) + "], got " +
                     cfg.text("k"));
  }
  const Graph g = knn_graph(x, static_cast<int>(k), parse_metric(cfg.text("metric")));
  io::save_edge_list(output_dir(cfg) / "edges.txt", g);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph diffusion on the Poincare ball"};
  app.require_subcommand(1);

  struct Command {
    std::string name;
    std::string help;
    void (*fn)(const RunConfig&);
  };
  const std::vector<Command> commands{
      {"diffuse", "integrate the diffusion flow and record the energy trace", cmd_diffuse},
      {"convergence", "measure solver orders on the geodesic test flow", cmd_convergence},
      {"orc", "export Ollivier-Ricci edge curvatures", cmd_orc},
      {"knn", "build a kNN graph from a feature matrix", cmd_knn},
  };

  std::map<std::string, std::string> config_paths;
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subs;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_paths[c.name], "key=value configuration file");
    auto& values = flag_values[c.name];
    for (const KeyInfo& key : known_keys()) {
      const std::string name(key.name);
      sub->add_option("--" + name, values[name], std::string(key.help));
    }
    subs[c.name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  for (const Command& c : commands) {
    CLI::App* sub = subs[c.name];
    if (!sub->parsed()) continue;
    try {
      RunConfig cfg = RunConfig::defaults(c.name);
      if (!config_paths[c.name].empty()) cfg.merge_file(config_paths[c.name]);
      for (const KeyInfo& key : known_keys()) {
        const std::string name(key.name);
        if (sub->count("--" + name) > 0) cfg.set(name, flag_values[c.name][name]);
      }
      c.fn(cfg);
      return 0;
    } catch (const InputError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const NumericalError& e) {
      err << "numerical error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}

}  // namespace hgde::cli
