// Command-line front end: single runs, multi-seed benchmarks, the 1D
// stability analyzer and the DAHA damping sweep.
//
// Every subcommand accepts --config FILE.json whose keys are long flag names
// without the leading dashes ({"alpha": 0.3, "eps-inner": 1e-9, ...}).
// Flags given on the command line take precedence over the file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphpack/harness.hpp"
#include "sphpack/potential.hpp"
#include "sphpack/solvers.hpp"
#include "sphpack/stability.hpp"

namespace {

using nlohmann::json;
using namespace sphpack;

constexpr int kExitConverged = 0;
constexpr int kExitBudget = 2;
constexpr int kExitDiverged = 3;

struct RunOptions {
  std::string method = "daha";
  std::string form = "ns";
  std::size_t n = 7;
  std::size_t dim = 2;
  double diameter = 1.0;
  double alpha = 0.3;
  double beta = 3.0;
  double c = 2.0;
  std::optional<double> gamma;
  double tau = 0.1;
  double eps = 1e-6;
  double eps_inner = 1e-9;
  std::size_t inner_cap = 10;
  std::size_t max_outer = 1'000'000;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;

  SolverParams params() const {
    SolverParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.c = c;
    p.gamma = gamma;
    p.tau = tau;
    p.form = parse_constraint_form(form);
    p.epsilon = eps;
    p.epsilon_inner = eps_inner;
    p.inner_cap = inner_cap;
    p.max_outer = max_outer;
    return p;
  }
  PackingProblem problem() const { return PackingProblem(n, dim, diameter); }
};

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--method", o.method, "aha | daha | nap | nav")
      ->check(CLI::IsMember({"aha", "daha", "nap", "nav"}));
  app->add_option("--form", o.form, "constraint form: ns | s")->check(CLI::IsMember({"ns", "s"}));
  app->add_option("--n", o.n, "number of spheres")->check(CLI::PositiveNumber);
  app->add_option("--dim", o.dim, "spatial dimension")->check(CLI::PositiveNumber);
  app->add_option("--diameter", o.diameter, "sphere diameter")->check(CLI::PositiveNumber);
  app->add_option("--alpha", o.alpha);
  app->add_option("--beta", o.beta);
  app->add_option("--c", o.c, "DAHA damping");
  app->add_option("--gamma", o.gamma, "DAHA cross-term weight (default sqrt(alpha*beta))");
  app->add_option("--tau", o.tau, "NAV Euler step");
  app->add_option("--eps", o.eps, "outer tolerance");
  app->add_option("--eps-inner", o.eps_inner, "inner tolerance (NAP/NAV)");
  app->add_option("--inner-cap", o.inner_cap, "max inner iterations (NAP/NAV)");
  app->add_option("--max-outer", o.max_outer, "outer iteration budget");
  app->add_option("--seed", o.seed, "initial configuration seed");
  app->add_option("--out", o.out, "output file (default stdout)");
}

/// Fills options that were not given on the command line from a JSON file.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  const json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = nullptr;
    try {
      opt = app->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw std::runtime_error("config file key '" + key + "' is not an option of '" +
                               app->get_name() + "'");
    }
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!text.empty()) text += ',';
        text += item.is_string() ? item.get<std::string>() : item.dump();
      }
    } else {
      text = value.dump();
    }
    opt->add_result(text);
    opt->run_callback();
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

int exit_code_for(Status s) {
  switch (s) {
    case Status::Converged: return kExitConverged;
    case Status::BudgetExhausted: return kExitBudget;
    case Status::Diverged: return kExitDiverged;
  }
  return 1;
}

json params_json(const RunOptions& o) {
  json p = {{"alpha", o.alpha}, {"beta", o.beta}, {"c", o.c},
            {"tau", o.tau}, {"eps", o.eps}, {"eps_inner", o.eps_inner},
            {"inner_cap", o.inner_cap}, {"max_outer", o.max_outer}};
  p["gamma"] = o.gamma ? json(*o.gamma) : json(nullptr);
  return p;
}

std::string positions_csv(const Configuration& x) {
  std::ostringstream out;
  out.precision(17);
  out << "sphere";
  for (std::size_t a = 0; a < x.dim(); ++a) out << ",x" << a;
  out << '\n';
  for (std::size_t i = 0; i < x.count(); ++i) {
    out << i;
    for (std::size_t a = 0; a < x.dim(); ++a) out << ',' << x(i, a);
    out << '\n';
  }
  return out.str();
}

int run_solve(const RunOptions& o, const std::string& trace_path,
              const std::vector<std::size_t>& dump_at, const std::string& dump_prefix) {
  const PackingProblem problem = o.problem();
  SolverParams params = o.params();
  params.fallback_seed = o.seed;
  const Method method = parse_method(o.method);
  const Configuration x0 = sample_initial_configuration(o.seed, problem);

  const std::set<std::size_t> dumps(dump_at.begin(), dump_at.end());
  json dump_log = json::array();
  IterationObserver observer;
  if (!dumps.empty()) {
    observer = [&](std::size_t n, const SolverState& s) {
      if (!dumps.count(n)) return;
      json entry = {{"iteration", n}, {"W", potential_value(s.x)}};
      if (problem.dim == 2) entry["A"] = overlap_proportion(s.x, problem.diameter);
      if (!dump_prefix.empty()) {
        const std::string path = dump_prefix + "_" + std::to_string(n) + ".csv";
        write_text(path, positions_csv(s.x));
        entry["file"] = path;
      }
      dump_log.push_back(std::move(entry));
    };
  }

  const SolverTrace trace = run_solver(method, x0, params, problem, observer);
  const SeedRecord rec = make_seed_record(o.seed, trace, problem);

  json j;
  j["sampler"] = kSamplerName;
  j["method"] = o.method;
  j["form"] = o.form;
  j["n"] = problem.count;
  j["dim"] = problem.dim;
  j["diameter"] = problem.diameter;
  j["seed"] = o.seed;
  j["params"] = params_json(o);
  j["status"] = to_string(trace.status);
  j["iterations"] = trace.total_iterations;
  j["outer_iterations"] = trace.outer_iterations;
  j["final_rel_error"] = trace.rel_errors.empty() ? json(nullptr) : json(trace.rel_errors.back());
  j["W"] = std::isfinite(rec.final_w) ? json(rec.final_w) : json(nullptr);
  j["A"] = rec.final_overlap ? json(*rec.final_overlap) : json(nullptr);
  j["kkt"] = {{"stationarity", trace.kkt.stationarity},
              {"complementarity", trace.kkt.complementarity},
              {"feasibility", trace.kkt.feasibility}};
  j["positions"] = trace.final.x.values();
  if (!dumps.empty()) j["dumps"] = dump_log;
  write_text(o.out, j.dump(2) + "\n");

  if (!trace_path.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "iter,rel_error,inner,spread\n";
    for (std::size_t i = 0; i < trace.rel_errors.size(); ++i) {
      csv << (i + 1) << ',' << trace.rel_errors[i] << ',' << trace.inner_counts[i] << ','
          << trace.spread[i] << '\n';
    }
    write_text(trace_path, csv.str());
  }
  return exit_code_for(trace.status);
}

int run_bench(const RunOptions& o, std::size_t seeds, std::uint64_t base_seed,
              const std::string& report, std::size_t workers) {
  ExperimentConfig cfg;
  cfg.problem = o.problem();
  cfg.method = parse_method(o.method);
  cfg.params = o.params();
  cfg.seed_count = seeds;
  cfg.base_seed = base_seed;
  cfg.workers = workers;
  const ExperimentReport rep = run_experiment(cfg);
  const ReportFormat fmt = parse_report_format(report);
  if (o.out.empty() || o.out == "-") {
    std::cout << emit_report(rep, fmt);
  } else {
    write_report(rep, fmt, o.out);
  }
  if (rep.diverged > 0) return kExitDiverged;
  if (rep.budget_exhausted > 0) return kExitBudget;
  return kExitConverged;
}

json complex_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sphere packing by (damped) Arrow-Hurwicz and nested Lagrangian methods"};
  app.require_subcommand(1);

  RunOptions solve_opts;
  std::string trace_path;
  std::vector<std::size_t> dump_at;
  std::string dump_prefix;
  auto* solve = app.add_subcommand("solve", "run one solver from a seeded Gaussian start");
  add_run_options(solve, solve_opts);
  solve->add_option("--trace", trace_path, "CSV of per-iteration relative errors");
  solve->add_option("--dump-at", dump_at, "iterations at which to record W, A and positions")
      ->delimiter(',');
  solve->add_option("--dump-prefix", dump_prefix, "write positions to PREFIX_<iter>.csv");
  solve->add_option("--config", solve_opts.config, "JSON file with default option values");

  RunOptions bench_opts;
  std::size_t bench_seeds = 20;
  std::uint64_t bench_base_seed = 0;
  std::string bench_report = "json";
  std::size_t bench_workers = 0;
  auto* bench = app.add_subcommand("bench", "multi-seed benchmark with summary indicators");
  add_run_options(bench, bench_opts);
  bench->add_option("--seeds", bench_seeds, "number of initial configurations")
      ->check(CLI::PositiveNumber);
  bench->add_option("--base-seed", bench_base_seed, "seed of the first configuration");
  bench->add_option("--report", bench_report, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--workers", bench_workers, "worker threads (0 = all cores)");
  bench->add_option("--config", bench_opts.config, "JSON file with default option values");

  std::string system = "aha-ns";
  OdeParams ode;
  bool integrate = false;
  double x0 = 1.5;
  double lambda0 = 0.0;
  double dt = 1e-3;
  std::size_t steps = 100000;
  std::size_t stride = 1;
  std::string stab_out;
  std::string stab_config;
  auto* stab = app.add_subcommand("stability", "1D two-sphere linear stability analyzer");
  stab->add_option("--system", system, "aha-ns | aha-s | daha-ns | daha-s")
      ->check(CLI::IsMember({"aha-ns", "aha-s", "daha-ns", "daha-s"}));
  stab->add_option("--alpha", ode.alpha);
  stab->add_option("--beta", ode.beta);
  stab->add_option("--c", ode.c);
  stab->add_option("--diameter", ode.d)->check(CLI::PositiveNumber);
  stab->add_flag("--integrate", integrate, "integrate the nonlinear ODE and emit CSV");
  stab->add_option("--x0", x0);
  stab->add_option("--lambda0", lambda0);
  stab->add_option("--dt", dt);
  stab->add_option("--steps", steps);
  stab->add_option("--stride", stride, "record every STRIDE-th step");
  stab->add_option("--out", stab_out, "output file (default stdout)");
  stab->add_option("--config", stab_config, "JSON file with default option values");

  RunOptions sweep_opts;
  sweep_opts.max_outer = 10000;
  double c_max = 10.0;
  double c_step = 0.5;
  std::size_t sweep_seeds = 20;
  std::uint64_t sweep_base_seed = 0;
  std::size_t sweep_workers = 0;
  auto* sweep = app.add_subcommand("sweep-c", "max iterations over seeds as a function of c");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--c-max", c_max, "largest damping value");
  sweep->add_option("--c-step", c_step, "spacing of the c grid")->check(CLI::PositiveNumber);
  sweep->add_option("--seeds", sweep_seeds, "initial configurations per c")->check(CLI::PositiveNumber);
  sweep->add_option("--base-seed", sweep_base_seed, "seed of the first configuration");
  sweep->add_option("--workers", sweep_workers, "worker threads (0 = all cores)");
  sweep->add_option("--config", sweep_opts.config, "JSON file with default option values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) {
      apply_config(solve, solve_opts.config);
      return run_solve(solve_opts, trace_path, dump_at, dump_prefix);
    }
    if (*bench) {
      apply_config(bench, bench_opts.config);
      return run_bench(bench_opts, bench_seeds, bench_base_seed, bench_report, bench_workers);
    }
    if (*stab) {
      apply_config(stab, stab_config);
      const OdeSystem id = parse_ode_system(system);
      if (integrate) {
        try {
          const Trajectory tr = integrate_two_sphere(id, ode, x0, lambda0, dt, steps, stride);
          write_text(stab_out, trajectory_csv(tr));
        } catch (const DivergenceError& e) {
          std::cerr << "error: " << e.what() << '\n';
          return kExitDiverged;
        }
        return kExitConverged;
      }
      const StabilityReport rep = analyze(id, ode);
      json j;
      j["system"] = to_string(id);
      j["params"] = {{"alpha", ode.alpha}, {"beta", ode.beta}, {"c", ode.c}, {"diameter", ode.d}};
      json rows = json::array();
      for (Eigen::Index r = 0; r < rep.jacobian.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < rep.jacobian.cols(); ++c) row.push_back(rep.jacobian(r, c));
        rows.push_back(row);
      }
      j["jacobian"] = rows;
      j["char_coeffs"] = rep.char_coeffs;
      if (rep.jacobian.rows() == 2) {
        j["trace"] = rep.jacobian.trace();
        j["det"] = rep.jacobian.determinant();
      }
      json ev = json::array();
      for (const auto& z : rep.eigenvalues) ev.push_back(complex_json(z));
      j["eigenvalues"] = ev;
      j["classification"] = to_string(rep.classification);
      j["sufficient_condition_holds"] =
          rep.sufficient_condition_holds ? json(*rep.sufficient_condition_holds) : json(nullptr);
      write_text(stab_out, j.dump(2) + "\n");
      return kExitConverged;
    }
    if (*sweep) {
      apply_config(sweep, sweep_opts.config);
      ExperimentConfig cfg;
      cfg.problem = sweep_opts.problem();
      cfg.method = Method::Daha;
      cfg.params = sweep_opts.params();
      cfg.seed_count = sweep_seeds;
      cfg.base_seed = sweep_base_seed;
      cfg.workers = sweep_workers;
      std::vector<double> cs;
      for (int i = 0;; ++i) {
        const double c = i * c_step;
        if (c > c_max + 1e-12) break;
        cs.push_back(c);
      }
      std::ostringstream csv;
      csv << "c,max_iterations,converged,seeds\n";
      for (const auto& pt : sweep_damping(cfg, cs)) {
        csv << pt.c << ',' << pt.max_iterations << ',' << pt.converged << ',' << pt.seeds << '\n';
      }
      write_text(sweep_opts.out, csv.str());
      return kExitConverged;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
