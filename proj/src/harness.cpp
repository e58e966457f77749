#include "sphpack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sphpack/potential.hpp"

namespace sphpack {

namespace {

using nlohmann::json;

double uniform_open(std::mt19937_64& gen) {
  // Top 53 bits -> [0, 1).
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
  std::size_t w = requested;
  if (w == 0) w = std::max(1U, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(w, jobs));
}

/// Runs job(i) for i in [0, jobs) on up to `workers` threads.
template <class Job>
void parallel_for(std::size_t jobs, std::size_t workers, Job job) {
  workers = resolve_workers(workers, jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) job(i);
    });
  }
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Status parse_status(std::string_view s) {
  if (s == "converged") return Status::Converged;
  if (s == "budget_exhausted") return Status::BudgetExhausted;
  if (s == "diverged") return Status::Diverged;
  throw std::invalid_argument("unknown status '" + std::string(s) + "'");
}

}  // namespace

Configuration sample_initial_configuration(std::uint64_t seed, const PackingProblem& problem) {
  problem.validate();
  std::mt19937_64 gen(seed);
  std::vector<double> coords(problem.count * problem.dim);
  std::size_t i = 0;
  while (i < coords.size()) {
    const double u = 2.0 * uniform_open(gen) - 1.0;
    const double v = 2.0 * uniform_open(gen) - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    coords[i++] = u * f;
    if (i < coords.size()) coords[i++] = v * f;
  }
  return Configuration(problem.count, problem.dim, std::move(coords));
}

double overlap_proportion(const Configuration& x, double d) {
  if (x.dim() != 2) throw std::invalid_argument("overlap_proportion needs planar configurations");
  double total = 0.0;
  for (std::size_t k = 0; k < x.count(); ++k) {
    for (std::size_t l = k + 1; l < x.count(); ++l) {
      total += overlap_area(x.point(k), x.point(l), d);
    }
  }
  const double n = static_cast<double>(x.count());
  const double area_total = n * std::numbers::pi * 0.25 * d * d;
  return total / (n * area_total);
}

SeedRecord make_seed_record(std::uint64_t seed, const SolverTrace& trace,
                            const PackingProblem& problem) {
  SeedRecord r;
  r.seed = seed;
  r.status = trace.status;
  r.iterations = trace.total_iterations;
  r.outer_iterations = trace.outer_iterations;
  r.kkt = trace.kkt;
  r.rel_errors = trace.rel_errors;
  r.spread = trace.spread;
  if (trace.final.x.all_finite()) {
    r.final_w = potential_value(trace.final.x);
    if (problem.dim == 2) r.final_overlap = overlap_proportion(trace.final.x, problem.diameter);
  } else {
    r.final_w = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

ExperimentReport compute_indicators(std::vector<SeedRecord> records,
                                    const PackingProblem& problem) {
  ExperimentReport rep;
  rep.count = problem.count;
  rep.dim = problem.dim;
  rep.diameter = problem.diameter;

  std::vector<const SeedRecord*> ok;
  for (const auto& r : records) {
    switch (r.status) {
      case Status::Converged: ++rep.converged; ok.push_back(&r); break;
      case Status::BudgetExhausted: ++rep.budget_exhausted; break;
      case Status::Diverged: ++rep.diverged; break;
    }
  }
  if (!ok.empty()) {
    const double p = static_cast<double>(ok.size());
    double t_sum = 0.0;
    double outer_sum = 0.0;
    for (const auto* r : ok) {
      t_sum += static_cast<double>(r->iterations);
      outer_sum += static_cast<double>(r->outer_iterations);
    }
    rep.mean_time = t_sum / p;
    rep.mean_outer_time = outer_sum / p;
    if (ok.size() > 1) {
      double ss = 0.0;
      for (const auto* r : ok) {
        const double dt = static_cast<double>(r->iterations) - *rep.mean_time;
        ss += dt * dt;
      }
      rep.time_variance = ss / (p - 1.0);
    }
    if (problem.dim == 2) {
      double a = 0.0;
      for (const auto* r : ok) a += r->final_overlap.value_or(0.0);
      rep.overlap = a / p;
    }
    SummaryStats w{0.0, ok.front()->final_w, ok.front()->final_w};
    for (const auto* r : ok) {
      w.mean += r->final_w;
      w.min = std::min(w.min, r->final_w);
      w.max = std::max(w.max, r->final_w);
    }
    w.mean /= p;
    rep.final_w = w;
  }
  rep.records = std::move(records);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.seed_count < 1) throw std::invalid_argument("experiment needs at least one seed");
  config.problem.validate();
  config.params.validate(config.method);

  std::vector<SeedRecord> records(config.seed_count);
  parallel_for(config.seed_count, config.workers, [&](std::size_t i) {
    const std::uint64_t seed = config.base_seed + i;
    SolverParams params = config.params;
    params.fallback_seed = seed;
    try {
      const Configuration x0 = sample_initial_configuration(seed, config.problem);
      const SolverTrace trace = run_solver(config.method, x0, params, config.problem);
      records[i] = make_seed_record(seed, trace, config.problem);
    } catch (const std::exception& e) {
      SeedRecord r;
      r.seed = seed;
      r.status = Status::Diverged;
      r.final_w = std::numeric_limits<double>::quiet_NaN();
      r.error = e.what();
      records[i] = std::move(r);
    }
  });

  ExperimentReport rep = compute_indicators(std::move(records), config.problem);
  rep.method = std::string(to_string(config.method));
  rep.form = std::string(to_string(config.params.form));
  return rep;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv") return ReportFormat::Csv;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::ostringstream out;
    out.precision(17);
    out << "seed,iter,rel_error\n";
    for (const auto& r : report.records) {
      for (std::size_t i = 0; i < r.rel_errors.size(); ++i) {
        out << r.seed << ',' << (i + 1) << ',' << r.rel_errors[i] << '\n';
      }
    }
    return out.str();
  }

  json j;
  j["sampler"] = kSamplerName;
  j["method"] = report.method;
  j["form"] = report.form;
  j["n"] = report.count;
  j["dim"] = report.dim;
  j["diameter"] = report.diameter;
  j["seeds"] = report.records.size();
  j["converged"] = report.converged;
  j["budget_exhausted"] = report.budget_exhausted;
  j["diverged"] = report.diverged;
  j["T"] = optional_number(report.mean_time);
  j["T_outer"] = optional_number(report.mean_outer_time);
  j["sigma2"] = optional_number(report.time_variance);
  j["A"] = optional_number(report.overlap);
  if (report.final_w) {
    j["W_final"] = {{"mean", report.final_w->mean},
                    {"min", report.final_w->min},
                    {"max", report.final_w->max}};
  } else {
    j["W_final"] = nullptr;
  }
  json runs = json::array();
  for (const auto& r : report.records) {
    json row;
    row["seed"] = r.seed;
    row["status"] = to_string(r.status);
    row["iterations"] = r.iterations;
    row["outer_iterations"] = r.outer_iterations;
    row["W"] = std::isfinite(r.final_w) ? json(r.final_w) : json(nullptr);
    row["A"] = optional_number(r.final_overlap);
    row["kkt"] = {{"stationarity", r.kkt.stationarity},
                  {"complementarity", r.kkt.complementarity},
                  {"feasibility", r.kkt.feasibility}};
    if (!r.error.empty()) row["error"] = r.error;
    runs.push_back(std::move(row));
  }
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file '" + path.string() + "'");
  out << emit_report(report, format);
  if (!out) throw std::runtime_error("failed writing report file '" + path.string() + "'");
}

ExperimentReport parse_report_json(std::string_view text) {
  const json j = json::parse(text);
  ExperimentReport rep;
  rep.method = j.at("method").get<std::string>();
  rep.form = j.at("form").get<std::string>();
  rep.count = j.at("n").get<std::size_t>();
  rep.dim = j.at("dim").get<std::size_t>();
  rep.diameter = j.at("diameter").get<double>();
  rep.converged = j.at("converged").get<std::size_t>();
  rep.budget_exhausted = j.at("budget_exhausted").get<std::size_t>();
  rep.diverged = j.at("diverged").get<std::size_t>();
  rep.mean_time = read_optional(j, "T");
  rep.mean_outer_time = read_optional(j, "T_outer");
  rep.time_variance = read_optional(j, "sigma2");
  rep.overlap = read_optional(j, "A");
  if (!j.at("W_final").is_null()) {
    const auto& w = j.at("W_final");
    rep.final_w = SummaryStats{w.at("mean").get<double>(), w.at("min").get<double>(),
                               w.at("max").get<double>()};
  }
  for (const auto& row : j.at("runs")) {
    SeedRecord r;
    r.seed = row.at("seed").get<std::uint64_t>();
    r.status = parse_status(row.at("status").get<std::string>());
    r.iterations = row.at("iterations").get<std::size_t>();
    r.outer_iterations = row.at("outer_iterations").get<std::size_t>();
    r.final_w = row.at("W").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                      : row.at("W").get<double>();
    r.final_overlap = read_optional(row, "A");
    const auto& k = row.at("kkt");
    r.kkt = {k.at("stationarity").get<double>(), k.at("complementarity").get<double>(),
             k.at("feasibility").get<double>()};
    if (row.contains("error")) r.error = row.at("error").get<std::string>();
    rep.records.push_back(std::move(r));
  }
  return rep;
}

std::vector<DampingSweepPoint> sweep_damping(const ExperimentConfig& base,
                                             const std::vector<double>& c_values) {
  std::vector<DampingSweepPoint> points;
  points.reserve(c_values.size());
  for (double c : c_values) {
    ExperimentConfig cfg = base;
    cfg.method = Method::Daha;
    cfg.params.c = c;
    const ExperimentReport rep = run_experiment(cfg);
    DampingSweepPoint pt;
    pt.c = c;
    pt.seeds = rep.records.size();
    pt.converged = rep.converged;
    for (const auto& r : rep.records) {
      const std::size_t t =
          r.status == Status::Converged ? r.iterations : cfg.params.max_outer;
      pt.max_iterations = std::max(pt.max_iterations, t);
    }
    points.push_back(pt);
  }
  return points;
}

}  // namespace sphpack
