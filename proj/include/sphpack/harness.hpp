#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphpack/core.hpp"
#include "sphpack/solvers.hpp"

namespace sphpack {

/// Identifies the initial-configuration generator. Bump the version whenever
/// the sampling algorithm changes, since it changes every benchmark number.
inline constexpr std::string_view kSamplerName = "mt19937_64+marsaglia-polar/v1";

/// N*b independent standard normal coordinates. Uses std::mt19937_64 (whose
/// output sequence is fixed by the standard) and a hand-written polar method,
/// so a seed reproduces the same configuration on any conforming platform.
Configuration sample_initial_configuration(std::uint64_t seed, const PackingProblem& problem);

/// sum_{i<j} A_ij / (N * A_total) with A_total = N pi (d/2)^2. Planar only.
double overlap_proportion(const Configuration& x, double d);

struct SeedRecord {
  std::uint64_t seed = 0;
  Status status = Status::BudgetExhausted;
  /// T_l: comparable-cost iterations (inner steps for nested methods).
  std::size_t iterations = 0;
  std::size_t outer_iterations = 0;
  double final_w = 0.0;
  /// Per-seed overlap proportion; absent when dim != 2.
  std::optional<double> final_overlap;
  KktResidual kkt;
  std::vector<double> rel_errors;
  std::vector<double> spread;
  /// Set when the solver threw instead of returning a trace.
  std::string error;

  friend bool operator==(const SeedRecord&, const SeedRecord&) = default;
};

struct SummaryStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct ExperimentReport {
  std::string method;
  std::string form;
  std::size_t count = 0;
  std::size_t dim = 0;
  double diameter = 1.0;
  std::size_t converged = 0;
  std::size_t budget_exhausted = 0;
  std::size_t diverged = 0;
  /// Mean convergence time over converged seeds.
  std::optional<double> mean_time;
  /// Same, counting outer iterations only.
  std::optional<double> mean_outer_time;
  /// Unbiased variance of the convergence time; absent for fewer than 2 converged seeds.
  std::optional<double> time_variance;
  /// Mean proportion of overlapping area per sphere over converged seeds.
  std::optional<double> overlap;
  std::optional<SummaryStats> final_w;
  std::vector<SeedRecord> records;

  /// True when there were runs and none converged.
  bool all_failed() const { return !records.empty() && converged == 0; }

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

struct ExperimentConfig {
  PackingProblem problem;
  Method method = Method::Daha;
  SolverParams params;
  std::size_t seed_count = 20;
  std::uint64_t base_seed = 0;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

SeedRecord make_seed_record(std::uint64_t seed, const SolverTrace& trace,
                            const PackingProblem& problem);

/// Aggregates per-seed records. Indicators use converged seeds only.
ExperimentReport compute_indicators(std::vector<SeedRecord> records,
                                    const PackingProblem& problem);

/// Seed l uses base_seed + l for sampling and for the coincidence fallback.
/// A seed whose solver throws is recorded as diverged; the batch continues.
ExperimentReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view text);

/// JSON: summary plus per-seed records. CSV: seed,iter,rel_error rows.
std::string emit_report(const ExperimentReport& report, ReportFormat format);

/// Writes emit_report output; std::runtime_error names the path on failure.
void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::filesystem::path& path);

/// Reads back the JSON form (rel_error curves are not part of it).
ExperimentReport parse_report_json(std::string_view text);

struct DampingSweepPoint {
  double c = 0.0;
  /// Largest iteration count over seeds; non-converged seeds count as max_outer.
  std::size_t max_iterations = 0;
  std::size_t converged = 0;
  std::size_t seeds = 0;
};

/// DAHA iteration counts as a function of the damping c.
std::vector<DampingSweepPoint> sweep_damping(const ExperimentConfig& base,
                                             const std::vector<double>& c_values);

}  // namespace sphpack
