#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sphpack/constraints.hpp"
#include "sphpack/core.hpp"

namespace sphpack {

/// AHA: Arrow-Hurwicz. DAHA: damped (two-step) Arrow-Hurwicz.
/// NAP / NAV: nested linearly constrained Lagrangian methods over positions
/// and over velocities.
enum class Method { Aha, Daha, Nap, Nav };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

enum class Status { Converged, BudgetExhausted, Diverged };

std::string_view to_string(Status status);

struct SolverParams {
  double alpha = 0.1;
  double beta = 0.1;
  /// Velocity damping (DAHA). c = 2 removes the dependence on X^{n-1}.
  double c = 2.0;
  /// Weight of the phi*lambda*grad(phi) term in DAHA. Unset means
  /// gamma^2 = alpha*beta, the undamped-derivation value.
  std::optional<double> gamma;
  /// Euler step of NAV.
  double tau = 0.1;
  ConstraintForm form = ConstraintForm::NonSmooth;
  double epsilon = 1e-6;
  double epsilon_inner = 1e-9;
  std::size_t inner_cap = 10;
  std::size_t max_outer = 1'000'000;
  /// Keys the direction used for coincident non-smooth pairs.
  std::uint64_t fallback_seed = 0;

  double gamma_squared() const { return gamma ? *gamma * *gamma : alpha * beta; }

  /// Throws std::invalid_argument when a parameter is out of range for `method`.
  void validate(Method method) const;
};

struct SolverState {
  Configuration x;
  /// Previous iterate for DAHA; equal to x before the first step.
  Configuration x_prev;
  /// Velocities (NAV only).
  Configuration v;
  /// lambda for AHA/DAHA/NAP, mu for NAV.
  MultiplierSet lambdas;
  std::size_t iter = 0;

  /// Zero multipliers, zero velocities, x_prev = x0.
  static SolverState initial(const Configuration& x0);
};

/// A step produced a non-finite coordinate or multiplier.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KktResidual {
  double stationarity = 0.0;
  double complementarity = 0.0;
  double feasibility = 0.0;

  friend bool operator==(const KktResidual&, const KktResidual&) = default;
};

struct SolverTrace {
  /// Outer relative error ||X^{p+1} - X^p|| / ||X^p||, one per outer iteration.
  std::vector<double> rel_errors;
  /// Inner steps per outer iteration (nested methods; 1 for AHA/DAHA).
  std::vector<std::size_t> inner_counts;
  /// max_i |X_i - centroid| after each outer iteration.
  std::vector<double> spread;
  /// Comparable-cost iterations: inner steps for NAP/NAV, steps for AHA/DAHA.
  std::size_t total_iterations = 0;
  std::size_t outer_iterations = 0;
  Status status = Status::BudgetExhausted;
  SolverState final;
  KktResidual kkt;
};

/// Called after each outer iteration with the 1-based iteration count.
using IterationObserver = std::function<void(std::size_t, const SolverState&)>;

/// Semi-implicit Arrow-Hurwicz step:
///   X^{n+1} = X^n - alpha [grad W(X^n) + sum lambda^n grad phi(X^n)]
///   lambda^{n+1} = max(0, lambda^n + beta phi(X^{n+1}))
/// Throws DivergenceError on non-finite output.
SolverState aha_step(const SolverState& state, const SolverParams& params,
                     const PackingProblem& problem);

/// Damped Arrow-Hurwicz step with cross-term weight gamma. The multiplier
/// update matches aha_step and uses the new positions.
SolverState daha_step(const SolverState& state, const SolverParams& params,
                      const PackingProblem& problem);

/// Nested algorithm over positions. Each outer iteration freezes the
/// linearization at X^p and runs projected Arrow-Hurwicz inner steps until
/// ||dX|| / ||X|| < epsilon_inner or inner_cap steps.
SolverTrace nap_solve(const Configuration& x0, const MultiplierSet& lambdas0,
                      const SolverParams& params, const PackingProblem& problem,
                      const IterationObserver& observer = {});

/// Nested algorithm over velocities with Euler update X^{p+1} = X^p + tau V^{p+1}.
/// Non-smooth constraints only.
SolverTrace nav_solve(const Configuration& x0, const Configuration& v0,
                      const MultiplierSet& mus0, const SolverParams& params,
                      const PackingProblem& problem, const IterationObserver& observer = {});

/// Uniform driver: zero multipliers and velocities, x_prev = x0, stops when
/// the outer relative error drops below epsilon or after max_outer outer
/// iterations. The trace carries the KKT residual of the final state.
SolverTrace run_solver(Method method, const Configuration& x0, const SolverParams& params,
                       const PackingProblem& problem, const IterationObserver& observer = {});

/// Residuals of the KKT system at (state.x, state.lambdas).
KktResidual kkt_residual(const SolverState& state, const SolverParams& params,
                         const PackingProblem& problem);

/// One NAP inner step against a frozen linearization, in place.
void nap_inner_step(const Linearization& lin, Configuration& x, MultiplierSet& lambdas,
                    const SolverParams& params);

/// One NAV inner step, in place. grad_w is grad W(X^p).
void nav_inner_step(const Linearization& lin, const Configuration& x_ref,
                    const Configuration& grad_w, Configuration& v, MultiplierSet& mus,
                    const SolverParams& params);

/// Inner position test: ||x_new - x_old|| / ||x_old|| < eps_inner.
bool position_test(const Configuration& x_new, const Configuration& x_old, double eps_inner);

/// Inner velocity test: ||v_new - v_old|| / ||x_ref + tau v_old|| < eps_inner / tau.
bool velocity_test(const Configuration& v_new, const Configuration& v_old,
                   const Configuration& x_ref, double tau, double eps_inner);

}  // namespace sphpack
