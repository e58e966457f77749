#include "sphpack/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "sphpack/potential.hpp"

namespace sphpack {

namespace {

constexpr std::size_t kMaxInlineDim = 8;

double spread_of(const Configuration& x) {
  const auto m = centroid(x);
  double best = 0.0;
  for (std::size_t i = 0; i < x.count(); ++i) {
    best = std::max(best, distance(x.point(i), m));
  }
  return best;
}

/// out += sum over pairs with lambda > 0 of weight(lambda, phi) * grad phi(x).
template <class Weight>
void add_constraint_forces(const Configuration& x, std::span<const double> lambdas,
                           ConstraintForm form, double d, std::uint64_t seed, Weight weight,
                           Configuration& out) {
  const std::size_t n = x.count();
  const std::size_t dim = x.dim();
  std::array<double, kMaxInlineDim> inline_grad{};
  std::vector<double> heap_grad(dim > kMaxInlineDim ? dim : 0);
  double* g = dim > kMaxInlineDim ? heap_grad.data() : inline_grad.data();

  std::size_t p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double* pk = x.point(k).data();
    double* fk = out.point(k).data();
    for (std::size_t l = k + 1; l < n; ++l, ++p) {
      const double lambda = lambdas[p];
      if (lambda <= 0.0) continue;
      const double* pl = x.point(l).data();
      const double phi = detail::pair_value_and_gradient(form, pk, pl, dim, d, seed, k, l, g);
      const double w = weight(lambda, phi);
      double* fl = out.point(l).data();
      for (std::size_t a = 0; a < dim; ++a) {
        fk[a] += w * g[a];
        fl[a] -= w * g[a];
      }
    }
  }
}

/// lambda <- max(0, lambda + beta phi(x)) for every pair. Returns false if a
/// multiplier became non-finite.
bool project_multipliers(const Configuration& x, MultiplierSet& lambdas, ConstraintForm form,
                         double beta, double d) {
  const std::size_t n = x.count();
  const std::size_t dim = x.dim();
  double* lam = lambdas.values().data();
  std::size_t p = 0;
  if (form == ConstraintForm::Smooth) {
    const double d2 = d * d;
    for (std::size_t k = 0; k < n; ++k) {
      const double* pk = x.point(k).data();
      for (std::size_t l = k + 1; l < n; ++l, ++p) {
        const double phi = d2 - detail::squared_separation(pk, x.point(l).data(), dim);
        const double next = lam[p] + beta * phi;
        lam[p] = next > 0.0 ? next : 0.0;
      }
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double* pk = x.point(k).data();
      for (std::size_t l = k + 1; l < n; ++l, ++p) {
        const double phi = d - std::sqrt(detail::squared_separation(pk, x.point(l).data(), dim));
        const double next = lam[p] + beta * phi;
        lam[p] = next > 0.0 ? next : 0.0;
      }
    }
  }
  // NaN fails the comparison above and is silently clamped to 0, so check
  // the positions that produced it.
  return x.all_finite() && lambdas.all_finite();
}

bool aha_step_inplace(SolverState& s, const SolverParams& prm, const PackingProblem& pb,
                      Configuration& work) {
  potential_gradient_into(s.x, work);
  add_constraint_forces(
      s.x, s.lambdas.values(), prm.form, pb.diameter, prm.fallback_seed,
      [](double lambda, double) { return lambda; }, work);

  if (!s.x_prev.same_shape(s.x)) s.x_prev = Configuration(s.x.count(), s.x.dim());
  auto next = s.x_prev.coords();
  const auto cur = s.x.coords();
  const auto f = work.coords();
  for (std::size_t i = 0; i < cur.size(); ++i) next[i] = cur[i] - prm.alpha * f[i];
  std::swap(s.x, s.x_prev);
  ++s.iter;
  return project_multipliers(s.x, s.lambdas, prm.form, prm.beta, pb.diameter);
}

bool daha_step_inplace(SolverState& s, const SolverParams& prm, const PackingProblem& pb,
                       Configuration& work) {
  const double a2 = prm.alpha * prm.alpha;
  const double g2 = prm.gamma_squared();
  potential_gradient_into(s.x, work);
  for (double& v : work.coords()) v *= a2;
  // alpha^2 lambda grad(phi) + gamma^2 phi lambda grad(phi)
  add_constraint_forces(
      s.x, s.lambdas.values(), prm.form, pb.diameter, prm.fallback_seed,
      [a2, g2](double lambda, double phi) { return lambda * (a2 + g2 * phi); }, work);

  if (!s.x_prev.same_shape(s.x)) s.x_prev = s.x;
  const double inv = 1.0 / (1.0 + 0.5 * prm.c);
  const double history = 1.0 - 0.5 * prm.c;
  auto next = s.x_prev.coords();  // overwritten element-wise in place
  const auto cur = s.x.coords();
  const auto f = work.coords();
  if (history == 0.0) {
    for (std::size_t i = 0; i < cur.size(); ++i) next[i] = inv * (2.0 * cur[i]) - inv * f[i];
  } else {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[i] = inv * (2.0 * cur[i] - history * next[i]) - inv * f[i];
    }
  }
  std::swap(s.x, s.x_prev);
  ++s.iter;
  return project_multipliers(s.x, s.lambdas, prm.form, prm.beta, pb.diameter);
}

void check_inputs(Method method, const Configuration& x0, const SolverParams& params,
                  const PackingProblem& problem) {
  problem.validate();
  params.validate(method);
  if (x0.count() != problem.count || x0.dim() != problem.dim) {
    throw std::invalid_argument("initial configuration does not match the packing problem");
  }
}

void record(SolverTrace& trace, double rel, std::size_t inner, const Configuration& x) {
  trace.rel_errors.push_back(rel);
  trace.inner_counts.push_back(inner);
  trace.spread.push_back(spread_of(x));
  trace.total_iterations += inner;
  ++trace.outer_iterations;
}

SolverTrace run_arrow_hurwicz(Method method, const Configuration& x0, const SolverParams& prm,
                              const PackingProblem& pb, const IterationObserver& observer) {
  SolverTrace trace;
  SolverState state = SolverState::initial(x0);
  Configuration work(x0.count(), x0.dim());
  for (std::size_t n = 0; n < prm.max_outer; ++n) {
    const bool finite = method == Method::Aha ? aha_step_inplace(state, prm, pb, work)
                                              : daha_step_inplace(state, prm, pb, work);
    if (!finite) {
      trace.status = Status::Diverged;
      break;
    }
    // After the step x_prev holds X^n.
    const double rel = relative_error(state.x, state.x_prev);
    record(trace, rel, 1, state.x);
    if (observer) observer(trace.outer_iterations, state);
    if (rel < prm.epsilon) {
      trace.status = Status::Converged;
      break;
    }
  }
  trace.final = std::move(state);
  return trace;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Aha: return "aha";
    case Method::Daha: return "daha";
    case Method::Nap: return "nap";
    case Method::Nav: return "nav";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "aha") return Method::Aha;
  if (text == "daha") return Method::Daha;
  if (text == "nap") return Method::Nap;
  if (text == "nav") return Method::Nav;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::Converged: return "converged";
    case Status::BudgetExhausted: return "budget_exhausted";
    case Status::Diverged: return "diverged";
  }
  return "?";
}

void SolverParams::validate(Method method) const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha) || !positive(beta)) {
    throw std::invalid_argument("alpha and beta must be positive");
  }
  if (!positive(epsilon) || !positive(epsilon_inner)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (method == Method::Daha) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("damping c must be >= 0");
    if (gamma && !(*gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  }
  if ((method == Method::Nap || method == Method::Nav) && inner_cap < 1) {
    throw std::invalid_argument("inner_cap must be at least 1");
  }
  if (method == Method::Nav) {
    if (!positive(tau)) throw std::invalid_argument("tau must be positive");
    if (form != ConstraintForm::NonSmooth) {
      throw std::invalid_argument("NAV supports the non-smooth constraint form only");
    }
  }
}

SolverState SolverState::initial(const Configuration& x0) {
  SolverState s;
  s.x = x0;
  s.x_prev = x0;
  s.v = Configuration(x0.count(), x0.dim());
  s.lambdas = MultiplierSet(x0.count() * (x0.count() - 1) / 2);
  return s;
}

SolverState aha_step(const SolverState& state, const SolverParams& params,
                     const PackingProblem& problem) {
  SolverState next = state;
  Configuration work(state.x.count(), state.x.dim());
  if (!aha_step_inplace(next, params, problem, work)) {
    throw DivergenceError("aha_step produced a non-finite state at iteration " +
                          std::to_string(next.iter));
  }
  return next;
}

SolverState daha_step(const SolverState& state, const SolverParams& params,
                      const PackingProblem& problem) {
  SolverState next = state;
  Configuration work(state.x.count(), state.x.dim());
  if (!daha_step_inplace(next, params, problem, work)) {
    throw DivergenceError("daha_step produced a non-finite state at iteration " +
                          std::to_string(next.iter));
  }
  return next;
}

void nap_inner_step(const Linearization& lin, Configuration& x, MultiplierSet& lambdas,
                    const SolverParams& params) {
  Configuration force = potential_gradient(x);
  const std::size_t n = x.count();
  const std::size_t dim = x.dim();
  std::size_t p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l, ++p) {
      const double lambda = lambdas[p];
      if (lambda <= 0.0) continue;
      const auto g = lin.gradient_k(p);
      auto fk = force.point(k);
      auto fl = force.point(l);
      for (std::size_t a = 0; a < dim; ++a) {
        fk[a] += lambda * g[a];
        fl[a] -= lambda * g[a];
      }
    }
  }
  auto xs = x.coords();
  const auto fs = force.coords();
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] -= params.alpha * fs[i];

  p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l, ++p) {
      const double next = lambdas[p] + params.beta * lin.value(p, x.point(k).data(),
                                                                x.point(l).data());
      lambdas[p] = next > 0.0 ? next : 0.0;
    }
  }
}

void nav_inner_step(const Linearization& lin, const Configuration& x_ref,
                    const Configuration& grad_w, Configuration& v, MultiplierSet& mus,
                    const SolverParams& params) {
  const std::size_t n = v.count();
  const std::size_t dim = v.dim();
  Configuration force = v;
  {
    auto fs = force.coords();
    const auto gw = grad_w.coords();
    for (std::size_t i = 0; i < fs.size(); ++i) fs[i] += gw[i];
  }
  std::size_t p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l, ++p) {
      const double mu = mus[p];
      if (mu <= 0.0) continue;
      const double w = params.tau * mu;
      const auto g = lin.gradient_k(p);
      auto fk = force.point(k);
      auto fl = force.point(l);
      for (std::size_t a = 0; a < dim; ++a) {
        fk[a] += w * g[a];
        fl[a] -= w * g[a];
      }
    }
  }
  auto vs = v.coords();
  const auto fs = force.coords();
  for (std::size_t i = 0; i < vs.size(); ++i) vs[i] -= params.alpha * fs[i];

  // Multipliers see the Euler-updated positions X^p + tau V^{n+1}.
  Configuration euler = x_ref;
  {
    auto es = euler.coords();
    for (std::size_t i = 0; i < es.size(); ++i) es[i] += params.tau * vs[i];
  }
  p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l, ++p) {
      const double next =
          mus[p] + params.beta * lin.value(p, euler.point(k).data(), euler.point(l).data());
      mus[p] = next > 0.0 ? next : 0.0;
    }
  }
}

bool position_test(const Configuration& x_new, const Configuration& x_old, double eps_inner) {
  return relative_error(x_new, x_old) < eps_inner;
}

bool velocity_test(const Configuration& v_new, const Configuration& v_old,
                   const Configuration& x_ref, double tau, double eps_inner) {
  double num = 0.0;
  double den = 0.0;
  const auto a = v_new.coords();
  const auto b = v_old.coords();
  const auto x = x_ref.coords();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dv = a[i] - b[i];
    const double xi = x[i] + tau * b[i];
    num += dv * dv;
    den += xi * xi;
  }
  den = std::sqrt(den);
  if (den < kNormFloor) throw DegenerateNormError("velocity_test: zero reference position");
  return std::sqrt(num) / den < eps_inner / tau;
}

SolverTrace nap_solve(const Configuration& x0, const MultiplierSet& lambdas0,
                      const SolverParams& params, const PackingProblem& problem,
                      const IterationObserver& observer) {
  check_inputs(Method::Nap, x0, params, problem);
  SolverTrace trace;
  SolverState state = SolverState::initial(x0);
  state.lambdas = lambdas0;
  Configuration x_old;

  for (std::size_t outer = 0; outer < params.max_outer; ++outer) {
    const Linearization lin(params.form, state.x, problem.diameter, params.fallback_seed);
    Configuration x = state.x;
    std::size_t inner = 0;
    bool finite = true;
    while (inner < params.inner_cap) {
      x_old = x;
      nap_inner_step(lin, x, state.lambdas, params);
      ++inner;
      if (!x.all_finite() || !state.lambdas.all_finite()) {
        finite = false;
        break;
      }
      if (position_test(x, x_old, params.epsilon_inner)) break;
    }
    if (!finite) {
      trace.total_iterations += inner;
      state.x_prev = state.x;
      state.x = std::move(x);
      trace.status = Status::Diverged;
      break;
    }
    const double rel = relative_error(x, state.x);
    state.x_prev = std::move(state.x);
    state.x = std::move(x);
    state.iter += inner;
    record(trace, rel, inner, state.x);
    if (observer) observer(trace.outer_iterations, state);
    if (rel < params.epsilon) {
      trace.status = Status::Converged;
      break;
    }
  }
  trace.final = std::move(state);
  trace.kkt = kkt_residual(trace.final, params, problem);
  return trace;
}

SolverTrace nav_solve(const Configuration& x0, const Configuration& v0,
                      const MultiplierSet& mus0, const SolverParams& params,
                      const PackingProblem& problem, const IterationObserver& observer) {
  check_inputs(Method::Nav, x0, params, problem);
  if (!v0.same_shape(x0)) throw std::invalid_argument("nav_solve: velocity shape mismatch");
  SolverTrace trace;
  SolverState state = SolverState::initial(x0);
  state.v = v0;
  state.lambdas = mus0;
  Configuration v_old;
  Configuration grad_w;

  for (std::size_t outer = 0; outer < params.max_outer; ++outer) {
    const Linearization lin(params.form, state.x, problem.diameter, params.fallback_seed);
    potential_gradient_into(state.x, grad_w);
    std::size_t inner = 0;
    bool finite = true;
    while (inner < params.inner_cap) {
      v_old = state.v;
      nav_inner_step(lin, state.x, grad_w, state.v, state.lambdas, params);
      ++inner;
      if (!state.v.all_finite() || !state.lambdas.all_finite()) {
        finite = false;
        break;
      }
      if (velocity_test(state.v, v_old, state.x, params.tau, params.epsilon_inner)) break;
    }
    Configuration x = state.x;
    {
      auto xs = x.coords();
      const auto vs = state.v.coords();
      for (std::size_t i = 0; i < xs.size(); ++i) xs[i] += params.tau * vs[i];
    }
    if (!finite || !x.all_finite()) {
      trace.total_iterations += inner;
      state.x_prev = state.x;
      state.x = std::move(x);
      trace.status = Status::Diverged;
      break;
    }
    const double rel = relative_error(x, state.x);
    state.x_prev = std::move(state.x);
    state.x = std::move(x);
    state.iter += inner;
    record(trace, rel, inner, state.x);
    if (observer) observer(trace.outer_iterations, state);
    if (rel < params.epsilon) {
      trace.status = Status::Converged;
      break;
    }
  }
  trace.final = std::move(state);
  // Fixed points of the velocity scheme satisfy the position KKT system
  // with lambda = tau * mu.
  SolverState scaled = trace.final;
  for (double& m : scaled.lambdas.values()) m *= params.tau;
  trace.kkt = kkt_residual(scaled, params, problem);
  return trace;
}

SolverTrace run_solver(Method method, const Configuration& x0, const SolverParams& params,
                       const PackingProblem& problem, const IterationObserver& observer) {
  check_inputs(method, x0, params, problem);
  const MultiplierSet zero(problem.pair_count());
  switch (method) {
    case Method::Nap:
      return nap_solve(x0, zero, params, problem, observer);
    case Method::Nav:
      return nav_solve(x0, Configuration(x0.count(), x0.dim()), zero, params, problem,
                       observer);
    case Method::Aha:
    case Method::Daha: {
      SolverTrace trace = run_arrow_hurwicz(method, x0, params, problem, observer);
      trace.kkt = kkt_residual(trace.final, params, problem);
      return trace;
    }
  }
  throw std::invalid_argument("unknown method");
}

KktResidual kkt_residual(const SolverState& state, const SolverParams& params,
                         const PackingProblem& problem) {
  const Configuration& x = state.x;
  KktResidual r;
  Configuration grad = potential_gradient(x);
  add_constraint_forces(
      x, state.lambdas.values(), params.form, problem.diameter, params.fallback_seed,
      [](double lambda, double) { return lambda; }, grad);
  r.stationarity = norm(grad.coords());

  std::size_t p = 0;
  for (std::size_t k = 0; k < x.count(); ++k) {
    for (std::size_t l = k + 1; l < x.count(); ++l, ++p) {
      const double phi =
          detail::pair_value(params.form, x.point(k).data(), x.point(l).data(), x.dim(),
                             problem.diameter);
      r.complementarity = std::max(r.complementarity, std::abs(state.lambdas[p] * phi));
      r.feasibility = std::max(r.feasibility, phi);
    }
  }
  return r;
}

}  // namespace sphpack
