#include "sphpack/stability.hpp"

#include <cmath>
#include <sstream>

namespace sphpack {

std::string_view to_string(OdeSystem id) {
  switch (id) {
    case OdeSystem::AhaNs: return "aha-ns";
    case OdeSystem::AhaS: return "aha-s";
    case OdeSystem::DahaNs: return "daha-ns";
    case OdeSystem::DahaS: return "daha-s";
  }
  return "?";
}

OdeSystem parse_ode_system(std::string_view text) {
  if (text == "aha-ns") return OdeSystem::AhaNs;
  if (text == "aha-s") return OdeSystem::AhaS;
  if (text == "daha-ns") return OdeSystem::DahaNs;
  if (text == "daha-s") return OdeSystem::DahaS;
  throw std::invalid_argument("unknown system '" + std::string(text) + "'");
}

bool is_damped(OdeSystem id) { return id == OdeSystem::DahaNs || id == OdeSystem::DahaS; }

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::AsymptoticallyStable: return "asymptotically_stable";
    case Classification::Unstable: return "unstable";
    case Classification::Center: return "center";
    case Classification::Inconclusive: return "inconclusive";
  }
  return "?";
}

Eigen::MatrixXd jacobian_1d(OdeSystem id, const OdeParams& p) {
  const double a = p.alpha;
  const double b = p.beta;
  const double d = p.d;
  Eigen::MatrixXd m;
  switch (id) {
    case OdeSystem::AhaNs:
      m.resize(2, 2);
      m << -a, a,
           -b, 0.0;
      break;
    case OdeSystem::AhaS:
      m.resize(2, 2);
      m << 0.0, 2.0 * d * a,
           -2.0 * d * b, 0.0;
      break;
    case OdeSystem::DahaNs:
      m.resize(3, 3);
      m << 0.0, 1.0, 0.0,
           -a * a - a * b * d, -p.c, a * a,
           -b, 0.0, 0.0;
      break;
    case OdeSystem::DahaS:
      m.resize(3, 3);
      m << 0.0, 1.0, 0.0,
           -2.0 * a * b * d * d, -p.c, 2.0 * d * a * a,
           -2.0 * d * b, 0.0, 0.0;
      break;
  }
  return m;
}

std::pair<double, double> equilibrium_1d(OdeSystem id, double d) {
  const bool smooth = id == OdeSystem::AhaS || id == OdeSystem::DahaS;
  return {d, smooth ? 0.5 : d};
}

std::vector<double> closed_form_char_coeffs(OdeSystem id, const OdeParams& p) {
  const double a = p.alpha;
  const double b = p.beta;
  const double d = p.d;
  switch (id) {
    case OdeSystem::AhaNs: return {a, a * b};
    case OdeSystem::AhaS: return {0.0, 4.0 * d * d * a * b};
    case OdeSystem::DahaNs: return {p.c, a * a + a * b * d, b * a * a};
    case OdeSystem::DahaS: return {p.c, 2.0 * a * b * d * d, 4.0 * d * d * b * a * a};
  }
  return {};
}

std::vector<double> char_coeffs(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_coeffs needs a square matrix");
  if (m.rows() == 2) return {-m.trace(), m.determinant()};
  if (m.rows() == 3) {
    double minors = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) minors += m(i, i) * m(j, j) - m(i, j) * m(j, i);
    }
    return {-m.trace(), minors, -m.determinant()};
  }
  throw std::invalid_argument("char_coeffs supports 2x2 and 3x3 matrices");
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solve failed");
  const auto ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::complex<double> eval_monic(const std::vector<double>& coeffs, std::complex<double> z) {
  std::complex<double> acc = 1.0;
  for (double c : coeffs) acc = acc * z + c;
  return acc;
}

Classification classify_equilibrium(const Eigen::MatrixXd& m, double tol) {
  const auto ev = eigenvalues(m);
  bool all_negative = true;
  bool all_on_axis = true;
  bool any_positive = false;
  bool any_rotation = false;
  for (const auto& z : ev) {
    if (!(z.real() < -tol)) all_negative = false;
    if (std::abs(z.real()) > tol) all_on_axis = false;
    if (z.real() > tol) any_positive = true;
    if (std::abs(z.imag()) > tol) any_rotation = true;
  }
  if (all_negative) return Classification::AsymptoticallyStable;
  if (any_positive) return Classification::Unstable;
  if (all_on_axis && any_rotation) return Classification::Center;
  return Classification::Inconclusive;
}

double spectral_abscissa(const Eigen::MatrixXd& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(m)) best = std::max(best, z.real());
  return best;
}

bool sufficient_condition(OdeSystem id, const OdeParams& p) {
  switch (id) {
    case OdeSystem::DahaNs: return (p.alpha + p.beta * p.d) * p.c - p.beta * p.alpha > 0.0;
    case OdeSystem::DahaS: return p.c - 2.0 * p.alpha > 0.0;
    default:
      throw std::invalid_argument("no sufficient stability condition for undamped systems");
  }
}

StabilityReport analyze(OdeSystem id, const OdeParams& p, double tol) {
  StabilityReport r;
  r.system = id;
  r.jacobian = jacobian_1d(id, p);
  r.char_coeffs = char_coeffs(r.jacobian);
  r.eigenvalues = eigenvalues(r.jacobian);
  r.classification = classify_equilibrium(r.jacobian, tol);
  if (is_damped(id)) r.sufficient_condition_holds = sufficient_condition(id, p);
  return r;
}

namespace {

double constraint_1d(OdeSystem id, double x, double d) {
  const bool smooth = id == OdeSystem::AhaS || id == OdeSystem::DahaS;
  return smooth ? d * d - x * x : d - std::abs(x);
}

double next_multiplier(double lambda, double phi, double beta, double dt) {
  if (lambda == 0.0 && phi < 0.0) return 0.0;
  const double next = lambda + dt * beta * phi;
  return next > 0.0 ? next : 0.0;
}

// Force term of the first-order systems / acceleration without damping of
// the second-order ones.
double drive(OdeSystem id, const OdeParams& p, double x, double lambda) {
  const double a = p.alpha;
  const double b = p.beta;
  const double d = p.d;
  switch (id) {
    case OdeSystem::AhaNs: return -a * (1.0 - lambda / std::abs(x)) * x;
    case OdeSystem::AhaS: return -a * (1.0 - 2.0 * lambda) * x;
    case OdeSystem::DahaNs: {
      const double ax = std::abs(x);
      return -a * a * (1.0 - lambda / ax) * x + a * b * lambda * (d - ax) * x / ax;
    }
    case OdeSystem::DahaS:
      return -a * a * (1.0 - 2.0 * lambda) * x + 2.0 * a * b * lambda * (d * d - x * x) * x;
  }
  return 0.0;
}

}  // namespace

Trajectory integrate_two_sphere(OdeSystem id, const OdeParams& p, double x0, double lambda0,
                                double dt, std::size_t steps, std::size_t stride) {
  if (x0 == 0.0) throw std::invalid_argument("integrate_two_sphere: x0 must be nonzero");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_two_sphere: dt must be positive");
  if (stride == 0) stride = 1;
  const bool damped = is_damped(id);
  Trajectory tr;
  const std::size_t reserve = steps / stride + 2;
  tr.t.reserve(reserve);
  tr.x.reserve(reserve);
  tr.lambda.reserve(reserve);
  if (damped) tr.xdot.reserve(reserve);

  double x = x0;
  double z = 0.0;
  double lambda = lambda0;
  auto push = [&](std::size_t n) {
    tr.t.push_back(static_cast<double>(n) * dt);
    tr.x.push_back(x);
    if (damped) tr.xdot.push_back(z);
    tr.lambda.push_back(lambda);
  };
  push(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    if (damped) {
      z += dt * (drive(id, p, x, lambda) - p.c * z);
      x += dt * z;
    } else {
      x += dt * drive(id, p, x, lambda);
    }
    lambda = next_multiplier(lambda, constraint_1d(id, x, p.d), p.beta, dt);
    if (!std::isfinite(x) || !std::isfinite(z) || !std::isfinite(lambda)) {
      throw DivergenceError("two-sphere integration diverged at step " + std::to_string(n));
    }
    if (n % stride == 0 || n == steps) push(n);
  }
  return tr;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream out;
  out.precision(17);
  const bool damped = !tr.xdot.empty();
  out << (damped ? "t,X,Xdot,lambda\n" : "t,X,lambda\n");
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    out << tr.t[i] << ',' << tr.x[i] << ',';
    if (damped) out << tr.xdot[i] << ',';
    out << tr.lambda[i] << '\n';
  }
  return out.str();
}

std::vector<double> nap_outer_sequence_1d(double x0, double d, std::size_t steps) {
  if (x0 == 0.0) throw std::invalid_argument("nap_outer_sequence_1d: x0 must be nonzero");
  std::vector<double> seq{x0};
  seq.reserve(steps + 1);
  double x = x0;
  for (std::size_t i = 0; i < steps; ++i) {
    x = (d * d + x * x) / (2.0 * x);
    seq.push_back(x);
  }
  return seq;
}

std::vector<std::pair<double, double>> aha_ns_abscissa_sweep(double beta,
                                                             const std::vector<double>& ratios) {
  std::vector<std::pair<double, double>> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    out.emplace_back(r, spectral_abscissa(jacobian_1d(OdeSystem::AhaNs, {r * beta, beta, 0.0, 1.0})));
  }
  return out;
}

PackingProblem TwoSphereReduction::problem(double d) { return PackingProblem(2, 1, d); }

Configuration TwoSphereReduction::positions(double x) {
  return Configuration(2, 1, {-0.5 * x, 0.5 * x});
}

MultiplierSet TwoSphereReduction::multipliers(double reduced_lambda) {
  return MultiplierSet(std::vector<double>{0.5 * reduced_lambda});
}

SolverParams TwoSphereReduction::params(const SolverParams& reduced) {
  SolverParams full = reduced;
  full.beta = 0.5 * reduced.beta;
  if (!full.gamma) full.gamma = std::sqrt(reduced.alpha * reduced.beta);
  return full;
}

double TwoSphereReduction::separation(const Configuration& full) {
  return full(1, 0) - full(0, 0);
}

double TwoSphereReduction::multiplier(const MultiplierSet& full) { return 2.0 * full[0]; }

}  // namespace sphpack
