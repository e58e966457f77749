#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sphpack/solvers.hpp"

namespace sphpack {

/// The four one-dimensional two-sphere systems (one sphere pinned at the
/// origin, potential W = X^2 / 2):
///   AhaNs:  X' = -a(1 - l/|X|)X                       l' = b(d - |X|)
///   AhaS:   X' = -a(1 - 2l)X                          l' = b(d^2 - X^2)
///   DahaNs: X'' = -a^2(1 - l/|X|)X + ab l(d-|X|)X/|X| - cX'
///   DahaS:  X'' = -a^2(1 - 2l)X + 2ab l(d^2-X^2)X - cX'
/// with l' = 0 whenever l = 0 and the constraint is slack.
enum class OdeSystem { AhaNs, AhaS, DahaNs, DahaS };

std::string_view to_string(OdeSystem id);
OdeSystem parse_ode_system(std::string_view text);
bool is_damped(OdeSystem id);

struct OdeParams {
  double alpha = 1.0;
  double beta = 1.0;
  double c = 0.0;
  double d = 1.0;
};

enum class Classification { AsymptoticallyStable, Unstable, Center, Inconclusive };

std::string_view to_string(Classification c);

inline constexpr double kClassificationTolerance = 1e-9;

struct StabilityReport {
  OdeSystem system = OdeSystem::AhaNs;
  Eigen::MatrixXd jacobian;
  /// Monic characteristic polynomial lambda^n + c_{n-1} lambda^{n-1} + ... + c_0,
  /// stored as (c_{n-1}, ..., c_0), computed from the Jacobian.
  std::vector<double> char_coeffs;
  std::vector<std::complex<double>> eigenvalues;
  Classification classification = Classification::Inconclusive;
  /// Sufficient stability condition; absent for the undamped systems.
  std::optional<bool> sufficient_condition_holds;
};

/// Linearization about the equilibrium with X* = d > 0, in the shifted
/// variables (Y, mu) or (Y, Y', mu).
Eigen::MatrixXd jacobian_1d(OdeSystem id, const OdeParams& p);

/// Equilibrium (X*, lambda*) on the positive side.
std::pair<double, double> equilibrium_1d(OdeSystem id, double d);

/// Closed-form characteristic coefficients (c_{n-1}, ..., c_0):
///   AhaNs (a, ab); AhaS (0, 4d^2 ab); DahaNs (c, a^2 + abd, b a^2);
///   DahaS (c, 2abd^2, 4d^2 b a^2).
std::vector<double> closed_form_char_coeffs(OdeSystem id, const OdeParams& p);

/// Monic characteristic coefficients of a 2x2 or 3x3 matrix.
std::vector<double> char_coeffs(const Eigen::MatrixXd& m);

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// Horner evaluation of the monic polynomial with the given lower coefficients.
std::complex<double> eval_monic(const std::vector<double>& coeffs, std::complex<double> z);

/// Stable: every real part < -tol. Center: every |real part| <= tol and a
/// nonzero imaginary part. Unstable: some real part > tol. Otherwise inconclusive.
Classification classify_equilibrium(const Eigen::MatrixXd& m,
                                    double tol = kClassificationTolerance);

double spectral_abscissa(const Eigen::MatrixXd& m);

/// DahaNs: (a + b d) c - b a > 0. DahaS: c - 2a > 0.
/// Throws std::invalid_argument for the undamped systems.
bool sufficient_condition(OdeSystem id, const OdeParams& p);

StabilityReport analyze(OdeSystem id, const OdeParams& p, double tol = kClassificationTolerance);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> x;
  /// Empty for the first-order systems.
  std::vector<double> xdot;
  std::vector<double> lambda;
};

/// Semi-implicit Euler: velocity then position, then the multiplier law at
/// the new position. Records every `stride`-th state (the initial state is
/// always recorded). Throws DivergenceError on a non-finite state and
/// std::invalid_argument for x0 == 0 or dt <= 0.
Trajectory integrate_two_sphere(OdeSystem id, const OdeParams& p, double x0, double lambda0,
                                double dt, std::size_t steps, std::size_t stride = 1);

/// CSV with columns t,X,Xdot,lambda (Xdot omitted for first-order systems).
std::string trajectory_csv(const Trajectory& tr);

/// x_{p+1} = (d^2 + x_p^2) / (2 x_p); returns steps + 1 values starting at x0.
std::vector<double> nap_outer_sequence_1d(double x0, double d, std::size_t steps);

/// Spectral abscissa of the AhaNs Jacobian for alpha = ratio * beta.
std::vector<std::pair<double, double>> aha_ns_abscissa_sweep(double beta,
                                                             const std::vector<double>& ratios);

/// Maps the pinned-sphere 1D reduction onto the full two-sphere solver
/// (N = 2, b = 1). Positions are placed symmetrically, X = (-x/2, x/2), so
/// the separation equals the reduced coordinate and relative errors agree.
/// The reduced multiplier is twice the full one, hence beta_full = beta / 2;
/// gamma is pinned to sqrt(alpha * beta) of the reduced system.
struct TwoSphereReduction {
  static PackingProblem problem(double d);
  static Configuration positions(double x);
  static MultiplierSet multipliers(double reduced_lambda);
  static SolverParams params(const SolverParams& reduced);
  static double separation(const Configuration& full);
  static double multiplier(const MultiplierSet& full);
};

}  // namespace sphpack
