#pragma once

// Shared oracles for the unit tests: seeded random instances and central
// finite differences.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sphpack/core.hpp"
#include "sphpack/solvers.hpp"

namespace sphpack::testing {

inline Configuration random_configuration(std::mt19937_64& gen, std::size_t n, std::size_t dim,
                                          double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> c(n * dim);
  for (double& v : c) v = normal(gen);
  return Configuration(n, dim, std::move(c));
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

/// Central difference of f with respect to every coordinate of x.
inline std::vector<double> central_difference(const std::function<double(const Configuration&)>& f,
                                              const Configuration& x, double h) {
  std::vector<double> grad(x.size());
  Configuration probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe.coords()[i];
    probe.coords()[i] = saved + h;
    const double up = f(probe);
    probe.coords()[i] = saved - h;
    const double down = f(probe);
    probe.coords()[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace sphpack::testing

namespace sphpack::testing {

/// Monte Carlo estimate of the lens shared by two disks of diameter d whose
/// centers are delta apart. Samples one quadrant of the lens bounding box,
/// which the lens fills symmetrically, and tests membership in both disks.
inline double monte_carlo_lens(double delta, double d, std::size_t samples, std::uint64_t seed) {
  const double r = 0.5 * d;
  if (delta >= d) return 0.0;
  const double half_width = 0.5 * (d - delta);
  const double half_height = delta > 0.0 ? std::sqrt(r * r - 0.25 * delta * delta) : r;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(0.0, half_width);
  std::uniform_real_distribution<double> uy(0.0, half_height);
  // Centers at (-delta/2, 0) and (delta/2, 0); the quadrant x >= 0, y >= 0 is
  // bounded by the disk centered at -delta/2, which is the binding one there.
  const double r2 = r * r;
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double x = ux(gen);
    const double y = uy(gen);
    const double a = x + 0.5 * delta;
    const double b = x - 0.5 * delta;
    if (a * a + y * y <= r2 && b * b + y * y <= r2) ++hits;
  }
  return 4.0 * half_width * half_height * static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace sphpack::testing

namespace sphpack::testing {

/// A KKT point of the full problem: an equilateral cluster of 1, 2 or 3
/// touching spheres with a random orientation and offset, plus the
/// multipliers that balance the attraction exactly.
inline SolverState random_steady_state(std::mt19937_64& gen, ConstraintForm form, double d,
                                       std::size_t dim) {
  const std::size_t n = 1 + gen() % 3;
  // Orthonormal pair (u, w) in R^dim.
  std::vector<double> u(dim), w(dim, 0.0);
  std::normal_distribution<double> normal;
  double un = 0.0;
  for (double& v : u) {
    v = normal(gen);
    un += v * v;
  }
  for (double& v : u) v /= std::sqrt(un);
  if (dim >= 2) {
    for (double& v : w) v = normal(gen);
    double dot = 0.0;
    for (std::size_t a = 0; a < dim; ++a) dot += u[a] * w[a];
    double wn = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      w[a] -= dot * u[a];
      wn += w[a] * w[a];
    }
    for (double& v : w) v /= std::sqrt(wn);
  }
  if (n == 3 && dim < 2) return random_steady_state(gen, form, d, dim);

  std::vector<double> offset(dim);
  for (double& v : offset) v = uniform(gen, -5.0, 5.0);
  Configuration x(n, dim);
  std::vector<double> lambdas;
  if (n == 1) {
    for (std::size_t a = 0; a < dim; ++a) x(0, a) = offset[a];
  } else if (n == 2) {
    for (std::size_t a = 0; a < dim; ++a) {
      x(0, a) = offset[a] - 0.5 * d * u[a];
      x(1, a) = offset[a] + 0.5 * d * u[a];
    }
    lambdas = {form == ConstraintForm::NonSmooth ? 0.5 * d : 0.25};
  } else {
    const double r = d / std::sqrt(3.0);
    for (std::size_t i = 0; i < 3; ++i) {
      const double t = 2.0 * M_PI * static_cast<double>(i) / 3.0;
      for (std::size_t a = 0; a < dim; ++a) {
        x(i, a) = offset[a] + r * (std::cos(t) * u[a] + std::sin(t) * w[a]);
      }
    }
    const double l = form == ConstraintForm::NonSmooth ? d / 3.0 : 1.0 / 6.0;
    lambdas = {l, l, l};
  }
  SolverState s = SolverState::initial(x);
  s.lambdas = MultiplierSet(lambdas);
  return s;
}

}  // namespace sphpack::testing
