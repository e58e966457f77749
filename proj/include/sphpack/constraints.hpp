#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sphpack/core.hpp"

namespace sphpack {

/// Non-overlap constraint phi_kl <= 0.
///   NonSmooth: phi = d   - |X_k - X_l|
///   Smooth:    phi = d^2 - |X_k - X_l|^2
enum class ConstraintForm { NonSmooth, Smooth };

std::string_view to_string(ConstraintForm form);
ConstraintForm parse_constraint_form(std::string_view text);

/// The non-smooth gradient is undefined for coincident centers.
class CoincidentPairError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kCoincidenceThreshold = 1e-12;

/// The two nonzero blocks of grad_X phi_kl. Always g_l == -g_k.
struct PairGradient {
  PairIndex pair;
  std::vector<double> g_k;
  std::vector<double> g_l;
};

struct LinearizedConstraint {
  double value = 0.0;
  PairGradient gradient;
};

double constraint_value(ConstraintForm form, const Configuration& x, std::size_t k,
                        std::size_t l, double d);

/// Throws CoincidentPairError for the non-smooth form when
/// |X_k - X_l| <= kCoincidenceThreshold.
PairGradient constraint_gradient(ConstraintForm form, const Configuration& x, std::size_t k,
                                 std::size_t l, double d);

/// Same, but coincident non-smooth pairs use fallback_direction(seed, k, l).
PairGradient constraint_gradient(ConstraintForm form, const Configuration& x, std::size_t k,
                                 std::size_t l, double d, std::uint64_t fallback_seed);

/// First-order expansion of phi_kl about x_ref, evaluated at x.
LinearizedConstraint linearized_constraint(ConstraintForm form, const Configuration& x_ref,
                                           const Configuration& x, std::size_t k,
                                           std::size_t l, double d);
LinearizedConstraint linearized_constraint(ConstraintForm form, const Configuration& x_ref,
                                           const Configuration& x, std::size_t k,
                                           std::size_t l, double d,
                                           std::uint64_t fallback_seed);

/// Deterministic unit vector in R^dim keyed by (seed, k, l).
std::vector<double> fallback_direction(std::uint64_t seed, std::size_t k, std::size_t l,
                                       std::size_t dim);

namespace detail {

inline double squared_separation(const double* pk, const double* pl, std::size_t dim) {
  double s = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double t = pk[a] - pl[a];
    s += t * t;
  }
  return s;
}

inline double pair_value(ConstraintForm form, const double* pk, const double* pl,
                         std::size_t dim, double d) {
  const double r2 = squared_separation(pk, pl, dim);
  return form == ConstraintForm::Smooth ? d * d - r2 : d - std::sqrt(r2);
}

/// Evaluates phi and writes g_k (the gradient block of sphere k) into grad.
double pair_value_and_gradient(ConstraintForm form, const double* pk, const double* pl,
                               std::size_t dim, double d, std::uint64_t fallback_seed,
                               std::size_t k, std::size_t l, double* grad);

}  // namespace detail

/// All pair constraints linearized about a fixed reference configuration:
/// phi^p_kl(X) = phi_kl(X^p) + g_kl . ((X_k - X_l) - (X^p_k - X^p_l)).
class Linearization {
 public:
  Linearization(ConstraintForm form, const Configuration& x_ref, double d,
                std::uint64_t fallback_seed);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::size_t pair_count() const { return offsets_.size(); }

  /// phi^p at x for the pair with the given linear index.
  double value(std::size_t linear, const double* pk, const double* pl) const {
    const double* g = grads_.data() + linear * dim_;
    double s = offsets_[linear];
    for (std::size_t a = 0; a < dim_; ++a) s += g[a] * (pk[a] - pl[a]);
    return s;
  }
  double value(std::size_t linear, const Configuration& x) const;

  /// Gradient block g_k of the pair (constant in X); g_l = -g_k.
  std::span<const double> gradient_k(std::size_t linear) const {
    return {grads_.data() + linear * dim_, dim_};
  }

  /// phi(X^p) for the pair.
  double reference_value(std::size_t linear) const { return reference_[linear]; }

 private:
  std::size_t count_;
  std::size_t dim_;
  std::vector<double> offsets_;
  std::vector<double> reference_;
  std::vector<double> grads_;
};

}  // namespace sphpack
