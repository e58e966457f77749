#include "sphpack/constraints.hpp"

#include <numbers>
#include <string>

namespace sphpack {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) {
  // 53 random mantissa bits, strictly inside (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

void check_pair(const Configuration& x, std::size_t k, std::size_t l) {
  if (k >= l || l >= x.count()) {
    throw std::out_of_range("invalid constraint pair (" + std::to_string(k) + ", " +
                            std::to_string(l) + ")");
  }
}

PairGradient make_gradient(const Configuration& x, std::size_t k, std::size_t l,
                           std::vector<double> gk) {
  std::vector<double> gl(gk.size());
  for (std::size_t a = 0; a < gk.size(); ++a) gl[a] = -gk[a];
  return {PairIndex{k, l, pair_index(k, l, x.count())}, std::move(gk), std::move(gl)};
}

}  // namespace

std::string_view to_string(ConstraintForm form) {
  return form == ConstraintForm::Smooth ? "s" : "ns";
}

ConstraintForm parse_constraint_form(std::string_view text) {
  if (text == "ns" || text == "NS") return ConstraintForm::NonSmooth;
  if (text == "s" || text == "S") return ConstraintForm::Smooth;
  throw std::invalid_argument("unknown constraint form '" + std::string(text) + "'");
}

std::vector<double> fallback_direction(std::uint64_t seed, std::size_t k, std::size_t l,
                                       std::size_t dim) {
  std::uint64_t state = seed ^ (0x5851f42d4c957f2dULL * (k + 1)) ^
                        (0x14057b7ef767814fULL * (l + 1));
  std::vector<double> u(dim, 0.0);
  if (dim == 1) {
    u[0] = (splitmix64(state) & 1U) ? 1.0 : -1.0;
    return u;
  }
  double n = 0.0;
  while (n < 1e-8) {
    for (std::size_t a = 0; a < dim; ++a) {
      const double r = std::sqrt(-2.0 * std::log(unit_interval(splitmix64(state))));
      u[a] = r * std::cos(2.0 * std::numbers::pi * unit_interval(splitmix64(state)));
    }
    n = norm(u);
  }
  for (double& v : u) v /= n;
  return u;
}

namespace detail {

double pair_value_and_gradient(ConstraintForm form, const double* pk, const double* pl,
                               std::size_t dim, double d, std::uint64_t fallback_seed,
                               std::size_t k, std::size_t l, double* grad) {
  const double r2 = squared_separation(pk, pl, dim);
  if (form == ConstraintForm::Smooth) {
    for (std::size_t a = 0; a < dim; ++a) grad[a] = -2.0 * (pk[a] - pl[a]);
    return d * d - r2;
  }
  const double r = std::sqrt(r2);
  if (r <= kCoincidenceThreshold) {
    const auto u = fallback_direction(fallback_seed, k, l, dim);
    for (std::size_t a = 0; a < dim; ++a) grad[a] = -u[a];
  } else {
    const double inv = 1.0 / r;
    for (std::size_t a = 0; a < dim; ++a) grad[a] = -(pk[a] - pl[a]) * inv;
  }
  return d - r;
}

}  // namespace detail

double constraint_value(ConstraintForm form, const Configuration& x, std::size_t k,
                        std::size_t l, double d) {
  check_pair(x, k, l);
  return detail::pair_value(form, x.point(k).data(), x.point(l).data(), x.dim(), d);
}

PairGradient constraint_gradient(ConstraintForm form, const Configuration& x, std::size_t k,
                                 std::size_t l, double d) {
  check_pair(x, k, l);
  if (form == ConstraintForm::NonSmooth &&
      distance(x.point(k), x.point(l)) <= kCoincidenceThreshold) {
    throw CoincidentPairError("non-smooth constraint gradient undefined for coincident pair (" +
                              std::to_string(k) + ", " + std::to_string(l) + ")");
  }
  return constraint_gradient(form, x, k, l, d, 0);
}

PairGradient constraint_gradient(ConstraintForm form, const Configuration& x, std::size_t k,
                                 std::size_t l, double d, std::uint64_t fallback_seed) {
  check_pair(x, k, l);
  std::vector<double> gk(x.dim());
  detail::pair_value_and_gradient(form, x.point(k).data(), x.point(l).data(), x.dim(), d,
                                  fallback_seed, k, l, gk.data());
  return make_gradient(x, k, l, std::move(gk));
}

LinearizedConstraint linearized_constraint(ConstraintForm form, const Configuration& x_ref,
                                           const Configuration& x, std::size_t k,
                                           std::size_t l, double d) {
  if (form == ConstraintForm::NonSmooth &&
      distance(x_ref.point(k), x_ref.point(l)) <= kCoincidenceThreshold) {
    throw CoincidentPairError("cannot linearize non-smooth constraint about coincident pair");
  }
  return linearized_constraint(form, x_ref, x, k, l, d, 0);
}

LinearizedConstraint linearized_constraint(ConstraintForm form, const Configuration& x_ref,
                                           const Configuration& x, std::size_t k,
                                           std::size_t l, double d,
                                           std::uint64_t fallback_seed) {
  if (!x.same_shape(x_ref)) {
    throw std::invalid_argument("linearized_constraint: configurations differ in shape");
  }
  auto grad = constraint_gradient(form, x_ref, k, l, d, fallback_seed);
  double value = constraint_value(form, x_ref, k, l, d);
  for (std::size_t a = 0; a < x.dim(); ++a) {
    value += grad.g_k[a] * (x(k, a) - x_ref(k, a)) + grad.g_l[a] * (x(l, a) - x_ref(l, a));
  }
  return {value, std::move(grad)};
}

Linearization::Linearization(ConstraintForm form, const Configuration& x_ref, double d,
                             std::uint64_t fallback_seed)
    : count_(x_ref.count()), dim_(x_ref.dim()) {
  const std::size_t pairs = count_ * (count_ - 1) / 2;
  offsets_.resize(pairs);
  reference_.resize(pairs);
  grads_.resize(pairs * dim_);
  std::size_t p = 0;
  for (std::size_t k = 0; k < count_; ++k) {
    const double* pk = x_ref.point(k).data();
    for (std::size_t l = k + 1; l < count_; ++l, ++p) {
      const double* pl = x_ref.point(l).data();
      double* g = grads_.data() + p * dim_;
      const double phi =
          detail::pair_value_and_gradient(form, pk, pl, dim_, d, fallback_seed, k, l, g);
      double dot = 0.0;
      for (std::size_t a = 0; a < dim_; ++a) dot += g[a] * (pk[a] - pl[a]);
      reference_[p] = phi;
      offsets_[p] = phi - dot;
    }
  }
}

double Linearization::value(std::size_t linear, const Configuration& x) const {
  const auto pair = pair_from_index(linear, count_);
  return value(linear, x.point(pair.k).data(), x.point(pair.l).data());
}

}  // namespace sphpack
