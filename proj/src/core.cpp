#include "sphpack/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sphpack {

PackingProblem::PackingProblem(std::size_t n, std::size_t b, double d)
    : count(n), dim(b), diameter(d) {
  validate();
}

void PackingProblem::validate() const {
  if (count < 1) throw std::invalid_argument("packing problem needs at least one sphere");
  if (dim < 1) throw std::invalid_argument("packing problem needs dimension >= 1");
  if (!(diameter > 0.0) || !std::isfinite(diameter)) {
    throw std::invalid_argument("sphere diameter must be positive and finite");
  }
}

Configuration::Configuration(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), coords_(count * dim, 0.0) {}

Configuration::Configuration(std::size_t count, std::size_t dim, std::vector<double> coords)
    : count_(count), dim_(dim), coords_(std::move(coords)) {
  if (coords_.size() != count_ * dim_) {
    throw std::invalid_argument("configuration needs count*dim coordinates, got " +
                                std::to_string(coords_.size()));
  }
}

bool Configuration::all_finite() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
}

bool MultiplierSet::non_negative() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

bool MultiplierSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::size_t pair_index(std::size_t k, std::size_t l, std::size_t count) {
  if (k >= l || l >= count) {
    throw std::out_of_range("invalid pair (" + std::to_string(k) + ", " + std::to_string(l) +
                            ") for " + std::to_string(count) + " spheres");
  }
  return k * count - k * (k + 1) / 2 + (l - k - 1);
}

PairIndex pair_from_index(std::size_t linear, std::size_t count) {
  if (count < 2 || linear >= count * (count - 1) / 2) {
    throw std::out_of_range("pair index " + std::to_string(linear) + " out of range");
  }
  // Row k holds count-1-k pairs.
  std::size_t k = 0;
  std::size_t start = 0;
  while (start + (count - 1 - k) <= linear) {
    start += count - 1 - k;
    ++k;
  }
  return {k, k + 1 + (linear - start), linear};
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double relative_error(const Configuration& x_new, const Configuration& x_old) {
  if (!x_new.same_shape(x_old)) {
    throw std::invalid_argument("relative_error: configurations differ in shape");
  }
  const double denom = norm(x_old.coords());
  if (denom < kNormFloor) {
    throw DegenerateNormError("relative_error: reference configuration has zero norm");
  }
  return distance(x_new.coords(), x_old.coords()) / denom;
}

double overlap_area_at_distance(double delta, double d) {
  const double r = 0.5 * d;
  if (delta >= d) return 0.0;
  if (delta <= 0.0) return std::numbers::pi * r * r;
  const double ratio = std::clamp(delta / (2.0 * r), -1.0, 1.0);
  const double chord = std::sqrt(std::max(0.0, 4.0 * r * r - delta * delta));
  return 2.0 * r * r * std::acos(ratio) - 0.5 * delta * chord;
}

double overlap_area(std::span<const double> a, std::span<const double> b, double d) {
  if (a.size() != 2 || b.size() != 2) {
    throw std::invalid_argument("overlap_area is defined for planar points only");
  }
  return overlap_area_at_distance(distance(a, b), d);
}

}  // namespace sphpack
