#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphpack {

/// Raised when a relative error is requested against a configuration whose
/// norm is below kNormFloor.
class DegenerateNormError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kNormFloor = 1e-300;

/// N identical spheres of diameter d in R^b.
struct PackingProblem {
  std::size_t count = 1;
  std::size_t dim = 2;
  double diameter = 1.0;

  PackingProblem() = default;
  PackingProblem(std::size_t n, std::size_t b, double d);

  std::size_t pair_count() const { return count * (count - 1) / 2; }
  void validate() const;
};

/// Sphere centers, stored sphere-major: point i occupies
/// coords[i*dim, (i+1)*dim).  The same shape holds velocities and gradients.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t count, std::size_t dim);
  Configuration(std::size_t count, std::size_t dim, std::vector<double> coords);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size(); }

  std::span<double> point(std::size_t i) {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double& operator()(std::size_t i, std::size_t a) { return coords_[i * dim_ + a]; }
  double operator()(std::size_t i, std::size_t a) const { return coords_[i * dim_ + a]; }

  std::span<double> coords() { return coords_; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& values() const { return coords_; }

  bool same_shape(const Configuration& other) const {
    return count_ == other.count_ && dim_ == other.dim_;
  }
  bool all_finite() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// One non-negative multiplier per unordered pair, in pair_index order.
class MultiplierSet {
 public:
  MultiplierSet() = default;
  explicit MultiplierSet(std::size_t pairs, double value = 0.0) : values_(pairs, value) {}
  explicit MultiplierSet(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool non_negative() const;
  bool all_finite() const;

  friend bool operator==(const MultiplierSet&, const MultiplierSet&) = default;

 private:
  std::vector<double> values_;
};

struct PairIndex {
  std::size_t k = 0;
  std::size_t l = 1;
  std::size_t linear = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

/// Lexicographic position of the pair (k, l), k < l < count.
/// Throws std::out_of_range on invalid indices.
std::size_t pair_index(std::size_t k, std::size_t l, std::size_t count);

/// Inverse of pair_index.
PairIndex pair_from_index(std::size_t linear, std::size_t count);

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);

/// ||x_new - x_old|| / ||x_old|| on the flattened coordinates.
/// Throws DegenerateNormError when ||x_old|| < kNormFloor and
/// std::invalid_argument on shape mismatch.
double relative_error(const Configuration& x_new, const Configuration& x_old);

/// Lens area of two disks of diameter d centered at a and b (b = 2 only).
double overlap_area(std::span<const double> a, std::span<const double> b, double d);

/// Lens area as a function of center distance alone.
double overlap_area_at_distance(double delta, double d);

}  // namespace sphpack
