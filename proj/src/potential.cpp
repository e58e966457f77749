#include "sphpack/potential.hpp"

namespace sphpack {

std::vector<double> centroid(const Configuration& x) {
  std::vector<double> m(x.dim(), 0.0);
  for (std::size_t i = 0; i < x.count(); ++i) {
    const auto p = x.point(i);
    for (std::size_t a = 0; a < x.dim(); ++a) m[a] += p[a];
  }
  const double inv = x.count() > 0 ? 1.0 / static_cast<double>(x.count()) : 0.0;
  for (double& v : m) v *= inv;
  return m;
}

double potential_value(const Configuration& x) {
  const auto m = centroid(x);
  double s = 0.0;
  for (std::size_t i = 0; i < x.count(); ++i) {
    const auto p = x.point(i);
    for (std::size_t a = 0; a < x.dim(); ++a) {
      const double t = p[a] - m[a];
      s += t * t;
    }
  }
  return 0.5 * s;
}

void potential_gradient_into(const Configuration& x, Configuration& out) {
  if (!out.same_shape(x)) out = Configuration(x.count(), x.dim());
  const auto m = centroid(x);
  for (std::size_t i = 0; i < x.count(); ++i) {
    const auto p = x.point(i);
    auto g = out.point(i);
    for (std::size_t a = 0; a < x.dim(); ++a) g[a] = p[a] - m[a];
  }
}

Configuration potential_gradient(const Configuration& x) {
  Configuration g(x.count(), x.dim());
  potential_gradient_into(x, g);
  return g;
}

}  // namespace sphpack
