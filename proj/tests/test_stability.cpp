#include <doctest.h>

#include <cmath>
#include <random>

#include "sphpack/stability.hpp"
#include "test_support.hpp"

using namespace sphpack;

namespace {

OdeParams draw(std::mt19937_64& gen) {
  // Log-uniform over four decades keeps both small and large ratios in play.
  auto lu = [&](double lo, double hi) {
    return std::exp(testing::uniform(gen, std::log(lo), std::log(hi)));
  };
  return {lu(1e-2, 1e2), lu(1e-2, 1e2), lu(1e-2, 1e2), lu(1e-1, 1e1)};
}

}  // namespace

TEST_CASE("system names round-trip") {
  for (auto id : {OdeSystem::AhaNs, OdeSystem::AhaS, OdeSystem::DahaNs, OdeSystem::DahaS}) {
    CHECK(parse_ode_system(to_string(id)) == id);
  }
  CHECK_THROWS_AS(parse_ode_system("nap-ns"), std::invalid_argument);
}

TEST_CASE("Jacobian and characteristic polynomial examples") {
  const Eigen::MatrixXd j = jacobian_1d(OdeSystem::AhaNs, {1.0, 1.0, 0.0, 1.0});
  CHECK(j(0, 0) == -1.0);
  CHECK(j(0, 1) == 1.0);
  CHECK(j(1, 0) == -1.0);
  CHECK(j(1, 1) == 0.0);
  CHECK(char_coeffs(j) == std::vector<double>{1.0, 1.0});

  for (const auto& z : eigenvalues(jacobian_1d(OdeSystem::AhaS, {0.01, 0.01, 0.0, 2.0}))) {
    CHECK(std::abs(z.real()) < 1e-15);
    CHECK(std::abs(std::abs(z.imag()) - 0.04) < 1e-15);
  }

  const auto c = char_coeffs(jacobian_1d(OdeSystem::DahaS, {0.35, 1.4, 2.0, 1.0}));
  REQUIRE(c.size() == 3);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(0.98));
  CHECK(c[2] == doctest::Approx(0.686));

  CHECK(equilibrium_1d(OdeSystem::AhaNs, 2.0) == std::pair{2.0, 2.0});
  CHECK(equilibrium_1d(OdeSystem::DahaS, 2.0) == std::pair{2.0, 0.5});
}

TEST_CASE("classification examples") {
  CHECK(classify_equilibrium(jacobian_1d(OdeSystem::AhaNs, {0.7, 2.0, 0.0, 1.0})) ==
        Classification::AsymptoticallyStable);
  CHECK(classify_equilibrium(jacobian_1d(OdeSystem::AhaS, {0.7, 2.0, 0.0, 1.0})) ==
        Classification::Center);
  CHECK(classify_equilibrium(jacobian_1d(OdeSystem::DahaNs, {0.3, 3.0, 2.0, 1.0})) ==
        Classification::AsymptoticallyStable);
  Eigen::MatrixXd unstable(2, 2);
  unstable << 1.0, 0.0, 0.0, -1.0;
  CHECK(classify_equilibrium(unstable) == Classification::Unstable);
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK(classify_equilibrium(zero) == Classification::Inconclusive);
}

TEST_CASE("sufficient condition examples") {
  CHECK(sufficient_condition(OdeSystem::DahaNs, {0.3, 3.0, 2.0, 1.0}));
  CHECK((0.3 + 3.0) * 2.0 - 3.0 * 0.3 == doctest::Approx(5.7));
  CHECK_FALSE(sufficient_condition(OdeSystem::DahaS, {1.0, 1.0, 1.0, 1.0}));
  CHECK(sufficient_condition(OdeSystem::DahaS, {0.35, 1.4, 2.0, 1.0}));
  CHECK_THROWS_AS(sufficient_condition(OdeSystem::AhaNs, {}), std::invalid_argument);
  CHECK(analyze(OdeSystem::DahaS, {0.35, 1.4, 2.0, 1.0}).sufficient_condition_holds == true);
  CHECK_FALSE(analyze(OdeSystem::AhaS, {}).sufficient_condition_holds.has_value());
}

TEST_CASE("stability classes over random parameter draws") {
  std::mt19937_64 gen(71);
  int daha_ns_checked = 0;
  int daha_s_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const OdeParams p = draw(gen);
    CHECK(classify_equilibrium(jacobian_1d(OdeSystem::AhaNs, p)) ==
          Classification::AsymptoticallyStable);
    CHECK(classify_equilibrium(jacobian_1d(OdeSystem::AhaS, p)) == Classification::Center);
    if (sufficient_condition(OdeSystem::DahaNs, p)) {
      ++daha_ns_checked;
      CHECK(classify_equilibrium(jacobian_1d(OdeSystem::DahaNs, p)) ==
            Classification::AsymptoticallyStable);
    }
    if (sufficient_condition(OdeSystem::DahaS, p)) {
      ++daha_s_checked;
      CHECK(classify_equilibrium(jacobian_1d(OdeSystem::DahaS, p)) ==
            Classification::AsymptoticallyStable);
    }
  }
  CHECK(daha_ns_checked > 300);
  CHECK(daha_s_checked > 300);
}

TEST_CASE("eigenvalues are roots of the closed-form characteristic polynomials") {
  std::mt19937_64 gen(73);
  for (int trial = 0; trial < 1000; ++trial) {
    const OdeParams p = draw(gen);
    for (auto id : {OdeSystem::AhaNs, OdeSystem::AhaS, OdeSystem::DahaNs, OdeSystem::DahaS}) {
      const Eigen::MatrixXd j = jacobian_1d(id, p);
      const auto closed = closed_form_char_coeffs(id, p);
      const auto computed = char_coeffs(j);
      REQUIRE(closed.size() == computed.size());
      double scale = 1.0;
      for (std::size_t i = 0; i < closed.size(); ++i) {
        CHECK(computed[i] == doctest::Approx(closed[i]).epsilon(1e-12).scale(1.0));
        scale = std::max(scale, std::abs(closed[i]));
      }
      for (const auto& z : eigenvalues(j)) {
        // Relative to the size of the polynomial's terms at |z|.
        double mag = 1.0;
        double zn = 1.0;
        for (std::size_t i = 0; i < closed.size(); ++i) zn *= std::max(1.0, std::abs(z));
        mag = std::max(mag, zn * scale);
        CHECK(std::abs(eval_monic(closed, z)) / mag < 1e-9);
      }
    }
  }
}

TEST_CASE("real part of a complex root pair satisfies the corrected cubic") {
  // For lambda^3 + c2 lambda^2 + c1 lambda + c0 with roots a +- ib and r,
  // matching coefficients gives r = -c2 - 2a and
  // 8a^3 + 8 c2 a^2 + 2(c1 + c2^2) a + c1 c2 - c0 = 0.
  std::mt19937_64 gen(79);
  int complex_cases = 0;
  int literal_misses = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const OdeParams p = draw(gen);
    for (auto id : {OdeSystem::DahaNs, OdeSystem::DahaS}) {
      const auto cc = closed_form_char_coeffs(id, p);
      const double c2 = cc[0];
      const double c1 = cc[1];
      const double c0 = cc[2];
      for (const auto& z : eigenvalues(jacobian_1d(id, p))) {
        if (z.imag() <= 1e-6 * std::max(1.0, std::abs(z))) continue;
        ++complex_cases;
        const double a = z.real();
        const double scale = 1.0 + std::abs(8 * a * a * a) + std::abs(8 * c2 * a * a) +
                             std::abs(2 * (c1 + c2 * c2) * a) + std::abs(c1 * c2) + std::abs(c0);
        const double corrected = 8 * a * a * a + 8 * c2 * a * a + 2 * (c1 + c2 * c2) * a + c1 * c2 - c0;
        CHECK(std::abs(corrected) / scale < 1e-8);
        const double literal = 8 * a * a * a + 8 * c1 * a * a + 2 * (c1 + c2 * c2) * a + c1 * c2 - c0;
        if (std::abs(literal) / scale > 1e-6) ++literal_misses;
      }
    }
  }
  CHECK(complex_cases > 500);
  // With c1 in place of c2 in the quadratic term the identity fails in general.
  CHECK(literal_misses > complex_cases / 2);
}

TEST_CASE("alpha = 4 beta minimizes the AHA-NS spectral abscissa") {
  for (double beta : {0.05, 0.3, 1.0, 7.0}) {
    std::vector<double> ratios;
    for (int i = 1; i <= 1600; ++i) ratios.push_back(i * 0.005);
    const auto sweep = aha_ns_abscissa_sweep(beta, ratios);
    auto best = std::min_element(sweep.begin(), sweep.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    CHECK(best->first == doctest::Approx(4.0).epsilon(0.01));
  }
}

TEST_CASE("integration reaches the stable equilibria") {
  const Trajectory ns = integrate_two_sphere(OdeSystem::AhaNs, {1.0, 1.0, 0.0, 1.0}, 1.5, 0.0, 1e-3, 100000, 1000);
  CHECK(std::abs(ns.x.back() - 1.0) <= 1e-3);
  CHECK(std::abs(ns.lambda.back() - 1.0) <= 1e-3);
  CHECK(ns.t.back() == doctest::Approx(100.0));
  CHECK(ns.xdot.empty());

  const Trajectory ds = integrate_two_sphere(OdeSystem::DahaS, {0.35, 1.4, 2.0, 1.0}, 1.5, 0.0, 1e-3, 200000, 1000);
  CHECK(std::abs(ds.x.back() - 1.0) <= 1e-4);
  CHECK(ds.xdot.size() == ds.x.size());
}

TEST_CASE("smooth AHA trajectories orbit the center without approaching it") {
  const OdeParams p{0.01, 0.01, 0.0, 2.0};
  const double dt = 0.01;
  const Trajectory tr = integrate_two_sphere(OdeSystem::AhaS, p, 0.2, 0.0, dt, 1'000'000, 10);
  double closest = INFINITY;
  double largest = 0.0;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    largest = std::max(largest, std::abs(tr.x[i]) + std::abs(tr.lambda[i]));
    if (tr.t[i] < 10.0) continue;
    closest = std::min(closest, std::hypot(tr.x[i] - 2.0, tr.lambda[i] - 0.5));
  }
  CHECK(tr.t.back() == doctest::Approx(1e4));
  CHECK(closest > 1e-2);
  CHECK(largest < 100.0);
}

TEST_CASE("stable systems converge from a range of starts") {
  const double d = 1.5;
  struct Case {
    OdeSystem id;
    OdeParams p;
    double lambda_star;
  };
  for (const Case& c : {Case{OdeSystem::AhaNs, {1.0, 1.0, 0.0, d}, d},
                        Case{OdeSystem::DahaNs, {0.3, 3.0, 2.0, d}, d},
                        Case{OdeSystem::DahaS, {0.35, 0.6, 2.0, d}, 0.5}}) {
    for (double f : {0.25, 0.6, 1.2, 2.0, 2.9}) {
      const Trajectory tr = integrate_two_sphere(c.id, c.p, f * d, 0.0, 1e-3, 400000, 400000);
      CHECK(std::abs(tr.x.back() - d) <= 1e-3);
      CHECK(std::abs(tr.lambda.back() - c.lambda_star) <= 1e-3);
    }
  }
}

TEST_CASE("integration input checks") {
  CHECK_THROWS_AS(integrate_two_sphere(OdeSystem::AhaNs, {}, 0.0, 0.0, 1e-3, 10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_two_sphere(OdeSystem::AhaNs, {}, 1.0, 0.0, 0.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(integrate_two_sphere(OdeSystem::DahaS, {1e3, 1e3, 0.0, 1.0}, 5.0, 0.0, 1.0, 1000),
                  DivergenceError);
}

TEST_CASE("trajectory CSV layout") {
  const Trajectory tr = integrate_two_sphere(OdeSystem::DahaNs, {0.3, 3.0, 2.0, 1.0}, 1.2, 0.0, 0.1, 10, 5);
  const std::string csv = trajectory_csv(tr);
  CHECK(csv.rfind("t,X,Xdot,lambda\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("smooth nested outer sequence") {
  const auto s = nap_outer_sequence_1d(2.0, 1.0, 3);
  CHECK(s[0] == 2.0);
  CHECK(s[1] == 1.25);
  CHECK(s[2] == doctest::Approx(1.025).epsilon(1e-15));
  CHECK(s[3] == doctest::Approx(1.000304878).epsilon(1e-9));
  for (double v : nap_outer_sequence_1d(1.0, 1.0, 5)) CHECK(v == 1.0);
  const auto neg = nap_outer_sequence_1d(-0.5, 1.0, 60);
  CHECK(neg[1] < -1.0);  // first step overshoots past -d ...
  for (std::size_t p = 2; p < neg.size(); ++p) CHECK(std::abs(neg[p]) <= std::abs(neg[p - 1]));
  CHECK(neg.back() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_THROWS_AS(nap_outer_sequence_1d(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("two-sphere reduction mapping") {
  const Configuration x = TwoSphereReduction::positions(1.7);
  CHECK(TwoSphereReduction::separation(x) == doctest::Approx(1.7));
  CHECK(TwoSphereReduction::multiplier(TwoSphereReduction::multipliers(0.8)) == doctest::Approx(0.8));
  SolverParams reduced;
  reduced.alpha = 0.3;
  reduced.beta = 3.0;
  const SolverParams full = TwoSphereReduction::params(reduced);
  CHECK(full.beta == 1.5);
  CHECK(full.gamma_squared() == doctest::Approx(0.9));
}
