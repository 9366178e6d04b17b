#include <cmath>

#include "cwstein/numerics.hpp"
#include "cwstein/spin_measures.hpp"
#include "doctest.h"

using namespace cwstein;

namespace {
std::vector<SpinMeasure> all_measures() {
  EvenPotential v;
  v.coefficients = {1.0, 1.0};  // x^2 + x^4
  return {SpinMeasure::bernoulli(), SpinMeasure::three_state(), SpinMeasure::trinomial(0.5),
          SpinMeasure::trinomial(0.75), SpinMeasure::uniform(std::sqrt(3.0)), SpinMeasure::uniform(1.0),
          SpinMeasure::gibbs_density(v)};
}
}  // namespace

TEST_CASE("bernoulli atoms and variance") {
  const auto m = SpinMeasure::bernoulli();
  REQUIRE(m.atoms().size() == 2);
  CHECK(m.variance() == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& a : m.atoms()) {
    CHECK(std::abs(a.location) == 1.0);
    CHECK(a.weight == 0.5);
  }
}

TEST_CASE("three-state measure has unit variance") {
  const auto m = SpinMeasure::three_state();
  CHECK(m.variance() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.support_bound() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("trinomial(0) is the coin") {
  const auto t = SpinMeasure::trinomial(0.0);
  const auto b = SpinMeasure::bernoulli();
  CHECK(t.variance() == doctest::Approx(b.variance()));
  for (int k = 0; k <= 8; ++k)
    CHECK(cgf_derivative(t, 0.37, k) == doctest::Approx(cgf_derivative(b, 0.37, k)).epsilon(1e-12));
}

TEST_CASE("trinomial atoms sit at zero and plus/minus one") {
  const auto t = SpinMeasure::trinomial(0.3);
  CHECK(t.variance() == doctest::Approx(0.7));
  CHECK(t.support_bound() == 1.0);
}

TEST_CASE("invalid descriptors are rejected") {
  CHECK_THROWS_AS(SpinMeasure::atomic({{1.0, 0.5}, {-2.0, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(SpinMeasure::atomic({{1.0, 0.4}, {-1.0, 0.4}}), InvalidArgument);
  CHECK_THROWS_AS(SpinMeasure::trinomial(1.0), InvalidArgument);
  CHECK_THROWS_AS(SpinMeasure::uniform(-1.0), InvalidArgument);
  EvenPotential quadratic;
  quadratic.coefficients = {1.0};
  CHECK_THROWS_AS(SpinMeasure::gibbs_density(quadratic), InvalidArgument);
  CHECK_THROWS_AS(SpinMeasure::from_json(Json{{"kind", "bernouli"}}), InvalidArgument);
}

TEST_CASE("json round trip") {
  for (const auto& m : all_measures()) {
    const SpinMeasure back = SpinMeasure::from_json(m.to_json());
    CHECK(back.variance() == doctest::Approx(m.variance()).epsilon(1e-12));
    CHECK(back.to_json() == m.to_json());
  }
}

TEST_CASE("cgf of the coin is log cosh") {
  const auto b = SpinMeasure::bernoulli();
  for (double s : {0.0, 0.3, 1.7, -2.5}) {
    CHECK(cgf_derivative(b, s, 0) == doctest::Approx(std::log(std::cosh(s))).epsilon(1e-14));
    CHECK(cgf_derivative(b, s, 1) == doctest::Approx(std::tanh(s)).epsilon(1e-14));
    CHECK(cgf_derivative(b, s, 2) == doctest::Approx(1.0 - std::tanh(s) * std::tanh(s)).epsilon(1e-13));
  }
  CHECK(cgf_derivative(b, 0.0, 0) == 0.0);
  CHECK(cgf_derivative(b, 0.0, 4) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(cgf_derivative(b, 0.0, 6) == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("uniform(sqrt 3) second and fourth cumulants") {
  const auto u = SpinMeasure::uniform(std::sqrt(3.0));
  CHECK(cgf_derivative(u, 0.0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cgf_derivative(u, 0.0, 4) == doctest::Approx(-1.2).epsilon(1e-10));
}

TEST_CASE("odd cumulants vanish and the second is the variance") {
  for (const auto& m : all_measures()) {
    CAPTURE(m.label());
    CHECK(std::abs(cgf_derivative(m, 0.0, 1)) < 1e-10);
    CHECK(std::abs(cgf_derivative(m, 0.0, 3)) < 1e-10);
    CHECK(std::abs(cgf_derivative(m, 0.0, 2) - m.variance()) < 1e-10);
  }
}

TEST_CASE("tilted cumulants agree with finite differences of phi") {
  const double h = 1e-3;
  for (const auto& m : all_measures()) {
    CAPTURE(m.label());
    for (double s : {0.4, 1.3}) {
      auto phi = [&](double t) { return cgf_derivative(m, t, 0); };
      const double fd2 = (phi(s + h) - 2 * phi(s) + phi(s - h)) / (h * h);
      const double fd3 = (phi(s + 2 * h) - 2 * phi(s + h) + 2 * phi(s - h) - phi(s - 2 * h)) / (2 * h * h * h);
      const double k2 = cgf_derivative(m, s, 2);
      const double k3 = cgf_derivative(m, s, 3);
      CHECK(std::abs(fd2 - k2) <= 1e-4 * std::max(1.0, std::abs(k2)));
      CHECK(std::abs(fd3 - k3) <= 1e-4 * std::max(1.0, std::abs(k3)));
    }
  }
}

TEST_CASE("cumulant recursion from central moments") {
  // Exponential(1) shifted to mean 0: central moments 1, 0, 1, 2, 9, 44; cumulants (r-1)!.
  const std::vector<double> central{1, 0, 1, 2, 9, 44};
  const auto k = cumulants_from_central(central, 1.0);
  CHECK(k[1] == doctest::Approx(1.0));
  CHECK(k[2] == doctest::Approx(1.0));
  CHECK(k[3] == doctest::Approx(2.0));
  CHECK(k[4] == doctest::Approx(6.0));
  CHECK(k[5] == doctest::Approx(24.0));
}

TEST_CASE("GHS check on the example measures") {
  CHECK(check_ghs(SpinMeasure::bernoulli()).holds);
  CHECK(check_ghs(SpinMeasure::three_state()).holds);
  CHECK(check_ghs(SpinMeasure::trinomial(0.5)).holds);
  CHECK(check_ghs(SpinMeasure::uniform(std::sqrt(3.0))).holds);
  const GhsReport bad = check_ghs(SpinMeasure::trinomial(0.75));
  CHECK_FALSE(bad.holds);
  CHECK(bad.worst_point > 0.0);
  CHECK(bad.worst_value > bad.tolerance);
  CHECK_THROWS_AS(check_ghs(SpinMeasure::bernoulli(), 10.0, 50), InvalidArgument);
}

TEST_CASE("GHS measures are sub-Gaussian") {
  for (const auto& m : {SpinMeasure::bernoulli(), SpinMeasure::three_state(), SpinMeasure::trinomial(0.5),
                        SpinMeasure::uniform(std::sqrt(3.0))})
    for (double s : linspace(0.0, 8.0, 81))
      CHECK(cgf_derivative(m, s, 0) <= s * s * m.variance() / 2 + 1e-12);
}

TEST_CASE("standardize rescales to unit variance") {
  const auto u = standardize(SpinMeasure::uniform(1.0));
  CHECK(u.variance() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.support_bound() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(standardize(SpinMeasure::bernoulli()).to_json() == SpinMeasure::bernoulli().to_json());
  CHECK(standardize(SpinMeasure::three_state()).variance() == doctest::Approx(1.0).epsilon(1e-12));
  EvenPotential v;
  v.coefficients = {1.0, 1.0};
  CHECK(standardize(SpinMeasure::gibbs_density(v)).variance() == doctest::Approx(1.0).epsilon(1e-10));
}
