#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "cwstein/exact_oracle.hpp"
#include "cwstein/numerics.hpp"
#include "doctest.h"

using namespace cwstein;

namespace {
double prob_at(const ExactLaw& law, double s) {
  for (std::size_t j = 0; j < law.support.size(); ++j)
    if (std::abs(law.support[j] - s) < 1e-9) return law.probs[j];
  return 0.0;
}

double total(const ExactLaw& law) {
  double t = 0.0;
  for (double p : law.probs) t += p;
  return t;
}
}  // namespace

TEST_CASE("two Bernoulli sites at unit inverse temperature") {
  const ExactLaw law = exact_law(SpinMeasure::bernoulli(), 2, 1.0);
  CHECK(law.support.size() == 3);
  CHECK(prob_at(law, 0.0) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-14));
  CHECK(prob_at(law, 0.0) == doctest::Approx(0.268941).epsilon(1e-6));
}

TEST_CASE("independent Bernoulli sites give the binomial law") {
  const ExactLaw law = exact_law(SpinMeasure::bernoulli(), 4, 0.0);
  const double expect[] = {1, 4, 6, 4, 1};
  for (int j = 0; j < 5; ++j) CHECK(prob_at(law, -4.0 + 2 * j) == doctest::Approx(expect[j] / 16).epsilon(1e-15));
}

TEST_CASE("three-state law against brute force") {
  const SpinMeasure m = SpinMeasure::three_state();
  const ExactLaw law = exact_law(m, 3, 1.0);
  const auto& atoms = m.atoms();
  std::map<long, double> weight;
  double z = 0.0;
  const double r3 = std::sqrt(3.0);
  for (const auto& a : atoms)
    for (const auto& b : atoms)
      for (const auto& c : atoms) {
        const double s = a.location + b.location + c.location;
        const double w = a.weight * b.weight * c.weight * std::exp(s * s / 6.0);
        weight[std::lround(s / r3)] += w;
        z += w;
      }
  CHECK(law.support.size() == weight.size());
  for (const auto& [k, w] : weight) CHECK(std::abs(prob_at(law, k * r3) - w / z) < 1e-14);
}

TEST_CASE("independent sites give the convolution of the single-site law") {
  const SpinMeasure m = SpinMeasure::three_state();
  std::vector<double> conv{1.0};  // index j <-> S = (j - len) sqrt3
  for (int n = 1; n <= 64; ++n) {
    std::vector<double> next(conv.size() + 2, 0.0);
    for (std::size_t j = 0; j < conv.size(); ++j) {
      next[j] += conv[j] / 6.0;
      next[j + 1] += conv[j] * 2.0 / 3.0;
      next[j + 2] += conv[j] / 6.0;
    }
    conv.swap(next);
    if (n % 9 != 1 && n != 64) continue;
    const ExactLaw law = exact_law(m, n, 0.0);
    double err = 0.0;
    for (std::size_t j = 0; j < conv.size(); ++j)
      err = std::max(err, std::abs(prob_at(law, (static_cast<double>(j) - n) * std::sqrt(3.0)) - conv[j]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("exact laws are normalized and symmetric") {
  for (const auto& m : {SpinMeasure::bernoulli(), SpinMeasure::three_state(), SpinMeasure::trinomial(0.75)})
    for (double beta : {0.5, 1.0, 1.5}) {
      const ExactLaw law = exact_law(m, 50, beta);
      CHECK(std::abs(total(law) - 1.0) < 1e-12);
      const std::size_t L = law.probs.size();
      for (std::size_t j = 0; j < L; ++j) {
        CHECK(std::abs(law.support[j] + law.support[L - 1 - j]) < 1e-9);
        CHECK(std::abs(law.probs[j] - law.probs[L - 1 - j]) < 1e-12);
      }
      for (int l : {1, 3, 5, 7}) CHECK(std::abs(exact_moment(law, 0.0, std::sqrt(50.0), l)) < 1e-12);
    }
}

TEST_CASE("large exponents do not overflow") {
  const ExactLaw law = exact_law(SpinMeasure::bernoulli(), 4000, 1.5);
  CHECK(std::abs(total(law) - 1.0) < 1e-12);
  for (double p : law.probs) CHECK(std::isfinite(p));
}

TEST_CASE("Kolmogorov distance by hand") {
  const ExactLaw law = exact_law(SpinMeasure::bernoulli(), 4, 0.0);
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(1.0));
  CHECK(exact_kolmogorov(law, 0.0, 2.0, g) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(discrete_kolmogorov(law, law, 0.0, 2.0) == 0.0);
  // F_n itself as the target.
  auto self = [&](double z) {
    double c = 0.0;
    for (std::size_t j = 0; j < law.support.size(); ++j)
      if (law.support[j] / 2.0 <= z) c += law.probs[j];
    return c;
  };
  CHECK(exact_kolmogorov(law, 0.0, 2.0, self) < 1e-15);
}

TEST_CASE("Kolmogorov distance is invariant under reflection") {
  const ExactLaw law = exact_law(SpinMeasure::bernoulli(), 101, 0.5);
  ExactLaw flipped = law;
  const std::size_t L = law.support.size();
  for (std::size_t j = 0; j < L; ++j) {
    flipped.support[j] = -law.support[L - 1 - j];
    flipped.probs[j] = law.probs[L - 1 - j];
  }
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(2.0));
  CHECK(exact_kolmogorov(law, 0.0, std::sqrt(101.0), g) == exact_kolmogorov(flipped, 0.0, std::sqrt(101.0), g));
}

TEST_CASE("Kolmogorov distance decays at the square-root rate") {
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(2.0));
  const double d256 = exact_kolmogorov(exact_law(SpinMeasure::bernoulli(), 256, 0.5), 0.0, 16.0, g);
  const double d1024 = exact_kolmogorov(exact_law(SpinMeasure::bernoulli(), 1024, 0.5), 0.0, 32.0, g);
  CHECK(d256 == doctest::Approx(0.01763).epsilon(2e-3));
  CHECK(d1024 == doctest::Approx(0.008815).epsilon(2e-3));
  CHECK(std::log(d1024 / d256) / std::log(4.0) == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("independent spins have unit variance") {
  for (int n : {10, 77, 300})
    CHECK(exact_moment(exact_law(SpinMeasure::bernoulli(), n, 0.0), 0.0, std::sqrt(n), 2) ==
          doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(exact_moment(exact_law(SpinMeasure::bernoulli(), 4, 0.0), 0.0, 2.0, 17), InvalidArgument);
}

TEST_CASE("critical moments stay bounded at the quartic scaling") {
  for (int l : {2, 4, 6}) {
    double lo = INFINITY, hi = 0.0;
    for (int n : {2048, 3000, 4096}) {
      const double v = exact_moment(exact_law(SpinMeasure::bernoulli(), n, 1.0), 0.0, std::pow(n, 0.75), l);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo < 2.0);
  }
}

TEST_CASE("budgets") {
  CHECK(composition_count(3, 3) == doctest::Approx(10.0));
  CHECK_THROWS_AS(check_exact_budget(SpinMeasure::three_state(), 5000, {}), BudgetExceeded);
  CHECK_NOTHROW(check_exact_budget(SpinMeasure::three_state(), 4000, {}));
  CHECK_THROWS_AS(check_exact_budget(SpinMeasure::bernoulli(), 25, linspace(-0.5, 0.5, 25)), BudgetExceeded);
  CHECK_THROWS_AS(exact_law(SpinMeasure::uniform(1.0), 4, 0.5), InvalidArgument);
}

TEST_CASE("site fields shift the law") {
  const std::vector<double> h{0.2, 0.2, 0.2};
  const ExactLaw a = exact_law(SpinMeasure::bernoulli(), 3, 0.7, h);
  std::vector<double> mixed{0.1, 0.3, 0.2};
  const ExactLaw b = exact_law(SpinMeasure::bernoulli(), 3, 0.7, mixed);
  CHECK(std::abs(total(b) - 1.0) < 1e-14);
  CHECK(exact_moment(a, 0.0, 1.0, 1) > 0.0);
  // Brute force for the non-uniform case.
  double z = 0.0, s3 = 0.0;
  for (int c = 0; c < 8; ++c) {
    double s = 0.0, hx = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double x = (c >> i & 1) ? 1.0 : -1.0;
      s += x;
      hx += mixed[i] * x;
    }
    const double w = std::exp(0.7 * s * s / 6.0 + 0.7 * hx);
    z += w;
    if (s > 2.5) s3 += w;
  }
  CHECK(prob_at(b, 3.0) == doctest::Approx(s3 / z).epsilon(1e-13));
}

TEST_CASE("Lebowitz inequality for GHS measures") {
  CHECK(ursell_check(SpinMeasure::bernoulli(), 6, 1.2, {0, 1, 2, 3}).ursell <= 1e-10);
  CHECK(ursell_check(SpinMeasure::bernoulli(), 6, 1.2, {0, 0, 1, 1}).ursell <= 1e-10);
  for (double beta : {0.5, 1.0, 1.5})
    CHECK(ursell_check(SpinMeasure::three_state(), 7, beta, {0, 1, 2, 3}).ursell <= 1e-10);
  CHECK(std::abs(ursell_check(SpinMeasure::three_state(), 5, 0.0, {0, 1, 2, 3}).ursell) < 1e-15);
}

TEST_CASE("Ursell function is symmetric in its sites") {
  const SpinMeasure m = SpinMeasure::trinomial(0.75);
  const double ref = ursell_check(m, 6, 1.1, {0, 1, 2, 3}).ursell;
  for (std::array<int, 4> s : {std::array<int, 4>{3, 2, 1, 0}, {1, 3, 0, 2}, {2, 0, 3, 1}})
    CHECK(std::abs(ursell_check(m, 6, 1.1, s).ursell - ref) < 1e-13);
  CHECK_THROWS_AS(ursell_check(m, 13, 1.0, {0, 1, 2, 3}), InvalidArgument);
}

TEST_CASE("third field derivative by two routes") {
  const UrsellReport r = ursell_check(SpinMeasure::bernoulli(), 6, 0.9, {0, 1, 2, 3}, {0.1, 0.2, 0, 0, 0.3, 0});
  CHECK(r.ghs2_exact <= 1e-12);
  CHECK(std::abs(r.ghs2_exact - r.ghs2_fd) < 1e-6);
}

TEST_CASE("GHS2 search reports its grid") {
  const Ghs2Search s = ghs2_search(SpinMeasure::bernoulli(), 4, {0.5, 1.0}, {0.0, 0.3});
  CHECK_FALSE(s.found_positive);
  CHECK(s.evaluated > 0);
  CHECK(to_json(s).contains("max_value"));
}

TEST_CASE("Hubbard-Stratonovich density matches the Gaussian mixture") {
  const HubbardReport a = hubbard_density_check(SpinMeasure::bernoulli(), 64, 1.0, 0.0, 0.75);
  CHECK(a.sup_discrepancy < 1e-8);
  CHECK(std::abs(a.density_mass - 1.0) < 1e-10);
  const HubbardReport b = hubbard_density_check(SpinMeasure::bernoulli(), 32, 0.5, 0.0, 0.5);
  CHECK(b.sup_discrepancy < 1e-8);
  CHECK(std::abs(b.density_mass - 1.0) < 1e-10);
  CHECK_THROWS_AS(hubbard_density_check(SpinMeasure::bernoulli(), 32, 0.5, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("fixtures round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cwstein_fixture_test";
  std::filesystem::remove_all(dir);
  const ExactLaw law = exact_law(SpinMeasure::three_state(), 9, 0.8);
  const std::string path = write_fixture(dir.string(), law);
  CHECK(std::filesystem::exists(path));
  const ExactLaw back = read_law_csv(path);
  REQUIRE(back.probs.size() == law.probs.size());
  for (std::size_t j = 0; j < law.probs.size(); ++j) {
    CHECK(back.support[j] == law.support[j]);
    CHECK(back.probs[j] == law.probs[j]);
  }
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,prob");
  std::filesystem::remove_all(dir);
}
