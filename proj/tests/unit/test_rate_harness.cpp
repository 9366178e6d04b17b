#include <cmath>
#include <random>

#include "cwstein/numerics.hpp"
#include "cwstein/rate_harness.hpp"
#include "doctest.h"

using namespace cwstein;

namespace {
std::vector<RatePoint> power_points(double c, double slope, std::vector<int> ns) {
  std::vector<RatePoint> pts;
  for (int n : ns) {
    RatePoint p;
    p.n = n;
    p.distance = c * std::pow(n, slope);
    pts.push_back(p);
  }
  return pts;
}
}  // namespace

TEST_CASE("fit of exact power data") {
  const RateFit f = fit_rate(power_points(3.0, -0.5, {64, 128, 256, 512, 1024}));
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit_rate(power_points(1.0, -1.0 / 3.0, {10, 20, 40, 80})).slope == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("fit with multiplicative noise") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<int> ns;
  for (int e = 6; e <= 14; ++e) ns.push_back(1 << e);
  for (int rep = 0; rep < 20; ++rep) {
    auto pts = power_points(2.0, -0.5, ns);
    for (auto& p : pts) p.distance *= 1.0 + u(rng);
    CHECK(std::abs(fit_rate(pts).slope + 0.5) < 0.05);
  }
}

TEST_CASE("fit rejects too few or degenerate points") {
  CHECK_THROWS_AS(fit_rate(power_points(1.0, -0.5, {8, 16, 32})), InvalidArgument);
  auto pts = power_points(1.0, -0.5, {8, 16, 32, 64, 128});
  pts[0].usable = pts[1].usable = false;
  CHECK_THROWS_AS(fit_rate(pts), InvalidArgument);
  CHECK_THROWS_AS(fit_rate(power_points(1.0, -0.5, {50, 50, 50, 50})), InvalidArgument);
}

TEST_CASE("regime classification for quartic criticality") {
  const RegimeTag w = classify_beta_regime({+1, 0.5, 2.0}, 2);
  CHECK(w.kind == RegimeTagKind::critical_window);
  CHECK(w.gamma == doctest::Approx(2.0));
  CHECK(classify_beta_regime({+1, 1.0, 1.0}, 2).kind == RegimeTagKind::critical_rate);
  CHECK(classify_beta_regime({-1, 0.2, 1.0}, 2).kind == RegimeTagKind::clt_with_rate);
  CHECK(classify_beta_regime({-1, 0.3, 1.0}, 2).kind == RegimeTagKind::clt_window);
  CHECK(classify_beta_regime({+1, 0.7, 1.0}, 2).kind == RegimeTagKind::sub_window);
  CHECK(classify_beta_regime({+1, 0.0, 0.0}, 2).kind == RegimeTagKind::critical_rate);
  CHECK(classify_beta_regime({-1, 0.5, 1.5}, 2).gamma == doctest::Approx(-1.5));
}

TEST_CASE("regime classification for general type") {
  const RegimeTag t = classify_beta_regime({+1, 2.0 / 3.0, 1.0}, 3);
  CHECK(t.kind == RegimeTagKind::critical_window);
  CHECK(t.window_exponent == doctest::Approx(2.0 / 3.0));
  CHECK(t.rate_exponent == doctest::Approx(1.0 / 3.0));
  CHECK(classify_beta_regime({+1, 0.5, 1.0}, 3).kind == RegimeTagKind::clt_window);
  CHECK(classify_beta_regime({+1, 0.3, 1.0}, 3).kind == RegimeTagKind::clt_with_rate);
  CHECK(classify_beta_regime({+1, 0.8, 1.0}, 3).kind == RegimeTagKind::sub_window);
  CHECK(classify_beta_regime({+1, 1.2, 1.0}, 3).kind == RegimeTagKind::critical_rate);
  // k = 2 of the general rule equals the quartic thresholds.
  const RegimeTag q = classify_beta_regime({+1, 0.5, 1.0}, 2);
  CHECK(q.window_exponent == 0.5);
  CHECK(q.rate_exponent == 0.25);
  CHECK_THROWS_AS(classify_beta_regime({+1, 0.5, 1.0}, 1), InvalidArgument);
}

TEST_CASE("DKW band") {
  CHECK(dkw_band(10000) == doctest::Approx(std::sqrt(std::log(200.0) / 20000.0)).epsilon(1e-14));
}

TEST_CASE("null sample sits inside the band") {
  const LimitLaw c = LimitLaw::build(LawDescriptor::critical_classic_law());
  const McDistance d = sample_kolmogorov(c.sample(200000, 17), c);
  CHECK(d.distance < d.band);
  CHECK_FALSE(d.usable);
}

TEST_CASE("sample Kolmogorov distance handles ties") {
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(1.0));
  const McDistance d = sample_kolmogorov({0.0, 0.0, 0.0, 0.0}, g);
  CHECK(d.distance == doctest::Approx(0.5));
}

TEST_CASE("Monte Carlo distance agrees with the exact oracle") {
  SamplerSpec spec;
  spec.n = 256;
  spec.beta = 0.5;
  spec.thinning = 10 * spec.n;
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(2.0));
  const McDistance mc = mc_kolmogorov(spec, g, 10000, 3);
  const double ex = exact_kolmogorov(exact_law(spec.measure, 256, 0.5), 0.0, 16.0, g);
  CHECK(std::abs(mc.distance - ex) < mc.band);
  CHECK_THROWS_AS(mc_kolmogorov(spec, g, 9999, 3), InvalidArgument);
}

TEST_CASE("Wasserstein distance of a point mass") {
  const LimitLaw g = LimitLaw::build(LawDescriptor::gaussian_law(1.0));
  for (double a : {0.0, 0.4, 2.5}) {
    ExactLaw pm;
    pm.support = {a};
    pm.probs = {1.0};
    pm.n = 1;
    const double closed = a * (std::erf(a / std::sqrt(2.0))) + 2.0 * std::exp(-a * a / 2) / std::sqrt(2 * M_PI);
    CHECK(wasserstein_distance(pm, 0.0, 1.0, g) == doctest::Approx(closed).epsilon(1e-9));
    CHECK(wasserstein_distance(std::vector<double>{a}, g) == doctest::Approx(closed).epsilon(1e-9));
  }
}

TEST_CASE("Wasserstein distance of a fine sample is small") {
  const LimitLaw c = LimitLaw::build(LawDescriptor::critical_classic_law());
  CHECK(wasserstein_distance(c.sample(100000, 5), c) < 0.01);
}

TEST_CASE("subcritical rate sweep") {
  RateSpec spec;
  spec.beta = 0.5;
  spec.n_grid = {64, 128, 256, 512, 1024, 2048};
  const RateResult r = run_rate_experiment(spec);
  CHECK(r.regime == "clt");
  CHECK(r.fit.slope == doctest::Approx(-0.5).epsilon(0.1));
  CHECK(r.fit.r_squared >= 0.98);
  for (std::size_t i = 1; i < r.fit.points.size(); ++i)
    CHECK(r.fit.points[i].distance < r.fit.points[i - 1].distance);
  const std::string csv = rate_csv(r.fit);
  CHECK(csv.rfind("n,distance,se,method,band,usable\n", 0) == 0);
  const std::string svg = rate_svg(r.fit, "demo");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(to_json(r).at("slope").get<double>() == r.fit.slope);
  spec.metric = "wasserstein";
  CHECK(run_rate_experiment(spec).fit.slope == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("rate sweeps are independent of worker count") {
  RateSpec spec;
  spec.beta = 1.0;
  spec.n_grid = {64, 128, 256, 512};
  const RateResult a = run_rate_experiment(spec, 1);
  const RateResult b = run_rate_experiment(spec, 3);
  CHECK(rate_csv(a.fit) == rate_csv(b.fit));
}

TEST_CASE("supercritical sweeps need a center") {
  RateSpec spec;
  spec.beta = 1.5;
  spec.n_grid = {64, 128, 256, 512};
  CHECK_THROWS_AS(run_rate_experiment(spec), InvalidArgument);
  spec.center = 0.1;
  CHECK_THROWS_AS(run_rate_experiment(spec), InvalidArgument);
}

TEST_CASE("rate spec round trip") {
  RateSpec spec;
  spec.beta_seq = BetaSequence{+1, 0.5, 1.0};
  spec.n_grid = {64, 128};
  spec.target_mode = TargetMode::fixed;
  spec.target = LawDescriptor::f_gamma_law(1.0);
  const RateSpec back = RateSpec::from_json(spec.to_json());
  CHECK(back.to_json() == spec.to_json());
  CHECK(back.beta_seq->at(64) == doctest::Approx(1.125));
}
