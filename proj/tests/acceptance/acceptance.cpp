// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cwstein/exact_oracle.hpp"
#include "cwstein/free_energy.hpp"
#include "cwstein/numerics.hpp"
#include "cwstein/pair_dynamics.hpp"
#include "cwstein/rate_harness.hpp"
#include "cwstein/stein_core.hpp"

using namespace cwstein;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

std::vector<int> powers_of_two(int lo, int hi) {
  std::vector<int> v;
  for (int e = lo; e <= hi; ++e) v.push_back(1 << e);
  return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Shared between the Stein suite and the bound-validity check.
BoundReport quartic_constants;
bool have_quartic_constants = false;

RateSpec sweep(double beta, std::vector<int> ns) {
  RateSpec s;
  s.beta = beta;
  s.n_grid = std::move(ns);
  s.method = "exact";
  return s;
}

void c1(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RateResult r = run_rate_experiment(sweep(0.5, powers_of_two(6, 14)));
  const double t = seconds_since(t0);
  o.detail << "slope " << g(r.fit.slope) << " r2 " << g(r.fit.r_squared) << " time " << g(t) << "s";
  o.require(r.fit.slope >= -0.6 && r.fit.slope <= -0.4, "slope");
  o.require(r.fit.r_squared >= 0.98, "r2");
  o.require(t < 30.0, "runtime");
}

void c2(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const RateResult r = run_rate_experiment(sweep(1.0, powers_of_two(12, 20)));
  const double t = seconds_since(t0);
  o.detail << "regime " << r.regime << " slope " << g(r.fit.slope) << " r2 " << g(r.fit.r_squared) << " time "
           << g(t) << "s";
  o.require(r.regime == "critical", "regime");
  o.require(r.fit.slope >= -0.6 && r.fit.slope <= -0.4, "slope");
  o.require(t < 60.0, "runtime");
}

void c3(Outcome& o) {
  RateSpec s = sweep(1.0, powers_of_two(6, 14));
  s.beta_seq = BetaSequence{+1, 0.5, 1.0};
  const RateResult r = run_rate_experiment(s);
  const LimitLaw F = LimitLaw::build(LawDescriptor::critical_classic_law());
  const double d001 = law_kolmogorov(LimitLaw::build(LawDescriptor::f_gamma_law(0.01)), F);
  const double d05 = law_kolmogorov(LimitLaw::build(LawDescriptor::f_gamma_law(0.5)), F);
  o.detail << "regime " << r.regime << " slope " << g(r.fit.slope) << " dK(F_0.01,F) " << g(d001)
           << " dK(F_0.5,F) " << g(d05);
  o.require(r.regime == "critical_window", "regime");
  o.require(r.fit.slope >= -0.65 && r.fit.slope <= -0.35, "slope");
  o.require(d001 < d05, "window continuity");
}

void c4(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  RateSpec s = sweep(1.0, powers_of_two(7, 12));
  s.measure = SpinMeasure::three_state();
  s.target_mode = TargetMode::moment_normalized;
  const RateResult r = run_rate_experiment(s);
  const double t = seconds_since(t0);
  o.detail << "slope " << g(r.fit.slope) << " r2 " << g(r.fit.r_squared) << " time " << g(t) << "s";
  o.require(r.fit.slope >= -0.48 && r.fit.slope <= -0.18, "slope");
  o.require(t < 600.0, "runtime");
}

void c5(Outcome& o) {
  auto check = [&](const std::string& name, const SpinMeasure& m, double beta, int k, double mu) {
    const ExtremalPoint p = classify_extremal(m, beta, 0.0);
    const double rel = std::abs(p.strength_mu - mu) / std::abs(mu);
    o.detail << name << " (" << p.type_k << ", " << g(p.strength_mu) << ") ";
    o.require(p.type_k == k && rel <= 1e-8, name);
  };
  for (double b : {0.25, 0.5, 0.75}) check("bernoulli@" + g(b), SpinMeasure::bernoulli(), b, 1, b - b * b);
  check("bernoulli@1", SpinMeasure::bernoulli(), 1.0, 2, 2.0);
  check("three_state@1", SpinMeasure::three_state(), 1.0, 3, 6.0);
  check("uniform@1", SpinMeasure::uniform(std::sqrt(3.0)), 1.0, 2, 1.2);
}

void c6(Outcome& o) {
  struct Family {
    std::string name;
    LawDescriptor d;
  };
  const std::vector<Family> fams{{"gaussian(1)", LawDescriptor::gaussian_law(1.0)},
                                 {"critical_classic", LawDescriptor::critical_classic_law()},
                                 {"power(3,6,1)", LawDescriptor::power_law(3, 6.0, 1.0)}};
  for (const auto& f : fams) {
    const LimitLaw law = LimitLaw::build(f.d);
    const auto zg = default_z_grid(law);
    const auto xg = default_x_grid(law);
    const BoundReport r = estimate_bound_constants(law, zg, xg, default_h_family());
    if (f.name == "critical_classic") {
      quartic_constants = r;
      have_quartic_constants = true;
    }
    const auto canon = law.canonical();
    const double d1_cap = f.d.family == LawFamily::gaussian ? std::sqrt(2 * M_PI) / 4 : 1.0 / (2.0 * canon->b);
    const StructureReport s = check_solution_structure(law, default_z_grid(law, 128), xg);
    bool sandwich = true;
    for (double x : xg)
      if (x > 0.0) sandwich = sandwich && check_tail_sandwich(law, x).holds;
    double limit_gap = 0.0;
    for (double z : {-1.0, 0.0, 0.5, 1.0})
      for (double x : {-8.0, 8.0}) limit_gap = std::max(limit_gap, check_tail_limit(law, z, x).gap);
    o.detail << " " << f.name << ": d1 " << g(r.d1) << " (cap " << g(d1_cap) << ") d2 " << g(r.d2) << " d3 " << g(r.d3)
             << " residual " << g(s.max_residual) << " sandwich " << (sandwich ? "ok" : "broken") << " tail limit gap "
             << g(limit_gap) << ";";
    o.require(r.d2 <= 1 + 1e-6 && r.d3 <= 1 + 1e-6, f.name + " d2/d3");
    o.require(r.d1 <= d1_cap + 1e-6, f.name + " d1");
    o.require(s.max_residual <= 1e-8, f.name + " residual");
    o.require(sandwich, f.name + " sandwich");
    o.require(limit_gap <= 1e-4, f.name + " tail limit at |x| = 8");
  }
}

void c7(Outcome& o) {
  const SpinMeasure b = SpinMeasure::bernoulli();
  for (double beta : {0.5, 1.0}) {
    const Regime r = beta < 1.0 ? Regime::clt(b, beta) : Regime::critical(b, beta);
    SamplerSpec spec;
    spec.n = 64;
    spec.beta = beta;
    spec.critical = beta >= 1.0;
    spec.scale_exponent = r.scale_exponent;
    const PairStats s = pair_statistics(spec, r, 100000, 2024);
    const Estimate* anti[] = {&s.antisym_linear, &s.antisym_cubic, &s.antisym_sine};
    double worst = 0.0;
    for (const Estimate* e : anti) worst = std::max(worst, std::abs(e->value) / e->se);
    const double ident = std::abs(s.identity_residual.value) / s.identity_residual.se;
    o.detail << "beta " << g(beta) << ": antisym max " << g(worst) << "se identity " << g(ident) << "se";
    o.require(worst <= 4.0, "antisymmetry beta " + g(beta));
    o.require(ident <= 4.0, "identity beta " + g(beta));

    double reassembly = 0.0;
    SpinConfiguration cfg = random_configuration(b, 64, beta, Model::standard, 0.0, r.scale_exponent, 5, 0);
    for (int t = 0; t < 20000; ++t) {
      gibbs_pair_step(cfg, 5, 0, t);
      const Decomposition d = decompose_regression(cfg, r);
      reassembly = std::max(reassembly, std::abs(d.mean_diff - (-d.lambda * d.psi_value + d.R_value)));
    }
    std::vector<RatePoint> pts;
    for (int n : {16, 32, 64, 128}) {
      RatePoint p;
      p.n = n;
      p.distance = exact_pair_ingredients(b, n, beta, r).mean_abs_R;
      pts.push_back(p);
    }
    const RateFit f = fit_rate(pts);
    o.detail << " reassembly " << g(reassembly) << " |R| slope " << g(f.slope) << "; ";
    o.require(reassembly <= 1e-14, "reassembly beta " + g(beta));
    o.require(std::abs(f.slope + 2.0) <= 0.3, "|R| slope beta " + g(beta));
  }
}

void c8(Outcome& o) {
  double worst = -INFINITY;
  for (const auto& m : {SpinMeasure::bernoulli(), SpinMeasure::three_state()})
    for (int n : {4, 6, 8, 10})
      for (double beta : {0.5, 1.0, 1.5})
        for (std::array<int, 4> s : {std::array<int, 4>{0, 1, 2, 3}, {0, 0, 1, 2}, {0, 0, 1, 1}, {0, 0, 0, 0}})
          worst = std::max(worst, ursell_check(m, n, beta, s).ursell);
  o.detail << "max Ursell " << g(worst) << "; GHS";
  o.require(worst <= 1e-10, "Ursell sign");
  struct Case {
    std::string name;
    SpinMeasure m;
    bool expect;
  };
  const std::vector<Case> cases{{"bernoulli", SpinMeasure::bernoulli(), true},
                                {"three_state", SpinMeasure::three_state(), true},
                                {"uniform", SpinMeasure::uniform(std::sqrt(3.0)), true},
                                {"trinomial(0.5)", SpinMeasure::trinomial(0.5), true},
                                {"trinomial(0.75)", SpinMeasure::trinomial(0.75), false}};
  for (const auto& c : cases) {
    const GhsReport r = check_ghs(c.m);
    o.detail << " " << c.name << "=" << (r.holds ? "holds" : "fails");
    o.require(r.holds == c.expect, "GHS " + c.name);
  }
}

void c9(Outcome& o) {
  const HubbardReport a = hubbard_density_check(SpinMeasure::bernoulli(), 32, 0.5, 0.0, 0.5);
  const HubbardReport b = hubbard_density_check(SpinMeasure::bernoulli(), 64, 1.0, 0.0, 0.75);
  o.detail << "(32,0.5,1/2) " << g(a.sup_discrepancy) << " (64,1,3/4) " << g(b.sup_discrepancy);
  o.require(a.sup_discrepancy < 1e-8 && b.sup_discrepancy < 1e-8, "discrepancy");
}

void c10(Outcome& o) {
  const SpinMeasure b = SpinMeasure::bernoulli();
  const LimitLaw gauss = LimitLaw::build(LawDescriptor::gaussian_law(2.0));
  const Regime clt = Regime::clt(b, 0.5);
  double min_ratio = INFINITY;
  for (int n : powers_of_two(6, 14)) {
    const double dk = exact_kolmogorov(exact_law(b, n, 0.5), 0.0, std::sqrt(n), gauss);
    const BoundIngredients in = exact_pair_ingredients(b, n, 0.5, clt).ingredients;
    const double rhs = evaluate_bound_rhs(in, {}, BoundForm::normal_fixed_variance).total;
    min_ratio = std::min(min_ratio, rhs / dk);
    o.require(rhs >= dk, "beta 0.5 n " + std::to_string(n));
  }
  o.detail << "beta 0.5 min RHS/dK " << g(min_ratio);
  if (!have_quartic_constants) {
    const LimitLaw q = LimitLaw::build(LawDescriptor::critical_classic_law());
    quartic_constants = estimate_bound_constants(q, default_z_grid(q), default_x_grid(q), default_h_family());
  }
  const BoundConstants c{quartic_constants.d1, quartic_constants.d2, quartic_constants.d3, quartic_constants.d4};
  const LimitLaw quartic = LimitLaw::build(LawDescriptor::critical_classic_law());
  const Regime crit = Regime::critical(b, 1.0);
  min_ratio = INFINITY;
  for (int n : powers_of_two(12, 20)) {
    const double dk = exact_kolmogorov(exact_law(b, n, 1.0), 0.0, std::pow(n, 0.75), quartic);
    const BoundIngredients in = exact_pair_ingredients(b, n, 1.0, crit).ingredients;
    const double rhs = evaluate_bound_rhs(in, c, BoundForm::general_density).total;
    min_ratio = std::min(min_ratio, rhs / dk);
    o.require(rhs >= dk, "beta 1 n " + std::to_string(n));
  }
  o.detail << "; beta 1 min RHS/dK " << g(min_ratio);
}

void c11(Outcome& o) {
  struct Point {
    double beta;
    int n;
  };
  const SpinMeasure b = SpinMeasure::bernoulli();
  for (Point p : {Point{0.5, 64}, Point{0.5, 256}, Point{0.5, 1024}, Point{1.0, 64}, Point{1.0, 256}}) {
    const bool critical = p.beta >= 1.0;
    const double exponent = critical ? 0.75 : 0.5;
    const double scale = std::pow(p.n, exponent);
    SamplerSpec spec;
    spec.n = p.n;
    spec.beta = p.beta;
    spec.critical = critical;
    spec.scale_exponent = exponent;
    spec.thinning = critical ? 100LL * p.n : 10LL * p.n;
    const std::size_t count = 20000;
    const std::vector<double> w = sample_magnetization(spec, count, 77 + p.n);
    const LimitLaw target = LimitLaw::build(critical ? LawDescriptor::critical_classic_law()
                                                     : LawDescriptor::gaussian_law(1.0 / (1.0 - p.beta)));
    const McDistance mc = sample_kolmogorov(w, target);
    const ExactLaw law = exact_law(b, p.n, p.beta);
    const double ex = exact_kolmogorov(law, 0.0, scale, target);
    o.detail << "(" << g(p.beta) << "," << p.n << ") mc " << g(mc.distance) << " exact " << g(ex) << " band "
             << g(mc.band);
    o.require(std::abs(mc.distance - ex) <= mc.band, "dK at beta " + g(p.beta) + " n " + std::to_string(p.n));
    for (int l : {2, 4}) {
      double sum = 0.0, sum2 = 0.0;
      for (double x : w) {
        const double v = std::pow(x, l);
        sum += v;
        sum2 += v * v;
      }
      const double mean = sum / count;
      const double se = std::sqrt((sum2 / count - mean * mean) / count);
      const double exact = exact_moment(law, 0.0, scale, l);
      o.detail << " m" << l << " " << g((mean - exact) / se) << "se";
      o.require(std::abs(mean - exact) <= 4.0 * se, "moment " + std::to_string(l) + " at beta " + g(p.beta) +
                                                        " n " + std::to_string(p.n));
    }
    o.detail << "; ";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 subcritical rate", c1},   {"2 critical rate", c2},     {"3 scaling window", c3},
      {"4 sextic rate", c4},        {"5 classification", c5},    {"6 Stein bound suite", c6},
      {"7 pair identities", c7},    {"8 correlation inequalities", c8}, {"9 Hubbard-Stratonovich", c9},
      {"10 bound validity", c10},   {"11 oracle consistency", c11}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("criterion %-28s %s (%.1fs) %s\n", name.c_str(), o.pass ? "PASS" : "FAIL", seconds_since(t0),
                o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
