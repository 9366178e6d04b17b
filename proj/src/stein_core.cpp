#include "cwstein/stein_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cwstein/numerics.hpp"

namespace cwstein {

IndicatorSolution::IndicatorSolution(const LimitLaw& law, double z)
    : law_(&law), z_(z), pz_(law.cdf(z)), log_pz_(law.log_cdf(z)), log_qz_(law.log_ccdf(z)) {}

double IndicatorSolution::value(double x) const {
  if (x <= z_) return std::exp(log_qz_ + law_->log_cdf_over_density(x));
  return std::exp(log_pz_ + law_->log_ccdf_over_density(x));
}

double IndicatorSolution::derivative(double x) const {
  const double h = (x <= z_ ? 1.0 : 0.0) - pz_;
  return -law_->psi(x) * value(x) + h;
}

double IndicatorSolution::derivative_right_of_z() const {
  return -law_->psi(z_) * value(z_) - pz_;
}

double IndicatorSolution::product_derivative(double x) const {
  const double f = value(x);
  const double psi = law_->psi(x);
  const double h = (x <= z_ ? 1.0 : 0.0) - pz_;
  return (law_->psi_prime(x) - psi * psi) * f + psi * h;
}

double solve_indicator(const LimitLaw& law, double z, double x) {
  return IndicatorSolution(law, z).value(x);
}

double TestFunction::value(double x) const {
  switch (kind) {
    case TestKind::sine: return std::sin(omega * x);
    case TestKind::hyperbolic_tangent: return std::tanh(omega * x);
    case TestKind::clamped_linear: return std::clamp(omega * x, -1.0, 1.0);
    case TestKind::constant: return omega;
    case TestKind::identity: return x;
  }
  return 0.0;
}

double TestFunction::derivative(double x) const {
  switch (kind) {
    case TestKind::sine: return omega * std::cos(omega * x);
    case TestKind::hyperbolic_tangent: {
      const double t = std::tanh(omega * x);
      return omega * (1.0 - t * t);
    }
    case TestKind::clamped_linear: return std::abs(omega * x) < 1.0 ? omega : 0.0;
    case TestKind::constant: return 0.0;
    case TestKind::identity: return 1.0;
  }
  return 0.0;
}

double TestFunction::lipschitz() const {
  switch (kind) {
    case TestKind::constant: return 0.0;
    case TestKind::identity: return 1.0;
    default: return std::abs(omega);
  }
}

std::string TestFunction::name() const {
  switch (kind) {
    case TestKind::sine: return "sin(" + format_double(omega) + "x)";
    case TestKind::hyperbolic_tangent: return "tanh(" + format_double(omega) + "x)";
    case TestKind::clamped_linear: return "clamp(" + format_double(omega) + "x)";
    case TestKind::constant: return "const(" + format_double(omega) + ")";
    case TestKind::identity: return "x";
  }
  return "?";
}

TestFunction TestFunction::from_json(const Json& j) {
  TestFunction t;
  const std::string kind = j.at("kind").get<std::string>();
  t.omega = j.value("omega", 1.0);
  if (kind == "sin") t.kind = TestKind::sine;
  else if (kind == "tanh") t.kind = TestKind::hyperbolic_tangent;
  else if (kind == "clamped_linear") t.kind = TestKind::clamped_linear;
  else if (kind == "constant") t.kind = TestKind::constant;
  else if (kind == "identity") t.kind = TestKind::identity;
  else throw InvalidArgument("h.kind: unknown '" + kind + "', allowed: sin, tanh, clamped_linear, constant, identity");
  return t;
}

std::vector<TestFunction> default_h_family() {
  std::vector<TestFunction> out;
  for (TestKind k : {TestKind::sine, TestKind::hyperbolic_tangent, TestKind::clamped_linear})
    for (double w : {0.5, 1.0, 2.0}) out.push_back({k, w});
  return out;
}

namespace {
constexpr int kSmoothCells = 4096;
}

SmoothSolution::SmoothSolution(const LimitLaw& law, TestFunction h) : law_(&law), h_(h) {
  if (h.kind == TestKind::constant) {
    ph_ = h.omega;
    return;
  }
  range_ = law.effective_range();
  cell_ = range_ / kSmoothCells;
  const double lz = law.log_normalizer();
  ph_ = composite_gauss([&](double x) { return h_.value(x) * std::exp(-law.potential(x) - lz); },
                        -range_, range_, 2 * kSmoothCells);
  const double inf = std::numeric_limits<double>::infinity();
  right_.assign(kSmoothCells + 1, 0.0);
  left_.assign(kSmoothCells + 1, 0.0);
  right_[kSmoothCells] = integrate([&](double u) { return g(range_ + u); }, 0.0, inf, 1e-12);
  left_[kSmoothCells] = integrate([&](double u) { return g(-range_ - u); }, 0.0, inf, 1e-12);
  const auto& rule = gauss_legendre20();
  for (int i = kSmoothCells - 1; i >= 0; --i) {
    const double mid = (i + 0.5) * cell_;
    double sr = 0.0;
    double sl = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = mid + 0.5 * cell_ * rule.nodes[q];
      sr += rule.weights[q] * g(t);
      sl += rule.weights[q] * g(-t);
    }
    right_[i] = right_[i + 1] + 0.5 * cell_ * sr;
    left_[i] = left_[i + 1] + 0.5 * cell_ * sl;
  }
}

double SmoothSolution::g(double t) const {
  return (h_.value(t) - ph_) * std::exp(-law_->potential(t));
}

double SmoothSolution::tail_right(double x) const {
  if (x >= range_) {
    double err = 0.0;
    const double v = integrate([&](double u) { return g(x + u); }, 0.0,
                               std::numeric_limits<double>::infinity(), 1e-12, &err);
    return v;
  }
  const int i = std::min(kSmoothCells - 1, static_cast<int>(x / cell_));
  const double right = (i + 1) * cell_;
  const auto& rule = gauss_legendre20();
  const double mid = 0.5 * (x + right);
  const double half = 0.5 * (right - x);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * g(mid + half * rule.nodes[q]);
  return right_[i + 1] + half * s;
}

double SmoothSolution::tail_left(double x) const {
  const double y = -x;
  if (y >= range_) {
    return integrate([&](double u) { return g(x - u); }, 0.0, std::numeric_limits<double>::infinity(),
                     1e-12);
  }
  const int i = std::min(kSmoothCells - 1, static_cast<int>(y / cell_));
  const double right = (i + 1) * cell_;
  const auto& rule = gauss_legendre20();
  const double mid = 0.5 * (y + right);
  const double half = 0.5 * (right - y);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) s += rule.weights[q] * g(-(mid + half * rule.nodes[q]));
  return left_[i + 1] + half * s;
}

double SmoothSolution::value(double x) const {
  if (h_.kind == TestKind::constant) return 0.0;
  // Use the integral over the lighter side.
  const double ev = std::exp(law_->potential(x));
  return x >= 0.0 ? -ev * tail_right(x) : ev * tail_left(x);
}

double SmoothSolution::derivative(double x) const {
  return -law_->psi(x) * value(x) + h_.value(x) - ph_;
}

double SmoothSolution::second_derivative(double x) const {
  const double f = value(x);
  const double psi = law_->psi(x);
  return (psi * psi - law_->psi_prime(x)) * f - psi * (h_.value(x) - ph_) + h_.derivative(x);
}

double solve_smooth(const LimitLaw& law, const TestFunction& h, double x) {
  return SmoothSolution(law, h).value(x);
}

std::vector<double> default_z_grid(const LimitLaw& law, std::size_t count) {
  const double r = law.effective_range();
  return linspace(-r, r, count);
}

std::vector<double> default_x_grid(const LimitLaw& law, std::size_t count) {
  const double r = law.effective_range();
  return linspace(-r, r, count);
}

BoundReport estimate_bound_constants(const LimitLaw& law, const std::vector<double>& z_grid,
                                     const std::vector<double>& x_grid,
                                     const std::vector<TestFunction>& h_family, int workers) {
  BoundReport rep;
  rep.z_points = z_grid.size();
  rep.x_points = x_grid.size();
  rep.x_range = x_grid.empty() ? 0.0 : std::max(std::abs(x_grid.front()), std::abs(x_grid.back()));
  const std::size_t nx = x_grid.size();
  std::vector<double> lcd(nx), lqd(nx), psi(nx), dpsi(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    lcd[i] = law.log_cdf_over_density(x_grid[i]);
    lqd[i] = law.log_ccdf_over_density(x_grid[i]);
    psi[i] = law.psi(x_grid[i]);
    dpsi[i] = law.psi_prime(x_grid[i]);
  }
  rep.per_z.resize(z_grid.size());
  parallel_for(z_grid.size(), workers, [&](std::size_t zi) {
    const double z = z_grid[zi];
    const IndicatorSolution sol(law, z);
    const double pz = law.cdf(z);
    const double lpz = law.log_cdf(z);
    const double lqz = law.log_ccdf(z);
    PerZSup row;
    row.z = z;
    double fp_min = std::numeric_limits<double>::infinity();
    double fp_max = -fp_min;
    auto account = [&](double f, double fp, double prod) {
      row.sup_f = std::max(row.sup_f, std::abs(f));
      row.sup_fprime = std::max(row.sup_fprime, std::abs(fp));
      row.sup_product = std::max(row.sup_product, std::abs(prod));
      fp_min = std::min(fp_min, fp);
      fp_max = std::max(fp_max, fp);
    };
    for (std::size_t i = 0; i < nx; ++i) {
      const bool left = x_grid[i] <= z;
      const double f = left ? std::exp(lqz + lcd[i]) : std::exp(lpz + lqd[i]);
      const double h = (left ? 1.0 : 0.0) - pz;
      account(f, -psi[i] * f + h, (dpsi[i] - psi[i] * psi[i]) * f + psi[i] * h);
    }
    // One-sided limits at the jump.
    const double fz = sol.value(z);
    const double ps = law.psi(z);
    const double dps = law.psi_prime(z);
    for (double h : {1.0 - pz, -pz}) account(fz, -ps * fz + h, (dps - ps * ps) * fz + ps * h);
    row.osc_fprime = fp_max - fp_min;
    rep.per_z[zi] = row;
  });
  for (const auto& row : rep.per_z) {
    rep.d1 = std::max(rep.d1, row.sup_f);
    rep.d2 = std::max(rep.d2, row.sup_fprime);
    rep.d3 = std::max(rep.d3, row.osc_fprime);
    rep.d4 = std::max(rep.d4, row.sup_product);
  }
  std::vector<std::array<double, 3>> hsup(h_family.size(), {0.0, 0.0, 0.0});
  parallel_for(h_family.size(), workers, [&](std::size_t hi) {
    const TestFunction& h = h_family[hi];
    const double lip = h.lipschitz();
    if (lip == 0.0) return;
    const SmoothSolution sol(law, h);
    for (double x : x_grid) {
      const double f = sol.value(x);
      const double ps = law.psi(x);
      const double hx = h.value(x) - sol.expectation();
      const double f1 = -ps * f + hx;
      const double f2 = (ps * ps - law.psi_prime(x)) * f - ps * hx + h.derivative(x);
      hsup[hi][0] = std::max(hsup[hi][0], std::abs(f) / lip);
      hsup[hi][1] = std::max(hsup[hi][1], std::abs(f1) / lip);
      hsup[hi][2] = std::max(hsup[hi][2], std::abs(f2) / lip);
    }
  });
  for (std::size_t hi = 0; hi < h_family.size(); ++hi) {
    rep.h_family.push_back(h_family[hi].name());
    rep.c1 = std::max(rep.c1, hsup[hi][0]);
    rep.c2 = std::max(rep.c2, hsup[hi][1]);
    rep.c3 = std::max(rep.c3, hsup[hi][2]);
  }
  return rep;
}

Json to_json(const BoundReport& r) {
  return Json{{"d1", r.d1},
              {"d2", r.d2},
              {"d3", r.d3},
              {"d4", r.d4},
              {"c1", r.c1},
              {"c2", r.c2},
              {"c3", r.c3},
              {"grids", {{"z_points", r.z_points}, {"x_points", r.x_points}, {"x_range", r.x_range}}},
              {"h_family", r.h_family}};
}

std::string per_z_csv(const BoundReport& r) {
  std::ostringstream os;
  os << "z,sup_f,sup_fprime,osc_fprime,sup_psi_f_prime\n";
  char buf[160];
  for (const auto& row : r.per_z) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", row.z, row.sup_f,
                  row.sup_fprime, row.osc_fprime, row.sup_product);
    os << buf;
  }
  return os.str();
}

TailSandwich check_tail_sandwich(const LimitLaw& law, double x) {
  const auto canon = law.canonical();
  if (!canon) throw InvalidArgument("check_tail_sandwich: law is not of the form b exp(-a x^(2k))");
  if (!(x > 0.0)) throw InvalidArgument("check_tail_sandwich: x must be positive");
  const double k = canon->k;
  const double a = canon->a;
  const double lb = std::log(canon->b);
  const double ax = a * std::pow(x, 2.0 * k);
  const double log_lower = lb + std::log(x) - std::log(2.0 * k * ax + 2.0 * k - 1.0) - ax;
  const double log_upper =
      std::min(std::log(0.5), lb - std::log(2.0 * k * a * std::pow(x, 2.0 * k - 1.0))) - ax;
  const double log_tail = law.log_ccdf(x);
  TailSandwich s;
  s.x = x;
  s.lower = std::exp(log_lower);
  s.upper = std::exp(log_upper);
  s.tail = std::exp(log_tail);
  const double slack = 1e-12;
  s.holds = log_lower <= log_tail + slack && log_tail <= log_upper + slack;
  return s;
}

TailLimit check_tail_limit(const LimitLaw& law, double z, double x, double tolerance) {
  const auto canon = law.canonical();
  if (!canon) throw InvalidArgument("check_tail_limit: law is not of the form b exp(-a x^(2k))");
  const IndicatorSolution sol(law, z);
  TailLimit t;
  t.z = z;
  t.x = x;
  t.value = 2.0 * canon->k * canon->a * std::pow(x, 2.0 * canon->k - 1.0) * sol.value(x);
  t.target = x > 0.0 ? law.cdf(z) : law.cdf(z) - 1.0;
  t.gap = std::abs(t.value - t.target);
  t.within = t.gap <= tolerance;
  return t;
}

double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
  const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
  const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

StructureReport check_solution_structure(const LimitLaw& law, const std::vector<double>& z_grid,
                                         const std::vector<double>& x_grid) {
  StructureReport rep;
  const double step = 1e-3;
  for (double z : z_grid) {
    const IndicatorSolution sol(law, z);
    const IndicatorSolution mirror(law, -z);
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : x_grid) {
      const double f = sol.value(x);
      if (!(f > 0.0)) rep.positive = false;
      const double fp = sol.derivative(x);
      if (std::abs(x - z) > 1e-9) {
        if ((x < z && fp < -1e-12) || (x > z && fp > 1e-12)) ++rep.sign_violations;
      }
      const double g = -law.psi(x) * f;
      if (g < prev - 1e-12 * std::max(1.0, std::abs(prev))) ++rep.monotone_violations;
      prev = g;
      rep.symmetry_error = std::max(rep.symmetry_error, std::abs(f - mirror.value(-x)));
      // f varies on the scale 1/|psi| far out.
      const double h = step / std::max(1.0, std::abs(law.psi(x)));
      if (std::abs(x - z) > 4.0 * h) {
        const double num = richardson_derivative([&](double t) { return sol.value(t); }, x, h);
        rep.max_residual = std::max(rep.max_residual, std::abs(num - fp));
      }
    }
  }
  return rep;
}

}  // namespace cwstein
