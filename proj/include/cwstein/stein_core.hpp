#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cwstein/limit_laws.hpp"

namespace cwstein {

// f_z solving f' + psi f = 1{x <= z} - P(z).
class IndicatorSolution {
 public:
  IndicatorSolution(const LimitLaw& law, double z);

  double z() const { return z_; }
  double value(double x) const;
  // Left limit at x = z (the indicator is taken as 1{x <= z}).
  double derivative(double x) const;
  double derivative_right_of_z() const;
  // (psi f)' = (psi' - psi^2) f + psi (1{x <= z} - P(z)).
  double product_derivative(double x) const;

 private:
  const LimitLaw* law_;
  double z_;
  double pz_;
  double log_pz_;
  double log_qz_;
};

double solve_indicator(const LimitLaw& law, double z, double x);

enum class TestKind { sine, hyperbolic_tangent, clamped_linear, constant, identity };

struct TestFunction {
  TestKind kind = TestKind::sine;
  double omega = 1.0;

  double value(double x) const;
  double derivative(double x) const;
  double lipschitz() const;
  std::string name() const;
  static TestFunction from_json(const Json& j);
};

std::vector<TestFunction> default_h_family();

// f_h solving f' + psi f = h - Ph.
class SmoothSolution {
 public:
  SmoothSolution(const LimitLaw& law, TestFunction h);

  double expectation() const { return ph_; }
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

 private:
  double g(double t) const;  // (h(t) - Ph) exp(-V(t))
  double tail_right(double x) const;  // int_x^inf g, x >= 0
  double tail_left(double x) const;   // int_-inf^x g, x <= 0

  const LimitLaw* law_;
  TestFunction h_;
  double ph_ = 0.0;
  double range_ = 0.0;
  double cell_ = 0.0;
  std::vector<double> right_;  // right_[i] = int_{i cell}^inf g
  std::vector<double> left_;   // left_[i] = int_-inf^{-i cell} g
};

double solve_smooth(const LimitLaw& law, const TestFunction& h, double x);

struct PerZSup {
  double z = 0.0;
  double sup_f = 0.0;
  double sup_fprime = 0.0;
  double osc_fprime = 0.0;
  double sup_product = 0.0;
};

struct BoundReport {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  std::size_t z_points = 0;
  std::size_t x_points = 0;
  double x_range = 0.0;
  std::vector<std::string> h_family;
  std::vector<PerZSup> per_z;
};

std::vector<double> default_z_grid(const LimitLaw& law, std::size_t count = 512);
std::vector<double> default_x_grid(const LimitLaw& law, std::size_t count = 4096);

BoundReport estimate_bound_constants(const LimitLaw& law, const std::vector<double>& z_grid,
                                     const std::vector<double>& x_grid,
                                     const std::vector<TestFunction>& h_family, int workers = 1);

Json to_json(const BoundReport& r);
std::string per_z_csv(const BoundReport& r);

struct TailSandwich {
  double x = 0.0;
  double lower = 0.0;
  double tail = 0.0;
  double upper = 0.0;
  bool holds = false;
};

// Canonical single-power laws only.
TailSandwich check_tail_sandwich(const LimitLaw& law, double x);

struct TailLimit {
  double z = 0.0;
  double x = 0.0;
  double value = 0.0;   // 2k a x^(2k-1) f_z(x)
  double target = 0.0;  // P(z) or P(z) - 1
  double gap = 0.0;
  bool within = false;
};

TailLimit check_tail_limit(const LimitLaw& law, double z, double x, double tolerance = 1e-4);

struct StructureReport {
  bool positive = true;            // f_z > 0
  std::size_t sign_violations = 0;  // f_z' sign structure
  std::size_t monotone_violations = 0;  // -psi f_z nondecreasing
  double max_residual = 0.0;       // |numeric f_z' - identity f_z'|
  double symmetry_error = 0.0;     // |f_z(x) - f_{-z}(-x)|
};

StructureReport check_solution_structure(const LimitLaw& law, const std::vector<double>& z_grid,
                                         const std::vector<double>& x_grid);

// Richardson-extrapolated central difference.
double richardson_derivative(const std::function<double(double)>& f, double x, double h);

}  // namespace cwstein
