#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwstein {

// Error taxonomy. The CLI maps these to exit codes 2, 3 and 4.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, double* error_estimate = nullptr);

// 20-point Gauss-Legendre rule on [-1, 1], full (not half) node set.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre20();

// Composite Gauss-Legendre with `panels` equal panels.
double composite_gauss(const std::function<double(double)>& f, double a,
                       double b, int panels);

// Numerically stable log(sum exp(v)).
double log_sum_exp(const std::vector<double>& v);

// log(exp(a) + exp(b)).
double log_add(double a, double b);

// log(1 - exp(x)) for x <= 0.
double log1m_exp(double x);

double log_factorial(int n);
double binomial(int n, int k);

// Runs body(i) for i in [0, count) on up to `workers` threads. Results must be
// written to per-index slots by the caller so reduction order stays fixed.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body);

// Evenly spaced grid including both endpoints.
std::vector<double> linspace(double a, double b, std::size_t count);

std::string format_double(double x);

}  // namespace cwstein
