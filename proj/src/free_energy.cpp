#include "cwstein/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cwstein/numerics.hpp"

namespace cwstein {

namespace {

constexpr double kTypeThreshold = 1e-8;
constexpr double kTieTolerance = 1e-10;
constexpr int kGridPoints = 8192;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double G_prime(const SpinMeasure& m, double beta, double s) {
  return beta * s - beta * cgf_derivative(m, beta * s, 1);
}

double G_second(const SpinMeasure& m, double beta, double s) {
  return beta - beta * beta * cgf_derivative(m, beta * s, 2);
}

// Safeguarded Newton on a bracket with G'(lo), G'(hi) of opposite signs.
double refine_root(const SpinMeasure& m, double beta, double lo, double hi) {
  double flo = G_prime(m, beta, lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double fx = G_prime(m, beta, x);
    if (std::abs(fx) < 1e-14) return x;
    if ((fx < 0) == (flo < 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      if (std::abs(fx) < 1e-12) return x;
    }
    const double d = G_second(m, beta, x);
    double next = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) {
      if (std::abs(fx) < 1e-12) return x;
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  if (std::abs(G_prime(m, beta, x)) < 1e-12) return x;
  throw NumericalFailure("find_minima: Newton did not converge in bracket [" + format_double(lo) +
                         ", " + format_double(hi) + "]");
}

}  // namespace

double evaluate_G(const SpinMeasure& m, double beta, double s) {
  if (!(beta > 0.0)) throw InvalidArgument("evaluate_G: beta must be positive");
  return 0.5 * beta * s * s - cgf_derivative(m, beta * s, 0);
}

std::vector<double> G_derivatives(const SpinMeasure& m, double beta, double s, int max_order) {
  if (!(beta > 0.0)) throw InvalidArgument("G_derivatives: beta must be positive");
  const std::vector<double> phi = cgf_derivatives(m, beta * s, max_order);
  std::vector<double> g(phi.size());
  double bj = 1.0;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    g[j] = -bj * phi[j];
    bj *= beta;
  }
  g[0] += 0.5 * beta * s * s;
  if (g.size() > 1) g[1] += beta * s;
  if (g.size() > 2) g[2] += beta;
  return g;
}

double critical_beta(const SpinMeasure& m) {
  const double v = m.variance();
  if (!(v > 0.0)) throw InvalidArgument("critical_beta: variance must be positive");
  return 1.0 / v;
}

double default_search_half_width(const SpinMeasure& m, double beta) {
  double scale = 1.0;
  const double bound = m.support_bound();
  if (std::isfinite(bound)) {
    scale = std::max(scale, bound);
  } else {
    scale = std::max(scale, std::sqrt(m.variance()) * 8.0);
  }
  const double ratio = beta / critical_beta(m);
  if (ratio < 1.0) scale = std::max(scale, 1.0 / std::sqrt(1.0 - ratio));
  return 4.0 * scale;
}

ExtremalPoint classify_extremal(const SpinMeasure& m, double beta, double alpha) {
  const std::vector<double> g = G_derivatives(m, beta, alpha, 12);
  ExtremalPoint p;
  p.alpha = alpha;
  p.g_value = g[0];
  if (std::abs(g[1]) > 1e-10)
    throw InvalidArgument("classify_extremal: alpha = " + format_double(alpha) +
                          " is not a stationary point (G' = " + format_double(g[1]) + ")");
  for (int j = 2; j <= 12; ++j) {
    const double c = g[j] / factorial(j);
    if (std::abs(c) <= kTypeThreshold) continue;
    if (j % 2 == 1 || c < 0.0)
      throw InvalidArgument("classify_extremal: alpha = " + format_double(alpha) +
                            " is not a local minimum");
    p.type_k = j / 2;
    p.taylor_mu = g[j];
    const double phi = cgf_derivative(m, beta * alpha, j);
    p.strength_mu = (p.type_k == 1) ? beta - beta * beta * phi : -std::pow(beta, j) * phi;
    return p;
  }
  throw NumericalFailure("classify_extremal: type exceeds supported order 6");
}

FreeEnergyProfile find_minima(const SpinMeasure& m, double beta, double search_half_width) {
  if (!(beta > 0.0)) throw InvalidArgument("find_minima: beta must be positive");
  const double L = search_half_width > 0.0 ? search_half_width : default_search_half_width(m, beta);
  std::vector<double> stationary{0.0};
  const double h = L / kGridPoints;
  double prev_x = h;
  double prev_f = G_prime(m, beta, prev_x);
  if (prev_f == 0.0) stationary.push_back(prev_x);
  for (int i = 2; i <= kGridPoints; ++i) {
    const double x = i * h;
    const double f = G_prime(m, beta, x);
    if (f == 0.0) {
      stationary.push_back(x);
    } else if (prev_f != 0.0 && ((f < 0) != (prev_f < 0))) {
      stationary.push_back(refine_root(m, beta, prev_x, x));
    }
    prev_x = x;
    prev_f = f;
  }
  FreeEnergyProfile prof;
  prof.beta = beta;
  for (double a : stationary) {
    ExtremalPoint p;
    try {
      p = classify_extremal(m, beta, a);
    } catch (const InvalidArgument&) {
      continue;  // maximum or saddle
    }
    prof.minima.push_back(p);
    if (a != 0.0) {
      ExtremalPoint q = p;
      q.alpha = -a;
      prof.minima.push_back(q);
    }
  }
  if (prof.minima.empty())
    throw NumericalFailure("find_minima: no minimum found in [-" + format_double(L) + ", " +
                           format_double(L) + "]");
  std::sort(prof.minima.begin(), prof.minima.end(),
            [](const ExtremalPoint& a, const ExtremalPoint& b) { return a.alpha < b.alpha; });
  double gmin = std::numeric_limits<double>::infinity();
  for (const auto& p : prof.minima) gmin = std::min(gmin, p.g_value);
  prof.maximal_type = 1;
  for (auto& p : prof.minima) {
    p.is_global = p.g_value <= gmin + kTieTolerance;
    if (p.is_global) prof.maximal_type = std::max(prof.maximal_type, p.type_k);
  }
  return prof;
}

Json to_json(const ExtremalPoint& p) {
  return Json{{"alpha", p.alpha}, {"k", p.type_k}, {"mu", p.strength_mu},
              {"global", p.is_global}, {"g", p.g_value}};
}

Json to_json(const FreeEnergyProfile& prof) {
  Json mins = Json::array();
  for (const auto& p : prof.minima) mins.push_back(to_json(p));
  return Json{{"beta", prof.beta}, {"minima", mins}, {"k_star", prof.maximal_type}};
}

}  // namespace cwstein
