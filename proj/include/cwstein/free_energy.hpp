#pragma once

#include <vector>

#include "cwstein/spin_measures.hpp"

namespace cwstein {

struct ExtremalPoint {
  double alpha = 0.0;
  int type_k = 1;
  double strength_mu = 0.0;
  bool is_global = false;
  double g_value = 0.0;
  double taylor_mu = 0.0;  // (2k)! times the order-2k Taylor coefficient
};

struct FreeEnergyProfile {
  double beta = 0.0;
  std::vector<ExtremalPoint> minima;
  int maximal_type = 1;
};

// G(beta, s) = beta s^2 / 2 - phi(beta s).
double evaluate_G(const SpinMeasure& m, double beta, double s);

// d^j/ds^j G(beta, s) for j = 0..max_order (max_order <= 12).
std::vector<double> G_derivatives(const SpinMeasure& m, double beta, double s, int max_order);

double default_search_half_width(const SpinMeasure& m, double beta);

FreeEnergyProfile find_minima(const SpinMeasure& m, double beta, double search_half_width = 0.0);

// Throws InvalidArgument when alpha is not a local minimum.
ExtremalPoint classify_extremal(const SpinMeasure& m, double beta, double alpha);

double critical_beta(const SpinMeasure& m);

Json to_json(const ExtremalPoint& p);
Json to_json(const FreeEnergyProfile& p);

}  // namespace cwstein
