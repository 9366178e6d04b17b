#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cwstein/limit_laws.hpp"
#include "cwstein/pair_dynamics.hpp"
#include "cwstein/spin_measures.hpp"

namespace cwstein {

struct ExactBudget {
  double max_compositions = 1e7;
  double max_configurations = 1e7;
  int max_sites_nonuniform = 24;
};

// Law of S_n under exp(beta S^2 / 2n + beta sum h_i x_i) prod rho(dx_i) / Z.
struct ExactLaw {
  std::vector<double> support;
  std::vector<double> probs;
  int n = 0;
  double beta = 0.0;
  std::string measure;
  std::vector<double> fields;

  std::string to_csv() const;
};

double composition_count(int n, int atoms);

// Throws BudgetExceeded when the enumeration would exceed the caps.
void check_exact_budget(const SpinMeasure& m, int n, const std::vector<double>& fields,
                        const ExactBudget& budget = {});

ExactLaw exact_law(const SpinMeasure& m, int n, double beta, const std::vector<double>& fields = {},
                   const ExactBudget& budget = {}, int workers = 1);

// sup_z |P((S - center)/scale <= z) - F(z)| over jump points, both one-sided values.
double exact_kolmogorov(const ExactLaw& law, double center, double scale, const LimitLaw& target);
double exact_kolmogorov(const ExactLaw& law, double center, double scale,
                        const std::function<double(double)>& target_cdf);
// Kolmogorov distance between two discrete laws on the rescaled axis.
double discrete_kolmogorov(const ExactLaw& a, const ExactLaw& b, double center, double scale);

double exact_moment(const ExactLaw& law, double center, double scale, int order);

struct ExactPairResult {
  BoundIngredients ingredients;
  double mean_abs_R = 0.0;
  double mean_square_diff = 0.0;  // E (W - W')^2
  double identity_rhs = 0.0;      // -2 lambda E[W psi] + 2 E[W R]
  double mean_q = 0.0;
  double mean_W4 = 0.0;
};

// Exact expectation of every bound ingredient under the standard model; the
// conditional quantities are averaged given W (type classes grouped by S).
ExactPairResult exact_pair_ingredients(const SpinMeasure& m, int n, double beta, const Regime& regime,
                                       const ExactBudget& budget = {});

struct UrsellReport {
  std::array<int, 4> sites{};
  int n = 0;
  double beta = 0.0;
  std::vector<double> fields;
  double ursell = 0.0;
  // d^3 log Z / dh_i dh_j dh_k for the first three sites: exact cumulant and a
  // Richardson finite-difference cross-check of beta E[X_i].
  double ghs2_exact = 0.0;
  double ghs2_fd = 0.0;
};

UrsellReport ursell_check(const SpinMeasure& m, int n, double beta, std::array<int, 4> sites,
                          const std::vector<double>& fields = {}, double fd_step = 1e-3,
                          const ExactBudget& budget = {});

struct Ghs2Search {
  bool found_positive = false;
  double max_value = 0.0;
  int n = 0;
  double beta = 0.0;
  double field = 0.0;
  std::array<int, 3> sites{};
  std::size_t evaluated = 0;
};

Ghs2Search ghs2_search(const SpinMeasure& m, int n_max, const std::vector<double>& betas,
                       const std::vector<double>& field_grid);

struct HubbardReport {
  double sup_discrepancy = 0.0;
  double mixture_mass = 0.0;
  double density_mass = 0.0;
  std::size_t grid_points = 0;
  double grid_half_width = 0.0;
};

HubbardReport hubbard_density_check(const SpinMeasure& m, int n, double beta, double mcenter,
                                    double gamma_exp, std::size_t grid_points = 2001);

// Writes root/<measure>/<beta>/<n>.csv under an exclusive lock via temp + rename.
std::string write_fixture(const std::string& root, const ExactLaw& law);
ExactLaw read_law_csv(const std::string& path);

Json to_json(const UrsellReport& r);
Json to_json(const Ghs2Search& r);
Json to_json(const HubbardReport& r);

}  // namespace cwstein
