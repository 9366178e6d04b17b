#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace cwstein {

using Json = nlohmann::json;

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

// Even potential V(x) = sum_j c_j x^(2j+2) + cosh_coeff * (cosh x - 1).
struct EvenPotential {
  std::vector<double> coefficients;  // coefficients of x^2, x^4, ...
  double cosh_coeff = 0.0;

  double value(double x) const;
};

enum class MeasureKind { bernoulli, three_state, trinomial, uniform, gibbs_density, atomic };

std::string to_string(MeasureKind kind);

class SpinMeasure {
 public:
  static SpinMeasure bernoulli();
  static SpinMeasure three_state();
  static SpinMeasure trinomial(double a);
  static SpinMeasure uniform(double half_width);
  // Density proportional to exp(-V(scale * x)).
  static SpinMeasure gibbs_density(EvenPotential potential, double scale = 1.0);
  static SpinMeasure atomic(std::vector<Atom> atoms, std::string label = "atomic");

  static SpinMeasure from_json(const Json& j);
  Json to_json() const;

  MeasureKind kind() const { return kind_; }
  std::string label() const;
  bool is_atomic() const { return !atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double half_width() const { return half_width_; }
  const EvenPotential& potential() const { return potential_; }
  double scale() const { return scale_; }
  double trinomial_parameter() const { return trinomial_a_; }

  // Essential sup of |X|; +infinity for gibbs densities.
  double support_bound() const;
  double variance() const;
  double moment(int order) const;
  SpinMeasure scaled(double factor) const;

  // Tilted central moments mu_0..mu_max (mu_0 = 1, mu_1 = 0) of
  // d rho_s = e^{s x} d rho / Z(s), plus the tilted mean and log Z(s).
  struct Tilt {
    double log_mgf = 0.0;
    double mean = 0.0;
    std::vector<double> central;
  };
  Tilt tilt(double s, int max_order) const;

  // Unnormalized log density; continuous kinds only.
  double log_density_unnormalized(double x) const;

 private:
  MeasureKind kind_ = MeasureKind::bernoulli;
  std::vector<Atom> atoms_;
  double half_width_ = 0.0;
  EvenPotential potential_;
  double scale_ = 1.0;
  double trinomial_a_ = 0.0;
  double log_norm_ = 0.0;
  double base_range_ = 0.0;  // gibbs: |x| beyond which density < 1e-20 of peak
  std::string label_;

  void validate_atoms() const;
  void locate_gibbs_range();
};

// Derivatives of phi(s) = log int e^{sx} d rho; order 0..12.
double cgf_derivative(const SpinMeasure& m, double s, int order);
std::vector<double> cgf_derivatives(const SpinMeasure& m, double s, int max_order);

// Cumulants from central moments (mu_0 = 1, mu_1 = 0); kappa_1 := mean.
std::vector<double> cumulants_from_central(const std::vector<double>& central, double mean);

struct GhsReport {
  bool holds = true;
  double worst_point = 0.0;
  double worst_value = 0.0;
  double tolerance = 1e-10;
};
GhsReport check_ghs(const SpinMeasure& m, double s_max = 10.0, int grid_points = 4096);

// Rescaled to unit variance.
SpinMeasure standardize(const SpinMeasure& m);

Json to_json(const GhsReport& r);

}  // namespace cwstein
