#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwstein/spin_measures.hpp"

namespace cwstein {

enum class LawFamily { gaussian, power, critical_classic, f_gamma, mixed, moment_normalized };

struct LawDescriptor {
  LawFamily family = LawFamily::gaussian;
  double variance = 1.0;  // gaussian
  int k = 1;              // power, mixed, moment_normalized
  double mu = 1.0;        // power, mixed (mu_k)
  double beta = 1.0;      // power
  double gamma = 0.0;     // f_gamma, mixed
  double c_w = 1.0;       // mixed
  double m2k = 1.0;       // moment_normalized

  static LawDescriptor gaussian_law(double variance);
  static LawDescriptor power_law(int k, double mu, double beta);
  static LawDescriptor critical_classic_law();
  static LawDescriptor f_gamma_law(double gamma);
  static LawDescriptor mixed_law(int k, double mu_k, double gamma, double c_w);
  static LawDescriptor moment_normalized_law(int k, double m2k);

  static LawDescriptor from_json(const Json& j);
  Json to_json() const;
};

std::string to_string(LawFamily f);

// p(x) = b exp(-a x^(2k)).
struct CanonicalPower {
  int k = 1;
  double a = 0.0;
  double b = 0.0;
};

// Even density p = exp(-V) / Z with V(x) = sum_j c_j x^(2j), psi = -V'.
class LimitLaw {
 public:
  static LimitLaw build(const LawDescriptor& d);

  const LawDescriptor& descriptor() const { return desc_; }
  const std::vector<double>& coefficients() const { return coeffs_; }  // of x^2, x^4, ...

  double potential(double x) const;
  double potential_d1(double x) const;
  double potential_d2(double x) const;
  double psi(double x) const { return -potential_d1(x); }
  double psi_prime(double x) const { return -potential_d2(x); }

  double log_normalizer() const { return log_z_; }
  double normalizer() const;
  double density(double x) const;
  double log_density(double x) const;
  double cdf(double z) const;
  double ccdf(double z) const;
  double log_cdf(double z) const;
  double log_ccdf(double z) const;
  // log((1 - P(x)) / p(x)) and log(P(x) / p(x)), accurate in both tails.
  double log_ccdf_over_density(double x) const;
  double log_cdf_over_density(double x) const;

  double moment(int order) const;
  double variance() const { return moment(2); }
  // |x| beyond which p < 1e-18 * peak.
  double effective_range() const { return range_; }
  std::optional<CanonicalPower> canonical() const;

  std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

  // CSV rows "x,p,P".
  std::string table_csv(const std::vector<double>& xs) const;

 private:
  double ccdf_positive(double x) const;       // x >= 0
  double log_ccdf_positive(double x) const;   // x >= 0
  double mills(double x) const;               // int_x^inf exp(V(x) - V(t)) dt, x >= argmin

  LawDescriptor desc_;
  std::vector<double> coeffs_;
  double vmin_ = 0.0;
  double argmin_ = 0.0;
  double range_ = 0.0;
  double log_z_ = 0.0;
  double half_mass_ = 0.0;  // int_0^inf exp(-(V - vmin))
  double cell_ = 0.0;
  std::vector<double> upper_;  // upper_[i] = int_{i*cell}^inf exp(-(V - vmin))
};

// sup_z |F_a(z) - F_b(z)| on a dense grid with local refinement.
double law_kolmogorov(const LimitLaw& a, const LimitLaw& b);

}  // namespace cwstein
