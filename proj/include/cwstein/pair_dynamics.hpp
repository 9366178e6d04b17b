#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwstein/spin_measures.hpp"

namespace cwstein {

// standard: exp(beta S^2 / 2n); hat: self-interaction x_i^2 removed from the
// single-site conditional.
enum class Model { standard, hat };

std::string to_string(Model m);
Model model_from_string(const std::string& s);

class SpinConfiguration {
 public:
  SpinConfiguration(const SpinMeasure& measure, std::vector<double> spins, double beta, Model model,
                    double center, double scale_exponent);

  int n() const { return static_cast<int>(spins_.size()); }
  double beta() const { return beta_; }
  Model model() const { return model_; }
  const SpinMeasure& measure() const { return measure_; }
  double center() const { return center_; }
  double scale_exponent() const { return scale_exponent_; }
  double scale() const { return scale_; }

  const std::vector<double>& spins() const { return spins_; }
  double sum() const { return sum_; }
  double W() const { return (sum_ - n() * center_) / scale_; }
  double recompute_W() const;

  // Atomic measures: site atom index and atom occupation counts.
  const std::vector<int>& atom_counts() const { return counts_; }
  int atom_index(int site) const { return atom_of_[site]; }

  void set_spin(int site, double value, int atom = -1);
  void resum();

 private:
  SpinMeasure measure_;
  std::vector<double> spins_;
  std::vector<int> atom_of_;
  std::vector<int> counts_;
  double beta_;
  Model model_;
  double center_;
  double scale_exponent_;
  double scale_;
  double sum_ = 0.0;
};

// Independent draw from rho^n.
SpinConfiguration random_configuration(const SpinMeasure& measure, int n, double beta, Model model,
                                       double center, double scale_exponent, std::uint64_t seed,
                                       std::uint64_t chain);

struct PairStep {
  double w = 0.0;
  double w_prime = 0.0;
  int site = 0;
};

// One Gibbs update; randomness keyed by (seed, chain, step). Mutates config.
PairStep gibbs_pair_step(SpinConfiguration& config, std::uint64_t seed, std::uint64_t chain,
                         std::uint64_t step);

struct ConditionalMean {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;
  double hat_value = 0.0;  // phi'(beta m_i) = m_i - G'(beta, m_i) / beta
};

// E[X_i' | F].
ConditionalMean conditional_mean(const SpinConfiguration& config, int site);
// Same quantity as a function of the site field m_i and the site's own spin.
ConditionalMean conditional_mean_at(const SpinMeasure& measure, double beta, Model model, int n,
                                    double field);

struct ConditionalMoments {
  double mean_diff = 0.0;    // E[W - W' | F]
  double square_diff = 0.0;  // E[(W - W')^2 | F]
  double mean_diff_lower = 0.0;
  double mean_diff_upper = 0.0;
  bool exact = true;
};
ConditionalMoments conditional_moments(const SpinConfiguration& config);
double conditional_square(const SpinConfiguration& config);

enum class RegimeKind { clt, critical, window };

std::string to_string(RegimeKind k);

// Fixes lambda, psi and the scaling W = (S - n alpha) / n^exponent.
struct Regime {
  RegimeKind kind = RegimeKind::clt;
  int k = 1;
  double mu = 0.0;
  double sigma2 = 0.0;  // clt
  double gamma = 0.0;   // window
  double beta = 1.0;
  double center = 0.0;
  double scale_exponent = 0.5;
  double phi2 = 1.0;  // phi''(beta alpha), clt

  static Regime clt(const SpinMeasure& m, double beta, double alpha = 0.0);
  static Regime critical(const SpinMeasure& m, double beta);
  static Regime window(int k, double mu_k, double gamma, double beta);
  static Regime automatic(const SpinMeasure& m, double beta);
  static Regime from_json(const Json& j, const SpinMeasure& m, double beta);
  Json to_json() const;

  double lambda(int n) const;
  double psi(double w) const;
  double spin_range_to_A(double spin_range, int n) const;
};

struct Decomposition {
  double lambda = 0.0;
  double psi_value = 0.0;
  double R_value = 0.0;
  double mean_diff = 0.0;  // E[W - W' | F] = -lambda psi(W) + R
};

Decomposition decompose_regression(const SpinConfiguration& config, const Regime& regime);

struct SamplerSpec {
  SpinMeasure measure = SpinMeasure::bernoulli();
  int n = 64;
  double beta = 0.5;
  Model model = Model::standard;
  int chains = 32;
  long long burn_in = -1;   // -1: 20 n log n, times 10 when critical
  long long thinning = -1;  // -1: n
  bool critical = false;
  double center = 0.0;
  double scale_exponent = 0.5;

  long long effective_burn_in() const;
  long long effective_thinning() const;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

struct PairStats {
  double lambda = 0.0;
  double A = 0.0;
  Regime regime;
  std::size_t samples = 0;
  int chains = 0;
  long long burn_in = 0;
  long long thinning = 0;

  Estimate antisym_linear;   // E[W - W']
  Estimate antisym_cubic;    // E[W^3 - W'^3]
  Estimate antisym_sine;     // E[sin W - sin W']
  Estimate identity_residual;  // E[(W-W')^2 + 2 lambda W psi - 2 W R]
  Estimate mean_square_diff;   // E[(W-W')^2]
  Estimate mean_abs_R;
  Estimate sqrt_mean_R2;
  Estimate mean_q;             // E[E[(W-W')^2|F]]
  Estimate var_q;              // Var(E[(W-W')^2|F])
  Estimate one_minus_q_sq;     // E(1 - q / 2 lambda)^2
  Estimate mean_abs_psi;
  Estimate w2, w4, w6, w2k;
  Estimate tail_term;          // E[(W-W')^2 1{|W-W'| > A}]
  double systematic_band = 0.0;  // standard-model continuous spins
  double split_rhat = 1.0;
  std::vector<std::string> warnings;
};

PairStats pair_statistics(const SamplerSpec& spec, const Regime& regime, std::size_t sample_count,
                          std::uint64_t seed, int workers = 1, std::ostream* pair_dump = nullptr);

// Thinned draws of W = (S - n center) / n^exponent from `chains` chains.
std::vector<double> sample_magnetization(const SamplerSpec& spec, std::size_t sample_count,
                                         std::uint64_t seed, int workers = 1);

Json to_json(const PairStats& s);

// Ingredients of the four bound forms.
struct BoundIngredients {
  double lambda = 0.0;
  double A = 0.0;
  double sigma2 = 0.0;          // normal forms
  double one_minus_q_sq = 0.0;  // E(1 - E[(W-W')^2|W] / 2 lambda)^2
  double var_q = 0.0;           // Var(E[(W-W')^2|W])
  double mean_R2 = 0.0;         // E R^2
  double mean_W2 = 0.0;
  double mean_abs_psi = 0.0;
  double tail_term = 0.0;       // E[(W-W')^2 1{|W-W'| > A}]
};

BoundIngredients ingredients_from(const PairStats& s);

enum class BoundForm { normal_fixed_variance, normal_moment_matched, general_density, general_density_moment_matched };

std::string to_string(BoundForm f);
BoundForm bound_form_from_string(const std::string& s);

struct BoundConstants {
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
};

struct BoundValue {
  double total = 0.0;
  std::vector<double> terms;
};

BoundValue evaluate_bound_rhs(const BoundIngredients& in, const BoundConstants& c, BoundForm form);

}  // namespace cwstein
