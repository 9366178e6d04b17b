#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cwstein/exact_oracle.hpp"
#include "cwstein/limit_laws.hpp"
#include "cwstein/pair_dynamics.hpp"
#include "cwstein/spin_measures.hpp"

namespace cwstein {

// beta_n = 1 + sign * gamma * n^{-exponent}
struct BetaSequence {
  int sign = 1;
  double exponent = 0.5;
  double gamma = 1.0;

  double at(int n) const;
  static BetaSequence from_json(const Json& j);
  Json to_json() const;
};

enum class RegimeTagKind { critical_window, sub_window, clt_window, clt_with_rate, critical_rate };

std::string to_string(RegimeTagKind k);

struct RegimeTag {
  RegimeTagKind kind = RegimeTagKind::critical_rate;
  double gamma = 0.0;  // signed, critical_window only
  int k = 2;
  double window_exponent = 0.5;  // 1 - 1/k
  double rate_exponent = 0.25;   // 1/2 - 1/(2k)
};

RegimeTag classify_beta_regime(const BetaSequence& seq, int k);
Json to_json(const RegimeTag& t);

struct McDistance {
  double distance = 0.0;
  double band = 0.0;  // 99% DKW half-width
  bool usable = true;
  std::size_t count = 0;
};

double dkw_band(std::size_t count, double alpha = 0.01);

McDistance sample_kolmogorov(std::vector<double> samples, const LimitLaw& target);
McDistance mc_kolmogorov(const SamplerSpec& spec, const LimitLaw& target, std::size_t sample_count,
                         std::uint64_t seed, int workers = 1);

// W1 = int |F_n - F|; the discrete law is given by atoms in the W scale.
double wasserstein_distance(const ExactLaw& law, double center, double scale, const LimitLaw& target);
double wasserstein_distance(std::vector<double> samples, const LimitLaw& target);

struct RatePoint {
  int n = 0;
  double distance = 0.0;
  double se = 0.0;
  std::string method = "exact";
  double band = 0.0;
  bool usable = true;
  double beta = 0.0;
  Json target;
};

struct RateFit {
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t used = 0;
};

// OLS of ln d on ln n over usable points.
RateFit fit_rate(std::vector<RatePoint> points);

enum class TargetMode { automatic, moment_normalized, fixed };

struct RateSpec {
  SpinMeasure measure = SpinMeasure::bernoulli();
  double beta = 0.5;
  std::optional<BetaSequence> beta_seq;
  std::optional<double> center;
  std::vector<int> n_grid;
  TargetMode target_mode = TargetMode::automatic;
  std::optional<LawDescriptor> target;
  std::string method = "auto";       // exact | mc | auto
  std::string metric = "kolmogorov";  // kolmogorov | wasserstein
  std::size_t mc_samples = 100000;
  int chains = 32;
  std::uint64_t seed = 1;
  ExactBudget budget;

  static RateSpec from_json(const Json& j);
  Json to_json() const;
};

struct RateResult {
  RateFit fit;
  std::string regime;
  Json regime_detail;
};

RateResult run_rate_experiment(const RateSpec& spec, int workers = 1);

std::string rate_csv(const RateFit& fit);
std::string rate_svg(const RateFit& fit, const std::string& title);
Json to_json(const RateResult& r);

}  // namespace cwstein
