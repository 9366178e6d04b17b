#include "cwstein/pair_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>

#include "cwstein/free_energy.hpp"
#include "cwstein/numerics.hpp"
#include "cwstein/philox.hpp"

namespace cwstein {

namespace {

constexpr std::uint64_t kBlocksPerStep = 256;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_chain_support(const SpinMeasure& m) {
  if (!m.is_atomic() && m.kind() != MeasureKind::uniform)
    throw InvalidArgument(
        "pair dynamics: only atomic and uniform single-spin measures are supported in chains");
}

// Tilted uniform on [-a, a] with density proportional to exp(t x): mean and
// second moment.
void tilted_uniform_moments(double a, double t, double& mean, double& second) {
  const double y = t * a;
  if (std::abs(y) < 1e-3) {
    const double y2 = y * y;
    mean = a * y * (1.0 / 3.0 - y2 / 45.0 + 2.0 * y2 * y2 / 945.0);
    second = a * a * (1.0 / 3.0 + 2.0 * y2 / 45.0 - 4.0 * y2 * y2 / 945.0);
    return;
  }
  const double coth = 1.0 / std::tanh(y);
  mean = a * (coth - 1.0 / y);
  second = a * a - 2.0 * a * a * (coth - 1.0 / y) / y;
}

double sample_tilted_uniform(double a, double t, double u) {
  const double y = t * a;
  if (std::abs(y) < 1e-12) return -a + 2.0 * a * u;
  if (y > 0.0) return a + std::log(u + (1.0 - u) * std::exp(-2.0 * y)) / t;
  return -a + std::log1p(-u + u * std::exp(2.0 * y)) / t;
}

// Atom weights of the single-site conditional; returns normalized probabilities.
void atom_conditional(const SpinMeasure& m, double beta, Model model, int n, double field,
                      std::vector<double>& prob) {
  const auto& atoms = m.atoms();
  prob.resize(atoms.size());
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const double x = atoms[a].location;
    double l = std::log(atoms[a].weight) + beta * x * field;
    if (model == Model::standard) l += beta * x * x / (2.0 * n);
    prob[a] = l;
    lmax = std::max(lmax, l);
  }
  double z = 0.0;
  for (double& p : prob) {
    p = std::exp(p - lmax);
    z += p;
  }
  for (double& p : prob) p /= z;
}

struct SiteMoments {
  double mean;
  double second;
  double lower;
  double upper;
  bool exact;
};

SiteMoments site_moments(const SpinMeasure& m, double beta, Model model, int n, double field) {
  if (m.is_atomic()) {
    thread_local std::vector<double> prob;
    atom_conditional(m, beta, model, n, field, prob);
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t a = 0; a < prob.size(); ++a) {
      const double x = m.atoms()[a].location;
      mean += prob[a] * x;
      second += prob[a] * x * x;
    }
    return {mean, second, mean, mean, true};
  }
  const double a = m.half_width();
  double mean = 0.0;
  double second = 0.0;
  tilted_uniform_moments(a, beta * field, mean, second);
  if (model == Model::hat) return {mean, second, mean, mean, true};
  const double rel = std::expm1(beta * a * a / (2.0 * n));
  const double band = std::abs(mean) * rel + rel * a;
  return {mean, second, mean - band, mean + band, false};
}

}  // namespace

std::string to_string(Model m) { return m == Model::standard ? "standard" : "hat"; }

Model model_from_string(const std::string& s) {
  if (s == "standard") return Model::standard;
  if (s == "hat") return Model::hat;
  throw InvalidArgument("model: unknown '" + s + "', allowed: standard, hat");
}

SpinConfiguration::SpinConfiguration(const SpinMeasure& measure, std::vector<double> spins,
                                     double beta, Model model, double center, double scale_exponent)
    : measure_(measure),
      spins_(std::move(spins)),
      beta_(beta),
      model_(model),
      center_(center),
      scale_exponent_(scale_exponent) {
  if (spins_.empty()) throw InvalidArgument("configuration: n must be positive");
  if (!(beta >= 0.0)) throw InvalidArgument("configuration: beta must be nonnegative");
  require_chain_support(measure);
  scale_ = std::pow(static_cast<double>(spins_.size()), scale_exponent);
  if (measure.is_atomic()) {
    const auto& atoms = measure.atoms();
    counts_.assign(atoms.size(), 0);
    atom_of_.resize(spins_.size());
    for (std::size_t i = 0; i < spins_.size(); ++i) {
      int found = -1;
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if (std::abs(atoms[a].location - spins_[i]) <= 1e-12) found = static_cast<int>(a);
      if (found < 0) throw InvalidArgument("configuration: spin outside the support of rho");
      spins_[i] = atoms[found].location;
      atom_of_[i] = found;
      ++counts_[found];
    }
  } else {
    for (double x : spins_)
      if (std::abs(x) > measure.half_width())
        throw InvalidArgument("configuration: spin outside the support of rho");
  }
  resum();
}

void SpinConfiguration::resum() {
  if (!counts_.empty()) {
    sum_ = 0.0;
    for (std::size_t a = 0; a < counts_.size(); ++a) sum_ += counts_[a] * measure_.atoms()[a].location;
    return;
  }
  long double s = 0.0L;
  for (double x : spins_) s += x;
  sum_ = static_cast<double>(s);
}

double SpinConfiguration::recompute_W() const {
  long double s = 0.0L;
  for (double x : spins_) s += x;
  return static_cast<double>((s - static_cast<long double>(n()) * center_) / scale_);
}

void SpinConfiguration::set_spin(int site, double value, int atom) {
  if (!counts_.empty()) {
    if (atom < 0) throw InvalidArgument("set_spin: atom index required for atomic measures");
    --counts_[atom_of_[site]];
    ++counts_[atom];
    atom_of_[site] = atom;
    spins_[site] = measure_.atoms()[atom].location;
    resum();
    return;
  }
  sum_ += value - spins_[site];
  spins_[site] = value;
}

SpinConfiguration random_configuration(const SpinMeasure& measure, int n, double beta, Model model,
                                       double center, double scale_exponent, std::uint64_t seed,
                                       std::uint64_t chain) {
  require_chain_support(measure);
  if (n < 1) throw InvalidArgument("random_configuration: n must be positive");
  CounterStream rng(seed, chain, std::numeric_limits<std::uint64_t>::max() / 2);
  std::vector<double> spins(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    if (measure.is_atomic()) {
      double c = 0.0;
      spins[i] = measure.atoms().back().location;
      for (const auto& a : measure.atoms()) {
        c += a.weight;
        if (u < c) {
          spins[i] = a.location;
          break;
        }
      }
    } else {
      spins[i] = measure.half_width() * (2.0 * u - 1.0);
    }
  }
  return SpinConfiguration(measure, std::move(spins), beta, model, center, scale_exponent);
}

PairStep gibbs_pair_step(SpinConfiguration& config, std::uint64_t seed, std::uint64_t chain,
                         std::uint64_t step) {
  CounterStream rng(seed, chain, step * kBlocksPerStep);
  const int n = config.n();
  const SpinMeasure& m = config.measure();
  PairStep out;
  out.w = config.W();
  const int site = static_cast<int>(std::min<double>(n - 1, std::floor(rng.uniform() * n)));
  out.site = site;
  const double old = config.spins()[site];
  const double field = (config.sum() - old) / n;
  const double beta = config.beta();
  if (m.is_atomic()) {
    thread_local std::vector<double> prob;
    atom_conditional(m, beta, config.model(), n, field, prob);
    const double u = rng.uniform();
    double c = 0.0;
    int pick = static_cast<int>(prob.size()) - 1;
    for (std::size_t a = 0; a < prob.size(); ++a) {
      c += prob[a];
      if (u < c) {
        pick = static_cast<int>(a);
        break;
      }
    }
    if (pick != config.atom_index(site)) config.set_spin(site, m.atoms()[pick].location, pick);
  } else {
    const double a = m.half_width();
    double x = 0.0;
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (rng.block() >= (step + 1) * kBlocksPerStep)
        throw NumericalFailure("gibbs_pair_step: rejection budget exhausted");
      x = sample_tilted_uniform(a, beta * field, rng.uniform());
      if (config.model() == Model::hat) break;
      // Self-interaction exp(beta x^2 / 2n) bounded by exp(beta a^2 / 2n).
      if (std::log(rng.uniform()) <= beta * (x * x - a * a) / (2.0 * n)) break;
    }
    config.set_spin(site, x);
  }
  out.w_prime = config.W();
  return out;
}

ConditionalMean conditional_mean_at(const SpinMeasure& measure, double beta, Model model, int n,
                                    double field) {
  require_chain_support(measure);
  const SiteMoments s = site_moments(measure, beta, model, n, field);
  ConditionalMean c;
  c.value = s.mean;
  c.lower = s.lower;
  c.upper = s.upper;
  c.exact = s.exact;
  c.hat_value = cgf_derivative(measure, beta * field, 1);
  return c;
}

ConditionalMean conditional_mean(const SpinConfiguration& config, int site) {
  const double field = (config.sum() - config.spins()[site]) / config.n();
  return conditional_mean_at(config.measure(), config.beta(), config.model(), config.n(), field);
}

ConditionalMoments conditional_moments(const SpinConfiguration& config) {
  const int n = config.n();
  const double scale = config.scale();
  const SpinMeasure& m = config.measure();
  double mean_sum = 0.0;
  double sq_sum = 0.0;
  double lo_sum = 0.0;
  double hi_sum = 0.0;
  bool exact = true;
  auto add = [&](double x, double weight) {
    const SiteMoments s = site_moments(m, config.beta(), config.model(), n, (config.sum() - x) / n);
    mean_sum += weight * (x - s.mean);
    lo_sum += weight * (x - s.upper);
    hi_sum += weight * (x - s.lower);
    sq_sum += weight * (x * x - 2.0 * x * s.mean + s.second);
    exact = exact && s.exact;
  };
  if (m.is_atomic()) {
    for (std::size_t a = 0; a < config.atom_counts().size(); ++a)
      if (config.atom_counts()[a] > 0) add(m.atoms()[a].location, config.atom_counts()[a]);
  } else {
    for (double x : config.spins()) add(x, 1.0);
  }
  ConditionalMoments out;
  out.mean_diff = mean_sum / (n * scale);
  out.mean_diff_lower = lo_sum / (n * scale);
  out.mean_diff_upper = hi_sum / (n * scale);
  out.square_diff = sq_sum / (n * scale * scale);
  out.exact = exact;
  return out;
}

double conditional_square(const SpinConfiguration& config) {
  return conditional_moments(config).square_diff;
}

std::string to_string(RegimeKind k) {
  switch (k) {
    case RegimeKind::clt: return "clt";
    case RegimeKind::critical: return "critical";
    case RegimeKind::window: return "window";
  }
  return "?";
}

Regime Regime::clt(const SpinMeasure& m, double beta, double alpha) {
  const ExtremalPoint p = classify_extremal(m, beta, alpha);
  if (p.type_k != 1)
    throw InvalidArgument("regime clt: the minimum at alpha = " + format_double(alpha) +
                          " has type " + std::to_string(p.type_k));
  Regime r;
  r.kind = RegimeKind::clt;
  r.k = 1;
  r.mu = p.strength_mu;
  r.beta = beta;
  r.center = alpha;
  r.sigma2 = 1.0 / p.strength_mu - 1.0 / beta;
  r.phi2 = cgf_derivative(m, beta * alpha, 2);
  r.scale_exponent = 0.5;
  return r;
}

Regime Regime::critical(const SpinMeasure& m, double beta) {
  const ExtremalPoint p = classify_extremal(m, beta, 0.0);
  if (p.type_k < 2) throw InvalidArgument("regime critical: the origin has type 1 at this beta");
  Regime r;
  r.kind = RegimeKind::critical;
  r.k = p.type_k;
  r.mu = p.strength_mu;
  r.beta = beta;
  r.scale_exponent = 1.0 - 1.0 / (2.0 * r.k);
  return r;
}

Regime Regime::window(int k, double mu_k, double gamma, double beta) {
  if (k < 2) throw InvalidArgument("regime window: k must be >= 2");
  Regime r;
  r.kind = RegimeKind::window;
  r.k = k;
  r.mu = mu_k;
  r.gamma = gamma;
  r.beta = beta;
  r.scale_exponent = 1.0 - 1.0 / (2.0 * k);
  return r;
}

Regime Regime::automatic(const SpinMeasure& m, double beta) {
  const FreeEnergyProfile prof = find_minima(m, beta);
  double alpha = 0.0;
  for (const auto& p : prof.minima)
    if (p.is_global && p.alpha >= 0.0) {
      alpha = p.alpha;
      break;
    }
  if (prof.maximal_type == 1) return clt(m, beta, alpha);
  return critical(m, beta);
}

Regime Regime::from_json(const Json& j, const SpinMeasure& m, double beta) {
  const std::string kind = j.value("kind", std::string("auto"));
  if (kind == "auto") return automatic(m, beta);
  if (kind == "clt") return clt(m, beta, j.value("center", 0.0));
  if (kind == "critical") return critical(m, beta);
  if (kind == "window")
    return window(j.at("k").get<int>(), j.at("mu").get<double>(), j.at("gamma").get<double>(), beta);
  throw InvalidArgument("regime.kind: unknown '" + kind + "', allowed: auto, clt, critical, window");
}

Json Regime::to_json() const {
  Json j{{"kind", to_string(kind)}, {"k", k}, {"mu", mu}, {"beta", beta}, {"center", center},
         {"scale_exponent", scale_exponent}};
  if (kind == RegimeKind::clt) j["sigma2"] = sigma2;
  if (kind == RegimeKind::window) j["gamma"] = gamma;
  return j;
}

double Regime::lambda(int n) const {
  switch (kind) {
    case RegimeKind::clt: return phi2 / n;
    case RegimeKind::critical: return std::pow(static_cast<double>(n), 1.0 / k - 2.0) / beta;
    case RegimeKind::window: return std::pow(static_cast<double>(n), 1.0 / k - 2.0);
  }
  return 0.0;
}

double Regime::psi(double w) const {
  switch (kind) {
    case RegimeKind::clt: return -w / sigma2;
    case RegimeKind::critical: return -mu * std::pow(w, 2 * k - 1) / factorial(2 * k - 1);
    case RegimeKind::window: return gamma * w - mu * std::pow(w, 2 * k - 1) / factorial(2 * k - 1);
  }
  return 0.0;
}

double Regime::spin_range_to_A(double spin_range, int n) const {
  return spin_range / std::pow(static_cast<double>(n), scale_exponent);
}

Decomposition decompose_regression(const SpinConfiguration& config, const Regime& regime) {
  if (std::abs(config.scale_exponent() - regime.scale_exponent) > 1e-15 ||
      std::abs(config.center() - regime.center) > 1e-15)
    throw InvalidArgument("decompose_regression: configuration scaling does not match the regime");
  Decomposition d;
  d.lambda = regime.lambda(config.n());
  d.psi_value = regime.psi(config.W());
  d.mean_diff = conditional_moments(config).mean_diff;
  d.R_value = d.mean_diff + d.lambda * d.psi_value;
  return d;
}

long long SamplerSpec::effective_burn_in() const {
  if (burn_in >= 0) return burn_in;
  const double b = 20.0 * n * std::log(std::max(2, n)) * (critical ? 10.0 : 1.0);
  return static_cast<long long>(std::ceil(b));
}

long long SamplerSpec::effective_thinning() const { return thinning > 0 ? thinning : n; }

namespace {

// Per-chain accumulator of sample means for a fixed list of statistics.
enum Stat {
  kLinear, kCubic, kSine, kIdentity, kSquareDiff, kAbsR, kR2, kQ, kQ2, kOneMinusQ, kAbsPsi,
  kW2, kW4, kW6, kW2k, kTail, kW, kWsq_first, kW_first, kWsq_second, kW_second, kStatCount
};

struct ChainResult {
  std::vector<double> sums = std::vector<double>(kStatCount, 0.0);
  std::size_t count = 0;
  std::size_t first_half = 0;
  std::vector<double> dump;
  double band = 0.0;
};

Estimate jackknife(const std::vector<ChainResult>& chains,
                   const std::function<double(const std::vector<double>&)>& functional) {
  const std::size_t c = chains.size();
  std::vector<double> total(kStatCount, 0.0);
  std::size_t count = 0;
  for (const auto& ch : chains) {
    for (int s = 0; s < kStatCount; ++s) total[s] += ch.sums[s];
    count += ch.count;
  }
  auto means_of = [&](const std::vector<double>& sums, std::size_t cnt) {
    std::vector<double> m(kStatCount);
    for (int s = 0; s < kStatCount; ++s) m[s] = sums[s] / cnt;
    return m;
  };
  Estimate e;
  e.value = functional(means_of(total, count));
  if (c < 2) return e;
  std::vector<double> loo(c);
  double mean_loo = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<double> sums = total;
    for (int s = 0; s < kStatCount; ++s) sums[s] -= chains[i].sums[s];
    loo[i] = functional(means_of(sums, count - chains[i].count));
    mean_loo += loo[i];
  }
  mean_loo /= c;
  double v = 0.0;
  for (double x : loo) v += (x - mean_loo) * (x - mean_loo);
  e.se = std::sqrt(v * (c - 1.0) / c);
  return e;
}

}  // namespace

PairStats pair_statistics(const SamplerSpec& spec, const Regime& regime, std::size_t sample_count,
                          std::uint64_t seed, int workers, std::ostream* pair_dump) {
  require_chain_support(spec.measure);
  if (spec.chains < 2) throw InvalidArgument("pair_statistics: at least two chains required");
  if (sample_count < static_cast<std::size_t>(spec.chains))
    throw InvalidArgument("pair_statistics: sample_count must be at least the chain count");
  SamplerSpec eff = spec;
  eff.center = regime.center;
  eff.scale_exponent = regime.scale_exponent;
  eff.critical = spec.critical || regime.kind != RegimeKind::clt;
  const long long burn = eff.effective_burn_in();
  const long long thin = eff.effective_thinning();
  const int n = spec.n;
  const double lambda = regime.lambda(n);
  const double spin_range = 2.0 * spec.measure.support_bound();
  const double A = regime.spin_range_to_A(spin_range, n);
  const int k2 = 2 * regime.k;

  std::vector<ChainResult> results(spec.chains);
  parallel_for(static_cast<std::size_t>(spec.chains), workers, [&](std::size_t c) {
    const std::size_t per = sample_count / spec.chains + (c < sample_count % spec.chains ? 1 : 0);
    SpinConfiguration cfg = random_configuration(spec.measure, n, spec.beta, spec.model, eff.center,
                                                 eff.scale_exponent, seed, c);
    std::uint64_t step = 0;
    for (long long b = 0; b < burn; ++b) gibbs_pair_step(cfg, seed, c, step++);
    ChainResult& res = results[c];
    res.first_half = per / 2;
    for (std::size_t s = 0; s < per; ++s) {
      for (long long t = 0; t + 1 < thin; ++t) gibbs_pair_step(cfg, seed, c, step++);
      cfg.resum();
      const ConditionalMoments cm = conditional_moments(cfg);
      const double w = cfg.W();
      const double psi = regime.psi(w);
      const double R = cm.mean_diff + lambda * psi;
      res.band = std::max(res.band, std::max(cm.mean_diff_upper - cm.mean_diff,
                                             cm.mean_diff - cm.mean_diff_lower));
      const PairStep ps = gibbs_pair_step(cfg, seed, c, step++);
      const double d = ps.w - ps.w_prime;
      if (std::abs(d) > A * (1.0 + 1e-12))
        throw NumericalFailure("pair_statistics: |W - W'| exceeded A");
      const double q = cm.square_diff;
      const double omq = 1.0 - q / (2.0 * lambda);
      auto& sum = res.sums;
      sum[kLinear] += d;
      sum[kCubic] += ps.w * ps.w * ps.w - ps.w_prime * ps.w_prime * ps.w_prime;
      sum[kSine] += std::sin(ps.w) - std::sin(ps.w_prime);
      sum[kIdentity] += d * d + 2.0 * lambda * w * psi - 2.0 * w * R;
      sum[kSquareDiff] += d * d;
      sum[kAbsR] += std::abs(R);
      sum[kR2] += R * R;
      sum[kQ] += q;
      sum[kQ2] += q * q;
      sum[kOneMinusQ] += omq * omq;
      sum[kAbsPsi] += std::abs(psi);
      const double w2 = w * w;
      sum[kW2] += w2;
      sum[kW4] += w2 * w2;
      sum[kW6] += w2 * w2 * w2;
      sum[kW2k] += std::pow(w, k2);
      sum[kTail] += std::abs(d) > A ? d * d : 0.0;
      sum[kW] += w;
      if (s < res.first_half) {
        sum[kW_first] += w;
        sum[kWsq_first] += w2;
      } else {
        sum[kW_second] += w;
        sum[kWsq_second] += w2;
      }
      if (pair_dump) {
        res.dump.push_back(ps.w);
        res.dump.push_back(ps.w_prime);
      }
      ++res.count;
    }
  });

  PairStats st;
  st.lambda = lambda;
  st.A = A;
  st.regime = regime;
  st.chains = spec.chains;
  st.burn_in = burn;
  st.thinning = thin;
  for (const auto& r : results) {
    st.samples += r.count;
    st.systematic_band = std::max(st.systematic_band, r.band);
  }
  auto mean_of = [&](Stat s) { return jackknife(results, [s](const std::vector<double>& m) { return m[s]; }); };
  st.antisym_linear = mean_of(kLinear);
  st.antisym_cubic = mean_of(kCubic);
  st.antisym_sine = mean_of(kSine);
  st.identity_residual = mean_of(kIdentity);
  st.mean_square_diff = mean_of(kSquareDiff);
  st.mean_abs_R = mean_of(kAbsR);
  st.sqrt_mean_R2 = jackknife(results, [](const std::vector<double>& m) { return std::sqrt(m[kR2]); });
  st.mean_q = mean_of(kQ);
  st.var_q = jackknife(results, [](const std::vector<double>& m) {
    return std::max(0.0, m[kQ2] - m[kQ] * m[kQ]);
  });
  st.one_minus_q_sq = mean_of(kOneMinusQ);
  st.mean_abs_psi = mean_of(kAbsPsi);
  st.w2 = mean_of(kW2);
  st.w4 = mean_of(kW4);
  st.w6 = mean_of(kW6);
  st.w2k = mean_of(kW2k);
  st.tail_term = mean_of(kTail);

  // Split R-hat on W over 2 * chains half-chains.
  {
    std::vector<double> means;
    std::vector<double> vars;
    for (const auto& r : results) {
      const std::size_t n1 = r.first_half;
      const std::size_t n2 = r.count - r.first_half;
      if (n1 < 2 || n2 < 2) continue;
      const double m1 = r.sums[kW_first] / n1;
      const double m2 = r.sums[kW_second] / n2;
      means.push_back(m1);
      vars.push_back((r.sums[kWsq_first] - n1 * m1 * m1) / (n1 - 1));
      means.push_back(m2);
      vars.push_back((r.sums[kWsq_second] - n2 * m2 * m2) / (n2 - 1));
    }
    if (means.size() >= 4) {
      double len = static_cast<double>(st.samples) / means.size();
      double gm = 0.0;
      for (double m : means) gm += m;
      gm /= means.size();
      double b = 0.0;
      for (double m : means) b += (m - gm) * (m - gm);
      b *= len / (means.size() - 1.0);
      double wv = 0.0;
      for (double v : vars) wv += v;
      wv /= vars.size();
      if (wv > 0.0) st.split_rhat = std::sqrt(((len - 1.0) / len * wv + b / len) / wv);
    }
    if (st.split_rhat > 1.1)
      st.warnings.push_back("split R-hat " + format_double(st.split_rhat) +
                            " > 1.1: chains may not be equilibrated");
  }
  if (st.systematic_band > 0.0)
    st.warnings.push_back("standard-model continuous spins: conditional means carry a systematic band");
  if (pair_dump) {
    for (const auto& r : results) {
      for (double v : r.dump) {
        unsigned char bytes[8];
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
        pair_dump->write(reinterpret_cast<const char*>(bytes), 8);
      }
    }
  }
  return st;
}

std::vector<double> sample_magnetization(const SamplerSpec& spec, std::size_t sample_count,
                                         std::uint64_t seed, int workers) {
  require_chain_support(spec.measure);
  if (spec.chains < 1) throw InvalidArgument("sample_magnetization: chains must be positive");
  const long long burn = spec.effective_burn_in();
  const long long thin = spec.effective_thinning();
  std::vector<std::vector<double>> per_chain(spec.chains);
  parallel_for(static_cast<std::size_t>(spec.chains), workers, [&](std::size_t c) {
    const std::size_t per = sample_count / spec.chains + (c < sample_count % spec.chains ? 1 : 0);
    SpinConfiguration cfg = random_configuration(spec.measure, spec.n, spec.beta, spec.model,
                                                 spec.center, spec.scale_exponent, seed, c);
    std::uint64_t step = 0;
    for (long long b = 0; b < burn; ++b) gibbs_pair_step(cfg, seed, c, step++);
    auto& out = per_chain[c];
    out.reserve(per);
    for (std::size_t s = 0; s < per; ++s) {
      for (long long t = 0; t < thin; ++t) gibbs_pair_step(cfg, seed, c, step++);
      cfg.resum();
      out.push_back(cfg.W());
    }
  });
  std::vector<double> all;
  all.reserve(sample_count);
  for (const auto& v : per_chain) all.insert(all.end(), v.begin(), v.end());
  return all;
}

namespace {
Json est(const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; }
}  // namespace

Json to_json(const PairStats& s) {
  return Json{{"lambda", s.lambda},
              {"A", s.A},
              {"regime", s.regime.to_json()},
              {"samples", s.samples},
              {"chains", s.chains},
              {"burn_in", s.burn_in},
              {"thinning", s.thinning},
              {"antisymmetry", {{"w_minus_wprime", est(s.antisym_linear)},
                                {"cubic", est(s.antisym_cubic)},
                                {"sine", est(s.antisym_sine)}}},
              {"second_moment_identity_residual", est(s.identity_residual)},
              {"mean_square_diff", est(s.mean_square_diff)},
              {"mean_abs_R", est(s.mean_abs_R)},
              {"sqrt_mean_R2", est(s.sqrt_mean_R2)},
              {"mean_q", est(s.mean_q)},
              {"var_q", est(s.var_q)},
              {"sqrt_var_q_over_2lambda",
               {{"value", std::sqrt(s.var_q.value) / (2.0 * s.lambda)}}},
              {"sqrt_mean_R2_over_lambda", {{"value", s.sqrt_mean_R2.value / s.lambda},
                                            {"se", s.sqrt_mean_R2.se / s.lambda}}},
              {"one_minus_q_over_2lambda_sq", est(s.one_minus_q_sq)},
              {"mean_abs_psi", est(s.mean_abs_psi)},
              {"moments", {{"w2", est(s.w2)}, {"w4", est(s.w4)}, {"w6", est(s.w6)}, {"w2k", est(s.w2k)}}},
              {"tail_term", est(s.tail_term)},
              {"systematic_band", s.systematic_band},
              {"split_rhat", s.split_rhat},
              {"warnings", s.warnings}};
}

BoundIngredients ingredients_from(const PairStats& s) {
  BoundIngredients in;
  in.lambda = s.lambda;
  in.A = s.A;
  in.sigma2 = s.regime.sigma2;
  in.one_minus_q_sq = s.one_minus_q_sq.value;
  in.var_q = s.var_q.value;
  in.mean_R2 = s.sqrt_mean_R2.value * s.sqrt_mean_R2.value;
  in.mean_W2 = s.w2.value;
  in.mean_abs_psi = s.mean_abs_psi.value;
  in.tail_term = s.tail_term.value;
  return in;
}

std::string to_string(BoundForm f) {
  switch (f) {
    case BoundForm::normal_fixed_variance: return "normal_fixed_variance";
    case BoundForm::normal_moment_matched: return "normal_moment_matched";
    case BoundForm::general_density: return "general_density";
    case BoundForm::general_density_moment_matched: return "general_density_moment_matched";
  }
  return "?";
}

BoundForm bound_form_from_string(const std::string& s) {
  for (BoundForm f : {BoundForm::normal_fixed_variance, BoundForm::normal_moment_matched,
                      BoundForm::general_density, BoundForm::general_density_moment_matched})
    if (to_string(f) == s) return f;
  throw InvalidArgument("bound form: unknown '" + s + "'");
}

BoundValue evaluate_bound_rhs(const BoundIngredients& in, const BoundConstants& c, BoundForm form) {
  if (!(in.A > 0.0)) throw InvalidArgument("evaluate_bound_rhs: A must be positive");
  if (!(in.lambda > 0.0)) throw InvalidArgument("evaluate_bound_rhs: lambda must be positive");
  const double l = in.lambda;
  const double A = in.A;
  const double sqR = std::sqrt(in.mean_R2);
  const double sqW = std::sqrt(in.mean_W2);
  const double r2pi = std::sqrt(2.0 * M_PI);
  BoundValue v;
  switch (form) {
    case BoundForm::normal_fixed_variance: {
      if (!(in.sigma2 > 0.0)) throw InvalidArgument("evaluate_bound_rhs: sigma2 required");
      const double s = std::sqrt(in.sigma2);
      v.terms = {std::sqrt(in.one_minus_q_sq), (s * r2pi / 4.0 + 1.5 * A) * sqR / l,
                 A * A * A / l * (r2pi * s / 16.0 + sqW / 4.0), 1.5 * A * sqW};
      break;
    }
    case BoundForm::normal_moment_matched: {
      if (!(in.sigma2 > 0.0)) throw InvalidArgument("evaluate_bound_rhs: sigma2 required");
      const double s2 = in.sigma2;
      v.terms = {s2 / (2.0 * l) * std::sqrt(in.var_q), s2 * (sqW * r2pi / 4.0 + 1.5 * A) * sqR / l,
                 s2 * A * A * A / l * (sqW * r2pi / 16.0 + sqW / 4.0), s2 * 1.5 * A * sqW,
                 s2 * sqW * sqR / l};
      break;
    }
    case BoundForm::general_density:
      v.terms = {c.d2 * std::sqrt(in.one_minus_q_sq), (c.d1 + 1.5 * A) * sqR / l,
                 c.d4 * A * A * A / (4.0 * l), 1.5 * A * in.mean_abs_psi,
                 c.d3 / (2.0 * l) * in.tail_term};
      break;
    case BoundForm::general_density_moment_matched:
      v.terms = {c.d2 / (2.0 * l) * std::sqrt(in.var_q), (c.d1 + c.d2 * sqW + 1.5 * A) * sqR / l,
                 c.d4 * A * A * A / (4.0 * l), 1.5 * A * in.mean_abs_psi,
                 c.d3 / (2.0 * l) * in.tail_term};
      break;
  }
  for (double t : v.terms) v.total += t;
  return v;
}

}  // namespace cwstein
