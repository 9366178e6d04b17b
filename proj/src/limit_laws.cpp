#include "cwstein/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "cwstein/numerics.hpp"
#include "cwstein/philox.hpp"

namespace cwstein {

namespace {

constexpr double kTailCutoff = 41.45;  // ln(1e18)
constexpr int kCells = 4096;
constexpr std::size_t kSampleBlock = 4096;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("limit law: " + what);
}

}  // namespace

LawDescriptor LawDescriptor::gaussian_law(double variance) {
  LawDescriptor d;
  d.family = LawFamily::gaussian;
  d.variance = variance;
  return d;
}
LawDescriptor LawDescriptor::power_law(int k, double mu, double beta) {
  LawDescriptor d;
  d.family = LawFamily::power;
  d.k = k;
  d.mu = mu;
  d.beta = beta;
  return d;
}
LawDescriptor LawDescriptor::critical_classic_law() {
  LawDescriptor d;
  d.family = LawFamily::critical_classic;
  d.k = 2;
  return d;
}
LawDescriptor LawDescriptor::f_gamma_law(double gamma) {
  LawDescriptor d;
  d.family = LawFamily::f_gamma;
  d.k = 2;
  d.gamma = gamma;
  return d;
}
LawDescriptor LawDescriptor::mixed_law(int k, double mu_k, double gamma, double c_w) {
  LawDescriptor d;
  d.family = LawFamily::mixed;
  d.k = k;
  d.mu = mu_k;
  d.gamma = gamma;
  d.c_w = c_w;
  return d;
}
LawDescriptor LawDescriptor::moment_normalized_law(int k, double m2k) {
  LawDescriptor d;
  d.family = LawFamily::moment_normalized;
  d.k = k;
  d.m2k = m2k;
  return d;
}

std::string to_string(LawFamily f) {
  switch (f) {
    case LawFamily::gaussian: return "gaussian";
    case LawFamily::power: return "power";
    case LawFamily::critical_classic: return "critical_classic";
    case LawFamily::f_gamma: return "f_gamma";
    case LawFamily::mixed: return "mixed";
    case LawFamily::moment_normalized: return "moment_normalized";
  }
  return "unknown";
}

LawDescriptor LawDescriptor::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw InvalidArgument("law: object with string field 'family' required");
  const std::string f = j["family"].get<std::string>();
  auto num = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw InvalidArgument("law." + std::string(key) + ": number required for family " + f);
    return j[key].get<double>();
  };
  auto integer = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer())
      throw InvalidArgument("law." + std::string(key) + ": integer required for family " + f);
    return j[key].get<int>();
  };
  if (f == "gaussian") return gaussian_law(num("variance"));
  if (f == "power") return power_law(integer("k"), num("mu"), j.value("beta", 1.0));
  if (f == "critical_classic") return critical_classic_law();
  if (f == "f_gamma") return f_gamma_law(num("gamma"));
  if (f == "mixed") return mixed_law(integer("k"), num("mu"), num("gamma"), num("c_w"));
  if (f == "moment_normalized") return moment_normalized_law(integer("k"), num("m2k"));
  throw InvalidArgument("law.family: unknown family '" + f +
                        "', allowed: gaussian, power, critical_classic, f_gamma, mixed, "
                        "moment_normalized");
}

Json LawDescriptor::to_json() const {
  Json j{{"family", to_string(family)}};
  switch (family) {
    case LawFamily::gaussian: j["variance"] = variance; break;
    case LawFamily::power: j["k"] = k; j["mu"] = mu; j["beta"] = beta; break;
    case LawFamily::critical_classic: break;
    case LawFamily::f_gamma: j["gamma"] = gamma; break;
    case LawFamily::mixed: j["k"] = k; j["mu"] = mu; j["gamma"] = gamma; j["c_w"] = c_w; break;
    case LawFamily::moment_normalized: j["k"] = k; j["m2k"] = m2k; break;
  }
  return j;
}

LimitLaw LimitLaw::build(const LawDescriptor& d) {
  LimitLaw law;
  law.desc_ = d;
  auto set_power = [&](int k, double c) {
    if (static_cast<int>(law.coeffs_.size()) < k) law.coeffs_.resize(k, 0.0);
    law.coeffs_[k - 1] += c;
  };
  switch (d.family) {
    case LawFamily::gaussian:
      require(d.variance > 0.0 && std::isfinite(d.variance), "gaussian variance must be positive");
      set_power(1, 0.5 / d.variance);
      break;
    case LawFamily::power:
      require(d.k >= 1 && d.k <= 6, "power: k must lie in 1..6");
      require(d.mu > 0.0, "power: mu must be positive");
      if (d.k == 1) {
        require(d.beta > d.mu, "power: k = 1 needs mu < beta so that 1/mu - 1/beta > 0");
        set_power(1, 0.5 / (1.0 / d.mu - 1.0 / d.beta));
      } else {
        set_power(d.k, d.mu / factorial(2 * d.k));
      }
      break;
    case LawFamily::critical_classic:
      set_power(2, 1.0 / 12.0);
      break;
    case LawFamily::f_gamma:
      require(std::isfinite(d.gamma), "f_gamma: gamma must be finite");
      set_power(2, 1.0 / 12.0);
      set_power(1, -0.5 * d.gamma);
      break;
    case LawFamily::mixed:
      require(d.k >= 2 && d.k <= 6, "mixed: k must lie in 2..6");
      require(d.mu > 0.0 && d.c_w > 0.0, "mixed: mu_k and c_W must be positive");
      set_power(d.k, d.mu / factorial(2 * d.k) / d.c_w);
      set_power(1, -0.5 * d.gamma / d.c_w);
      break;
    case LawFamily::moment_normalized:
      require(d.k >= 1 && d.k <= 6, "moment_normalized: k must lie in 1..6");
      require(d.m2k > 0.0, "moment_normalized: m2k must be positive");
      set_power(d.k, 1.0 / (2.0 * d.k * d.m2k));
      break;
  }
  require(law.coeffs_.back() > 0.0, "non-integrable parameter combination");

  // Minimum of V on [0, inf): V' has at most one positive root for these families.
  double lo = 0.0;
  double hi = 1.0;
  while (law.potential_d1(hi) <= 0.0) hi *= 2.0;
  if (law.potential_d1(1e-300) < 0.0 || law.potential_d2(0.0) < 0.0) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (law.potential_d1(mid) < 0.0 ? lo : hi) = mid;
    }
    law.argmin_ = 0.5 * (lo + hi);
  }
  law.vmin_ = std::min(0.0, law.potential(law.argmin_));

  // Effective range.
  double r = std::max(1.0, law.argmin_);
  while (law.potential(r) - law.vmin_ < kTailCutoff) r *= 1.5;
  lo = law.argmin_;
  hi = r;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (law.potential(mid) - law.vmin_ < kTailCutoff ? lo : hi) = mid;
  }
  law.range_ = hi;

  // Upper-tail table accumulated from the right.
  law.cell_ = law.range_ / kCells;
  law.upper_.assign(kCells + 1, 0.0);
  const double tail_end = law.mills(law.range_) * std::exp(-(law.potential(law.range_) - law.vmin_));
  law.upper_[kCells] = tail_end;
  const auto& rule = gauss_legendre20();
  for (int i = kCells - 1; i >= 0; --i) {
    const double mid = (i + 0.5) * law.cell_;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      s += rule.weights[q] * std::exp(-(law.potential(mid + 0.5 * law.cell_ * rule.nodes[q]) - law.vmin_));
    law.upper_[i] = law.upper_[i + 1] + 0.5 * law.cell_ * s;
  }
  law.half_mass_ = law.upper_[0];
  law.log_z_ = std::log(2.0 * law.half_mass_) - law.vmin_;
  if (d.family == LawFamily::gaussian) law.log_z_ = 0.5 * std::log(2.0 * M_PI * d.variance);
  return law;
}

double LimitLaw::potential(double x) const {
  const double x2 = x * x;
  double p = x2;
  double v = 0.0;
  for (double c : coeffs_) {
    v += c * p;
    p *= x2;
  }
  return v;
}

double LimitLaw::potential_d1(double x) const {
  const double x2 = x * x;
  double p = x;  // x^(2j-1)
  double v = 0.0;
  for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
    v += 2.0 * j * coeffs_[j - 1] * p;
    p *= x2;
  }
  return v;
}

double LimitLaw::potential_d2(double x) const {
  const double x2 = x * x;
  double p = 1.0;  // x^(2j-2)
  double v = 0.0;
  for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
    v += 2.0 * j * (2.0 * j - 1.0) * coeffs_[j - 1] * p;
    p *= x2;
  }
  return v;
}

double LimitLaw::normalizer() const { return std::exp(log_z_); }

double LimitLaw::log_density(double x) const { return -potential(x) - log_z_; }
double LimitLaw::density(double x) const { return std::exp(log_density(x)); }

double LimitLaw::mills(double x) const {
  // V(x + u) - V(x) = u sum_j c_j sum_i (x + u)^i x^(2j-1-i), free of cancellation for x, u >= 0.
  auto f = [&](double u) {
    const double y = x + u;
    double inc = 0.0;
    for (std::size_t j = 1; j <= coeffs_.size(); ++j) {
      double s = 0.0;
      double yp = 1.0;
      for (std::size_t i = 0; i < 2 * j; ++i) {
        s += yp * std::pow(x, static_cast<double>(2 * j - 1 - i));
        yp *= y;
      }
      inc += coeffs_[j - 1] * s;
    }
    return std::exp(-u * inc);
  };
  // Convex beyond the range, so V(x + u) - V(x) >= V'(x) u and the cut costs < e^-50.
  const double slope = potential_d1(x);
  if (x >= range_ && slope > 0.0) return integrate(f, 0.0, 50.0 / slope, 1e-13);
  return integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

double LimitLaw::ccdf_positive(double x) const {
  const double total = 2.0 * half_mass_;
  if (x >= range_) {
    if (potential(x) - vmin_ > 800.0) return 0.0;
    return std::exp(log_ccdf_positive(x));
  }
  const int i = std::min(kCells - 1, static_cast<int>(x / cell_));
  const double right = (i + 1) * cell_;
  const auto& rule = gauss_legendre20();
  const double mid = 0.5 * (x + right);
  const double half = 0.5 * (right - x);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q)
    s += rule.weights[q] * std::exp(-(potential(mid + half * rule.nodes[q]) - vmin_));
  return (upper_[i + 1] + half * s) / total;
}

double LimitLaw::log_ccdf_positive(double x) const {
  if (x >= range_) {
    return std::log(mills(x)) - (potential(x) - vmin_) - std::log(2.0 * half_mass_);
  }
  return std::log(ccdf_positive(x));
}

double LimitLaw::ccdf(double z) const {
  if (z >= 0.0) return ccdf_positive(z);
  return 1.0 - ccdf_positive(-z);
}

double LimitLaw::cdf(double z) const {
  if (z >= 0.0) return 1.0 - ccdf_positive(z);
  return ccdf_positive(-z);
}

double LimitLaw::log_ccdf(double z) const {
  if (z >= 0.0) return log_ccdf_positive(z);
  return std::log1p(-ccdf_positive(-z));
}

double LimitLaw::log_cdf(double z) const { return log_ccdf(-z); }

double LimitLaw::log_ccdf_over_density(double x) const {
  if (x >= range_) return std::log(mills(x));
  // Same unnormalized scale on both sides, so the normalizer cancels.
  return log_ccdf(x) - log_density(x);
}

double LimitLaw::log_cdf_over_density(double x) const { return log_ccdf_over_density(-x); }

double LimitLaw::moment(int order) const {
  if (order < 0) throw InvalidArgument("moment: order must be nonnegative");
  if (order % 2 == 1) return 0.0;
  const auto& rule = gauss_legendre20();
  double s = 0.0;
  for (int i = 0; i < kCells; ++i) {
    const double mid = (i + 0.5) * cell_;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double x = mid + 0.5 * cell_ * rule.nodes[q];
      s += rule.weights[q] * std::pow(x, order) * std::exp(-(potential(x) - vmin_));
    }
  }
  s *= 0.5 * cell_;
  // Tail beyond the range, relative size below 1e-18.
  const double tail = integrate(
      [&](double u) {
        const double x = range_ + u;
        return std::pow(x, order) * std::exp(-(potential(x) - vmin_));
      },
      0.0, std::numeric_limits<double>::infinity(), 1e-10);
  return (s + tail) / half_mass_;
}

std::optional<CanonicalPower> LimitLaw::canonical() const {
  int nonzero = 0;
  int k = 0;
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (coeffs_[j] != 0.0) {
      ++nonzero;
      k = static_cast<int>(j) + 1;
    }
  }
  if (nonzero != 1) return std::nullopt;
  return CanonicalPower{k, coeffs_[k - 1], std::exp(-log_z_)};
}

std::vector<double> LimitLaw::sample(std::size_t count, std::uint64_t seed) const {
  if (count < 1) throw InvalidArgument("law_sample: count must be >= 1");
  std::vector<double> out(count);
  if (desc_.family == LawFamily::gaussian) {
    const double sd = std::sqrt(desc_.variance);
    for (std::size_t b = 0; b * kSampleBlock < count; ++b) {
      CounterStream rng(seed, b);
      for (std::size_t i = b * kSampleBlock; i < std::min(count, (b + 1) * kSampleBlock); ++i)
        out[i] = sd * rng.normal();
    }
    return out;
  }
  // Envelope N(0, s^2); log ratio L(x) = -V(x) + x^2/(2 s^2), up to constants.
  const double sd = std::sqrt(variance());
  const double xmax = 3.0 * range_ + 30.0 * sd;
  const int grid = 20000;
  double best_c = 1.0;
  double best_logm = std::numeric_limits<double>::infinity();
  double best_scale = sd;
  for (int ci = 0; ci <= 40; ++ci) {
    const double c = 1.0 + 2.0 * ci / 40.0;
    const double s = c * sd;
    double lmax = -std::numeric_limits<double>::infinity();
    for (int g = 0; g <= grid; ++g) {
      const double x = xmax * g / grid;
      lmax = std::max(lmax, -potential(x) + 0.5 * x * x / (s * s));
    }
    if (!(potential_d1(xmax) > xmax / (s * s))) continue;  // envelope tails too light
    // log M relative to the target, including the normalizers.
    const double logm = lmax - log_z_ + std::log(s * std::sqrt(2.0 * M_PI));
    if (logm < best_logm) {
      best_logm = logm;
      best_c = c;
      best_scale = s;
    }
  }
  if (!std::isfinite(best_logm))
    throw NumericalFailure("law_sample: envelope construction failed");
  (void)best_c;
  // Curvature margin for the grid maximum.
  const double h = xmax / grid;
  double curv = 1.0 / (best_scale * best_scale);
  for (int g = 0; g <= grid; g += 100) curv = std::max(curv, std::abs(potential_d2(xmax * g / grid)));
  const double logm = best_logm + h * h / 8.0 * curv;
  const double inv_s2 = 1.0 / (best_scale * best_scale);
  const double lconst = -log_z_ + std::log(best_scale * std::sqrt(2.0 * M_PI));
  for (std::size_t b = 0; b * kSampleBlock < count; ++b) {
    CounterStream rng(seed, b);
    for (std::size_t i = b * kSampleBlock; i < std::min(count, (b + 1) * kSampleBlock); ++i) {
      for (;;) {
        const double x = best_scale * rng.normal();
        const double lr = -potential(x) + 0.5 * x * x * inv_s2 + lconst;
        if (lr > logm + 1e-12)
          throw NumericalFailure("law_sample: envelope violated at x = " + format_double(x));
        if (std::log(rng.uniform()) < lr - logm) {
          out[i] = x;
          break;
        }
      }
    }
  }
  return out;
}

std::string LimitLaw::table_csv(const std::vector<double>& xs) const {
  std::ostringstream os;
  os << "x,p,P\n";
  char buf[128];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x, density(x), cdf(x));
    os << buf;
  }
  return os.str();
}

double law_kolmogorov(const LimitLaw& a, const LimitLaw& b) {
  const double r = std::max(a.effective_range(), b.effective_range());
  const int grid = 20000;
  double best = 0.0;
  double best_x = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double x = -r + 2.0 * r * i / grid;
    const double d = std::abs(a.cdf(x) - b.cdf(x));
    if (d > best) {
      best = d;
      best_x = x;
    }
  }
  // Golden-section refinement around the grid maximum.
  double lo = best_x - 2.0 * r / grid;
  double hi = best_x + 2.0 * r / grid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double x) { return std::abs(a.cdf(x) - b.cdf(x)); };
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace cwstein
