#include "cwstein/rate_harness.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>

#include "cwstein/free_energy.hpp"
#include "cwstein/numerics.hpp"

namespace cwstein {

double BetaSequence::at(int n) const { return 1.0 + sign * gamma * std::pow(static_cast<double>(n), -exponent); }

BetaSequence BetaSequence::from_json(const Json& j) {
  BetaSequence s;
  s.sign = j.value("sign", 1);
  s.exponent = j.value("exponent", 0.5);
  s.gamma = j.value("gamma", 1.0);
  if (s.sign != 1 && s.sign != -1) throw InvalidArgument("beta_seq.sign: must be +1 or -1");
  if (!(s.exponent > 0.0) && s.gamma != 0.0) throw InvalidArgument("beta_seq.exponent: must be positive");
  if (s.gamma < 0.0) throw InvalidArgument("beta_seq.gamma: must be nonnegative");
  return s;
}

Json BetaSequence::to_json() const { return Json{{"sign", sign}, {"exponent", exponent}, {"gamma", gamma}}; }

std::string to_string(RegimeTagKind k) {
  switch (k) {
    case RegimeTagKind::critical_window: return "critical_window";
    case RegimeTagKind::sub_window: return "sub_window";
    case RegimeTagKind::clt_window: return "clt_window";
    case RegimeTagKind::clt_with_rate: return "clt_with_rate";
    case RegimeTagKind::critical_rate: return "critical_rate";
  }
  return "?";
}

RegimeTag classify_beta_regime(const BetaSequence& seq, int k) {
  if (k < 2) throw InvalidArgument("classify_beta_regime: k must be >= 2");
  if (!(seq.exponent > 0.0) && seq.gamma != 0.0)
    throw InvalidArgument("classify_beta_regime: exponent must be positive unless gamma = 0");
  RegimeTag t;
  t.k = k;
  t.window_exponent = 1.0 - 1.0 / k;
  t.rate_exponent = 0.5 - 0.5 / k;
  const double tol = 1e-12;
  const double e = seq.exponent;
  if (seq.gamma == 0.0 || e >= 1.0 - tol) {
    t.kind = RegimeTagKind::critical_rate;
  } else if (std::abs(e - t.window_exponent) <= tol) {
    t.kind = RegimeTagKind::critical_window;
    t.gamma = seq.sign * seq.gamma;
  } else if (e > t.window_exponent) {
    t.kind = RegimeTagKind::sub_window;
  } else if (e < t.rate_exponent - tol) {
    t.kind = RegimeTagKind::clt_with_rate;
  } else {
    t.kind = RegimeTagKind::clt_window;
  }
  return t;
}

Json to_json(const RegimeTag& t) {
  Json j{{"kind", to_string(t.kind)},
         {"k", t.k},
         {"window_exponent", t.window_exponent},
         {"rate_exponent", t.rate_exponent}};
  if (t.kind == RegimeTagKind::critical_window) j["gamma"] = t.gamma;
  return j;
}

double dkw_band(std::size_t count, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(count)));
}

McDistance sample_kolmogorov(std::vector<double> samples, const LimitLaw& target) {
  if (samples.empty()) throw InvalidArgument("sample_kolmogorov: no samples");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  McDistance out;
  out.count = samples.size();
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double F = target.cdf(samples[i]);
    out.distance = std::max({out.distance, std::abs(i / N - F), std::abs(j / N - F)});
    i = j;
  }
  out.band = dkw_band(samples.size());
  out.usable = out.distance > out.band;
  return out;
}

McDistance mc_kolmogorov(const SamplerSpec& spec, const LimitLaw& target, std::size_t sample_count,
                         std::uint64_t seed, int workers) {
  if (sample_count < 10000) throw InvalidArgument("mc_kolmogorov: sample_count must be >= 10000");
  return sample_kolmogorov(sample_magnetization(spec, sample_count, seed, workers), target);
}

namespace {

double integral_cdf(const LimitLaw& t, double a, double b) {
  return boost::math::quadrature::gauss<double, 15>::integrate([&](double x) { return t.cdf(x); }, a, b);
}

// int_a^b |c - F(x)| dx with F nondecreasing.
double abs_gap(const LimitLaw& t, double c, double a, double b) {
  if (b <= a) return 0.0;
  const double fa = t.cdf(a) - c;
  const double fb = t.cdf(b) - c;
  if (fa >= 0.0 || fb <= 0.0) return std::abs(integral_cdf(t, a, b) - c * (b - a));
  double lo = a, hi = b;
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (t.cdf(mid) < c ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return (c * (x - a) - integral_cdf(t, a, x)) + (integral_cdf(t, x, b) - c * (b - x));
}

double wasserstein_atoms(const std::vector<double>& xs, const std::vector<double>& ps, const LimitLaw& target) {
  if (xs.empty()) throw InvalidArgument("wasserstein_distance: empty law");
  const double inf = std::numeric_limits<double>::infinity();
  // Left tail: int_{-inf}^{x0} F = int_{-x0}^{inf} ccdf for an even target.
  double total = integrate([&](double x) { return target.ccdf(x); }, -xs.front(), inf);
  total += integrate([&](double x) { return target.ccdf(x); }, xs.back(), inf);
  long double cum = 0.0L;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    cum += ps[i];
    total += abs_gap(target, static_cast<double>(cum), xs[i], xs[i + 1]);
  }
  return total;
}

}  // namespace

double wasserstein_distance(const ExactLaw& law, double center, double scale, const LimitLaw& target) {
  if (!(scale > 0.0)) throw InvalidArgument("wasserstein_distance: scale must be positive");
  std::vector<double> xs(law.support.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = (law.support[i] - center) / scale;
  return wasserstein_atoms(xs, law.probs, target);
}

double wasserstein_distance(std::vector<double> samples, const LimitLaw& target) {
  if (samples.empty()) throw InvalidArgument("wasserstein_distance: no samples");
  std::sort(samples.begin(), samples.end());
  std::vector<double> xs;
  std::vector<double> ps;
  const double w = 1.0 / samples.size();
  for (double s : samples) {
    if (!xs.empty() && xs.back() == s) {
      ps.back() += w;
    } else {
      xs.push_back(s);
      ps.push_back(w);
    }
  }
  return wasserstein_atoms(xs, ps, target);
}

RateFit fit_rate(std::vector<RatePoint> points) {
  RateFit fit;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : points) {
    if (!p.usable) continue;
    if (!(p.distance > 0.0) || p.n <= 0) throw InvalidArgument("fit_rate: distances and n must be positive");
    x.push_back(std::log(static_cast<double>(p.n)));
    y.push_back(std::log(p.distance));
  }
  fit.points = std::move(points);
  if (x.size() < 4)
    throw InvalidArgument("fit_rate: " + std::to_string(x.size()) + " usable points, need at least 4");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 1e-12 * m) throw InvalidArgument("fit_rate: degenerate abscissa (all n equal)");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.used = x.size();
  return fit;
}

RateSpec RateSpec::from_json(const Json& j) {
  RateSpec s;
  s.measure = SpinMeasure::from_json(j.at("measure"));
  if (j.contains("beta_seq")) {
    s.beta_seq = BetaSequence::from_json(j.at("beta_seq"));
  } else {
    s.beta = j.value("beta", 0.5);
  }
  if (j.contains("center") && !j.at("center").is_null()) s.center = j.at("center").get<double>();
  s.n_grid = j.at("n_grid").get<std::vector<int>>();
  const std::string tm = j.value("target_mode", std::string("auto"));
  if (tm == "auto") {
    s.target_mode = TargetMode::automatic;
  } else if (tm == "moment_normalized") {
    s.target_mode = TargetMode::moment_normalized;
  } else if (tm == "fixed") {
    s.target_mode = TargetMode::fixed;
  } else {
    throw InvalidArgument("target_mode: unknown value '" + tm + "'");
  }
  if (j.contains("target")) {
    s.target = LawDescriptor::from_json(j.at("target"));
    s.target_mode = TargetMode::fixed;
  }
  if (s.target_mode == TargetMode::fixed && !s.target)
    throw InvalidArgument("target: required when target_mode is fixed");
  s.method = j.value("method", std::string("auto"));
  s.metric = j.value("metric", std::string("kolmogorov"));
  s.mc_samples = j.value("mc_samples", std::size_t{100000});
  s.chains = j.value("chains", 32);
  if (j.contains("budget")) {
    const Json& b = j.at("budget");
    s.budget.max_compositions = b.value("max_compositions", s.budget.max_compositions);
    s.budget.max_configurations = b.value("max_configurations", s.budget.max_configurations);
  }
  return s;
}

Json RateSpec::to_json() const {
  Json j{{"measure", measure.to_json()},
         {"n_grid", n_grid},
         {"method", method},
         {"metric", metric},
         {"mc_samples", mc_samples},
         {"chains", chains},
         {"budget", {{"max_compositions", budget.max_compositions},
                     {"max_configurations", budget.max_configurations}}}};
  if (beta_seq) {
    j["beta_seq"] = beta_seq->to_json();
  } else {
    j["beta"] = beta;
  }
  if (center) j["center"] = *center;
  j["target_mode"] = target_mode == TargetMode::automatic ? "auto"
                     : target_mode == TargetMode::moment_normalized ? "moment_normalized"
                                                                    : "fixed";
  if (target) j["target"] = target->to_json();
  return j;
}

namespace {

// Per-n scaling, center and target family.
struct Plan {
  double beta = 0.0;
  double center = 0.0;
  double exponent = 0.5;
  int k = 1;
  double mu = 0.0;
  bool restrict_side = false;
  LawDescriptor target;
};

Plan plan_fixed_beta(const RateSpec& spec, int n) {
  (void)n;
  Plan p;
  p.beta = spec.beta;
  const FreeEnergyProfile prof = find_minima(spec.measure, spec.beta);
  std::vector<ExtremalPoint> global;
  for (const auto& m : prof.minima)
    if (m.is_global) global.push_back(m);
  ExtremalPoint chosen = global.front();
  if (global.size() > 1) {
    if (!spec.center)
      throw InvalidArgument("rates: beta = " + format_double(spec.beta) +
                            " has several global minima; set 'center' to one of them");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : global)
      if (std::abs(m.alpha - *spec.center) < best) {
        best = std::abs(m.alpha - *spec.center);
        chosen = m;
      }
    if (best > 1e-6)
      throw InvalidArgument("rates: center " + format_double(*spec.center) + " is not a global minimum");
    p.restrict_side = true;
  }
  p.center = chosen.alpha;
  p.k = chosen.type_k;
  p.mu = chosen.strength_mu;
  p.exponent = p.k == 1 ? 0.5 : 1.0 - 1.0 / (2.0 * p.k);
  p.target = p.k == 1 ? LawDescriptor::gaussian_law(1.0 / p.mu - 1.0 / spec.beta)
                      : LawDescriptor::power_law(p.k, p.mu, spec.beta);
  return p;
}

Plan plan_sequence(const RateSpec& spec, int n, const RegimeTag& tag, const ExtremalPoint& crit) {
  Plan p;
  p.beta = spec.beta_seq->at(n);
  p.k = crit.type_k;
  p.mu = crit.strength_mu;
  switch (tag.kind) {
    case RegimeTagKind::critical_window:
      p.exponent = 1.0 - 1.0 / (2.0 * p.k);
      p.target = (p.k == 2 && std::abs(p.mu - 2.0) < 1e-9) ? LawDescriptor::f_gamma_law(tag.gamma)
                                                             : LawDescriptor::mixed_law(p.k, p.mu, tag.gamma, 1.0);
      break;
    case RegimeTagKind::sub_window:
    case RegimeTagKind::critical_rate:
      p.exponent = 1.0 - 1.0 / (2.0 * p.k);
      p.target = LawDescriptor::power_law(p.k, p.mu, 1.0);
      break;
    case RegimeTagKind::clt_window:
    case RegimeTagKind::clt_with_rate: {
      if (spec.beta_seq->sign > 0)
        throw InvalidArgument("rates: beta_n above 1 outside the window has two minima; not supported");
      const ExtremalPoint e = classify_extremal(spec.measure, p.beta, 0.0);
      p.k = 1;
      p.mu = e.strength_mu;
      p.exponent = 0.5;
      p.target = LawDescriptor::gaussian_law(1.0 / e.strength_mu - 1.0 / p.beta);
      break;
    }
  }
  return p;
}

// Keeps the half of the law on the side of the center and renormalizes.
ExactLaw restrict_to_side(const ExactLaw& law, double center) {
  ExactLaw out = law;
  out.support.clear();
  out.probs.clear();
  long double z = 0.0L;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    const double s = law.support[i];
    double w = 0.0;
    if (s * center > 0.0) w = law.probs[i];
    else if (s == 0.0) w = 0.5 * law.probs[i];
    if (w == 0.0) continue;
    out.support.push_back(s);
    out.probs.push_back(w);
    z += w;
  }
  for (double& p : out.probs) p = static_cast<double>(p / z);
  return out;
}

bool exact_feasible(const RateSpec& spec, int n) {
  if (!spec.measure.is_atomic()) return false;
  return composition_count(n, static_cast<int>(spec.measure.atoms().size())) <= spec.budget.max_compositions;
}

}  // namespace

RateResult run_rate_experiment(const RateSpec& spec, int workers) {
  if (spec.n_grid.empty()) throw InvalidArgument("rates: n_grid is empty");
  if (spec.method != "exact" && spec.method != "mc" && spec.method != "auto")
    throw InvalidArgument("rates: method must be exact, mc or auto");
  if (spec.metric != "kolmogorov" && spec.metric != "wasserstein")
    throw InvalidArgument("rates: metric must be kolmogorov or wasserstein");
  for (int n : spec.n_grid) {
    if (n < 1) throw InvalidArgument("rates: n must be positive");
    if (spec.method == "exact") check_exact_budget(spec.measure, n, {}, spec.budget);
  }
  RateResult result;
  std::optional<RegimeTag> tag;
  ExtremalPoint crit;
  if (spec.beta_seq) {
    const double bc = critical_beta(spec.measure);
    if (std::abs(bc - 1.0) > 1e-9)
      throw InvalidArgument("rates: beta sequences assume a unit-variance measure (beta_c = 1), got beta_c = " +
                            format_double(bc));
    crit = classify_extremal(spec.measure, 1.0, 0.0);
    tag = classify_beta_regime(*spec.beta_seq, crit.type_k);
    result.regime = to_string(tag->kind);
    result.regime_detail = to_json(*tag);
  }
  std::vector<RatePoint> points(spec.n_grid.size());
  std::mutex err_mu;
  parallel_for(spec.n_grid.size(), workers, [&](std::size_t idx) {
    const int n = spec.n_grid[idx];
    Plan plan = spec.beta_seq ? plan_sequence(spec, n, *tag, crit) : plan_fixed_beta(spec, n);
    const double scale = std::pow(static_cast<double>(n), plan.exponent);
    const bool exact = spec.method == "exact" || (spec.method == "auto" && exact_feasible(spec, n));
    RatePoint pt;
    pt.n = n;
    pt.beta = plan.beta;
    pt.method = exact ? "exact" : "mc";
    std::optional<ExactLaw> law;
    std::vector<double> samples;
    if (exact) {
      law = exact_law(spec.measure, n, plan.beta, {}, spec.budget, 1);
      if (plan.restrict_side) law = restrict_to_side(*law, plan.center);
    } else {
      if (plan.restrict_side) throw InvalidArgument("rates: Monte Carlo sweeps need a single global minimum");
      SamplerSpec ss;
      ss.measure = spec.measure;
      ss.n = n;
      ss.beta = plan.beta;
      ss.chains = spec.chains;
      ss.critical = plan.k >= 2;
      ss.center = plan.center;
      ss.scale_exponent = plan.exponent;
      samples = sample_magnetization(ss, spec.mc_samples, spec.seed + static_cast<std::uint64_t>(idx), 1);
    }
    LawDescriptor desc = plan.target;
    if (spec.target_mode == TargetMode::fixed) {
      desc = *spec.target;
    } else if (spec.target_mode == TargetMode::moment_normalized) {
      if (plan.k < 2) throw InvalidArgument("rates: moment_normalized target needs a critical point (k >= 2)");
      double m2k = 0.0;
      if (law) {
        m2k = exact_moment(*law, n * plan.center, scale, 2 * plan.k);
      } else {
        long double s = 0.0L;
        for (double w : samples) s += std::pow(static_cast<long double>(w), 2 * plan.k);
        m2k = static_cast<double>(s / samples.size());
      }
      desc = LawDescriptor::moment_normalized_law(plan.k, m2k);
    }
    const LimitLaw target = LimitLaw::build(desc);
    pt.target = desc.to_json();
    if (law) {
      pt.distance = spec.metric == "kolmogorov" ? exact_kolmogorov(*law, n * plan.center, scale, target)
                                                : wasserstein_distance(*law, n * plan.center, scale, target);
    } else if (spec.metric == "kolmogorov") {
      const McDistance d = sample_kolmogorov(samples, target);
      pt.distance = d.distance;
      pt.band = d.band;
      pt.usable = d.usable;
      pt.se = d.band / 2.5758293035489004;
    } else {
      pt.distance = wasserstein_distance(samples, target);
    }
    std::lock_guard<std::mutex> lock(err_mu);
    points[idx] = std::move(pt);
  });
  if (!tag) {
    const Plan p = plan_fixed_beta(spec, spec.n_grid.front());
    result.regime = p.k == 1 ? "clt" : "critical";
    result.regime_detail = Json{{"k", p.k}, {"mu", p.mu}, {"center", p.center}, {"scale_exponent", p.exponent}};
  }
  result.fit = fit_rate(std::move(points));
  return result;
}

std::string rate_csv(const RateFit& fit) {
  std::ostringstream os;
  os << "n,distance,se,method,band,usable\n";
  for (const auto& p : fit.points)
    os << p.n << ',' << format_double(p.distance) << ',' << format_double(p.se) << ',' << p.method << ','
       << format_double(p.band) << ',' << (p.usable ? 1 : 0) << '\n';
  return os.str();
}

std::string rate_svg(const RateFit& fit, const std::string& title) {
  const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& p : fit.points) {
    if (!(p.distance > 0.0)) continue;
    const double x = std::log10(static_cast<double>(p.n)), y = std::log10(p.distance);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (!(xmax > xmin)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double padx = 0.05 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  char buf[256];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n", L,
                T, W - L - R, H - T - B);
  os << buf;
  for (int t = static_cast<int>(std::ceil(xmin)); t <= static_cast<int>(std::floor(xmax)); ++t) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">1e%d</text>\n",
                  px(t), H - B, px(t), H - B + 5, px(t), H - B + 20, t);
    os << buf;
  }
  for (int t = static_cast<int>(std::ceil(ymin)); t <= static_cast<int>(std::floor(ymax)); ++t) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>"
                  "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">1e%d</text>\n",
                  L - 5, py(t), L, py(t), L - 8, py(t) + 4, t);
    os << buf;
  }
  for (const auto& p : fit.points) {
    if (!(p.distance > 0.0)) continue;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n",
                  px(std::log10(static_cast<double>(p.n))), py(std::log10(p.distance)),
                  p.usable ? "steelblue" : "lightgray");
    os << buf;
  }
  // ln d = a + b ln n  ->  log10 d = a / ln 10 + b log10 n
  const double a10 = fit.intercept / std::log(10.0);
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"firebrick\" stroke-width=\"1.5\"/>\n",
                px(xmin), py(a10 + fit.slope * xmin), px(xmax), py(a10 + fit.slope * xmax));
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.2f\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">%s (slope %.4f, r2 %.4f)</text>\n",
                W / 2, title.c_str(), fit.slope, fit.r_squared);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">n</text>\n",
                W / 2, H - 15);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.2f\" font-size=\"12\" transform=\"rotate(-90 16 %.2f)\" "
                "text-anchor=\"middle\">distance</text>\n",
                H / 2, H / 2);
  os << buf;
  os << "</svg>\n";
  return os.str();
}

Json to_json(const RateResult& r) {
  Json pts = Json::array();
  for (const auto& p : r.fit.points)
    pts.push_back(Json{{"n", p.n},
                       {"distance", p.distance},
                       {"se", p.se},
                       {"method", p.method},
                       {"band", p.band},
                       {"usable", p.usable},
                       {"beta", p.beta},
                       {"target", p.target}});
  return Json{{"regime", r.regime},
              {"regime_detail", r.regime_detail},
              {"slope", r.fit.slope},
              {"intercept", r.fit.intercept},
              {"r_squared", r.fit.r_squared},
              {"used_points", r.fit.used},
              {"points", pts}};
}

}  // namespace cwstein
