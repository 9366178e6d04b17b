#include "cwstein/spin_measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cwstein/numerics.hpp"

namespace cwstein {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kLogCutoff = 46.0;  // ~ 1e-20 relative to the peak
constexpr int kPanels = 192;

}  // namespace

double EvenPotential::value(double x) const {
  const double x2 = x * x;
  double power = x2;
  double v = 0.0;
  for (double c : coefficients) {
    v += c * power;
    power *= x2;
  }
  if (cosh_coeff != 0.0) v += cosh_coeff * (std::cosh(x) - 1.0);
  return v;
}

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::bernoulli: return "bernoulli";
    case MeasureKind::three_state: return "three_state";
    case MeasureKind::trinomial: return "trinomial";
    case MeasureKind::uniform: return "uniform";
    case MeasureKind::gibbs_density: return "gibbs_density";
    case MeasureKind::atomic: return "atomic";
  }
  return "unknown";
}

SpinMeasure SpinMeasure::bernoulli() {
  SpinMeasure m;
  m.kind_ = MeasureKind::bernoulli;
  m.atoms_ = {{-1.0, 0.5}, {1.0, 0.5}};
  return m;
}

SpinMeasure SpinMeasure::three_state() {
  SpinMeasure m;
  m.kind_ = MeasureKind::three_state;
  const double r = std::sqrt(3.0);
  m.atoms_ = {{-r, 1.0 / 6.0}, {0.0, 2.0 / 3.0}, {r, 1.0 / 6.0}};
  return m;
}

SpinMeasure SpinMeasure::trinomial(double a) {
  if (!(a >= 0.0 && a < 1.0))
    throw InvalidArgument("trinomial: parameter a must satisfy 0 <= a < 1, got " + format_double(a));
  SpinMeasure m;
  m.kind_ = MeasureKind::trinomial;
  m.trinomial_a_ = a;
  if (a == 0.0) {
    m.atoms_ = {{-1.0, 0.5}, {1.0, 0.5}};
  } else {
    m.atoms_ = {{-1.0, 0.5 * (1.0 - a)}, {0.0, a}, {1.0, 0.5 * (1.0 - a)}};
  }
  return m;
}

SpinMeasure SpinMeasure::uniform(double half_width) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidArgument("uniform: half_width must be positive and finite");
  SpinMeasure m;
  m.kind_ = MeasureKind::uniform;
  m.half_width_ = half_width;
  return m;
}

SpinMeasure SpinMeasure::gibbs_density(EvenPotential potential, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw InvalidArgument("gibbs_density: scale must be positive and finite");
  // Class B needs growth faster than x^2.
  int top = -1;
  for (int j = static_cast<int>(potential.coefficients.size()) - 1; j >= 0; --j) {
    if (potential.coefficients[j] != 0.0) {
      top = j;
      break;
    }
  }
  const bool cosh_growth = potential.cosh_coeff > 0.0;
  if (potential.cosh_coeff < 0.0)
    throw InvalidArgument("gibbs_density: cosh coefficient must be nonnegative");
  if (!cosh_growth && (top < 1 || potential.coefficients[top] <= 0.0))
    throw InvalidArgument(
        "gibbs_density: not in class B, the leading term of V must be a positive power of "
        "degree >= 4 or a positive cosh term");
  SpinMeasure m;
  m.kind_ = MeasureKind::gibbs_density;
  m.potential_ = std::move(potential);
  m.scale_ = scale;
  m.locate_gibbs_range();
  return m;
}

SpinMeasure SpinMeasure::atomic(std::vector<Atom> atoms, std::string label) {
  SpinMeasure m;
  m.kind_ = MeasureKind::atomic;
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  m.atoms_ = std::move(atoms);
  m.label_ = std::move(label);
  m.validate_atoms();
  return m;
}

void SpinMeasure::validate_atoms() const {
  if (atoms_.empty()) throw InvalidArgument("atomic measure: no atoms");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!(a.weight > 0.0) || !std::isfinite(a.location))
      throw InvalidArgument("atomic measure: weights must be positive and locations finite");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance)
    throw InvalidArgument("atomic measure: weights sum to " + format_double(total) +
                          ", violating normalization within 1e-12");
  const std::size_t d = atoms_.size();
  for (std::size_t i = 0; i < d; ++i) {
    const Atom& a = atoms_[i];
    const Atom& b = atoms_[d - 1 - i];
    if (std::abs(a.location + b.location) > 1e-12 || std::abs(a.weight - b.weight) > 1e-12)
      throw InvalidArgument("atomic measure: not symmetric, atom at " + format_double(a.location) +
                            " has no mirror of equal weight");
  }
  if (d == 1) throw InvalidArgument("atomic measure: degenerate (variance zero)");
}

void SpinMeasure::locate_gibbs_range() {
  // Scan outward until V(scale x) exceeds its running minimum by the cutoff.
  double vmin = 0.0;
  double x = 0.0;
  double step = 1e-3 / scale_;
  for (int it = 0; it < 10000000; ++it) {
    x += step;
    const double v = potential_.value(scale_ * x);
    vmin = std::min(vmin, v);
    if (v - vmin > kLogCutoff) {
      base_range_ = x;
      const double z = composite_gauss(
          [&](double t) { return std::exp(-potential_.value(scale_ * t)); }, -x, x, kPanels);
      log_norm_ = std::log(z);
      return;
    }
    if (it % 1000 == 999) step *= 2.0;
  }
  throw NumericalFailure("gibbs_density: could not locate effective support");
}

std::string SpinMeasure::label() const {
  if (kind_ == MeasureKind::atomic) return label_;
  if (kind_ == MeasureKind::trinomial) return "trinomial(" + format_double(trinomial_a_) + ")";
  if (kind_ == MeasureKind::uniform) return "uniform(" + format_double(half_width_) + ")";
  return to_string(kind_);
}

double SpinMeasure::support_bound() const {
  if (is_atomic()) return atoms_.back().location;
  if (kind_ == MeasureKind::uniform) return half_width_;
  return std::numeric_limits<double>::infinity();
}

double SpinMeasure::log_density_unnormalized(double x) const {
  if (kind_ == MeasureKind::uniform)
    return std::abs(x) <= half_width_ ? 0.0 : -std::numeric_limits<double>::infinity();
  if (kind_ == MeasureKind::gibbs_density) return -potential_.value(scale_ * x);
  throw InvalidArgument("log_density_unnormalized: measure is atomic");
}

SpinMeasure::Tilt SpinMeasure::tilt(double s, int max_order) const {
  if (!std::isfinite(s)) throw InvalidArgument("tilt: non-finite s");
  Tilt out;
  out.central.assign(static_cast<std::size_t>(std::max(max_order, 1)) + 1, 0.0);
  std::vector<double> xs;
  std::vector<double> ws;
  double shift = 0.0;
  double log_base = 0.0;  // log of the untilted normalizer (continuous kinds)

  if (is_atomic()) {
    shift = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms_) shift = std::max(shift, std::log(a.weight) + s * a.location);
    for (const auto& a : atoms_) {
      xs.push_back(a.location);
      ws.push_back(std::exp(std::log(a.weight) + s * a.location - shift));
    }
  } else {
    double lo = 0.0;
    double hi = 0.0;
    if (kind_ == MeasureKind::uniform) {
      lo = -half_width_;
      hi = half_width_;
      shift = std::abs(s) * half_width_;
      log_base = std::log(2.0 * half_width_);
    } else {
      auto f = [&](double x) { return log_density_unnormalized(x) + s * x; };
      const double step = base_range_ / 2000.0;
      double fmax = f(0.0);
      auto scan = [&](double dir) {
        double x = 0.0;
        for (long it = 0; it < 100000000L; ++it) {
          x += dir * step;
          const double v = f(x);
          if (!std::isfinite(v)) break;
          fmax = std::max(fmax, v);
          if (v < fmax - kLogCutoff) return x;
        }
        throw NumericalFailure("tilted integral does not converge at s = " + format_double(s));
      };
      hi = scan(1.0);
      lo = scan(-1.0);
      shift = fmax;
      log_base = log_norm_;
    }
    const auto& rule = gauss_legendre20();
    const double h = (hi - lo) / kPanels;
    for (int p = 0; p < kPanels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + 0.5 * h * rule.nodes[i];
        const double lf = log_density_unnormalized(x) + s * x - shift;
        xs.push_back(x);
        ws.push_back(0.5 * h * rule.weights[i] * std::exp(lf));
      }
    }
  }

  double z = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    z += ws[i];
    first += ws[i] * xs[i];
  }
  if (!(z > 0.0) || !std::isfinite(z))
    throw NumericalFailure("tilted integral diverges or vanishes at s = " + format_double(s));
  out.mean = first / z;
  out.log_mgf = std::log(z) + shift - log_base;
  out.central[0] = 1.0;
  if (max_order >= 2) {
    std::vector<double> acc(out.central.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = xs[i] - out.mean;
      double pw = d * d;
      for (int j = 2; j <= max_order; ++j) {
        acc[j] += ws[i] * pw;
        pw *= d;
      }
    }
    for (int j = 2; j <= max_order; ++j) out.central[j] = acc[j] / z;
  }
  return out;
}

double SpinMeasure::moment(int order) const {
  if (order % 2 == 1) return 0.0;
  if (kind_ == MeasureKind::uniform) return std::pow(half_width_, order) / (order + 1.0);
  return tilt(0.0, order).central[order];
}

double SpinMeasure::variance() const { return moment(2); }

SpinMeasure SpinMeasure::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scaled: factor must be positive");
  switch (kind_) {
    case MeasureKind::uniform: {
      SpinMeasure m = uniform(half_width_ * factor);
      return m;
    }
    case MeasureKind::gibbs_density:
      return gibbs_density(potential_, scale_ / factor);
    default: {
      if (factor == 1.0) return *this;
      std::vector<Atom> atoms = atoms_;
      for (auto& a : atoms) a.location *= factor;
      return atomic(std::move(atoms), label() + "*" + format_double(factor));
    }
  }
}

SpinMeasure standardize(const SpinMeasure& m) {
  const double v = m.variance();
  if (!(v > 0.0)) throw InvalidArgument("standardize: variance must be positive");
  const double factor = 1.0 / std::sqrt(v);
  if (std::abs(factor - 1.0) <= 1e-15) return m;
  return m.scaled(factor);
}

std::vector<double> cumulants_from_central(const std::vector<double>& mu, double mean) {
  const int n = static_cast<int>(mu.size()) - 1;
  std::vector<double> k(mu.size(), 0.0);
  if (n >= 1) k[1] = mean;
  for (int r = 2; r <= n; ++r) {
    double v = mu[r];
    for (int m = 2; m <= r - 2; ++m) v -= binomial(r - 1, m - 1) * k[m] * mu[r - m];
    k[r] = v;
  }
  return k;
}

std::vector<double> cgf_derivatives(const SpinMeasure& m, double s, int max_order) {
  if (max_order < 0 || max_order > 12)
    throw InvalidArgument("cgf_derivative: order must lie in 0..12");
  const auto t = m.tilt(s, std::max(max_order, 2));
  std::vector<double> k = cumulants_from_central(t.central, t.mean);
  k[0] = t.log_mgf;
  k.resize(max_order + 1);
  return k;
}

double cgf_derivative(const SpinMeasure& m, double s, int order) {
  return cgf_derivatives(m, s, order)[order];
}

GhsReport check_ghs(const SpinMeasure& m, double s_max, int grid_points) {
  if (!(s_max > 0.0)) throw InvalidArgument("check_ghs: s_max must be positive");
  if (grid_points < 100) throw InvalidArgument("check_ghs: grid_points must be >= 100");
  GhsReport r;
  r.worst_value = -std::numeric_limits<double>::infinity();
  for (double s : linspace(0.0, s_max, static_cast<std::size_t>(grid_points))) {
    const double v = cgf_derivative(m, s, 3);
    if (v > r.worst_value) {
      r.worst_value = v;
      r.worst_point = s;
    }
  }
  r.holds = r.worst_value <= r.tolerance;
  return r;
}

Json to_json(const GhsReport& r) {
  return Json{{"holds", r.holds},
              {"worst_point", r.worst_point},
              {"worst_value", r.worst_value},
              {"tolerance", r.tolerance}};
}

SpinMeasure SpinMeasure::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InvalidArgument("measure: object with string field 'kind' required");
  const std::string kind = j["kind"].get<std::string>();
  auto number = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_number())
      throw InvalidArgument("measure." + std::string(field) + ": number required for kind " + kind);
    return j[field].get<double>();
  };
  if (kind == "bernoulli") return bernoulli();
  if (kind == "three_state") return three_state();
  if (kind == "trinomial") return trinomial(number("a"));
  if (kind == "uniform") return uniform(number("half_width"));
  if (kind == "gibbs_density") {
    EvenPotential v;
    if (j.contains("coefficients")) v.coefficients = j["coefficients"].get<std::vector<double>>();
    if (j.contains("cosh_coeff")) v.cosh_coeff = j["cosh_coeff"].get<double>();
    const double scale = j.contains("scale") ? j["scale"].get<double>() : 1.0;
    return gibbs_density(v, scale);
  }
  if (kind == "atomic") {
    if (!j.contains("atoms") || !j["atoms"].is_array())
      throw InvalidArgument("measure.atoms: array of {x, w} required for kind atomic");
    std::vector<Atom> atoms;
    for (const auto& a : j["atoms"]) atoms.push_back({a.at("x").get<double>(), a.at("w").get<double>()});
    return atomic(std::move(atoms), j.value("label", std::string("atomic")));
  }
  throw InvalidArgument("measure.kind: unknown kind '" + kind +
                        "', allowed: bernoulli, three_state, trinomial, uniform, gibbs_density, atomic");
}

Json SpinMeasure::to_json() const {
  Json j{{"kind", to_string(kind_)}};
  switch (kind_) {
    case MeasureKind::trinomial: j["a"] = trinomial_a_; break;
    case MeasureKind::uniform: j["half_width"] = half_width_; break;
    case MeasureKind::gibbs_density:
      j["coefficients"] = potential_.coefficients;
      j["cosh_coeff"] = potential_.cosh_coeff;
      j["scale"] = scale_;
      break;
    case MeasureKind::atomic: {
      j["label"] = label_;
      Json atoms = Json::array();
      for (const auto& a : atoms_) atoms.push_back({{"x", a.location}, {"w", a.weight}});
      j["atoms"] = atoms;
      break;
    }
    default: break;
  }
  return j;
}

}  // namespace cwstein
