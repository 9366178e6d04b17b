#include "cwstein/exact_oracle.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cwstein/free_energy.hpp"
#include "cwstein/numerics.hpp"

namespace cwstein {

namespace {

struct Lattice {
  bool ok = false;
  double unit = 1.0;
  std::vector<long> mult;
  long max_mult = 0;
};

Lattice detect_lattice(const SpinMeasure& m) {
  Lattice L;
  double unit = std::numeric_limits<double>::infinity();
  for (const auto& a : m.atoms())
    if (std::abs(a.location) > 1e-15) unit = std::min(unit, std::abs(a.location));
  if (!std::isfinite(unit)) return L;
  for (const auto& a : m.atoms()) {
    const double r = a.location / unit;
    const long k = std::lround(r);
    if (std::abs(r - k) > 1e-9) return L;
    L.mult.push_back(k);
    L.max_mult = std::max(L.max_mult, std::labs(k));
  }
  L.ok = true;
  L.unit = unit;
  return L;
}

bool uniform_fields(const std::vector<double>& fields, double& h) {
  h = 0.0;
  if (fields.empty()) return true;
  h = fields.front();
  for (double f : fields)
    if (f != h) return false;
  return true;
}

// Enumerates atom-count classes; visit(counts, s, logw). Classes are split into
// fixed chunks by the first count so that reductions do not depend on workers.
using ClassVisit = std::function<void(std::size_t chunk, const std::vector<int>& counts, double s,
                                      long double logw)>;

std::size_t enumerate_classes(const SpinMeasure& m, int n, double beta, double h, std::size_t chunks,
                              int workers, const ClassVisit& visit) {
  const auto& atoms = m.atoms();
  const int d = static_cast<int>(atoms.size());
  std::vector<long double> lf(n + 1);
  for (int i = 0; i <= n; ++i) lf[i] = std::lgamma(static_cast<long double>(i) + 1.0L);
  std::vector<long double> lw(d);
  for (int a = 0; a < d; ++a) lw[a] = std::log(static_cast<long double>(atoms[a].weight));
  chunks = std::max<std::size_t>(1, std::min<std::size_t>(chunks, static_cast<std::size_t>(n) + 1));
  parallel_for(chunks, workers, [&](std::size_t ch) {
    const int c0_lo = static_cast<int>((static_cast<long>(n) + 1) * ch / chunks);
    const int c0_hi = static_cast<int>((static_cast<long>(n) + 1) * (ch + 1) / chunks);
    std::vector<int> counts(d, 0);
    std::function<void(int, int, long double, long double)> rec = [&](int a, int rest, long double s,
                                                                       long double base) {
      if (a == d - 1) {
        counts[a] = rest;
        const long double ss = s + rest * static_cast<long double>(atoms[a].location);
        const long double lw_total = base - lf[rest] + rest * lw[a] +
                                     static_cast<long double>(beta) * ss * ss / (2.0L * n) +
                                     static_cast<long double>(beta) * h * ss;
        visit(ch, counts, static_cast<double>(ss), lw_total);
        return;
      }
      const int lo = (a == 0) ? c0_lo : 0;
      const int hi = (a == 0) ? c0_hi - 1 : rest;
      for (int c = lo; c <= std::min(hi, rest); ++c) {
        counts[a] = c;
        rec(a + 1, rest - c, s + c * static_cast<long double>(atoms[a].location),
            base - lf[c] + c * lw[a]);
      }
    };
    if (d == 1) {
      counts[0] = n;
      if (ch == 0) visit(0, counts, n * atoms[0].location, 0.0L);
      return;
    }
    rec(0, n, 0.0L, lf[n]);
  });
  return chunks;
}

// Per-bin accumulation of exp(logw - shift) and optional weighted quantities.
struct Bins {
  Lattice lattice;
  long offset = 0;
  std::size_t size = 0;
  std::size_t chunks = 1;
  int fields = 1;
  std::vector<long double> acc;  // [chunk][bin][field]
  std::vector<char> used;
  std::vector<double> value;     // s at the bin

  std::size_t index(double s) const {
    return static_cast<std::size_t>(std::lround(s / lattice.unit) + offset);
  }
};

Bins make_bins(const SpinMeasure& m, int n, int fields) {
  Bins b;
  b.lattice = detect_lattice(m);
  if (!b.lattice.ok) throw InvalidArgument("exact oracle: atom locations must lie on a common lattice");
  b.offset = static_cast<long>(n) * b.lattice.max_mult;
  b.size = static_cast<std::size_t>(2 * b.offset + 1);
  b.fields = fields;
  const double cap = 4e7;
  b.chunks = static_cast<std::size_t>(std::clamp(cap / (b.size * fields), 1.0, 64.0));
  b.acc.assign(b.chunks * b.size * fields, 0.0L);
  b.used.assign(b.size, 0);
  b.value.assign(b.size, 0.0);
  return b;
}

long double max_log_weight(const SpinMeasure& m, int n, double beta, double h, int workers,
                           std::size_t chunks) {
  std::vector<long double> mx(chunks, -std::numeric_limits<long double>::infinity());
  enumerate_classes(m, n, beta, h, chunks, workers,
                    [&](std::size_t ch, const std::vector<int>&, double, long double lw) {
                      if (lw > mx[ch]) mx[ch] = lw;
                    });
  return *std::max_element(mx.begin(), mx.end());
}

}  // namespace

double composition_count(int n, int atoms) {
  return std::exp(std::lgamma(n + atoms) - std::lgamma(atoms) - std::lgamma(n + 1.0));
}

void check_exact_budget(const SpinMeasure& m, int n, const std::vector<double>& fields,
                        const ExactBudget& budget) {
  if (!m.is_atomic()) throw InvalidArgument("exact oracle: atomic single-spin measure required");
  if (n < 1) throw InvalidArgument("exact oracle: n must be positive");
  if (!fields.empty() && static_cast<int>(fields.size()) != n)
    throw InvalidArgument("exact oracle: fields must have length n");
  double h = 0.0;
  const int d = static_cast<int>(m.atoms().size());
  if (uniform_fields(fields, h)) {
    const double c = composition_count(n, d);
    if (c > budget.max_compositions * (1.0 + 1e-9))
      throw BudgetExceeded("exact oracle: " + format_double(std::round(c)) +
                           " type classes exceed the budget " + format_double(budget.max_compositions) +
                           " (n = " + std::to_string(n) + ")");
    return;
  }
  const double configs = std::pow(static_cast<double>(d), n);
  if (n > budget.max_sites_nonuniform || configs > budget.max_configurations)
    throw BudgetExceeded("exact oracle: non-uniform fields need " + format_double(configs) +
                         " configurations (n = " + std::to_string(n) + ") beyond the budget");
}

namespace {

// Full enumeration over d^n configurations; visit(config atom indices, logw).
void enumerate_configurations(const SpinMeasure& m, int n, double beta, const std::vector<double>& fields,
                              const std::function<void(const std::vector<int>&, double, long double)>& visit) {
  const auto& atoms = m.atoms();
  const int d = static_cast<int>(atoms.size());
  std::vector<int> idx(n, 0);
  for (;;) {
    long double s = 0.0L;
    long double logw = 0.0L;
    for (int i = 0; i < n; ++i) {
      const double x = atoms[idx[i]].location;
      s += x;
      logw += std::log(static_cast<long double>(atoms[idx[i]].weight));
      if (!fields.empty()) logw += static_cast<long double>(beta) * fields[i] * x;
    }
    logw += static_cast<long double>(beta) * s * s / (2.0L * n);
    visit(idx, static_cast<double>(s), logw);
    int p = 0;
    while (p < n && ++idx[p] == d) idx[p++] = 0;
    if (p == n) break;
  }
}

}  // namespace

ExactLaw exact_law(const SpinMeasure& m, int n, double beta, const std::vector<double>& fields,
                   const ExactBudget& budget, int workers) {
  check_exact_budget(m, n, fields, budget);
  ExactLaw law;
  law.n = n;
  law.beta = beta;
  law.measure = m.label();
  law.fields = fields;
  double h = 0.0;
  Bins bins = make_bins(m, n, 1);
  if (uniform_fields(fields, h)) {
    const long double shift = max_log_weight(m, n, beta, h, workers, bins.chunks);
    enumerate_classes(m, n, beta, h, bins.chunks, workers,
                      [&](std::size_t ch, const std::vector<int>&, double s, long double lw) {
                        const std::size_t b = bins.index(s);
                        bins.acc[ch * bins.size + b] += std::exp(lw - shift);
                        bins.used[b] = 1;
                      });
  } else {
    long double shift = -std::numeric_limits<long double>::infinity();
    enumerate_configurations(m, n, beta, fields, [&](const std::vector<int>&, double, long double lw) {
      shift = std::max(shift, lw);
    });
    enumerate_configurations(m, n, beta, fields, [&](const std::vector<int>&, double s, long double lw) {
      const std::size_t b = bins.index(s);
      bins.acc[b] += std::exp(lw - shift);
      bins.used[b] = 1;
    });
  }
  std::vector<long double> total(bins.size, 0.0L);
  long double z = 0.0L;
  for (std::size_t b = 0; b < bins.size; ++b) {
    for (std::size_t ch = 0; ch < bins.chunks; ++ch) total[b] += bins.acc[ch * bins.size + b];
    z += total[b];
  }
  for (std::size_t b = 0; b < bins.size; ++b) {
    if (!bins.used[b]) continue;
    law.support.push_back((static_cast<long>(b) - bins.offset) * bins.lattice.unit);
    law.probs.push_back(static_cast<double>(total[b] / z));
  }
  return law;
}

std::string ExactLaw::to_csv() const {
  std::ostringstream os;
  os << "s,prob\n";
  char buf[96];
  for (std::size_t i = 0; i < support.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", support[i], probs[i]);
    os << buf;
  }
  return os.str();
}

namespace {
// A discontinuous target is compared through its left limit before each jump.
double kolmogorov_impl(const ExactLaw& law, double center, double scale,
                       const std::function<double(double)>& target_cdf, bool continuous) {
  if (!(scale > 0.0)) throw InvalidArgument("exact_kolmogorov: scale must be positive");
  long double cum = 0.0L;
  double best = 0.0;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    const double x = (law.support[i] - center) / scale;
    const double F = target_cdf(x);
    const double F_left = continuous ? F : target_cdf(std::nextafter(x, -INFINITY));
    const double before = static_cast<double>(cum);
    cum += law.probs[i];
    const double after = static_cast<double>(std::min(cum, 1.0L));
    best = std::max({best, std::abs(before - F_left), std::abs(after - F)});
  }
  return best;
}
}  // namespace

double exact_kolmogorov(const ExactLaw& law, double center, double scale,
                        const std::function<double(double)>& target_cdf) {
  return kolmogorov_impl(law, center, scale, target_cdf, false);
}

double exact_kolmogorov(const ExactLaw& law, double center, double scale, const LimitLaw& target) {
  return kolmogorov_impl(law, center, scale, [&](double x) { return target.cdf(x); }, true);
}

double discrete_kolmogorov(const ExactLaw& a, const ExactLaw& b, double center, double scale) {
  std::map<double, std::pair<double, double>> merged;
  for (std::size_t i = 0; i < a.support.size(); ++i) merged[(a.support[i] - center) / scale].first += a.probs[i];
  for (std::size_t i = 0; i < b.support.size(); ++i) merged[(b.support[i] - center) / scale].second += b.probs[i];
  long double fa = 0.0L;
  long double fb = 0.0L;
  double best = 0.0;
  for (const auto& [x, p] : merged) {
    fa += p.first;
    fb += p.second;
    best = std::max(best, static_cast<double>(std::fabs(fa - fb)));
  }
  return best;
}

double exact_moment(const ExactLaw& law, double center, double scale, int order) {
  if (order < 0 || order > 16) throw InvalidArgument("exact_moment: order must lie in 0..16");
  if (!(scale > 0.0)) throw InvalidArgument("exact_moment: scale must be positive");
  long double s = 0.0L;
  for (std::size_t i = 0; i < law.support.size(); ++i) {
    const long double x = (static_cast<long double>(law.support[i]) - center) / scale;
    long double p = 1.0L;
    for (int j = 0; j < order; ++j) p *= x;
    s += law.probs[i] * p;
  }
  return static_cast<double>(s);
}

ExactPairResult exact_pair_ingredients(const SpinMeasure& m, int n, double beta, const Regime& regime,
                                       const ExactBudget& budget) {
  check_exact_budget(m, n, {}, budget);
  enum { kP, kMean, kSq, kTail, kFields };
  Bins bins = make_bins(m, n, kFields);
  const auto& atoms = m.atoms();
  const int d = static_cast<int>(atoms.size());
  const double scale = std::pow(static_cast<double>(n), regime.scale_exponent);
  const double lambda = regime.lambda(n);
  const double spin_range = 2.0 * m.support_bound();
  const double A = regime.spin_range_to_A(spin_range, n);
  const long double shift = max_log_weight(m, n, beta, 0.0, 1, bins.chunks);
  std::vector<double> prob(d);
  enumerate_classes(m, n, beta, 0.0, bins.chunks, 1,
                    [&](std::size_t ch, const std::vector<int>& counts, double s, long double lw) {
    const double w = static_cast<double>(std::exp(lw - shift));
    double mean_sum = 0.0;
    double sq_sum = 0.0;
    double tail_sum = 0.0;
    for (int a = 0; a < d; ++a) {
      if (counts[a] == 0) continue;
      const double x = atoms[a].location;
      const ConditionalMean cm = conditional_mean_at(m, beta, Model::standard, n, (s - x) / n);
      // Conditional second moment and the tail part from the atom law.
      double second = 0.0;
      double tail = 0.0;
      {
        const double field = (s - x) / n;
        double lmax = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < d; ++b) {
          const double y = atoms[b].location;
          prob[b] = std::log(atoms[b].weight) + beta * y * field + beta * y * y / (2.0 * n);
          lmax = std::max(lmax, prob[b]);
        }
        double z = 0.0;
        for (int b = 0; b < d; ++b) z += (prob[b] = std::exp(prob[b] - lmax));
        for (int b = 0; b < d; ++b) {
          const double y = atoms[b].location;
          second += prob[b] / z * y * y;
          if (std::abs(x - y) / scale > A) tail += prob[b] / z * (x - y) * (x - y);
        }
      }
      mean_sum += counts[a] * (x - cm.value);
      sq_sum += counts[a] * (x * x - 2.0 * x * cm.value + second);
      tail_sum += counts[a] * tail;
    }
    const std::size_t b = bins.index(s);
    long double* acc = &bins.acc[(ch * bins.size + b) * kFields];
    acc[kP] += w;
    acc[kMean] += static_cast<long double>(w) * (mean_sum / (n * scale));
    acc[kSq] += static_cast<long double>(w) * (sq_sum / (n * scale * scale));
    acc[kTail] += static_cast<long double>(w) * (tail_sum / (n * scale * scale));
    bins.used[b] = 1;
  });
  long double z = 0.0L;
  std::vector<std::array<long double, kFields>> tot(bins.size);
  for (std::size_t b = 0; b < bins.size; ++b) {
    tot[b].fill(0.0L);
    for (std::size_t ch = 0; ch < bins.chunks; ++ch)
      for (int f = 0; f < kFields; ++f) tot[b][f] += bins.acc[(ch * bins.size + b) * kFields + f];
    z += tot[b][kP];
  }
  ExactPairResult out;
  long double e_omq = 0, e_q = 0, e_q2 = 0, e_r2 = 0, e_absr = 0, e_w2 = 0, e_w4 = 0, e_abspsi = 0,
              e_tail = 0, e_wpsi = 0, e_wr = 0;
  for (std::size_t b = 0; b < bins.size; ++b) {
    if (!bins.used[b] || tot[b][kP] == 0.0L) continue;
    const long double p = tot[b][kP] / z;
    const double s = (static_cast<long>(b) - bins.offset) * bins.lattice.unit;
    const double w = (s - n * regime.center) / scale;
    const double q = static_cast<double>(tot[b][kSq] / tot[b][kP]);
    const double cmw = static_cast<double>(tot[b][kMean] / tot[b][kP]);
    const double psi = regime.psi(w);
    const double R = cmw + lambda * psi;
    const double omq = 1.0 - q / (2.0 * lambda);
    e_omq += p * omq * omq;
    e_q += p * q;
    e_q2 += p * q * q;
    e_r2 += p * R * R;
    e_absr += p * std::abs(R);
    e_w2 += p * w * w;
    e_w4 += p * w * w * w * w;
    e_abspsi += p * std::abs(psi);
    e_tail += tot[b][kTail] / z;
    e_wpsi += p * w * psi;
    e_wr += p * w * R;
  }
  BoundIngredients& in = out.ingredients;
  in.lambda = lambda;
  in.A = A;
  in.sigma2 = regime.sigma2;
  in.one_minus_q_sq = static_cast<double>(e_omq);
  in.var_q = std::max(0.0, static_cast<double>(e_q2 - e_q * e_q));
  in.mean_R2 = static_cast<double>(e_r2);
  in.mean_W2 = static_cast<double>(e_w2);
  in.mean_abs_psi = static_cast<double>(e_abspsi);
  in.tail_term = static_cast<double>(e_tail);
  out.mean_abs_R = static_cast<double>(e_absr);
  out.mean_square_diff = static_cast<double>(e_q);
  out.mean_q = static_cast<double>(e_q);
  out.mean_W4 = static_cast<double>(e_w4);
  out.identity_rhs = static_cast<double>(-2.0L * lambda * e_wpsi + 2.0L * e_wr);
  return out;
}

namespace {

// Expectations of monomials prod_{p in mono} X_{site p} by full enumeration.
std::vector<double> monomial_expectations(const SpinMeasure& m, int n, double beta,
                                          const std::vector<double>& fields,
                                          const std::vector<std::vector<int>>& monos) {
  long double shift = -std::numeric_limits<long double>::infinity();
  enumerate_configurations(m, n, beta, fields, [&](const std::vector<int>&, double, long double lw) {
    shift = std::max(shift, lw);
  });
  std::vector<long double> acc(monos.size(), 0.0L);
  long double z = 0.0L;
  const auto& atoms = m.atoms();
  enumerate_configurations(m, n, beta, fields, [&](const std::vector<int>& idx, double, long double lw) {
    const long double w = std::exp(lw - shift);
    z += w;
    for (std::size_t q = 0; q < monos.size(); ++q) {
      long double p = w;
      for (int site : monos[q]) p *= atoms[idx[site]].location;
      acc[q] += p;
    }
  });
  std::vector<double> out(monos.size());
  for (std::size_t q = 0; q < monos.size(); ++q) out[q] = static_cast<double>(acc[q] / z);
  return out;
}

double third_cumulant(const SpinMeasure& m, int n, double beta, const std::vector<double>& fields,
                      int i, int j, int k) {
  const auto e = monomial_expectations(m, n, beta, fields,
                                       {{i}, {j}, {k}, {i, j}, {i, k}, {j, k}, {i, j, k}});
  return e[6] - e[3] * e[2] - e[4] * e[1] - e[5] * e[0] + 2.0 * e[0] * e[1] * e[2];
}

void check_full_budget(const SpinMeasure& m, int n, const ExactBudget& budget) {
  if (!m.is_atomic()) throw InvalidArgument("ursell_check: atomic single-spin measure required");
  const double configs = std::pow(static_cast<double>(m.atoms().size()), n);
  if (configs > budget.max_configurations)
    throw BudgetExceeded("ursell_check: " + format_double(configs) + " configurations exceed the budget");
}

}  // namespace

UrsellReport ursell_check(const SpinMeasure& m, int n, double beta, std::array<int, 4> sites,
                          const std::vector<double>& fields_in, double fd_step,
                          const ExactBudget& budget) {
  if (n < 1 || n > 12) throw InvalidArgument("ursell_check: n must lie in 1..12");
  for (int s : sites)
    if (s < 0 || s >= n) throw InvalidArgument("ursell_check: site index out of range");
  check_full_budget(m, n, budget);
  std::vector<double> fields = fields_in.empty() ? std::vector<double>(n, 0.0) : fields_in;
  if (static_cast<int>(fields.size()) != n) throw InvalidArgument("ursell_check: fields must have length n");
  const int i = sites[0], j = sites[1], k = sites[2], l = sites[3];
  const auto e = monomial_expectations(m, n, beta, fields,
                                       {{i, j, k, l}, {i, j}, {k, l}, {i, k}, {j, l}, {i, l}, {j, k}});
  UrsellReport r;
  r.sites = sites;
  r.n = n;
  r.beta = beta;
  r.fields = fields;
  r.ursell = e[0] - e[1] * e[2] - e[3] * e[4] - e[5] * e[6];
  r.ghs2_exact = beta * beta * beta * third_cumulant(m, n, beta, fields, i, j, k);
  // d/dh_i log Z = beta E[X_i]; mixed second difference in (h_j, h_k).
  auto first = [&](const std::vector<double>& h) {
    return beta * monomial_expectations(m, n, beta, h, {{i}})[0];
  };
  auto second_diff = [&](double step) {
    double acc = 0.0;
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        std::vector<double> h = fields;
        h[j] += s1 * step;
        h[k] += s2 * step;
        acc += s1 * s2 * first(h);
      }
    return acc / (4.0 * step * step);
  };
  r.ghs2_fd = (4.0 * second_diff(0.5 * fd_step) - second_diff(fd_step)) / 3.0;
  return r;
}

Ghs2Search ghs2_search(const SpinMeasure& m, int n_max, const std::vector<double>& betas,
                       const std::vector<double>& field_grid) {
  Ghs2Search out;
  out.max_value = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::array<int, 3>> triples{{0, 0, 0}};
    if (n >= 2) triples.push_back({0, 0, 1});
    if (n >= 3) triples.push_back({0, 1, 2});
    for (double beta : betas)
      for (double h : field_grid)
        for (const auto& t : triples) {
          const std::vector<double> fields(n, h);
          const double v = beta * beta * beta * third_cumulant(m, n, beta, fields, t[0], t[1], t[2]);
          ++out.evaluated;
          if (v > out.max_value) {
            out.max_value = v;
            out.n = n;
            out.beta = beta;
            out.field = h;
            out.sites = t;
          }
        }
  }
  out.found_positive = out.max_value > 1e-12;
  return out;
}

HubbardReport hubbard_density_check(const SpinMeasure& m, int n, double beta, double mcenter,
                                    double gamma_exp, std::size_t grid_points) {
  if (!(gamma_exp > 0.0 && gamma_exp < 1.0))
    throw InvalidArgument("hubbard_density_check: gamma_exp must lie in (0, 1)");
  if (!(beta > 0.0)) throw InvalidArgument("hubbard_density_check: beta must be positive");
  const ExactLaw law = exact_law(m, n, beta);
  const double ng = std::pow(static_cast<double>(n), gamma_exp);
  const double var = 1.0 / (beta * std::pow(static_cast<double>(n), 2.0 * gamma_exp - 1.0));
  const double sd = std::sqrt(var);
  std::vector<double> loc(law.support.size());
  double reach = 0.0;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    loc[i] = (law.support[i] - n * mcenter) / ng;
    reach = std::max(reach, std::abs(loc[i]));
  }
  const double Y = reach + 14.0 * sd;
  auto mixture = [&](double y) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < loc.size(); ++i) {
      const double u = (y - loc[i]) / sd;
      s += law.probs[i] * std::exp(-0.5 * u * u);
    }
    return static_cast<double>(s) / (sd * std::sqrt(2.0 * M_PI));
  };
  const double shrink = std::pow(static_cast<double>(n), 1.0 - gamma_exp);
  auto log_unnorm = [&](double y) { return -n * evaluate_G(m, beta, y / shrink + mcenter); };
  double lmax = -std::numeric_limits<double>::infinity();
  for (double y : linspace(-Y, Y, 4001)) lmax = std::max(lmax, log_unnorm(y));
  const int panels = 800;
  const double z = composite_gauss([&](double y) { return std::exp(log_unnorm(y) - lmax); }, -Y, Y, panels);
  HubbardReport rep;
  rep.grid_points = grid_points;
  rep.grid_half_width = Y;
  rep.mixture_mass = composite_gauss(mixture, -Y, Y, panels);
  rep.density_mass = 1.0;
  for (double y : linspace(-Y, Y, grid_points)) {
    const double a = mixture(y);
    const double b = std::exp(log_unnorm(y) - lmax) / z;
    rep.sup_discrepancy = std::max(rep.sup_discrepancy, std::abs(a - b));
  }
  return rep;
}

std::string write_fixture(const std::string& root, const ExactLaw& law) {
  namespace fs = std::filesystem;
  std::string label = law.measure;
  for (char& c : label)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) c = '_';
  char beta[64];
  std::snprintf(beta, sizeof beta, "%.10g", law.beta);
  const fs::path dir = fs::path(root) / label / beta;
  fs::create_directories(dir);
  const fs::path target = dir / (std::to_string(law.n) + ".csv");
  const fs::path lock_path = fs::path(root) / ".fixtures.lock";
  const int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
  if (fd < 0) throw std::runtime_error("write_fixture: cannot open lock file " + lock_path.string());
  if (::flock(fd, LOCK_EX) != 0) {
    ::close(fd);
    throw std::runtime_error("write_fixture: cannot lock " + lock_path.string());
  }
  const fs::path tmp = dir / (std::to_string(law.n) + ".csv.tmp." + std::to_string(::getpid()));
  {
    std::ofstream os(tmp, std::ios::binary);
    os << law.to_csv();
    if (!os) {
      ::flock(fd, LOCK_UN);
      ::close(fd);
      throw std::runtime_error("write_fixture: write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
  ::flock(fd, LOCK_UN);
  ::close(fd);
  return target.string();
}

ExactLaw read_law_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("read_law_csv: cannot open " + path);
  ExactLaw law;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    law.support.push_back(std::stod(line.substr(0, comma)));
    law.probs.push_back(std::stod(line.substr(comma + 1)));
  }
  return law;
}

Json to_json(const UrsellReport& r) {
  return Json{{"sites", r.sites}, {"n", r.n}, {"beta", r.beta}, {"fields", r.fields},
              {"ursell", r.ursell}, {"ghs2_exact", r.ghs2_exact}, {"ghs2_fd", r.ghs2_fd}};
}

Json to_json(const Ghs2Search& r) {
  return Json{{"found_positive", r.found_positive}, {"max_value", r.max_value}, {"n", r.n},
              {"beta", r.beta}, {"field", r.field}, {"sites", r.sites}, {"evaluated", r.evaluated}};
}

Json to_json(const HubbardReport& r) {
  return Json{{"sup_discrepancy", r.sup_discrepancy}, {"mixture_mass", r.mixture_mass},
              {"density_mass", r.density_mass}, {"grid_points", r.grid_points},
              {"grid_half_width", r.grid_half_width}};
}

}  // namespace cwstein
