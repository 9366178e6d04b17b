#include "cwstein/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "cwstein/exact_oracle.hpp"
#include "cwstein/free_energy.hpp"
#include "cwstein/limit_laws.hpp"
#include "cwstein/numerics.hpp"
#include "cwstein/pair_dynamics.hpp"
#include "cwstein/rate_harness.hpp"
#include "cwstein/report.hpp"
#include "cwstein/spin_measures.hpp"
#include "cwstein/stein_core.hpp"

namespace cwstein {

namespace {

using Handler = std::function<void(const Json& cfg, ArtifactDir& out, std::ostream& log)>;

void analyze_measure(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const int max_order = c["max_order"].get<int>();
  const GhsReport ghs = check_ghs(m, c["s_max"].get<double>(), c["grid"].get<int>());
  const double bc = critical_beta(m);
  const ExtremalPoint at_bc = classify_extremal(m, bc, 0.0);
  const auto cumulants = cgf_derivatives(m, 0.0, max_order);
  Json r{{"measure", m.to_json()},
         {"label", m.label()},
         {"variance", m.variance()},
         {"beta_c", bc},
         {"cumulants", cumulants},
         {"ghs", to_json(ghs)},
         {"type_at_beta_c", to_json(at_bc)}};
  if (std::isfinite(m.support_bound())) r["support_bound"] = m.support_bound();
  out.write_json("result.json", r);
  log << "beta_c " << format_double(bc) << " ghs " << (ghs.holds ? "holds" : "fails") << " type "
      << at_bc.type_k << " mu " << format_double(at_bc.strength_mu) << "\n";
}

void ghs_check(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const GhsReport ghs = check_ghs(m, c["s_max"].get<double>(), c["grid"].get<int>());
  out.write_json("result.json", Json{{"measure", m.to_json()}, {"ghs", to_json(ghs)}});
  log << "ghs " << (ghs.holds ? "holds" : "fails") << " worst " << format_double(ghs.worst_value) << " at "
      << format_double(ghs.worst_point) << "\n";
}

void minimize_g(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const double beta = c["beta"].get<double>();
  double L = c["search_half_width"].get<double>();
  const FreeEnergyProfile p = find_minima(m, beta, L);
  if (L <= 0.0) L = default_search_half_width(m, beta);
  std::ostringstream csv;
  csv << "s,G\n";
  for (double s : linspace(-L, L, 1001)) csv << format_double(s) << ',' << format_double(evaluate_G(m, beta, s)) << '\n';
  out.write_text("g_profile.csv", csv.str());
  out.write_json("result.json", to_json(p));
  log << p.minima.size() << " minima, maximal type " << p.maximal_type << "\n";
}

void stein_bounds(const Json& c, ArtifactDir& out, std::ostream& log) {
  const LimitLaw law = LimitLaw::build(LawDescriptor::from_json(c["law"]));
  const int workers = c["workers"].get<int>();
  const auto zg = default_z_grid(law, c["z_points"].get<std::size_t>());
  const auto xg = default_x_grid(law, c["x_points"].get<std::size_t>());
  const BoundReport rep = estimate_bound_constants(law, zg, xg, default_h_family(), workers);
  const StructureReport st = check_solution_structure(law, zg, xg);
  Json r{{"law", law.descriptor().to_json()}, {"constants", to_json(rep)}};
  r["structure"] = {{"positive", st.positive},
                    {"sign_violations", st.sign_violations},
                    {"monotone_violations", st.monotone_violations},
                    {"max_residual", st.max_residual},
                    {"symmetry_error", st.symmetry_error}};
  if (const auto canon = law.canonical()) {
    Json tails = Json::array();
    for (double x : c["tail_points"].get<std::vector<double>>()) {
      const TailSandwich t = check_tail_sandwich(law, x);
      tails.push_back({{"x", t.x}, {"lower", t.lower}, {"tail", t.tail}, {"upper", t.upper}, {"holds", t.holds}});
    }
    r["tail_sandwich"] = tails;
    const double lx = c["limit_x"].get<double>();
    const double lz = c["limit_z"].get<double>();
    Json limits = Json::array();
    for (double x : {lx, -lx}) {
      const TailLimit t = check_tail_limit(law, lz, x);
      limits.push_back({{"z", t.z}, {"x", t.x}, {"value", t.value}, {"target", t.target}, {"gap", t.gap},
                        {"within", t.within}});
    }
    r["tail_limits"] = limits;
  }
  out.write_json("result.json", r);
  out.write_text("per_z.csv", per_z_csv(rep));
  out.write_text("law_table.csv", law.table_csv(linspace(-law.effective_range(), law.effective_range(), 801)));
  log << "d1 " << format_double(rep.d1) << " d2 " << format_double(rep.d2) << " d3 " << format_double(rep.d3)
      << " d4 " << format_double(rep.d4) << "\n";
}

void simulate(const Json& c, ArtifactDir& out, std::ostream& log) {
  SamplerSpec spec;
  spec.measure = SpinMeasure::from_json(c["measure"]);
  spec.beta = c["beta"].get<double>();
  spec.n = c["n"].get<int>();
  spec.chains = c["chains"].get<int>();
  spec.burn_in = c["burn_in"].get<long long>();
  spec.thinning = c["thinning"].get<long long>();
  spec.model = model_from_string(c["model"].get<std::string>());
  const Regime regime = Regime::from_json(c.value("regime", Json::object()), spec.measure, spec.beta);
  spec.critical = regime.kind != RegimeKind::clt;
  spec.center = regime.center;
  spec.scale_exponent = regime.scale_exponent;
  std::ofstream dump;
  if (c["dump_pairs"].get<bool>()) {
    std::filesystem::create_directories(out.root());
    dump.open(out.path("pairs.bin"), std::ios::binary);
  }
  const PairStats stats = pair_statistics(spec, regime, c["samples"].get<std::size_t>(), c["seed"].get<std::uint64_t>(),
                                          c["workers"].get<int>(), dump.is_open() ? &dump : nullptr);
  Json r{{"stats", to_json(stats)}};
  if (c.contains("bound_form") && c.contains("constants")) {
    const Json& k = c["constants"];
    const BoundConstants bc{k["d1"].get<double>(), k["d2"].get<double>(), k["d3"].get<double>(), k["d4"].get<double>()};
    const BoundForm form = bound_form_from_string(c["bound_form"].get<std::string>());
    const BoundValue v = evaluate_bound_rhs(ingredients_from(stats), bc, form);
    r["bound"] = {{"form", to_string(form)}, {"total", v.total}, {"terms", v.terms}};
  } else if (c.contains("bound_form") != c.contains("constants")) {
    throw InvalidArgument("/bound_form and /constants must be given together");
  }
  out.write_json("result.json", r);
  log << "samples " << stats.samples << " E|R| " << format_double(stats.mean_abs_R.value) << " split-Rhat "
      << format_double(stats.split_rhat) << "\n";
  for (const auto& w : stats.warnings) log << "warning: " << w << "\n";
}

ExactBudget budget_from(const Json& c) {
  ExactBudget b;
  if (c.contains("budget")) {
    b.max_compositions = c["budget"]["max_compositions"].get<double>();
    b.max_configurations = c["budget"]["max_configurations"].get<double>();
  }
  return b;
}

void exact(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const double beta = c["beta"].get<double>();
  const auto grid = c["n_grid"].get<std::vector<int>>();
  const std::vector<double> fields = c.value("fields", std::vector<double>{});
  const ExactBudget budget = budget_from(c);
  for (int n : grid) check_exact_budget(m, n, fields, budget);
  Json laws = Json::array();
  for (int n : grid) {
    const ExactLaw law = exact_law(m, n, beta, fields, budget, c["workers"].get<int>());
    Json e{{"n", n}, {"support_size", law.support.size()}};
    const double scale = std::sqrt(static_cast<double>(n));
    e["moments_sqrt_n"] = {exact_moment(law, 0.0, scale, 1), exact_moment(law, 0.0, scale, 2),
                           exact_moment(law, 0.0, scale, 4)};
    if (c["write_fixtures"].get<bool>()) {
      const std::string root = out.path("fixtures");
      const std::string path = write_fixture(root, law);
      e["fixture"] = std::filesystem::relative(path, out.root()).string();
    }
    laws.push_back(e);
    log << "n " << n << " support " << law.support.size() << "\n";
  }
  out.write_json("result.json", Json{{"measure", m.to_json()}, {"beta", beta}, {"laws", laws}});
}

void rates(const Json& c, ArtifactDir& out, std::ostream& log) {
  if (!c.contains("beta") && !c.contains("beta_seq")) throw InvalidArgument("/beta: either beta or beta_seq is required");
  if (c.contains("beta") && c.contains("beta_seq")) throw InvalidArgument("/beta: give beta or beta_seq, not both");
  RateSpec spec = RateSpec::from_json(c);
  spec.seed = c["seed"].get<std::uint64_t>();
  RateResult res;
  try {
    res = run_rate_experiment(spec, c["workers"].get<int>());
  } catch (const InvalidArgument& e) {
    if (std::string(e.what()).rfind("fit_rate", 0) == 0) throw NumericalFailure(e.what());
    throw;
  }
  out.write_text("rates.csv", rate_csv(res.fit));
  out.write_text("rates.svg", rate_svg(res.fit, c["title"].get<std::string>()));
  out.write_json("result.json", to_json(res));
  log << "regime " << res.regime << " slope " << format_double(res.fit.slope) << " r2 "
      << format_double(res.fit.r_squared) << " points " << res.fit.used << "\n";
}

void hubbard_check(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const HubbardReport r = hubbard_density_check(m, c["n"].get<int>(), c["beta"].get<double>(),
                                                c["mcenter"].get<double>(), c["gamma_exp"].get<double>(),
                                                c["grid"].get<std::size_t>());
  out.write_json("result.json", to_json(r));
  log << "sup discrepancy " << format_double(r.sup_discrepancy) << "\n";
}

void ursell(const Json& c, ArtifactDir& out, std::ostream& log) {
  const SpinMeasure m = SpinMeasure::from_json(c["measure"]);
  const auto s = c["sites"].get<std::vector<int>>();
  const UrsellReport r = ursell_check(m, c["n"].get<int>(), c["beta"].get<double>(), {s[0], s[1], s[2], s[3]},
                                      c.value("fields", std::vector<double>{}), c["fd_step"].get<double>(),
                                      budget_from(c));
  Json j{{"ursell", to_json(r)}};
  if (c.contains("ghs2_search")) {
    const Json& g = c["ghs2_search"];
    const Ghs2Search found = ghs2_search(m, g["n_max"].get<int>(), g["betas"].get<std::vector<double>>(),
                                         g["fields"].get<std::vector<double>>());
    j["ghs2_search"] = to_json(found);
    log << "ghs2 search max " << format_double(found.max_value) << (found.found_positive ? " (positive)" : "") << "\n";
  }
  out.write_json("result.json", j);
  log << "ursell " << format_double(r.ursell) << " ghs2 " << format_double(r.ghs2_exact) << "\n";
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"analyze-measure", analyze_measure}, {"ghs-check", ghs_check},   {"minimize-g", minimize_g},
      {"stein-bounds", stein_bounds},       {"simulate", simulate},     {"exact", exact},
      {"rates", rates},                     {"hubbard-check", hubbard_check}, {"ursell-check", ursell}};
  return h;
}

}  // namespace

int execute(const ExperimentConfig& cfg, std::ostream& log) {
  ArtifactDir out(cfg.effective["out"].get<std::string>());
  int code = kExitOk;
  std::string error;
  try {
    const auto it = handlers().find(cfg.command);
    if (it == handlers().end()) throw InvalidArgument("unknown command '" + cfg.command + "'");
    it->second(cfg.effective, out, log);
  } catch (const InvalidArgument& e) {
    code = kExitInvalid;
    error = e.what();
  } catch (const BudgetExceeded& e) {
    code = kExitBudget;
    error = e.what();
  } catch (const NumericalFailure& e) {
    code = kExitNumerical;
    error = e.what();
  } catch (const std::exception& e) {
    code = kExitFailure;
    error = e.what();
  }
  if (!error.empty()) log << "error: " << error << "\n";
  try {
    out.write_json("config.json", cfg.effective);
    std::vector<std::string> outputs = out.written();
    outputs.push_back("manifest.json");
    out.write_json("manifest.json", make_manifest(cfg.command, cfg.effective, outputs, code, error));
  } catch (const std::exception& e) {
    log << "error: cannot write manifest: " << e.what() << "\n";
    if (code == kExitOk) code = kExitFailure;
  }
  return code;
}

}  // namespace cwstein
