#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "glab/experiments.hpp"
#include "glab/greedy.hpp"
#include "glab/io.hpp"
#include "glab/params.hpp"
#include "glab/spaces.hpp"

using namespace glab;
using io::json;

namespace {

constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr int kFailed = 4;

struct Opts {
  std::string space;
  std::size_t m = 1;
  double t = 1.0;
  double tol = 0.0;
  std::size_t budget = 0;
  double max_evals = 1e9;
  std::uint64_t seed = 0;
  std::string window;
  int jobs = 1;
  std::string out, csv, plot;
  bool all_sets = false;
  std::string clist = "2,3,4,8";
  std::string family = "default";
  std::size_t mmax = 4;
  std::string x;
  std::string param;
  std::string p = "2";
  std::string sqrt_set = "rs";
  Index grid = 0;
  int k = 2;
  std::size_t samples = 64;
  std::string a, b, y;
  double lambda = 64.0;
};

SpacePtr need_space(const Opts& o) {
  if (o.space.empty()) throw ParseError("--space is required; " + space_descriptor_grammar());
  return parse_space(o.space);
}

SparseVector need_x(const Opts& o) {
  if (o.x.empty()) throw ParseError("--x is required (a file or inline index:value pairs)");
  return io::load_vector(o.x);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ParseError("bad list entry '" + tok + "'");
    }
  }
  return out;
}

IndexSet parse_set(const std::string& s) {
  std::vector<Index> v;
  for (double d : parse_list(s)) {
    if (d < 1 || d != std::floor(d)) throw ParseError("bad index in set '" + s + "'");
    v.push_back(static_cast<Index>(d));
  }
  return IndexSet(std::move(v));
}

std::optional<std::pair<Index, Index>> parse_window(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("--window expects A:B");
  try {
    const long long lo = std::stoll(s.substr(0, colon)), hi = std::stoll(s.substr(colon + 1));
    if (lo < 1 || hi < lo) throw ParseError("--window needs 1 <= A <= B");
    return std::pair{static_cast<Index>(lo), static_cast<Index>(hi)};
  } catch (const std::logic_error&) {
    throw ParseError("--window expects A:B");
  }
}

GreedyConfig greedy_cfg(const Opts& o) {
  GreedyConfig c;
  c.t = o.t;
  c.tol = o.tol;
  c.budget = o.budget;
  c.seed = o.seed;
  c.jobs = o.jobs;
  c.tie_break = o.all_sets ? TieBreak::Adversarial : TieBreak::LowestIndexFirst;
  c.validate();
  return c;
}

SweepOptions sweep_opts(const Opts& o) {
  if (o.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  return SweepOptions{o.jobs, o.max_evals, o.seed};
}

ExperimentOptions exp_opts(const Opts& o) {
  ExperimentOptions e;
  e.greedy = greedy_cfg(o);
  return e;
}

struct Output {
  json body;
  std::string csv;
  std::vector<std::pair<double, double>> plot;
  bool failed = false;
};

json checks_json(const std::vector<BoundCheck>& checks, bool& failed) {
  json arr = json::array();
  for (const auto& c : checks) {
    arr.push_back(io::to_json(c));
    if (!c.satisfied && !c.advisory) failed = true;
  }
  return arr;
}

Output run_params(const Opts& o) {
  const SpacePtr s = need_space(o);
  const IndexSet window = resolve_window(*s, parse_window(o.window));
  const SweepOptions so = sweep_opts(o);
  const std::string& n = o.param;
  ParamTable t;
  auto sweep = [&] { return IndicatorSweep(*s, window, o.m, so); };
  if (n == "mu_tilde" || n == "mu_tilde_d") {
    auto d = super_democracy(sweep());
    t = n == "mu_tilde" ? d.full : d.disjoint;
  } else if (n == "mu" || n == "mu_d") {
    auto d = unsigned_democracy(sweep());
    t = n == "mu" ? d.full : d.disjoint;
  } else if (n == "mu_tilde_d_alt") {
    t = super_democracy_disjoint_alt(sweep());
  } else if (n == "gamma") {
    t = gamma_cc(sweep());
  } else if (n == "phi") {
    t = fundamental_function(sweep());
  } else if (n == "theta_c") {
    const auto cl = parse_list(o.clist);
    if (cl.empty()) throw ParseError("--c needs a value");
    t = theta_sep(sweep(), cl.front());
  } else if (n == "theta") {
    t = theta_inf(sweep(), parse_list(o.clist));
  } else if (n == "k" || n == "k_c") {
    const auto fam = witness_family(*s, o.m, window, o.family, o.seed);
    auto c = conditionality_est(*s, o.m, window, fam, so);
    t = n == "k" ? c.k : c.k_c;
  } else if (n == "g" || n == "g_c" || n == "g_tilde" || n == "c_q") {
    const auto fam = witness_family(*s, o.m, window, o.family, o.seed);
    auto q = quasi_greedy_est(*s, o.m, window, fam, so);
    t = n == "g" ? q.g : n == "g_c" ? q.g_c : n == "g_tilde" ? q.g_tilde : q.c_q;
  } else {
    throw ParseError("unknown --param '" + n +
                     "'; one of mu_tilde mu_tilde_d mu mu_d mu_tilde_d_alt gamma phi theta_c theta k k_c g g_c "
                     "g_tilde c_q");
  }
  Output out;
  out.body = io::to_json(t);
  out.body["space"] = s->descriptor();
  out.csv = io::table_csv(t);
  for (const auto& [m, e] : t.entries)
    if (e.value) out.plot.emplace_back(static_cast<double>(m), *e.value);
  return out;
}

Output report_output(const WitnessReport& r) {
  Output out;
  out.body = io::to_json(r);
  out.plot.emplace_back(static_cast<double>(r.m), r.ratio);
  for (const auto& b : r.bounds)
    if (!b.satisfied && !b.advisory) out.failed = true;
  return out;
}

Output run_witness(const std::string& kind, const Opts& o) {
  if (kind == "summing") return report_output(witness_summing(o.m, o.t, exp_opts(o)));
  if (kind == "difference") return report_output(witness_difference(o.m, o.t, exp_opts(o)));
  if (kind == "trig") {
    SqrtSet ss;
    if (o.sqrt_set == "rs")
      ss = SqrtSet::RudinShapiro;
    else if (o.sqrt_set == "lacunary")
      ss = SqrtSet::Lacunary;
    else
      throw ParseError("--sqrt-set is rs or lacunary");
    return report_output(witness_trig(parse_exponent(o.p), o.m, o.t, ss, o.grid));
  }
  if (kind == "block") {
    if (!o.space.empty()) {
      const SpacePtr s = parse_space(o.space);
      const auto* bs = dynamic_cast<const BlockSpace*>(s.get());
      if (!bs) throw ParseError("witness block needs a block space descriptor");
      return report_output(witness_block(bs->spec(), o.k, o.samples, o.seed));
    }
    return report_output(witness_block(o.k, o.samples, o.seed));
  }
  if (kind == "cesaro") {
    const SpacePtr s = need_space(o);
    CesaroWitnessInput in;
    in.a = parse_set(o.a);
    in.b = parse_set(o.b);
    if (!o.y.empty()) in.y = io::load_vector(o.y);
    const auto cl = parse_list(o.clist);
    in.c = cl.empty() ? 2.0 : cl.front();
    in.t = o.t;
    in.m = o.m > in.b.size() ? o.m : 0;
    in.lambda = o.lambda;
    return report_output(witness_cesaro_lower(*s, in, exp_opts(o)));
  }
  if (kind == "generic") {
    const SpacePtr s = need_space(o);
    return report_output(witness_generic(*s, o.m, o.t, o.seed, exp_opts(o)));
  }
  throw ParseError("unknown witness kind '" + kind + "'");
}

Output run_check(const std::string& kind, const Opts& o) {
  if (kind == "bounds") {
    const SpacePtr s = need_space(o);
    WitnessReport r;
    SpacePtr ws = s;
    if (s->kind() == "summing") {
      r = witness_summing(o.m, o.t, exp_opts(o));
      ws = parse_space("summing:" + std::to_string(5 * o.m + 1));
    } else if (s->kind() == "difference") {
      r = witness_difference(o.m, o.t, exp_opts(o));
      ws = parse_space("difference:" + std::to_string(4 * o.m + 1));
    } else {
      r = witness_generic(*s, o.m, o.t, o.seed, exp_opts(o));
    }
    const BoundTables tables = compute_bound_tables(*ws, o.m, sweep_opts(o));
    check_upper_bounds(*ws, r, tables);
    return report_output(r);
  }
  if (kind == "mu-chain") {
    const SpacePtr s = need_space(o);
    const IndexSet window = resolve_window(*s, parse_window(o.window));
    const auto checks = check_mu_chain(*s, o.m, window, parse_list(o.clist), sweep_opts(o));
    Output out;
    std::size_t bad = 0;
    for (const auto& c : checks) bad += !c.satisfied;
    out.body = json{{"space", s->descriptor()},
                    {"m", o.m},
                    {"window", json::array({window.min(), window.max()})},
                    {"violations", bad}};
    out.body["checks"] = checks_json(checks, out.failed);
    return out;
  }
  if (kind == "lemmas") {
    const SpacePtr s = need_space(o);
    const auto r = lemma_suite(*s, o.samples, o.seed, o.tol > 0.0 ? o.tol : 1e-9, o.jobs);
    Output out;
    out.body = io::to_json(r);
    out.failed = !r.violations.empty();
    return out;
  }
  throw ParseError("unknown check '" + kind + "'");
}

void emit(const Output& out, const Opts& o, const std::vector<std::string>& argv) {
  const std::string text = io::dump(out.body);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    io::write_file(o.out, text);
    io::RunManifest man;
    man.tool_version = io::kToolVersion;
    man.command_line = argv;
    man.space = o.space;
    man.seed = o.seed;
    man.tolerances = json{{"tol", o.tol}, {"budget", o.budget}, {"max_evals", o.max_evals}};
    man.timestamp = io::utc_timestamp();
    man.output_digest = io::sha256_hex(text);
    io::write_file(io::manifest_path(o.out), io::dump(man.to_json()));
  }
  if (!o.csv.empty()) {
    if (out.csv.empty()) throw ParseError("--csv is only available for params");
    io::write_file(o.csv, out.csv);
  }
  if (!o.plot.empty()) io::write_file(o.plot, io::plot_data(out.plot));
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Chebyshev-greedy Lebesgue constants"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file overriding defaults");
  Opts o;
  app.add_option("--space", o.space, space_descriptor_grammar());
  app.add_option("--m", o.m, "order m (k for block witnesses is --k)");
  app.add_option("--t", o.t, "weakness parameter in (0, 1]");
  app.add_option("--tol", o.tol, "optimizer tolerance (0: space default)");
  app.add_option("--budget", o.budget, "optimizer evaluation budget per projection (0: default)");
  app.add_option("--max-evals", o.max_evals, "cap on norm evaluations for one table");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--window", o.window, "index window A:B");
  app.add_option("--jobs", o.jobs, "worker threads");
  app.add_option("--out", o.out, "JSON output file (stdout when absent)");
  app.add_option("--csv", o.csv, "CSV output of m,value");
  app.add_option("--plot-data", o.plot, "two-column plot data");
  app.add_flag("--all-sets", o.all_sets, "consider every t-greedy set");
  app.add_option("--c", o.clist, "separation constants, comma separated");
  app.add_option("--family", o.family, "witness family for estimated parameters");
  app.add_option("--mmax", o.mmax, "largest m for convergence runs");
  app.add_option("--x", o.x, "vector: file (JSON or text) or inline index:value pairs");
  app.add_option("--param", o.param, "parameter name");
  app.add_option("--p", o.p, "exponent for trigonometric witnesses");
  app.add_option("--sqrt-set", o.sqrt_set, "rs or lacunary");
  app.add_option("--grid", o.grid, "quadrature grid (0: automatic)");
  app.add_option("--k", o.k, "block level");
  app.add_option("--samples", o.samples, "sampled pairs or instances");
  app.add_option("--a", o.a, "set A, comma separated");
  app.add_option("--b", o.b, "set B, comma separated");
  app.add_option("--y", o.y, "vector y");
  app.add_option("--lambda", o.lambda, "padding factor for C");

  std::string kind;
  auto* norm = app.add_subcommand("norm", "norm of a vector");
  auto* greedy = app.add_subcommand("greedy", "t-greedy sets and the greedy approximant");
  auto* cheb = app.add_subcommand("cheb", "Chebyshev greedy step");
  auto* sigma = app.add_subcommand("sigma", "best m-term error");
  auto* params = app.add_subcommand("params", "parameter table over a window");
  auto* witness = app.add_subcommand("witness", "lower-bound witnesses");
  witness->add_option("kind", kind, "summing | difference | trig | block | cesaro | generic")->required();
  auto* check = app.add_subcommand("check", "bound ledgers");
  check->add_option("kind", kind, "bounds | mu-chain | lemmas")->required();
  auto* converge = app.add_subcommand("converge", "Chebyshev and greedy residuals for m = 0..mmax");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  const std::vector<std::string> args(argv, argv + argc);

  try {
    Output out;
    if (norm->parsed()) {
      const SpacePtr s = need_space(o);
      out.body = json{{"space", s->descriptor()}, {"norm", s->norm(need_x(o))}};
    } else if (greedy->parsed()) {
      const SpacePtr s = need_space(o);
      const SparseVector x = need_x(o);
      const GreedyConfig c = greedy_cfg(o);
      const IndexSet canon = canonical_greedy_set(x, o.m, s->window());
      out.body = json{{"space", s->descriptor()}, {"m", o.m}, {"t", o.t}, {"canonical", io::to_json(canon)}};
      out.body["approximant"] = io::to_json(greedy_apply(x, canon));
      out.body["residual_norm"] = greedy_residual(*s, x, canon);
      if (o.all_sets) {
        json sets = json::array();
        for (const auto& a : greedy_sets(x, o.m, c.t, s->window())) sets.push_back(io::to_json(a));
        out.body["sets"] = std::move(sets);
      }
    } else if (cheb->parsed()) {
      const SpacePtr s = need_space(o);
      out.body = io::to_json(chebyshev_step(*s, need_x(o), o.m, greedy_cfg(o)));
      out.body["space"] = s->descriptor();
    } else if (sigma->parsed()) {
      const SpacePtr s = need_space(o);
      const IndexSet window = resolve_window(*s, parse_window(o.window));
      out.body = io::to_json(sigma_m(*s, need_x(o), o.m, window, greedy_cfg(o), o.max_evals));
      out.body["space"] = s->descriptor();
    } else if (params->parsed()) {
      out = run_params(o);
    } else if (witness->parsed()) {
      out = run_witness(kind, o);
    } else if (check->parsed()) {
      out = run_check(kind, o);
    } else if (converge->parsed()) {
      const SpacePtr s = need_space(o);
      const auto r = convergence_run(*s, need_x(o), o.t, o.mmax, greedy_cfg(o));
      out.body = io::to_json(r);
      for (std::size_t m = 0; m < r.chebyshev.size(); ++m) out.plot.emplace_back(static_cast<double>(m), r.chebyshev[m]);
    }
    emit(out, o, args);
    return out.failed ? kFailed : 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const WindowError& e) {
    std::cerr << "window error: " << e.what() << "\n";
    return kBudget;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
