// One pass/fail line per acceptance criterion. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glab/experiments.hpp"
#include "glab/io.hpp"
#include "glab/optim.hpp"
#include "glab/parallel.hpp"
#include "glab/params.hpp"
#include "glab/spaces.hpp"

using namespace glab;
using json = io::json;

namespace {

constexpr double kSharpTol = 1e-9;
constexpr double kSlopeTol = 0.15;
constexpr double kVpBound = 3.0 + 0.05;
constexpr double kLemmaTol = 1e-9;
constexpr double kOptTol = 1e-9;
constexpr double kSigmaRelTol = 1e-8;
constexpr double kZeroRelTol = 1e-9;

constexpr double kLimitSharp = 10.0;
constexpr double kLimitTrig = 120.0;
constexpr double kLimitBlock = 30.0;
constexpr double kLimitChain = 60.0;

struct Outcome {
  bool pass = true;
  std::string why;
  json report = json::object();

  void fail(const std::string& msg) {
    if (pass) why = msg;
    pass = false;
  }
};

double rel_err(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Outcome sharp(bool summing, int jobs) {
  Outcome o;
  ExperimentOptions opt;
  opt.greedy.jobs = jobs;
  json rows = json::array();
  for (std::size_t m = 1; m <= 8; ++m) {
    for (double t : {1.0, 0.5, 0.25}) {
      const auto r = summing ? witness_summing(m, t, opt) : witness_difference(m, t, opt);
      const double want = 1.0 + 2.0 * (1.0 + 1.0 / t) * double(m);
      const std::string tag = "m=" + std::to_string(m) + " t=" + fmt(t);
      if (!(std::abs(r.ratio - want) <= kSharpTol)) o.fail("ratio " + fmt(r.ratio) + " vs " + fmt(want) + " at " + tag);
      if (summing && m <= 3) {
        if (!r.sigma_exhaustive) o.fail("sigma not exhaustive at " + tag);
        if (!(std::abs(*r.sigma - 0.5) <= kSharpTol)) o.fail("sigma " + fmt(*r.sigma) + " at " + tag);
      }
      if (!summing) {
        if (!r.chebyshev_coefficients.is_zero()) o.fail("nonzero Chebyshev correction at " + tag);
        if (!(std::abs(*r.sigma - 1.0) <= kSharpTol)) o.fail("sigma " + fmt(*r.sigma) + " at " + tag);
      }
      rows.push_back(io::to_json(r));
    }
  }
  o.report["witnesses"] = rows;
  return o;
}

Outcome trig(int) {
  Outcome o;
  const std::vector<double> ms{4, 8, 16, 32, 64};
  const double inf = std::numeric_limits<double>::infinity();
  json rows = json::array();
  for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0, inf}) {
    std::vector<double> ratios;
    for (double m : ms) {
      const auto r = witness_trig(p, static_cast<std::size_t>(m), 1.0);
      ratios.push_back(r.ratio);
      if (p == 1.0) {
        for (const char* key : {"vp_kernel_l1", "vp_operator_l1"}) {
          const double v = *r.detail(key);
          if (!(v <= kVpBound)) o.fail(std::string(key) + " = " + fmt(v) + " at m=" + fmt(m));
        }
      }
      rows.push_back(io::to_json(r));
    }
    const double slope = loglog_slope(ms, ratios);
    const double want = std::abs((std::isinf(p) ? 0.0 : 1.0 / p) - 0.5);
    if (!(std::abs(slope - want) <= kSlopeTol)) o.fail("slope " + fmt(slope) + " vs " + fmt(want) + " at p=" + fmt(p));
    o.report["slopes"].push_back({{"p", std::isinf(p) ? json("inf") : json(p)}, {"slope", slope}, {"target", want}});
  }
  o.report["witnesses"] = rows;
  return o;
}

Outcome block(int) {
  Outcome o;
  const auto r = witness_block(2, 64, 7);
  if (*r.detail("norm_a") != 2048.0) o.fail("norm(1_A) = " + fmt(*r.detail("norm_a")));
  if (*r.detail("norm_b") != 2.0) o.fail("norm(1_S2) = " + fmt(*r.detail("norm_b")));
  if (r.ratio != 1024.0) o.fail("ratio = " + fmt(r.ratio));
  const double c2 = *r.detail("pair_max_ratio");
  if (!(c2 <= 256.0)) o.fail("pair ratio " + fmt(c2));
  o.report = io::to_json(r);
  return o;
}

Outcome chain(int jobs) {
  Outcome o;
  SweepOptions so;
  so.jobs = jobs;
  for (const char* d : {"summing:8", "difference:8", "lp:1:8", "lp:2:8"}) {
    const SpacePtr s = parse_space(d);
    const auto checks = check_mu_chain(*s, 3, s->window_set(), {2.0, 3.0}, so);
    json arr = json::array();
    std::size_t bad = 0;
    for (const auto& c : checks) {
      if (!c.satisfied) {
        ++bad;
        o.fail(std::string(d) + ": " + c.name + " " + fmt(c.lhs) + " > " + fmt(c.rhs));
      }
      arr.push_back(io::to_json(c));
    }
    if (checks.empty()) o.fail(std::string(d) + ": no checks ran");
    o.report[d] = {{"checks", arr}, {"violations", bad}};
  }
  return o;
}

Outcome lemmas(int jobs) {
  Outcome o;
  for (const char* d : {"lp:1:8", "lp:2:8", "summing:8"}) {
    const SpacePtr s = parse_space(d);
    const auto r = lemma_suite(*s, 200, 11, kLemmaTol, jobs);
    for (const auto& v : r.violations) o.fail(std::string(d) + ": " + v.name + " " + fmt(v.lhs) + " > " + fmt(v.rhs));
    if (r.instances != 200) o.fail(std::string(d) + ": ran " + std::to_string(r.instances) + " instances");
    o.report[d] = io::to_json(r);
  }
  return o;
}

// Best m-term error by a bitmask walk over supports of size exactly m; each
// support is solved in closed form on lp, otherwise by the minimizer.
double sigma_bitmask(const Space& s, const SparseVector& x, std::size_t m, Index n) {
  const bool lp = s.kind() == "lp";
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
    std::vector<Index> idx;
    for (Index k = 1; k <= n; ++k)
      if (mask >> (k - 1) & 1u) idx.push_back(k);
    double v;
    if (lp) {
      std::vector<SparseVector::Entry> keep;
      for (const auto& [k, c] : x.entries())
        if (!(mask >> (k - 1) & 1u)) keep.emplace_back(k, c);
      v = s.norm(SparseVector(keep));
    } else {
      auto f = [&](const Eigen::VectorXd& a) {
        std::vector<SparseVector::Entry> e;
        for (std::size_t j = 0; j < idx.size(); ++j) e.emplace_back(idx[j], a(static_cast<Eigen::Index>(j)));
        return s.norm(x - SparseVector(e));
      };
      MinimizeOptions mo;
      mo.lower_bound = 0.0;
      Eigen::VectorXd x0(static_cast<Eigen::Index>(m));
      for (std::size_t j = 0; j < m; ++j) x0(static_cast<Eigen::Index>(j)) = x.coeff(idx[j]).real();
      mo.starts = {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)), x0};
      v = minimize_convex(f, static_cast<int>(m), mo).value;
    }
    best = std::min(best, v);
  }
  return best;
}

Outcome oracles(int jobs) {
  Outcome o;
  const std::vector<std::string> spaces{"summing:6", "difference:6", "lp:1:6", "lp:inf:6"};
  constexpr std::size_t kObjectives = 50;
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const SpacePtr s = parse_space(spaces[si]);
    std::vector<json> slot(kObjectives);
    std::vector<std::string> err(kObjectives);
    parallel_for(kObjectives, jobs, [&](std::size_t i) {
      std::mt19937_64 rng(1000 * si + i);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<double> c(6);
      for (auto& v : c) v = u(rng);
      const SparseVector x = SparseVector::from_dense_real(c);
      std::vector<Index> pool{1, 2, 3, 4, 5, 6};
      std::shuffle(pool.begin(), pool.end(), rng);
      const std::size_t d = 1 + i % 3;
      std::vector<Index> a(pool.begin(), pool.begin() + static_cast<long>(d));
      std::sort(a.begin(), a.end());
      auto f = [&](const Eigen::VectorXd& v) {
        std::vector<SparseVector::Entry> e;
        for (std::size_t j = 0; j < d; ++j) e.emplace_back(a[j], v(static_cast<Eigen::Index>(j)));
        return s->norm(x - SparseVector(e));
      };
      // |x_n - a_n| <= ||e*_n|| f(a) <= ||e*_n|| f(x_A) at any minimizer
      Eigen::VectorXd xa(static_cast<Eigen::Index>(d));
      for (std::size_t j = 0; j < d; ++j) xa(static_cast<Eigen::Index>(j)) = c[static_cast<std::size_t>(a[j] - 1)];
      const double f0 = f(xa);
      std::vector<std::pair<double, double>> box;
      double lip = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double r = *s->dual_norm(a[j]) * f0;
        box.emplace_back(xa(static_cast<Eigen::Index>(j)) - r, xa(static_cast<Eigen::Index>(j)) + r);
        lip += s->basis_norm(a[j]);
      }
      double width = 0.0;
      for (const auto& [lo, hi] : box) width = std::max(width, hi - lo);
      const double step = std::max(width, 1e-6) / (d == 3 ? 80.0 : d == 2 ? 400.0 : 100000.0);
      const auto g = grid_oracle(f, box, step);
      // refine around the coarse lattice minimizer
      std::vector<std::pair<double, double>> fine;
      for (std::size_t j = 0; j < d; ++j) {
        const double cj = g.argmin(static_cast<Eigen::Index>(j));
        fine.emplace_back(cj - step, cj + step);
      }
      const double fstep = step / (d == 3 ? 20.0 : 100.0);
      const auto h = grid_oracle(f, fine, fstep);
      MinimizeOptions mo;
      mo.tol = kOptTol;
      mo.seed = i;
      const auto r = minimize_convex(f, static_cast<int>(d), mo);
      const double slack = kOptTol + step * lip;
      const double best = std::min(g.value, h.value);
      if (!(r.value <= best + kOptTol && r.value >= g.value - slack))
        err[i] = spaces[si] + " objective " + std::to_string(i) + ": " + fmt(r.value) + " vs grid " + fmt(best);
      slot[i] = {{"d", d}, {"value", r.value}, {"grid", best}, {"slack", slack}};
    });
    for (const auto& e : err)
      if (!e.empty()) o.fail(e);
    o.report["minimize"][spaces[si]] = slot;
  }

  const std::vector<std::string> sig{"summing:10", "difference:10", "lp:1:10", "lp:2:10"};
  constexpr std::size_t kVectors = 20;
  std::vector<json> slot(kVectors);
  std::vector<std::string> err(kVectors);
  parallel_for(kVectors, jobs, [&](std::size_t i) {
    const SpacePtr s = parse_space(sig[i % sig.size()]);
    std::mt19937_64 rng(5000 + i);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(10);
    for (auto& v : c) v = u(rng);
    const SparseVector x = SparseVector::from_dense_real(c);
    json rows = json::array();
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto a = sigma_m(*s, x, m, s->window_set());
      const double b = sigma_bitmask(*s, x, m, 10);
      if (!(rel_err(a.value, b) <= kSigmaRelTol))
        err[i] = sig[i % sig.size()] + " vector " + std::to_string(i) + " m=" + std::to_string(m) + ": " +
                 fmt(a.value) + " vs " + fmt(b);
      rows.push_back({{"m", m}, {"sigma", a.value}, {"bitmask", b}});
    }
    slot[i] = {{"space", sig[i % sig.size()]}, {"rows", rows}};
  });
  for (const auto& e : err)
    if (!e.empty()) o.fail(e);
  o.report["sigma"] = slot;
  return o;
}

Outcome convergence(int jobs) {
  Outcome o;
  const std::vector<std::string> spaces{"summing:8", "difference:8", "lp:1:8", "lp:2:8", "lp:inf:8"};
  for (std::size_t si = 0; si < spaces.size(); ++si) {
    const SpacePtr s = parse_space(spaces[si]);
    const bool lp = s->kind() == "lp";
    json rows = json::array();
    for (std::size_t i = 0; i < 20; ++i) {
      std::mt19937_64 rng(9000 + 100 * si + i);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      std::vector<Index> pool{1, 2, 3, 4, 5, 6, 7, 8};
      std::shuffle(pool.begin(), pool.end(), rng);
      const std::size_t k = 1 + i % 4;
      std::vector<SparseVector::Entry> e;
      for (std::size_t j = 0; j < k; ++j) e.emplace_back(pool[j], u(rng));
      const SparseVector x(e);
      const double nx = s->norm(x);
      for (double t : {1.0, 0.5}) {
        GreedyConfig cfg;
        cfg.t = t;
        cfg.jobs = jobs;
        const auto r = convergence_run(*s, x, t, k, cfg);
        const std::string tag = spaces[si] + " vector " + std::to_string(i) + " t=" + fmt(t);
        if (!(r.chebyshev[k] <= kZeroRelTol * nx)) o.fail(tag + ": residual " + fmt(r.chebyshev[k]) + " at |supp|");
        for (std::size_t m = 0; m <= k; ++m)
          if (!(r.chebyshev[m] <= nx * (1.0 + kZeroRelTol))) o.fail(tag + ": residual above ||x|| at m=" + std::to_string(m));
        if (lp && r.greedy[k] != 0.0) o.fail(tag + ": greedy residual " + fmt(r.greedy[k]) + " at |supp|");
        rows.push_back(io::to_json(r));
      }
    }
    o.report[spaces[si]] = rows;
  }
  return o;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome(int)> run;
  double limit;  // seconds, 0 for none
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int jobs = 4;
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> crit{
      {1, "sharp equality, summing basis", [](int j) { return sharp(true, j); }, kLimitSharp},
      {2, "sharp equality, difference basis", [](int j) { return sharp(false, j); }, kLimitSharp},
      {3, "trigonometric growth", trig, kLimitTrig},
      {4, "block space gap", block, kLimitBlock},
      {5, "inequality lattice", chain, kLimitChain},
      {6, "lemma suite", lemmas, 0.0},
      {7, "oracle equivalence", oracles, 0.0},
      {8, "convergence", convergence, 0.0},
  };

  bool all = true;
  std::vector<std::string> first;
  for (const auto& c : crit) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(jobs);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0.0 && sec > c.limit) o.fail("runtime " + fmt(sec) + " s over " + fmt(c.limit) + " s");
    first.push_back(io::dump(o.report));
    all = all && o.pass;
    std::printf("criterion %d: %s  [%s] (%.2f s)%s%s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(), sec,
                o.pass ? "" : "  ", o.why.c_str());
    std::fflush(stdout);
  }

  // Determinism: rerun with one thread and again with the requested count.
  Outcome det;
  const auto t0 = std::chrono::steady_clock::now();
  for (int pass = 0; pass < 2; ++pass) {
    const int j = pass == 0 ? 1 : jobs;
    for (std::size_t i = 0; i < crit.size(); ++i) {
      std::string again;
      try {
        again = io::dump(crit[i].run(j).report);
      } catch (const std::exception& e) {
        again = e.what();
      }
      if (again != first[i])
        det.fail("criterion " + std::to_string(crit[i].id) + " differs with --jobs " + std::to_string(j));
    }
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  all = all && det.pass;
  std::printf("criterion 9: %s  [determinism across runs and --jobs] (%.2f s)%s%s\n", det.pass ? "PASS" : "FAIL", sec,
              det.pass ? "" : "  ", det.why.c_str());
  return all ? 0 : 1;
}
