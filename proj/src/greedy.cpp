#include "glab/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "glab/optim.hpp"
#include "glab/parallel.hpp"

namespace glab {

namespace {

double tie_slack(double v) { return kTieTol * std::max(1.0, std::abs(v)); }

void check_window(const SparseVector& x, Index window) {
  if (window < 1) throw WindowError("window must be at least 1");
  if (x.max_index() > window)
    throw WindowError("vector index " + std::to_string(x.max_index()) + " exceeds window " +
                      std::to_string(window));
}

// |x_n| for n = 1..window, zero-based.
std::vector<double> moduli(const SparseVector& x, Index window) {
  std::vector<double> out(static_cast<std::size_t>(window), 0.0);
  for (const auto& [n, v] : x.entries()) out[static_cast<std::size_t>(n - 1)] = modulus(v);
  return out;
}

}  // namespace

void GreedyConfig::validate() const {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in (0, 1]");
  if (tol < 0.0) throw std::invalid_argument("tol must be non-negative");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

double default_tolerance(const Space& space) { return space.exact_norm() ? 1e-9 : 1e-7; }

bool is_t_greedy(const SparseVector& x, const IndexSet& a, double t, Index window) {
  if (!a.empty() && (a.min() < 1 || a.max() > window)) return false;
  if (x.max_index() > window) return false;
  double min_in = std::numeric_limits<double>::infinity();
  for (Index n : a) min_in = std::min(min_in, modulus(x.coeff(n)));
  double max_out = 0.0;
  for (const auto& [n, v] : x.entries())
    if (!a.contains(n)) max_out = std::max(max_out, modulus(v));
  if (a.empty()) return true;
  return min_in >= t * max_out - tie_slack(max_out);
}

IndexSet canonical_greedy_set(const SparseVector& x, std::size_t m, Index window) {
  check_window(x, window);
  if (m > static_cast<std::size_t>(window))
    throw WindowError("m = " + std::to_string(m) + " exceeds window " + std::to_string(window));
  const auto mod = moduli(x, window);
  std::vector<Index> order(mod.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return mod[static_cast<std::size_t>(a)] > mod[static_cast<std::size_t>(b)]; });
  std::vector<Index> pick(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  for (auto& n : pick) ++n;
  return IndexSet(std::move(pick));
}

std::vector<IndexSet> greedy_sets(const SparseVector& x, std::size_t m, double t, Index window,
                                  std::size_t max_sets) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in (0, 1]");
  const IndexSet canon = canonical_greedy_set(x, m, window);
  if (m == 0) return {IndexSet{}};

  if (window > kExhaustiveWindow) {
    // canonical set plus single swaps that remain t-greedy
    std::set<IndexSet> out{canon};
    std::vector<Index> partners;
    for (const auto& [n, v] : x.entries())
      if (!canon.contains(n)) partners.push_back(n);
    std::size_t zeros = 0;
    for (Index n = 1; n <= window && zeros < m; ++n) {
      if (x.coeff(n) == Scalar{} && !canon.contains(n)) {
        partners.push_back(n);
        ++zeros;
      }
    }
    for (Index a : canon) {
      for (Index b : partners) {
        std::vector<Index> v;
        v.reserve(m);
        for (Index n : canon)
          if (n != a) v.push_back(n);
        v.push_back(b);
        IndexSet cand(std::move(v));
        if (is_t_greedy(x, cand, t, window)) {
          out.insert(std::move(cand));
          if (out.size() > max_sets) throw BudgetError("greedy set count exceeds budget");
        }
      }
    }
    return {out.begin(), out.end()};
  }

  // Exhaustive: group sets by their exact minimum level tau.
  const auto mod = moduli(x, window);
  std::vector<double> levels = mod;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  std::vector<double> distinct;
  for (double v : levels)
    if (distinct.empty() || std::abs(distinct.back() - v) > tie_slack(distinct.back())) distinct.push_back(v);

  std::set<IndexSet> out;
  for (double tau : distinct) {
    std::vector<Index> forced, optional;
    bool at_level_forced = false;
    for (Index n = 1; n <= window; ++n) {
      const double v = mod[static_cast<std::size_t>(n - 1)];
      if (v < tau - tie_slack(tau)) continue;  // cannot sit in A with min tau
      const bool level = std::abs(v - tau) <= tie_slack(tau);
      if (t * v > tau + tie_slack(tau)) {
        forced.push_back(n);
        if (level) at_level_forced = true;
      } else {
        optional.push_back(n);
      }
    }
    if (forced.size() > m) continue;
    const std::size_t need = m - forced.size();
    if (need > optional.size()) continue;
    if (binomial(optional.size(), need) > static_cast<double>(max_sets))
      throw BudgetError("greedy set count exceeds budget");
    for_each_combination(optional, need, [&](const IndexSet& s) {
      IndexSet cand = s.set_union(IndexSet(forced));
      bool hits_level = at_level_forced;
      for (Index n : s)
        if (std::abs(mod[static_cast<std::size_t>(n - 1)] - tau) <= tie_slack(tau)) hits_level = true;
      if (hits_level) out.insert(std::move(cand));
      return out.size() <= max_sets;
    });
    if (out.size() > max_sets) throw BudgetError("greedy set count exceeds budget");
  }
  return {out.begin(), out.end()};
}

SparseVector greedy_apply(const SparseVector& x, const IndexSet& a) { return restrict(x, a); }

Truncation truncate(const SparseVector& x, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("truncation level must be non-negative");
  std::vector<SparseVector::Entry> e;
  std::vector<Index> lam;
  for (const auto& [n, v] : x.entries()) {
    if (modulus(v) > alpha) {
      e.emplace_back(n, alpha * sign(v));
      lam.push_back(n);
    } else {
      e.emplace_back(n, v);
    }
  }
  return {SparseVector(std::move(e)), IndexSet(std::move(lam))};
}

ChebyshevStep chebyshev_project(const Space& space, const SparseVector& x, const IndexSet& a,
                                const GreedyConfig& cfg) {
  cfg.validate();
  check_window(x, space.window());
  if (!a.empty() && a.max() > space.window()) throw WindowError("support exceeds the space window");

  const bool complex = space.field() == Field::Complex;
  const std::vector<Index>& idx = a.indices();
  const int per = complex ? 2 : 1;
  const int d = static_cast<int>(idx.size()) * per;
  const SparseVector outside = restrict_complement(x, a);

  auto build = [&](const Eigen::VectorXd& c) {
    std::vector<SparseVector::Entry> e(outside.entries());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i) * per;
      const Scalar coef = complex ? Scalar(c(k), c(k + 1)) : Scalar(c(k), 0.0);
      e.emplace_back(idx[i], x.coeff(idx[i]) - coef);
    }
    return SparseVector(std::move(e));
  };

  MinimizeOptions opt;
  opt.tol = cfg.tol > 0.0 ? cfg.tol : default_tolerance(space);
  opt.budget = cfg.budget;
  opt.seed = cfg.seed;
  opt.lower_bound = 0.0;
  Eigen::VectorXd greedy(d);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i) * per;
    const Scalar v = x.coeff(idx[i]);
    greedy(k) = v.real();
    if (complex) greedy(k + 1) = v.imag();
  }
  opt.starts = {Eigen::VectorXd::Zero(d), greedy, -greedy};

  const MinimizeResult r =
      minimize_convex([&](const Eigen::VectorXd& c) { return space.norm(build(c)); }, d, opt);

  ChebyshevStep out;
  out.support = a;
  out.residual = build(r.argmin);
  std::vector<SparseVector::Entry> coefs;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i) * per;
    coefs.emplace_back(idx[i], complex ? Scalar(r.argmin(k), r.argmin(k + 1)) : Scalar(r.argmin(k), 0.0));
  }
  out.coefficients = SparseVector(std::move(coefs));
  out.residual_norm = r.value;
  out.achieved_tol = r.achieved_tol;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  return out;
}

ChebyshevStep chebyshev_step(const Space& space, const SparseVector& x, std::size_t m,
                             const GreedyConfig& cfg) {
  cfg.validate();
  std::vector<IndexSet> sets;
  if (cfg.tie_break == TieBreak::Adversarial)
    sets = greedy_sets(x, m, cfg.t, space.window());
  else
    sets = {canonical_greedy_set(x, m, space.window())};

  std::vector<ChebyshevStep> res(sets.size());
  GreedyConfig inner = cfg;
  inner.jobs = 1;
  parallel_for(sets.size(), cfg.jobs, [&](std::size_t i) { res[i] = chebyshev_project(space, x, sets[i], inner); });

  std::size_t worst = 0;
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i].residual_norm > res[worst].residual_norm) worst = i;
  ChebyshevStep out = std::move(res[worst]);
  for (std::size_t i = 0; i < res.size(); ++i) {
    if (i == worst) continue;
    out.evaluations += res[i].evaluations;
    out.converged = out.converged && res[i].converged;
  }
  return out;
}

double greedy_residual(const Space& space, const SparseVector& x, const IndexSet& a) {
  return space.norm(restrict_complement(x, a));
}

}  // namespace glab
