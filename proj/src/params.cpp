#include "glab/params.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>

#include "glab/parallel.hpp"

namespace glab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMemoryCap = 1e8;

struct Best {
  double value = -kInf;
  ParamWitness witness;
  bool defined() const { return value > -kInf; }
};

// Keeps the earlier candidate on ties so reductions are order-stable.
void take_max(Best& acc, const Best& cand) {
  if (cand.value > acc.value) acc = cand;
}

ParamTable make_table(const std::string& name, ParamMode mode, const IndexSet& window) {
  ParamTable t;
  t.name = name;
  t.mode = mode;
  t.window = window;
  return t;
}

// Fills entries 1..mmax with the running sup of per-k bests.
void fill_running(ParamTable& t, const std::vector<Best>& per_k, std::size_t mmax) {
  Best run;
  for (std::size_t m = 1; m <= mmax; ++m) {
    if (m < per_k.size()) take_max(run, per_k[m]);
    ParamEntry e;
    if (run.defined()) {
      e.value = run.value;
      e.witness = run.witness;
    }
    t.entries[m] = std::move(e);
  }
}

ParamMode sweep_mode(const IndicatorSweep& s) { return s.exact() ? ParamMode::Exact : ParamMode::LowerBound; }

}  // namespace

std::string to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::Exact:
      return "exact";
    case ParamMode::LowerBound:
      return "lower-bound";
    case ParamMode::UpperBoundOfInnerInf:
      return "upper-bound-of-inner-inf";
  }
  return "unknown";
}

std::optional<double> ParamTable::value(std::size_t m) const {
  auto it = entries.find(m);
  if (it == entries.end()) return std::nullopt;
  return it->second.value;
}

double ParamTable::at(std::size_t m) const {
  const auto v = value(m);
  if (!v) throw Error("parameter " + name + " is undefined at m = " + std::to_string(m));
  return *v;
}

// ---------------------------------------------------------------------------
// IndicatorSweep

double indicator_sweep_cost(std::size_t window_size, std::size_t mmax, std::size_t phases) {
  double total = 0.0;
  for (std::size_t k = 1; k <= mmax; ++k)
    total += binomial(window_size, k) * std::pow(static_cast<double>(phases), static_cast<double>(k - 1));
  return total;
}

IndexSet resolve_window(const Space& space, std::optional<std::pair<Index, Index>> range) {
  if (!range) return space.window_set();
  const auto [lo, hi] = *range;
  if (lo < 1 || hi < lo) throw ParseError("window must be A:B with 1 <= A <= B");
  if (hi > space.window())
    throw WindowError("window end " + std::to_string(hi) + " exceeds the space window " +
                      std::to_string(space.window()));
  return IndexSet::range(lo, hi);
}

IndicatorSweep::IndicatorSweep(const Space& space, IndexSet window, std::size_t mmax, const SweepOptions& opt)
    : space_(&space), window_(std::move(window)), mmax_(mmax), opt_(opt), phases_(phase_grid(space.field())) {
  const std::size_t n = window_.size();
  if (n == 0) throw WindowError("empty window");
  if (window_.max() > space.window()) throw WindowError("window exceeds the space window");
  if (n > 64) throw WindowError("exact sweeps need a window of at most 64 indices");
  if (mmax > n) throw WindowError("m = " + std::to_string(mmax) + " exceeds the window size " + std::to_string(n));
  const double cost = indicator_sweep_cost(n, mmax, phases_.size());
  if (cost > opt.budget)
    throw BudgetError("exact sweep needs " + std::to_string(static_cast<long long>(cost)) +
                      " norm evaluations, above the cap; use a smaller window or m");
  if (cost > kMemoryCap) throw BudgetError("exact sweep table exceeds the memory cap; use a smaller window or m");

  const auto& w = window_.indices();
  masks_.resize(mmax + 1);
  lo_.resize(mmax + 1);
  hi_.resize(mmax + 1);
  lookup_.resize(mmax + 1);
  norms_.resize(mmax + 1);
  max_.resize(mmax + 1);
  min_.resize(mmax + 1);
  argmax_.resize(mmax + 1);
  argmin_.resize(mmax + 1);

  std::vector<Index> positions(n);
  for (std::size_t j = 0; j < n; ++j) positions[j] = static_cast<Index>(j + 1);
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t k = 1; k <= mmax; ++k) {
    for_each_combination(positions, k, [&](const IndexSet& s) {
      std::uint64_t mask = 0;
      for (Index p : s) mask |= std::uint64_t{1} << (p - 1);
      lookup_[k].emplace(mask, masks_[k].size());
      masks_[k].push_back(mask);
      lo_[k].push_back(w[static_cast<std::size_t>(s.min() - 1)]);
      hi_[k].push_back(w[static_cast<std::size_t>(s.max() - 1)]);
      return true;
    });
    const std::size_t c = masks_[k].size();
    norms_[k].assign(c, {});
    max_[k].assign(c, 0.0);
    min_[k].assign(c, 0.0);
    argmax_[k].assign(c, 0);
    argmin_[k].assign(c, 0);
    for (std::size_t i = 0; i < c; ++i) tasks.emplace_back(k, i);
  }

  parallel_for(tasks.size(), opt.jobs, [&](std::size_t ti) {
    const auto [k, i] = tasks[ti];
    const IndexSet a = set(k, i);
    const std::size_t np = patterns(k);
    auto& out = norms_[k][i];
    out.resize(np);
    for (std::size_t p = 0; p < np; ++p) out[p] = space_->norm(indicator(a, pattern(k, i, p)));
    std::size_t amax = 0, amin = 0;
    for (std::size_t p = 1; p < np; ++p) {
      if (out[p] > out[amax]) amax = p;
      if (out[p] < out[amin]) amin = p;
    }
    max_[k][i] = out[amax];
    min_[k][i] = out[amin];
    argmax_[k][i] = amax;
    argmin_[k][i] = amin;
  });
  evaluations_ = static_cast<std::size_t>(cost);
}

std::size_t IndicatorSweep::patterns(std::size_t k) const {
  std::size_t r = 1;
  for (std::size_t j = 1; j < k; ++j) r *= phases_.size();
  return r;
}

IndexSet IndicatorSweep::set(std::size_t k, std::size_t i) const {
  std::vector<Index> v;
  const auto& w = window_.indices();
  std::uint64_t m = masks_[k][i];
  while (m) {
    const int b = std::countr_zero(m);
    v.push_back(w[static_cast<std::size_t>(b)]);
    m &= m - 1;
  }
  return IndexSet(std::move(v));
}

SignPattern IndicatorSweep::pattern(std::size_t k, std::size_t i, std::size_t p) const {
  const IndexSet a = set(k, i);
  std::vector<Scalar> s(k);
  const std::size_t base = phases_.size();
  s[0] = phases_[0];
  for (std::size_t j = 1; j < k; ++j) {
    s[j] = phases_[p % base];
    p /= base;
  }
  return SignPattern::on(a, s);
}

std::size_t IndicatorSweep::find(std::size_t k, std::uint64_t mask) const {
  if (k == 0 || k > mmax_) return npos;
  auto it = lookup_[k].find(mask);
  return it == lookup_[k].end() ? npos : it->second;
}

double IndicatorSweep::sub_norm(std::size_t k, std::size_t i, std::size_t p, std::uint64_t sub) const {
  const std::size_t base = phases_.size();
  const std::uint64_t mask = masks_[k][i];
  std::vector<std::size_t> digits;
  digits.reserve(k);
  std::uint64_t m = mask;
  std::size_t pp = p;
  bool first = true;
  std::size_t first_digit = 0;
  std::size_t q = 0, scale = 1;
  while (m) {
    const int b = std::countr_zero(m);
    std::size_t d = 0;
    if (first) {
      first = false;
    } else {
      d = pp % base;
      pp /= base;
    }
    if (sub & (std::uint64_t{1} << b)) digits.push_back(d);
    m &= m - 1;
  }
  if (digits.empty()) return 0.0;
  first_digit = digits[0];
  for (std::size_t j = 1; j < digits.size(); ++j) {
    q += ((digits[j] + base - first_digit) % base) * scale;
    scale *= base;
  }
  const std::size_t kb = digits.size();
  const std::size_t idx = find(kb, sub);
  return norms_[kb][idx][q];
}

// ---------------------------------------------------------------------------
// Democracy-type tables

namespace {

void guard(const IndicatorSweep& s, double cost, const char* what) {
  if (cost > s.options().budget)
    throw BudgetError(std::string(what) + " needs about " + std::to_string(static_cast<long long>(cost)) +
                      " comparisons, above the budget");
}

double square_cost(const IndicatorSweep& s) {
  double c = 0.0;
  for (std::size_t k = 1; k <= s.mmax(); ++k) c += static_cast<double>(s.count(k)) * static_cast<double>(s.count(k));
  return c;
}

// sup over k of max_i num(k,i) / min_j den(k,j) with optional pair filter.
template <class Num, class Den, class Filter>
std::vector<Best> pair_sweep(const IndicatorSweep& s, Num num, Den den, Filter ok) {
  guard(s, square_cost(s), "pair sweep");
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t k = 1; k <= s.mmax(); ++k) {
    const std::size_t c = s.count(k);
    std::vector<Best> rows(c);
    parallel_for(c, s.options().jobs, [&](std::size_t i) {
      Best b;
      const auto [nv, np] = num(k, i);
      for (std::size_t j = 0; j < c; ++j) {
        if (!ok(k, i, j)) continue;
        const auto [dv, dp] = den(k, j);
        const double r = nv / dv;
        if (r > b.value) {
          b.value = r;
          b.witness.sets = {s.set(k, i), s.set(k, j)};
          b.witness.signs = {s.pattern(k, i, np), s.pattern(k, j, dp)};
        }
      }
      rows[i] = std::move(b);
    });
    for (auto& r : rows) take_max(per_k[k], r);
  }
  return per_k;
}

}  // namespace

DemocracyTables super_democracy(const IndicatorSweep& s) {
  auto num = [&](std::size_t k, std::size_t i) { return std::pair{s.max_signed(k, i), s.argmax_pattern(k, i)}; };
  auto den = [&](std::size_t k, std::size_t j) { return std::pair{s.min_signed(k, j), s.argmin_pattern(k, j)}; };
  DemocracyTables out{make_table("mu_tilde", sweep_mode(s), s.window()),
                      make_table("mu_tilde_d", sweep_mode(s), s.window())};
  fill_running(out.full, pair_sweep(s, num, den, [](auto, auto, auto) { return true; }), s.mmax());
  fill_running(out.disjoint,
               pair_sweep(s, num, den, [&](std::size_t k, std::size_t i, std::size_t j) {
                 return (s.mask(k, i) & s.mask(k, j)) == 0;
               }),
               s.mmax());
  return out;
}

DemocracyTables unsigned_democracy(const IndicatorSweep& s) {
  auto f = [&](std::size_t k, std::size_t i) { return std::pair{s.unsigned_norm(k, i), std::size_t{0}}; };
  DemocracyTables out{make_table("mu", ParamMode::Exact, s.window()), make_table("mu_d", ParamMode::Exact, s.window())};
  fill_running(out.full, pair_sweep(s, f, f, [](auto, auto, auto) { return true; }), s.mmax());
  fill_running(out.disjoint,
               pair_sweep(s, f, f, [&](std::size_t k, std::size_t i, std::size_t j) {
                 return (s.mask(k, i) & s.mask(k, j)) == 0;
               }),
               s.mmax());
  return out;
}

ParamTable super_democracy_disjoint_alt(const IndicatorSweep& s) {
  ParamTable t = make_table("mu_tilde_d_alt", sweep_mode(s), s.window());
  guard(s, square_cost(s) * static_cast<double>(s.mmax()), "mu_tilde_d_alt");
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t ka = 1; ka <= s.mmax(); ++ka) {
    const std::size_t c = s.count(ka);
    std::vector<Best> rows(c);
    parallel_for(c, s.options().jobs, [&](std::size_t i) {
      Best b;
      const double den = s.min_signed(ka, i);
      for (std::size_t kb = 1; kb <= ka; ++kb) {
        for (std::size_t j = 0; j < s.count(kb); ++j) {
          if (s.mask(ka, i) & s.mask(kb, j)) continue;
          const double r = s.max_signed(kb, j) / den;
          if (r > b.value) {
            b.value = r;
            b.witness.sets = {s.set(kb, j), s.set(ka, i)};
            b.witness.signs = {s.pattern(kb, j, s.argmax_pattern(kb, j)), s.pattern(ka, i, s.argmin_pattern(ka, i))};
          }
        }
      }
      rows[i] = std::move(b);
    });
    for (auto& r : rows) take_max(per_k[ka], r);
  }
  fill_running(t, per_k, s.mmax());
  return t;
}

ParamTable gamma_cc(const IndicatorSweep& s) {
  ParamTable t = make_table("gamma", sweep_mode(s), s.window());
  {
    double cost = 0.0;
    for (std::size_t k = 1; k <= s.mmax(); ++k)
      cost += static_cast<double>(s.count(k)) * static_cast<double>(s.patterns(k)) * std::exp2(static_cast<double>(k));
    guard(s, cost, "gamma");
  }
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t k = 1; k <= s.mmax(); ++k) {
    const std::size_t c = s.count(k);
    std::vector<Best> rows(c);
    parallel_for(c, s.options().jobs, [&](std::size_t i) {
      Best b;
      const std::uint64_t mask = s.mask(k, i);
      for (std::size_t p = 0; p < s.patterns(k); ++p) {
        const double den = s.norm(k, i, p);
        for (std::uint64_t sub = mask; sub; sub = (sub - 1) & mask) {
          const double r = s.sub_norm(k, i, p, sub) / den;
          if (r > b.value) {
            b.value = r;
            IndexSet bs;
            {
              std::vector<Index> v;
              const auto& w = s.window().indices();
              for (std::uint64_t m = sub; m; m &= m - 1) v.push_back(w[static_cast<std::size_t>(std::countr_zero(m))]);
              bs = IndexSet(std::move(v));
            }
            b.witness.sets = {bs, s.set(k, i)};
            b.witness.signs = {s.pattern(k, i, p)};
          }
        }
      }
      rows[i] = std::move(b);
    });
    for (auto& r : rows) take_max(per_k[k], r);
  }
  fill_running(t, per_k, s.mmax());
  return t;
}

ParamTable fundamental_function(const IndicatorSweep& s) {
  ParamTable t = make_table("phi_r", ParamMode::Exact, s.window());
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t k = 1; k <= s.mmax(); ++k) {
    for (std::size_t i = 0; i < s.count(k); ++i) {
      Best b;
      b.value = s.unsigned_norm(k, i);
      b.witness.sets = {s.set(k, i)};
      take_max(per_k[k], b);
    }
  }
  fill_running(t, per_k, s.mmax());
  return t;
}

namespace {

// Best two-sided ratio over partners j of set (k, i) with min B > c max A.
Best theta_partner(const IndicatorSweep& s, std::size_t k, std::size_t i, double c) {
  Best b;
  for (std::size_t j = 0; j < s.count(k); ++j) {
    if (!(static_cast<double>(s.min_index(k, j)) > c * static_cast<double>(s.max_index(k, i)))) continue;
    const double up = s.max_signed(k, i) / s.min_signed(k, j);
    const double down = s.max_signed(k, j) / s.min_signed(k, i);
    Best cand;
    if (up >= down) {
      cand.value = up;
      cand.witness.sets = {s.set(k, i), s.set(k, j)};
      cand.witness.signs = {s.pattern(k, i, s.argmax_pattern(k, i)), s.pattern(k, j, s.argmin_pattern(k, j))};
    } else {
      cand.value = down;
      cand.witness.sets = {s.set(k, j), s.set(k, i)};
      cand.witness.signs = {s.pattern(k, j, s.argmax_pattern(k, j)), s.pattern(k, i, s.argmin_pattern(k, i))};
    }
    cand.witness.c = c;
    take_max(b, cand);
  }
  return b;
}

}  // namespace

ParamTable theta_sep(const IndicatorSweep& s, double c) {
  if (!(c >= 1.0)) throw std::invalid_argument("separation constant must be at least 1");
  ParamTable t = make_table("theta_c", sweep_mode(s), s.window());
  guard(s, square_cost(s), "theta");
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t k = 1; k <= s.mmax(); ++k) {
    std::vector<Best> rows(s.count(k));
    parallel_for(s.count(k), s.options().jobs, [&](std::size_t i) { rows[i] = theta_partner(s, k, i, c); });
    for (auto& r : rows) take_max(per_k[k], r);
  }
  fill_running(t, per_k, s.mmax());
  t.notes.push_back("c = " + std::to_string(c));
  if (!t.value(s.mmax())) t.notes.push_back("undefined at this window: no separated pair fits");
  return t;
}

ParamTable theta_inf(const IndicatorSweep& s, const std::vector<double>& clist) {
  if (clist.empty()) throw std::invalid_argument("theta_inf needs a non-empty c list");
  ParamTable t = make_table("theta", ParamMode::UpperBoundOfInnerInf, s.window());
  guard(s, square_cost(s) * static_cast<double>(clist.size()), "theta");
  std::vector<Best> per_k(s.mmax() + 1);
  for (std::size_t k = 1; k <= s.mmax(); ++k) {
    std::vector<Best> rows(s.count(k));
    parallel_for(s.count(k), s.options().jobs, [&](std::size_t i) {
      Best inner;
      inner.value = kInf;
      for (double c : clist) {
        Best b = theta_partner(s, k, i, c);
        if (!b.defined()) return;  // A lacks a partner for this c
        if (b.value < inner.value) inner = std::move(b);
      }
      rows[i] = std::move(inner);
    });
    for (auto& r : rows) take_max(per_k[k], r);
  }
  fill_running(t, per_k, s.mmax());
  std::string cl;
  for (double c : clist) cl += (cl.empty() ? "" : ",") + std::to_string(c);
  t.notes.push_back("inner inf over c replaced by min over {" + cl + "}");
  return t;
}

// ---------------------------------------------------------------------------
// Witness families

std::vector<std::string> witness_family_names() { return {"default", "extremal", "alternating", "random", "indicators"}; }

namespace {

std::vector<SparseVector> family_extremal(const Space& space, const IndexSet& window) {
  std::vector<SparseVector> out;
  const Index lo = window.min(), hi = window.max();
  const Index shift = lo - 1;
  for (double t : {1.0, 0.5}) {
    if (space.kind() == "summing") {
      for (Index m = 1; shift + 5 * m + 1 <= hi; ++m) {
        std::vector<double> c;
        for (Index j = 0; j < m; ++j) c.insert(c.end(), {0.5, 1.0 / t, 0.5});
        c.push_back(0.5);
        for (Index j = 0; j < m; ++j) c.insert(c.end(), {-1.0, 1.0});
        out.push_back(SparseVector::from_dense_real(c, lo));
      }
    } else if (space.kind() == "difference") {
      for (Index m = 1; shift + 4 * m + 1 <= hi; ++m) {
        std::vector<double> c{1.0};
        for (Index j = 0; j < m; ++j) c.insert(c.end(), {1.0, 1.0, -1.0 / t, 1.0});
        out.push_back(SparseVector::from_dense_real(c, lo));
      }
    }
  }
  return out;
}

std::vector<SparseVector> family_alternating(const IndexSet& window, std::size_t mmax) {
  std::vector<SparseVector> out;
  const auto& w = window.indices();
  const std::size_t n = w.size();
  const std::size_t lmax = std::min(n, 2 * mmax + 2);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t len = 1; len <= lmax && s + len <= n; ++len) {
      std::vector<SparseVector::Entry> alt, flat;
      for (std::size_t j = 0; j < len; ++j) {
        alt.emplace_back(w[s + j], (j % 2 == 0) ? 1.0 : -1.0);
        flat.emplace_back(w[s + j], 1.0);
      }
      out.emplace_back(std::move(alt));
      if (len > 1) out.emplace_back(std::move(flat));
    }
  }
  return out;
}

std::vector<SparseVector> family_random(const Space& space, const IndexSet& window, std::size_t mmax,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919ULL + 17ULL);
  std::vector<SparseVector> out;
  const auto& w = window.indices();
  const std::size_t n = w.size();
  const auto phases = phase_grid(space.field());
  std::uniform_real_distribution<double> ratio(0.3, 0.95);
  for (int r = 0; r < 24; ++r) {
    std::uniform_int_distribution<std::size_t> size(1, std::min(n, 2 * mmax + 2));
    const std::size_t s = size(rng);
    std::vector<Index> pos(w);
    std::shuffle(pos.begin(), pos.end(), rng);
    const double q = ratio(rng);
    std::vector<SparseVector::Entry> e;
    std::uniform_int_distribution<std::size_t> ph(0, phases.size() - 1);
    for (std::size_t j = 0; j < s; ++j) e.emplace_back(pos[j], std::pow(q, static_cast<double>(j)) * phases[ph(rng)]);
    out.emplace_back(std::move(e));
  }
  return out;
}

std::vector<SparseVector> family_indicators(const Space& space, const IndexSet& window, std::size_t mmax) {
  const auto phases = phase_grid(space.field());
  std::vector<SparseVector> out;
  if (indicator_sweep_cost(window.size(), mmax, phases.size()) > 20000) return out;
  for (std::size_t k = 1; k <= mmax; ++k) {
    for_each_combination(window.indices(), k, [&](const IndexSet& a) {
      std::size_t np = 1;
      for (std::size_t j = 1; j < k; ++j) np *= phases.size();
      for (std::size_t p = 0; p < np; ++p) {
        std::vector<Scalar> s(k);
        s[0] = 1.0;
        std::size_t pp = p;
        for (std::size_t j = 1; j < k; ++j) {
          s[j] = phases[pp % phases.size()];
          pp /= phases.size();
        }
        out.push_back(indicator(a, SignPattern::on(a, s)));
      }
      return true;
    });
  }
  return out;
}

}  // namespace

std::vector<SparseVector> witness_family(const Space& space, std::size_t mmax, const IndexSet& window,
                                         const std::string& name, std::uint64_t seed) {
  if (window.empty()) throw WindowError("empty window");
  if (name == "extremal") return family_extremal(space, window);
  if (name == "alternating") return family_alternating(window, mmax);
  if (name == "random") return family_random(space, window, mmax, seed);
  if (name == "indicators") return family_indicators(space, window, mmax);
  if (name == "default") {
    std::vector<SparseVector> out = family_extremal(space, window);
    auto add = [&](std::vector<SparseVector> v) { out.insert(out.end(), v.begin(), v.end()); };
    add(family_alternating(window, mmax));
    add(family_random(space, window, mmax, seed));
    add(family_indicators(space, window, mmax));
    return out;
  }
  throw ParseError("unknown witness family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Operator norms

namespace {

double projection_norm_ext(const Space& space, const IndexSet& a, bool complement,
                           const std::vector<SparseVector>& ext) {
  double best = 0.0;
  for (const auto& e : ext) {
    const SparseVector v = complement ? restrict_complement(e, a) : restrict(e, a);
    best = std::max(best, space.norm(v));
  }
  return best;
}

}  // namespace

std::optional<double> projection_norm(const Space& space, const IndexSet& a, bool complement, Index n) {
  if (n < 1 || n > space.window()) throw WindowError("projection window outside the space window");
  const IndexSet inside = a.set_intersection(IndexSet::range(1, n));
  if (space.one_unconditional()) {
    if (!complement) return inside.empty() ? 0.0 : 1.0;
    return inside.size() == static_cast<std::size_t>(n) ? 0.0 : 1.0;
  }
  const auto ext = space.unit_ball_extreme_points(n);
  if (!ext) return std::nullopt;
  return projection_norm_ext(space, inside, complement, *ext);
}

ConditionalityTables conditionality_est(const Space& space, std::size_t mmax, const IndexSet& window,
                                        const std::vector<SparseVector>& family, const SweepOptions& opt) {
  if (window.empty()) throw WindowError("empty window");
  const Index n = window.max();
  std::optional<std::vector<SparseVector>> ext;
  if (!space.one_unconditional()) ext = space.unit_ball_extreme_points(n);
  const bool exact = space.one_unconditional() || ext.has_value();
  const ParamMode mode = exact ? ParamMode::Exact : ParamMode::LowerBound;
  ConditionalityTables out{make_table("k", mode, window), make_table("k_c", mode, window)};

  std::vector<Best> pk(mmax + 1), pkc(mmax + 1);
  // |A| = 0 gives ||I|| = 1.
  pkc[0].value = 1.0;
  pkc[0].witness.sets = {IndexSet{}};

  if (space.one_unconditional()) {
    for (std::size_t k = 1; k <= mmax; ++k) {
      pk[k].value = 1.0;
      pk[k].witness.sets = {IndexSet::range(window.min(), window.min() + static_cast<Index>(k) - 1)};
      pkc[k] = pkc[0];
    }
  } else if (ext) {
    double cost = 0.0;
    for (std::size_t k = 1; k <= mmax; ++k) cost += binomial(window.size(), k) * static_cast<double>(ext->size());
    if (cost > opt.budget) throw BudgetError("exact conditionality sweep exceeds the evaluation cap");
    for (std::size_t k = 1; k <= mmax; ++k) {
      const auto sets = combinations(window.indices(), k);
      std::vector<std::pair<double, double>> vals(sets.size());
      parallel_for(sets.size(), opt.jobs, [&](std::size_t i) {
        vals[i] = {projection_norm_ext(space, sets[i], false, *ext), projection_norm_ext(space, sets[i], true, *ext)};
      });
      for (std::size_t i = 0; i < sets.size(); ++i) {
        Best a, b;
        a.value = vals[i].first;
        a.witness.sets = {sets[i]};
        b.value = vals[i].second;
        b.witness.sets = {sets[i]};
        take_max(pk[k], a);
        take_max(pkc[k], b);
      }
    }
  } else {
    // family lower bounds over a mix of candidate supports
    const std::size_t total_sets = [&] {
      double c = 0.0;
      for (std::size_t k = 1; k <= mmax; ++k) c += binomial(window.size(), k);
      return c <= 5000.0 ? static_cast<std::size_t>(c) : std::size_t{0};
    }();
    std::vector<std::vector<IndexSet>> all(mmax + 1);
    if (total_sets) {
      for (std::size_t k = 1; k <= mmax; ++k) all[k] = combinations(window.indices(), k);
    } else {
      const auto& w = window.indices();
      for (std::size_t k = 1; k <= mmax && k <= w.size(); ++k) {
        std::vector<Index> prefix(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
        all[k].push_back(IndexSet(prefix));
        std::vector<Index> odd, even;
        for (std::size_t j = 0; j < w.size(); j += 2)
          if (odd.size() < k) odd.push_back(w[j]);
        for (std::size_t j = 1; j < w.size(); j += 2)
          if (even.size() < k) even.push_back(w[j]);
        if (odd.size() == k) all[k].push_back(IndexSet(odd));
        if (even.size() == k) all[k].push_back(IndexSet(even));
      }
    }
    std::vector<std::vector<Best>> rows(family.size(), std::vector<Best>(mmax + 1));
    std::vector<std::vector<Best>> rows_c(family.size(), std::vector<Best>(mmax + 1));
    parallel_for(family.size(), opt.jobs, [&](std::size_t f) {
      const SparseVector& x = family[f];
      const double nx = space.norm(x);
      if (nx == 0.0) return;
      for (std::size_t k = 1; k <= mmax; ++k) {
        std::vector<IndexSet> sets = all[k];
        if (!total_sets) {
          try {
            auto g = greedy_sets(x, k, 1.0, n, 2000);
            sets.insert(sets.end(), g.begin(), g.end());
          } catch (const BudgetError&) {
            sets.push_back(canonical_greedy_set(x, k, n));
          }
        }
        for (const auto& a : sets) {
          Best b, bc;
          b.value = space.norm(restrict(x, a)) / nx;
          b.witness.sets = {a};
          b.witness.vector = x;
          bc.value = space.norm(restrict_complement(x, a)) / nx;
          bc.witness = b.witness;
          take_max(rows[f][k], b);
          take_max(rows_c[f][k], bc);
        }
      }
    });
    for (std::size_t f = 0; f < family.size(); ++f) {
      for (std::size_t k = 1; k <= mmax; ++k) {
        take_max(pk[k], rows[f][k]);
        take_max(pkc[k], rows_c[f][k]);
      }
    }
    out.k.notes.push_back("family of " + std::to_string(family.size()) + " vectors");
    out.k_c.notes = out.k.notes;
  }
  // k^c includes |A| = 0
  take_max(pkc[std::min<std::size_t>(1, mmax)], pkc[0]);
  fill_running(out.k, pk, mmax);
  fill_running(out.k_c, pkc, mmax);
  return out;
}

QuasiGreedyTables quasi_greedy_est(const Space& space, std::size_t mmax, const IndexSet& window,
                                   const std::vector<SparseVector>& family, const SweepOptions& opt) {
  if (window.empty()) throw WindowError("empty window");
  const Index n = window.max();
  const bool exact = space.one_unconditional();
  const ParamMode mode = exact ? ParamMode::Exact : ParamMode::LowerBound;
  QuasiGreedyTables out{make_table("g", mode, window), make_table("g_c", mode, window),
                        make_table("g_tilde", mode, window), make_table("C_q", mode, window)};
  std::vector<Best> pg(mmax + 1), pgc(mmax + 1), pgt(mmax + 1);

  if (exact) {
    for (std::size_t k = 1; k <= mmax; ++k) {
      Best one;
      one.value = 1.0;
      one.witness.vector = SparseVector{{window.min(), 1.0}};
      one.witness.sets = {IndexSet{window.min()}};
      pg[k] = pgc[k] = pgt[k] = one;
    }
  } else {
    struct Row {
      std::vector<Best> g, gc, gt;
    };
    std::vector<Row> rows(family.size());
    parallel_for(family.size(), opt.jobs, [&](std::size_t f) {
      Row r{std::vector<Best>(mmax + 1), std::vector<Best>(mmax + 1), std::vector<Best>(mmax + 1)};
      const SparseVector& x = family[f];
      if (x.max_index() > n) {
        rows[f] = std::move(r);
        return;
      }
      const double nx = space.norm(x);
      if (nx == 0.0) {
        rows[f] = std::move(r);
        return;
      }
      std::vector<std::vector<IndexSet>> sets(mmax + 1);
      sets[0] = {IndexSet{}};
      for (std::size_t k = 1; k <= mmax; ++k) {
        try {
          sets[k] = greedy_sets(x, k, 1.0, n, 5000);
        } catch (const BudgetError&) {
          sets[k] = {canonical_greedy_set(x, k, n)};
        }
      }
      auto mk = [&](double v, std::vector<IndexSet> s) {
        Best b;
        b.value = v;
        b.witness.sets = std::move(s);
        b.witness.vector = x;
        return b;
      };
      // |A| = 0 complement is the identity
      take_max(r.gc[1 <= mmax ? 1 : 0], mk(1.0, {IndexSet{}}));
      for (std::size_t k = 1; k <= mmax; ++k) {
        for (const auto& a : sets[k]) {
          take_max(r.g[k], mk(space.norm(restrict(x, a)) / nx, {a}));
          take_max(r.gc[k], mk(space.norm(restrict_complement(x, a)) / nx, {a}));
          for (std::size_t kp = 0; kp < k; ++kp) {
            for (const auto& ap : sets[kp]) {
              if (!ap.subset_of(a)) continue;
              take_max(r.gt[k], mk(space.norm(restrict(x, a.set_difference(ap))) / nx, {ap, a}));
            }
          }
        }
      }
      rows[f] = std::move(r);
    });
    for (const auto& r : rows) {
      for (std::size_t k = 1; k <= mmax; ++k) {
        take_max(pg[k], r.g[k]);
        take_max(pgc[k], r.gc[k]);
        take_max(pgt[k], r.gt[k]);
      }
    }
    out.g.notes.push_back("family of " + std::to_string(family.size()) + " vectors, adversarial greedy sets");
    out.g_c.notes = out.g_tilde.notes = out.g.notes;
  }
  fill_running(out.g, pg, mmax);
  fill_running(out.g_c, pgc, mmax);
  fill_running(out.g_tilde, pgt, mmax);
  out.c_q = out.g;
  out.c_q.name = "C_q";
  out.c_q.notes.push_back("running max of g; finiteness cannot be certified");
  return out;
}

// ---------------------------------------------------------------------------
// sigma_m

SigmaResult sigma_m(const Space& space, const SparseVector& x, std::size_t m, const IndexSet& window,
                    const GreedyConfig& cfg, double max_supports) {
  cfg.validate();
  if (window.empty()) throw WindowError("empty window");
  if (window.max() > space.window()) throw WindowError("window exceeds the space window");
  if (x.max_index() > space.window()) throw WindowError("vector exceeds the space window");
  SigmaResult out;
  const IndexSet supp = x.support();
  if (supp.size() <= m && supp.subset_of(window)) {
    out.value = 0.0;
    out.support = supp;
    out.coefficients = x;
    out.supports = 1;
    return out;
  }
  if (m == 0) {
    out.value = space.norm(x);
    out.supports = 1;
    return out;
  }
  const std::size_t k = std::min(m, window.size());
  if (binomial(window.size(), k) > max_supports)
    throw BudgetError("sigma_m needs C(" + std::to_string(window.size()) + "," + std::to_string(k) +
                      ") supports, above the cap; use a smaller window");
  const auto sets = combinations(window.indices(), k);
  std::vector<ChebyshevStep> res(sets.size());
  GreedyConfig inner = cfg;
  inner.jobs = 1;
  parallel_for(sets.size(), cfg.jobs, [&](std::size_t i) { res[i] = chebyshev_project(space, x, sets[i], inner); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < res.size(); ++i)
    if (res[i].residual_norm < res[best].residual_norm) best = i;
  out.value = res[best].residual_norm;
  out.support = res[best].support;
  out.coefficients = res[best].coefficients;
  out.supports = sets.size();
  for (const auto& r : res) out.converged = out.converged && r.converged;
  return out;
}

// ---------------------------------------------------------------------------
// Admissibility

AdmissibilityResult admissibility_margin(const Space& space, const IndexSet& a, Index n0, std::size_t m,
                                         const IndexSet& window, const SweepOptions& opt) {
  if (a.empty()) throw std::invalid_argument("admissibility needs a non-empty A");
  if (!(n0 > a.max())) throw std::invalid_argument("admissibility needs n0 > max A");
  if (window.empty() || window.max() < n0)
    throw WindowError("window ends before n0 = " + std::to_string(n0));
  if (window.max() > space.window()) throw WindowError("window exceeds the space window");

  std::vector<Index> pool;
  for (Index n : window)
    if (n >= n0) pool.push_back(n);
  const std::size_t kmax = std::min(a.size(), m);
  std::vector<IndexSet> bs{IndexSet{}};
  for (std::size_t k = 1; k <= kmax; ++k) {
    if (binomial(pool.size(), k) > 1e6) throw BudgetError("too many far sets B; shrink the window");
    auto c = combinations(pool, k);
    bs.insert(bs.end(), c.begin(), c.end());
  }

  const bool complex = space.field() == Field::Complex;
  std::vector<Scalar> grid{0.0, -1.0, -0.5, 0.5, 1.0};
  if (complex)
    for (Scalar s : {Scalar(0, 1), Scalar(0, -1), Scalar(0, 0.5), Scalar(0, -0.5)}) grid.push_back(s);

  std::vector<AdmissibilityResult> rows(bs.size());
  parallel_for(bs.size(), opt.jobs, [&](std::size_t bi) {
    AdmissibilityResult r;
    r.margin = 0.0;
    r.b = bs[bi];
    const IndexSet s = a.set_union(bs[bi]);
    const auto& idx = s.indices();
    const double combos = std::pow(static_cast<double>(grid.size()), static_cast<double>(idx.size()));
    auto visit = [&](const std::vector<Scalar>& coef) {
      std::vector<SparseVector::Entry> e;
      for (std::size_t j = 0; j < idx.size(); ++j) e.emplace_back(idx[j], coef[j]);
      const SparseVector z(std::move(e));
      const SparseVector pa = restrict(z, a);
      ++r.samples;
      if (pa.is_zero()) return;
      const double ratio = space.norm(pa) / space.norm(z);
      if (ratio > r.margin) {
        r.margin = ratio;
        r.z = z;
      }
    };
    std::vector<Scalar> coef(idx.size());
    if (combos <= 20000.0) {
      std::vector<std::size_t> d(idx.size(), 0);
      while (true) {
        for (std::size_t j = 0; j < idx.size(); ++j) coef[j] = grid[d[j]];
        visit(coef);
        std::size_t j = 0;
        while (j < d.size() && ++d[j] == grid.size()) d[j++] = 0;
        if (j == d.size()) break;
      }
    } else {
      std::mt19937_64 rng(opt.seed * 1000003ULL + bi);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int sample = 0; sample < 2000; ++sample) {
        for (auto& c : coef) c = complex ? Scalar(u(rng), u(rng)) : Scalar(u(rng), 0.0);
        visit(coef);
      }
    }
    rows[bi] = std::move(r);
  });
  AdmissibilityResult out;
  out.margin = -kInf;
  std::size_t samples = 0;
  for (auto& r : rows) {
    samples += r.samples;
    if (r.margin > out.margin) out = r;
  }
  out.samples = samples;
  return out;
}

}  // namespace glab
