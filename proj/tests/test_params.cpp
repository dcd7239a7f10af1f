#include <doctest.h>

#include <cmath>
#include <random>

#include "glab/experiments.hpp"
#include "glab/params.hpp"
#include "glab/spaces.hpp"

using namespace glab;

namespace {

// Second enumerator: sets as bitmasks over [1, n], signs as bit vectors.
struct Oracle {
  const Space& s;
  Index n;

  IndexSet set_of(unsigned mask) const {
    std::vector<Index> v;
    for (Index k = 1; k <= n; ++k)
      if (mask >> (k - 1) & 1u) v.push_back(k);
    return IndexSet(v);
  }
  double signed_norm(unsigned mask, unsigned signs) const {
    std::vector<SparseVector::Entry> e;
    int j = 0;
    for (Index k = 1; k <= n; ++k)
      if (mask >> (k - 1) & 1u) e.emplace_back(k, (signs >> j++) & 1u ? -1.0 : 1.0);
    return s.norm(SparseVector(e));
  }
  std::pair<double, double> extrema(unsigned mask) const {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    const int k = std::popcount(mask);
    for (unsigned sg = 0; sg < (1u << k); ++sg) {
      const double v = signed_norm(mask, sg);
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return {hi, lo};
  }
  std::vector<unsigned> masks(int k) const {
    std::vector<unsigned> out;
    for (unsigned m = 1; m < (1u << n); ++m)
      if (std::popcount(m) == k) out.push_back(m);
    return out;
  }
  // running sup over 1..m of sup ||1_{eps A}|| / ||1_{eta B}||, |A| = |B| = k
  std::vector<double> mu_tilde(int m, bool disjoint) const {
    std::vector<double> out(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
      double best = out[static_cast<std::size_t>(k) - 1];
      for (unsigned a : masks(k))
        for (unsigned b : masks(k)) {
          if (disjoint && (a & b)) continue;
          best = std::max(best, extrema(a).first / extrema(b).second);
        }
      out[static_cast<std::size_t>(k)] = best;
    }
    return out;
  }
  std::vector<double> gamma(int m) const {
    std::vector<double> out(static_cast<std::size_t>(m) + 1, 0.0);
    for (int k = 1; k <= m; ++k) {
      double best = out[static_cast<std::size_t>(k) - 1];
      for (unsigned a : masks(k)) {
        for (unsigned sg = 0; sg < (1u << k); ++sg) {
          const double den = signed_norm(a, sg);
          for (unsigned b = a; b; b = (b - 1) & a) {
            // signs of A restricted to B
            unsigned sb = 0;
            int ja = 0, jb = 0;
            for (Index i = 1; i <= n; ++i) {
              if (!(a >> (i - 1) & 1u)) continue;
              if (b >> (i - 1) & 1u) sb |= ((sg >> ja) & 1u) << jb++;
              ++ja;
            }
            best = std::max(best, signed_norm(b, sb) / den);
          }
        }
      }
      out[static_cast<std::size_t>(k)] = best;
    }
    return out;
  }
  static Index top(unsigned m) { return 32 - std::countl_zero(m); }
  static Index bottom(unsigned m) { return std::countr_zero(m) + 1; }
  std::optional<double> theta_c(unsigned a, double c) const {
    std::optional<double> best;
    const int k = std::popcount(a);
    for (unsigned b : masks(k)) {
      if (!(double(bottom(b)) > c * double(top(a)))) continue;
      const auto ea = extrema(a), eb = extrema(b);
      const double v = std::max(ea.first / eb.second, eb.first / ea.second);
      best = best ? std::max(*best, v) : v;
    }
    return best;
  }
  std::vector<std::optional<double>> theta(int m, const std::vector<double>& cl) const {
    std::vector<std::optional<double>> out(static_cast<std::size_t>(m) + 1);
    for (int k = 1; k <= m; ++k) {
      std::optional<double> best = out[static_cast<std::size_t>(k) - 1];
      for (unsigned a : masks(k)) {
        std::optional<double> inner;
        bool ok = true;
        for (double c : cl) {
          const auto v = theta_c(a, c);
          if (!v) {
            ok = false;
            break;
          }
          inner = inner ? std::min(*inner, *v) : *v;
        }
        if (ok) best = best ? std::max(*best, *inner) : *inner;
      }
      out[static_cast<std::size_t>(k)] = best;
    }
    return out;
  }
};

}  // namespace

TEST_SUITE("params") {
  TEST_CASE("l1 is superdemocratic with constant 1") {
    LpSpace l1(1.0, 7);
    IndicatorSweep s(l1, l1.window_set(), 3);
    const auto d = super_democracy(s);
    for (std::size_t m = 1; m <= 3; ++m) {
      CHECK(d.full.at(m) == doctest::Approx(1.0));
      CHECK(d.disjoint.at(m) == doctest::Approx(1.0));
    }
    CHECK(d.full.mode == ParamMode::Exact);
  }

  TEST_CASE("super-democracy on the summing window [1, 8] matches a second enumerator") {
    SummingSpace sp(8);
    IndicatorSweep s(sp, sp.window_set(), 2);
    const auto d = super_democracy(s);
    const Oracle o{sp, 8};
    const auto full = o.mu_tilde(2, false), dis = o.mu_tilde(2, true);
    for (std::size_t m = 1; m <= 2; ++m) {
      CHECK(d.full.at(m) == doctest::Approx(full[m]).epsilon(1e-14));
      CHECK(d.disjoint.at(m) == doctest::Approx(dis[m]).epsilon(1e-14));
      CHECK(d.disjoint.at(m) <= d.full.at(m));
    }
    // witness sets realize the value
    const auto& w = d.full.entries.at(2).witness;
    REQUIRE(w.sets.size() == 2);
    CHECK(sp.norm(indicator(w.sets[0], w.signs[0])) / sp.norm(indicator(w.sets[1], w.signs[1])) ==
          doctest::Approx(d.full.at(2)));
  }

  TEST_CASE("unsigned democracy") {
    LpSpace l2(2.0, 8);
    IndicatorSweep s(l2, l2.window_set(), 3);
    const auto u = unsigned_democracy(s);
    for (std::size_t m = 1; m <= 3; ++m) CHECK(u.full.at(m) == doctest::Approx(1.0));
    for (const char* desc : {"summing:7", "difference:7"}) {
      const SpacePtr sp = parse_space(desc);
      IndicatorSweep t(*sp, sp->window_set(), 3);
      const auto uu = unsigned_democracy(t);
      const auto sd = super_democracy(t);
      for (std::size_t m = 1; m <= 3; ++m) {
        CHECK(uu.disjoint.at(m) <= uu.full.at(m) + 1e-12);
        CHECK(uu.full.at(m) <= sd.full.at(m) + 1e-12);
      }
    }
  }

  TEST_CASE("gamma") {
    LpSpace l(1.5, 7);
    IndicatorSweep s(l, l.window_set(), 3);
    const auto g = gamma_cc(s);
    for (std::size_t m = 1; m <= 3; ++m) CHECK(g.at(m) == doctest::Approx(1.0));
    SummingSpace sp(6);
    IndicatorSweep t(sp, sp.window_set(), 3);
    const auto gs = gamma_cc(t);
    const auto oracle = Oracle{sp, 6}.gamma(3);
    for (std::size_t m = 1; m <= 3; ++m) {
      CHECK(gs.at(m) >= 1.0);
      CHECK(gs.at(m) == doctest::Approx(oracle[m]).epsilon(1e-14));
    }
  }

  TEST_CASE("quasi-greedy estimates") {
    LpSpace l1(1.0, 8);
    const auto fam = witness_family(l1, 4, l1.window_set(), "default", 0);
    const auto q = quasi_greedy_est(l1, 4, l1.window_set(), fam);
    for (std::size_t m = 1; m <= 4; ++m) {
      CHECK(q.g.at(m) == doctest::Approx(1.0));
      CHECK(q.g_c.at(m) == doctest::Approx(1.0));
      CHECK(q.g_tilde.at(m) == doctest::Approx(1.0));
    }
    SummingSpace s(12);
    const auto fs = witness_family(s, 6, s.window_set(), "default", 0);
    const auto qs = quasi_greedy_est(s, 6, s.window_set(), fs);
    for (std::size_t m = 1; m <= 6; ++m) CHECK(qs.g_tilde.at(m) <= 2.0 * qs.g.at(m) + 1e-12);
    // linear growth on the alternating family
    const auto alt = witness_family(s, 6, s.window_set(), "alternating", 0);
    const auto qa = quasi_greedy_est(s, 6, s.window_set(), alt);
    for (std::size_t m = 1; m <= 6; ++m) CHECK(qa.g.at(m) >= double(m) - 1e-12);
    CHECK(qs.g.mode == ParamMode::LowerBound);
  }

  TEST_CASE("conditionality") {
    LpSpace l2(2.0, 6);
    const auto c = conditionality_est(l2, 4, l2.window_set(), {});
    for (std::size_t m = 1; m <= 4; ++m) CHECK(c.k.at(m) == doctest::Approx(1.0));
    for (const char* desc : {"summing:8", "difference:8"}) {
      const SpacePtr sp = parse_space(desc);
      const auto fam = witness_family(*sp, 4, sp->window_set(), "default", 0);
      const auto t = conditionality_est(*sp, 4, sp->window_set(), fam);
      CHECK(t.k.mode == ParamMode::Exact);
      for (std::size_t m = 1; m <= 4; ++m) {
        CHECK(t.k_c.at(m) <= 1.0 + sp->frak_k() * double(m) + 1e-12);
        if (sp->kind() == "difference") CHECK(t.k.at(m) >= double(m) / 2.0 - 1e-12);
      }
    }
    // the vertex set grows linearly, so large windows stay exact
    DifferenceSpace big(30);
    const auto ex = conditionality_est(big, 3, IndexSet::range(1, 30), {});
    CHECK(ex.k.mode == ParamMode::Exact);
    for (std::size_t m = 1; m <= 3; ++m) CHECK(ex.k.at(m) >= double(m) / 2.0 - 1e-12);
    // without vertices only family lower bounds are available
    TrigSpace tr(1.0, 4);
    const auto fam = witness_family(tr, 2, tr.window_set(), "alternating", 0);
    const auto est = conditionality_est(tr, 2, tr.window_set(), fam);
    CHECK(est.k.mode == ParamMode::LowerBound);
    for (std::size_t m = 1; m <= 2; ++m) CHECK(est.k.at(m) >= 1.0 - 1e-9);
  }

  TEST_CASE("separation parameters") {
    LpSpace l2(2.0, 12);
    IndicatorSweep s(l2, l2.window_set(), 2);
    for (double c : {2.0, 3.0}) {
      const auto t = theta_sep(s, c);
      for (std::size_t m = 1; m <= 2; ++m) CHECK(t.at(m) == doctest::Approx(1.0));
    }
    const auto th = theta_inf(s, {2.0, 3.0});
    CHECK(th.at(2) == doctest::Approx(1.0));
    CHECK(th.mode == ParamMode::UpperBoundOfInnerInf);

    SummingSpace sp(12);
    IndicatorSweep t(sp, sp.window_set(), 2);
    const auto t2 = theta_sep(t, 2.0), t3 = theta_sep(t, 3.0), t4 = theta_sep(t, 4.0);
    const auto ti = theta_inf(t, {2.0, 3.0});
    const auto oracle = Oracle{sp, 12}.theta(2, {2.0, 3.0});
    for (std::size_t m = 1; m <= 2; ++m) {
      CHECK(t3.at(m) <= t2.at(m) + 1e-12);
      CHECK(t4.at(m) <= t3.at(m) + 1e-12);
      CHECK(ti.at(m) <= t2.at(m) + 1e-12);
      CHECK(ti.at(m) <= t3.at(m) + 1e-12);
      REQUIRE(oracle[m].has_value());
      CHECK(ti.at(m) == doctest::Approx(*oracle[m]).epsilon(1e-14));
    }
    // no separated pair fits
    SummingSpace small(4);
    IndicatorSweep u(small, small.window_set(), 2);
    CHECK_FALSE(theta_sep(u, 4.0).value(1).has_value());
    CHECK(theta_sep(u, 2.0).value(2).has_value());
  }

  TEST_CASE("separation on the L2 trigonometric system") {
    TrigSpace tr(2.0, 6);
    IndicatorSweep s(tr, IndexSet::range(1, 13), 2);
    const auto t = theta_sep(s, 2.0);
    CHECK(t.at(2) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("fundamental function") {
    for (std::size_t m = 1; m <= 4; ++m) {
      LpSpace l1(1.0, 6), l2(2.0, 6);
      SummingSpace s(6);
      CHECK(fundamental_function(IndicatorSweep(l1, l1.window_set(), 4)).at(m) == doctest::Approx(double(m)));
      CHECK(fundamental_function(IndicatorSweep(l2, l2.window_set(), 4)).at(m) == doctest::Approx(std::sqrt(m)));
      CHECK(fundamental_function(IndicatorSweep(s, s.window_set(), 4)).at(m) == doctest::Approx(double(m)));
      CHECK(s.norm(indicator(IndexSet::range(1, Index(m)))) == doctest::Approx(double(m)));
    }
  }

  TEST_CASE("two formulas for the disjoint constant agree") {
    for (const char* desc : {"summing:8", "difference:8", "lp:3:7"}) {
      const SpacePtr sp = parse_space(desc);
      IndicatorSweep s(*sp, sp->window_set(), 3);
      const auto d = super_democracy(s);
      const auto alt = super_democracy_disjoint_alt(s);
      for (std::size_t m = 1; m <= 3; ++m) CHECK(alt.at(m) == doctest::Approx(d.disjoint.at(m)).epsilon(1e-12));
    }
  }

  TEST_CASE("admissibility margins") {
    LpSpace l2(2.0, 8);
    CHECK(admissibility_margin(l2, {1, 3}, 5, 2, l2.window_set()).margin == doctest::Approx(1.0));
    SummingSpace s(8);
    CHECK(admissibility_margin(s, {1, 2, 3}, 5, 3, s.window_set()).margin <= 1.0 + 1e-9);

    DifferenceSpace d(8);
    const auto r = admissibility_margin(d, {1, 2}, 5, 2, d.window_set());
    // coefficient-grid oracle over the same box at a finer step
    auto oracle = [&](double step) {
      double best = 0.0;
      const int per = static_cast<int>(std::lround(2.0 / step)) + 1;
      for (Index b1 = 5; b1 <= 8; ++b1)
        for (Index b2 = b1; b2 <= 8; ++b2) {
          long total = 1;
          for (int j = 0; j < 4; ++j) total *= per;
          for (long code = 0; code < total; ++code) {
            long c = code;
            double v[4];
            for (double& x : v) {
              x = -1.0 + step * double(c % per);
              c /= per;
            }
            const SparseVector pa{{1, v[0]}, {2, v[1]}};
            if (pa.is_zero()) continue;
            const SparseVector z = pa + SparseVector{{b1, v[2]}} + SparseVector{{b2, b2 == b1 ? 0.0 : v[3]}};
            best = std::max(best, d.norm(pa) / d.norm(z));
          }
        }
      return best;
    };
    CHECK(r.margin == doctest::Approx(oracle(0.5)).epsilon(1e-14));
    CHECK(r.margin <= oracle(0.125) + 1e-14);
  }

  TEST_CASE("best m-term error") {
    LpSpace l2(2.0, 10);
    const SparseVector x{{2, 1.0}, {7, -3.0}};
    CHECK(sigma_m(l2, x, 2, l2.window_set()).value == 0.0);
    CHECK(sigma_m(l2, x, 1, l2.window_set()).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(sigma_m(l2, x, 1, l2.window_set(), {}, 5.0), BudgetError);
  }

  TEST_CASE("budgets are enforced") {
    SummingSpace s(30);
    SweepOptions o;
    o.budget = 1000.0;
    CHECK_THROWS_AS(IndicatorSweep(s, s.window_set(), 6, o), BudgetError);
    CHECK(indicator_sweep_cost(8, 2, 2) > 0.0);
    SummingSpace t(10);
    SweepOptions p;
    p.budget = 5000.0;
    IndicatorSweep sw(t, t.window_set(), 3, p);
    CHECK_THROWS_AS(super_democracy(sw), BudgetError);
  }

  TEST_CASE("sweeps are independent of the worker count") {
    DifferenceSpace d(9);
    SweepOptions a, b;
    b.jobs = 4;
    const auto x = super_democracy(IndicatorSweep(d, d.window_set(), 3, a));
    const auto y = super_democracy(IndicatorSweep(d, d.window_set(), 3, b));
    for (std::size_t m = 1; m <= 3; ++m) {
      CHECK(x.full.at(m) == y.full.at(m));
      CHECK(x.full.entries.at(m).witness.sets == y.full.entries.at(m).witness.sets);
    }
  }
}
