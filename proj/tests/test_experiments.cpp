#include <doctest.h>

#include <cmath>
#include <random>

#include "glab/experiments.hpp"
#include "glab/spaces.hpp"

using namespace glab;

TEST_SUITE("experiments") {
  TEST_CASE("summing witness") {
    const auto a = witness_summing(1, 1.0);
    CHECK(a.ratio == doctest::Approx(5.0).epsilon(1e-12));
    const auto b = witness_summing(2, 0.5);
    CHECK(b.ratio == doctest::Approx(13.0).epsilon(1e-12));
    CHECK(*b.residual == doctest::Approx(2 + 4 + 0.5).epsilon(1e-12));
    CHECK(*b.sigma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b.sigma_exhaustive);
    CHECK(*b.residual <= *b.greedy_residual + 1e-12);
  }

  TEST_CASE("difference witness") {
    const auto a = witness_difference(1, 1.0);
    CHECK(a.ratio == doctest::Approx(5.0).epsilon(1e-12));
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto r = witness_difference(m, 0.5);
      CHECK(*r.residual == doctest::Approx(2.0 * m * 3.0 + 1.0).epsilon(1e-12));
      CHECK(r.chebyshev_coefficients.is_zero());
      CHECK(*r.sigma == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("approximant sigma beyond the exhaustive range") {
    ExperimentOptions o;
    o.sigma_exhaustive_max_m = 0;
    const auto r = witness_summing(5, 0.25, o);
    CHECK_FALSE(r.sigma_exhaustive);
    CHECK(*r.sigma == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.ratio == doctest::Approx(1.0 + 2.0 * 5.0 * 5.0).epsilon(1e-12));
  }

  TEST_CASE("Rudin-Shapiro signs") {
    CHECK(rudin_shapiro(0) == std::vector<int>{1});
    CHECK(rudin_shapiro(2) == std::vector<int>{1, 1, 1, -1});
    // sup norm of the degree-16 polynomial on a fine grid
    const auto rs = rudin_shapiro(4);
    double sup = 0.0;
    const int grid = 4096;
    for (int g = 0; g < grid; ++g) {
      std::complex<double> v = 0.0;
      for (std::size_t j = 0; j < rs.size(); ++j) v += double(rs[j]) * std::polar(1.0, 2.0 * M_PI * g * double(j) / grid);
      sup = std::max(sup, std::abs(v));
    }
    CHECK(sup <= std::sqrt(2.0) * 4.0 + 1e-9);
  }

  TEST_CASE("trigonometric witness") {
    for (std::size_t m : {4, 16, 64}) {
      const auto r = witness_trig(2.0, m, 1.0);
      CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto p1 = witness_trig(1.0, 16, 1.0);
    CHECK(*p1.detail("vp_kernel_l1") <= 3.05);
    CHECK(*p1.detail("vp_operator_l1") <= 3.05);
    const auto w = trig_witness_sets(1.0, 16);
    CHECK(w.a.separated_above(w.b.set_union(w.y.support()), w.c));
    const auto wi = trig_witness_sets(std::numeric_limits<double>::infinity(), 16);
    CHECK(wi.b.separated_above(wi.a, wi.c));
    // lacunary option
    const auto lac = witness_trig(4.0 / 3.0, 8, 1.0, SqrtSet::Lacunary);
    CHECK(lac.ratio > 1.0);
  }

  TEST_CASE("Cesaro lower bound witness") {
    LpSpace l2(2.0, 400);
    CesaroWitnessInput in;
    in.a = {10, 11};
    in.b = {1, 2};
    const auto r = witness_cesaro_lower(l2, in);
    CHECK(r.bounds.at(0).satisfied);
    CHECK(r.ratio >= (in.c - 1.0) / ((in.c + 1.0) * in.t) - 1e-9);

    SummingSpace s(40);
    const auto q = witness_cesaro_lower(s, in);
    // recompute the defining quotient from the returned witness
    const SparseVector x = q.witness;
    const double sigma = s.norm(indicator(in.b));
    CHECK(*q.sigma == doctest::Approx(sigma));
    CHECK(q.ratio == doctest::Approx(*q.residual / sigma));
    CHECK(q.bounds.at(0).satisfied);

    CesaroWitnessInput bad = in;
    bad.a = {3, 4};
    CHECK_THROWS_AS(witness_cesaro_lower(s, bad), Error);
  }

  TEST_CASE("Cesaro witness on the L1 trigonometric system matches the trig path") {
    const auto w = trig_witness_sets(1.0, 8);
    const auto t = witness_trig(1.0, 8, 1.0);
    TrigSpace sp(1.0, w.maxfreq);
    CesaroWitnessInput in;
    in.a = w.a;
    in.b = w.b;
    in.eps = w.eps;
    in.eta = w.eta;
    in.y = w.y;
    in.c = w.c;
    ExperimentOptions o;
    o.greedy.budget = 4000;
    const auto r = witness_cesaro_lower(sp, in, o);
    CHECK(*r.detail("indicator_ratio") == doctest::Approx(t.ratio).epsilon(1e-12));
    CHECK(*r.detail("norm_b_plus_y") == doctest::Approx(*t.detail("norm_b_plus_y")).epsilon(1e-12));
  }

  TEST_CASE("block space gap") {
    const auto r = witness_block(2, 32, 1);
    CHECK(*r.detail("norm_a") == 2048.0);
    CHECK(*r.detail("norm_b") == 2.0);
    CHECK(r.ratio == 1024.0);
    CHECK(*r.expected_ratio == doctest::Approx(1024.0).epsilon(1e-15));
    CHECK(*r.detail("pair_max_ratio") <= 256.0);
    CHECK_THROWS_AS(witness_block(3), WindowError);
    // scaled recursion reproduces the same computation at any level
    const BlockSpec g = BlockSpec::geometric(16, 3);
    const auto q = witness_block(g, 2, 16, 0);
    const double nk = 256.0;
    CHECK(*q.detail("norm_a") == doctest::Approx((nk / 2.0) / std::log2(nk)));
  }

  TEST_CASE("upper bound ledger") {
    const auto tables = compute_bound_tables(SummingSpace(11), 2);
    auto r = witness_summing(2, 1.0);
    SummingSpace s(11);
    check_upper_bounds(s, r, tables);
    bool found = false;
    for (const auto& b : r.bounds) {
      CHECK(b.satisfied);
      if (b.name == "lebesgue_linear") {
        found = true;
        CHECK(b.lhs == doctest::Approx(b.rhs).epsilon(1e-10));
      }
    }
    CHECK(found);
    LpSpace l2(2.0, 10);
    for (double t : {1.0, 0.5}) {
      auto g = witness_generic(l2, 2, t, 3);
      CHECK(g.ratio <= 1.0 + 1e-9);
    }
  }

  TEST_CASE("democracy inequality lattice") {
    for (const char* d : {"summing:8", "lp:1:8"}) {
      const SpacePtr s = parse_space(d);
      const auto checks = check_mu_chain(*s, 3, s->window_set(), {2.0, 3.0});
      CHECK_FALSE(checks.empty());
      for (const auto& c : checks) CHECK_MESSAGE(c.satisfied, c.name);
    }
  }

  TEST_CASE("lemma suite") {
    for (const char* d : {"lp:1:6", "summing:6"}) {
      const SpacePtr s = parse_space(d);
      const auto r = lemma_suite(*s, 60, 2);
      CHECK(r.violations.empty());
      CHECK(r.checked.size() == 5);
    }
    CHECK_THROWS_AS(lemma_suite(*parse_space("trig:2:3"), 5, 0), WindowError);
  }

  TEST_CASE("convergence runs") {
    LpSpace l2(2.0, 8);
    std::vector<double> c;
    for (int n = 1; n <= 6; ++n) c.push_back(std::pow(2.0, -n));
    const SparseVector x = SparseVector::from_dense_real(c);
    const auto r = convergence_run(l2, x, 1.0, 6);
    for (std::size_t m = 0; m <= 6; ++m) {
      double tail = 0.0;
      for (std::size_t n = m + 1; n <= 6; ++n) tail += std::pow(4.0, -double(n));
      CHECK(r.chebyshev[m] == doctest::Approx(std::sqrt(tail)).epsilon(1e-8));
    }
    CHECK(r.chebyshev[6] == 0.0);

    const SparseVector w = summing_witness_vector(1, 1.0);
    SummingSpace s(6);
    const auto q = convergence_run(s, w, 1.0, 6);
    CHECK(q.chebyshev.back() == 0.0);
    CHECK(q.greedy.back() == 0.0);
  }
}
