#include "glab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "glab/parallel.hpp"

namespace glab {

namespace {

constexpr double kCmpTol = 1e-12;

bool leq(double a, double b, double tol = kCmpTol) { return a <= b + tol * std::max(1.0, std::abs(b)); }

double max_abs_coefficient(const SparseVector& v) { return v.max_modulus(); }

void check_t(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("t must lie in (0, 1]");
}

}  // namespace

std::optional<double> WitnessReport::detail(const std::string& key) const {
  for (const auto& [k, v] : details)
    if (k == key) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Summing and difference witnesses

SparseVector summing_witness_vector(std::size_t m, double t) {
  check_t(t);
  if (m < 1) throw std::invalid_argument("witness needs m >= 1");
  std::vector<double> c;
  for (std::size_t j = 0; j < m; ++j) c.insert(c.end(), {0.5, 1.0 / t, 0.5});
  c.push_back(0.5);
  for (std::size_t j = 0; j < m; ++j) c.insert(c.end(), {-1.0, 1.0});
  return SparseVector::from_dense_real(c);
}

SparseVector difference_witness_vector(std::size_t m, double t) {
  check_t(t);
  if (m < 1) throw std::invalid_argument("witness needs m >= 1");
  std::vector<double> c{1.0};
  for (std::size_t j = 0; j < m; ++j) c.insert(c.end(), {1.0, 1.0, -1.0 / t, 1.0});
  return SparseVector::from_dense_real(c);
}

namespace {

// Shared tail of the two sharp witnesses.
WitnessReport sharp_report(const std::string& kind, const Space& space, const SparseVector& x, const IndexSet& a,
                           const SparseVector& approximant, std::size_t m, double t, const ExperimentOptions& opt) {
  if (!is_t_greedy(x, a, t, space.window())) throw Error(kind + " witness set is not t-greedy");
  WitnessReport r;
  r.kind = kind;
  r.space = space.descriptor();
  r.m = m;
  r.t = t;
  r.witness = x;
  r.greedy_set = a;
  const ChebyshevStep step = chebyshev_project(space, x, a, opt.greedy);
  r.residual = step.residual_norm;
  r.chebyshev_coefficients = step.coefficients;
  r.achieved_tol = step.achieved_tol;
  r.converged = step.converged;
  r.greedy_residual = greedy_residual(space, x, a);
  const double approx = space.norm(x - approximant);
  if (m <= opt.sigma_exhaustive_max_m) {
    const SigmaResult s = sigma_m(space, x, m, space.window_set(), opt.greedy);
    r.sigma = s.value;
    r.sigma_exhaustive = true;
    r.converged = r.converged && s.converged;
    r.details.emplace_back("sigma_supports", static_cast<double>(s.supports));
  } else {
    r.sigma = approx;
    r.notes.push_back("sigma is the explicit approximant value (upper bound); ratio is a lower bound");
  }
  r.ratio = *r.residual / *r.sigma;
  r.expected_ratio = 1.0 + 2.0 * (1.0 + 1.0 / t) * static_cast<double>(m);
  r.details.emplace_back("sigma_approximant", approx);
  r.details.emplace_back("chebyshev_correction_max", max_abs_coefficient(step.coefficients));
  r.details.emplace_back("evaluations", static_cast<double>(step.evaluations));
  return r;
}

}  // namespace

WitnessReport witness_summing(std::size_t m, double t, const ExperimentOptions& opt) {
  const SparseVector x = summing_witness_vector(m, t);
  SummingSpace space(static_cast<Index>(5 * m + 1));
  std::vector<Index> a, big;
  for (std::size_t j = 0; j < m; ++j) {
    a.push_back(static_cast<Index>(3 * m + 2 + 2 * j));
    big.push_back(static_cast<Index>(3 * j + 2));
  }
  // subtract (t+1)/t at the 1/t entries
  const SparseVector approx = ((t + 1.0) / t) * indicator(IndexSet(big));
  WitnessReport r = sharp_report("summing", space, x, IndexSet(a), approx, m, t, opt);
  r.details.emplace_back("expected_residual", static_cast<double>(m) * (1.0 + 1.0 / t) + 0.5);
  return r;
}

WitnessReport witness_difference(std::size_t m, double t, const ExperimentOptions& opt) {
  const SparseVector x = difference_witness_vector(m, t);
  DifferenceSpace space(static_cast<Index>(4 * m + 1));
  std::vector<Index> gamma, low;
  for (std::size_t j = 1; j <= m; ++j) {
    gamma.push_back(static_cast<Index>(4 * j - 2));
    low.push_back(static_cast<Index>(4 * j));
  }
  const SparseVector approx = -(1.0 + 1.0 / t) * indicator(IndexSet(low));
  WitnessReport r = sharp_report("difference", space, x, IndexSet(gamma), approx, m, t, opt);
  r.details.emplace_back("expected_residual", 2.0 * static_cast<double>(m) * (1.0 + 1.0 / t) + 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Trigonometric system

std::vector<int> rudin_shapiro(int L) {
  if (L < 0) throw std::invalid_argument("Rudin-Shapiro order must be >= 0");
  std::vector<int> p{1}, q{1};
  for (int k = 0; k < L; ++k) {
    std::vector<int> np(p), nq(p);
    np.insert(np.end(), q.begin(), q.end());
    for (int v : q) nq.push_back(-v);
    p = std::move(np);
    q = std::move(nq);
  }
  return p;
}

namespace {

std::vector<Scalar> rs_signs(std::size_t len) {
  int L = 0;
  while ((std::size_t{1} << L) < len) ++L;
  const auto rs = rudin_shapiro(L);
  return std::vector<Scalar>(rs.begin(), rs.begin() + static_cast<std::ptrdiff_t>(len));
}

std::vector<Index> consecutive(Index from, std::size_t len) {
  std::vector<Index> f(len);
  for (std::size_t j = 0; j < len; ++j) f[j] = from + static_cast<Index>(j);
  return f;
}

std::vector<Index> lacunary(Index at_least, std::size_t len) {
  Index base = 1;
  while (base < at_least) base *= 2;
  std::vector<Index> f(len);
  for (std::size_t j = 0; j < len; ++j) {
    if (j > 0 && base > (Index{1} << 40)) throw WindowError("lacunary frequencies overflow; use the Rudin-Shapiro set");
    f[j] = base;
    base *= 2;
  }
  return f;
}

IndexSet freq_set(const std::vector<Index>& freqs) {
  std::vector<Index> idx;
  for (Index f : freqs) idx.push_back(TrigSpace::index_of(f));
  return IndexSet(idx);
}

// Sign pattern keyed by index from signs listed in frequency order.
SignPattern freq_pattern(const std::vector<Index>& freqs, const std::vector<Scalar>& signs) {
  std::map<Index, Scalar> m;
  for (std::size_t j = 0; j < freqs.size(); ++j) m[TrigSpace::index_of(freqs[j])] = signs[j];
  return SignPattern(m);
}

Index max_abs(const std::vector<Index>& f) {
  Index r = 0;
  for (Index v : f) r = std::max(r, v < 0 ? -v : v);
  return r;
}

}  // namespace

TrigWitnessSets trig_witness_sets(double p, std::size_t m, SqrtSet sqrt_set) {
  if (!(p >= 1.0)) throw std::invalid_argument("trig witness needs p >= 1");
  if (m < 1) throw std::invalid_argument("trig witness needs m >= 1");
  TrigWitnessSets w;
  const Index l = static_cast<Index>((m - 1) / 2);
  const std::size_t len = static_cast<std::size_t>(2 * l + 1);
  const auto sym = consecutive(-l, len);
  auto flat = [&](std::size_t n) { return std::vector<Scalar>(n, Scalar(1.0)); };
  std::vector<Index> fa, fb;
  std::vector<Scalar> sa, sb;

  if (std::isinf(p)) {
    fa = consecutive(1, m);
    sa = flat(m);
    const Index n0 = 2 * static_cast<Index>(m) + 1;
    fb = sqrt_set == SqrtSet::Lacunary ? lacunary(n0, m) : consecutive(n0, m);
    sb = sqrt_set == SqrtSet::Lacunary ? flat(m) : rs_signs(m);
    w.a_above = false;
  } else if (p > 2.0) {
    if (sqrt_set == SqrtSet::Lacunary) {
      fb = lacunary(1, len);
      sb = flat(len);
    } else {
      fb = sym;
      sb = rs_signs(len);
    }
    fa = consecutive(max_abs(fb) + 1, len);
    sa = flat(len);
  } else {
    fb = sym;
    sb = flat(len);
    const Index n0 = p == 1.0 ? 4 * l + 4 : 2 * l + 2;
    fa = sqrt_set == SqrtSet::Lacunary ? lacunary(n0, len) : consecutive(n0, len);
    sa = sqrt_set == SqrtSet::Lacunary ? flat(len) : rs_signs(len);
    if (p == 1.0) w.y = restrict_complement(vallee_poussin_kernel(l), freq_set(sym));
  }
  w.a = freq_set(fa);
  w.b = freq_set(fb);
  w.eps = freq_pattern(fa, sa);
  w.eta = freq_pattern(fb, sb);
  w.maxfreq = std::max({max_abs(fa), max_abs(fb), p == 1.0 ? 2 * l + 1 : Index{0}});
  return w;
}

WitnessReport witness_trig(double p, std::size_t m, double t, SqrtSet sqrt_set, Index grid) {
  check_t(t);
  const TrigWitnessSets w = trig_witness_sets(p, m, sqrt_set);
  TrigSpace space(p, w.maxfreq, grid);
  const SparseVector num = indicator(w.a, w.eps);
  const SparseVector den = indicator(w.b, w.eta) + w.y;
  const double na = space.norm(num), nd = space.norm(den);
  const double beta = space.cesaro_beta().value_or(1.0);

  WitnessReport r;
  r.kind = "trig";
  r.space = space.descriptor();
  r.m = m;
  r.t = t;
  r.witness = num + t * den;
  r.greedy_set = w.b;
  r.ratio = na / nd;
  r.ratio_kind = "indicator";
  r.details = {{"p", p},
               {"norm_a", na},
               {"norm_b_plus_y", nd},
               {"size_a", static_cast<double>(w.a.size())},
               {"size_b", static_cast<double>(w.b.size())},
               {"c", w.c},
               {"beta", beta},
               {"lower_bound", r.ratio * (w.c - 1.0) / ((w.c + 1.0) * t * beta * beta)},
               {"maxfreq", static_cast<double>(w.maxfreq)},
               {"grid", static_cast<double>(space.grid())},
               {"exponent", std::isinf(p) ? 0.5 : std::abs(1.0 / p - 0.5)}};
  if (p == 1.0) {
    const Index l = static_cast<Index>((m - 1) / 2);
    r.details.emplace_back("vp_kernel_l1", nd);
    const SparseVector d = dirichlet_kernel(2 * l + 1);
    const SparseVector v = vp_operator(space, d, 2 * l + 1, 4 * l + 3);
    r.details.emplace_back("vp_operator_l1", space.norm(v));
  }
  r.notes.push_back("ratio is ||1_{eps A}|| / ||1_{eta B} + y||; the Lebesgue lower bound scales it by (c-1)/((c+1) t beta^2)");
  if (!space.exact_norm()) r.notes.push_back("quadrature norm on an equispaced grid");
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs at least two points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log2(x[i]), ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Cesaro lower-bound witness

WitnessReport witness_cesaro_lower(const Space& space, const CesaroWitnessInput& in, const ExperimentOptions& opt) {
  check_t(in.t);
  if (in.a.size() != in.b.size()) throw std::invalid_argument("witness needs |A| = |B|");
  if (in.a.empty()) throw std::invalid_argument("witness needs non-empty A and B");
  if (in.y.max_modulus() > 1.0 + 1e-12) throw std::invalid_argument("witness needs |y_n| <= 1");
  if (!(in.c >= 1.0)) throw std::invalid_argument("separation constant must be at least 1");
  const IndexSet low = in.b.set_union(in.y.support());
  const bool a_above = in.a.separated_above(low, in.c);
  const bool b_above = in.y.is_zero() && in.b.separated_above(in.a, in.c);
  if (!a_above && !b_above) throw Error("separation violated: need A > c(B u supp y) or B > cA with y = 0");
  const auto beta = space.cesaro_beta();
  if (!beta) throw Error("space " + space.descriptor() + " has no Cesaro constant");

  const SignPattern eps = in.eps.values().empty() ? SignPattern::ones(in.a) : in.eps;
  const SignPattern eta = in.eta.values().empty() ? SignPattern::ones(in.b) : in.eta;
  const std::size_t m = in.m ? in.m : in.b.size();
  if (m < in.b.size()) throw std::invalid_argument("Chebyshev order below |B|");

  // padding C above lambda * max A and above every other index in play
  const Index top = std::max({in.a.max(), in.b.max(), in.y.max_index()});
  const Index c_start = std::max(top, static_cast<Index>(std::ceil(in.lambda * static_cast<double>(in.a.max())))) + 1;
  const IndexSet cpad =
      m > in.b.size() ? IndexSet::range(c_start, c_start + static_cast<Index>(m - in.b.size()) - 1) : IndexSet{};
  if (!cpad.empty() && cpad.max() > space.window()) throw WindowError("padding set C exceeds the space window");

  const SparseVector one_a = indicator(in.a, eps);
  const SparseVector den = indicator(in.b, eta) + in.y;
  const SparseVector x = one_a + in.t * den + in.t * indicator(cpad);
  const IndexSet g = in.b.set_union(cpad);
  if (!is_t_greedy(x, g, in.t, space.window())) throw Error("B u C is not a t-greedy set of the witness");

  WitnessReport r;
  r.kind = "cesaro";
  r.space = space.descriptor();
  r.m = m;
  r.t = in.t;
  r.witness = x;
  r.greedy_set = g;
  const ChebyshevStep step = chebyshev_project(space, x, g, opt.greedy);
  r.residual = step.residual_norm;
  r.chebyshev_coefficients = step.coefficients;
  r.achieved_tol = step.achieved_tol;
  r.converged = step.converged;
  r.greedy_residual = greedy_residual(space, x, g);
  const double nd = space.norm(den), na = space.norm(one_a);
  r.sigma = in.t * nd;
  r.notes.push_back("sigma is the value of the approximant 1_{eps A} + t 1_C (upper bound); ratio is a lower bound");
  r.ratio = *r.residual / *r.sigma;
  const double factor = (in.c - 1.0) / (in.c + 1.0) * (in.lambda - 1.0) / (in.lambda + 1.0) / (in.t * *beta * *beta);
  const double bound = factor * na / nd;
  BoundCheck b;
  b.name = "cesaro_lower";
  b.lhs = r.ratio;
  b.rhs = bound;
  b.satisfied = r.ratio >= bound - std::max(opt.greedy.tol, default_tolerance(space));
  b.note = "ratio >= (1/(t beta^2)) ((c-1)/(c+1)) ((lambda-1)/(lambda+1)) ||1_{eps A}|| / ||1_{eta B} + y||";
  r.bounds.push_back(b);
  r.details = {{"norm_a", na},       {"norm_b_plus_y", nd},       {"indicator_ratio", na / nd},
               {"c", in.c},          {"lambda", in.lambda},       {"beta", *beta},
               {"lower_bound", bound}, {"a_above", a_above ? 1.0 : 0.0}};
  return r;
}

// ---------------------------------------------------------------------------
// Block space

WitnessReport witness_block(int k, std::size_t samples, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("block witness needs k >= 2");
  return witness_block(BlockSpec::default_recursion(k), k, samples, seed);
}

WitnessReport witness_block(const BlockSpec& spec, int k, std::size_t samples, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("block witness needs k >= 2");
  if (k + 1 > static_cast<int>(spec.blocks.size()))
    throw WindowError("block witness needs blocks S_k and S_{k+1} in the window");
  BlockSpace space(spec);
  const auto& bk = spec.blocks[static_cast<std::size_t>(k - 1)];
  const auto nk = bk.size();
  if (!nk || bk.stored != *nk) throw WindowError("block S_k must be fully stored");
  const Index half = *nk / 2;
  const auto& next = spec.blocks[static_cast<std::size_t>(k)];
  if (next.stored < half) throw WindowError("block S_{k+1} is too short for the witness");

  std::vector<Index> a;
  a.reserve(static_cast<std::size_t>(*nk));
  for (Index j = 0; j < half; ++j) a.push_back(bk.start + j);
  for (Index j = 0; j < half; ++j) a.push_back(next.start + j);
  const IndexSet aset(std::move(a));
  const IndexSet bset = spec.block_indices(k);
  const double na = space.norm(indicator(aset)), nb = space.norm(indicator(bset));

  WitnessReport r;
  r.kind = "block";
  r.space = space.descriptor();
  r.m = static_cast<std::size_t>(*nk);
  r.ratio = na / nb;
  r.ratio_kind = "indicator";
  const double l2 = bk.log2_size;
  const double formula = (static_cast<double>(*nk) / 2.0) / (l2 * std::sqrt(std::log2(l2)));
  if (spec.recursion == "default") r.expected_ratio = formula;
  r.details = {{"k", static_cast<double>(k)},
               {"N_k", static_cast<double>(*nk)},
               {"norm_a", na},
               {"norm_b", nb},
               {"gap_formula", formula}};

  // sampled disjoint signed pairs of equal size <= N_k
  std::mt19937_64 rng(seed * 2654435761ULL + 11ULL);
  const Index win = spec.window();
  std::vector<Index> pool(static_cast<std::size_t>(win));
  std::iota(pool.begin(), pool.end(), Index{1});
  std::uniform_int_distribution<Index> size(1, std::min<Index>(*nk, win / 2));
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Index q = size(rng);
    // partial Fisher-Yates for 2q distinct indices
    for (Index j = 0; j < 2 * q; ++j) {
      std::uniform_int_distribution<Index> pick(j, win - 1);
      std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    std::vector<SparseVector::Entry> ea, eb;
    for (Index j = 0; j < q; ++j) {
      ea.emplace_back(pool[static_cast<std::size_t>(j)], coin(rng) ? 1.0 : -1.0);
      eb.emplace_back(pool[static_cast<std::size_t>(q + j)], coin(rng) ? 1.0 : -1.0);
    }
    const SparseVector va(std::move(ea)), vb(std::move(eb));
    const double na2 = space.norm(va), nb2 = space.norm(vb);
    worst = std::max({worst, na2 / nb2, nb2 / na2});
  }
  const double cap = std::sqrt(static_cast<double>(*nk));
  r.details.emplace_back("pair_samples", static_cast<double>(samples));
  r.details.emplace_back("pair_max_ratio", worst);
  r.details.emplace_back("pair_cap", cap);
  BoundCheck c2;
  c2.name = "pair_ratio_cap";
  c2.lhs = worst;
  c2.rhs = cap;
  c2.satisfied = leq(worst, cap);
  c2.note = "sampled disjoint signed pairs, |A| = |B| <= N_k";
  r.bounds.push_back(c2);
  if (r.expected_ratio) {
    BoundCheck c1;
    c1.name = "gap_formula";
    c1.lhs = r.ratio;
    c1.rhs = formula;
    c1.satisfied = r.ratio >= formula - kCmpTol * formula;
    c1.note = "ratio >= (N_k/2) / (log2 N_k sqrt(log2 log2 N_k))";
    r.bounds.push_back(c1);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Generic witness

WitnessReport witness_generic(const Space& space, std::size_t m, double t, std::uint64_t seed,
                              const ExperimentOptions& opt) {
  check_t(t);
  const Index n = space.window();
  if (static_cast<Index>(m) > n) throw WindowError("m exceeds the space window");
  std::mt19937_64 rng(seed * 6364136223846793005ULL + 1442695040888963407ULL);
  const std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(n), 2 * m + 2);
  std::vector<Index> pos(static_cast<std::size_t>(n));
  std::iota(pos.begin(), pos.end(), Index{1});
  std::shuffle(pos.begin(), pos.end(), rng);
  std::uniform_real_distribution<double> q(0.4, 0.9);
  const auto phases = phase_grid(space.field());
  std::uniform_int_distribution<std::size_t> ph(0, phases.size() - 1);
  const double r0 = q(rng);
  std::vector<SparseVector::Entry> e;
  for (std::size_t j = 0; j < s; ++j) e.emplace_back(pos[j], std::pow(r0, static_cast<double>(j)) * phases[ph(rng)]);
  const SparseVector x(std::move(e));
  const IndexSet a = canonical_greedy_set(x, m, n);

  WitnessReport r;
  r.kind = "generic";
  r.space = space.descriptor();
  r.m = m;
  r.t = t;
  r.witness = x;
  r.greedy_set = a;
  const ChebyshevStep step = chebyshev_project(space, x, a, opt.greedy);
  r.residual = step.residual_norm;
  r.chebyshev_coefficients = step.coefficients;
  r.achieved_tol = step.achieved_tol;
  r.converged = step.converged;
  r.greedy_residual = greedy_residual(space, x, a);
  if (m <= opt.sigma_exhaustive_max_m && binomial(static_cast<std::size_t>(n), m) <= 2e4) {
    const SigmaResult sg = sigma_m(space, x, m, space.window_set(), opt.greedy);
    r.sigma = sg.value;
    r.sigma_exhaustive = true;
  } else {
    r.sigma = step.residual_norm;
    r.notes.push_back("sigma replaced by the Chebyshev residual (upper bound); ratio is a lower bound");
  }
  r.ratio = *r.sigma > 0.0 ? *r.residual / *r.sigma : 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// Bound ledger

BoundTables compute_bound_tables(const Space& space, std::size_t m, const SweepOptions& opt) {
  const std::size_t mm = 2 * m;
  if (static_cast<Index>(mm) > space.window())
    throw WindowError("bound tables need 2m <= window; the space window is " + std::to_string(space.window()));
  const Index w = std::min<Index>(space.window(), std::max<Index>(static_cast<Index>(mm), 8));
  const IndexSet window = IndexSet::range(1, w);
  IndicatorSweep sweep(space, window, mm, opt);
  BoundTables t;
  DemocracyTables d = super_democracy(sweep);
  t.mu_tilde = std::move(d.full);
  t.mu_tilde_d = std::move(d.disjoint);
  t.gamma = gamma_cc(sweep);
  const auto family = witness_family(space, mm, window, "default", opt.seed);
  QuasiGreedyTables q = quasi_greedy_est(space, mm, window, family, opt);
  t.g_c = std::move(q.g_c);
  t.g_tilde = std::move(q.g_tilde);
  ConditionalityTables k = conditionality_est(space, mm, window, family, opt);
  t.k = std::move(k.k);
  t.k_c = std::move(k.k_c);
  return t;
}

void check_upper_bounds(const Space& space, WitnessReport& report, const BoundTables& tables) {
  const std::size_t m = report.m;
  const double t = report.t;
  if (!report.residual || !report.greedy_residual)
    throw Error("bound checks need a Chebyshev witness with measured residuals");
  auto need = [&](const ParamTable& tb, std::size_t k) {
    const auto v = tb.value(k);
    if (!v) throw Error("missing table entry " + tb.name + " at m = " + std::to_string(k));
    return *v;
  };
  auto soft = [&](std::initializer_list<const ParamTable*> used) {
    for (const auto* tb : used)
      if (tb->mode != ParamMode::Exact || tb->window.max() < space.window()) return true;
    return false;
  };
  const double tol = 1e-9;

  BoundCheck b12;
  b12.name = "lebesgue_linear";
  b12.lhs = report.ratio;
  b12.rhs = 1.0 + (1.0 + 1.0 / t) * space.frak_k() * static_cast<double>(m);
  b12.satisfied = report.ratio <= b12.rhs + tol * std::max(1.0, b12.rhs);
  b12.note = "1 + (1 + 1/t) K m";
  report.bounds.push_back(b12);

  const double gc2 = need(tables.g_c, 2 * m), gt = need(tables.g_tilde, m), mu = need(tables.mu_tilde, m);
  const double ga2 = need(tables.gamma, 2 * m), gt2 = need(tables.g_tilde, 2 * m), mud = need(tables.mu_tilde_d, m);
  BoundCheck b13;
  b13.name = "lebesgue_quasi_greedy_democracy";
  b13.lhs = report.ratio;
  b13.rhs = gc2 + (2.0 / t) * std::min(gt * mu, ga2 * gt2 * mud);
  b13.advisory = soft({&tables.g_c, &tables.g_tilde, &tables.mu_tilde, &tables.gamma, &tables.mu_tilde_d});
  b13.satisfied = report.ratio <= b13.rhs + tol * std::max(1.0, b13.rhs);
  b13.note = "g^c_2m + (2/t) min{g~_m mu~_m, gamma_2m g~_2m mu~d_m}";
  if (b13.advisory) b13.note += "; rests on window or family estimates";
  report.bounds.push_back(b13);

  const double km = need(tables.k, m);
  BoundCheck blk;
  blk.name = "lebesgue_conditionality";
  blk.lhs = report.ratio;
  blk.rhs = gc2 + (2.0 / t) * km * mud;
  blk.advisory = soft({&tables.g_c, &tables.k, &tables.mu_tilde_d});
  blk.satisfied = report.ratio <= blk.rhs + tol * std::max(1.0, blk.rhs);
  blk.note = "g^c_2m + (2/t) k_m mu~d_m";
  if (blk.advisory) blk.note += "; rests on window or family estimates";
  report.bounds.push_back(blk);

  // trivial chain on the paired runs
  const double cheb = *report.residual, greedy = *report.greedy_residual;
  BoundCheck c1;
  c1.name = "chain_chebyshev_le_greedy";
  c1.lhs = cheb;
  c1.rhs = greedy;
  c1.satisfied = cheb <= greedy + std::max(tol, report.achieved_tol);
  report.bounds.push_back(c1);

  std::optional<double> pn;
  if (space.window() <= 20) pn = projection_norm(space, report.greedy_set, true, space.window());
  BoundCheck c2;
  c2.name = "chain_greedy_le_kc_chebyshev";
  c2.lhs = greedy;
  if (pn) {
    c2.rhs = *pn * cheb;
    c2.note = "exact ||I - P_A|| = " + std::to_string(*pn);
  } else {
    c2.rhs = (1.0 + space.frak_k() * static_cast<double>(report.greedy_set.size())) * cheb;
    c2.note = "||I - P_A|| bounded by 1 + K |A|";
  }
  c2.satisfied = greedy <= c2.rhs + tol * std::max(1.0, c2.rhs);
  report.bounds.push_back(c2);
}

std::vector<BoundCheck> check_mu_chain(const Space& space, std::size_t m, const IndexSet& window,
                                       const std::vector<double>& clist, const SweepOptions& opt) {
  IndicatorSweep sweep(space, window, m, opt);
  const DemocracyTables sd = super_democracy(sweep);
  const DemocracyTables ud = unsigned_democracy(sweep);
  const ParamTable alt = super_democracy_disjoint_alt(sweep);
  const ParamTable gam = gamma_cc(sweep);
  const ParamTable phi = fundamental_function(sweep);
  std::vector<ParamTable> thetas;
  for (double c : clist) thetas.push_back(theta_sep(sweep, c));
  const ParamTable th = theta_inf(sweep, clist);
  const double kappa = space.field() == Field::Real ? 1.0 : 2.0;
  const auto kb = space.schauder_constant();
  const double vk = space.varkappa();

  std::vector<BoundCheck> out;
  auto add = [&](const std::string& name, std::size_t mm, std::optional<double> lhs, std::optional<double> rhs,
                 const std::string& note) {
    BoundCheck b;
    b.name = name + " m=" + std::to_string(mm);
    b.note = note;
    if (!lhs || !rhs) {
      b.note += lhs || rhs ? "; vacuous: one side undefined at this window" : "; vacuous: undefined at this window";
      out.push_back(b);
      return;
    }
    b.lhs = *lhs;
    b.rhs = *rhs;
    b.satisfied = leq(*lhs, *rhs);
    out.push_back(b);
  };
  auto mul = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return *a * *b;
  };
  for (std::size_t k = 1; k <= m; ++k) {
    const auto mt = sd.full.value(k), md = sd.disjoint.value(k), g = gam.value(k);
    add("mu_tilde_d_le_mu_tilde", k, md, mt, "mu~d <= mu~");
    add("mu_tilde_le_mu_tilde_d_sq", k, mt, mul(md, md), "mu~ <= (mu~d)^2");
    add("mu_tilde_le_gamma_mu_tilde_d", k, mt, mul(mul(g, md), std::optional<double>(1.0 + 2.0 * kappa)), "mu~ <= (1 + 2 kappa) gamma mu~d");
    {
      BoundCheck b;
      b.name = "mu_tilde_d_formulas_agree m=" + std::to_string(k);
      b.note = "alternative mu~d formula equals the definition";
      const auto av = alt.value(k);
      if (av && md) {
        b.lhs = *av;
        b.rhs = *md;
        b.satisfied = std::abs(*av - *md) <= kCmpTol * std::max(1.0, std::abs(*md));
      } else {
        b.note += "; vacuous: undefined at this window";
      }
      out.push_back(b);
    }
    if (kb) {
      add("schauder_mu_tilde", k, mt, md ? std::optional<double>(2.0 * (*kb + 1.0) * *md + vk * *kb) : std::nullopt,
          "mu~ <= 2(K_b+1) mu~d + varkappa K_b");
      const auto um = ud.full.value(k), umd = ud.disjoint.value(k);
      add("schauder_mu", k, um, umd ? std::optional<double>(2.0 * (*kb + 1.0) * *kb * *umd + vk * *kb) : std::nullopt,
          "mu <= 2(K_b+1) K_b mu^d + varkappa K_b");
    }
    add("mu_d<=mu", k, ud.disjoint.value(k), ud.full.value(k), "mu^d <= mu");
    add("mu<=mu~", k, ud.full.value(k), mt, "mu <= mu~");
    for (std::size_t ci = 0; ci < clist.size(); ++ci)
      add("theta<=theta_c c=" + std::to_string(clist[ci]), k, th.value(k), thetas[ci].value(k),
          "theta_m <= theta_{m,c}");
  }
  std::vector<const ParamTable*> mono{&sd.full, &sd.disjoint, &ud.full, &ud.disjoint, &alt, &gam, &phi, &th};
  for (const auto& t : thetas) mono.push_back(&t);
  for (const auto* t : mono) {
    for (std::size_t k = 2; k <= m; ++k) add("monotone " + t->name, k, t->value(k - 1), t->value(k), "nondecreasing in m");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lemma suite

namespace {

struct LemmaInstance {
  std::vector<BoundCheck> checks;
};

SparseVector random_vector(std::mt19937_64& rng, Index n, Field f) {
  std::uniform_int_distribution<Index> size(1, n);
  std::vector<Index> pos(static_cast<std::size_t>(n));
  std::iota(pos.begin(), pos.end(), Index{1});
  std::shuffle(pos.begin(), pos.end(), rng);
  const Index s = size(rng);
  std::bernoulli_distribution quantized(0.5);
  std::uniform_int_distribution<int> level(1, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto phases = phase_grid(f);
  std::uniform_int_distribution<std::size_t> ph(0, phases.size() - 1);
  std::vector<SparseVector::Entry> e;
  for (Index j = 0; j < s; ++j) {
    Scalar v = quantized(rng) ? (level(rng) / 4.0) * phases[ph(rng)] : Scalar(u(rng), 0.0);
    if (f == Field::Complex && !quantized(rng)) v = Scalar(u(rng), u(rng));
    if (std::abs(v) < 1e-3) v = 0.5;
    e.emplace_back(pos[static_cast<std::size_t>(j)], v);
  }
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return SparseVector(std::move(e));
}

IndexSet random_subset(std::mt19937_64& rng, Index n) {
  std::vector<Index> v;
  while (v.empty()) {
    std::bernoulli_distribution in(0.4);
    for (Index k = 1; k <= n; ++k)
      if (in(rng)) v.push_back(k);
  }
  return IndexSet(std::move(v));
}

SignPattern signs_on(const SparseVector& x, const IndexSet& a) {
  std::map<Index, Scalar> m;
  for (Index k : a) m[k] = sign(x.coeff(k));
  return SignPattern(m);
}

double min_modulus(const SparseVector& x, const IndexSet& a) {
  double r = std::numeric_limits<double>::infinity();
  for (Index k : a) r = std::min(r, modulus(x.coeff(k)));
  return a.empty() ? 0.0 : r;
}

}  // namespace

LemmaSuiteResult lemma_suite(const Space& space, std::size_t instances, std::uint64_t seed, double tol, int jobs) {
  const Index n = space.window();
  if (n > 12) throw WindowError("lemma suite needs a window of at most 12 indices");
  if (space.field() == Field::Complex && n > 6) throw WindowError("complex lemma suite needs a window of at most 6");
  const std::size_t nn = static_cast<std::size_t>(n);
  const IndexSet window = space.window_set();
  LemmaSuiteResult out;
  out.space = space.descriptor();
  out.instances = instances;
  std::vector<double> kk(nn + 1, 1.0), kc(nn + 1, 1.0), gam(nn + 1, 1.0);
  if (!space.one_unconditional()) {
    if (!space.unit_ball_extreme_points(n)) throw Error("lemma suite needs exact constants for " + space.descriptor());
    const SweepOptions so{jobs, 1e9, seed};
    const ConditionalityTables ct = conditionality_est(space, nn, window, {}, so);
    const IndicatorSweep sw(space, window, nn, so);
    const ParamTable g = gamma_cc(sw);
    for (std::size_t k = 1; k <= nn; ++k) {
      kk[k] = ct.k.at(k);
      kc[k] = ct.k_c.at(k);
      gam[k] = g.at(k);
    }
    out.notes.push_back("g^c and g~ enter through their exact upper bounds k^c and k");
    if (space.field() == Field::Complex) out.notes.push_back("gamma and the sign sup run over a phase grid");
  } else {
    out.notes.push_back("1-unconditional: every constant equals 1");
  }
  const auto phases = phase_grid(space.field());

  std::vector<LemmaInstance> res(instances);
  parallel_for(instances, jobs, [&](std::size_t i) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + i);
    const SparseVector x = random_vector(rng, n, space.field());
    const double nx = space.norm(x);
    auto check = [&](const std::string& name, double lhs, double rhs) {
      BoundCheck b;
      b.name = name;
      b.lhs = lhs;
      b.rhs = rhs;
      b.satisfied = lhs <= rhs + tol * std::max(1.0, rhs);
      res[i].checks.push_back(std::move(b));
    };

    // truncation
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double alpha = u01(rng) * x.max_modulus();
    if (u01(rng) < 0.5) {
      std::uniform_int_distribution<std::size_t> pick(0, x.nnz() - 1);
      alpha = modulus(x.entries()[pick(rng)].second);
    }
    const Truncation tr = truncate(x, alpha);
    check("truncation", space.norm(tr.value), kc[tr.lambda.size()] * nx);

    // greedy set
    std::uniform_int_distribution<std::size_t> msz(1, x.nnz());
    const auto sets = greedy_sets(x, msz(rng), 1.0, n);
    std::uniform_int_distribution<std::size_t> pg(0, sets.size() - 1);
    const IndexSet g = sets[pg(rng)];
    check("greedy_set_indicator", min_modulus(x, g) * space.norm(indicator(g, signs_on(x, g))), kk[g.size()] * nx);

    // arbitrary set A
    const IndexSet a = random_subset(rng, n);
    const double am = min_modulus(x, a);
    const double lhs = am * space.norm(indicator(a, signs_on(x, a)));
    std::vector<Index> lam;
    for (const auto& [k, v] : x.entries())
      if (modulus(v) > am) lam.push_back(k);
    const std::size_t gs = a.set_union(IndexSet(lam)).size();
    check("threshold_indicator", lhs, gam[gs] * kk[gs] * nx);
    check("threshold_indicator_k", lhs, kk[a.size()] * nx);

    // convexity
    std::vector<SparseVector::Entry> ce;
    double amax = 0.0;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Index k : a) {
      const Scalar v = space.field() == Field::Real ? Scalar(u(rng), 0.0) : Scalar(u(rng), u(rng));
      amax = std::max(amax, modulus(v));
      ce.emplace_back(k, v);
    }
    double sup = 0.0;
    const std::size_t P = phases.size();
    const std::size_t total = static_cast<std::size_t>(std::pow(static_cast<double>(P), static_cast<double>(a.size() - 1)));
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<Scalar> eps{Scalar(1.0)};
      std::size_t c = code;
      for (std::size_t j = 1; j < a.size(); ++j, c /= P) eps.push_back(phases[c % P]);
      sup = std::max(sup, space.norm(indicator(a, SignPattern::on(a, eps))));
    }
    check("coefficient_convexity", space.norm(SparseVector(std::move(ce))), amax * sup);
  });

  std::map<std::string, std::size_t> count;
  for (const auto& r : res) {
    for (const auto& b : r.checks) {
      ++count[b.name];
      if (b.rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, b.lhs / b.rhs);
      if (!b.satisfied) out.violations.push_back(b);
    }
  }
  for (const auto& [k, v] : count) out.checked.emplace_back(k, v);
  return out;
}

// ---------------------------------------------------------------------------
// Convergence

ConvergenceReport convergence_run(const Space& space, const SparseVector& x, double t, std::size_t mmax,
                                  const GreedyConfig& cfg) {
  check_t(t);
  if (x.max_index() > space.window()) throw WindowError("vector exceeds the space window");
  ConvergenceReport r;
  r.space = space.descriptor();
  r.t = t;
  const std::size_t top = std::min<std::size_t>(mmax, static_cast<std::size_t>(space.window()));
  GreedyConfig inner = cfg;
  inner.jobs = 1;
  inner.t = t;
  for (std::size_t m = 0; m <= top; ++m) {
    const auto sets = greedy_sets(x, m, t, space.window());
    std::vector<std::pair<double, double>> vals(sets.size());
    std::vector<char> conv(sets.size(), 1);
    parallel_for(sets.size(), cfg.jobs, [&](std::size_t i) {
      const ChebyshevStep s = chebyshev_project(space, x, sets[i], inner);
      vals[i] = {s.residual_norm, greedy_residual(space, x, sets[i])};
      conv[i] = s.converged ? 1 : 0;
    });
    double wc = 0.0, wg = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      wc = std::max(wc, vals[i].first);
      wg = std::max(wg, vals[i].second);
      r.converged = r.converged && conv[i];
    }
    r.chebyshev.push_back(wc);
    r.greedy.push_back(wg);
    r.sets.push_back(sets.size());
  }
  return r;
}

}  // namespace glab
