#include "glab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace glab {

namespace {

std::string format_exponent(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << p;
  return os.str();
}

void require_real(const Space& s, const SparseVector& x) {
  if (s.field() == Field::Real && !x.is_real())
    throw std::invalid_argument(s.kind() + " space is real; got a complex coefficient");
}

}  // namespace

double Space::norm(const SparseVector& x) const {
  if (x.max_index() > window_)
    throw WindowError("index " + std::to_string(x.max_index()) + " is beyond the window N_max = " +
                      std::to_string(window_) + " of " + descriptor());
  require_real(*this, x);
  return do_norm(x);
}

// ---------------------------------------------------------------------------
// summing

SummingSpace::SummingSpace(Index window) : Space(Field::Real, window) {
  if (window < 1) throw std::invalid_argument("summing space needs N >= 1");
}

std::string SummingSpace::descriptor() const { return "summing:" + std::to_string(window()); }

double SummingSpace::do_norm(const SparseVector& x) const {
  double s = 0.0, best = 0.0;
  for (const auto& en : x.entries()) {
    s += en.second.real();
    best = std::max(best, std::abs(s));
  }
  return best;
}

std::optional<std::vector<SparseVector>> SummingSpace::unit_ball_extreme_points(Index n) const {
  // The unit ball is the cube |partial sums| <= 1; vertices are sign vectors of partial sums.
  if (n > 20) return std::nullopt;
  std::vector<SparseVector> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  out.reserve(count);
  for (std::uint64_t bits = 0; bits < count; ++bits) {
    std::vector<double> c(static_cast<std::size_t>(n));
    double prev = 0.0;
    for (Index k = 0; k < n; ++k) {
      const double s = ((bits >> k) & 1U) ? -1.0 : 1.0;
      c[static_cast<std::size_t>(k)] = s - prev;
      prev = s;
    }
    out.push_back(SparseVector::from_dense_real(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// difference

DifferenceSpace::DifferenceSpace(Index window) : Space(Field::Real, window) {
  if (window < 1) throw std::invalid_argument("difference space needs N >= 1");
}

std::string DifferenceSpace::descriptor() const { return "difference:" + std::to_string(window()); }

double DifferenceSpace::do_norm(const SparseVector& x) const {
  // sum_{n>=1} |b_n - b_{n+1}|; only terms touching the support are nonzero.
  const auto& e = x.entries();
  double total = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Index n = e[i].first;
    const Scalar b = e[i].second;
    // term n: |b_n - b_{n+1}|
    const bool next_present = i + 1 < e.size() && e[i + 1].first == n + 1;
    total += std::abs(b - (next_present ? e[i + 1].second : Scalar(0.0)));
    // term n-1: |b_{n-1} - b_n| when b_{n-1} = 0 (otherwise counted above)
    const bool prev_present = i > 0 && e[i - 1].first == n - 1;
    if (!prev_present && n >= 2) total += std::abs(b);
  }
  return total;
}

std::optional<std::vector<SparseVector>> DifferenceSpace::unit_ball_extreme_points(Index n) const {
  // u_k = b_k - b_{k+1} is an isometry onto l^1_n; vertices +-delta_j map to +-1_[1,j].
  std::vector<SparseVector> out;
  for (Index j = 1; j <= n; ++j) {
    const SparseVector v = indicator(IndexSet::range(1, j));
    out.push_back(v);
    out.push_back(-v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// lp

LpSpace::LpSpace(double p, Index window) : Space(Field::Real, window), p_(p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp space needs p >= 1");
  if (window < 1) throw std::invalid_argument("lp space needs N >= 1");
}

std::string LpSpace::descriptor() const {
  return "lp:" + format_exponent(p_) + ":" + std::to_string(window());
}

double LpSpace::do_norm(const SparseVector& x) const {
  if (std::isinf(p_)) return x.max_modulus();
  if (p_ == 1.0) {
    double s = 0.0;
    for (const auto& en : x.entries()) s += std::abs(en.second);
    return s;
  }
  if (p_ == 2.0) {
    double s = 0.0;
    for (const auto& en : x.entries()) s += std::norm(en.second);
    return std::sqrt(s);
  }
  // scale by the max to avoid overflow in |x|^p
  const double mx = x.max_modulus();
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& en : x.entries()) s += std::pow(std::abs(en.second) / mx, p_);
  return mx * std::pow(s, 1.0 / p_);
}

std::optional<std::vector<SparseVector>> LpSpace::unit_ball_extreme_points(Index n) const {
  std::vector<SparseVector> out;
  if (p_ == 1.0) {
    for (Index j = 1; j <= n; ++j) {
      out.push_back(SparseVector{{j, 1.0}});
      out.push_back(SparseVector{{j, -1.0}});
    }
    return out;
  }
  if (std::isinf(p_) && n <= 20) {
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
      std::vector<double> c(static_cast<std::size_t>(n));
      for (Index k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = ((bits >> k) & 1U) ? -1.0 : 1.0;
      out.push_back(SparseVector::from_dense_real(c));
    }
    return out;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// trig

TrigSpace::TrigSpace(double p, Index maxfreq, Index grid)
    : Space(Field::Complex, 2 * maxfreq + 1), p_(p), maxfreq_(maxfreq), grid_(grid) {
  if (!(p >= 1.0)) throw std::invalid_argument("trig space needs p >= 1");
  if (maxfreq < 0) throw std::invalid_argument("trig space needs maxfreq >= 0");
  if (grid_ == 0) grid_ = std::max<Index>(16, 8 * maxfreq);
  if (grid_ <= 2 * maxfreq)
    throw std::invalid_argument("trig grid must exceed twice the largest frequency");
  roots_.resize(static_cast<std::size_t>(grid_));
  for (Index k = 0; k < grid_; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(grid_);
    roots_[static_cast<std::size_t>(k)] = Scalar(std::cos(th), std::sin(th));
  }
}

std::string TrigSpace::descriptor() const {
  return "trig:" + format_exponent(p_) + ":" + std::to_string(maxfreq_) + ":" +
         std::to_string(grid_);
}

std::optional<double> TrigSpace::cesaro_beta() const {
  if (p_ == 2.0) return 1.0;
  return 3.0;
}

std::optional<double> TrigSpace::schauder_constant() const {
  if (p_ == 2.0) return 1.0;
  return std::nullopt;
}

std::optional<std::pair<double, double>> TrigSpace::lacunary_constants() const {
  // Exact moment counts for the Sidon set {2^j}: ||f||_4^4 = 2m^2 - m, and
  // ||f||_1 >= ||f||_2^3 / ||f||_4^2.
  if (p_ == 2.0) return std::make_pair(1.0, 1.0);
  if (p_ == 4.0) return std::make_pair(1.0, std::pow(2.0, 0.25));
  if (p_ == 1.0) return std::make_pair(1.0 / std::pow(2.0, 0.5), 1.0);
  return std::nullopt;
}

Index TrigSpace::frequency_of(Index n) {
  if (n < 1) throw std::invalid_argument("trig storage index must be positive");
  return (n % 2 == 1) ? -(n - 1) / 2 : n / 2;
}

Index TrigSpace::index_of(Index freq) { return freq > 0 ? 2 * freq : 1 - 2 * freq; }

std::vector<Scalar> TrigSpace::evaluate(const SparseVector& x) const {
  std::vector<Scalar> f(static_cast<std::size_t>(grid_), Scalar(0.0));
  for (const auto& [n, c] : x.entries()) {
    Index fr = frequency_of(n) % grid_;
    if (fr < 0) fr += grid_;
    Index phase = 0;
    for (Index k = 0; k < grid_; ++k) {
      f[static_cast<std::size_t>(k)] += c * roots_[static_cast<std::size_t>(phase)];
      phase += fr;
      if (phase >= grid_) phase -= grid_;
    }
  }
  return f;
}

double TrigSpace::do_norm(const SparseVector& x) const {
  if (x.is_zero()) return 0.0;
  if (p_ == 2.0) {
    // Parseval; the grid is exact for |f|^2 anyway
    double s = 0.0;
    for (const auto& en : x.entries()) s += std::norm(en.second);
    return std::sqrt(s);
  }
  const auto f = evaluate(x);
  if (std::isinf(p_)) {
    double mx = 0.0;
    for (const auto& v : f) mx = std::max(mx, std::abs(v));
    return mx;
  }
  double s = 0.0;
  if (p_ == 1.0) {
    for (const auto& v : f) s += std::abs(v);
    return s / static_cast<double>(grid_);
  }
  for (const auto& v : f) s += std::pow(std::abs(v), p_);
  return std::pow(s / static_cast<double>(grid_), 1.0 / p_);
}

// ---------------------------------------------------------------------------
// block

std::optional<Index> BlockSpec::Block::size() const {
  if (log2_size >= 62.0) return std::nullopt;
  return static_cast<Index>(std::llround(std::exp2(log2_size)));
}

Index BlockSpec::window() const {
  if (blocks.empty()) return 0;
  return blocks.back().start + blocks.back().stored - 1;
}

namespace {

BlockSpec::Block make_block(Index start, double log2_size, Index stored) {
  BlockSpec::Block b;
  b.start = start;
  b.log2_size = log2_size;
  b.stored = stored;
  b.alpha = 1.0 / log2_size;
  b.beta = std::exp2(-0.5 * log2_size);  // underflows to 0 for huge blocks
  return b;
}

BlockSpec from_sizes(std::string recursion, int kmax, const std::vector<double>& log2_sizes,
                     Index tail) {
  BlockSpec s;
  s.recursion = std::move(recursion);
  s.kmax = kmax;
  Index start = 1;
  for (std::size_t k = 0; k < log2_sizes.size(); ++k) {
    const bool last = k + 1 == log2_sizes.size();
    Index stored;
    if (!last) {
      if (log2_sizes[k] >= 40.0) throw WindowError("block size too large to store");
      stored = static_cast<Index>(std::llround(std::exp2(log2_sizes[k])));
    } else {
      stored = tail;
      if (log2_sizes[k] < 40.0)
        stored = std::min<Index>(tail, static_cast<Index>(std::llround(std::exp2(log2_sizes[k]))));
    }
    s.blocks.push_back(make_block(start, log2_sizes[k], stored));
    start += stored;
  }
  return s;
}

}  // namespace

BlockSpec BlockSpec::default_recursion(int kmax) {
  if (kmax < 1) throw std::invalid_argument("block:default needs kmax >= 1");
  if (kmax >= 3)
    throw WindowError(
        "default recursion N_k = 2^(2^N_{k-1}) makes block " + std::to_string(kmax) +
        " unrepresentable (N_3 = 2^65536); use the scaled recursion block:geom:base:kmax");
  // N_0 = 1 and log2 N_k = 2^{N_{k-1}}
  std::vector<double> log2s;
  double prev = 1.0;  // N_0
  for (int k = 1; k <= kmax + 1; ++k) {
    const double l2 = std::exp2(prev);
    log2s.push_back(l2);
    prev = (l2 < 1000.0) ? std::exp2(l2) : std::numeric_limits<double>::infinity();
  }
  // Tail block S_{kmax+1} is kept to N_kmax indices, enough for half-and-half sets.
  const Index tail = static_cast<Index>(std::llround(std::exp2(log2s[static_cast<std::size_t>(kmax - 1)])));
  return from_sizes("default", kmax, log2s, tail);
}

BlockSpec BlockSpec::geometric(Index base, int kmax) {
  if (base < 2 || base % 2 != 0) throw std::invalid_argument("block:geom needs an even base >= 2");
  if (kmax < 1) throw std::invalid_argument("block:geom needs kmax >= 1");
  std::vector<double> log2s;
  const double lb = std::log2(static_cast<double>(base));
  for (int k = 1; k <= kmax + 1; ++k) log2s.push_back(lb * k);
  if (log2s[static_cast<std::size_t>(kmax - 1)] > 24.0)
    throw WindowError("block:geom layout exceeds 2^24 indices per block");
  const Index tail = static_cast<Index>(std::llround(std::exp2(log2s[static_cast<std::size_t>(kmax - 1)])));
  BlockSpec s = from_sizes("geom:" + std::to_string(base), kmax, log2s, tail);
  return s;
}

BlockSpec BlockSpec::custom(const std::vector<double>& log2_sizes, Index tail) {
  if (log2_sizes.empty()) throw std::invalid_argument("custom block spec needs sizes");
  for (double l : log2_sizes)
    if (!(l >= 1.0)) throw std::invalid_argument("block sizes must be >= 2");
  return from_sizes("custom", static_cast<int>(log2_sizes.size()) - 1, log2_sizes, tail);
}

int BlockSpec::block_of(Index n) const {
  for (std::size_t k = 0; k < blocks.size(); ++k)
    if (n >= blocks[k].start && n < blocks[k].start + blocks[k].stored) return static_cast<int>(k) + 1;
  return 0;
}

IndexSet BlockSpec::block_indices(int k) const {
  if (k < 1 || k > static_cast<int>(blocks.size())) throw std::out_of_range("no such block");
  const auto& b = blocks[static_cast<std::size_t>(k - 1)];
  return IndexSet::range(b.start, b.start + b.stored - 1);
}

BlockSpace::BlockSpace(BlockSpec spec) : Space(Field::Real, spec.window()), spec_(std::move(spec)) {}

std::string BlockSpace::descriptor() const {
  if (spec_.recursion == "default") return "block:default:" + std::to_string(spec_.kmax);
  if (spec_.recursion.rfind("geom:", 0) == 0)
    return "block:" + spec_.recursion + ":" + std::to_string(spec_.kmax);
  return "block:custom";
}

double BlockSpace::balanced_sign_max(int k, const SparseVector& x) const {
  if (k < 1 || k > static_cast<int>(spec_.blocks.size())) throw std::out_of_range("no such block");
  const auto& b = spec_.blocks[static_cast<std::size_t>(k - 1)];
  const auto size = b.size();
  if (size && *size % 2 != 0) throw std::invalid_argument("balanced signs need an even block size");

  std::vector<double> pos, neg;
  for (const auto& [n, c] : x.entries()) {
    if (n < b.start || n >= b.start + b.stored) continue;
    if (c.real() > 0)
      pos.push_back(c.real());
    else if (c.real() < 0)
      neg.push_back(c.real());
  }
  // +1 on the N/2 largest values, -1 on the rest; the unstored part of S_k is zero.
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  double total = 0.0;
  for (double v : pos) total += v;
  for (double v : neg) total += v;
  double top = 0.0;
  const std::size_t nz = pos.size() + neg.size();
  if (!size) {
    // N/2 exceeds any stored count: all positives are on top, all negatives at the bottom.
    for (double v : pos) top += v;
  } else {
    const Index half = *size / 2;
    const Index zeros = *size - static_cast<Index>(nz);
    Index remaining = half;
    for (double v : pos) {
      if (remaining == 0) break;
      top += v;
      --remaining;
    }
    remaining -= std::min(remaining, zeros);
    for (double v : neg) {
      if (remaining == 0) break;
      top += v;
      --remaining;
    }
  }
  return std::abs(2.0 * top - total);
}

double BlockSpace::do_norm(const SparseVector& x) const {
  double best = x.max_modulus();
  const auto& blocks = spec_.blocks;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.alpha > 0.0) best = std::max(best, b.alpha * balanced_sign_max(static_cast<int>(k) + 1, x));
    if (b.beta > 0.0) {
      // beta_k * (sum of the N_k largest |x_j| over j in T_k)
      const Index tail_start = b.start + b.stored;
      std::vector<double> mags;
      for (const auto& [n, c] : x.entries())
        if (n >= tail_start) mags.push_back(std::abs(c));
      if (mags.empty()) continue;
      const auto nk = b.size();
      if (nk && static_cast<std::size_t>(*nk) < mags.size()) {
        std::nth_element(mags.begin(), mags.begin() + *nk, mags.end(), std::greater<>());
        mags.resize(static_cast<std::size_t>(*nk));
      }
      double s = 0.0;
      for (double v : mags) s += v;
      best = std::max(best, b.beta * s);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// parsing

std::string space_descriptor_grammar() {
  return "space descriptors: summing:N | difference:N | lp:p:N | trig:p:maxfreq[:grid] | "
         "block:default:kmax | block:geom:base:kmax   (p is a number, a fraction like 4/3, or inf)";
}

double parse_exponent(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const double a = std::stod(s.substr(0, slash), &used);
      const double b = std::stod(s.substr(slash + 1));
      return a / b;
    }
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad exponent '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad exponent '" + s + "'");
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

Index parse_index(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw ParseError("bad integer '" + s + "'");
    return static_cast<Index>(v);
  } catch (const std::logic_error&) {
    throw ParseError("bad integer '" + s + "'");
  }
}

}  // namespace

SpacePtr parse_space(const std::string& d) {
  const auto parts = split(d, ':');
  const auto bad = [&]() { return ParseError("unknown space descriptor '" + d + "'; " + space_descriptor_grammar()); };
  try {
    if (parts[0] == "summing" && parts.size() == 2)
      return std::make_shared<SummingSpace>(parse_index(parts[1]));
    if (parts[0] == "difference" && parts.size() == 2)
      return std::make_shared<DifferenceSpace>(parse_index(parts[1]));
    if (parts[0] == "lp" && parts.size() == 3)
      return std::make_shared<LpSpace>(parse_exponent(parts[1]), parse_index(parts[2]));
    if (parts[0] == "trig" && (parts.size() == 3 || parts.size() == 4))
      return std::make_shared<TrigSpace>(parse_exponent(parts[1]), parse_index(parts[2]),
                                         parts.size() == 4 ? parse_index(parts[3]) : 0);
    if (parts[0] == "block" && parts.size() == 3 && parts[1] == "default")
      return std::make_shared<BlockSpace>(BlockSpec::default_recursion(static_cast<int>(parse_index(parts[2]))));
    if (parts[0] == "block" && parts.size() == 4 && parts[1] == "geom")
      return std::make_shared<BlockSpace>(
          BlockSpec::geometric(parse_index(parts[2]), static_cast<int>(parse_index(parts[3]))));
  } catch (const ParseError&) {
    throw bad();
  } catch (const std::invalid_argument& e) {
    throw ParseError("invalid space descriptor '" + d + "': " + e.what());
  }
  throw bad();
}

// ---------------------------------------------------------------------------
// operations

double norm(const Space& space, const SparseVector& x) { return space.norm(x); }

double dual_norm_entry(const Space& space, Index n) {
  if (n < 1 || n > space.window())
    throw WindowError("index " + std::to_string(n) + " outside the window of " + space.descriptor());
  const auto v = space.dual_norm(n);
  if (!v) throw Error("no closed form for ||e*_n|| in " + space.kind() + " space");
  return *v;
}

SparseVector partial_sum(const Space& space, const SparseVector& x, Index n) {
  (void)space;
  if (n < 0) throw std::invalid_argument("partial_sum needs N >= 0");
  std::vector<SparseVector::Entry> e;
  for (const auto& en : x.entries())
    if (en.first <= n) e.push_back(en);
  return SparseVector(std::move(e));
}

SparseVector cesaro(const Space& space, const SparseVector& x, Index n) {
  (void)space;
  if (n < 1) throw std::invalid_argument("cesaro needs N >= 1");
  std::vector<SparseVector::Entry> e;
  const double nn = static_cast<double>(n);
  for (const auto& [k, c] : x.entries())
    if (k <= n) e.emplace_back(k, (1.0 - static_cast<double>(k - 1) / nn) * c);
  return SparseVector(std::move(e));
}

SparseVector vp_operator(const Space& space, const SparseVector& x, Index n, Index m) {
  (void)space;
  if (n < 1 || m <= n) throw std::invalid_argument("vp_operator needs M > N >= 1");
  std::vector<SparseVector::Entry> e;
  const double gap = static_cast<double>(m - n);
  for (const auto& [k, c] : x.entries()) {
    if (k <= n)
      e.emplace_back(k, c);
    else if (k <= m)
      e.emplace_back(k, (1.0 - static_cast<double>(k - n - 1) / gap) * c);
  }
  return SparseVector(std::move(e));
}

double balanced_sign_max(const Space& space, int k, const SparseVector& x) {
  const auto* b = dynamic_cast<const BlockSpace*>(&space);
  if (!b) throw std::invalid_argument("balanced_sign_max needs a block space");
  return b->balanced_sign_max(k, x);
}

SparseVector trig_polynomial(const std::vector<Index>& freqs, const std::vector<Scalar>& signs) {
  if (freqs.size() != signs.size()) throw std::invalid_argument("trig_polynomial: size mismatch");
  std::vector<SparseVector::Entry> e;
  for (std::size_t i = 0; i < freqs.size(); ++i) e.emplace_back(TrigSpace::index_of(freqs[i]), signs[i]);
  return SparseVector(std::move(e));
}

SparseVector dirichlet_kernel(Index l) {
  std::vector<SparseVector::Entry> e;
  for (Index j = -l; j <= l; ++j) e.emplace_back(TrigSpace::index_of(j), 1.0);
  return SparseVector(std::move(e));
}

SparseVector vallee_poussin_kernel(Index l) {
  std::vector<SparseVector::Entry> e;
  const double d = static_cast<double>(l + 1);
  for (Index j = -(2 * l + 1); j <= 2 * l + 1; ++j) {
    const Index a = j < 0 ? -j : j;
    const double c = a <= l ? 1.0 : 2.0 - static_cast<double>(a) / d;
    e.emplace_back(TrigSpace::index_of(j), c);
  }
  return SparseVector(std::move(e));
}

}  // namespace glab
