#include "glab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace glab {

Scalar sign(Scalar z) {
  const double r = std::abs(z);
  if (r == 0.0) return Scalar(1.0, 0.0);
  if (z.imag() == 0.0) return Scalar(z.real() > 0 ? 1.0 : -1.0, 0.0);
  return z / r;
}

// ---------------------------------------------------------------------------
// IndexSet

IndexSet::IndexSet(std::initializer_list<Index> idx) : IndexSet(std::vector<Index>(idx)) {}

IndexSet::IndexSet(std::vector<Index> idx) : idx_(std::move(idx)) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  if (!idx_.empty() && idx_.front() < 1)
    throw std::invalid_argument("IndexSet: indices must be positive integers");
}

IndexSet IndexSet::range(Index lo, Index hi) {
  std::vector<Index> v;
  if (hi >= lo) {
    v.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (Index n = lo; n <= hi; ++n) v.push_back(n);
  }
  return IndexSet(std::move(v));
}

bool IndexSet::contains(Index n) const { return std::binary_search(idx_.begin(), idx_.end(), n); }

Index IndexSet::min() const {
  if (idx_.empty()) throw std::logic_error("IndexSet::min of empty set");
  return idx_.front();
}

Index IndexSet::max() const {
  if (idx_.empty()) throw std::logic_error("IndexSet::max of empty set");
  return idx_.back();
}

IndexSet IndexSet::set_union(const IndexSet& o) const {
  std::vector<Index> r;
  std::set_union(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(), std::back_inserter(r));
  return IndexSet(std::move(r));
}

IndexSet IndexSet::set_intersection(const IndexSet& o) const {
  std::vector<Index> r;
  std::set_intersection(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(),
                        std::back_inserter(r));
  return IndexSet(std::move(r));
}

IndexSet IndexSet::set_difference(const IndexSet& o) const {
  std::vector<Index> r;
  std::set_difference(idx_.begin(), idx_.end(), o.idx_.begin(), o.idx_.end(),
                      std::back_inserter(r));
  return IndexSet(std::move(r));
}

bool IndexSet::subset_of(const IndexSet& o) const {
  return std::includes(o.idx_.begin(), o.idx_.end(), idx_.begin(), idx_.end());
}

bool IndexSet::disjoint_from(const IndexSet& o) const { return set_intersection(o).empty(); }

bool IndexSet::separated_above(const IndexSet& o, double c) const {
  if (empty() || o.empty()) return false;
  return static_cast<double>(min()) > c * static_cast<double>(o.max());
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < idx_.size(); ++i) os << (i ? "," : "") << idx_[i];
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------
// SignPattern

namespace {
void check_unimodular(Index n, Scalar v) {
  if (std::abs(std::abs(v) - 1.0) > 1e-12)
    throw std::invalid_argument("SignPattern: value at index " + std::to_string(n) +
                                " is not unimodular");
}
}  // namespace

SignPattern::SignPattern(std::initializer_list<std::pair<const Index, Scalar>> init)
    : SignPattern(std::map<Index, Scalar>(init)) {}

SignPattern::SignPattern(std::map<Index, Scalar> values) : values_(std::move(values)) {
  for (const auto& [n, v] : values_) check_unimodular(n, v);
}

SignPattern SignPattern::ones(const IndexSet& a) {
  std::map<Index, Scalar> v;
  for (Index n : a) v.emplace(n, Scalar(1.0));
  SignPattern s;
  s.values_ = std::move(v);
  return s;
}

SignPattern SignPattern::on(const IndexSet& a, const std::vector<Scalar>& signs) {
  if (signs.size() != a.size())
    throw std::invalid_argument("SignPattern::on: size mismatch between set and signs");
  std::map<Index, Scalar> v;
  std::size_t i = 0;
  for (Index n : a) v.emplace(n, signs[i++]);
  return SignPattern(std::move(v));
}

Scalar SignPattern::at(Index n) const {
  auto it = values_.find(n);
  if (it == values_.end())
    throw std::out_of_range("SignPattern has no value at index " + std::to_string(n));
  return it->second;
}

// ---------------------------------------------------------------------------
// SparseVector

SparseVector::SparseVector(std::initializer_list<Entry> init)
    : SparseVector(std::vector<Entry>(init)) {}

SparseVector::SparseVector(std::vector<Entry> entries) : e_(std::move(entries)) {
  std::sort(e_.begin(), e_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  // merge duplicates by summation
  std::vector<Entry> merged;
  merged.reserve(e_.size());
  for (const auto& [n, v] : e_) {
    if (n < 1) throw std::invalid_argument("SparseVector: indices must be positive");
    if (!merged.empty() && merged.back().first == n)
      merged.back().second += v;
    else
      merged.emplace_back(n, v);
  }
  std::erase_if(merged, [](const Entry& en) { return std::abs(en.second) < kZeroTol; });
  e_ = std::move(merged);
}

SparseVector SparseVector::from_dense(const std::vector<Scalar>& c, Index first) {
  std::vector<Entry> e;
  e.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) e.emplace_back(first + static_cast<Index>(i), c[i]);
  return SparseVector(std::move(e));
}

SparseVector SparseVector::from_dense_real(const std::vector<double>& c, Index first) {
  std::vector<Entry> e;
  e.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    e.emplace_back(first + static_cast<Index>(i), Scalar(c[i], 0.0));
  return SparseVector(std::move(e));
}

Scalar SparseVector::coeff(Index n) const {
  auto it = std::lower_bound(e_.begin(), e_.end(), n,
                             [](const Entry& a, Index k) { return a.first < k; });
  return (it != e_.end() && it->first == n) ? it->second : Scalar(0.0);
}

IndexSet SparseVector::support() const {
  std::vector<Index> s;
  s.reserve(e_.size());
  for (const auto& en : e_) s.push_back(en.first);
  return IndexSet(std::move(s));
}

double SparseVector::max_modulus() const {
  double m = 0.0;
  for (const auto& en : e_) m = std::max(m, std::abs(en.second));
  return m;
}

bool SparseVector::is_real() const {
  return std::all_of(e_.begin(), e_.end(), [](const Entry& en) { return en.second.imag() == 0.0; });
}

SignPattern SparseVector::signs() const {
  std::map<Index, Scalar> v;
  for (const auto& [n, c] : e_) v.emplace(n, sign(c));
  return SignPattern(std::move(v));
}

SparseVector SparseVector::operator-() const { return Scalar(-1.0) * *this; }

SparseVector operator+(const SparseVector& a, const SparseVector& b) { return axpy(1.0, a, b); }

SparseVector operator-(const SparseVector& a, const SparseVector& b) { return axpy(-1.0, b, a); }

SparseVector operator*(Scalar s, const SparseVector& a) {
  std::vector<SparseVector::Entry> e;
  e.reserve(a.e_.size());
  for (const auto& [n, v] : a.e_) e.emplace_back(n, s * v);
  return SparseVector(std::move(e));
}

std::string SparseVector::to_string() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [n, v] : e_) {
    if (!first) os << ' ';
    first = false;
    os << n << ':';
    if (v.imag() == 0.0)
      os << v.real();
    else
      os << '(' << v.real() << ',' << v.imag() << ')';
  }
  return os.str();
}

SparseVector restrict(const SparseVector& x, const IndexSet& a) {
  std::vector<SparseVector::Entry> e;
  for (const auto& en : x.entries())
    if (a.contains(en.first)) e.push_back(en);
  return SparseVector(std::move(e));
}

SparseVector restrict_complement(const SparseVector& x, const IndexSet& a) {
  std::vector<SparseVector::Entry> e;
  for (const auto& en : x.entries())
    if (!a.contains(en.first)) e.push_back(en);
  return SparseVector(std::move(e));
}

SparseVector indicator(const IndexSet& a, const SignPattern& eps) {
  std::vector<SparseVector::Entry> e;
  e.reserve(a.size());
  for (Index n : a) {
    if (!eps.has(n))
      throw std::invalid_argument("indicator: sign pattern lacks index " + std::to_string(n));
    e.emplace_back(n, eps.at(n));
  }
  return SparseVector(std::move(e));
}

SparseVector indicator(const IndexSet& a) { return indicator(a, SignPattern::ones(a)); }

SparseVector axpy(Scalar alpha, const SparseVector& x, const SparseVector& y) {
  const auto& xe = x.entries();
  const auto& ye = y.entries();
  std::vector<SparseVector::Entry> out;
  out.reserve(xe.size() + ye.size());
  std::size_t i = 0, j = 0;
  while (i < xe.size() || j < ye.size()) {
    if (j == ye.size() || (i < xe.size() && xe[i].first < ye[j].first)) {
      out.emplace_back(xe[i].first, alpha * xe[i].second);
      ++i;
    } else if (i == xe.size() || ye[j].first < xe[i].first) {
      out.push_back(ye[j]);
      ++j;
    } else {
      out.emplace_back(xe[i].first, alpha * xe[i].second + ye[j].second);
      ++i;
      ++j;
    }
  }
  return SparseVector(std::move(out));
}

// ---------------------------------------------------------------------------

std::vector<IndexSet> combinations(const std::vector<Index>& pool, std::size_t k) {
  std::vector<IndexSet> out;
  for_each_combination(pool, k, [&](const IndexSet& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

std::vector<Scalar> phase_grid(Field f) {
  if (f == Field::Real) return {Scalar(1.0), Scalar(-1.0)};
  std::vector<Scalar> g;
  for (int k = 0; k < 8; ++k) {
    const double th = std::numbers::pi * k / 4.0;
    g.emplace_back(std::cos(th), std::sin(th));
  }
  // exact values at the axes
  g[0] = 1.0;
  g[2] = Scalar(0.0, 1.0);
  g[4] = -1.0;
  g[6] = Scalar(0.0, -1.0);
  return g;
}

}  // namespace glab
