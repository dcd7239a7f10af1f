#pragma once

// Scalars, finitely supported coefficient sequences, index sets and sign
// patterns. Everything else in the library is built on these value types.

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace glab {

using Index = std::int64_t;
using Scalar = std::complex<double>;

enum class Field { Real, Complex };

/// Entries with modulus below this are treated as structural zeros.
inline constexpr double kZeroTol = 1e-15;

// ---------------------------------------------------------------------------
// Error types. The CLI maps these onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An index outside the usable window, or a window too small for a request.
class WindowError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or evaluation budget was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (descriptors, vectors, flags).
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------

inline double modulus(Scalar z) { return std::abs(z); }

/// z/|z| for z != 0 and 1 for z == 0.
Scalar sign(Scalar z);

inline bool is_real(Scalar z) { return z.imag() == 0.0; }

// ---------------------------------------------------------------------------

/// Sorted, duplicate-free finite set of positive integers.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<Index> idx);
  explicit IndexSet(std::vector<Index> idx);

  /// {lo, lo+1, ..., hi}; empty when hi < lo.
  static IndexSet range(Index lo, Index hi);

  const std::vector<Index>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  bool contains(Index n) const;
  Index min() const;
  Index max() const;

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  IndexSet set_union(const IndexSet& o) const;
  IndexSet set_intersection(const IndexSet& o) const;
  IndexSet set_difference(const IndexSet& o) const;
  bool subset_of(const IndexSet& o) const;
  bool disjoint_from(const IndexSet& o) const;

  /// min(*this) > c * max(o); false when either side is empty.
  bool separated_above(const IndexSet& o, double c) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  friend auto operator<=>(const IndexSet& a, const IndexSet& b) { return a.idx_ <=> b.idx_; }

  std::string to_string() const;

 private:
  std::vector<Index> idx_;
};

// ---------------------------------------------------------------------------

/// Map from indices to unimodular scalars.
class SignPattern {
 public:
  SignPattern() = default;
  SignPattern(std::initializer_list<std::pair<const Index, Scalar>> init);
  explicit SignPattern(std::map<Index, Scalar> values);

  /// +1 on every index of `a`.
  static SignPattern ones(const IndexSet& a);
  /// signs[i] goes to the i-th smallest index of a.
  static SignPattern on(const IndexSet& a, const std::vector<Scalar>& signs);

  bool has(Index n) const { return values_.count(n) != 0; }
  Scalar at(Index n) const;
  const std::map<Index, Scalar>& values() const { return values_; }

 private:
  std::map<Index, Scalar> values_;
};

// ---------------------------------------------------------------------------

/// Finitely supported coefficient sequence x ~ sum_n x_n e_n. Entries are kept
/// sorted by index and never store a (numerically) zero value.
class SparseVector {
 public:
  using Entry = std::pair<Index, Scalar>;

  SparseVector() = default;
  SparseVector(std::initializer_list<Entry> init);
  explicit SparseVector(std::vector<Entry> entries);

  /// Coefficients c[0], c[1], ... placed at indices first, first+1, ...
  static SparseVector from_dense(const std::vector<Scalar>& c, Index first = 1);
  static SparseVector from_dense_real(const std::vector<double>& c, Index first = 1);

  const std::vector<Entry>& entries() const { return e_; }
  std::size_t nnz() const { return e_.size(); }
  bool is_zero() const { return e_.empty(); }

  Scalar coeff(Index n) const;
  IndexSet support() const;
  Index max_index() const { return e_.empty() ? 0 : e_.back().first; }
  double max_modulus() const;
  bool is_real() const;

  /// Sign pattern sgn(x_n) on the support.
  SignPattern signs() const;

  SparseVector operator-() const;
  friend SparseVector operator+(const SparseVector& a, const SparseVector& b);
  friend SparseVector operator-(const SparseVector& a, const SparseVector& b);
  friend SparseVector operator*(Scalar s, const SparseVector& a);
  friend bool operator==(const SparseVector&, const SparseVector&) = default;

  std::string to_string() const;

 private:
  std::vector<Entry> e_;
};

/// Keeps exactly the entries of x whose index lies in a (the projection P_A).
SparseVector restrict(const SparseVector& x, const IndexSet& a);

/// Keeps the entries of x whose index is NOT in a, i.e. (I - P_A)x.
SparseVector restrict_complement(const SparseVector& x, const IndexSet& a);

/// 1_{eps A}: eps(n) at each n in a.
SparseVector indicator(const IndexSet& a, const SignPattern& eps);
/// 1_A with all-ones signs.
SparseVector indicator(const IndexSet& a);

/// alpha*x + y, dropping cancelled entries.
SparseVector axpy(Scalar alpha, const SparseVector& x, const SparseVector& y);

// ---------------------------------------------------------------------------
// Combinatorics shared by the enumerators.

/// Calls fn(subset) for every k-subset of `pool` in lexicographic order.
/// Iteration stops early when fn returns false.
template <class Fn>
void for_each_combination(const std::vector<Index>& pool, std::size_t k, Fn&& fn) {
  const std::size_t n = pool.size();
  if (k > n) return;
  std::vector<std::size_t> pos(k);
  for (std::size_t i = 0; i < k; ++i) pos[i] = i;
  std::vector<Index> cur(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) cur[i] = pool[pos[i]];
    if (!fn(IndexSet(cur))) return;
    std::size_t i = k;
    while (i > 0 && pos[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++pos[i - 1];
    for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

/// All k-subsets of pool, lexicographic.
std::vector<IndexSet> combinations(const std::vector<Index>& pool, std::size_t k);

/// Binomial coefficient as a double (saturates gracefully for large inputs).
double binomial(std::size_t n, std::size_t k);

/// Finite grid of unimodular phases used when signs must be enumerated:
/// {+1,-1} in the real field, the 8th roots of unity in the complex field.
std::vector<Scalar> phase_grid(Field f);

}  // namespace glab
