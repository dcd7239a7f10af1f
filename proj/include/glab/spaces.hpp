#pragma once

// Concrete sequence spaces: each is a norm oracle over vectors supported in a
// finite window [1, N_max] together with the basis constants the bounds need.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "glab/core.hpp"

namespace glab {

class Space {
 public:
  virtual ~Space() = default;

  virtual std::string kind() const = 0;
  /// Descriptor string that rebuilds this space (see parse_space).
  virtual std::string descriptor() const = 0;

  Field field() const { return field_; }
  /// Largest usable index N_max.
  Index window() const { return window_; }
  IndexSet window_set() const { return IndexSet::range(1, window_); }

  /// Norm of x. Throws WindowError when supp x leaves the window and
  /// std::invalid_argument for complex input to a real space.
  double norm(const SparseVector& x) const;

  /// ||e_n||, from closed form.
  virtual double basis_norm(Index n) const = 0;
  /// ||e*_n|| when a closed form is known.
  virtual std::optional<double> dual_norm(Index n) const = 0;

  /// sup_{n,j} ||e*_n|| ||e_j|| (the constant in the linear upper bound).
  virtual double frak_k() const = 0;
  /// sup_n ||e*_n|| ||e_n||.
  virtual double varkappa() const = 0;
  /// Basis constant K_b when the basis is Schauder with a known constant.
  virtual std::optional<double> schauder_constant() const { return std::nullopt; }
  /// Upper bound for the Cesaro constant max(sup||F_N||, sup||I-F_N||).
  virtual std::optional<double> cesaro_beta() const { return std::nullopt; }
  /// True when |a_n| <= |b_n| for all n implies ||a|| <= ||b|| (all greedy
  /// and conditionality constants are then exactly 1).
  virtual bool one_unconditional() const { return false; }
  /// True when norms are exact (no quadrature).
  virtual bool exact_norm() const { return true; }

  /// Extreme points of the unit ball of span{e_1..e_N}, when the ball is a
  /// polytope with a small vertex set. Used for exact operator norms.
  virtual std::optional<std::vector<SparseVector>> unit_ball_extreme_points(Index n) const {
    (void)n;
    return std::nullopt;
  }

 protected:
  Space(Field f, Index window) : field_(f), window_(window) {}
  virtual double do_norm(const SparseVector& x) const = 0;

 private:
  Field field_;
  Index window_;
};

using SpacePtr = std::shared_ptr<const Space>;

/// ||a|| = sup_m |a_1 + ... + a_m|.
class SummingSpace final : public Space {
 public:
  explicit SummingSpace(Index window);
  std::string kind() const override { return "summing"; }
  std::string descriptor() const override;
  double basis_norm(Index) const override { return 1.0; }
  std::optional<double> dual_norm(Index n) const override { return n == 1 ? 1.0 : 2.0; }
  double frak_k() const override { return 2.0; }
  double varkappa() const override { return 2.0; }
  std::optional<double> schauder_constant() const override { return 1.0; }
  std::optional<double> cesaro_beta() const override { return 2.0; }
  std::optional<std::vector<SparseVector>> unit_ball_extreme_points(Index n) const override;

 protected:
  double do_norm(const SparseVector& x) const override;
};

/// Difference basis y_1 = e_1, y_n = e_n - e_{n-1} of l^1, stored in
/// y-coefficients: ||sum b_n y_n|| = sum_n |b_n - b_{n+1}|.
class DifferenceSpace final : public Space {
 public:
  explicit DifferenceSpace(Index window);
  std::string kind() const override { return "difference"; }
  std::string descriptor() const override;
  double basis_norm(Index n) const override { return n == 1 ? 1.0 : 2.0; }
  std::optional<double> dual_norm(Index) const override { return 1.0; }
  double frak_k() const override { return 2.0; }
  double varkappa() const override { return 2.0; }
  std::optional<double> schauder_constant() const override { return 1.0; }
  std::optional<double> cesaro_beta() const override { return 2.0; }
  std::optional<std::vector<SparseVector>> unit_ball_extreme_points(Index n) const override;

 protected:
  double do_norm(const SparseVector& x) const override;
};

/// Canonical basis of l^p, 1 <= p <= inf (p = +infinity for the sup norm).
class LpSpace final : public Space {
 public:
  LpSpace(double p, Index window);
  std::string kind() const override { return "lp"; }
  std::string descriptor() const override;
  double p() const { return p_; }
  double basis_norm(Index) const override { return 1.0; }
  std::optional<double> dual_norm(Index) const override { return 1.0; }
  double frak_k() const override { return 1.0; }
  double varkappa() const override { return 1.0; }
  std::optional<double> schauder_constant() const override { return 1.0; }
  std::optional<double> cesaro_beta() const override { return 1.0; }
  bool one_unconditional() const override { return true; }
  std::optional<std::vector<SparseVector>> unit_ball_extreme_points(Index n) const override;

 protected:
  double do_norm(const SparseVector& x) const override;

 private:
  double p_;
};

/// Trigonometric system in L^p(T) (C(T) for p = inf), ordered
/// 1, e^{ix}, e^{-ix}, e^{2ix}, ... Norms use an equispaced quadrature grid;
/// for p = inf the grid maximum.
class TrigSpace final : public Space {
 public:
  /// grid = 0 selects the default of 8 * maxfreq nodes.
  TrigSpace(double p, Index maxfreq, Index grid = 0);
  std::string kind() const override { return "trig"; }
  std::string descriptor() const override;
  double p() const { return p_; }
  Index maxfreq() const { return maxfreq_; }
  Index grid() const { return grid_; }

  double basis_norm(Index) const override { return 1.0; }
  std::optional<double> dual_norm(Index) const override { return 1.0; }
  double frak_k() const override { return 1.0; }
  double varkappa() const override { return 1.0; }
  /// Documented bound, used only to scale lower-bound checks.
  std::optional<double> cesaro_beta() const override;
  std::optional<double> schauder_constant() const override;
  bool exact_norm() const override { return p_ == 2.0; }

  /// Constants c1 <= c2 with c1 sqrt(m) <= ||sum_{j<m} e^{i 2^j x}||_p <= c2 sqrt(m),
  /// for p in {1, 2, 4}.
  std::optional<std::pair<double, double>> lacunary_constants() const;

  static Index frequency_of(Index n);
  static Index index_of(Index freq);

  /// Samples of the trigonometric polynomial on the grid.
  std::vector<Scalar> evaluate(const SparseVector& x) const;

 protected:
  double do_norm(const SparseVector& x) const override;

 private:
  double p_;
  Index maxfreq_;
  Index grid_;
  std::vector<Scalar> roots_;  // exp(2 pi i k / grid)
};

/// Block layout for the sparse-block space: consecutive blocks S_k with sizes
/// N_k, weights alpha_k = 1/log2 N_k and beta_k = N_k^{-1/2}.
struct BlockSpec {
  struct Block {
    Index start = 1;          // first index of S_k
    double log2_size = 0.0;   // log2 N_k (N_k may be astronomically large)
    Index stored = 0;         // number of indices of S_k inside the window
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<Index> size() const;  // N_k when it fits in an Index
  };

  std::string recursion;  // "default", "geom:<base>" or "custom"
  int kmax = 0;
  std::vector<Block> blocks;  // blocks[0] is S_1; the last one may be truncated

  Index window() const;
  /// Paper recursion N_0 = 1, N_k = 2^(2^(N_{k-1})). kmax <= 2.
  static BlockSpec default_recursion(int kmax);
  /// N_k = base^k with even base >= 2.
  static BlockSpec geometric(Index base, int kmax);
  /// User-supplied sizes; the last block is kept truncated to `tail` indices.
  static BlockSpec custom(const std::vector<double>& log2_sizes, Index tail);

  /// 1-based block number of index n, or 0 outside the window.
  int block_of(Index n) const;
  /// Indices of S_k inside the window.
  IndexSet block_indices(int k) const;
};

class BlockSpace final : public Space {
 public:
  explicit BlockSpace(BlockSpec spec);
  std::string kind() const override { return "block"; }
  std::string descriptor() const override;
  const BlockSpec& spec() const { return spec_; }

  double basis_norm(Index) const override { return 1.0; }
  std::optional<double> dual_norm(Index) const override { return 1.0; }
  double frak_k() const override { return 1.0; }
  double varkappa() const override { return 1.0; }

  /// max over balanced sign vectors sigma on S_k of |<1_{sigma S_k}, x>|.
  double balanced_sign_max(int k, const SparseVector& x) const;

 protected:
  double do_norm(const SparseVector& x) const override;

 private:
  BlockSpec spec_;
};

// ---------------------------------------------------------------------------
// Descriptors:  summing:N  difference:N  lp:p:N  trig:p:maxfreq[:grid]
//               block:default:kmax  block:geom:base:kmax

SpacePtr parse_space(const std::string& descriptor);
/// Grammar summary for error messages.
std::string space_descriptor_grammar();
/// Parses "inf", "2", "1.5", "4/3".
double parse_exponent(const std::string& s);

// ---------------------------------------------------------------------------
// Operations

double norm(const Space& space, const SparseVector& x);
/// Closed-form ||e*_n||; throws Error("no closed form ...") otherwise.
double dual_norm_entry(const Space& space, Index n);
/// S_N x.
SparseVector partial_sum(const Space& space, const SparseVector& x, Index n);
/// F_N x = (1/N) sum_{n<=N} S_n x.
SparseVector cesaro(const Space& space, const SparseVector& x, Index n);
/// V_{N,M} x, M > N >= 1.
SparseVector vp_operator(const Space& space, const SparseVector& x, Index n, Index m);
/// Free-function form of BlockSpace::balanced_sign_max; the space must be a block space.
double balanced_sign_max(const Space& space, int k, const SparseVector& x);

// Trigonometric building blocks (coefficients in the trig storage order).

/// sum_{|j| <= l} e^{ijx}.
SparseVector dirichlet_kernel(Index l);
/// de la Vallee-Poussin kernel 2 K_{2l+1} - K_l: coefficient 1 for |j| <= l
/// and 2 - |j|/(l+1) for l < |j| <= 2l+1.
SparseVector vallee_poussin_kernel(Index l);
/// sum_j signs[j] e^{i freqs[j] x}.
SparseVector trig_polynomial(const std::vector<Index>& freqs, const std::vector<Scalar>& signs);

}  // namespace glab
