#pragma once

// t-greedy sets, thresholding greedy operators, truncation and the Chebyshev
// t-greedy step.

#include <cstdint>
#include <vector>

#include "glab/core.hpp"
#include "glab/spaces.hpp"

namespace glab {

enum class TieBreak { LowestIndexFirst, Adversarial };

struct GreedyConfig {
  double t = 1.0;
  TieBreak tie_break = TieBreak::LowestIndexFirst;
  /// Chebyshev minimization tolerance; 0 picks the space default.
  double tol = 0.0;
  /// Evaluations per restart; 0 picks the optimizer default.
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  int jobs = 1;

  void validate() const;
};

/// Windows up to this size get exhaustive greedy-set enumeration.
inline constexpr Index kExhaustiveWindow = 24;

/// Relative tolerance used on the t-greedy inequality.
inline constexpr double kTieTol = 1e-12;

/// 1e-9 for spaces with exact norms, 1e-7 for quadrature-based ones.
double default_tolerance(const Space& space);

/// |A| = m, A inside [1, window] and min_A |x_n| >= t max_{n not in A} |x_n|.
bool is_t_greedy(const SparseVector& x, const IndexSet& a, double t, Index window);

/// Top-m indices by modulus, lowest index first among ties. Always 1-greedy.
IndexSet canonical_greedy_set(const SparseVector& x, std::size_t m, Index window);

/// Every A in G(x, m, t) when window <= 24, sorted lexicographically. Larger
/// windows return the canonical set plus every single swap that stays
/// t-greedy (swap partners drawn from supp x and the first m zero slots).
/// Throws WindowError when m > window, BudgetError beyond max_sets.
std::vector<IndexSet> greedy_sets(const SparseVector& x, std::size_t m, double t, Index window,
                                  std::size_t max_sets = 1'000'000);

/// G(x) for the set A: restrict(x, A).
SparseVector greedy_apply(const SparseVector& x, const IndexSet& a);

struct Truncation {
  SparseVector value;
  IndexSet lambda;  // {n : |x_n| > alpha}
};

/// Entries with |x_n| > alpha become alpha * sgn(x_n); the rest are unchanged.
Truncation truncate(const SparseVector& x, double alpha);

struct ChebyshevStep {
  IndexSet support;
  SparseVector coefficients;  // a_n on the support (zeros dropped)
  SparseVector residual;      // x - sum a_n e_n
  double residual_norm = 0.0;
  double achieved_tol = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Best coefficients on a fixed support: min_a ||x - sum_{n in A} a_n e_n||.
ChebyshevStep chebyshev_project(const Space& space, const SparseVector& x, const IndexSet& a,
                                const GreedyConfig& cfg = {});

/// Chebyshev t-greedy step of order m. With adversarial tie-breaking every
/// greedy set is tried and the worst residual is returned.
ChebyshevStep chebyshev_step(const Space& space, const SparseVector& x, std::size_t m,
                             const GreedyConfig& cfg = {});

/// Plain greedy residual ||x - P_A x||.
double greedy_residual(const Space& space, const SparseVector& x, const IndexSet& a);

}  // namespace glab
