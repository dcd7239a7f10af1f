#pragma once

// Basis parameters over a finite index window: democracy-type sups by exact
// enumeration of signed indicators, operator-norm parameters either exactly
// (from unit-ball extreme points) or as witness-family lower bounds, plus the
// best m-term error and admissibility margins.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "glab/core.hpp"
#include "glab/greedy.hpp"
#include "glab/spaces.hpp"

namespace glab {

enum class ParamMode { Exact, LowerBound, UpperBoundOfInnerInf };

std::string to_string(ParamMode mode);

struct ParamWitness {
  std::vector<IndexSet> sets;
  std::vector<SignPattern> signs;
  std::optional<SparseVector> vector;
  /// Separation constant realizing a theta value.
  std::optional<double> c;
};

struct ParamEntry {
  /// Empty when the sup runs over an empty family at this window.
  std::optional<double> value;
  ParamWitness witness;
};

struct ParamTable {
  std::string name;
  ParamMode mode = ParamMode::Exact;
  IndexSet window;
  std::map<std::size_t, ParamEntry> entries;
  std::vector<std::string> notes;

  std::optional<double> value(std::size_t m) const;
  /// Value at m, throwing when it is missing or undefined.
  double at(std::size_t m) const;
};

struct SweepOptions {
  int jobs = 1;
  /// Cap on norm evaluations for one table.
  double budget = 1e9;
  std::uint64_t seed = 0;
};

/// Norms of every signed indicator 1_{eps A}, A inside the window with
/// |A| <= mmax. Signs run over phase_grid(field) with the first sign fixed to
/// 1, which loses nothing since the norm ignores a global phase.
class IndicatorSweep {
 public:
  IndicatorSweep(const Space& space, IndexSet window, std::size_t mmax, const SweepOptions& opt = {});

  const Space& space() const { return *space_; }
  const IndexSet& window() const { return window_; }
  std::size_t mmax() const { return mmax_; }
  std::size_t phases() const { return phases_.size(); }
  std::size_t evaluations() const { return evaluations_; }
  const SweepOptions& options() const { return opt_; }
  /// True in the real field; complex sweeps only see a phase grid.
  bool exact() const { return space_->field() == Field::Real; }

  std::size_t count(std::size_t k) const { return masks_[k].size(); }
  IndexSet set(std::size_t k, std::size_t i) const;
  Index min_index(std::size_t k, std::size_t i) const { return lo_[k][i]; }
  Index max_index(std::size_t k, std::size_t i) const { return hi_[k][i]; }
  std::uint64_t mask(std::size_t k, std::size_t i) const { return masks_[k][i]; }

  std::size_t patterns(std::size_t k) const;
  double norm(std::size_t k, std::size_t i, std::size_t pattern) const { return norms_[k][i][pattern]; }
  double unsigned_norm(std::size_t k, std::size_t i) const { return norms_[k][i][0]; }
  double max_signed(std::size_t k, std::size_t i) const { return max_[k][i]; }
  double min_signed(std::size_t k, std::size_t i) const { return min_[k][i]; }
  std::size_t argmax_pattern(std::size_t k, std::size_t i) const { return argmax_[k][i]; }
  std::size_t argmin_pattern(std::size_t k, std::size_t i) const { return argmin_[k][i]; }

  SignPattern pattern(std::size_t k, std::size_t i, std::size_t p) const;
  /// Index of the set with the given window-position mask, or npos.
  std::size_t find(std::size_t k, std::uint64_t mask) const;
  /// Norm of 1_{eps B} where eps is pattern p on set (k, i) and B is the
  /// sub-mask `sub` of that set.
  double sub_norm(std::size_t k, std::size_t i, std::size_t p, std::uint64_t sub) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  const Space* space_;
  IndexSet window_;
  std::size_t mmax_;
  SweepOptions opt_;
  std::vector<Scalar> phases_;
  std::size_t evaluations_ = 0;
  std::vector<std::vector<std::uint64_t>> masks_;
  std::vector<std::vector<Index>> lo_, hi_;
  std::vector<std::unordered_map<std::uint64_t, std::size_t>> lookup_;
  std::vector<std::vector<std::vector<double>>> norms_;
  std::vector<std::vector<double>> max_, min_;
  std::vector<std::vector<std::size_t>> argmax_, argmin_;
};

/// Number of norm evaluations an IndicatorSweep would perform.
double indicator_sweep_cost(std::size_t window_size, std::size_t mmax, std::size_t phases);

/// The window [1, N] of the space, or a user range A:B clipped to it.
IndexSet resolve_window(const Space& space, std::optional<std::pair<Index, Index>> range);

// Democracy-type tables (running sups over 1 <= k <= m).

struct DemocracyTables {
  ParamTable full;      // mu~ or mu
  ParamTable disjoint;  // mu~^d or mu^d
};

DemocracyTables super_democracy(const IndicatorSweep& sweep);
DemocracyTables unsigned_democracy(const IndicatorSweep& sweep);
/// sup ||1_{eta B}|| / ||1_{eps A}|| over disjoint |B| <= |A| <= m.
ParamTable super_democracy_disjoint_alt(const IndicatorSweep& sweep);
ParamTable gamma_cc(const IndicatorSweep& sweep);
ParamTable fundamental_function(const IndicatorSweep& sweep);
/// theta_{m,c}; entries are undefined when no separated pair fits the window.
ParamTable theta_sep(const IndicatorSweep& sweep, double c);
/// sup over A of min over c in clist of theta_c(A). Only sets A that admit a
/// separated partner for every c take part.
ParamTable theta_inf(const IndicatorSweep& sweep, const std::vector<double>& clist);

// Operator-norm parameters.

/// Witness families: "default", "extremal", "alternating", "random", "indicators".
std::vector<SparseVector> witness_family(const Space& space, std::size_t mmax, const IndexSet& window,
                                         const std::string& name, std::uint64_t seed);
std::vector<std::string> witness_family_names();

/// ||P_A|| (complement = false) or ||I - P_A|| on span{e_1..e_n} from the
/// unit-ball extreme points; 1 on 1-unconditional spaces; empty otherwise.
std::optional<double> projection_norm(const Space& space, const IndexSet& a, bool complement, Index n);

struct ConditionalityTables {
  ParamTable k;
  ParamTable k_c;
};

/// Exact over the window [1, n] when extreme points are available, otherwise
/// lower bounds from the family.
ConditionalityTables conditionality_est(const Space& space, std::size_t mmax, const IndexSet& window,
                                        const std::vector<SparseVector>& family, const SweepOptions& opt = {});

struct QuasiGreedyTables {
  ParamTable g;
  ParamTable g_c;
  ParamTable g_tilde;
  ParamTable c_q;  // running max of g
};

/// Lower bounds over the family and all their greedy sets (exact 1 on
/// 1-unconditional spaces).
QuasiGreedyTables quasi_greedy_est(const Space& space, std::size_t mmax, const IndexSet& window,
                                   const std::vector<SparseVector>& family, const SweepOptions& opt = {});

// Best m-term error.

struct SigmaResult {
  double value = 0.0;
  IndexSet support;
  SparseVector coefficients;
  std::size_t supports = 0;
  bool converged = true;
};

/// min over B in the window, |B| <= m, of the Chebyshev projection value.
/// Throws BudgetError above max_supports candidate supports.
SigmaResult sigma_m(const Space& space, const SparseVector& x, std::size_t m, const IndexSet& window,
                    const GreedyConfig& cfg = {}, double max_supports = 2e6);

// Admissibility.

struct AdmissibilityResult {
  double margin = 1.0;
  IndexSet b;
  SparseVector z;
  std::size_t samples = 0;
};

/// Largest ||P_A z|| / ||z|| over z supported on A u B, B inside
/// [n0, max window] with |B| <= min(|A|, m). Coefficients run over the grid
/// {-1, -1/2, 0, 1/2, 1} when it is small, seeded samples otherwise.
AdmissibilityResult admissibility_margin(const Space& space, const IndexSet& a, Index n0, std::size_t m,
                                         const IndexSet& window, const SweepOptions& opt = {});

}  // namespace glab
