#pragma once

// Witness constructions for Lebesgue-type lower bounds, the bound ledger that
// compares them with the general upper bounds, and convergence runs.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glab/core.hpp"
#include "glab/greedy.hpp"
#include "glab/params.hpp"
#include "glab/spaces.hpp"

namespace glab {

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  /// Advisory checks rest on estimated constants and never fail a run.
  bool advisory = false;
  std::string note;
};

struct WitnessReport {
  std::string kind;
  std::string space;
  std::size_t m = 0;
  double t = 1.0;
  SparseVector witness;
  IndexSet greedy_set;
  std::optional<double> residual;
  std::optional<double> greedy_residual;
  std::optional<double> sigma;
  bool sigma_exhaustive = false;
  double ratio = 0.0;
  /// "lebesgue" for residual / sigma, "indicator" for a pure indicator ratio.
  std::string ratio_kind = "lebesgue";
  std::optional<double> expected_ratio;
  SparseVector chebyshev_coefficients;
  double achieved_tol = 0.0;
  bool converged = true;
  std::vector<BoundCheck> bounds;
  std::vector<std::pair<std::string, double>> details;
  std::vector<std::string> notes;

  std::optional<double> detail(const std::string& key) const;
};

struct ExperimentOptions {
  GreedyConfig greedy;
  /// Exhaustive sigma_m only up to this m; larger m use the explicit approximant.
  std::size_t sigma_exhaustive_max_m = 3;
};

SparseVector summing_witness_vector(std::size_t m, double t);
SparseVector difference_witness_vector(std::size_t m, double t);

WitnessReport witness_summing(std::size_t m, double t, const ExperimentOptions& opt = {});
WitnessReport witness_difference(std::size_t m, double t, const ExperimentOptions& opt = {});

/// Standard recursive Rudin-Shapiro signs of length 2^L.
std::vector<int> rudin_shapiro(int L);

enum class SqrtSet { RudinShapiro, Lacunary };

/// The sets of the trigonometric construction: numerator 1_{eps A} and
/// denominator 1_{eta B} + y, with B + supp y inside [1, max index of A / c].
struct TrigWitnessSets {
  IndexSet a, b;
  SignPattern eps, eta;
  SparseVector y;
  Index maxfreq = 0;
  double c = 2.0;
  bool a_above = true;  // A > c (B u supp y); otherwise B > c A
};

TrigWitnessSets trig_witness_sets(double p, std::size_t m, SqrtSet sqrt_set = SqrtSet::RudinShapiro);

/// Indicator-ratio lower bound for the trigonometric system in L^p.
WitnessReport witness_trig(double p, std::size_t m, double t, SqrtSet sqrt_set = SqrtSet::RudinShapiro,
                           Index grid = 0);

/// Least-squares slope of log2(y) against log2(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct CesaroWitnessInput {
  IndexSet a, b;
  SignPattern eps, eta;  // empty means all ones
  SparseVector y;
  double c = 2.0;
  double t = 1.0;
  /// Order of the Chebyshev step; 0 means |B|.
  std::size_t m = 0;
  double lambda = 64.0;
};

/// x = 1_{eps A} + t y + t 1_{eta B} + t 1_C with the greedy set B u C.
WitnessReport witness_cesaro_lower(const Space& space, const CesaroWitnessInput& in,
                                   const ExperimentOptions& opt = {});

/// Block space gap at level k of the default recursion (k = 2), or of any spec
/// passed explicitly. Ratios of sampled disjoint signed pairs use with the given seed.
WitnessReport witness_block(const BlockSpec& spec, int k, std::size_t samples = 64, std::uint64_t seed = 0);
WitnessReport witness_block(int k, std::size_t samples = 64, std::uint64_t seed = 0);

/// A generic report for spaces without a closed-form witness: a seeded random
/// vector with geometric decay and its canonical greedy set.
WitnessReport witness_generic(const Space& space, std::size_t m, double t, std::uint64_t seed,
                              const ExperimentOptions& opt = {});

struct BoundTables {
  ParamTable g_c, g_tilde, mu_tilde, mu_tilde_d, gamma, k, k_c;
};

/// Tables up to 2m over the window [1, w], w = min(N, max(2m, 8)).
BoundTables compute_bound_tables(const Space& space, std::size_t m, const SweepOptions& opt = {});

/// Appends the general upper bounds and the trivial chain to report.bounds.
/// Throws Error when a table lacks a needed entry.
void check_upper_bounds(const Space& space, WitnessReport& report, const BoundTables& tables);

/// Inequalities between democracy-type tables on the window, plus monotonicity.
std::vector<BoundCheck> check_mu_chain(const Space& space, std::size_t m, const IndexSet& window,
                                       const std::vector<double>& clist, const SweepOptions& opt = {});

struct LemmaSuiteResult {
  std::string space;
  std::size_t instances = 0;
  /// Checks evaluated per lemma name.
  std::vector<std::pair<std::string, std::size_t>> checked;
  std::vector<BoundCheck> violations;
  /// Largest lhs / rhs seen over all checks.
  double worst_ratio = 0.0;
  std::vector<std::string> notes;
};

/// Truncation, greedy-set and convexity inequalities on random instances.
/// Needs exact constants: a 1-unconditional space or one with unit-ball
/// extreme points on a window of at most 12 indices.
LemmaSuiteResult lemma_suite(const Space& space, std::size_t instances, std::uint64_t seed, double tol = 1e-9,
                             int jobs = 1);

struct ConvergenceReport {
  std::string space;
  double t = 1.0;
  std::vector<double> chebyshev;  // worst residual for m = 0..mmax
  std::vector<double> greedy;     // worst plain greedy residual
  std::vector<std::size_t> sets;  // greedy sets examined per m
  bool converged = true;
};

ConvergenceReport convergence_run(const Space& space, const SparseVector& x, double t, std::size_t mmax,
                                  const GreedyConfig& cfg = {});

}  // namespace glab
