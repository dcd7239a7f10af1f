#pragma once

// Derivative-free minimization of convex functions on R^d, plus a lattice
// oracle used to validate it.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace glab {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct MinimizeOptions {
  double tol = 1e-9;
  /// Evaluations per restart; 0 selects 2000 * d^2 + 200.
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  /// Starting points; empty means the origin only.
  std::vector<Eigen::VectorXd> starts;
  /// Known lower bound of the objective (0 for norms): reaching it ends a run.
  double lower_bound = -std::numeric_limits<double>::infinity();
};

struct MinimizeResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  /// Improvement made by the final widened sweep of the best restart.
  double achieved_tol = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

std::size_t default_budget(int d);

/// Cyclic coordinate descent with golden-section line searches. When a sweep
/// stalls the search widens to pair directions e_i +- e_j, sign diagonals and
/// seeded random directions before declaring convergence. Deterministic for a
/// fixed seed.
MinimizeResult minimize_convex(const Objective& f, int d, const MinimizeOptions& opt = {});

struct GridResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  std::size_t points = 0;
};

/// Exhaustive evaluation over the lattice box[i].first + k*step <= box[i].second.
/// Throws BudgetError above 10^8 points.
GridResult grid_oracle(const Objective& f, const std::vector<std::pair<double, double>>& box,
                       double step);

}  // namespace glab
