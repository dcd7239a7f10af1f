#include "glab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "glab/core.hpp"

namespace glab {

namespace {

constexpr double kGolden = 0.6180339887498949;

/// One restart of the direction search. Evaluations are counted against
/// `budget`; exhausting it leaves `converged` false.
class DirectionSearch {
 public:
  DirectionSearch(const Objective& f, int d, double tol, std::size_t budget, std::uint64_t seed,
                  double lower_bound)
      : f_(f), d_(d), tol_(tol), budget_(budget), rng_(seed), lower_bound_(lower_bound) {}

  void run(Eigen::VectorXd start) {
    x_ = std::move(start);
    fx_ = eval(x_);
    if (d_ == 0) {
      converged_ = true;
      return;
    }
    step_ = std::max(1.0, x_.cwiseAbs().maxCoeff());
    bool settled = descend();
    // alternate with ellipsoid polishing until neither phase helps
    for (int round = 0; settled && d_ >= 2 && round < 8 && !exhausted() && !at_floor(); ++round) {
      const double before = fx_;
      const Eigen::VectorXd from = x_;
      ellipsoid(2.0 * std::max({1.0, x_.cwiseAbs().maxCoeff(), step_}));
      const double gain = before - fx_;
      if (gain <= tol_ * 1e-3) break;
      last_gain_ = gain;
      step_ = std::max(1e-3, (x_ - from).cwiseAbs().maxCoeff());
      settled = descend();
    }
    converged_ = at_floor() || (settled && !exhausted());
  }

  const Eigen::VectorXd& point() const { return x_; }
  double value() const { return fx_; }
  std::size_t evaluations() const { return evals_; }
  bool converged() const { return converged_; }
  double last_gain() const { return last_gain_; }

 private:
  // Coordinate sweeps, widened when they stall. True when the search settled
  // before the budget ran out.
  bool descend() {
    while (!exhausted() && !at_floor()) {
      const double before = fx_;
      for (int i = 0; i < d_ && !exhausted(); ++i) line_search(Eigen::VectorXd::Unit(d_, i));
      if (before - fx_ > tol_ * 1e-3) {
        last_gain_ = before - fx_;
        continue;
      }
      const double mid = fx_;
      widened_sweep();
      last_gain_ = mid - fx_;
      if (last_gain_ <= tol_ * 1e-3) return !exhausted();
      step_ = std::max(step_ * 0.5, 1e-3);
    }
    return at_floor();
  }

  // Ellipsoid method on the ball of the given radius around x. Cuts come from
  // forward-difference gradients at a point jittered inside a tiny copy of the
  // current ellipsoid, which almost surely avoids the kinks of a piecewise
  // linear objective. Stops once the best value is within tol of the lower
  // bound implied by the cuts.
  void ellipsoid(double radius) {
    const int n = d_;
    const double dn = n;
    Eigen::VectorXd c = x_;
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n) * (radius * radius);
    double lower = -std::numeric_limits<double>::infinity();
    std::normal_distribution<double> g01(0.0, 1.0);
    while (!exhausted() && !at_floor()) {
      const Eigen::LLT<Eigen::MatrixXd> llt(p);
      if (llt.info() != Eigen::Success) return;
      Eigen::VectorXd u(n);
      for (int k = 0; k < n; ++k) u(k) = g01(rng_);
      u /= std::max(u.norm(), 1e-300);
      const Eigen::MatrixXd l = llt.matrixL();
      const Eigen::VectorXd q = c + 1e-6 * (l * u);
      const double fq = eval(q);
      consider(q, fq);
      const double h = 1e-9 * std::max(1.0, q.cwiseAbs().maxCoeff());
      Eigen::VectorXd grad(n);
      for (int k = 0; k < n && !exhausted(); ++k) {
        Eigen::VectorXd r = q;
        r(k) += h;
        const double fr = eval(r);
        consider(r, fr);
        grad(k) = (fr - fq) / h;
      }
      if (exhausted()) return;
      const Eigen::VectorXd pg = p * grad;
      const double gpg = grad.dot(pg);
      if (!(gpg > 1e-300)) return;
      const double width = std::sqrt(gpg);
      // cut grad . (y - q) <= 0 written relative to the centre
      const double alpha = grad.dot(c - q) / width;
      lower = std::max(lower, fq - grad.dot(c - q) - width);
      if (fx_ - lower <= tol_ * std::max(1.0, std::abs(fx_))) return;
      if (!(alpha > -1.0 / dn && alpha < 1.0)) return;
      const Eigen::VectorXd b = pg / width;
      const double tau = (1.0 + dn * alpha) / (dn + 1.0);
      const double sigma = 2.0 * (1.0 + dn * alpha) / ((dn + 1.0) * (1.0 + alpha));
      const double delta = dn * dn * (1.0 - alpha * alpha) / (dn * dn - 1.0);
      c -= tau * b;
      p = delta * (p - sigma * b * b.transpose());
      p = 0.5 * (p + p.transpose());
      if (p.trace() < 1e-28 * radius * radius) return;
    }
  }

  bool exhausted() const { return evals_ >= budget_; }
  bool at_floor() const { return fx_ <= lower_bound_; }

  double eval(const Eigen::VectorXd& p) {
    ++evals_;
    return f_(p);
  }

  void consider(const Eigen::VectorXd& p, double v) {
    if (v < fx_) {
      fx_ = v;
      x_ = p;
    }
  }

  // Minimizes s -> f(x + s u) for convex f; moves x to the best point seen.
  void line_search(const Eigen::VectorXd& u) {
    const Eigen::VectorXd base = x_;
    const double f0 = fx_;
    auto phi = [&](double s) {
      Eigen::VectorXd p = base + s * u;
      const double v = eval(p);
      consider(p, v);
      return v;
    };
    double h = step_;
    double lo = 0.0, hi = 0.0;
    double fr = phi(h);
    if (exhausted()) return;
    if (fr < f0) {
      // expand to the right until the function rises
      double a = 0.0, b = h, fb = fr;
      while (!exhausted()) {
        const double c = b + 2.0 * (b - a);
        const double fc = phi(c);
        if (fc >= fb) {
          lo = a;
          hi = c;
          break;
        }
        a = b;
        b = c;
        fb = fc;
        if (std::abs(c) > 1e12) return;
      }
      if (exhausted()) return;
    } else {
      const double fl = phi(-h);
      if (exhausted()) return;
      if (fl < f0) {
        double a = 0.0, b = -h, fb = fl;
        while (!exhausted()) {
          const double c = b + 2.0 * (b - a);
          const double fc = phi(c);
          if (fc >= fb) {
            lo = c;
            hi = a;
            break;
          }
          a = b;
          b = c;
          fb = fc;
          if (std::abs(c) > 1e12) return;
        }
        if (exhausted()) return;
      } else {
        lo = -h;
        hi = h;
      }
    }
    // golden section on [lo, hi]
    const double width_tol = std::max(1e-14, tol_ * 1e-4) * std::max(1.0, std::abs(hi - lo));
    double c = hi - kGolden * (hi - lo);
    double e = lo + kGolden * (hi - lo);
    double fc = phi(c), fe = phi(e);
    while (hi - lo > width_tol && !exhausted()) {
      if (fc <= fe) {
        hi = e;
        e = c;
        fe = fc;
        c = hi - kGolden * (hi - lo);
        fc = phi(c);
      } else {
        lo = c;
        c = e;
        fc = fe;
        e = lo + kGolden * (hi - lo);
        fe = phi(e);
      }
      if (fc == fe && hi - lo < 1e-9) break;
    }
  }

  void widened_sweep() {
    for (int i = 0; i < d_ && !exhausted(); ++i) {
      for (int j = i + 1; j < d_ && !exhausted(); ++j) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d_);
        u(i) = 1.0;
        u(j) = 1.0;
        line_search(u);
        u(j) = -1.0;
        line_search(u);
      }
    }
    if (d_ >= 3 && d_ <= 4) {
      // sign diagonals with every coordinate active, up to a global sign
      const int count = 1 << (d_ - 1);
      for (int bits = 0; bits < count && !exhausted(); ++bits) {
        Eigen::VectorXd u(d_);
        u(0) = 1.0;
        for (int k = 1; k < d_; ++k) u(k) = ((bits >> (k - 1)) & 1) ? -1.0 : 1.0;
        line_search(u);
      }
    }
    std::normal_distribution<double> g(0.0, 1.0);
    for (int r = 0; r < 2 * d_ + 2 && !exhausted(); ++r) {
      Eigen::VectorXd u(d_);
      for (int k = 0; k < d_; ++k) u(k) = g(rng_);
      const double nrm = u.norm();
      if (nrm == 0.0) continue;
      line_search(u / nrm);
    }
  }

  const Objective& f_;
  int d_;
  double tol_;
  std::size_t budget_;
  std::mt19937_64 rng_;
  double lower_bound_;

  Eigen::VectorXd x_;
  double fx_ = 0.0;
  double step_ = 1.0;
  std::size_t evals_ = 0;
  bool converged_ = false;
  double last_gain_ = 0.0;
};

}  // namespace

std::size_t default_budget(int d) {
  const auto dd = static_cast<std::size_t>(std::max(d, 1));
  return 2000 * dd * dd + 200;
}

MinimizeResult minimize_convex(const Objective& f, int d, const MinimizeOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("minimize_convex needs tol > 0");
  if (d < 0) throw std::invalid_argument("minimize_convex needs d >= 0");
  const std::size_t budget = opt.budget ? opt.budget : default_budget(d);

  std::vector<Eigen::VectorXd> starts = opt.starts;
  if (starts.empty()) starts.push_back(Eigen::VectorXd::Zero(d));

  MinimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.converged = true;
  double best_gain = 0.0;
  for (std::size_t r = 0; r < starts.size(); ++r) {
    if (starts[r].size() != d) throw std::invalid_argument("minimize_convex: start has wrong dimension");
    DirectionSearch s(f, d, opt.tol, budget, opt.seed * 1000003ULL + r, opt.lower_bound);
    s.run(starts[r]);
    best.evaluations += s.evaluations();
    best.converged = best.converged && s.converged();
    if (s.value() < best.value) {
      best.value = s.value();
      best.argmin = s.point();
      best_gain = s.last_gain();
    }
    if (best.value <= opt.lower_bound) break;
  }
  best.achieved_tol = std::max(best_gain, 0.0);
  return best;
}

GridResult grid_oracle(const Objective& f, const std::vector<std::pair<double, double>>& box,
                       double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_oracle needs step > 0");
  const int d = static_cast<int>(box.size());
  std::vector<std::size_t> counts(static_cast<std::size_t>(d));
  double total = 1.0;
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = box[static_cast<std::size_t>(i)];
    if (!(hi >= lo)) throw std::invalid_argument("grid_oracle: empty box side");
    counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    total *= static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  if (total > 1e8) throw BudgetError("grid_oracle: lattice exceeds 10^8 points");

  GridResult out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> k(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd p(d);
  while (true) {
    for (int i = 0; i < d; ++i)
      p(i) = box[static_cast<std::size_t>(i)].first + static_cast<double>(k[static_cast<std::size_t>(i)]) * step;
    const double v = f(p);
    ++out.points;
    if (v < out.value) {
      out.value = v;
      out.argmin = p;
    }
    int i = 0;
    while (i < d) {
      if (++k[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(i)]) break;
      k[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == d) break;
  }
  return out;
}

}  // namespace glab
