#pragma once

// Projected gradient descent over products of probability simplices, with
// deterministic multi-start, a quadratic penalty wrapper for a single
// inequality-style constraint, and exhaustive deterministic-channel
// enumeration. Restart k always uses the derived seed mix64(seed + k), so
// results are bit-reproducible for a fixed (restarts, seed) pair.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sct/dist.hpp"
#include "sct/random.hpp"

namespace sct {

struct EnumerationTooLargeError : Error { using Error::Error; };
struct NonFiniteObjectiveError : Error { using Error::Error; };

struct SimplexBlockSpec {
  int rows = 0;  // independent simplex rows in this block
  int dim = 0;   // dimension of each row
};

struct SimplexProductSpec {
  std::vector<SimplexBlockSpec> blocks;
};

// One vector<double> of length rows*dim per block, row-major.
using BlockValues = std::vector<std::vector<double>>;

// Returns the objective value; when `grad` is non-null it must be filled
// with the same shape as the input point.
using ObjectiveFn = std::function<double(const BlockValues&, BlockValues*)>;

struct OptimResult {
  double value = std::numeric_limits<double>::infinity();
  BlockValues params;
  double feasibility_residual = 0.0;
  int restarts_used = 0;
  bool converged = false;
  int best_start = -1;  // ordinal index of the winning start point
};

struct MinimizeOptions {
  int restarts = 64;
  std::uint64_t seed = 1;
  double feas_tol = 1e-6;   // residual threshold for converged
  double step_tol = 1e-10;  // stop when the projected step is this small
  int max_iters = 400;
  std::vector<BlockValues> warm_starts;  // tried before random restarts
};

/*! \brief Euclidean projection of a vector onto the probability simplex. */
inline void project_to_simplex(std::span<double> v) {
  const int n = static_cast<int>(v.size());
  static thread_local std::vector<double> u;
  u.assign(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, tau = 0.0;
  int rho = 0;
  for (int k = 0; k < n; ++k) {
    css += u[k];
    double t = (css - 1.0) / (k + 1);
    if (u[k] > t) {
      rho = k + 1;
      tau = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - tau, 0.0);
}

inline void project_blocks(const SimplexProductSpec& spec, BlockValues& x) {
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const int dim = spec.blocks[b].dim;
    for (int r = 0; r < spec.blocks[b].rows; ++r)
      project_to_simplex(std::span<double>(x[b]).subspan(
          static_cast<std::size_t>(r) * dim, dim));
  }
}

inline BlockValues zeros_like(const SimplexProductSpec& spec) {
  BlockValues x(spec.blocks.size());
  for (std::size_t b = 0; b < spec.blocks.size(); ++b)
    x[b].assign(static_cast<std::size_t>(spec.blocks[b].rows) *
                    spec.blocks[b].dim, 0.0);
  return x;
}

inline BlockValues uniform_point(const SimplexProductSpec& spec) {
  BlockValues x = zeros_like(spec);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b)
    std::fill(x[b].begin(), x[b].end(), 1.0 / spec.blocks[b].dim);
  return x;
}

inline BlockValues random_point(const SimplexProductSpec& spec, Rng& rng) {
  BlockValues x = zeros_like(spec);
  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const int dim = spec.blocks[b].dim;
    for (int r = 0; r < spec.blocks[b].rows; ++r)
      fill_dirichlet(rng, std::span<double>(x[b]).subspan(
                              static_cast<std::size_t>(r) * dim, dim));
  }
  return x;
}

namespace detail {

inline double dot_diff(const BlockValues& g, const BlockValues& a,
                       const BlockValues& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t i = 0; i < g[k].size(); ++i)
      s += g[k][i] * (a[k][i] - b[k][i]);
  return s;
}

inline double sq_diff(const BlockValues& a, const BlockValues& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      double d = a[k][i] - b[k][i];
      s += d * d;
    }
  return s;
}

inline double inf_diff(const BlockValues& a, const BlockValues& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i)
      s = std::max(s, std::abs(a[k][i] - b[k][i]));
  return s;
}

struct PgdOutcome {
  double value = 0.0;
  bool converged = false;
};

// Monotone proximal gradient loop with backtracking on the step size.
// `x` is updated in place and always stays feasible.
inline PgdOutcome pgd(const SimplexProductSpec& spec, const ObjectiveFn& f,
                      BlockValues& x, int max_iters, double step_tol) {
  project_blocks(spec, x);
  BlockValues g = zeros_like(spec);
  BlockValues gn = zeros_like(spec);
  BlockValues xn = x;
  double fx = f(x, &g);
  if (!std::isfinite(fx))
    throw NonFiniteObjectiveError("objective not finite at start point");
  double step = 1.0;
  PgdOutcome out;
  double best_seen = fx;
  int stall = 0;
  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t k = 0; k < x.size(); ++k)
      for (std::size_t i = 0; i < x[k].size(); ++i)
        xn[k][i] = x[k][i] - step * g[k][i];
    project_blocks(spec, xn);
    if (inf_diff(xn, x) < step_tol) {
      out.converged = true;
      break;
    }
    double fn = f(xn, &gn);
    double quad = fx + dot_diff(g, xn, x) + sq_diff(xn, x) / (2.0 * step);
    if (std::isfinite(fn) && fn <= quad + 1e-12) {
      x.swap(xn);
      g.swap(gn);
      fx = fn;
      step = std::min(step * 1.3, 1e3);
      if (fx < best_seen - 1e-13) {
        best_seen = fx;
        stall = 0;
      } else if (++stall >= 40) {
        // A long run of accepted steps without measurable improvement means
        // the value is stationary; treat it the same as a vanishing step.
        out.converged = true;
        break;
      }
    } else {
      step *= 0.5;
      if (step < 1e-13) break;
    }
  }
  out.value = fx;
  return out;
}

inline std::vector<BlockValues> start_points(const SimplexProductSpec& spec,
                                             const MinimizeOptions& o) {
  std::vector<BlockValues> starts = o.warm_starts;
  for (auto& s : starts) project_blocks(spec, s);
  starts.push_back(uniform_point(spec));
  for (int k = 0; k < o.restarts; ++k) {
    Rng rng(mix64(o.seed + static_cast<std::uint64_t>(k)));
    starts.push_back(random_point(spec, rng));
  }
  return starts;
}

}  // namespace detail

/*! \brief Multi-start projected gradient minimization.
 *
 * Start points are the warm starts, the uniform point, then `restarts`
 * Dirichlet(1) samples. Ties between restarts break toward the lower value,
 * then the earlier start index, so the result is deterministic.
 */
inline OptimResult minimize(const SimplexProductSpec& spec,
                            const ObjectiveFn& f,
                            const MinimizeOptions& opts = {}) {
  OptimResult best;
  auto starts = detail::start_points(spec, opts);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    BlockValues x = starts[s];
    auto run = detail::pgd(spec, f, x, opts.max_iters, opts.step_tol);
    if (run.value < best.value) {
      best.value = run.value;
      best.params = x;
      best.converged = run.converged;
      best.best_start = static_cast<int>(s);
    }
  }
  best.restarts_used = static_cast<int>(starts.size());
  return best;
}

/*! \brief Minimizes f subject to g ~ 0 via an increasing quadratic-free
 * penalty sweep: minimize f + lambda g for each lambda in `schedule`,
 * warm-starting each stage from the previous one. The reported value is
 * the unpenalized f at the final point and the residual is g there.
 *
 * Starts that already satisfy the constraint to within an order of
 * magnitude of the tolerance enter the sweep at the top of the schedule:
 * a low penalty would trade their feasibility away for objective and can
 * strand the iterate in an infeasible basin no later stage escapes. Every
 * start ends with one extra stage at ten times the top penalty, pushing
 * marginal residuals safely inside the tolerance so reported witnesses
 * survive reuse as warm starts for derived problems. Each start reports
 * its best stage endpoint (feasible endpoints first, then by objective;
 * among infeasible ones, by residual), so the tightening stage never
 * replaces a feasible answer with a costlier one. If no start ends
 * feasible, the least-infeasible endpoint is reported.
 */
inline OptimResult minimize_with_penalty(
    const SimplexProductSpec& spec, const ObjectiveFn& f, const ObjectiveFn& g,
    std::span<const double> schedule, const MinimizeOptions& opts = {}) {
  static const double kDefaultSchedule[] = {1.0, 10.0, 100.0, 1000.0};
  if (schedule.empty())
    schedule = std::span<const double>(kDefaultSchedule, 4);

  auto starts = detail::start_points(spec, opts);
  OptimResult best;
  bool best_feasible = false;
  bool have_best = false;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    BlockValues x = starts[s];
    bool near_feasible = g(x, nullptr) <= 10.0 * opts.feas_tol;
    std::vector<double> stages;
    if (near_feasible)
      stages.push_back(schedule.back());
    else
      stages.assign(schedule.begin(), schedule.end());
    stages.push_back(10.0 * schedule.back());
    double run_f = 0.0, run_g = 0.0;
    BlockValues run_x;
    bool run_feasible = false, run_converged = false, run_have = false;
    for (double lambda : stages) {
      BlockValues scratch = zeros_like(spec);
      ObjectiveFn penalized = [&](const BlockValues& pt, BlockValues* grad) {
        if (!grad) return f(pt, nullptr) + lambda * g(pt, nullptr);
        double fv = f(pt, grad);
        double gv = g(pt, &scratch);
        for (std::size_t k = 0; k < grad->size(); ++k)
          for (std::size_t i = 0; i < (*grad)[k].size(); ++i)
            (*grad)[k][i] += lambda * scratch[k][i];
        return fv + lambda * gv;
      };
      bool conv = detail::pgd(spec, penalized, x, opts.max_iters,
                              opts.step_tol).converged;
      double fv = f(x, nullptr);
      double gv = g(x, nullptr);
      bool feas = gv <= opts.feas_tol;
      bool keep;
      if (!run_have)
        keep = true;
      else if (feas != run_feasible)
        keep = feas;
      else if (feas)
        keep = fv < run_f;
      else
        keep = gv < run_g;
      if (keep) {
        run_f = fv;
        run_g = gv;
        run_x = x;
        run_feasible = feas;
        run_converged = conv;
        run_have = true;
      }
    }
    bool better;
    if (!have_best)
      better = true;
    else if (run_feasible != best_feasible)
      better = run_feasible;
    else if (run_feasible)
      better = run_f < best.value;
    else
      better = run_g < best.feasibility_residual;
    if (better) {
      best.value = run_f;
      best.params = run_x;
      best.feasibility_residual = run_g;
      best.converged = run_feasible && run_converged;
      best.best_start = static_cast<int>(s);
      best_feasible = run_feasible;
      have_best = true;
    }
  }
  best.restarts_used = static_cast<int>(starts.size());
  return best;
}

inline OptimResult minimize_with_penalty(const SimplexProductSpec& spec,
                                         const ObjectiveFn& f,
                                         const ObjectiveFn& g,
                                         const MinimizeOptions& opts = {}) {
  return minimize_with_penalty(spec, f, g, std::span<const double>(), opts);
}

/*! \brief Lazily enumerates all deterministic channels from `in` symbols to
 * `out` symbols, in lexicographic order of the symbol map. Throws
 * EnumerationTooLargeError when out^in exceeds `cap`.
 */
class DeterministicChannelRange {
 public:
  DeterministicChannelRange(int in, int out, std::uint64_t cap = 1000000)
      : in_(in), out_(out) {
    if (in < 1 || out < 1)
      throw SizeMismatchError("DeterministicChannelRange: empty alphabet");
    count_ = 1;
    for (int i = 0; i < in; ++i) {
      if (count_ > cap / static_cast<std::uint64_t>(out))
        throw EnumerationTooLargeError(
            "deterministic channel enumeration exceeds cap of " +
            std::to_string(cap));
      count_ *= static_cast<std::uint64_t>(out);
    }
  }

  std::uint64_t size() const { return count_; }

  class iterator {
   public:
    iterator(int in, int out, std::uint64_t idx)
        : in_(in), out_(out), idx_(idx) {}
    Channel operator*() const {
      std::vector<int> map(in_);
      std::uint64_t v = idx_;
      for (int i = 0; i < in_; ++i) {
        map[i] = static_cast<int>(v % out_);
        v /= out_;
      }
      return Channel::from_map(in_, out_, map);
    }
    iterator& operator++() {
      ++idx_;
      return *this;
    }
    bool operator!=(const iterator& o) const { return idx_ != o.idx_; }

   private:
    int in_, out_;
    std::uint64_t idx_;
  };

  iterator begin() const { return iterator(in_, out_, 0); }
  iterator end() const { return iterator(in_, out_, count_); }

 private:
  int in_, out_;
  std::uint64_t count_ = 0;
};

inline DeterministicChannelRange enumerate_deterministic_channels(
    int in, int out, std::uint64_t cap = 1000000) {
  return DeterministicChannelRange(in, out, cap);
}

/*! \brief One deterministic channel per set partition of the input
 * alphabet (restricted growth strings), outputs padded to `n`. Every
 * deterministic channel is equivalent to exactly one of these up to
 * relabeling of the outputs.
 */
inline std::vector<Channel> partition_channels(int n) {
  std::vector<Channel> out;
  std::vector<int> a(n, 0);
  while (true) {
    out.push_back(Channel::from_map(n, n, a));
    int i = n - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
      if (a[i] <= mx) break;
    }
    if (i == 0) break;
    ++a[i];
    for (int j = i + 1; j < n; ++j) a[j] = 0;
  }
  return out;
}

}  // namespace sct
