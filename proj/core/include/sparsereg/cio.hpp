#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/losses.hpp"
#include "sparsereg/saddle.hpp"

namespace sparsereg {

// One affine under-estimator of c(s): c(s) >= value + grad'(s - s_at).
struct Cut {
  double value = 0.0;
  Eigen::VectorXd grad;  // length p, entries are -(gamma/2)(X_j' alpha*)^2
  Support at;
};

struct CutPool {
  std::vector<Cut> cuts;
  double tolerance = 1e-4;
  // 60 s for regression, 180 s for classification by convention; callers
  // override for CI runs.
  double time_limit_seconds = 60.0;
};

struct InnerResult {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::VectorXd alpha_star;
};

// c(s) = max_alpha f(alpha, s) with its gradient in s.
//
// OLS: closed form through a |s| x |s| solve when |s| < n (the n x n
// inverse is never formed), direct n x n solve otherwise.
// Other losses: projected coordinate ascent on the dual to tolerance
// 1e-8; non-convergence raises std::runtime_error carrying the achieved
// tolerance.
InnerResult inner_value_grad(const Support& support, const Dataset& data, const LossModel& model,
                             double gamma);

// Same map on fractional weights s in [0,1]^p (f is linear in s, so c
// extends to the box); used by gradient checks and convexity probes.
InnerResult inner_value_grad_weighted(const Eigen::VectorXd& weights, const Dataset& data,
                                      const LossModel& model, double gamma);

struct MasterResult {
  Support support;
  double eta = 0.0;          // model value at the returned support
  double lower_bound = 0.0;  // proven bound on the master minimum
  bool optimal = true;       // false only when the node budget/deadline hit
};

// Exact minimizer of max_i [value_i + grad_i'(s - s_i)] over binary s
// with sum(s) <= k. Branch-and-bound with single-cut node bounds;
// exhaustive enumeration for p <= 20. Ties resolve to the
// lexicographically smallest support.
MasterResult solve_master(const CutPool& pool, Eigen::Index p, Eigen::Index k,
                          const Support* incumbent = nullptr,
                          double deadline_seconds = std::numeric_limits<double>::infinity());

struct OuterLogRow {
  int iter = 0;
  double primal = 0.0;  // c(s^t)
  double eta = 0.0;     // master model value
  double gap = 0.0;
  double elapsed_seconds = 0.0;
  int cut_count = 0;
};

struct CuttingPlaneResult {
  Support support;
  double value = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  bool certified = false;
  int iterations = 0;
  std::vector<OuterLogRow> log;
};

// Outer approximation on c(s): alternates cut generation and master
// solves until min c(s) seen - eta <= epsilon (certified) or the time
// limit passes (best incumbent returned). When warm is null the start
// support comes from subgradient_solve on the same data.
CuttingPlaneResult cutting_plane_solve(const Dataset& data, const LossModel& model,
                                       Eigen::Index k, double gamma,
                                       const Support* warm = nullptr, double epsilon = 1e-4,
                                       double time_limit_seconds = 60.0);

// Zero off support; on support the gamma-regularized fit restricted to
// the selected columns, recovered from the inner dual as -gamma X_s' alpha*.
Eigen::VectorXd coefficients_from_support(const Support& support, const Dataset& data,
                                          const LossModel& model, double gamma);

// Per-outer-iteration rows (iter, c(s), eta, gap, elapsed, cuts).
void write_solver_log_csv(std::ostream& out, std::span<const OuterLogRow> log);

}  // namespace sparsereg
