#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/losses.hpp"

namespace sparsereg {

// Binary feature selection: sorted, distinct 0-based column indices with
// a cardinality budget. Constrained solvers return exactly min(k, p)
// indices; the penalized variant leaves the size free.
struct Support {
  std::vector<Eigen::Index> selected;
  Eigen::Index budget = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(selected.size()); }
  bool contains(Eigen::Index j) const;
  // Throws std::invalid_argument if indices are out of range, unsorted,
  // duplicated, or exceed the budget.
  void validate(Eigen::Index p) const;
};

bool operator==(const Support& a, const Support& b);

enum class StepRule { Constant, Adaptive };

struct SubgradientConfig {
  int t_max = 200;
  double gap_tol = 1e-4;
  StepRule step_rule = StepRule::Adaptive;
  double step_constant = 1e-3;  // delta when step_rule == Constant
  double gamma = 1.0;           // ridge coefficient, > 0
  // Evaluate c(s^t) every iteration and return the best visited support.
  // Default: on for OLS (closed-form c), off for classification losses.
  std::optional<bool> track_best_primal;
  // Stop after this many consecutive iterations without upper-bound
  // improvement; 0 disables (default, matching the reference behavior).
  int patience = 0;

  void validate() const;
};

// Mutable solver state; exposed so the adaptive step rule is testable on
// its own.
struct SaddleState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd alpha_sum;
  int t = 0;
  double best_upper = std::numeric_limits<double>::infinity();   // min_t c(s^t)
  double best_lower = -std::numeric_limits<double>::infinity();  // max_t f(alpha^t, s^t)
  Support incumbent;
};

struct TraceRow {
  int t = 0;
  double dual_value = 0.0;    // f(alpha^t, s^t)
  double primal_value = 0.0;  // c(s^t), NaN when not tracked
  double step = 0.0;
  double gap = 0.0;           // relative duality gap after this iteration
  double grad_norm_sq = 0.0;  // not serialized; kept for step-rule checks
};

struct SaddleResult {
  Support support;
  Eigen::VectorXd alpha_avg;
  double gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double best_primal = std::numeric_limits<double>::quiet_NaN();
  double best_dual = -std::numeric_limits<double>::infinity();
  std::vector<TraceRow> trace;
};

// f(alpha, s) = -sum_i conj(y_i, alpha_i) - (gamma/2) sum_{j in s} (X_j' alpha)^2.
// Throws std::domain_error when alpha leaves the conjugate domain.
double dual_function(const Eigen::VectorXd& alpha, const Support& support, const Dataset& data,
                     const LossModel& model, double gamma);

// argmin_s f(alpha, s) over supports of size k: the k largest scores
// (X_j' alpha)^2, ties broken toward the lowest index.
Support partial_min_support(const Eigen::VectorXd& alpha, const Dataset& data, double gamma,
                            Eigen::Index k);

// (min_t c(s^t) - max_t f(alpha^t, s^t)) / ||grad||^2, floored at 1e-12;
// 0 on a zero gradient or a closed gap.
double adaptive_step(const SaddleState& state, double grad_norm_sq);

SaddleResult subgradient_solve(const Dataset& data, const LossModel& model, Eigen::Index k,
                               const SubgradientConfig& cfg,
                               const Eigen::VectorXd* warm_alpha = nullptr);

// Cardinality-penalized variant: the support update selects exactly the
// coordinates with lambda - (gamma/2)(X_j' alpha)^2 < 0, any size.
SaddleResult penalized_solve(const Dataset& data, const LossModel& model, double lambda,
                             const SubgradientConfig& cfg,
                             const Eigen::VectorXd* warm_alpha = nullptr);

// Per-iteration rows (t, f, c, step, gap) as comma-separated text.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

}  // namespace sparsereg
