#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <span>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/losses.hpp"

namespace sparsereg {

enum class PenaltyFamily { L1, ElasticNet, Mcp, Scad };

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::L1;
  double lambda = 0.0;
  double alpha_mix = 1.0;    // ElasticNet mixing; 1 reduces to L1
  double gamma_shape = 3.0;  // MCP requires > 1, SCAD > 2

  void validate() const;
};

// Case-wise penalty value p_{lambda,gamma}(u) for u >= 0; continuous at
// the breakpoints. L1 is lambda*u, ElasticNet adds the quadratic term.
double penalty_eval(const PenaltySpec& spec, double u);

// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

// Global minimizer of (nu/2) w^2 - z w + p_{lambda,gamma}(|w|).
// Closed forms where valid (firm shrinkage for MCP when nu*gamma > 1,
// the three-piece SCAD rule at nu = 1); otherwise an exact piecewise
// candidate search over the quadratic regions.
double univariate_prox(const PenaltySpec& spec, double z, double nu);

struct PathPoint {
  double lambda = 0.0;
  Eigen::VectorXd w;  // original (de-standardized) scale
  double intercept = 0.0;
  int support_size = 0;
  double objective = 0.0;  // standardized-problem objective at the solution
  bool converged = true;
  double achieved_tol = 0.0;
  int sweeps = 0;
  std::vector<double> sweep_objectives;  // filled when record_sweep_objectives
};

struct RegPath {
  std::vector<PathPoint> points;
  std::vector<double> lambdas() const;
};

struct CdOptions {
  double tol = 1e-7;        // max coefficient change per sweep
  int max_sweeps = 10000;   // per lambda
  double outer_tol = 1e-6;  // logistic quadratic-approximation loop
  int max_outer = 100;
  double weight_floor = 1e-5;  // IRLS weight floor
  bool record_sweep_objectives = false;
};

// Cyclic coordinate descent over a decreasing lambda path with warm
// starts. OLS works on centered/standardized data directly; the logistic
// loss is handled by repeated local quadratic approximation. MCP and
// SCAD converge to a stationary point that depends on the descending
// warm-start order, not a certified global minimum.
RegPath cd_fit(const Dataset& data, const LossModel& model, PenaltyFamily family,
               std::span<const double> lambdas, double alpha_mix = 1.0,
               double gamma_shape = 3.0, const CdOptions& opts = {});

// Log-spaced grid from lambda_max (the smallest lambda with an all-zero
// solution) down to ratio * lambda_max. ratio <= 0 picks the default:
// 1e-3 when n > p, else 1e-2.
std::vector<double> lambda_grid(const Dataset& data, const LossModel& model,
                                PenaltyFamily family, double alpha_mix = 1.0, int count = 100,
                                double ratio = 0.0);

// Rows (lambda, support_size, objective, index:value pairs, 1-based).
void write_path_csv(std::ostream& out, const RegPath& path);

}  // namespace sparsereg
