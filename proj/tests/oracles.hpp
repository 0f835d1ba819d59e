// Test-side reference computations. Everything here is deliberately
// naive and kept independent of the library's solution paths: dense
// inverses instead of low-rank solves, exhaustive enumeration instead of
// branch-and-bound, grid refinement instead of closed forms.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/saddle.hpp"

namespace oracle {

// max over [lo, hi] of a 1-D function by iterated grid refinement.
double grid_maximize(const std::function<double(double)>& f, double lo, double hi,
                     int rounds = 40, int points = 201);
double grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                     int rounds = 40, int points = 201);

// (f(x+h) - f(x-h)) / (2h).
double central_diff(const std::function<double(double)>& f, double x, double h);

// c(s) = (1/2) Y' (I + gamma X diag(s) X')^{-1} Y through a dense solve.
double dense_value_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const Eigen::VectorXd& weights, double gamma);
double dense_value_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const sparsereg::Support& support, double gamma);

// Ridge fit on the selected columns through a dense solve.
Eigen::VectorXd dense_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                            const std::vector<Eigen::Index>& cols, double gamma);

// All supports of exactly k (or of size <= k) indices out of p.
std::vector<std::vector<Eigen::Index>> all_supports(Eigen::Index p, Eigen::Index k,
                                                    bool exactly_k);

struct BestSupport {
  std::vector<Eigen::Index> support;
  double value = 0.0;
};

// Exhaustive minimization of a set function over supports.
BestSupport enumerate_min(
    Eigen::Index p, Eigen::Index k, bool exactly_k,
    const std::function<double(const std::vector<Eigen::Index>&)>& value);

// Pairwise-comparison AUC with the half-tie convention.
double allpairs_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

}  // namespace oracle
