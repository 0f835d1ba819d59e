#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsereg/datagen.hpp"
#include "sparsereg/penalties.hpp"

namespace sparsereg {

// Nonzero detection threshold shared by all selection metrics.
inline constexpr double kSupportZeroTol = 1e-10;

struct SelectionCounts {
  double accuracy = 0.0;  // TF / k_true
  double fdr = 0.0;       // FF / (TF + FF), 0 when nothing is selected
  int tf = 0;
  int ff = 0;
};

SelectionCounts selection_metrics(const Eigen::VectorXd& w, const Eigen::VectorXd& w_true);

// (1/n) sum (y_i - x_i'w - intercept)^2 over the given rows.
double mse(const Dataset& data, const Eigen::VectorXd& w, double intercept = 0.0);

// Mann-Whitney rank estimator on +-1 labels; ties contribute 1/2.
// Throws std::invalid_argument when one class is absent.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

// gamma_0 = 1 / max_i ||x_i||^2 and the normalized variant
// p / (n k max_i ||x_i||^2) used by the reference experiments.
double gamma_zero(const Dataset& data);
double gamma_zero_normalized(const Dataset& data, Eigen::Index k);

// Doubling schedule gamma_t = 2^t gamma_0, t = 0..steps-1.
std::vector<double> gamma_schedule(const Dataset& data, int steps);

enum class Criterion { Mse, Auc };

// One result row; mirrors the CSV schema the harness writes. TF/FF are
// integer counts on raw rows but fractional for interpolated ROC points
// and aggregate means.
struct MetricsRecord {
  double accuracy = 0.0;
  double fdr = 0.0;
  double tf = 0.0;
  double ff = 0.0;
  double mse_val = 0.0;        // validation criterion value
  double mse_test = 0.0;       // test MSE, or 1-AUC for classification
  double support_size = 0.0;
  double seconds = 0.0;
  double relative_time = 0.0;  // vs the internal Lasso baseline
};

struct FitOutput {
  Eigen::VectorXd w;
  double intercept = 0.0;
  Eigen::VectorXd dual;  // optional warm-start payload (saddle/cio fits)
  double seconds = 0.0;
};

// Fits one configuration cell on the training split. `warm` is the
// previous cell's output along the same schedule, or null.
using MethodFit =
    std::function<FitOutput(const Dataset& train, Eigen::Index k, double hyper, const FitOutput* warm)>;

struct GridCellRecord {
  Eigen::Index k = 0;
  double hyper = 0.0;
  double criterion_value = 0.0;  // MSE, or 1-AUC so smaller is always better
  int support_size = 0;
  double seconds = 0.0;
  bool ok = true;
  std::string error;
};

struct GridSearchResult {
  FitOutput best;
  Eigen::Index best_k = 0;
  double best_hyper = 0.0;
  double best_criterion = 0.0;
  std::vector<GridCellRecord> table;
  bool any_failure = false;
};

// Fits every (k, hyper) cell on train (warm-started along the schedule
// within each k), scores the criterion on validation, returns the argmin
// (MSE) or argmax (AUC). Ties resolve to smaller k, then smaller hyper.
// Failing cells are recorded and skipped.
GridSearchResult grid_search(const MethodFit& fit, const Dataset& train, const Dataset& valid,
                             std::span<const Eigen::Index> k_grid,
                             std::span<const double> schedule, Criterion criterion);

// 10 log-spaced integers over [max(1, k_true/4), min(p, 4 k_true)] when
// ground truth is known, else [1, min(p, n/2)].
std::vector<Eigen::Index> default_k_grid(Eigen::Index p, Eigen::Index n,
                                         std::optional<Eigen::Index> k_true);

struct InterpolatedCounts {
  double tf = 0.0;
  double ff = 0.0;
};

// TF/FF at a target support size, linearly interpolated between the two
// nearest path points when no point hits it exactly. Throws
// std::out_of_range when the path does not span k_target.
InterpolatedCounts sparsity_interpolate(const RegPath& path, const Eigen::VectorXd& w_true,
                                        Eigen::Index k_target);

}  // namespace sparsereg
