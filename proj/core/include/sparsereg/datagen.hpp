#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsereg/rng.hpp"

namespace sparsereg {

enum class CovarianceKind { Toeplitz, HardMi, Identity };
enum class Task { Regression, Classification };
enum class WeightScheme { SignedUnit, UniformOverRoot };

// Recipe for one synthetic instance: Gaussian rows with the requested
// covariance, a k_true-sparse ground truth, and noise rescaled so the
// realized ratio ||X w||_2 / ||eps||_2 equals sqrt(snr) exactly.
struct SyntheticSpec {
  Eigen::Index n = 100;
  Eigen::Index p = 50;
  Eigen::Index k_true = 5;
  CovarianceKind covariance = CovarianceKind::Toeplitz;
  double rho = 0.2;  // Toeplitz decay, in [0, 1)
  double snr = 6.0;
  Task task = Task::Regression;
  WeightScheme weight_scheme = WeightScheme::SignedUnit;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on a bad combination (k_true > p,
  // HardMi with k_true < 2, snr <= 0, rho outside [0, 1), ...).
  void validate() const;
};

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  std::optional<Eigen::VectorXd> w_true;
  bool standardized = false;
  std::vector<std::string> column_names;  // empty for synthetic data

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Off-diagonal weight of the mutual-incoherence-violating design:
// theta = 1/(2 k) + 1/(2 sqrt(k)), strictly inside (1/k, 1/sqrt(k)).
double hard_mi_theta(Eigen::Index k_true);

// Explicit covariance matrix: Toeplitz rho^|i-j|, the HardMi pattern
// (ones on the diagonal, theta coupling row/column k_true+1 with the
// first k_true coordinates), or the identity.
Eigen::MatrixXd build_covariance(const SyntheticSpec& spec);

// Deterministic given spec.seed. Rows are drawn through the closed-form
// Cholesky factor of the covariance (AR(1) recursion for Toeplitz).
Dataset sample_dataset(const SyntheticSpec& spec);

// Realized ||X w_true||^2 / ||Y - X w_true||^2 and the derived fraction
// snr/(1+snr). Regression datasets with ground truth only.
double realized_snr(const Dataset& data);
double realized_pve(const Dataset& data);

// In place: every column to mean 0 and variance 1 (1/n convention).
// Constant columns are rejected.
void standardize_columns(Dataset& data);

struct IngestOptions {
  std::string response;      // column name, or 0-based index as digits
  bool standardize = true;   // default on for external data
  bool has_header = true;
};

// Comma-separated numeric text, optional header row. Ragged rows, empty
// cells and non-numeric cells raise std::runtime_error.
Dataset ingest_matrix(const std::filesystem::path& path, const IngestOptions& opts);
Dataset ingest_matrix(std::istream& in, const IngestOptions& opts);

// Serializes X plus a trailing response column in the same format
// ingest_matrix reads.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

Dataset take_rows(const Dataset& data, Eigen::Index begin, Eigen::Index count);

// Shuffled holdout split (first = kept fraction, second = holdout).
// The 0.15 default mirrors a 85/15 outer test split; pair with
// split_train_validation (2:1 by default) for hyper-parameter selection.
std::pair<Dataset, Dataset> split_holdout(const Dataset& data, double holdout_fraction,
                                          std::uint64_t seed);
std::pair<Dataset, Dataset> split_train_validation(const Dataset& data,
                                                   double validation_fraction = 1.0 / 3.0);

}  // namespace sparsereg
