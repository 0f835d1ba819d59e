#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sparsereg/datagen.hpp"

using namespace sparsereg;

namespace {

SyntheticSpec base_spec() {
  SyntheticSpec spec;
  spec.n = 50;
  spec.p = 12;
  spec.k_true = 4;
  spec.covariance = CovarianceKind::Toeplitz;
  spec.rho = 0.5;
  spec.snr = 6.0;
  spec.seed = 1234;
  return spec;
}

}  // namespace

TEST_CASE("covariance matrices match their defining patterns") {
  SyntheticSpec spec = base_spec();
  spec.rho = 0.0;
  CHECK(build_covariance(spec).isApprox(Eigen::MatrixXd::Identity(spec.p, spec.p)));

  spec.rho = 0.7;
  const auto sigma = build_covariance(spec);
  CHECK(sigma(0, 2) == doctest::Approx(0.49));
  CHECK(sigma(3, 3) == doctest::Approx(1.0));
  CHECK(sigma.transpose().isApprox(sigma));

  spec.covariance = CovarianceKind::HardMi;
  spec.k_true = 4;
  const auto hard = build_covariance(spec);
  CHECK(hard_mi_theta(4) == doctest::Approx(0.375));
  CHECK(hard(4, 0) == doctest::Approx(0.375));
  CHECK(hard(0, 4) == doctest::Approx(0.375));
  CHECK(hard(4, 5) == doctest::Approx(0.0));
  CHECK(hard(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("hard design parameter stays strictly inside its interval") {
  for (Eigen::Index k = 2; k <= 50; ++k) {
    const double theta = hard_mi_theta(k);
    CHECK(theta > 1.0 / static_cast<double>(k));
    CHECK(theta < 1.0 / std::sqrt(static_cast<double>(k)));
  }
  CHECK_THROWS_AS(hard_mi_theta(1), std::invalid_argument);
  SyntheticSpec spec = base_spec();
  spec.covariance = CovarianceKind::HardMi;
  spec.k_true = 1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("covariance matrices are positive definite") {
  SyntheticSpec spec = base_spec();
  spec.p = 30;
  spec.rho = 0.9;
  CHECK(Eigen::LLT<Eigen::MatrixXd>(build_covariance(spec)).info() == Eigen::Success);
  spec.covariance = CovarianceKind::HardMi;
  spec.p = 12;
  spec.k_true = 5;
  CHECK(Eigen::LLT<Eigen::MatrixXd>(build_covariance(spec)).info() == Eigen::Success);
}

TEST_CASE("empirical covariance of Toeplitz samples matches the target") {
  SyntheticSpec spec = base_spec();
  spec.n = 50000;
  spec.p = 5;
  spec.rho = 0.6;
  spec.k_true = 2;
  const auto data = sample_dataset(spec);
  const Eigen::MatrixXd emp = data.X.transpose() * data.X / static_cast<double>(spec.n);
  const auto sigma = build_covariance(spec);
  CHECK((emp - sigma).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("hard design samples realize the coupled covariance") {
  SyntheticSpec spec = base_spec();
  spec.covariance = CovarianceKind::HardMi;
  spec.n = 50000;
  spec.p = 8;
  spec.k_true = 4;
  const auto data = sample_dataset(spec);
  const Eigen::MatrixXd emp = data.X.transpose() * data.X / static_cast<double>(spec.n);
  CHECK((emp - build_covariance(spec)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("noise rescaling is exact for the realized sample") {
  SyntheticSpec spec = base_spec();
  for (const double snr : {0.05, 1.0, 6.0}) {
    spec.snr = snr;
    const auto data = sample_dataset(spec);
    const Eigen::VectorXd signal = data.X * *data.w_true;
    const Eigen::VectorXd noise = data.Y - signal;
    CHECK(signal.norm() / noise.norm() == doctest::Approx(std::sqrt(snr)).epsilon(1e-12));
  }
}

TEST_CASE("explained-variance fraction follows from the exact rescaling") {
  SyntheticSpec spec = base_spec();
  spec.snr = 6.0;
  const auto data = sample_dataset(spec);
  CHECK(std::abs(realized_pve(data) - 6.0 / 7.0) < 1e-12);
  CHECK(realized_snr(data) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("generation is deterministic given the seed") {
  const SyntheticSpec spec = base_spec();
  const auto a = sample_dataset(spec);
  const auto b = sample_dataset(spec);
  CHECK(a.X == b.X);
  CHECK(a.Y == b.Y);
  CHECK(*a.w_true == *b.w_true);

  SyntheticSpec other = spec;
  other.seed = spec.seed + 1;
  CHECK(sample_dataset(other).X != a.X);
}

TEST_CASE("ground-truth weights follow the requested scheme") {
  SyntheticSpec spec = base_spec();
  const auto data = sample_dataset(spec);
  int nonzero = 0;
  for (Eigen::Index j = 0; j < spec.p; ++j) {
    const double w = (*data.w_true)(j);
    if (w != 0.0) {
      ++nonzero;
      CHECK(std::abs(w) == doctest::Approx(1.0));
    }
  }
  CHECK(nonzero == spec.k_true);

  spec.weight_scheme = WeightScheme::UniformOverRoot;
  const auto uniform = sample_dataset(spec);
  for (Eigen::Index j = 0; j < spec.k_true; ++j) {
    CHECK((*uniform.w_true)(j) == doctest::Approx(0.5));  // 1/sqrt(4)
  }
  CHECK(uniform.w_true->tail(spec.p - spec.k_true).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("classification responses are signs of the noisy signal") {
  SyntheticSpec spec = base_spec();
  spec.task = Task::Classification;
  const auto data = sample_dataset(spec);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    CHECK((data.Y(i) == 1.0 || data.Y(i) == -1.0));
  }
}

TEST_CASE("csv ingestion handles the basic shapes and failure modes") {
  IngestOptions opts;
  opts.response = "y";
  opts.standardize = false;

  std::istringstream ok("x1,y\n1,2\n3,4\n5,9\n");
  const auto data = ingest_matrix(ok, opts);
  CHECK(data.n() == 3);
  CHECK(data.p() == 1);
  CHECK(data.Y(2) == doctest::Approx(9.0));
  CHECK(data.column_names == std::vector<std::string>{"x1"});
  CHECK_FALSE(data.standardized);

  std::istringstream missing("x1,y\n1,2\n,4\n");
  CHECK_THROWS_WITH_AS(ingest_matrix(missing, opts), doctest::Contains("missing"),
                       std::runtime_error);

  std::istringstream ragged("x1,y\n1,2\n3,4,5\n");
  CHECK_THROWS_WITH_AS(ingest_matrix(ragged, opts), doctest::Contains("ragged"),
                       std::runtime_error);

  std::istringstream text("x1,y\n1,2\nfoo,4\n");
  CHECK_THROWS_AS(ingest_matrix(text, opts), std::runtime_error);

  std::istringstream noresp("x1,y\n1,2\n");
  IngestOptions bad = opts;
  bad.response = "z";
  CHECK_THROWS_AS(ingest_matrix(noresp, bad), std::runtime_error);

  // Response by 0-based index, headerless file.
  IngestOptions by_index;
  by_index.response = "1";
  by_index.standardize = false;
  by_index.has_header = false;
  std::istringstream headerless("1,2\n3,4\n");
  const auto d2 = ingest_matrix(headerless, by_index);
  CHECK(d2.p() == 1);
  CHECK(d2.Y(0) == doctest::Approx(2.0));
}

TEST_CASE("standardization yields zero mean and unit variance") {
  SyntheticSpec spec = base_spec();
  auto data = sample_dataset(spec);
  standardize_columns(data);
  CHECK(data.standardized);
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    CHECK(std::abs(data.X.col(j).mean()) <= 1e-12);
    const double var = data.X.col(j).squaredNorm() / static_cast<double>(data.n());
    CHECK(std::abs(var - 1.0) <= 1e-12);
  }
}

TEST_CASE("dataset csv round-trips through ingestion") {
  SyntheticSpec spec = base_spec();
  spec.n = 7;
  spec.p = 3;
  spec.k_true = 2;
  const auto data = sample_dataset(spec);
  std::stringstream buffer;
  write_dataset_csv(buffer, data);
  IngestOptions opts;
  opts.response = "response";
  opts.standardize = false;
  const auto back = ingest_matrix(buffer, opts);
  CHECK(back.n() == data.n());
  CHECK(back.p() == data.p());
  CHECK((back.X - data.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.Y - data.Y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("holdout and train/validation splits have the contracted sizes") {
  SyntheticSpec spec = base_spec();
  spec.n = 100;
  const auto data = sample_dataset(spec);

  const auto [kept, held] = split_holdout(data, 0.15, 99);
  CHECK(kept.n() == 85);
  CHECK(held.n() == 15);
  CHECK(kept.w_true.has_value());

  const auto [train, valid] = split_train_validation(data);
  CHECK(train.n() == 67);
  CHECK(valid.n() == 33);

  CHECK_THROWS_AS(split_holdout(data, 1.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(take_rows(data, 90, 20), std::invalid_argument);
}
