#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sparsereg/metrics.hpp"
#include "sparsereg/rng.hpp"

using namespace sparsereg;

TEST_CASE("selection metrics count true and false features") {
  Eigen::VectorXd truth(6);
  truth << 1, 0, -1, 0, 1, 0;

  SUBCASE("identical supports") {
    const auto m = selection_metrics(truth, truth);
    CHECK(m.accuracy == doctest::Approx(1.0));
    CHECK(m.fdr == doctest::Approx(0.0));
    CHECK(m.tf == 3);
    CHECK(m.ff == 0);
  }
  SUBCASE("disjoint supports") {
    Eigen::VectorXd w(6);
    w << 0, 2, 0, -1, 0, 3;
    const auto m = selection_metrics(w, truth);
    CHECK(m.accuracy == doctest::Approx(0.0));
    CHECK(m.fdr == doctest::Approx(1.0));
  }
  SUBCASE("empty selection uses the 0/0 convention") {
    const auto m = selection_metrics(Eigen::VectorXd::Zero(6), truth);
    CHECK(m.accuracy == doctest::Approx(0.0));
    CHECK(m.fdr == doctest::Approx(0.0));
  }
  SUBCASE("scale invariance") {
    Eigen::VectorXd w(6);
    w << 0.3, 0, 0, 1e-4, -2, 0;
    const auto a = selection_metrics(w, truth);
    const auto b = selection_metrics((1234.5 * w).eval(), truth);
    CHECK(a.tf == b.tf);
    CHECK(a.ff == b.ff);
  }
  SUBCASE("all-zero ground truth is rejected") {
    CHECK_THROWS_AS(selection_metrics(truth, Eigen::VectorXd::Zero(6)), std::invalid_argument);
  }
}

TEST_CASE("mean squared error matches the naive loop") {
  SyntheticSpec spec;
  spec.n = 17;
  spec.p = 5;
  spec.k_true = 2;
  spec.seed = 4;
  const auto data = sample_dataset(spec);

  CHECK(mse({Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3), {}, false, {}},
            Eigen::VectorXd::Zero(2)) == doctest::Approx(0.0));

  Rng rng(8);
  Eigen::VectorXd w(5);
  for (int j = 0; j < 5; ++j) w(j) = rng.normal();
  const double b = 0.37;
  double naive = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    double pred = b;
    for (Eigen::Index j = 0; j < 5; ++j) pred += data.X(i, j) * w(j);
    naive += (data.Y(i) - pred) * (data.Y(i) - pred);
  }
  naive /= static_cast<double>(data.n());
  CHECK(mse(data, w, b) == doctest::Approx(naive).epsilon(1e-12));

  // A perfect noiseless fit has zero error.
  Dataset clean = data;
  clean.Y = clean.X * w;
  CHECK(mse(clean, w, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("auc matches the all-pairs reference and its conventions") {
  Eigen::VectorXd labels(4), scores(4);
  labels << 1, 1, -1, -1;

  scores << 3, 2, 1, 0;  // perfectly separated
  CHECK(auc(scores, labels) == doctest::Approx(1.0));

  scores.setConstant(0.5);  // all tied
  CHECK(auc(scores, labels) == doctest::Approx(0.5));

  scores << 0.3, -0.1, 0.2, -0.4;
  CHECK(auc(scores, labels) == doctest::Approx(oracle::allpairs_auc(scores, labels)));

  Rng rng(19);
  Eigen::VectorXd big_scores(60), big_labels(60);
  for (int i = 0; i < 60; ++i) {
    big_labels(i) = i % 3 == 0 ? 1.0 : -1.0;
    big_scores(i) = std::round(rng.normal() * 4.0) / 4.0;  // force ties
  }
  CHECK(auc(big_scores, big_labels) ==
        doctest::Approx(oracle::allpairs_auc(big_scores, big_labels)).epsilon(1e-12));

  // Invariance under strictly increasing transformations.
  Eigen::VectorXd warped(60);
  for (int i = 0; i < 60; ++i) warped(i) = std::atan(big_scores(i)) * 3.0 + 7.0;
  CHECK(auc(warped, big_labels) == doctest::Approx(auc(big_scores, big_labels)));

  Eigen::VectorXd single(3), single_scores(3);
  single << 1, 1, 1;
  single_scores << 1, 2, 3;
  CHECK_THROWS_AS(auc(single_scores, single), std::invalid_argument);
}

TEST_CASE("ridge schedules double from the row-norm scale") {
  Dataset data;
  data.X.resize(2, 2);
  data.X << 2, 0, 0, 1;  // max row squared norm = 4
  data.Y = Eigen::VectorXd::Zero(2);
  CHECK(gamma_zero(data) == doctest::Approx(0.25));

  const auto schedule = gamma_schedule(data, 4);
  REQUIRE(schedule.size() == 4);
  CHECK(schedule[0] == doctest::Approx(0.25));
  for (std::size_t t = 1; t < schedule.size(); ++t) {
    CHECK(schedule[t] / schedule[t - 1] == doctest::Approx(2.0).epsilon(1e-15));
  }
  CHECK(gamma_schedule(data, 1).size() == 1);
  CHECK_THROWS_AS(gamma_schedule(data, 0), std::invalid_argument);

  CHECK(gamma_zero_normalized(data, 2) == doctest::Approx(2.0 / (2.0 * 2.0 * 4.0)));
}

TEST_CASE("grid search returns the best validated cell") {
  SyntheticSpec spec;
  spec.n = 60;
  spec.p = 4;
  spec.k_true = 2;
  spec.seed = 5;
  const auto data = sample_dataset(spec);
  const auto [train, valid] = split_train_validation(data);

  // Deterministic stub method: w = hyper * e_k; validation MSE is a known
  // function of (k, hyper).
  const MethodFit fit = [](const Dataset& tr, Eigen::Index k, double hyper,
                           const FitOutput*) {
    FitOutput out;
    out.w = Eigen::VectorXd::Zero(tr.p());
    out.w(k - 1) = hyper;
    return out;
  };

  const std::vector<Eigen::Index> ks{1, 2};
  const std::vector<double> hypers{0.0, 0.5, 1.0};
  const auto res = grid_search(fit, train, valid, ks, hypers, Criterion::Mse);
  CHECK(res.table.size() == 6);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& cell : res.table) {
    REQUIRE(cell.ok);
    best = std::min(best, cell.criterion_value);
  }
  CHECK(res.best_criterion == doctest::Approx(best));

  SUBCASE("single cell returns that cell") {
    const std::vector<Eigen::Index> one_k{2};
    const std::vector<double> one_h{0.5};
    const auto single = grid_search(fit, train, valid, one_k, one_h, Criterion::Mse);
    CHECK(single.best_k == 2);
    CHECK(single.best_hyper == doctest::Approx(0.5));
    CHECK(single.table.size() == 1);
  }

  SUBCASE("ties resolve to the smaller k then the smaller hyper") {
    const MethodFit constant = [](const Dataset& tr, Eigen::Index, double, const FitOutput*) {
      FitOutput out;
      out.w = Eigen::VectorXd::Zero(tr.p());
      return out;
    };
    const auto tied = grid_search(constant, train, valid, ks, hypers, Criterion::Mse);
    CHECK(tied.best_k == 1);
    CHECK(tied.best_hyper == doctest::Approx(0.0));
  }

  SUBCASE("failing cells are recorded and skipped") {
    const MethodFit flaky = [](const Dataset& tr, Eigen::Index k, double hyper,
                               const FitOutput*) {
      if (k == 1) throw std::runtime_error("boom");
      FitOutput out;
      out.w = Eigen::VectorXd::Zero(tr.p());
      out.w(0) = hyper;
      return out;
    };
    const auto res2 = grid_search(flaky, train, valid, ks, hypers, Criterion::Mse);
    CHECK(res2.any_failure);
    CHECK(res2.best_k == 2);
    int failures = 0;
    for (const auto& cell : res2.table) {
      if (!cell.ok) {
        ++failures;
        CHECK(cell.error == "boom");
      }
    }
    CHECK(failures == 3);
  }
}

TEST_CASE("grid search warm-starts along the schedule within a k") {
  SyntheticSpec spec;
  spec.n = 30;
  spec.p = 3;
  spec.k_true = 1;
  spec.seed = 6;
  const auto data = sample_dataset(spec);
  const auto [train, valid] = split_train_validation(data);

  int warm_seen = 0;
  const MethodFit fit = [&warm_seen](const Dataset& tr, Eigen::Index, double hyper,
                                     const FitOutput* warm) {
    if (warm) ++warm_seen;
    FitOutput out;
    out.w = Eigen::VectorXd::Constant(tr.p(), hyper);
    return out;
  };
  const std::vector<Eigen::Index> ks{1, 2};
  const std::vector<double> hypers{0.1, 0.2, 0.3};
  grid_search(fit, train, valid, ks, hypers, Criterion::Mse);
  // Two warm-started cells per k (the first of each k starts cold).
  CHECK(warm_seen == 4);
}

TEST_CASE("default k grids are log-spaced and bounded") {
  const auto with_truth = default_k_grid(200, 1000, 10);
  REQUIRE_FALSE(with_truth.empty());
  CHECK(with_truth.front() == 2);  // max(1, 10/4)
  CHECK(with_truth.back() == 40);  // min(200, 4*10)
  for (std::size_t i = 1; i < with_truth.size(); ++i) {
    CHECK(with_truth[i] > with_truth[i - 1]);
  }
  const auto no_truth = default_k_grid(50, 30, std::nullopt);
  CHECK(no_truth.front() == 1);
  CHECK(no_truth.back() == 15);  // min(p, n/2)
}

TEST_CASE("sparsity interpolation brackets the target support size") {
  Eigen::VectorXd truth(8);
  truth << 1, 1, 1, 1, 1, 0, 0, 0;  // k_true = 5

  RegPath path;
  // One point with 4 selected (3 true), one with 6 selected (4 true).
  PathPoint a;
  a.lambda = 1.0;
  a.w = Eigen::VectorXd::Zero(8);
  a.w(0) = a.w(1) = a.w(2) = 1.0;
  a.w(5) = 1.0;
  a.support_size = 4;
  PathPoint b;
  b.lambda = 0.5;
  b.w = Eigen::VectorXd::Zero(8);
  b.w(0) = b.w(1) = b.w(2) = b.w(3) = 1.0;
  b.w(5) = b.w(6) = 1.0;
  b.support_size = 6;
  path.points = {a, b};

  const auto mid = sparsity_interpolate(path, truth, 5);
  CHECK(mid.tf == doctest::Approx(3.5));
  CHECK(mid.ff == doctest::Approx(1.5));

  const auto exact = sparsity_interpolate(path, truth, 4);
  CHECK(exact.tf == doctest::Approx(3.0));
  CHECK(exact.ff == doctest::Approx(1.0));

  CHECK_THROWS_AS(sparsity_interpolate(path, truth, 2), std::out_of_range);
  CHECK_THROWS_AS(sparsity_interpolate(path, truth, 7), std::out_of_range);
}
