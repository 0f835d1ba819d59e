#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "sparsereg/metrics.hpp"
#include "sparsereg/penalties.hpp"
#include "sparsereg/rng.hpp"

using namespace sparsereg;

namespace {

PenaltySpec make_spec(PenaltyFamily family, double lambda, double gamma = 3.0,
                      double alpha = 1.0) {
  PenaltySpec spec;
  spec.family = family;
  spec.lambda = lambda;
  spec.gamma_shape = gamma;
  spec.alpha_mix = alpha;
  return spec;
}

double prox_objective(const PenaltySpec& spec, double z, double nu, double w) {
  return 0.5 * nu * w * w - z * w + penalty_eval(spec, std::abs(w));
}

// Reference prox by grid refinement over a bracket that always contains
// the global minimizer.
double prox_reference(const PenaltySpec& spec, double z, double nu) {
  const double reach = std::abs(z) / nu + spec.gamma_shape * std::max(spec.lambda, 1.0) + 1.0;
  double best_w = 0.0;
  double best_v = prox_objective(spec, z, nu, 0.0);
  // Two-sided search keeps the symmetric tie at zero deterministic.
  for (const double side : {-1.0, 1.0}) {
    double lo = 0.0, hi = side * reach;
    if (hi < lo) std::swap(lo, hi);
    for (int round = 0; round < 40; ++round) {
      const int points = 201;
      const double step = (hi - lo) / (points - 1);
      int best_i = 0;
      double local_best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < points; ++i) {
        const double w = lo + i * step;
        const double v = prox_objective(spec, z, nu, w);
        if (v < local_best) {
          local_best = v;
          best_i = i;
        }
      }
      const double center = lo + best_i * step;
      if (local_best < best_v - 0.0) {
        best_v = local_best;
        best_w = center;
      }
      const double new_lo = std::max(lo, center - step);
      const double new_hi = std::min(hi, center + step);
      lo = new_lo;
      hi = new_hi;
      if (hi - lo < 1e-14) break;
    }
  }
  return best_w;
}

Dataset orthogonal_design(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  // Columns orthonormal after centering and 1/n scaling: QR of a centered
  // Gaussian block, scaled by sqrt(n).
  Rng rng(seed);
  Eigen::MatrixXd M(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) M(i, j) = rng.normal();
  }
  for (Eigen::Index j = 0; j < p; ++j) M.col(j).array() -= M.col(j).mean();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ() *
                            Eigen::MatrixXd::Identity(n, p);
  Dataset data;
  data.X = std::sqrt(static_cast<double>(n)) * Q;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  w(0) = 1.5;
  w(2) = -0.8;
  data.Y = data.X * w;
  for (Eigen::Index i = 0; i < n; ++i) data.Y(i) += 0.3 * rng.normal();
  data.w_true = w;
  return data;
}

}  // namespace

TEST_CASE("penalty values at the reference points") {
  const auto mcp = make_spec(PenaltyFamily::Mcp, 1.0, 3.0);
  CHECK(penalty_eval(mcp, 3.0) == doctest::Approx(1.5));
  CHECK(penalty_eval(mcp, 10.0) == doctest::Approx(1.5));  // plateau

  const auto scad = make_spec(PenaltyFamily::Scad, 1.0, 3.0);
  CHECK(penalty_eval(scad, 3.0) == doctest::Approx(2.0));
  CHECK(penalty_eval(scad, 100.0) == doctest::Approx(2.0));

  for (const auto family :
       {PenaltyFamily::L1, PenaltyFamily::ElasticNet, PenaltyFamily::Mcp, PenaltyFamily::Scad}) {
    CHECK(penalty_eval(make_spec(family, 0.7, 3.0, 0.5), 0.0) == 0.0);
  }
}

TEST_CASE("penalties are continuous at their breakpoints") {
  const double eps = 1e-9;
  for (const double lambda : {0.3, 1.0, 2.0}) {
    for (const double gamma : {2.5, 3.0, 3.7}) {
      const auto mcp = make_spec(PenaltyFamily::Mcp, lambda, gamma);
      CHECK(penalty_eval(mcp, gamma * lambda - eps) ==
            doctest::Approx(penalty_eval(mcp, gamma * lambda + eps)).epsilon(1e-8));
      const auto scad = make_spec(PenaltyFamily::Scad, lambda, gamma);
      CHECK(penalty_eval(scad, lambda - eps) ==
            doctest::Approx(penalty_eval(scad, lambda + eps)).epsilon(1e-8));
      CHECK(penalty_eval(scad, gamma * lambda - eps) ==
            doctest::Approx(penalty_eval(scad, gamma * lambda + eps)).epsilon(1e-8));
    }
  }
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(penalty_eval(make_spec(PenaltyFamily::Mcp, 1.0, 1.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(penalty_eval(make_spec(PenaltyFamily::Scad, 1.0, 2.0), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(penalty_eval(make_spec(PenaltyFamily::L1, -1.0), 1.0), std::invalid_argument);
}

TEST_CASE("soft threshold reference points") {
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(2.0, 1.0) == doctest::Approx(1.0));
  CHECK(soft_threshold(-3.0, 0.5) == doctest::Approx(-2.5));
}

TEST_CASE("univariate prox closed forms at the reference points") {
  const auto mcp = make_spec(PenaltyFamily::Mcp, 1.0, 3.0);
  CHECK(univariate_prox(mcp, 2.0, 1.0) == doctest::Approx(1.5));
  CHECK(univariate_prox(mcp, 5.0, 1.0) == doctest::Approx(5.0));
  for (const auto family :
       {PenaltyFamily::L1, PenaltyFamily::ElasticNet, PenaltyFamily::Mcp, PenaltyFamily::Scad}) {
    CHECK(univariate_prox(make_spec(family, 1.0, 3.0, 0.5), 0.0, 1.0) == 0.0);
  }
}

TEST_CASE("univariate prox agrees with grid refinement across the lattice") {
  const double lambdas[] = {0.1, 0.5, 1.0, 2.0};
  const double gammas[] = {1.5, 3.0, 3.7, 10.0};
  const double nus[] = {0.5, 1.0, 2.0};
  for (const auto family : {PenaltyFamily::L1, PenaltyFamily::Mcp, PenaltyFamily::Scad}) {
    for (const double lambda : lambdas) {
      for (const double gamma : gammas) {
        if (family == PenaltyFamily::Scad && gamma <= 2.0) continue;
        for (const double nu : nus) {
          for (double z = -6.0; z <= 6.0 + 1e-9; z += 0.5) {
            const auto spec = make_spec(family, lambda, gamma);
            const double fast = univariate_prox(spec, z, nu);
            const double slow = prox_reference(spec, z, nu);
            // Compare objective values; distinct near-tied minimizers are
            // acceptable, a worse objective is not.
            const double v_fast = prox_objective(spec, z, nu, fast);
            const double v_slow = prox_objective(spec, z, nu, slow);
            CHECK(v_fast <= v_slow + 1e-10);
            if (std::abs(fast - slow) > 1e-6) {
              CHECK(std::abs(v_fast - v_slow) <= 1e-9);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("elastic net prox interpolates between lasso and ridge") {
  const auto enet = make_spec(PenaltyFamily::ElasticNet, 1.0, 3.0, 0.5);
  const double z = 2.0;
  CHECK(univariate_prox(enet, z, 1.0) ==
        doctest::Approx(soft_threshold(z, 0.5) / (1.0 + 0.5)));
  const auto pure_l1 = make_spec(PenaltyFamily::ElasticNet, 1.0, 3.0, 1.0);
  CHECK(univariate_prox(pure_l1, z, 1.0) == doctest::Approx(soft_threshold(z, 1.0)));
}

TEST_CASE("very flat concavity reduces to soft thresholding") {
  const auto mcp = make_spec(PenaltyFamily::Mcp, 0.8, 1e6);
  for (double z = -6.0; z <= 6.0 + 1e-9; z += 0.25) {
    CHECK(std::abs(univariate_prox(mcp, z, 1.0) - soft_threshold(z, 0.8)) <= 1e-4);
  }
}

TEST_CASE("lambda grids are log-spaced from the all-zero threshold") {
  const auto data = orthogonal_design(40, 6, 31);
  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::L1, 1.0, 5, 0.1);
  REQUIRE(grid.size() == 5);
  CHECK(grid.back() == doctest::Approx(grid.front() * 0.1).epsilon(1e-12));
  const double ratio = grid[1] / grid[0];
  for (std::size_t i = 2; i < grid.size(); ++i) {
    CHECK(grid[i] / grid[i - 1] == doctest::Approx(ratio).epsilon(1e-12));
  }

  // Two-point grid hits the endpoints exactly.
  const auto two = lambda_grid(data, ols, PenaltyFamily::L1, 1.0, 2, 0.1);
  CHECK(two.front() == doctest::Approx(grid.front()));
  CHECK(two.back() == doctest::Approx(0.1 * grid.front()));

  // Just above lambda_max the fit is identically zero.
  const std::vector<double> probe{grid.front() * 1.0001};
  const auto path = cd_fit(data, ols, PenaltyFamily::L1, probe);
  CHECK(path.points.front().support_size == 0);
  CHECK(path.points.front().w.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("orthogonal designs reduce coordinate descent to soft thresholding") {
  const auto data = orthogonal_design(60, 8, 7);
  LossModel ols;
  const double n = static_cast<double>(data.n());
  const Eigen::VectorXd yc = data.Y.array() - data.Y.mean();
  const Eigen::VectorXd z = data.X.transpose() * yc / n;

  const double lambda = 0.3;
  const std::vector<double> path{lambda};
  const auto fit = cd_fit(data, ols, PenaltyFamily::L1, path);
  for (Eigen::Index j = 0; j < 8; ++j) {
    CHECK(fit.points.front().w(j) == doctest::Approx(soft_threshold(z(j), lambda)).epsilon(1e-6));
  }
}

TEST_CASE("lasso solutions satisfy the stationarity conditions on the path") {
  SyntheticSpec spec;
  spec.n = 50;
  spec.p = 10;
  spec.k_true = 3;
  spec.covariance = CovarianceKind::Toeplitz;
  spec.rho = 0.4;
  spec.snr = 4.0;
  spec.seed = 77;
  auto data = sample_dataset(spec);
  standardize_columns(data);
  const double y_mean = data.Y.mean();
  data.Y.array() -= y_mean;

  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::L1, 1.0, 30, 0.01);
  const auto path = cd_fit(data, ols, PenaltyFamily::L1, grid);
  const double n = static_cast<double>(data.n());

  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const auto& pt = path.points[i];
    const Eigen::VectorXd r =
        data.Y - data.X * pt.w - Eigen::VectorXd::Constant(data.n(), pt.intercept);
    const Eigen::VectorXd corr = data.X.transpose() * r / n;
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (std::abs(pt.w(j)) > 1e-10) {
        CHECK(corr(j) == doctest::Approx(grid[i] * (pt.w(j) > 0 ? 1.0 : -1.0)).epsilon(1e-6));
      } else {
        CHECK(std::abs(corr(j)) <= grid[i] + 1e-6);
      }
    }
  }
}

TEST_CASE("the objective never increases across coordinate sweeps") {
  SyntheticSpec spec;
  spec.n = 40;
  spec.p = 12;
  spec.k_true = 4;
  spec.covariance = CovarianceKind::Toeplitz;
  spec.rho = 0.6;
  spec.snr = 2.0;
  spec.seed = 3;
  const auto data = sample_dataset(spec);
  LossModel ols;
  CdOptions opts;
  opts.record_sweep_objectives = true;

  for (const auto family : {PenaltyFamily::L1, PenaltyFamily::Mcp, PenaltyFamily::Scad}) {
    const auto grid = lambda_grid(data, ols, family, 1.0, 10, 0.05);
    const auto path = cd_fit(data, ols, family, grid, 1.0, 3.0, opts);
    for (const auto& pt : path.points) {
      for (std::size_t s = 1; s < pt.sweep_objectives.size(); ++s) {
        CHECK(pt.sweep_objectives[s] <= pt.sweep_objectives[s - 1] + 1e-10);
      }
    }
  }
}

TEST_CASE("support size grows monotonically along orthogonal-design paths") {
  const auto data = orthogonal_design(80, 10, 15);
  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::L1, 1.0, 40, 1e-3);
  const auto path = cd_fit(data, ols, PenaltyFamily::L1, grid);
  for (std::size_t i = 1; i < path.points.size(); ++i) {
    CHECK(path.points[i].support_size >= path.points[i - 1].support_size);
  }
  CHECK(path.points.front().support_size == 0);
}

TEST_CASE("logistic fits satisfy the stationarity conditions") {
  SyntheticSpec spec;
  spec.n = 200;
  spec.p = 8;
  spec.k_true = 3;
  spec.covariance = CovarianceKind::Identity;
  spec.snr = 4.0;
  spec.task = Task::Classification;
  spec.seed = 11;
  auto data = sample_dataset(spec);
  // The penalty applies to standardized coefficients, so the stationarity
  // statement below assumes unit-variance columns.
  standardize_columns(data);
  LossModel logistic;
  logistic.kind = LossKind::Logistic;

  const auto grid = lambda_grid(data, logistic, PenaltyFamily::L1, 1.0, 8, 0.05);
  const auto path = cd_fit(data, logistic, PenaltyFamily::L1, grid);
  const double n = static_cast<double>(data.n());

  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const auto& pt = path.points[i];
    if (!pt.converged) continue;
    const Eigen::VectorXd eta =
        data.X * pt.w + Eigen::VectorXd::Constant(data.n(), pt.intercept);
    Eigen::VectorXd grad_terms(data.n());
    double grad_intercept = 0.0;
    for (Eigen::Index r = 0; r < data.n(); ++r) {
      const double pr = 1.0 / (1.0 + std::exp(-eta(r)));
      const double t = data.Y(r) > 0 ? 1.0 : 0.0;
      grad_terms(r) = pr - t;
      grad_intercept += pr - t;
    }
    const Eigen::VectorXd grad = data.X.transpose() * grad_terms / n;
    CHECK(std::abs(grad_intercept / n) <= 1e-4);
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (std::abs(pt.w(j)) > 1e-10) {
        CHECK(std::abs(grad(j) + grid[i] * (pt.w(j) > 0 ? 1.0 : -1.0)) <= 1e-4);
      } else {
        CHECK(std::abs(grad(j)) <= grid[i] + 1e-4);
      }
    }
  }
}

TEST_CASE("cd_fit rejects unsupported losses and malformed paths") {
  const auto data = orthogonal_design(30, 5, 4);
  LossModel hinge;
  hinge.kind = LossKind::Hinge;
  const std::vector<double> path{0.5};
  CHECK_THROWS_AS(cd_fit(data, hinge, PenaltyFamily::L1, path), std::invalid_argument);

  LossModel ols;
  const std::vector<double> increasing{0.1, 0.5};
  CHECK_THROWS_AS(cd_fit(data, ols, PenaltyFamily::L1, increasing), std::invalid_argument);
  const std::vector<double> empty;
  CHECK_THROWS_AS(cd_fit(data, ols, PenaltyFamily::L1, empty), std::invalid_argument);
}

TEST_CASE("path export lists nonzero coefficients per point") {
  const auto data = orthogonal_design(40, 6, 21);
  LossModel ols;
  const auto grid = lambda_grid(data, ols, PenaltyFamily::L1, 1.0, 5, 0.01);
  const auto path = cd_fit(data, ols, PenaltyFamily::L1, grid);
  std::ostringstream out;
  write_path_csv(out, path);
  const std::string text = out.str();
  CHECK(text.rfind("lambda,support_size,objective,coefficients\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') ==
        static_cast<long>(path.points.size()) + 1);
}
