#include "oracles.hpp"

#include <limits>
#include <stdexcept>

namespace oracle {

double grid_maximize(const std::function<double(double)>& f, double lo, double hi, int rounds,
                     int points) {
  double best_v = -std::numeric_limits<double>::infinity();
  for (int round = 0; round < rounds; ++round) {
    const double step = (hi - lo) / (points - 1);
    // The bracket always follows this round's best point, independent of
    // earlier rounds, so the shrinking interval keeps the maximizer.
    int round_best_i = 0;
    double round_best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      const double v = f(lo + i * step);
      if (v > round_best_v) {
        round_best_v = v;
        round_best_i = i;
      }
    }
    best_v = std::max(best_v, round_best_v);
    const double new_lo = lo + std::max(0, round_best_i - 1) * step;
    const double new_hi = lo + std::min(points - 1, round_best_i + 1) * step;
    lo = new_lo;
    hi = new_hi;
    if (hi - lo < 1e-15) break;
  }
  return best_v;
}

double grid_minimize(const std::function<double(double)>& f, double lo, double hi, int rounds,
                     int points) {
  return -grid_maximize([&](double x) { return -f(x); }, lo, hi, rounds, points);
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double dense_value_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const Eigen::VectorXd& weights, double gamma) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (weights(j) != 0.0) {
      M.noalias() += gamma * weights(j) * X.col(j) * X.col(j).transpose();
    }
  }
  const Eigen::VectorXd solved = M.fullPivLu().solve(Y);
  return 0.5 * Y.dot(solved);
}

double dense_value_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                       const sparsereg::Support& support, double gamma) {
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(X.cols());
  for (const auto j : support.selected) weights(j) = 1.0;
  return dense_value_ols(X, Y, weights, gamma);
}

Eigen::VectorXd dense_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                            const std::vector<Eigen::Index>& cols, double gamma) {
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd Xs(X.rows(), m);
  for (Eigen::Index c = 0; c < m; ++c) Xs.col(c) = X.col(cols[static_cast<std::size_t>(c)]);
  Eigen::MatrixXd M = Xs.transpose() * Xs;
  M.diagonal().array() += 1.0 / gamma;
  return M.fullPivLu().solve(Xs.transpose() * Y);
}

namespace {

void collect(Eigen::Index p, Eigen::Index k, bool exactly_k, Eigen::Index start,
             std::vector<Eigen::Index>& current, std::vector<std::vector<Eigen::Index>>& out) {
  if (!exactly_k || static_cast<Eigen::Index>(current.size()) == k) out.push_back(current);
  if (static_cast<Eigen::Index>(current.size()) == k) return;
  for (Eigen::Index j = start; j < p; ++j) {
    current.push_back(j);
    collect(p, k, exactly_k, j + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Eigen::Index>> all_supports(Eigen::Index p, Eigen::Index k,
                                                    bool exactly_k) {
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> current;
  collect(p, k, exactly_k, 0, current, out);
  return out;
}

BestSupport enumerate_min(Eigen::Index p, Eigen::Index k, bool exactly_k,
                          const std::function<double(const std::vector<Eigen::Index>&)>& value) {
  BestSupport best;
  best.value = std::numeric_limits<double>::infinity();
  for (const auto& s : all_supports(p, k, exactly_k)) {
    const double v = value(s);
    if (v < best.value) {
      best.value = v;
      best.support = s;
    }
  }
  return best;
}

double allpairs_auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  double wins = 0.0;
  long pairs = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (labels(i) != 1.0) continue;
    for (Eigen::Index j = 0; j < scores.size(); ++j) {
      if (labels(j) != -1.0) continue;
      ++pairs;
      if (scores(i) > scores(j)) wins += 1.0;
      else if (scores(i) == scores(j)) wins += 0.5;
    }
  }
  if (pairs == 0) throw std::invalid_argument("need both classes");
  return wins / static_cast<double>(pairs);
}

}  // namespace oracle
