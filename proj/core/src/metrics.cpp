#include "sparsereg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsereg {

SelectionCounts selection_metrics(const Eigen::VectorXd& w, const Eigen::VectorXd& w_true) {
  if (w.size() != w_true.size()) throw std::invalid_argument("vector length mismatch");
  SelectionCounts out;
  int k_true = 0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const bool sel = std::abs(w(j)) > kSupportZeroTol;
    const bool truth = w_true(j) != 0.0;
    if (truth) ++k_true;
    if (sel && truth) ++out.tf;
    if (sel && !truth) ++out.ff;
  }
  if (k_true == 0) throw std::invalid_argument("w_true has no nonzero entries");
  out.accuracy = static_cast<double>(out.tf) / static_cast<double>(k_true);
  const int selected = out.tf + out.ff;
  out.fdr = selected > 0 ? static_cast<double>(out.ff) / static_cast<double>(selected) : 0.0;
  return out;
}

double mse(const Dataset& data, const Eigen::VectorXd& w, double intercept) {
  if (w.size() != data.p()) throw std::invalid_argument("coefficient length mismatch");
  const Eigen::VectorXd r =
      data.Y - data.X * w - Eigen::VectorXd::Constant(data.n(), intercept);
  return r.squaredNorm() / static_cast<double>(data.n());
}

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("length mismatch");
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return scores(a) < scores(b); });

  // Average ranks across ties, then the Mann-Whitney statistic.
  std::vector<double> rank(static_cast<std::size_t>(n));
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && scores(order[static_cast<std::size_t>(j + 1)]) ==
                            scores(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (Eigen::Index t = i; t <= j; ++t) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = avg;
    i = j + 1;
  }

  double rank_sum_pos = 0.0;
  Eigen::Index n_pos = 0, n_neg = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (labels(t) == 1.0) {
      ++n_pos;
      rank_sum_pos += rank[static_cast<std::size_t>(t)];
    } else if (labels(t) == -1.0) {
      ++n_neg;
    } else {
      throw std::invalid_argument("labels must be -1 or +1");
    }
  }
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc needs both classes present");
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

double max_row_sq_norm(const Dataset& data) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) m = std::max(m, data.X.row(i).squaredNorm());
  if (m <= 0.0) throw std::invalid_argument("design matrix is identically zero");
  return m;
}

}  // namespace

double gamma_zero(const Dataset& data) { return 1.0 / max_row_sq_norm(data); }

double gamma_zero_normalized(const Dataset& data, Eigen::Index k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  return static_cast<double>(data.p()) /
         (static_cast<double>(data.n()) * static_cast<double>(k) * max_row_sq_norm(data));
}

std::vector<double> gamma_schedule(const Dataset& data, int steps) {
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  std::vector<double> out(static_cast<std::size_t>(steps));
  out[0] = gamma_zero(data);
  for (int t = 1; t < steps; ++t) out[static_cast<std::size_t>(t)] = 2.0 * out[static_cast<std::size_t>(t - 1)];
  return out;
}

GridSearchResult grid_search(const MethodFit& fit, const Dataset& train, const Dataset& valid,
                             std::span<const Eigen::Index> k_grid,
                             std::span<const double> schedule, Criterion criterion) {
  if (k_grid.empty() || schedule.empty()) throw std::invalid_argument("empty search grid");

  GridSearchResult result;
  result.best_criterion = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (const auto k : k_grid) {
    FitOutput warm;
    bool have_warm = false;
    for (const auto hyper : schedule) {
      GridCellRecord cell;
      cell.k = k;
      cell.hyper = hyper;
      try {
        FitOutput out = fit(train, k, hyper, have_warm ? &warm : nullptr);
        double value;
        if (criterion == Criterion::Mse) {
          value = mse(valid, out.w, out.intercept);
        } else {
          const Eigen::VectorXd scores =
              valid.X * out.w + Eigen::VectorXd::Constant(valid.n(), out.intercept);
          value = 1.0 - auc(scores, valid.Y);  // smaller is better
        }
        cell.criterion_value = value;
        cell.seconds = out.seconds;
        for (Eigen::Index j = 0; j < out.w.size(); ++j) {
          if (std::abs(out.w(j)) > kSupportZeroTol) ++cell.support_size;
        }
        // Strict improvement keeps the smallest k, then the smallest
        // hyper, on ties (grid order is ascending in both).
        if (!have_best || value < result.best_criterion) {
          result.best = out;
          result.best_k = k;
          result.best_hyper = hyper;
          result.best_criterion = value;
          have_best = true;
        }
        warm = std::move(out);
        have_warm = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
        result.any_failure = true;
      }
      result.table.push_back(std::move(cell));
    }
  }
  if (!have_best) throw std::runtime_error("every grid cell failed");
  return result;
}

std::vector<Eigen::Index> default_k_grid(Eigen::Index p, Eigen::Index n,
                                         std::optional<Eigen::Index> k_true) {
  Eigen::Index lo = 1, hi = 1;
  if (k_true) {
    lo = std::max<Eigen::Index>(1, *k_true / 4);
    hi = std::min<Eigen::Index>(p, 4 * *k_true);
  } else {
    lo = 1;
    hi = std::min<Eigen::Index>(p, std::max<Eigen::Index>(1, n / 2));
  }
  std::vector<Eigen::Index> grid;
  const int count = 10;
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (int i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const auto k = static_cast<Eigen::Index>(std::llround(std::exp(log_lo + f * (log_hi - log_lo))));
    if (grid.empty() || grid.back() != k) grid.push_back(std::clamp(k, lo, hi));
  }
  return grid;
}

InterpolatedCounts sparsity_interpolate(const RegPath& path, const Eigen::VectorXd& w_true,
                                        Eigen::Index k_target) {
  if (path.points.empty()) throw std::out_of_range("empty path");

  struct Node {
    int size;
    SelectionCounts counts;
  };
  std::vector<Node> nodes;
  nodes.reserve(path.points.size());
  for (const auto& pt : path.points) {
    nodes.push_back({pt.support_size, selection_metrics(pt.w, w_true)});
    if (pt.support_size == k_target) {
      return {static_cast<double>(nodes.back().counts.tf),
              static_cast<double>(nodes.back().counts.ff)};
    }
  }

  // Nearest bracketing sizes below and above the target.
  const Node* lo = nullptr;
  const Node* hi = nullptr;
  for (const auto& node : nodes) {
    if (node.size < k_target && (!lo || node.size > lo->size)) lo = &node;
    if (node.size > k_target && (!hi || node.size < hi->size)) hi = &node;
  }
  if (!lo || !hi) throw std::out_of_range("path does not span the target support size");

  const double f = static_cast<double>(k_target - lo->size) / static_cast<double>(hi->size - lo->size);
  return {(1.0 - f) * lo->counts.tf + f * hi->counts.tf,
          (1.0 - f) * lo->counts.ff + f * hi->counts.ff};
}

}  // namespace sparsereg
