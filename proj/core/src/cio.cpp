#include "sparsereg/cio.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sparsereg/csv.hpp"

namespace sparsereg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = X.col(cols[c]);
  return out;
}

// argmax over alpha of -sum conj(y_i, alpha_i) - (gamma/2)||B' alpha||^2
// for the quadratic-conjugate OLS case, solved in closed form. B holds
// the participating (possibly scaled) columns.
Eigen::VectorXd ols_alpha_star(const Eigen::MatrixXd& B, const Eigen::VectorXd& Y, double gamma) {
  const Eigen::Index n = Y.size();
  const Eigen::Index m = B.cols();
  if (m == 0) return -Y;
  if (m < n) {
    // alpha* = -Y + B (I/gamma + B'B)^{-1} B'Y; the n x n inverse is
    // never formed.
    Eigen::MatrixXd M = B.transpose() * B;
    M.diagonal().array() += 1.0 / gamma;
    const Eigen::VectorXd t = M.llt().solve(B.transpose() * Y);
    return -Y + B * t;
  }
  Eigen::MatrixXd A = gamma * (B * B.transpose());
  A.diagonal().array() += 1.0;
  return -(A.llt().solve(Y));
}

// Exact 1-D maximizer of -conj(y, a) - c1 a - (c2/2) a^2 over the
// conjugate domain. Closed forms everywhere except the logistic entropy,
// which is handled by bisection on the strictly decreasing derivative.
double coordinate_update(const LossModel& model, double y, double c1, double c2, double current) {
  const double eps = model.svr_epsilon;
  switch (model.kind) {
    case LossKind::Ols:
      return -(y + c1) / (1.0 + c2);
    case LossKind::Hinge: {
      const double lo = y > 0 ? -1.0 : 0.0;
      const double hi = y > 0 ? 0.0 : 1.0;
      if (c2 > 0.0) return std::clamp(-(y + c1) / c2, lo, hi);
      const double slope = -(y + c1);
      if (slope > 0.0) return hi;
      if (slope < 0.0) return lo;
      return std::clamp(current, lo, hi);
    }
    case LossKind::SvmL2: {
      const double cand = -(y + c1) / (1.0 + c2);
      return y > 0 ? std::min(cand, 0.0) : std::max(cand, 0.0);
    }
    case LossKind::SvrL1: {
      double cand;
      if (c2 > 0.0) {
        const double z = -(y + c1);
        cand = (z > eps ? z - eps : (z < -eps ? z + eps : 0.0)) / c2;
      } else {
        const double z = -(y + c1);
        cand = z > eps ? 1.0 : (z < -eps ? -1.0 : 0.0);
      }
      return std::clamp(cand, -1.0, 1.0);
    }
    case LossKind::SvrL2: {
      const double z = -(y + c1);
      return (z > eps ? z - eps : (z < -eps ? z + eps : 0.0)) / (1.0 + c2);
    }
    case LossKind::Logistic: {
      const double tau = model.logistic_clamp;
      double lo = y > 0 ? -1.0 + tau : tau;
      double hi = y > 0 ? -tau : 1.0 - tau;
      const auto deriv = [&](double a) {
        const double t = -y * a;
        return y * std::log(t / (1.0 - t)) - c1 - c2 * a;
      };
      if (deriv(lo) <= 0.0) return lo;
      if (deriv(hi) >= 0.0) return hi;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (deriv(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return current;
}

struct AscentOutcome {
  Eigen::VectorXd alpha;
  bool converged = false;
  double achieved = kInf;
  int sweeps = 0;
};

// Projected coordinate ascent on the dual for non-OLS losses; each
// coordinate update is an exact 1-D maximization, so the objective is
// monotone. Tolerance on the largest per-sweep coordinate change.
AscentOutcome dual_coordinate_ascent(const Eigen::MatrixXd& B, const Dataset& data,
                                     const LossModel& model, double gamma, double tol,
                                     int max_sweeps) {
  const Eigen::Index n = data.n();
  const Eigen::Index m = B.cols();

  AscentOutcome out;
  out.alpha.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.alpha(i) = conjugate_domain_project(model, data.Y(i), is_classification(model.kind)
                                                                  ? -0.5 * data.Y(i)
                                                                  : 0.0);
  }

  Eigen::VectorXd v = B.transpose() * out.alpha;  // m-vector cache of B' alpha
  Eigen::VectorXd row_sq(n);
  for (Eigen::Index i = 0; i < n; ++i) row_sq(i) = B.row(i).squaredNorm();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double old = out.alpha(i);
      const double c2 = gamma * row_sq(i);
      const double c1 = gamma * (m > 0 ? B.row(i).dot(v) : 0.0) - c2 * old;
      double next = coordinate_update(model, data.Y(i), c1, c2, old);
      next = conjugate_domain_project(model, data.Y(i), next);
      const double change = std::abs(next - old);
      if (change > 0.0) {
        out.alpha(i) = next;
        if (m > 0) v.noalias() += (next - old) * B.row(i).transpose();
        max_change = std::max(max_change, change);
      }
    }
    out.sweeps = sweep + 1;
    out.achieved = max_change;
    if (max_change <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

InnerResult inner_on_columns(const Eigen::MatrixXd& B, const Dataset& data,
                             const LossModel& model, double gamma) {
  InnerResult result;
  if (model.kind == LossKind::Ols) {
    result.alpha_star = ols_alpha_star(B, data.Y, gamma);
  } else {
    const auto outcome = dual_coordinate_ascent(B, data, model, gamma, 1e-8, 100000);
    if (!outcome.converged) {
      throw std::runtime_error("inner dual solver did not converge: achieved tolerance " +
                               format_double(outcome.achieved) + " after " +
                               std::to_string(outcome.sweeps) + " sweeps");
    }
    result.alpha_star = outcome.alpha;
  }

  double value = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    value -= conjugate_eval(model, data.Y(i), result.alpha_star(i));
  }
  value -= 0.5 * gamma * (B.transpose() * result.alpha_star).squaredNorm();
  result.value = value;
  // Danskin: d c / d s_j = -(gamma/2) (X_j' alpha*)^2 for every column.
  result.grad = -0.5 * gamma * (data.X.transpose() * result.alpha_star).array().square();
  return result;
}

}  // namespace

InnerResult inner_value_grad(const Support& support, const Dataset& data, const LossModel& model,
                             double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  support.validate(data.p());
  validate_labels(model, data.Y);
  return inner_on_columns(gather_columns(data.X, support.selected), data, model, gamma);
}

InnerResult inner_value_grad_weighted(const Eigen::VectorXd& weights, const Dataset& data,
                                      const LossModel& model, double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (weights.size() != data.p()) throw std::invalid_argument("weights length mismatch");
  validate_labels(model, data.Y);
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (weights(j) < 0.0 || weights(j) > 1.0) {
      throw std::invalid_argument("fractional weights must lie in [0, 1]");
    }
    if (weights(j) > 0.0) active.push_back(j);
  }
  Eigen::MatrixXd B(data.n(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t c = 0; c < active.size(); ++c) {
    B.col(static_cast<Eigen::Index>(c)) = std::sqrt(weights(active[c])) * data.X.col(active[c]);
  }
  return inner_on_columns(B, data, model, gamma);
}

namespace {

// ---- master problem -------------------------------------------------

struct AffineCut {
  double base = 0.0;  // value - grad' s_at
  const Eigen::VectorXd* grad = nullptr;
};

std::vector<AffineCut> to_affine(const CutPool& pool, Eigen::Index p) {
  if (pool.cuts.empty()) throw std::invalid_argument("cut pool is empty");
  std::vector<AffineCut> cuts;
  cuts.reserve(pool.cuts.size());
  for (const auto& cut : pool.cuts) {
    if (cut.grad.size() != p) throw std::invalid_argument("cut gradient length mismatch");
    double base = cut.value;
    for (const auto j : cut.at.selected) base -= cut.grad(j);
    cuts.push_back({base, &cut.grad});
  }
  return cuts;
}

double model_value(const std::vector<AffineCut>& cuts, const std::vector<Eigen::Index>& support) {
  double best = -kInf;
  for (const auto& cut : cuts) {
    double v = cut.base;
    for (const auto j : support) v += (*cut.grad)(j);
    best = std::max(best, v);
  }
  return best;
}

bool lex_less(const std::vector<Eigen::Index>& a, const std::vector<Eigen::Index>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Exhaustive DFS over all supports of size <= k in lexicographic order,
// with per-cut running sums. Exact and cheap for small p.
class EnumerationSolver {
 public:
  EnumerationSolver(const std::vector<AffineCut>& cuts, Eigen::Index p, Eigen::Index k)
      : cuts_(cuts), p_(p), k_(k), sums_(cuts.size()) {
    for (std::size_t c = 0; c < cuts_.size(); ++c) sums_[c] = cuts_[c].base;
  }

  MasterResult run() {
    consider_current();
    descend(0);
    MasterResult out;
    out.support.selected = best_support_;
    out.support.budget = k_;
    out.eta = best_val_;
    out.lower_bound = best_val_;
    out.optimal = true;
    return out;
  }

 private:
  void consider_current() {
    double v = -kInf;
    for (const auto s : sums_) v = std::max(v, s);
    if (v < best_val_) {
      best_val_ = v;
      best_support_ = current_;
    }
  }

  void descend(Eigen::Index start) {
    if (static_cast<Eigen::Index>(current_.size()) == k_) return;
    for (Eigen::Index j = start; j < p_; ++j) {
      current_.push_back(j);
      for (std::size_t c = 0; c < cuts_.size(); ++c) sums_[c] += (*cuts_[c].grad)(j);
      consider_current();
      descend(j + 1);
      for (std::size_t c = 0; c < cuts_.size(); ++c) sums_[c] -= (*cuts_[c].grad)(j);
      current_.pop_back();
    }
  }

  const std::vector<AffineCut>& cuts_;
  Eigen::Index p_, k_;
  std::vector<double> sums_;
  std::vector<Eigen::Index> current_;
  double best_val_ = kInf;
  std::vector<Eigen::Index> best_support_;
};

// Branch-and-bound with the best single-cut relaxation as node bound:
// each cut's node minimum keeps the fixed-one coordinates and greedily
// adds the most negative free coefficients within the remaining budget.
class BranchAndBound {
 public:
  BranchAndBound(const std::vector<AffineCut>& cuts, Eigen::Index p, Eigen::Index k,
                 double deadline_seconds)
      : cuts_(cuts), p_(p), k_(k), deadline_(deadline_seconds),
        start_(std::chrono::steady_clock::now()), state_(static_cast<std::size_t>(p), kFree) {}

  void seed_incumbent(const Support& incumbent) {
    best_val_ = model_value(cuts_, incumbent.selected);
    best_support_ = incumbent.selected;
  }

  MasterResult run() {
    recurse(0);
    MasterResult out;
    out.support.selected = best_support_;
    out.support.budget = k_;
    out.eta = best_val_;
    out.lower_bound = aborted_ ? std::min(frontier_lb_, best_val_) : best_val_;
    out.optimal = !aborted_;
    return out;
  }

 private:
  static constexpr std::int8_t kFree = 0, kOne = 1, kZero = -1;
  static constexpr long kNodeLimit = 4000000;

  struct NodeBound {
    double value = -kInf;
    std::vector<Eigen::Index> selection;  // free coordinates picked by the best cut
  };

  NodeBound node_bound() {
    NodeBound nb;
    std::vector<std::pair<double, Eigen::Index>> negatives;
    for (const auto& cut : cuts_) {
      double base = cut.base;
      for (Eigen::Index j = 0; j < p_; ++j) {
        if (state_[static_cast<std::size_t>(j)] == kOne) base += (*cut.grad)(j);
      }
      negatives.clear();
      for (Eigen::Index j = 0; j < p_; ++j) {
        if (state_[static_cast<std::size_t>(j)] == kFree && (*cut.grad)(j) < 0.0) {
          negatives.emplace_back((*cut.grad)(j), j);
        }
      }
      const auto budget = static_cast<std::size_t>(k_ - n_ones_);
      if (negatives.size() > budget) {
        std::nth_element(negatives.begin(), negatives.begin() + static_cast<long>(budget),
                         negatives.end());
        negatives.resize(budget);
      }
      double value = base;
      for (const auto& [g, j] : negatives) value += g;
      if (value > nb.value) {
        nb.value = value;
        nb.selection.clear();
        for (const auto& [g, j] : negatives) nb.selection.push_back(j);
      }
    }
    return nb;
  }

  void recurse(int depth) {
    if (aborted_) return;
    ++nodes_;

    NodeBound nb = node_bound();
    if (nb.value >= best_val_) return;  // cannot improve within this node

    if ((nodes_ % 1024 == 0 && seconds_since(start_) > deadline_) || nodes_ > kNodeLimit) {
      // Abandoning this subtree; its bound keeps the reported lower
      // bound valid.
      aborted_ = true;
      frontier_lb_ = std::min(frontier_lb_, nb.value);
      return;
    }

    // Candidate: fixed ones plus the bounding cut's selection.
    std::vector<Eigen::Index> cand;
    for (Eigen::Index j = 0; j < p_; ++j) {
      if (state_[static_cast<std::size_t>(j)] == kOne) cand.push_back(j);
    }
    cand.insert(cand.end(), nb.selection.begin(), nb.selection.end());
    std::sort(cand.begin(), cand.end());
    const double cand_val = model_value(cuts_, cand);
    if (cand_val < best_val_ || (cand_val == best_val_ && lex_less(cand, best_support_))) {
      best_val_ = cand_val;
      best_support_ = cand;
    }
    if (cand_val <= nb.value + 1e-15) return;  // single-cut bound is tight here
    if (n_ones_ == k_) return;

    // Branch on the most negative free coefficient the bound wanted.
    Eigen::Index branch = -1;
    if (!nb.selection.empty()) {
      double most_negative = 0.0;
      for (const auto j : nb.selection) {
        const double worst = worst_coefficient(j);
        if (branch == -1 || worst < most_negative) {
          most_negative = worst;
          branch = j;
        }
      }
    } else {
      for (Eigen::Index j = 0; j < p_ && branch == -1; ++j) {
        if (state_[static_cast<std::size_t>(j)] == kFree) branch = j;
      }
    }
    if (branch == -1) return;

    state_[static_cast<std::size_t>(branch)] = kOne;
    ++n_ones_;
    recurse(depth + 1);
    state_[static_cast<std::size_t>(branch)] = kZero;
    --n_ones_;
    if (aborted_) {
      // The exclude-branch was never explored; this node's bound covers it.
      frontier_lb_ = std::min(frontier_lb_, nb.value);
      state_[static_cast<std::size_t>(branch)] = kFree;
      return;
    }
    recurse(depth + 1);
    state_[static_cast<std::size_t>(branch)] = kFree;
  }

  double worst_coefficient(Eigen::Index j) const {
    double worst = kInf;
    for (const auto& cut : cuts_) worst = std::min(worst, (*cut.grad)(j));
    return worst;
  }

  const std::vector<AffineCut>& cuts_;
  Eigen::Index p_, k_;
  double deadline_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::int8_t> state_;
  Eigen::Index n_ones_ = 0;
  long nodes_ = 0;
  bool aborted_ = false;
  double frontier_lb_ = kInf;
  double best_val_ = kInf;
  std::vector<Eigen::Index> best_support_;
};

}  // namespace

MasterResult solve_master(const CutPool& pool, Eigen::Index p, Eigen::Index k,
                          const Support* incumbent, double deadline_seconds) {
  if (k < 0 || k > p) throw std::invalid_argument("k must lie in [0, p]");
  const auto cuts = to_affine(pool, p);
  if (p <= 20) {
    return EnumerationSolver(cuts, p, k).run();
  }
  BranchAndBound solver(cuts, p, k, deadline_seconds);
  if (incumbent) solver.seed_incumbent(*incumbent);
  return solver.run();
}

CuttingPlaneResult cutting_plane_solve(const Dataset& data, const LossModel& model,
                                       Eigen::Index k, double gamma, const Support* warm,
                                       double epsilon, double time_limit_seconds) {
  if (k < 1 || k > data.p()) throw std::invalid_argument("k must lie in [1, p]");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
  const auto start = std::chrono::steady_clock::now();

  Support current;
  if (warm) {
    warm->validate(data.p());
    current = *warm;
    current.budget = k;
  } else {
    SubgradientConfig warm_cfg;
    warm_cfg.gamma = gamma;
    current = subgradient_solve(data, model, k, warm_cfg).support;
  }

  CutPool pool;
  pool.tolerance = epsilon;
  pool.time_limit_seconds = time_limit_seconds;

  CuttingPlaneResult result;
  result.support = current;

  while (true) {
    ++result.iterations;
    const auto inner = inner_value_grad(current, data, model, gamma);
    pool.cuts.push_back({inner.value, inner.grad, current});
    if (inner.value < result.value) {
      result.value = inner.value;
      result.support = current;
    }

    if (result.value - result.bound <= epsilon) {
      result.certified = true;
      result.log.push_back({result.iterations, inner.value, result.bound,
                            result.value - result.bound, seconds_since(start),
                            static_cast<int>(pool.cuts.size())});
      break;
    }
    if (seconds_since(start) > time_limit_seconds) {
      result.log.push_back({result.iterations, inner.value, result.bound,
                            result.value - result.bound, seconds_since(start),
                            static_cast<int>(pool.cuts.size())});
      break;
    }

    const double remaining = time_limit_seconds - seconds_since(start);
    const auto master = solve_master(pool, data.p(), k, &result.support, remaining);
    result.bound = std::max(result.bound, master.lower_bound);
    result.log.push_back({result.iterations, inner.value, master.eta,
                          result.value - result.bound, seconds_since(start),
                          static_cast<int>(pool.cuts.size())});
    if (result.value - result.bound <= epsilon) {
      result.certified = true;
      break;
    }
    if (seconds_since(start) > time_limit_seconds) break;
    current = master.support;
    current.budget = k;
  }
  return result;
}

Eigen::VectorXd coefficients_from_support(const Support& support, const Dataset& data,
                                          const LossModel& model, double gamma) {
  support.validate(data.p());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(data.p());
  if (support.selected.empty()) return w;
  const auto inner = inner_value_grad(support, data, model, gamma);
  for (const auto j : support.selected) {
    w(j) = -gamma * data.X.col(j).dot(inner.alpha_star);
  }
  return w;
}

void write_solver_log_csv(std::ostream& out, std::span<const OuterLogRow> log) {
  out << "iter,primal,eta,gap,elapsed_seconds,cut_count\n";
  for (const auto& row : log) {
    out << row.iter << ',' << format_double(row.primal) << ',' << format_double(row.eta) << ','
        << format_double(row.gap) << ',' << format_double(row.elapsed_seconds) << ','
        << row.cut_count << '\n';
  }
}

}  // namespace sparsereg
