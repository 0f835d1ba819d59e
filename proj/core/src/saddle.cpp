#include "sparsereg/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "sparsereg/cio.hpp"
#include "sparsereg/csv.hpp"

namespace sparsereg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinStep = 1e-12;

double relative_gap(double upper, double lower) {
  if (!std::isfinite(upper) || !std::isfinite(lower)) return kInf;
  return (upper - lower) / std::max(1.0, std::abs(upper));
}

// Initial dual point: scaled -Y for regression losses, the domain center
// -y/2 per coordinate for classification. Always projected afterwards.
Eigen::VectorXd initial_alpha(const Dataset& data, const LossModel& model, double gamma) {
  Eigen::VectorXd alpha(data.n());
  if (is_classification(model.kind)) {
    alpha = -0.5 * data.Y;
  } else {
    const double mean_col_norm = data.X.colwise().norm().mean();
    alpha = -data.Y / (1.0 + gamma * mean_col_norm);
  }
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    alpha(i) = conjugate_domain_project(model, data.Y(i), alpha(i));
  }
  return alpha;
}

Eigen::VectorXd column_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& alpha) {
  return (X.transpose() * alpha).array().square();
}

Support top_k_by_score(const Eigen::VectorXd& scores, Eigen::Index k) {
  const Eigen::Index p = scores.size();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto better = [&](Eigen::Index a, Eigen::Index b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + k, idx.end(), better);
  Support s;
  s.budget = k;
  s.selected.assign(idx.begin(), idx.begin() + k);
  std::sort(s.selected.begin(), s.selected.end());
  return s;
}

// Support update of the penalized variant: exactly the coordinates with
// lambda - (gamma/2) score_j < 0.
Support negative_score_support(const Eigen::VectorXd& scores, double gamma, double lambda) {
  Support s;
  s.budget = scores.size();
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (lambda - 0.5 * gamma * scores(j) < 0.0) s.selected.push_back(j);
  }
  return s;
}

// Gradient of f in alpha at (alpha, s): -conj'(y_i, alpha_i) minus
// gamma * X_s X_s' alpha, computed through the cached scores vector.
Eigen::VectorXd dual_gradient(const Eigen::VectorXd& alpha, const Support& support,
                              const Dataset& data, const LossModel& model, double gamma) {
  Eigen::VectorXd grad(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    grad(i) = -conjugate_partial(model, data.Y(i), alpha(i));
  }
  if (!support.selected.empty()) {
    Eigen::VectorXd xs_alpha(support.size());
    for (Eigen::Index c = 0; c < support.size(); ++c) {
      xs_alpha(c) = data.X.col(support.selected[static_cast<std::size_t>(c)]).dot(alpha);
    }
    for (Eigen::Index c = 0; c < support.size(); ++c) {
      grad.noalias() -= gamma * xs_alpha(c) * data.X.col(support.selected[static_cast<std::size_t>(c)]);
    }
  }
  return grad;
}

struct LoopKnobs {
  bool constrained = true;
  Eigen::Index k = 0;      // constrained mode
  double lambda = 0.0;     // penalized mode
};

SaddleResult run_loop(const Dataset& data, const LossModel& model, const SubgradientConfig& cfg,
                      const Eigen::VectorXd* warm_alpha, const LoopKnobs& knobs) {
  cfg.validate();
  validate_labels(model, data.Y);
  const Eigen::Index n = data.n();

  const bool track_primal =
      cfg.track_best_primal.value_or(!is_classification(model.kind));

  SaddleState state;
  state.alpha = warm_alpha ? *warm_alpha : initial_alpha(data, model, cfg.gamma);
  if (state.alpha.size() != n) throw std::invalid_argument("warm alpha has wrong length");
  for (Eigen::Index i = 0; i < n; ++i) {
    state.alpha(i) = conjugate_domain_project(model, data.Y(i), state.alpha(i));
  }
  state.alpha_sum = Eigen::VectorXd::Zero(n);

  const auto penalized_value = [&](const Support& s) {
    return inner_value_grad(s, data, model, cfg.gamma).value +
           knobs.lambda * static_cast<double>(s.size());
  };
  const auto primal_value = [&](const Support& s) {
    return knobs.constrained ? inner_value_grad(s, data, model, cfg.gamma).value
                             : penalized_value(s);
  };

  SaddleResult result;
  int since_improvement = 0;

  for (int t = 0; t < cfg.t_max; ++t) {
    const Eigen::VectorXd scores = column_scores(data.X, state.alpha);
    const Support s_t = knobs.constrained
                            ? top_k_by_score(scores, knobs.k)
                            : negative_score_support(scores, cfg.gamma, knobs.lambda);

    // Dual value at the matched pair; s_t partially minimizes f(alpha^t, .),
    // so this is a true lower bound on the optimum.
    double f_t = dual_function(state.alpha, s_t, data, model, cfg.gamma);
    if (!knobs.constrained) f_t += knobs.lambda * static_cast<double>(s_t.size());
    state.best_lower = std::max(state.best_lower, f_t);

    double c_t = kNaN;
    const bool need_primal =
        track_primal || (cfg.step_rule == StepRule::Adaptive && t == 0);
    if (need_primal) {
      c_t = primal_value(s_t);
      if (c_t < state.best_upper) {
        state.best_upper = c_t;
        state.incumbent = s_t;
        since_improvement = 0;
      } else {
        ++since_improvement;
      }
    }

    const double gap = relative_gap(state.best_upper, state.best_lower);

    state.alpha_sum += state.alpha;
    state.t = t + 1;

    if (gap <= cfg.gap_tol) {
      result.trace.push_back({t, f_t, c_t, 0.0, gap, 0.0});
      break;
    }
    if (cfg.patience > 0 && since_improvement >= cfg.patience) {
      result.trace.push_back({t, f_t, c_t, 0.0, gap, 0.0});
      break;
    }

    const Eigen::VectorXd grad = dual_gradient(state.alpha, s_t, data, model, cfg.gamma);
    if (!grad.allFinite()) {
      throw std::runtime_error("non-finite sub-gradient at iteration " + std::to_string(t));
    }
    const double grad_norm_sq = grad.squaredNorm();
    const double delta = cfg.step_rule == StepRule::Adaptive
                             ? adaptive_step(state, grad_norm_sq)
                             : cfg.step_constant;
    result.trace.push_back({t, f_t, c_t, delta, gap, grad_norm_sq});
    if (delta == 0.0) break;  // zero gradient or closed gap

    state.alpha += delta * grad;
    for (Eigen::Index i = 0; i < n; ++i) {
      state.alpha(i) = conjugate_domain_project(model, data.Y(i), state.alpha(i));
    }
  }

  result.iterations = state.t;
  result.alpha_avg = state.alpha_sum / static_cast<double>(std::max(state.t, 1));

  const Eigen::VectorXd avg_scores = column_scores(data.X, result.alpha_avg);
  Support s_hat = knobs.constrained
                      ? top_k_by_score(avg_scores, knobs.k)
                      : negative_score_support(avg_scores, cfg.gamma, knobs.lambda);

  if (track_primal) {
    // Return the best support ever evaluated, including the averaged one.
    const double c_hat = primal_value(s_hat);
    if (c_hat < state.best_upper) {
      state.best_upper = c_hat;
      state.incumbent = s_hat;
    }
    result.support = state.incumbent;
    result.best_primal = state.best_upper;
  } else {
    result.support = s_hat;
    const double c_hat = primal_value(s_hat);
    state.best_upper = std::min(state.best_upper, c_hat);
    result.best_primal = c_hat;
  }
  result.best_dual = state.best_lower;
  result.gap = relative_gap(state.best_upper, state.best_lower);
  return result;
}

}  // namespace

bool Support::contains(Eigen::Index j) const {
  return std::binary_search(selected.begin(), selected.end(), j);
}

void Support::validate(Eigen::Index p) const {
  if (budget < 0) throw std::invalid_argument("support budget must be nonnegative");
  if (static_cast<Eigen::Index>(selected.size()) > budget) {
    throw std::invalid_argument("support exceeds its budget");
  }
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] < 0 || selected[i] >= p) throw std::invalid_argument("support index out of range");
    if (i > 0 && selected[i] <= selected[i - 1]) {
      throw std::invalid_argument("support indices must be sorted and distinct");
    }
  }
}

bool operator==(const Support& a, const Support& b) { return a.selected == b.selected; }

void SubgradientConfig::validate() const {
  if (t_max < 1) throw std::invalid_argument("t_max must be positive");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (step_rule == StepRule::Constant && step_constant <= 0.0) {
    throw std::invalid_argument("constant step size must be positive");
  }
  if (gap_tol < 0.0) throw std::invalid_argument("gap tolerance must be nonnegative");
}

double dual_function(const Eigen::VectorXd& alpha, const Support& support, const Dataset& data,
                     const LossModel& model, double gamma) {
  if (alpha.size() != data.n()) throw std::invalid_argument("alpha length mismatch");
  support.validate(data.p());
  double value = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double conj = conjugate_eval(model, data.Y(i), alpha(i));
    if (!std::isfinite(conj)) {
      throw std::domain_error("alpha outside the conjugate domain at coordinate " +
                              std::to_string(i));
    }
    value -= conj;
  }
  for (const auto j : support.selected) {
    const double t = data.X.col(j).dot(alpha);
    value -= 0.5 * gamma * t * t;
  }
  return value;
}

Support partial_min_support(const Eigen::VectorXd& alpha, const Dataset& data, double gamma,
                            Eigen::Index k) {
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (k < 0 || k > data.p()) throw std::invalid_argument("k must lie in [0, p]");
  if (alpha.size() != data.n()) throw std::invalid_argument("alpha length mismatch");
  return top_k_by_score(column_scores(data.X, alpha), k);
}

double adaptive_step(const SaddleState& state, double grad_norm_sq) {
  if (grad_norm_sq < 0.0) throw std::invalid_argument("gradient norm cannot be negative");
  if (grad_norm_sq == 0.0) return 0.0;
  if (!std::isfinite(state.best_upper)) {
    throw std::logic_error("adaptive step requires at least one evaluated primal value");
  }
  const double numerator = state.best_upper - state.best_lower;
  if (numerator <= 0.0) return 0.0;
  return std::max(numerator / grad_norm_sq, kMinStep);
}

SaddleResult subgradient_solve(const Dataset& data, const LossModel& model, Eigen::Index k,
                               const SubgradientConfig& cfg, const Eigen::VectorXd* warm_alpha) {
  if (k < 1 || k > data.p()) throw std::invalid_argument("k must lie in [1, p]");
  LoopKnobs knobs;
  knobs.constrained = true;
  knobs.k = k;
  return run_loop(data, model, cfg, warm_alpha, knobs);
}

SaddleResult penalized_solve(const Dataset& data, const LossModel& model, double lambda,
                             const SubgradientConfig& cfg, const Eigen::VectorXd* warm_alpha) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  LoopKnobs knobs;
  knobs.constrained = false;
  knobs.lambda = lambda;
  return run_loop(data, model, cfg, warm_alpha, knobs);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "t,dual_value,primal_value,step,gap\n";
  for (const auto& row : trace) {
    out << row.t << ',' << format_double(row.dual_value) << ',' << format_double(row.primal_value)
        << ',' << format_double(row.step) << ',' << format_double(row.gap) << '\n';
  }
}

}  // namespace sparsereg
