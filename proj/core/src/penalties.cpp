#include "sparsereg/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "sparsereg/csv.hpp"

namespace sparsereg {

void PenaltySpec::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (family == PenaltyFamily::ElasticNet && (alpha_mix < 0.0 || alpha_mix > 1.0)) {
    throw std::invalid_argument("ElasticNet mixing must lie in [0, 1]");
  }
  if (family == PenaltyFamily::Mcp && gamma_shape <= 1.0) {
    throw std::invalid_argument("MCP shape must exceed 1");
  }
  if (family == PenaltyFamily::Scad && gamma_shape <= 2.0) {
    throw std::invalid_argument("SCAD shape must exceed 2");
  }
}

double penalty_eval(const PenaltySpec& spec, double u) {
  spec.validate();
  if (u < 0.0) throw std::invalid_argument("penalty_eval expects u >= 0");
  const double l = spec.lambda;
  const double g = spec.gamma_shape;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return l * u;
    case PenaltyFamily::ElasticNet:
      return l * (spec.alpha_mix * u + 0.5 * (1.0 - spec.alpha_mix) * u * u);
    case PenaltyFamily::Mcp:
      if (u <= g * l) return l * u - u * u / (2.0 * g);
      return 0.5 * g * l * l;
    case PenaltyFamily::Scad:
      if (u <= l) return l * u;
      if (u <= g * l) return (g * l * u - 0.5 * (u * u + l * l)) / (g - 1.0);
      return l * l * (g * g - 1.0) / (2.0 * (g - 1.0));
  }
  return 0.0;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

namespace {

// Exact minimization by enumerating the stationary point of every
// quadratic piece plus the breakpoints; covers the regimes without a
// safe closed form (SCAD at nu != 1, MCP with nu*gamma <= 1).
double prox_by_candidates(const PenaltySpec& spec, double z, double nu) {
  const double a = std::abs(z);
  const double l = spec.lambda;
  const double g = spec.gamma_shape;

  std::vector<double> candidates{0.0};
  const auto add_piece = [&](double lo, double hi, double quad, double lin) {
    // Piece objective A w^2 + B w (+ const) on [lo, hi].
    candidates.push_back(lo);
    if (std::isfinite(hi)) candidates.push_back(hi);
    if (quad > 0.0) {
      double stat = -lin / (2.0 * quad);
      if (stat < lo) stat = lo;
      if (std::isfinite(hi) && stat > hi) stat = hi;
      candidates.push_back(stat);
    }
  };

  const double inf = std::numeric_limits<double>::infinity();
  switch (spec.family) {
    case PenaltyFamily::L1:
      add_piece(0.0, inf, 0.5 * nu, l - a);
      break;
    case PenaltyFamily::ElasticNet:
      add_piece(0.0, inf, 0.5 * (nu + l * (1.0 - spec.alpha_mix)), l * spec.alpha_mix - a);
      break;
    case PenaltyFamily::Mcp:
      add_piece(0.0, g * l, 0.5 * (nu - 1.0 / g), l - a);
      add_piece(g * l, inf, 0.5 * nu, -a);
      break;
    case PenaltyFamily::Scad:
      add_piece(0.0, l, 0.5 * nu, l - a);
      add_piece(l, g * l, 0.5 * (nu - 1.0 / (g - 1.0)), g * l / (g - 1.0) - a);
      add_piece(g * l, inf, 0.5 * nu, -a);
      break;
  }

  double best_w = 0.0;
  double best_val = std::numeric_limits<double>::infinity();
  for (const double w : candidates) {
    if (w < 0.0 || !std::isfinite(w)) continue;
    const double val = 0.5 * nu * w * w - a * w + penalty_eval(spec, w);
    if (val < best_val - 1e-15 || (std::abs(val - best_val) <= 1e-15 && w < best_w)) {
      best_val = val;
      best_w = w;
    }
  }
  return z >= 0.0 ? best_w : -best_w;
}

}  // namespace

double univariate_prox(const PenaltySpec& spec, double z, double nu) {
  spec.validate();
  if (nu <= 0.0) throw std::invalid_argument("curvature nu must be positive");
  const double l = spec.lambda;
  const double g = spec.gamma_shape;
  switch (spec.family) {
    case PenaltyFamily::L1:
      return soft_threshold(z, l) / nu;
    case PenaltyFamily::ElasticNet:
      return soft_threshold(z, l * spec.alpha_mix) / (nu + l * (1.0 - spec.alpha_mix));
    case PenaltyFamily::Mcp:
      if (nu * g > 1.0) {
        // Firm shrinkage: soft inside |z| <= nu*gamma*lambda, identity outside.
        if (std::abs(z) <= nu * g * l) return soft_threshold(z, l) / (nu - 1.0 / g);
        return z / nu;
      }
      return prox_by_candidates(spec, z, nu);
    case PenaltyFamily::Scad:
      if (nu == 1.0) {
        const double a = std::abs(z);
        if (a <= 2.0 * l) return soft_threshold(z, l);
        if (a <= g * l) {
          return soft_threshold(z, g * l / (g - 1.0)) * (g - 1.0) / (g - 2.0);
        }
        return z;
      }
      return prox_by_candidates(spec, z, nu);
  }
  return 0.0;
}

namespace {

struct Standardized {
  Eigen::MatrixXd X;          // columns: mean 0, variance 1 (1/n)
  Eigen::VectorXd col_mean;
  Eigen::VectorXd col_scale;  // sqrt of the 1/n variance
  Eigen::VectorXd y;          // centered for OLS, raw labels for logistic
  double y_mean = 0.0;
};

Standardized standardize_for_fit(const Dataset& data, bool center_y) {
  const Eigen::Index n = data.n(), p = data.p();
  if (n < 2) throw std::invalid_argument("cd_fit needs at least 2 rows");
  Standardized s;
  s.X = data.X;
  s.col_mean.resize(p);
  s.col_scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    s.col_mean(j) = s.X.col(j).mean();
    s.X.col(j).array() -= s.col_mean(j);
    const double var = s.X.col(j).squaredNorm() / static_cast<double>(n);
    if (var <= 0.0) throw std::runtime_error("constant column in design matrix");
    s.col_scale(j) = std::sqrt(var);
    s.X.col(j) /= s.col_scale(j);
  }
  s.y = data.Y;
  if (center_y) {
    s.y_mean = s.y.mean();
    s.y.array() -= s.y_mean;
  }
  return s;
}

double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double penalty_total(const PenaltySpec& spec, const Eigen::VectorXd& w) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) total += penalty_eval(spec, std::abs(w(j)));
  return total;
}

struct SweepStats {
  int sweeps = 0;
  double achieved = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Cyclic coordinate descent on (1/(2n))||y - Xw||^2 + sum_j p(|w_j|) for
// unit-variance columns (nu = 1). Full sweeps alternate with passes over
// the active set until a full sweep moves nothing.
SweepStats cd_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& spec,
                  Eigen::VectorXd& w, Eigen::VectorXd& resid, const CdOptions& opts,
                  std::vector<double>* sweep_objectives) {
  const Eigen::Index n = X.rows(), p = X.cols();
  const double dn = static_cast<double>(n);
  SweepStats stats;

  const auto update_coord = [&](Eigen::Index j) {
    const double old = w(j);
    const double z = X.col(j).dot(resid) / dn + old;
    const double next = univariate_prox(spec, z, 1.0);
    if (next != old) {
      resid.noalias() -= (next - old) * X.col(j);
      w(j) = next;
    }
    return std::abs(next - old);
  };

  std::vector<Eigen::Index> active;
  while (stats.sweeps < opts.max_sweeps) {
    // Full sweep.
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) max_change = std::max(max_change, update_coord(j));
    ++stats.sweeps;
    if (sweep_objectives) {
      sweep_objectives->push_back(0.5 * resid.squaredNorm() / dn + penalty_total(spec, w));
    }
    stats.achieved = max_change;
    if (max_change <= opts.tol) {
      stats.converged = true;
      break;
    }
    // Iterate on the active set before the next full sweep.
    active.clear();
    for (Eigen::Index j = 0; j < p; ++j) {
      if (w(j) != 0.0) active.push_back(j);
    }
    while (stats.sweeps < opts.max_sweeps) {
      double change = 0.0;
      for (const auto j : active) change = std::max(change, update_coord(j));
      ++stats.sweeps;
      if (sweep_objectives) {
        sweep_objectives->push_back(0.5 * resid.squaredNorm() / dn + penalty_total(spec, w));
      }
      if (change <= opts.tol) break;
    }
  }
  return stats;
}

}  // namespace

std::vector<double> RegPath::lambdas() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(pt.lambda);
  return out;
}

RegPath cd_fit(const Dataset& data, const LossModel& model, PenaltyFamily family,
               std::span<const double> lambdas, double alpha_mix, double gamma_shape,
               const CdOptions& opts) {
  if (model.kind != LossKind::Ols && model.kind != LossKind::Logistic) {
    throw std::invalid_argument("cd_fit supports the OLS and logistic losses");
  }
  if (lambdas.empty()) throw std::invalid_argument("lambda path is empty");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < lambdas[i - 1])) {
      throw std::invalid_argument("lambda path must be strictly decreasing");
    }
  }
  validate_labels(model, data.Y);

  const bool logistic = model.kind == LossKind::Logistic;
  const auto std_data = standardize_for_fit(data, /*center_y=*/!logistic);
  const Eigen::Index n = data.n(), p = data.p();
  const double dn = static_cast<double>(n);

  RegPath path;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  double intercept = 0.0;  // standardized scale
  if (logistic) {
    // Null-model intercept: logit of the positive-class fraction.
    const double pos = (std_data.y.array() > 0).count() / dn;
    const double safe = std::clamp(pos, 1e-12, 1.0 - 1e-12);
    intercept = std::log(safe / (1.0 - safe));
  }

  Eigen::VectorXd resid;  // OLS residual cache
  if (!logistic) resid = std_data.y - std_data.X * w;

  for (const double lambda : lambdas) {
    PenaltySpec spec;
    spec.family = family;
    spec.lambda = lambda;
    spec.alpha_mix = alpha_mix;
    spec.gamma_shape = gamma_shape;
    spec.validate();

    PathPoint pt;
    pt.lambda = lambda;
    std::vector<double>* objective_sink = opts.record_sweep_objectives ? &pt.sweep_objectives : nullptr;

    if (!logistic) {
      const auto stats = cd_ols(std_data.X, std_data.y, spec, w, resid, opts, objective_sink);
      pt.converged = stats.converged;
      pt.achieved_tol = stats.achieved;
      pt.sweeps = stats.sweeps;
      pt.objective = 0.5 * resid.squaredNorm() / dn + penalty_total(spec, w);
      intercept = 0.0;  // centered response
    } else {
      // Local quadratic approximation: weighted least squares on the
      // working response, refit until the outer change is small.
      int outer = 0;
      double outer_change = std::numeric_limits<double>::infinity();
      int total_sweeps = 0;
      double inner_achieved = 0.0;
      bool inner_ok = true;
      for (; outer < opts.max_outer; ++outer) {
        const double intercept_before = intercept;
        const Eigen::VectorXd eta = std_data.X * w + Eigen::VectorXd::Constant(n, intercept);
        Eigen::VectorXd prob(n), weight(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          prob(i) = sigmoid(eta(i));
          weight(i) = std::max(prob(i) * (1.0 - prob(i)), opts.weight_floor);
        }
        // resid_i = z_i - eta_i with working response z = eta + (t - prob)/weight.
        Eigen::VectorXd wls_resid(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const double t = std_data.y(i) > 0 ? 1.0 : 0.0;
          wls_resid(i) = (t - prob(i)) / weight(i);
        }
        const double weight_sum = weight.sum();

        const Eigen::VectorXd w_before = w;
        int sweeps = 0;
        double max_change = std::numeric_limits<double>::infinity();
        while (sweeps < opts.max_sweeps) {
          max_change = 0.0;
          for (Eigen::Index j = 0; j < p; ++j) {
            const double old = w(j);
            const double nu = weight.dot(std_data.X.col(j).cwiseAbs2()) / dn;
            const double z =
                (std_data.X.col(j).array() * weight.array() * wls_resid.array()).sum() / dn +
                nu * old;
            const double next = univariate_prox(spec, z, nu);
            if (next != old) {
              wls_resid.noalias() -= (next - old) * std_data.X.col(j);
              w(j) = next;
            }
            max_change = std::max(max_change, std::abs(next - old));
          }
          // Unpenalized intercept: weighted mean of the residual.
          const double shift = weight.dot(wls_resid) / weight_sum;
          intercept += shift;
          wls_resid.array() -= shift;
          max_change = std::max(max_change, std::abs(shift));
          ++sweeps;
          if (max_change <= opts.tol) break;
        }
        total_sweeps += sweeps;
        inner_achieved = max_change;
        inner_ok = inner_ok && max_change <= opts.tol;

        outer_change = std::max((w - w_before).cwiseAbs().maxCoeff(),
                                std::abs(intercept - intercept_before));
        if (outer_change <= opts.outer_tol) break;
      }
      pt.converged = inner_ok && outer_change <= opts.outer_tol;
      pt.achieved_tol = std::max(outer_change, inner_achieved);
      pt.sweeps = total_sweeps;
      double nll = 0.0;
      const Eigen::VectorXd eta = std_data.X * w + Eigen::VectorXd::Constant(n, intercept);
      for (Eigen::Index i = 0; i < n; ++i) nll += loss_eval(model, std_data.y(i), eta(i));
      pt.objective = nll / dn + penalty_total(spec, w);
    }

    // De-standardize for reporting; supports use the de-standardized scale.
    pt.w = (w.array() / std_data.col_scale.array()).matrix();
    double b = logistic ? intercept : std_data.y_mean;
    b -= pt.w.dot(std_data.col_mean);
    pt.intercept = b;
    pt.support_size = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::abs(pt.w(j)) > 1e-10) ++pt.support_size;
    }
    path.points.push_back(std::move(pt));
  }
  return path;
}

std::vector<double> lambda_grid(const Dataset& data, const LossModel& model,
                                PenaltyFamily family, double alpha_mix, int count,
                                double ratio) {
  if (count < 2) throw std::invalid_argument("lambda grid needs at least 2 points");
  if (ratio <= 0.0) ratio = data.n() > data.p() ? 1e-3 : 1e-2;
  if (ratio >= 1.0) throw std::invalid_argument("ratio must lie in (0, 1)");

  const bool logistic = model.kind == LossKind::Logistic;
  const auto std_data = standardize_for_fit(data, /*center_y=*/!logistic);
  const double dn = static_cast<double>(data.n());

  double base = 0.0;
  if (!logistic) {
    base = (std_data.X.transpose() * std_data.y).cwiseAbs().maxCoeff() / dn;
  } else {
    const double pos = (std_data.y.array() > 0).count() / dn;
    Eigen::VectorXd centered(data.n());
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      centered(i) = (std_data.y(i) > 0 ? 1.0 : 0.0) - pos;
    }
    base = (std_data.X.transpose() * centered).cwiseAbs().maxCoeff() / dn;
  }
  double lambda_max = base;
  if (family == PenaltyFamily::ElasticNet) {
    lambda_max = base / std::max(alpha_mix, 1e-3);
  }

  std::vector<double> grid(static_cast<std::size_t>(count));
  const double log_max = std::log(lambda_max);
  const double log_min = std::log(lambda_max * ratio);
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    grid[static_cast<std::size_t>(i)] = std::exp(log_max + f * (log_min - log_max));
  }
  grid.front() = lambda_max;  // exact endpoint
  return grid;
}

void write_path_csv(std::ostream& out, const RegPath& path) {
  out << "lambda,support_size,objective,coefficients\n";
  for (const auto& pt : path.points) {
    out << format_double(pt.lambda) << ',' << pt.support_size << ','
        << format_double(pt.objective) << ',';
    bool first = true;
    std::string cell;
    for (Eigen::Index j = 0; j < pt.w.size(); ++j) {
      if (std::abs(pt.w(j)) > 1e-10) {
        if (!first) cell += ' ';
        cell += std::to_string(j + 1) + ':' + format_double(pt.w(j));
        first = false;
      }
    }
    write_csv_field(out, cell);
    out << '\n';
  }
}

}  // namespace sparsereg
