#include "sparsereg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sparsereg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Binary entropy with the 0*log(0) = 0 convention.
double binary_entropy(double x) {
  double h = 0.0;
  if (x > 0.0) h -= x * std::log(x);
  if (x < 1.0) h -= (1.0 - x) * std::log(1.0 - x);
  return h;
}

void check_label(LossKind kind, double y) {
  if (is_classification(kind) && y != 1.0 && y != -1.0) {
    throw std::invalid_argument("classification loss requires labels in {-1,+1}, got " +
                                std::to_string(y));
  }
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

bool is_classification(LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
    case LossKind::Hinge:
    case LossKind::SvmL2:
      return true;
    default:
      return false;
  }
}

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::Ols: return "ols";
    case LossKind::Logistic: return "logistic";
    case LossKind::Hinge: return "hinge";
    case LossKind::SvmL2: return "l2svm";
    case LossKind::SvrL1: return "l1svr";
    case LossKind::SvrL2: return "l2svr";
  }
  return "?";
}

std::optional<LossKind> loss_from_name(std::string_view name) {
  if (name == "ols") return LossKind::Ols;
  if (name == "logistic") return LossKind::Logistic;
  if (name == "hinge") return LossKind::Hinge;
  if (name == "l2svm") return LossKind::SvmL2;
  if (name == "l1svr") return LossKind::SvrL1;
  if (name == "l2svr") return LossKind::SvrL2;
  return std::nullopt;
}

double loss_eval(const LossModel& model, double y, double u) {
  check_label(model.kind, y);
  const double eps = model.svr_epsilon;
  switch (model.kind) {
    case LossKind::Ols:
      return 0.5 * (y - u) * (y - u);
    case LossKind::Logistic: {
      // log(1 + exp(-yu)) evaluated stably for large |yu|.
      const double m = -y * u;
      return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    }
    case LossKind::Hinge:
      return std::max(0.0, 1.0 - y * u);
    case LossKind::SvmL2: {
      const double t = std::max(0.0, 1.0 - y * u);
      return 0.5 * t * t;
    }
    case LossKind::SvrL1:
      return std::max(0.0, std::abs(y - u) - eps);
    case LossKind::SvrL2: {
      const double t = std::max(0.0, std::abs(y - u) - eps);
      return 0.5 * t * t;
    }
  }
  return 0.0;
}

double conjugate_eval(const LossModel& model, double y, double alpha) {
  check_label(model.kind, y);
  const double eps = model.svr_epsilon;
  switch (model.kind) {
    case LossKind::Ols:
      return 0.5 * alpha * alpha + y * alpha;
    case LossKind::Logistic: {
      const double t = -y * alpha;
      if (t < 0.0 || t > 1.0) return kInf;
      return -binary_entropy(t);
    }
    case LossKind::Hinge: {
      const double t = y * alpha;
      if (t < -1.0 || t > 0.0) return kInf;
      return t;
    }
    case LossKind::SvmL2: {
      if (y * alpha > 0.0) return kInf;
      return 0.5 * alpha * alpha + y * alpha;
    }
    case LossKind::SvrL1: {
      if (std::abs(alpha) > 1.0) return kInf;
      return y * alpha + eps * std::abs(alpha);
    }
    case LossKind::SvrL2:
      return 0.5 * alpha * alpha + y * alpha + eps * std::abs(alpha);
  }
  return kInf;
}

double conjugate_domain_project(const LossModel& model, double y, double alpha) {
  check_label(model.kind, y);
  switch (model.kind) {
    case LossKind::Ols:
    case LossKind::SvrL2:
      return alpha;
    case LossKind::Logistic: {
      // Clamp y*alpha into [-1 + tau, -tau].
      const double tau = model.logistic_clamp;
      const double t = std::clamp(y * alpha, -1.0 + tau, -tau);
      return t * y;
    }
    case LossKind::Hinge: {
      const double t = std::clamp(y * alpha, -1.0, 0.0);
      return t * y;
    }
    case LossKind::SvmL2: {
      const double t = std::min(y * alpha, 0.0);
      return t * y;
    }
    case LossKind::SvrL1:
      return std::clamp(alpha, -1.0, 1.0);
  }
  return alpha;
}

double conjugate_partial(const LossModel& model, double y, double alpha) {
  check_label(model.kind, y);
  const double eps = model.svr_epsilon;
  switch (model.kind) {
    case LossKind::Ols:
      return alpha + y;
    case LossKind::Logistic: {
      const double tau = model.logistic_clamp;
      const double t = -y * alpha;
      if (t < tau || t > 1.0 - tau) {
        throw std::domain_error("logistic conjugate derivative requested outside interior");
      }
      // d/d(alpha) of -H(-y alpha): slope of the entropy term times -y.
      return -y * std::log(t / (1.0 - t));
    }
    case LossKind::Hinge: {
      const double t = y * alpha;
      if (t < -1.0 || t > 0.0) {
        throw std::domain_error("hinge conjugate derivative requested outside domain");
      }
      return y;
    }
    case LossKind::SvmL2:
      if (y * alpha > 0.0) {
        throw std::domain_error("l2svm conjugate derivative requested outside domain");
      }
      return alpha + y;
    case LossKind::SvrL1:
      if (std::abs(alpha) > 1.0) {
        throw std::domain_error("l1svr conjugate derivative requested outside domain");
      }
      return y + eps * sign0(alpha);
    case LossKind::SvrL2:
      return alpha + y + eps * sign0(alpha);
  }
  return 0.0;
}

void validate_labels(const LossModel& model, const Eigen::VectorXd& y) {
  if (!is_classification(model.kind)) return;
  for (Eigen::Index i = 0; i < y.size(); ++i) check_label(model.kind, y(i));
}

}  // namespace sparsereg
