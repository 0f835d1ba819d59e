#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>

namespace sparsereg {

// Supported loss functions. Classification kinds (logistic, hinge, l2svm)
// expect labels in {-1, +1}; regression kinds accept any real response.
enum class LossKind { Ols, Logistic, Hinge, SvmL2, SvrL1, SvrL2 };

struct LossModel {
  LossKind kind = LossKind::Ols;
  // Insensitivity width for the SVR losses.
  double svr_epsilon = 0.1;
  // Interior tolerance tau for the logistic conjugate: the entropy domain
  // y*alpha in [-1, 0] is open at both ends once derivatives are needed,
  // so projections clamp to y*alpha in [-1 + tau, -tau].
  double logistic_clamp = 1e-4;
};

bool is_classification(LossKind kind);

// Stable identifiers used by the CLI and config files:
// "ols", "logistic", "hinge", "l2svm", "l1svr", "l2svr".
std::string_view loss_name(LossKind kind);
std::optional<LossKind> loss_from_name(std::string_view name);

// loss(y, u). Throws std::invalid_argument when a classification kind is
// given a label outside {-1, +1}.
double loss_eval(const LossModel& model, double y, double u);

// Fenchel conjugate sup_u { u*alpha - loss(y, u) }. Returns +infinity
// outside the conjugate's domain.
double conjugate_eval(const LossModel& model, double y, double alpha);

// Nearest point of the conjugate domain (the logistic domain is
// interiorized by logistic_clamp). Idempotent, and the result always has
// a finite conjugate value.
double conjugate_domain_project(const LossModel& model, double y, double alpha);

// d/d(alpha) of the conjugate at an interior point; equals the maximizing
// u of the Fenchel supremum. The SVR conjugates have a kink at alpha = 0
// where the subgradient 'y' (sign(0) = 0 convention) is returned. Throws
// std::domain_error outside the (interiorized) domain.
double conjugate_partial(const LossModel& model, double y, double alpha);

// Eager label validation: classification kinds require every entry of y
// to be exactly -1 or +1.
void validate_labels(const LossModel& model, const Eigen::VectorXd& y);

}  // namespace sparsereg
