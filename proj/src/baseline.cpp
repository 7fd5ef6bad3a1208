#include "tksgd/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace tksgd::baseline {

SupportExpansion::SupportExpansion(kernel::BaselineKernel kernel, loss::LossSpec loss)
    : kernel_(kernel),
      loss_(loss),
      clamp_(loss.kind == loss::Kind::kCauchy || loss.kind == loss::Kind::kWelsch) {}

void SupportExpansion::step(const Eigen::Ref<const Eigen::VectorXd>& x, double y, double gamma_n) {
  // Kernel row against the stored points plus the diagonal entry; the row
  // gives the prediction, the diagonal feeds the norm update.
  double prediction = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) prediction += weights_[i] * kernel_(points_[i], x);
  const double diagonal = kernel_(x, x);
  kernel_evals_ += static_cast<long long>(points_.size()) + 1;

  double u = prediction;
  if (clamp_ && std::abs(u) > loss_.domain_halfwidth) {
    u = std::clamp(u, -loss_.domain_halfwidth, loss_.domain_halfwidth);
    ++clamp_events_;
  }
  const double w = -gamma_n * loss::derivative(loss_, u, y);

  norm_sq_ += 2.0 * w * prediction + w * w * diagonal;
  points_.emplace_back(x);
  weights_.push_back(w);
  weight_sums_.push_back(0.0);
  for (std::size_t i = 0; i < weights_.size(); ++i) weight_sums_[i] += weights_[i];
}

double SupportExpansion::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) sum += weights_[i] * kernel_(points_[i], x);
  kernel_evals_ += static_cast<long long>(points_.size());
  return sum;
}

double SupportExpansion::predict_polyak(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (points_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) sum += weight_sums_[i] * kernel_(points_[i], x);
  kernel_evals_ += static_cast<long long>(points_.size());
  return sum / static_cast<double>(points_.size());
}

}  // namespace tksgd::baseline
