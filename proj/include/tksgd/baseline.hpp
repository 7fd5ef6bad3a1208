#pragma once

#include "tksgd/kernel.hpp"
#include "tksgd/loss.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tksgd::baseline {

/// Classical pairwise kernel SGD state: the recursion
///   g_n = g_{n-1} - gamma_n * dloss(g_{n-1}(X_n), Y_n) * K(X_n, .)
/// stored as support points with scalar weights, so that
/// g_n = sum_i w_i K(X_i, .).  Each step evaluates the kernel against every
/// stored point (plus the new diagonal entry), so n steps cost exactly
/// n(n+1)/2 kernel evaluations; the counter records this.
///
/// There is no ball projection here.  For losses with a restricted domain
/// (Cauchy, Welsch) the prediction is clamped to [-B, B] before the
/// derivative is taken, and every clamp event is counted.
class SupportExpansion {
 public:
  SupportExpansion(kernel::BaselineKernel kernel, loss::LossSpec loss);

  /// One step of the recursion with step size gamma_n.
  void step(const Eigen::Ref<const Eigen::VectorXd>& x, double y, double gamma_n);

  /// g_n(x) = sum_i w_i K(X_i, x); costs size() kernel evaluations.
  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Polyak average (1/n) sum_{i<=n} g_i evaluated at x; maintained
  /// incrementally on the weights.
  double predict_polyak(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// ||g_n||_K^2, tracked incrementally from the step's kernel row.
  double rkhs_norm_sq() const { return norm_sq_; }

  std::size_t size() const { return points_.size(); }
  long long kernel_evals() const { return kernel_evals_; }
  long long clamp_events() const { return clamp_events_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  kernel::BaselineKernel kernel_;
  loss::LossSpec loss_;
  bool clamp_;
  std::vector<Eigen::VectorXd> points_;
  std::vector<double> weights_;
  std::vector<double> weight_sums_;  // sum over past states; Polyak weight = weight_sums_[i] / n
  double norm_sq_ = 0.0;
  mutable long long kernel_evals_ = 0;
  long long clamp_events_ = 0;
};

}  // namespace tksgd::baseline
