#pragma once

#include "tksgd/harmonics.hpp"

#include <Eigen/Dense>

namespace tksgd::kernel {

enum class ScheduleKind {
  kPowerOfDim,   // a_k = (dim Pi_k^d)^{-2s}
  kCirclePaper,  // a_0 = 1, a_k = (2k)^{-2s}, d = 2
};

/// Decay schedule of the kernel coefficients a_k, with capacity parameter
/// s > 1/2.  Both variants satisfy a_0 = 1 and a_k non-increasing, and are
/// bracketed by A2 (dim Pi_k^d)^{-2s} <= a_k <= A1 (dim Pi_k^d)^{-2s}
/// (power-of-dim: A1 = A2 = 1; circle: A1 = (3/2)^{2s}, A2 = 1).
struct CoefficientSchedule {
  ScheduleKind kind = ScheduleKind::kPowerOfDim;
  double s = 1.0;
  int d = 2;

  static CoefficientSchedule power_of_dim(int d, double s);
  static CoefficientSchedule circle_paper(double s);
};

/// a_k per the schedule; always 1 at k = 0.
double coefficient(const CoefficientSchedule& schedule, int k);

/// kappa^2 = sum over k of a_k dim H_k^d = sup K(x, x).  The series is summed
/// term by term with an Euler-Maclaurin tail (circle-type schedules, exact
/// power law) or a fitted local-exponent tail (power-of-dim, d >= 3); the
/// result carries an absolute error below `tol`.  The d = 3, s = 1 schedule
/// cuts off near k = 2.5e4; slowly decaying schedules that would need more
/// than `max_terms` terms throw std::runtime_error.
double kappa_sq(const CoefficientSchedule& schedule, double tol = 1e-12,
                long long max_terms = 4'000'000);

/// K_L^T(x, x') = sum_{k<=L} a_k sum_j Y_{k,j}(x) Y_{k,j}(x'), computed from
/// two basis evaluations.  Throws std::domain_error off the sphere.
double truncated_kernel(const CoefficientSchedule& schedule, int L,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& xp);

/// Same contraction against precomputed basis evaluations.
double truncated_kernel(const CoefficientSchedule& schedule, int L,
                        const harmonics::BasisEvaluation& bx,
                        const harmonics::BasisEvaluation& bxp);

/// Bernoulli polynomial B_n(u) for n in {2, 4, 6, 8}, exact rational
/// coefficients.  Throws std::invalid_argument for other orders.
double bernoulli_poly(int order, double u);

/// Closed form of the circle kernel 1 + sum_{k>=1} 2 cos(k(theta-phi))/(2k)^{2s}
/// for s in {1, 2, 3, 4}:
///
///   1 + (-1)^{s+1} pi^{2s} / (2s)! * B_{2s}({(theta - phi) / 2pi}).
///
/// The leading constant is fixed by the Fourier expansion of B_{2s} and is
/// verified against direct series summation in the test suite.
double circle_kernel_closed(int s, double theta, double phi);

enum class BaselineKind {
  kGaussian,         // exp(-r^2 / (2 sigma^2))
  kMatern32,         // (1 + sqrt(3) r) exp(-sqrt(3) r)
  kMatern52,         // (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r)
  kCircleBernoulli,  // circle_kernel_closed on the two angles, d = 2 inputs
};

/// Closed-form kernels for the classical pairwise learner.
struct BaselineKernel {
  BaselineKind kind = BaselineKind::kGaussian;
  double sigma = 1.0;  // Gaussian bandwidth
  int s = 1;           // circle-Bernoulli order

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& xp) const;
};

}  // namespace tksgd::kernel
