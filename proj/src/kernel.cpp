#include "tksgd/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace tksgd::kernel {

namespace {

void check_schedule(const CoefficientSchedule& sch) {
  if (sch.s <= 0.5) throw std::invalid_argument("CoefficientSchedule: capacity s must exceed 1/2");
  if (sch.d < 2) throw std::invalid_argument("CoefficientSchedule: dimension must be >= 2");
  if (sch.kind == ScheduleKind::kCirclePaper && sch.d != 2)
    throw std::invalid_argument("CoefficientSchedule: circle schedule requires d = 2");
}

// Tail of sum_{k > K} (2k + c)^{-2s} by Euler-Maclaurin on f(x) = (2x+c)^{-2s}:
//   integral - f(K)/2 - f'(K)/12 + f'''(K)/720.
double power_law_tail(double K, double c, double two_s) {
  const double base = 2.0 * K + c;
  const double f = std::pow(base, -two_s);
  const double integral = std::pow(base, 1.0 - two_s) / (2.0 * (two_s - 1.0));
  const double fp = -2.0 * two_s * std::pow(base, -two_s - 1.0);
  const double fppp = -8.0 * two_s * (two_s + 1.0) * (two_s + 2.0) * std::pow(base, -two_s - 3.0);
  return integral - 0.5 * f - fp / 12.0 + fppp / 720.0;
}

}  // namespace

CoefficientSchedule CoefficientSchedule::power_of_dim(int d, double s) {
  CoefficientSchedule sch{ScheduleKind::kPowerOfDim, s, d};
  check_schedule(sch);
  return sch;
}

CoefficientSchedule CoefficientSchedule::circle_paper(double s) {
  CoefficientSchedule sch{ScheduleKind::kCirclePaper, s, 2};
  check_schedule(sch);
  return sch;
}

double coefficient(const CoefficientSchedule& schedule, int k) {
  if (k < 0) throw std::invalid_argument("coefficient: k must be >= 0");
  if (k == 0) return 1.0;
  if (schedule.kind == ScheduleKind::kCirclePaper) return std::pow(2.0 * k, -2.0 * schedule.s);
  // Exact integer dimension while it fits a double exactly, log-gamma beyond.
  double log_dim;
  try {
    long long dim = harmonics::dim_pi(schedule.d, k);
    if (dim <= (1LL << 53)) return std::pow(static_cast<double>(dim), -2.0 * schedule.s);
    log_dim = std::log(static_cast<double>(dim));
  } catch (const std::overflow_error&) {
    log_dim = harmonics::log_dim_pi(schedule.d, k);
  }
  return std::exp(-2.0 * schedule.s * log_dim);
}

double kappa_sq(const CoefficientSchedule& schedule, double tol, long long max_terms) {
  check_schedule(schedule);
  const double two_s = 2.0 * schedule.s;
  if (schedule.d == 2) {
    // Terms are an exact power law: 2 (2k)^{-2s} or 2 (2k+1)^{-2s}.
    const double c = schedule.kind == ScheduleKind::kCirclePaper ? 0.0 : 1.0;
    const long long K = 2000;
    double sum = 1.0;
    for (long long k = 1; k <= K; ++k) sum += 2.0 * std::pow(2.0 * k + c, -two_s);
    return sum + 2.0 * power_law_tail(static_cast<double>(K), c, two_s);
  }
  // d >= 3 power-of-dim: sum until the fitted local-exponent tail estimate is
  // reliable to tol, then add it.
  double sum = 1.0;
  double prev_term = 0.0;
  for (long long k = 1; k <= max_terms; ++k) {
    const double ak = coefficient(schedule, static_cast<int>(k));
    double dim_h;
    try {
      dim_h = static_cast<double>(harmonics::dim_harmonic(schedule.d, static_cast<int>(k)));
    } catch (const std::overflow_error&) {
      double la = harmonics::log_dim_pi(schedule.d, static_cast<int>(k));
      double lb = harmonics::log_dim_pi(schedule.d, static_cast<int>(k) - 1);
      dim_h = std::exp(la) - std::exp(lb);
    }
    const double term = ak * dim_h;
    sum += term;
    if (k >= 16 && prev_term > 0.0 && term > 0.0 && term < prev_term) {
      const double q = -std::log(term / prev_term) / std::log(static_cast<double>(k) / (k - 1));
      if (q > 1.2 && term / ((q - 1.0) * (q - 1.0)) < tol) {
        const double kk = static_cast<double>(k);
        sum += term * (kk / (q - 1.0) - 0.5 - q / (12.0 * kk));
        return sum;
      }
    }
    if (term < 1e-300) return sum;
    prev_term = term;
  }
  throw std::runtime_error("kappa_sq: series did not converge within max_terms");
}

double truncated_kernel(const CoefficientSchedule& schedule, int L,
                        const harmonics::BasisEvaluation& bx,
                        const harmonics::BasisEvaluation& bxp) {
  if (bx.max_degree() < L || bxp.max_degree() < L)
    throw std::invalid_argument("truncated_kernel: basis evaluations cover fewer degrees than L");
  double sum = 0.0;
  for (int k = 0; k <= L; ++k)
    sum += coefficient(schedule, k) * bx.degree_blocks[k].dot(bxp.degree_blocks[k]);
  return sum;
}

double truncated_kernel(const CoefficientSchedule& schedule, int L,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& xp) {
  harmonics::BasisEvaluator evaluator(schedule.d, L);
  const auto bx = evaluator.eval(x, L);
  const auto bxp = evaluator.eval(xp, L);
  return truncated_kernel(schedule, L, bx, bxp);
}

double bernoulli_poly(int order, double u) {
  const double u2 = u * u;
  switch (order) {
    case 2:
      return u2 - u + 1.0 / 6.0;
    case 4:
      return u2 * u2 - 2.0 * u2 * u + u2 - 1.0 / 30.0;
    case 6:
      return ((((u - 3.0) * u + 2.5) * u2 - 0.5) * u2) + 1.0 / 42.0;
    case 8:
      return ((((u - 4.0) * u + 14.0 / 3.0) * u2 - 7.0 / 3.0) * u2 + 2.0 / 3.0) * u2 - 1.0 / 30.0;
    default:
      throw std::invalid_argument("bernoulli_poly: order must be one of {2, 4, 6, 8}");
  }
}

double circle_kernel_closed(int s, double theta, double phi) {
  if (s < 1 || s > 4) throw std::invalid_argument("circle_kernel_closed: s must be in {1, 2, 3, 4}");
  double frac = (theta - phi) / (2.0 * M_PI);
  frac -= std::floor(frac);
  static constexpr double kFactorial2s[] = {2.0, 24.0, 720.0, 40320.0};
  const double sign = (s % 2 == 1) ? 1.0 : -1.0;
  return 1.0 + sign * std::pow(M_PI, 2.0 * s) / kFactorial2s[s - 1] * bernoulli_poly(2 * s, frac);
}

double BaselineKernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::VectorXd>& xp) const {
  if (kind == BaselineKind::kCircleBernoulli) {
    if (x.size() != 2 || xp.size() != 2)
      throw std::invalid_argument("BaselineKernel: circle kernel needs 2-d inputs");
    return circle_kernel_closed(s, std::atan2(x[1], x[0]), std::atan2(xp[1], xp[0]));
  }
  const double r = (x - xp).norm();
  switch (kind) {
    case BaselineKind::kGaussian:
      return std::exp(-r * r / (2.0 * sigma * sigma));
    case BaselineKind::kMatern32: {
      const double a = std::sqrt(3.0) * r;
      return (1.0 + a) * std::exp(-a);
    }
    case BaselineKind::kMatern52: {
      const double a = std::sqrt(5.0) * r;
      return (1.0 + a + 5.0 * r * r / 3.0) * std::exp(-a);
    }
    default:
      throw std::logic_error("BaselineKernel: unknown kind");
  }
}

}  // namespace tksgd::kernel
