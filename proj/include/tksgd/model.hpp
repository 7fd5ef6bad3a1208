#pragma once

#include "tksgd/harmonics.hpp"
#include "tksgd/kernel.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tksgd::model {

/// Degree-blocked expansion coefficients {f_{k,j}} of a truncated series
/// f = sum_k sum_j f_{k,j} Y_{k,j}; the estimator's entire state.  Block k
/// has dim_harmonic(d, k) entries in enumeration order.
struct CoefficientVector {
  std::vector<Eigen::VectorXd> blocks;
  kernel::CoefficientSchedule schedule;
  int d = 2;

  static CoefficientVector zero(const kernel::CoefficientSchedule& schedule, int degree);

  int max_degree() const { return static_cast<int>(blocks.size()) - 1; }
  long long coefficient_count() const;

  /// Grows storage to degree L with zero blocks; the embedded function is
  /// unchanged.  No-op when L <= max_degree().
  void extend_to_degree(int L);
};

/// f(x) as the blockwise dot product with a basis evaluation at x.
/// The evaluation must cover at least f's degrees.
double evaluate(const CoefficientVector& f, const harmonics::BasisEvaluation& basis);

/// ||f||_K^2 = sum_k a_k^{-1} sum_j f_{k,j}^2, compensated summation.
double rkhs_norm_sq(const CoefficientVector& f);

/// ||f||^2 = sum_k sum_j f_{k,j}^2 (Parseval under the normalized measure).
double l2_norm_sq(const CoefficientVector& f);

/// ||f - g||^2 over the union of the two degree ranges; schedules must match.
double l2_distance_sq(const CoefficientVector& f, const CoefficientVector& g);

/// Radial projection onto {||f||_K <= Q}: returns f unchanged inside the
/// ball, else scales every coefficient by Q/||f||_K.  Exactly idempotent.
void project_to_ball_in_place(CoefficientVector& f, double q);
CoefficientVector project_to_ball(CoefficientVector f, double q);

/// Accumulates the alpha-suffix average of iterates f_0, f_1, ..., f_{n-1}
/// for one known final n: the mean of the iterates with index in
/// [ceil((1-alpha) n), n - 1].  Iterates must be offered in index order
/// starting from 0; indices outside the window are ignored.
class SuffixAverager {
 public:
  SuffixAverager(double alpha, long long final_n, const kernel::CoefficientSchedule& schedule);

  /// Offers iterate f_index.  Throws std::invalid_argument on out-of-order
  /// indices.
  void offer(const CoefficientVector& iterate, long long index);

  bool complete() const { return next_index_ >= final_n_; }
  long long window_start() const { return window_start_; }
  long long count() const { return count_; }

  /// The averaged coefficients; requires count() > 0.
  CoefficientVector average() const;

 private:
  long long final_n_;
  long long window_start_;
  long long next_index_ = 0;
  long long count_ = 0;
  CoefficientVector sum_;
};

}  // namespace tksgd::model
