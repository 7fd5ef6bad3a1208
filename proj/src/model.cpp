#include "tksgd/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tksgd::model {

namespace {

// Neumaier-compensated accumulator; one term per degree block keeps the
// block sums exact enough to survive ~1e6 accumulation steps.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

CoefficientVector CoefficientVector::zero(const kernel::CoefficientSchedule& schedule, int degree) {
  CoefficientVector f;
  f.schedule = schedule;
  f.d = schedule.d;
  f.extend_to_degree(degree);
  return f;
}

long long CoefficientVector::coefficient_count() const {
  long long n = 0;
  for (const auto& b : blocks) n += b.size();
  return n;
}

void CoefficientVector::extend_to_degree(int L) {
  for (int k = static_cast<int>(blocks.size()); k <= L; ++k)
    blocks.emplace_back(Eigen::VectorXd::Zero(harmonics::dim_harmonic(d, k)));
}

double evaluate(const CoefficientVector& f, const harmonics::BasisEvaluation& basis) {
  if (basis.max_degree() < f.max_degree())
    throw std::invalid_argument("evaluate: basis evaluation covers fewer degrees than f");
  KahanSum acc;
  for (int k = 0; k <= f.max_degree(); ++k) acc.add(f.blocks[k].dot(basis.degree_blocks[k]));
  return acc.value();
}

double rkhs_norm_sq(const CoefficientVector& f) {
  KahanSum acc;
  for (int k = 0; k <= f.max_degree(); ++k)
    acc.add(f.blocks[k].squaredNorm() / kernel::coefficient(f.schedule, k));
  return acc.value();
}

double l2_norm_sq(const CoefficientVector& f) {
  KahanSum acc;
  for (int k = 0; k <= f.max_degree(); ++k) acc.add(f.blocks[k].squaredNorm());
  return acc.value();
}

double l2_distance_sq(const CoefficientVector& f, const CoefficientVector& g) {
  if (f.d != g.d) throw std::invalid_argument("l2_distance_sq: dimension mismatch");
  KahanSum acc;
  const int common = std::min(f.max_degree(), g.max_degree());
  for (int k = 0; k <= common; ++k) acc.add((f.blocks[k] - g.blocks[k]).squaredNorm());
  for (int k = common + 1; k <= f.max_degree(); ++k) acc.add(f.blocks[k].squaredNorm());
  for (int k = common + 1; k <= g.max_degree(); ++k) acc.add(g.blocks[k].squaredNorm());
  return acc.value();
}

void project_to_ball_in_place(CoefficientVector& f, double q) {
  if (q <= 0.0) throw std::invalid_argument("project_to_ball: Q must be positive");
  const double norm_sq = rkhs_norm_sq(f);
  // The slack absorbs the rounding of a compensated norm recomputation, so a
  // vector that was just projected is always seen as inside the ball.
  constexpr double kSlack = 32.0 * std::numeric_limits<double>::epsilon();
  if (norm_sq <= q * q * (1.0 + kSlack)) return;
  const double scale = q / std::sqrt(norm_sq);
  for (auto& block : f.blocks) block *= scale;
}

CoefficientVector project_to_ball(CoefficientVector f, double q) {
  project_to_ball_in_place(f, q);
  return f;
}

SuffixAverager::SuffixAverager(double alpha, long long final_n,
                               const kernel::CoefficientSchedule& schedule)
    : final_n_(final_n) {
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("SuffixAverager: alpha must be in (0, 1]");
  if (final_n < 1) throw std::invalid_argument("SuffixAverager: final n must be >= 1");
  // Clamped so the window is never empty: for alpha*n < 1 it degenerates to
  // the single iterate f_{n-1}.
  window_start_ = std::min(
      static_cast<long long>(std::ceil((1.0 - alpha) * static_cast<double>(final_n))), final_n - 1);
  sum_ = CoefficientVector::zero(schedule, 0);
}

void SuffixAverager::offer(const CoefficientVector& iterate, long long index) {
  if (index != next_index_)
    throw std::invalid_argument("SuffixAverager: iterates must arrive in index order");
  ++next_index_;
  if (index < window_start_ || index >= final_n_) return;
  sum_.extend_to_degree(iterate.max_degree());
  for (int k = 0; k <= iterate.max_degree(); ++k) sum_.blocks[k] += iterate.blocks[k];
  ++count_;
}

CoefficientVector SuffixAverager::average() const {
  if (count_ == 0) throw std::logic_error("SuffixAverager: no iterates in window");
  CoefficientVector avg = sum_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (auto& block : avg.blocks) block *= inv;
  return avg;
}

}  // namespace tksgd::model
