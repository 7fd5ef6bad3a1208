#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tksgd::harmonics {

/// Points are accepted as "on the sphere" when |norm(x) - 1| is at most this.
/// Inputs are never re-normalized silently; off-sphere points are an error.
inline constexpr double kOnSphereTol = 1e-9;

/// dim H_k^d = C(k+d-1, d-1) - C(k+d-3, d-1), the subtracted term being 0
/// for k < 2.  For d = 2 this is 2 (k >= 1); for d = 3 it is 2k+1.
/// Throws std::overflow_error when the binomial exceeds 64-bit range.
long long dim_harmonic(int d, int k);

/// dim Pi_k^d = C(k+d-1, d-1) + C(k+d-2, d-1), the dimension of the space of
/// polynomials of degree at most k on the sphere.  Equals the running sum of
/// dim_harmonic(d, 0..k); for d = 3 it is (k+1)^2.
long long dim_pi(int d, int k);

/// log(dim Pi_k^d) via log-gamma, usable where the integer form overflows.
double log_dim_pi(int d, int k);

/// Gegenbauer polynomial C_k^lambda(u) by the three-term forward recurrence
/// from C_0 = 1, C_1 = 2*lambda*u.  Requires lambda > 0.
double gegenbauer(int k, double lambda, double u);

/// The solid form S^{k/2} * C_k^lambda(x / sqrt(S)), evaluated by the scaled
/// recurrence D_{n+1} = (2(n+lambda)/(n+1)) x D_n - ((n+2lambda-1)/(n+1)) S D_{n-1}.
/// Regular at S = 0 (value 1 for k = 0, 0 for k > 0), which is what the
/// harmonic product formula needs at the poles.
double gegenbauer_solid(int k, double lambda, double x, double s_sq);

/// Index of one real harmonic Y_{alpha,i} of degree |alpha|.
/// alpha has d-1 entries; trig_part 0 selects the cosine-type branch, 1 the
/// sine-type branch (only valid when alpha.back() >= 1).
struct MultiIndex {
  std::vector<int> alpha;
  int trig_part = 0;

  int degree() const;
};

/// All (alpha, i) pairs of degree k in the frozen enumeration order:
/// lexicographic on alpha, cosine part before sine part.  The coefficient
/// dump format depends on this order; do not change it.
std::vector<MultiIndex> enumerate_basis(int d, int k);

/// log of the normalization constant h_{alpha,i} making Y_{alpha,i}
/// orthonormal under the normalized surface measure <f,g> = (1/|S^{d-1}|) *
/// integral of f*g.  Accumulated from log-gamma terms.
double normalization_log(int d, const MultiIndex& idx);

/// h_{alpha,i} itself.  Throws std::range_error when |log h^{-2}| exceeds
/// kNormalizationLogLimit, past which the exponentiation loses precision.
double normalization_constant(int d, const MultiIndex& idx);

inline constexpr double kNormalizationLogLimit = 700.0;

/// Values of every Y_{k,j} at one point, blocked by degree k = 0..L.
/// Block k has dim_harmonic(d, k) entries in enumeration order.
struct BasisEvaluation {
  std::vector<Eigen::VectorXd> degree_blocks;
  Eigen::VectorXd point;

  int max_degree() const { return static_cast<int>(degree_blocks.size()) - 1; }
};

/// Evaluates the orthonormal basis of H_0^d .. H_L^d at points of S^{d-1}.
///
/// The per-degree index structure (multi-indices, normalization constants)
/// is built once and reused across points; per-point work shares the partial
/// norms x_1^2+..+x_m^2, one table of solid Gegenbauer values per axis, and a
/// complex-power recurrence for the trigonometric factor.  d = 2 bypasses the
/// product formula and evaluates {1, sqrt(2) cos(k t), sqrt(2) sin(k t)} with
/// t = atan2(x_2, x_1) directly.
///
/// Not thread-safe: use one evaluator per thread (tables never mutate under
/// a const evaluation, but ensure_degree does).
class BasisEvaluator {
 public:
  explicit BasisEvaluator(int d, int initial_degree = 0);

  /// Extends the cached index structure up to degree L.
  void ensure_degree(int L);

  /// Evaluates degrees 0..L at x (extends caches if needed).
  /// Throws std::domain_error when x is off the sphere.
  BasisEvaluation eval(const Eigen::Ref<const Eigen::VectorXd>& x, int L);

  int dimension() const { return d_; }

 private:
  // One harmonic: product over stored (axis, tail, order) of solid Gegenbauer
  // factors, times the trig factor of order trig_order, times norm.
  struct Entry {
    double norm = 1.0;
    int trig_order = 0;
    int trig_part = 0;
    std::vector<std::array<int, 3>> factors;  // {axis, tail, order}, order >= 1
  };

  void build_degree(int k);

  int d_;
  std::vector<std::vector<Entry>> entries_;  // per degree, d >= 3 only
};

/// One-shot convenience wrapper around BasisEvaluator.
BasisEvaluation eval_basis(int d, int L, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace tksgd::harmonics
