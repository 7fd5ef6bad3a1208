#include "tksgd/harmonics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tksgd::harmonics {

namespace {

void check_dk(int d, int k) {
  if (d < 2) throw std::invalid_argument("harmonics: dimension d must be >= 2");
  if (k < 0) throw std::invalid_argument("harmonics: degree k must be >= 0");
}

// C(n, r), exact; each partial product C(n-r+i, i) is integral.
long long binomial(long long n, long long r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  long long res = 1;
  for (long long i = 1; i <= r; ++i) {
    long long tmp = 0;
    if (__builtin_mul_overflow(res, n - r + i, &tmp))
      throw std::overflow_error("harmonics: binomial coefficient overflows 64-bit range");
    res = tmp / i;
  }
  return res;
}

double log_binomial(long long n, long long r) {
  return std::lgamma(static_cast<double>(n + 1)) -
         std::lgamma(static_cast<double>(r + 1)) -
         std::lgamma(static_cast<double>(n - r + 1));
}

// lambda_j = (d - j - 1)/2 + sum of alpha entries after position j (1-based j).
double lambda_exponent(int d, int axis_j, int tail_sum) {
  return 0.5 * (d - axis_j - 1) + tail_sum;
}

double log_sphere_area(int d) {
  // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
  return std::log(2.0) + 0.5 * d * std::log(M_PI) - std::lgamma(0.5 * d);
}

// One factor of log h^{-2}: log( pi 2^{1-2l} Gamma(a+2l) / (a! (l+a) Gamma(l)^2) ).
double log_norm_factor(int a, double l) {
  return std::log(M_PI) + (1.0 - 2.0 * l) * std::log(2.0) + std::lgamma(a + 2.0 * l) -
         std::lgamma(a + 1.0) - std::log(l + a) - 2.0 * std::lgamma(l);
}

}  // namespace

long long dim_harmonic(int d, int k) {
  check_dk(d, k);
  long long a = binomial(k + d - 1, d - 1);
  long long b = k >= 2 ? binomial(k + d - 3, d - 1) : 0;
  return a - b;
}

long long dim_pi(int d, int k) {
  check_dk(d, k);
  long long a = binomial(k + d - 1, d - 1);
  long long b = binomial(k + d - 2, d - 1);
  long long sum = 0;
  if (__builtin_add_overflow(a, b, &sum))
    throw std::overflow_error("harmonics: dim_pi overflows 64-bit range");
  return sum;
}

double log_dim_pi(int d, int k) {
  check_dk(d, k);
  if (k == 0) return 0.0;
  double la = log_binomial(k + d - 1, d - 1);
  double lb = log_binomial(k + d - 2, d - 1);
  return la + std::log1p(std::exp(lb - la));
}

double gegenbauer(int k, double lambda, double u) {
  if (lambda <= 0.0) throw std::invalid_argument("gegenbauer: lambda must be positive");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * u;
  for (int n = 1; n < k; ++n) {
    double next = (2.0 * (n + lambda) / (n + 1)) * u * cur - ((n + 2.0 * lambda - 1.0) / (n + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double gegenbauer_solid(int k, double lambda, double x, double s_sq) {
  if (lambda <= 0.0) throw std::invalid_argument("gegenbauer_solid: lambda must be positive");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * x;
  for (int n = 1; n < k; ++n) {
    double next =
        (2.0 * (n + lambda) / (n + 1)) * x * cur - ((n + 2.0 * lambda - 1.0) / (n + 1)) * s_sq * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

int MultiIndex::degree() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

std::vector<MultiIndex> enumerate_basis(int d, int k) {
  check_dk(d, k);
  std::vector<MultiIndex> out;
  std::vector<int> alpha(d - 1, 0);
  // Lexicographic on alpha; the final entry absorbs the remaining degree.
  auto recurse = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == d - 2) {
      alpha[pos] = remaining;
      out.push_back({alpha, 0});
      if (remaining >= 1) out.push_back({alpha, 1});
      return;
    }
    for (int a = 0; a <= remaining; ++a) {
      alpha[pos] = a;
      self(self, pos + 1, remaining - a);
    }
  };
  recurse(recurse, 0, k);
  return out;
}

double normalization_log(int d, const MultiIndex& idx) {
  if (static_cast<int>(idx.alpha.size()) != d - 1)
    throw std::invalid_argument("normalization_log: alpha must have d-1 entries");
  if (idx.trig_part == 1 && idx.alpha.back() < 1)
    throw std::invalid_argument("normalization_log: sine part requires alpha_{d-1} >= 1");
  if (idx.degree() == 0) return 0.0;  // the constant harmonic is exactly 1
  double log_hm2 = std::log(idx.alpha.back() > 0 ? M_PI : 2.0 * M_PI) - log_sphere_area(d);
  int tail = idx.alpha.back();
  for (int j = d - 2; j >= 1; --j) {
    double l = lambda_exponent(d, j, tail);
    log_hm2 += log_norm_factor(idx.alpha[j - 1], l);
    tail += idx.alpha[j - 1];
  }
  return -0.5 * log_hm2;
}

double normalization_constant(int d, const MultiIndex& idx) {
  double lg = normalization_log(d, idx);
  if (std::abs(2.0 * lg) > kNormalizationLogLimit)
    throw std::range_error("normalization_constant: log h^{-2} beyond precision limit");
  return std::exp(lg);
}

BasisEvaluator::BasisEvaluator(int d, int initial_degree) : d_(d) {
  if (d < 2) throw std::invalid_argument("BasisEvaluator: dimension d must be >= 2");
  ensure_degree(initial_degree);
}

void BasisEvaluator::ensure_degree(int L) {
  if (L < 0) throw std::invalid_argument("BasisEvaluator: degree must be >= 0");
  if (d_ == 2) return;  // trigonometric path needs no tables
  for (int k = static_cast<int>(entries_.size()); k <= L; ++k) build_degree(k);
}

void BasisEvaluator::build_degree(int k) {
  std::vector<Entry> degree;
  degree.reserve(static_cast<size_t>(dim_harmonic(d_, k)));
  for (const MultiIndex& idx : enumerate_basis(d_, k)) {
    Entry e;
    e.norm = normalization_constant(d_, idx);
    e.trig_order = idx.alpha.back();
    e.trig_part = idx.trig_part;
    int tail = idx.alpha.back();
    for (int j = d_ - 2; j >= 1; --j) {
      if (idx.alpha[j - 1] > 0) e.factors.push_back({j, tail, idx.alpha[j - 1]});
      tail += idx.alpha[j - 1];
    }
    degree.push_back(std::move(e));
  }
  entries_.push_back(std::move(degree));
}

BasisEvaluation BasisEvaluator::eval(const Eigen::Ref<const Eigen::VectorXd>& x, int L) {
  if (x.size() != d_) throw std::invalid_argument("BasisEvaluator: point has wrong dimension");
  const double norm = x.norm();
  if (std::abs(norm - 1.0) > kOnSphereTol)
    throw std::domain_error("BasisEvaluator: point is not on the unit sphere");
  ensure_degree(L);

  BasisEvaluation result;
  result.point = x;
  result.degree_blocks.resize(L + 1);

  if (d_ == 2) {
    // {1} and {sqrt(2) cos(k t), sqrt(2) sin(k t)}, t = atan2(x2, x1).
    const double sqrt2 = std::sqrt(2.0);
    double c = 1.0, s = 0.0;
    result.degree_blocks[0] = Eigen::VectorXd::Constant(1, 1.0);
    for (int k = 1; k <= L; ++k) {
      const double cn = c * x[0] - s * x[1];
      const double sn = s * x[0] + c * x[1];
      c = cn;
      s = sn;
      Eigen::VectorXd block(2);
      block << sqrt2 * c, sqrt2 * s;
      result.degree_blocks[k] = std::move(block);
    }
    return result;
  }

  // Partial squared norms S_m = x_1^2 + ... + x_m^2 (0-based index m-1).
  Eigen::VectorXd partial(d_);
  double acc = 0.0;
  for (int m = 0; m < d_; ++m) {
    acc += x[m] * x[m];
    partial[m] = acc;
  }

  // Trig factor: re/im of (x_2 + i x_1)^m for m = 0..L.
  std::vector<double> tre(L + 1), tim(L + 1);
  tre[0] = 1.0;
  tim[0] = 0.0;
  for (int m = 1; m <= L; ++m) {
    tre[m] = tre[m - 1] * x[1] - tim[m - 1] * x[0];
    tim[m] = tim[m - 1] * x[1] + tre[m - 1] * x[0];
  }

  // Solid Gegenbauer tables per axis j = 1..d-2 and tail sum: table value at
  // (j, tail, n) is S^{n/2} C_n^{lambda}(x_{d-j+1} / sqrt(S)) with
  // S = partial[d-j], coordinate x[d-j] (0-based), lambda = (d-j-1)/2 + tail.
  const int axes = d_ - 2;
  std::vector<std::vector<std::vector<double>>> table(axes + 1);
  for (int j = 1; j <= axes; ++j) {
    const double coord = x[d_ - j];
    const double s_sq = partial[d_ - j];
    table[j].resize(L + 1);
    for (int tail = 0; tail <= L; ++tail) {
      const double lambda = lambda_exponent(d_, j, tail);
      const int maxn = L - tail;
      auto& row = table[j][tail];
      row.resize(maxn + 1);
      row[0] = 1.0;
      if (maxn >= 1) row[1] = 2.0 * lambda * coord;
      for (int n = 1; n < maxn; ++n)
        row[n + 1] =
            (2.0 * (n + lambda) / (n + 1)) * coord * row[n] - ((n + 2.0 * lambda - 1.0) / (n + 1)) * s_sq * row[n - 1];
    }
  }

  for (int k = 0; k <= L; ++k) {
    const auto& degree = entries_[k];
    Eigen::VectorXd block(static_cast<Eigen::Index>(degree.size()));
    for (size_t i = 0; i < degree.size(); ++i) {
      const Entry& e = degree[i];
      double v = e.norm * (e.trig_part == 0 ? tre[e.trig_order] : tim[e.trig_order]);
      for (const auto& f : e.factors) v *= table[f[0]][f[1]][f[2]];
      block[static_cast<Eigen::Index>(i)] = v;
    }
    result.degree_blocks[k] = std::move(block);
  }
  return result;
}

BasisEvaluation eval_basis(int d, int L, const Eigen::Ref<const Eigen::VectorXd>& x) {
  BasisEvaluator evaluator(d, L);
  return evaluator.eval(x, L);
}

}  // namespace tksgd::harmonics
