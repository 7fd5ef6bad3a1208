#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "tksgd/harmonics.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tksgd;
namespace h = tksgd::harmonics;

TEST_CASE("dimension formulas") {
  CHECK(h::dim_harmonic(2, 3) == 2);
  CHECK(h::dim_harmonic(3, 2) == 5);
  CHECK(h::dim_harmonic(5, 0) == 1);
  CHECK(h::dim_harmonic(2, 0) == 1);
  CHECK(h::dim_harmonic(4, 1) == 4);

  CHECK(h::dim_pi(3, 2) == 9);
  CHECK(h::dim_pi(2, 4) == 9);
  for (int d : {2, 3, 5, 9}) CHECK(h::dim_pi(d, 0) == 1);

  // d = 3: dim H = 2k+1, dim Pi = (k+1)^2
  for (int k = 0; k <= 20; ++k) {
    CHECK(h::dim_harmonic(3, k) == 2 * k + 1);
    CHECK(h::dim_pi(3, k) == (k + 1) * (k + 1));
  }
}

TEST_CASE("dimension additivity") {
  for (int d = 2; d <= 10; ++d)
    for (int k = 0; k <= 20; ++k) {
      long long sum = 0;
      for (int j = 0; j <= k; ++j) sum += h::dim_harmonic(d, j);
      CHECK(sum == h::dim_pi(d, k));
    }
}

TEST_CASE("dimension overflow raises") {
  CHECK_THROWS_AS(h::dim_pi(10, 1000000), std::overflow_error);
  CHECK_THROWS_AS(h::dim_harmonic(30, 100000), std::overflow_error);
  // log form keeps working there
  CHECK(h::log_dim_pi(10, 1000000) > 100.0);
}

TEST_CASE("log_dim_pi agrees with the exact dimension") {
  for (int d : {2, 3, 5, 8})
    for (int k : {0, 1, 2, 7, 20})
      CHECK(h::log_dim_pi(d, k) ==
            doctest::Approx(std::log(static_cast<double>(h::dim_pi(d, k)))).epsilon(1e-12));
}

TEST_CASE("gegenbauer recurrence") {
  CHECK(h::gegenbauer(0, 1.5, 0.3) == 1.0);
  CHECK(h::gegenbauer(1, 2.0, 0.5) == 2.0);
  CHECK(h::gegenbauer(2, 1.0, 0.5) == doctest::Approx(0.0).epsilon(1e-15));

  // C_2^l(u) = 2 l (l+1) u^2 - l
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uu(-1.0, 1.0), ul(0.1, 4.0);
  for (int i = 0; i < 50; ++i) {
    const double u = uu(rng), l = ul(rng);
    CHECK(h::gegenbauer(2, l, u) ==
          doctest::Approx(2.0 * l * (l + 1.0) * u * u - l).epsilon(1e-13));
  }
  CHECK_THROWS_AS(h::gegenbauer(2, 0.0, 0.3), std::invalid_argument);
}

TEST_CASE("solid gegenbauer form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uu(-1.0, 1.0), ul(0.3, 3.0);
  for (int i = 0; i < 50; ++i) {
    const double x = uu(rng), l = ul(rng);
    for (int k : {0, 1, 2, 5, 9}) {
      // S = 1 reduces to the plain polynomial
      CHECK(h::gegenbauer_solid(k, l, x, 1.0) == doctest::Approx(h::gegenbauer(k, l, x)).epsilon(1e-12));
      // general S: S^{k/2} C_k(x / sqrt(S)) with |x| <= sqrt(S)
      const double s_sq = x * x + uu(rng) * uu(rng);
      if (s_sq > 1e-12) {
        const double expected = std::pow(s_sq, 0.5 * k) * h::gegenbauer(k, l, x / std::sqrt(s_sq));
        CHECK(h::gegenbauer_solid(k, l, x, s_sq) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
  // removable singularity at S = 0
  CHECK(h::gegenbauer_solid(0, 1.0, 0.0, 0.0) == 1.0);
  CHECK(h::gegenbauer_solid(3, 1.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("basis enumeration") {
  CHECK(h::enumerate_basis(3, 1).size() == 3);
  CHECK(h::enumerate_basis(2, 2).size() == 2);
  CHECK(h::enumerate_basis(4, 0).size() == 1);

  for (int d : {2, 3, 4, 5, 7})
    for (int k = 0; k <= 6; ++k) {
      const auto basis = h::enumerate_basis(d, k);
      CHECK(static_cast<long long>(basis.size()) == h::dim_harmonic(d, k));
      for (const auto& idx : basis) {
        CHECK(idx.degree() == k);
        if (idx.trig_part == 1) CHECK(idx.alpha.back() >= 1);
      }
      // lexicographic on alpha, cos before sin
      for (size_t i = 1; i < basis.size(); ++i) {
        const auto& a = basis[i - 1];
        const auto& b = basis[i];
        if (a.alpha == b.alpha)
          CHECK(a.trig_part < b.trig_part);
        else
          CHECK(std::lexicographical_compare(a.alpha.begin(), a.alpha.end(), b.alpha.begin(),
                                             b.alpha.end()));
      }
    }

  // d = 3, k = 2 explicitly: (0,2)c, (0,2)s, (1,1)c, (1,1)s, (2,0)c
  const auto basis = h::enumerate_basis(3, 2);
  REQUIRE(basis.size() == 5);
  CHECK(basis[0].alpha == std::vector<int>{0, 2});
  CHECK(basis[0].trig_part == 0);
  CHECK(basis[1].alpha == std::vector<int>{0, 2});
  CHECK(basis[1].trig_part == 1);
  CHECK(basis[2].alpha == std::vector<int>{1, 1});
  CHECK(basis[4].alpha == std::vector<int>{2, 0});
  CHECK(basis[4].trig_part == 0);
}

TEST_CASE("normalization constants") {
  // constant harmonic has unit norm under the normalized measure
  for (int d : {2, 3, 4, 5, 6}) {
    const auto basis = h::enumerate_basis(d, 0);
    REQUIRE(basis.size() == 1);
    CHECK(h::normalization_constant(d, basis[0]) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // degree-1 harmonics on S^2 are sqrt(3) x_i
  for (const auto& idx : h::enumerate_basis(3, 1))
    CHECK(h::normalization_constant(3, idx) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  // circle: sqrt(2) for every k >= 1 harmonic
  for (const auto& idx : h::enumerate_basis(2, 5))
    CHECK(h::normalization_constant(2, idx) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // log form consistent with the direct value
  for (const auto& idx : h::enumerate_basis(5, 3))
    CHECK(std::exp(h::normalization_log(5, idx)) ==
          doctest::Approx(h::normalization_constant(5, idx)).epsilon(1e-12));
}

TEST_CASE("circle basis values") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  h::BasisEvaluator ev(2);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = angle(rng);
    const Eigen::Vector2d x(std::cos(theta), std::sin(theta));
    const auto basis = ev.eval(x, 4);
    CHECK(basis.degree_blocks[0][0] == 1.0);
    for (int k = 1; k <= 4; ++k) {
      CHECK(basis.degree_blocks[k][0] ==
            doctest::Approx(std::sqrt(2.0) * std::cos(k * theta)).epsilon(1e-12));
      CHECK(basis.degree_blocks[k][1] ==
            doctest::Approx(std::sqrt(2.0) * std::sin(k * theta)).epsilon(1e-12));
    }
  }
}

TEST_CASE("pole values and degenerate degrees") {
  // degree-1 block at the north pole of S^2: sqrt(3) on the x3 harmonic only
  Eigen::Vector3d pole(0.0, 0.0, 1.0);
  const auto basis = h::eval_basis(3, 1, pole);
  REQUIRE(basis.degree_blocks[1].size() == 3);
  CHECK(basis.degree_blocks[1][0] == doctest::Approx(0.0));
  CHECK(basis.degree_blocks[1][1] == doctest::Approx(0.0));
  CHECK(basis.degree_blocks[1][2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  // degree 0 alone, any d and point
  std::mt19937_64 rng(5);
  for (int d : {2, 3, 6}) {
    const auto b0 = h::eval_basis(d, 0, test_util::random_sphere_point(d, rng));
    REQUIRE(b0.degree_blocks.size() == 1);
    CHECK(b0.degree_blocks[0][0] == 1.0);
  }

  // higher degrees stay finite at the poles (removable singularities)
  for (int d : {3, 4, 5}) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    p[d - 1] = 1.0;
    const auto bp = h::eval_basis(d, 5, p);
    for (const auto& block : bp.degree_blocks) CHECK(block.allFinite());
  }
}

TEST_CASE("off-sphere points raise") {
  h::BasisEvaluator ev(3);
  Eigen::Vector3d x(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(ev.eval(x, 2), std::domain_error);
  Eigen::Vector3d nearly = Eigen::Vector3d(1.0, 0.0, 0.0) * (1.0 + 1e-6);
  CHECK_THROWS_AS(ev.eval(nearly, 2), std::domain_error);
}

TEST_CASE("circle orthonormality by exact trapezoid quadrature") {
  const int kAngles = 4096;
  const int kMaxDegree = 8;
  h::BasisEvaluator ev(2);
  const int dim = static_cast<int>(h::dim_pi(2, kMaxDegree));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd values(dim);
  for (int i = 0; i < kAngles; ++i) {
    const double theta = 2.0 * M_PI * i / kAngles;
    const auto basis = ev.eval(Eigen::Vector2d(std::cos(theta), std::sin(theta)), kMaxDegree);
    int at = 0;
    for (const auto& block : basis.degree_blocks)
      for (Eigen::Index j = 0; j < block.size(); ++j) values[at++] = block[j];
    gram.noalias() += values * values.transpose();
  }
  gram /= static_cast<double>(kAngles);
  const double max_error = (gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  CHECK(max_error <= 1e-10);
}

namespace {

// P(Z > z) = p for a standard normal, by bisection on erfc.
double z_for_tail(double p) {
  double lo = 0.0, hi = 12.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) lo = mid;
    else hi = mid;
  }
  return lo;
}

// Monte-Carlo Gram check: every pairwise inner product within the hard cap
// 2e-2 and within the family-corrected multiple of its standard error (the
// per-pair 3-sigma rule applied jointly across ~dim^2/2 pairs at overall
// level 1e-3; a systematic normalization error of even 1% would sit far
// beyond it).
void mc_orthonormality(int d, int max_degree, long long points) {
  const int dim = static_cast<int>(h::dim_pi(d, max_degree));
  const long long chunk_rows = 20000;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(dim, dim);
  std::mt19937_64 rng(20240 + d);
  h::BasisEvaluator ev(d);
  Eigen::MatrixXd chunk(chunk_rows, dim);
  long long done = 0;
  while (done < points) {
    const long long rows = std::min(chunk_rows, points - done);
    for (long long r = 0; r < rows; ++r) {
      const auto basis = ev.eval(test_util::random_sphere_point(d, rng), max_degree);
      int at = 0;
      for (const auto& block : basis.degree_blocks)
        for (Eigen::Index j = 0; j < block.size(); ++j) chunk(r, at++) = block[j];
    }
    const auto v = chunk.topRows(rows);
    gram.noalias() += v.transpose() * v;
    const Eigen::MatrixXd v2 = v.cwiseProduct(v);
    second.noalias() += v2.transpose() * v2;
    done += rows;
  }
  const double n = static_cast<double>(points);
  gram /= n;
  second /= n;
  const double pairs = 0.5 * dim * (dim + 1);
  const double z_crit = z_for_tail(0.0005 / pairs);
  double worst_z = 0.0, worst_abs = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      const double err = std::abs(gram(i, j) - target);
      const double var = std::max(second(i, j) - gram(i, j) * gram(i, j), 0.0);
      const double stderr_mean = std::sqrt(var / n);
      worst_abs = std::max(worst_abs, err);
      if (stderr_mean > 0.0) worst_z = std::max(worst_z, err / stderr_mean);
      CHECK(err <= z_crit * stderr_mean + 1e-9);
      CHECK(err <= 2e-2);
    }
  INFO("d=", d, " worst |err|=", worst_abs, " worst z=", worst_z);
}

}  // namespace

TEST_CASE("orthonormality on S^2 and S^4 by Monte Carlo") {
  mc_orthonormality(3, 4, 1000000);
  mc_orthonormality(5, 4, 1000000);
}

TEST_CASE("addition formula is rotation invariant") {
  std::mt19937_64 rng(99);
  for (int d : {3, 4}) {
    h::BasisEvaluator ev(d);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = test_util::random_sphere_point(d, rng);
      const Eigen::VectorXd y = test_util::random_sphere_point(d, rng);
      const Eigen::MatrixXd rot = test_util::random_rotation(d, rng);
      Eigen::VectorXd rx = rot * x, ry = rot * y;
      rx /= rx.norm();
      ry /= ry.norm();
      const auto bx = ev.eval(x, 5), by = ev.eval(y, 5);
      const auto brx = ev.eval(rx, 5), bry = ev.eval(ry, 5);
      for (int k = 0; k <= 5; ++k) {
        const double plain = bx.degree_blocks[k].dot(by.degree_blocks[k]);
        const double rotated = brx.degree_blocks[k].dot(bry.degree_blocks[k]);
        CHECK(std::abs(plain - rotated) <= 1e-8);
      }
    }
  }
}

TEST_CASE("pointwise diagonal identity") {
  // The addition formula makes sum_j Y_{k,j}(x)^2 = dim H_k^d at every point,
  // an exact normalization cross-check (and in particular the <= dim bound).
  std::mt19937_64 rng(123);
  for (int d : {2, 3, 5}) {
    h::BasisEvaluator ev(d);
    for (int trial = 0; trial < 40; ++trial) {
      const auto basis = ev.eval(test_util::random_sphere_point(d, rng), 6);
      for (int k = 0; k <= 6; ++k) {
        const double diag = basis.degree_blocks[k].squaredNorm();
        const double dim = static_cast<double>(h::dim_harmonic(d, k));
        CHECK(diag <= dim + 1e-8);
        CHECK(std::abs(diag - dim) <= 1e-8 * dim);
      }
    }
  }
}
