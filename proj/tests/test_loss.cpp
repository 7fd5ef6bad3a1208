#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "tksgd/loss.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace tksgd;
namespace l = tksgd::loss;

namespace {

const std::vector<l::Kind> kAllKinds = {
    l::Kind::kLeastSquares, l::Kind::kLogistic,     l::Kind::kPoisson, l::Kind::kHuberSqrt,
    l::Kind::kHuberLogCosh, l::Kind::kCauchy,       l::Kind::kWelsch};

// A label valid for the loss, drawn from its label set.
double random_label(l::Kind kind, std::mt19937_64& rng) {
  switch (kind) {
    case l::Kind::kLogistic:
      return rng() % 2 == 0 ? 1.0 : -1.0;
    case l::Kind::kPoisson:
      return static_cast<double>(rng() % 6);
    case l::Kind::kCauchy:
      return std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    case l::Kind::kWelsch:
      return std::uniform_real_distribution<double>(-1.0 / 3.0, 1.0 / 3.0)(rng);
    default:
      return std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
  }
}

}  // namespace

TEST_CASE("values") {
  const auto l2 = l::LossSpec::make(l::Kind::kLeastSquares);
  CHECK(l::value(l2, 1.0, 3.0) == doctest::Approx(4.0));

  const auto welsch = l::LossSpec::make(l::Kind::kWelsch);
  CHECK(l::value(welsch, 0.2, 0.2) == 0.0);

  const auto huber = l::LossSpec::make(l::Kind::kHuberSqrt);
  CHECK(l::value(huber, 0.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));

  const auto logistic = l::LossSpec::make(l::Kind::kLogistic);
  CHECK(l::value(logistic, 0.0, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const auto cauchy = l::LossSpec::make(l::Kind::kCauchy);
  CHECK(l::value(cauchy, 0.4, -0.1) == doctest::Approx(std::log(1.0 + 0.125)).epsilon(1e-14));

  const auto poisson = l::LossSpec::make(l::Kind::kPoisson);
  CHECK(l::value(poisson, 1.0, 2.0) == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-15));
}

TEST_CASE("derivatives at fixed points") {
  const auto logistic = l::LossSpec::make(l::Kind::kLogistic);
  CHECK(l::derivative(logistic, 0.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));

  const auto l2 = l::LossSpec::make(l::Kind::kLeastSquares);
  CHECK(l::derivative(l2, 1.7, 1.7) == 0.0);

  const auto cauchy = l::LossSpec::make(l::Kind::kCauchy);
  CHECK(l::derivative(cauchy, 0.5, 0.0) ==
        doctest::Approx(0.5 / 1.125).epsilon(1e-15));  // t/(1+t^2/2) at t = 1/2
}

TEST_CASE("gradient check against central differences") {
  std::mt19937_64 rng(2024);
  const double h = 1e-5;
  for (const auto kind : kAllKinds) {
    const auto spec = l::LossSpec::make(kind);
    const double b = spec.domain_halfwidth;
    std::uniform_real_distribution<double> du(-b * 0.98, b * 0.98);
    for (int trial = 0; trial < 200; ++trial) {
      const double u = du(rng);
      const double v = random_label(kind, rng);
      const double grad = l::derivative(spec, u, v);
      const double fd = (l::value(spec, u + h, v) - l::value(spec, u - h, v)) / (2.0 * h);
      CHECK(std::abs(grad - fd) <= 1e-6 * (1.0 + std::abs(grad)));
    }
  }
}

TEST_CASE("derivative bound M holds on a dense grid") {
  std::mt19937_64 rng(7);
  for (const auto kind : kAllKinds) {
    const auto spec = kind == l::Kind::kLeastSquares || kind == l::Kind::kHuberSqrt ||
                              kind == l::Kind::kHuberLogCosh
                          ? l::LossSpec::make(kind, 3.0, 2.0)
                          : l::LossSpec::make(kind);
    const double m = spec.derivative_bound();
    for (int i = 0; i <= 200; ++i) {
      const double u = -spec.domain_halfwidth + 2.0 * spec.domain_halfwidth * i / 200.0;
      for (int trial = 0; trial < 5; ++trial) {
        double v = random_label(kind, rng);
        if (kind == l::Kind::kLeastSquares || kind == l::Kind::kHuberSqrt ||
            kind == l::Kind::kHuberLogCosh)
          v = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
        if (kind == l::Kind::kPoisson) v = static_cast<double>(rng() % 3);
        CHECK(std::abs(l::derivative(spec, u, v)) <= m * (1.0 + 1e-12) + 1e-12);
      }
    }
  }
}

TEST_CASE("logistic stays stable for large margins") {
  const auto logistic = l::LossSpec::make(l::Kind::kLogistic, 500.0, 1.0);
  CHECK(std::isfinite(l::value(logistic, 400.0, 1.0)));
  CHECK(std::isfinite(l::value(logistic, 400.0, -1.0)));
  CHECK(l::derivative(logistic, 400.0, 1.0) == doctest::Approx(0.0));
  CHECK(l::derivative(logistic, 400.0, -1.0) == doctest::Approx(1.0));
  CHECK(l::derivative(logistic, -400.0, 1.0) == doctest::Approx(-1.0));
  // value ~ margin in the deep mistake regime
  CHECK(l::value(logistic, 400.0, -1.0) == doctest::Approx(400.0).epsilon(1e-12));
}

TEST_CASE("local strong convexity by second differences") {
  // least squares: second difference is exactly 2
  const auto l2 = l::LossSpec::make(l::Kind::kLeastSquares);
  const double h = 1e-4;
  for (double u : {-5.0, -1.0, 0.0, 2.5}) {
    const double second =
        (l::value(l2, u + h, 1.0) - 2.0 * l::value(l2, u, 1.0) + l::value(l2, u - h, 1.0)) / (h * h);
    CHECK(second == doctest::Approx(2.0).epsilon(1e-7));
  }

  // logistic on [-B, B] x {-1, 1}: curvature at least the conservative bound
  // e^{-B}/(1+e^{B})^2; the shipped constant is the exact minimum
  // sigmoid(B) sigmoid(-B), which dominates it.
  const double b = 2.0;
  const auto logistic = l::LossSpec::make(l::Kind::kLogistic, b, 1.0);
  const double mu_loose = std::exp(-b) / ((1.0 + std::exp(b)) * (1.0 + std::exp(b)));
  const double mu_exact = 1.0 / (2.0 + std::exp(b) + std::exp(-b));
  CHECK(logistic.strong_convexity() == doctest::Approx(mu_exact).epsilon(1e-12));
  CHECK(logistic.strong_convexity() >= mu_loose);
  for (double v : {-1.0, 1.0})
    for (int i = 0; i <= 40; ++i) {
      const double u = (-b + 2.0 * b * i / 40.0) * 0.99;
      const double second =
          (l::value(logistic, u + h, v) - 2.0 * l::value(logistic, u, v) + l::value(logistic, u - h, v)) /
          (h * h);
      CHECK(second >= mu_loose - 1e-6);
      CHECK(second >= logistic.strong_convexity() - 1e-6);
    }

  // Cauchy and Welsch keep positive curvature only on their mandated domains
  for (auto kind : {l::Kind::kCauchy, l::Kind::kWelsch}) {
    const auto spec = l::LossSpec::make(kind);
    CHECK(spec.strong_convexity() > 0.0);
    std::mt19937_64 rng(11);
    const double lim = spec.domain_halfwidth - 2.0 * h;
    for (int trial = 0; trial < 100; ++trial) {
      const double u = std::uniform_real_distribution<double>(-lim, lim)(rng);
      const double v = random_label(kind, rng);
      const double second =
          (l::value(spec, u + h, v) - 2.0 * l::value(spec, u, v) + l::value(spec, u - h, v)) / (h * h);
      CHECK(second >= spec.strong_convexity() - 1e-5);
    }
  }
}

TEST_CASE("domain enforcement") {
  const auto cauchy = l::LossSpec::make(l::Kind::kCauchy);
  CHECK(cauchy.domain_halfwidth == 0.5);
  CHECK_THROWS_AS(l::value(cauchy, 0.51, 0.0), std::domain_error);
  CHECK_THROWS_AS(l::derivative(cauchy, -0.51, 0.0), std::domain_error);
  CHECK_NOTHROW(l::value(cauchy, 0.5, 0.0));

  const auto welsch = l::LossSpec::make(l::Kind::kWelsch);
  CHECK(welsch.domain_halfwidth == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(l::value(welsch, 0.34, 0.0), std::domain_error);
  CHECK_THROWS_AS(l::derivative(welsch, 0.34, 0.0), std::domain_error);

  // the mandated defaults cannot be widened
  CHECK_THROWS_AS(l::LossSpec::make(l::Kind::kCauchy, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(l::LossSpec::make(l::Kind::kWelsch, 0.5), std::invalid_argument);

  const auto l2 = l::LossSpec::make(l::Kind::kLeastSquares, 2.0);
  CHECK_THROWS_AS(l::value(l2, 2.5, 0.0), std::domain_error);
}

TEST_CASE("label enforcement") {
  const auto logistic = l::LossSpec::make(l::Kind::kLogistic);
  CHECK_THROWS_AS(l::value(logistic, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(l::derivative(logistic, 0.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(l::value(logistic, 0.0, -1.0));

  const auto poisson = l::LossSpec::make(l::Kind::kPoisson);
  CHECK_THROWS_AS(l::value(poisson, 0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(l::value(poisson, 0.0, 1.5), std::invalid_argument);
  CHECK_NOTHROW(l::value(poisson, 0.0, 3.0));
}

TEST_CASE("nonnegativity on the domain") {
  // every loss except Poisson is nonnegative by construction; Poisson's
  // e^u - uv dips below zero for v >= 3, so it is excluded here
  std::mt19937_64 rng(13);
  for (const auto kind : kAllKinds) {
    if (kind == l::Kind::kPoisson) continue;
    const auto spec = l::LossSpec::make(kind);
    std::uniform_real_distribution<double> du(-spec.domain_halfwidth, spec.domain_halfwidth);
    for (int trial = 0; trial < 200; ++trial)
      CHECK(l::value(spec, du(rng), random_label(kind, rng)) >= 0.0);
  }
}

TEST_CASE("names round-trip") {
  for (const auto kind : kAllKinds) CHECK(l::kind_from_name(l::name(kind)) == kind);
  CHECK_THROWS_AS(l::kind_from_name("hinge"), std::invalid_argument);
}
