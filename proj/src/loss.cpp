#include "tksgd/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace tksgd::loss {

namespace {

void check_domain(const LossSpec& spec, double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v))
    throw std::invalid_argument("loss: non-finite argument");
  if (std::abs(u) > spec.domain_halfwidth)
    throw std::domain_error("loss: |u| exceeds the domain half-width B");
  switch (spec.kind) {
    case Kind::kLogistic:
      if (v != 1.0 && v != -1.0) throw std::invalid_argument("loss: logistic label must be -1 or 1");
      break;
    case Kind::kPoisson:
      if (v < 0.0 || v != std::floor(v))
        throw std::invalid_argument("loss: Poisson label must be a non-negative integer");
      break;
    default:
      break;
  }
}

double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

}  // namespace

LossSpec LossSpec::make(Kind kind) {
  switch (kind) {
    case Kind::kCauchy:
      return LossSpec{kind, 0.5, 0.5};
    case Kind::kWelsch:
      return LossSpec{kind, 1.0 / 3.0, 1.0 / 3.0};
    default:
      return LossSpec{kind, 10.0, 10.0};
  }
}

LossSpec LossSpec::make(Kind kind, double domain_halfwidth, double label_halfwidth) {
  if (domain_halfwidth <= 0.0) throw std::invalid_argument("LossSpec: B must be positive");
  if (kind == Kind::kCauchy && domain_halfwidth > 0.5)
    throw std::invalid_argument("LossSpec: Cauchy loss requires B <= 1/2");
  if (kind == Kind::kWelsch && domain_halfwidth > 1.0 / 3.0)
    throw std::invalid_argument("LossSpec: Welsch loss requires B <= 1/3");
  return LossSpec{kind, domain_halfwidth, label_halfwidth};
}

double value(const LossSpec& spec, double u, double v) {
  check_domain(spec, u, v);
  const double t = u - v;
  switch (spec.kind) {
    case Kind::kLeastSquares:
      return t * t;
    case Kind::kLogistic: {
      const double z = -v * u;
      return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    case Kind::kPoisson:
      return std::exp(u) - u * v;
    case Kind::kHuberSqrt:
      return std::sqrt(t * t + 1.0) - 1.0;
    case Kind::kHuberLogCosh:
      return log_cosh(v - u);
    case Kind::kCauchy:
      return std::log1p(0.5 * t * t);
    case Kind::kWelsch:
      return 1.0 - std::exp(-0.5 * t * t);
  }
  throw std::logic_error("loss: unknown kind");
}

double derivative(const LossSpec& spec, double u, double v) {
  check_domain(spec, u, v);
  const double t = u - v;
  switch (spec.kind) {
    case Kind::kLeastSquares:
      return 2.0 * t;
    case Kind::kLogistic: {
      // -v * sigmoid(-vu); the guarded form never overflows.
      const double z = v * u;
      if (z > 0.0) {
        const double e = std::exp(-z);
        return -v * e / (1.0 + e);
      }
      return -v / (1.0 + std::exp(z));
    }
    case Kind::kPoisson:
      return std::exp(u) - v;
    case Kind::kHuberSqrt:
      return -(v - u) / std::sqrt((v - u) * (v - u) + 1.0);
    case Kind::kHuberLogCosh:
      return -std::tanh(v - u);
    case Kind::kCauchy:
      return t / (1.0 + 0.5 * t * t);
    case Kind::kWelsch:
      return t * std::exp(-0.5 * t * t);
  }
  throw std::logic_error("loss: unknown kind");
}

double LossSpec::derivative_bound() const {
  const double b = domain_halfwidth, by = label_halfwidth;
  const double w = b + by;  // largest |u - v| on the domain
  switch (kind) {
    case Kind::kLeastSquares:
      return 2.0 * w;
    case Kind::kLogistic:
      return 1.0;
    case Kind::kPoisson:
      return std::exp(b) + by;
    case Kind::kHuberSqrt:
    case Kind::kHuberLogCosh:
      return 1.0;
    case Kind::kCauchy:
      // |t|/(1 + t^2/2) peaks at t = sqrt(2)
      return w >= std::sqrt(2.0) ? 1.0 / std::sqrt(2.0) : w / (1.0 + 0.5 * w * w);
    case Kind::kWelsch:
      return w >= 1.0 ? std::exp(-0.5) : w * std::exp(-0.5 * w * w);
  }
  throw std::logic_error("loss: unknown kind");
}

double LossSpec::smoothness() const {
  switch (kind) {
    case Kind::kLeastSquares:
      return 2.0;
    case Kind::kLogistic:
      return 0.25;
    case Kind::kPoisson:
      return std::exp(domain_halfwidth);
    case Kind::kHuberSqrt:
    case Kind::kHuberLogCosh:
    case Kind::kCauchy:
    case Kind::kWelsch:
      return 1.0;  // second derivative peaks at t = 0 with value 1
  }
  throw std::logic_error("loss: unknown kind");
}

double LossSpec::strong_convexity() const {
  const double b = domain_halfwidth;
  const double w = b + label_halfwidth;
  switch (kind) {
    case Kind::kLeastSquares:
      return 2.0;
    case Kind::kLogistic:
      // exact curvature minimum on [-B, B]: sigmoid(B) sigmoid(-B)
      return 1.0 / (2.0 + std::exp(b) + std::exp(-b));
    case Kind::kPoisson:
      return std::exp(-b);
    case Kind::kHuberSqrt:
      return std::pow(1.0 + w * w, -1.5);
    case Kind::kHuberLogCosh: {
      const double c = std::cosh(w);
      return 1.0 / (c * c);
    }
    case Kind::kCauchy: {
      // (1 - t^2/2)/(1 + t^2/2)^2 at |t| <= w <= 1
      const double d = 1.0 + 0.5 * w * w;
      return (1.0 - 0.5 * w * w) / (d * d);
    }
    case Kind::kWelsch:
      return (1.0 - w * w) * std::exp(-0.5 * w * w);
  }
  throw std::logic_error("loss: unknown kind");
}

Kind kind_from_name(std::string_view n) {
  if (n == "l2") return Kind::kLeastSquares;
  if (n == "logistic") return Kind::kLogistic;
  if (n == "poisson") return Kind::kPoisson;
  if (n == "huber_sqrt") return Kind::kHuberSqrt;
  if (n == "huber_logcosh") return Kind::kHuberLogCosh;
  if (n == "cauchy") return Kind::kCauchy;
  if (n == "welsch") return Kind::kWelsch;
  throw std::invalid_argument("loss: unknown loss name '" + std::string(n) + "'");
}

std::string_view name(Kind kind) {
  switch (kind) {
    case Kind::kLeastSquares:
      return "l2";
    case Kind::kLogistic:
      return "logistic";
    case Kind::kPoisson:
      return "poisson";
    case Kind::kHuberSqrt:
      return "huber_sqrt";
    case Kind::kHuberLogCosh:
      return "huber_logcosh";
    case Kind::kCauchy:
      return "cauchy";
    case Kind::kWelsch:
      return "welsch";
  }
  throw std::logic_error("loss: unknown kind");
}

}  // namespace tksgd::loss
