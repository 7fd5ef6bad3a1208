#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace tksgd::geometry {

/// Name of the generator recorded in run metadata for reproducibility.
inline constexpr const char* kRngName = "mt19937_64/seed_seq(seed,replication)";

/// Uniform sampler on S^{d-1}: a d-dimensional standard Gaussian draw,
/// normalized (redrawn in the measure-zero event of a tiny norm).  Each
/// replication owns its own substream derived from (seed, replication).
class SphereSampler {
 public:
  SphereSampler(int d, std::uint64_t seed, std::uint64_t replication = 0);

  Eigen::VectorXd operator()();

  /// The underlying stream, shared with noise draws of the same replication.
  std::mt19937_64& rng() { return rng_; }

  int dimension() const { return d_; }

 private:
  int d_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// A fresh engine on the (seed, replication) substream, for non-sphere draws
/// (noise, labels) that must stay reproducible per replication.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replication);

/// Inverse spherical-polar projection R^d -> S^d:
///   x -> (4 x_1, ..., 4 x_d, 4 - |x|^2) / (4 + |x|^2).
/// The output is a unit vector by the identity
/// (4|x|)^2 + (4 - |x|^2)^2 = (4 + |x|^2)^2.
Eigen::VectorXd inverse_polar(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace tksgd::geometry
