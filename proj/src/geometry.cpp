#include "tksgd/geometry.hpp"

#include <stdexcept>

namespace tksgd::geometry {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replication) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32)};
  std::mt19937_64 rng;
  rng.seed(seq);
  return rng;
}

SphereSampler::SphereSampler(int d, std::uint64_t seed, std::uint64_t replication) : d_(d) {
  if (d < 1) throw std::invalid_argument("SphereSampler: dimension must be >= 1");
  rng_ = substream(seed, replication);
}

Eigen::VectorXd SphereSampler::operator()() {
  Eigen::VectorXd x(d_);
  while (true) {
    for (int i = 0; i < d_; ++i) x[i] = normal_(rng_);
    const double norm = x.norm();
    if (norm > 1e-8) return x / norm;
  }
}

Eigen::VectorXd inverse_polar(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (!x.allFinite()) throw std::invalid_argument("inverse_polar: input must be finite");
  const double norm_sq = x.squaredNorm();
  Eigen::VectorXd out(x.size() + 1);
  out.head(x.size()) = 4.0 * x;
  out[x.size()] = 4.0 - norm_sq;
  out /= 4.0 + norm_sq;
  return out;
}

}  // namespace tksgd::geometry
