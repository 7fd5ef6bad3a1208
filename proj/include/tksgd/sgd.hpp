#pragma once

#include "tksgd/harmonics.hpp"
#include "tksgd/kernel.hpp"
#include "tksgd/loss.hpp"
#include "tksgd/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tksgd::sgd {

/// Hyperparameters of the truncated-kernel learner.
///
/// The truncation exponent theta and step exponent t can be given raw, or
/// derived from the regularity parameter r via theta = 1/(2s(2r+1)) and
/// t = 2r/(2r+1), in which case the log(n+1) step factor defaults on.
struct SgdConfig {
  int d = 2;                        // ambient sphere dimension
  double s = 1.0;                   // capacity parameter, > 1/2
  double theta = 0.2;               // truncation exponent, in (0, 1/2)
  double t = 0.5;                   // step exponent, in [1/2, 1)
  double gamma0 = 1.0;              // base step size
  bool log_factor = false;          // multiply the step by log(n+1)
  double q = 1.0;                   // RKHS ball radius
  double alpha = 0.5;               // suffix-average fraction, in (0, 1]
  loss::LossSpec loss = loss::LossSpec::make(loss::Kind::kLeastSquares);
  std::uint64_t seed = 0;
  kernel::CoefficientSchedule schedule = kernel::CoefficientSchedule::power_of_dim(2, 1.0);

  static SgdConfig from_regularity(int d, double s, double r,
                                   const kernel::CoefficientSchedule& schedule);

  /// Throws std::invalid_argument when any invariant fails.
  void validate() const;
};

/// Smallest k with dim Pi_k^d >= n^theta; non-decreasing in n.  n^theta is
/// formed in floating point and compared >= against the exact integer
/// dimension, so ties resolve to that k.
int truncation_level(const SgdConfig& config, long long n);

/// gamma_0 n^{-t}, times log(n+1) when the log factor is on.
double step_size(const SgdConfig& config, long long n);

/// Work counters for the complexity checks: basis_values counts every
/// Y_{k,j} evaluation, coefficient_updates every coefficient touched by the
/// gradient update.
struct StepCounters {
  long long steps = 0;
  long long basis_values = 0;
  long long coefficient_updates = 0;
};

/// The coefficient-space learner: per sample, extends the truncation degree,
/// evaluates the basis once, takes the stochastic gradient step
/// f_{k,j} <- f_{k,j} - gamma_n * dloss * a_k * Y_{k,j}(x), and projects back
/// onto the RKHS ball.  One logical thread of execution per learner.
class Learner {
 public:
  explicit Learner(SgdConfig config);

  /// One SGD step.  Propagates loss domain errors and off-sphere errors;
  /// the state is unchanged when an error is thrown.
  void step(const Eigen::Ref<const Eigen::VectorXd>& x, double y);

  const model::CoefficientVector& iterate() const { return f_; }
  long long samples_seen() const { return n_; }
  int level() const { return level_; }
  const SgdConfig& config() const { return config_; }
  const StepCounters& counters() const { return counters_; }

 private:
  SgdConfig config_;
  model::CoefficientVector f_;
  harmonics::BasisEvaluator evaluator_;
  std::vector<double> a_;  // cached schedule coefficients for k <= level_
  long long n_ = 0;
  int level_ = 0;
  StepCounters counters_;
};

/// Snapshots taken at one checkpoint: the last iterate f_n and the
/// alpha-suffix average over iterates [ceil((1-alpha) n), n-1].
struct CheckpointResult {
  long long n = 0;
  model::CoefficientVector last;
  model::CoefficientVector suffix;
  double train_seconds = 0.0;  // cumulative time spent in steps
  StepCounters counters;
};

/// A sample source; std::nullopt signals exhaustion.
using SampleFn = std::function<std::optional<std::pair<Eigen::VectorXd, double>>()>;

/// Runs a learner over the stream, emitting deep snapshots at each
/// checkpoint (sorted ascending).  Deterministic given the stream.  Throws
/// std::runtime_error when the stream ends before the final checkpoint; with
/// no checkpoints the stream is drained and nothing is returned.
std::vector<CheckpointResult> run_stream(const SgdConfig& config, const SampleFn& next_sample,
                                         const std::vector<long long>& checkpoints);

}  // namespace tksgd::sgd
