#pragma once

#include "tksgd/baseline.hpp"
#include "tksgd/kernel.hpp"
#include "tksgd/loss.hpp"
#include "tksgd/model.hpp"
#include "tksgd/sgd.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tksgd::bench {

enum class NoiseKind { kNone, kUniform, kGaussian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::kNone;
  double param = 0.0;  // half-width (uniform) or standard deviation (gaussian)
};

enum class LearnerKind {
  kTKernelSgd,
  kBaselineGaussian,
  kBaselineMatern32,
  kBaselineMatern52,
  kBaselineCircle,
};

/// One benchmark run: a data model, a learner, a checkpoint grid, and
/// replication control.  Built from a key-value config file or from the
/// named presets.
struct ExperimentSpec {
  std::string name;  // circle-example1 | circle-example2 | sphere3 | classification
  NoiseModel noise;
  LearnerKind learner = LearnerKind::kTKernelSgd;
  sgd::SgdConfig config;  // carries d, loss, alpha, seed for every learner
  double baseline_gamma0 = 0.1;
  double baseline_t = 0.0;  // baseline step is gamma0 * n^{-t}
  kernel::BaselineKernel baseline_kernel;
  std::vector<long long> checkpoints;
  int replications = 1;
  std::uint64_t seed = 1;

  model::CoefficientVector target;  // regression experiments only
  int feature_dim = 0;              // classification: inputs live in [0,1]^feature_dim

  void validate() const;
};

struct ErrorRecord {
  std::string experiment;
  int replication = 0;
  std::string estimator;  // last | suffix | polyak
  long long n = 0;
  std::string metric;  // l2_sq | risk_gap | accuracy
  double value = 0.0;
  double wall_time_s = 0.0;
};

/// The optimal circle fits: example 1 is (1/2) B_4(theta/2pi), example 2 is
/// (1/5) B_2(theta/2pi), expanded over {sqrt(2) cos(k theta)} with
/// coefficients decaying like k^{-4} and k^{-2}.  The expansion is truncated
/// where the tail energy falls below 1e-12 of the total (degree 40 for
/// example 1, near 7000 for example 2).
model::CoefficientVector make_target_circle(int example);

/// The S^2 fit: every harmonic of degree k <= 10 weighted
/// (1/5) (dim Pi_k^3)^{-2.501}.
model::CoefficientVector make_target_sphere3();

/// Pointwise value of a circle target (closed Bernoulli form, exact).
double circle_target_value(int example, double theta);

/// Runs the configured regression experiment over all replications
/// (replications execute on worker threads; rows come back sorted by
/// (replication, n)).  Emits l2_sq for both estimators, plus risk_gap for
/// the truncated-kernel learner.
std::vector<ErrorRecord> run_experiment(const ExperimentSpec& spec);

/// Synthetic binary classification: x uniform in [0,1]^d, y = sign(g(x))
/// flipped with probability 0.1 for a fixed linear g, inputs lifted to
/// S^d by the inverse spherical-polar map for the truncated-kernel learner.
/// Trains both that learner (logistic loss) and the Gaussian-kernel
/// baseline on the raw features; reports held-out accuracy.
std::vector<ErrorRecord> classification_experiment(const ExperimentSpec& spec);

/// Probability that a classification label is flipped.
inline constexpr double kLabelFlipProbability = 0.1;

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

/// Least-squares fit of log(mean value) against log(n) over checkpoints in
/// [n_min, n_max], replications averaged per checkpoint first.  Requires at
/// least 4 checkpoints in range, else throws std::invalid_argument.
SlopeFit fit_slope(const std::vector<ErrorRecord>& records, double n_min, double n_max,
                   const std::string& estimator, const std::string& metric);

/// Distinct (estimator, metric) pairs present in the records.
std::vector<std::pair<std::string, std::string>> record_groups(const std::vector<ErrorRecord>& records);

inline constexpr const char* kCsvHeader = "experiment,replication,estimator,n,metric,value,wall_time_s";

void write_csv(const std::string& path, const std::vector<ErrorRecord>& records);
std::vector<ErrorRecord> read_csv(const std::string& path);

/// Sidecar file `<basename>.meta.json` with seed, config echo, RNG name and
/// the git description of the source tree.
void write_metadata(const std::string& csv_path, const ExperimentSpec& spec,
                    const std::map<std::string, std::string>& raw_config);

/// Key-value config format: one `key = value` per line, `#` comments.
/// Recognized keys: experiment, d, s, r, theta, t, gamma0, log_factor, Q,
/// alpha, loss, noise, replications, checkpoints, seed, learner.
std::map<std::string, std::string> parse_config(std::istream& in);
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Builds the experiment from parsed keys; unset keys fall back to the
/// experiment's preset defaults.  Throws std::invalid_argument on unknown
/// keys or inconsistent values.
ExperimentSpec build_experiment(const std::map<std::string, std::string>& kv);

}  // namespace tksgd::bench
