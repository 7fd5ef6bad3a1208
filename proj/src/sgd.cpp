#include "tksgd/sgd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tksgd::sgd {

SgdConfig SgdConfig::from_regularity(int d, double s, double r,
                                     const kernel::CoefficientSchedule& schedule) {
  if (r < 0.5) throw std::invalid_argument("SgdConfig: regularity r must be >= 1/2");
  SgdConfig config;
  config.d = d;
  config.s = s;
  config.theta = 1.0 / (2.0 * s * (2.0 * r + 1.0));
  config.t = 2.0 * r / (2.0 * r + 1.0);
  config.log_factor = true;
  config.schedule = schedule;
  return config;
}

void SgdConfig::validate() const {
  if (d < 2) throw std::invalid_argument("SgdConfig: d must be >= 2");
  if (s <= 0.5) throw std::invalid_argument("SgdConfig: s must exceed 1/2");
  if (!(theta > 0.0 && theta < 0.5)) throw std::invalid_argument("SgdConfig: theta must be in (0, 1/2)");
  if (!(t >= 0.5 && t < 1.0)) throw std::invalid_argument("SgdConfig: t must be in [1/2, 1)");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("SgdConfig: gamma0 must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("SgdConfig: Q must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("SgdConfig: alpha must be in (0, 1]");
  if (schedule.d != d) throw std::invalid_argument("SgdConfig: schedule dimension mismatch");
}

int truncation_level(const SgdConfig& config, long long n) {
  if (n < 1) throw std::invalid_argument("truncation_level: n must be >= 1");
  const double threshold = std::pow(static_cast<double>(n), config.theta);
  int k = 0;
  while (static_cast<double>(harmonics::dim_pi(config.d, k)) < threshold) ++k;
  return k;
}

double step_size(const SgdConfig& config, long long n) {
  if (n < 1) throw std::invalid_argument("step_size: n must be >= 1");
  double gamma = config.gamma0 * std::pow(static_cast<double>(n), -config.t);
  if (config.log_factor) gamma *= std::log(static_cast<double>(n) + 1.0);
  return gamma;
}

Learner::Learner(SgdConfig config)
    : config_(std::move(config)),
      f_(model::CoefficientVector::zero(config_.schedule, 0)),
      evaluator_(config_.d) {
  config_.validate();
  a_.push_back(1.0);
}

void Learner::step(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
  const long long n = n_ + 1;
  const int level = truncation_level(config_, n);
  const auto basis = evaluator_.eval(x, level);  // throws before any state change

  // Prediction uses the previous iterate; its new blocks are zero, so
  // evaluating within the grown basis leaves the value unchanged.
  const double prediction = model::evaluate(f_, basis);
  const double g = loss::derivative(config_.loss, prediction, y);

  if (level > level_) {
    f_.extend_to_degree(level);
    for (int k = level_ + 1; k <= level; ++k)
      a_.push_back(kernel::coefficient(config_.schedule, k));
    level_ = level;
  }
  n_ = n;

  const double gamma = step_size(config_, n);
  for (int k = 0; k <= level_; ++k)
    f_.blocks[k] -= (gamma * g * a_[k]) * basis.degree_blocks[k];
  model::project_to_ball_in_place(f_, config_.q);

  ++counters_.steps;
  const long long dim = f_.coefficient_count();
  counters_.basis_values += dim;
  counters_.coefficient_updates += dim;
}

std::vector<CheckpointResult> run_stream(const SgdConfig& config, const SampleFn& next_sample,
                                         const std::vector<long long>& checkpoints) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw std::invalid_argument("run_stream: checkpoints must be sorted ascending");

  Learner learner(config);
  std::vector<model::SuffixAverager> averagers;
  averagers.reserve(checkpoints.size());
  for (long long n : checkpoints)
    averagers.emplace_back(config.alpha, n, config.schedule);
  for (auto& avg : averagers) avg.offer(learner.iterate(), 0);

  std::vector<CheckpointResult> results;
  results.reserve(checkpoints.size());
  size_t next_checkpoint = 0;
  double train_seconds = 0.0;

  long long n = 0;
  while (checkpoints.empty() || next_checkpoint < checkpoints.size()) {
    const auto sample = next_sample();
    if (!sample) {
      if (next_checkpoint < checkpoints.size())
        throw std::runtime_error("run_stream: stream exhausted before final checkpoint");
      break;
    }
    ++n;
    const auto start = std::chrono::steady_clock::now();
    learner.step(sample->first, sample->second);
    train_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& avg : averagers)
      if (!avg.complete()) avg.offer(learner.iterate(), n);
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] == n) {
      CheckpointResult result;
      result.n = n;
      result.last = learner.iterate();
      result.suffix = averagers[next_checkpoint].average();
      result.train_seconds = train_seconds;
      result.counters = learner.counters();
      results.push_back(std::move(result));
      ++next_checkpoint;
    }
  }
  return results;
}

}  // namespace tksgd::sgd
