#include "tksgd/bench.hpp"

#include "tksgd/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tksgd::bench {

namespace {

constexpr int kRiskTestPoints = 4096;
constexpr int kCircleQuadraturePoints = 256;
constexpr int kSphereQuadraturePoints = 512;
constexpr int kClassificationTestPoints = 2000;

// Substream tags: training draws use the replication index itself, held-out
// draws a disjoint tag, so enlarging the test set never shifts training data.
std::uint64_t test_stream(int replication) { return (1ull << 32) + static_cast<std::uint64_t>(replication); }
std::uint64_t quad_stream(int replication) { return (2ull << 32) + static_cast<std::uint64_t>(replication); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

long long parse_count(const std::string& token) {
  const auto caret = token.find('^');
  if (caret != std::string::npos) {
    const long long base = std::stoll(trim(token.substr(0, caret)));
    const long long exp = std::stoll(trim(token.substr(caret + 1)));
    long long v = 1;
    for (long long i = 0; i < exp; ++i) v *= base;
    return v;
  }
  return std::stoll(trim(token));
}

std::vector<long long> parse_checkpoints(const std::string& text) {
  std::vector<long long> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const long long lo = parse_count(text.substr(0, dots));
    const long long hi = parse_count(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw std::invalid_argument("checkpoints: bad range");
    for (long long n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(parse_count(token));
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "'");
}

NoiseModel parse_noise(const std::string& v) {
  if (v == "none") return {NoiseKind::kNone, 0.0};
  const auto colon = v.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("config: noise must be none|uniform:a|gaussian:sigma");
  const std::string kind = v.substr(0, colon);
  const double param = std::stod(v.substr(colon + 1));
  if (kind == "uniform") return {NoiseKind::kUniform, param};
  if (kind == "gaussian") return {NoiseKind::kGaussian, param};
  throw std::invalid_argument("config: unknown noise kind '" + kind + "'");
}

LearnerKind parse_learner(const std::string& v) {
  if (v == "tksgd") return LearnerKind::kTKernelSgd;
  if (v == "baseline-gaussian") return LearnerKind::kBaselineGaussian;
  if (v == "baseline-matern32") return LearnerKind::kBaselineMatern32;
  if (v == "baseline-matern52") return LearnerKind::kBaselineMatern52;
  if (v == "baseline-circle") return LearnerKind::kBaselineCircle;
  throw std::invalid_argument("config: unknown learner '" + v + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string git_describe() {
  FILE* pipe = ::popen("git describe --tags --always --dirty 2>/dev/null", "r");
  if (!pipe) return "unknown";
  char buf[256];
  std::string out;
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  ::pclose(pipe);
  out = trim(out);
  return out.empty() ? "unknown" : out;
}

double draw_noise(const NoiseModel& noise, std::mt19937_64& rng) {
  switch (noise.kind) {
    case NoiseKind::kNone:
      return 0.0;
    case NoiseKind::kUniform:
      return std::uniform_real_distribution<double>(-noise.param, noise.param)(rng);
    case NoiseKind::kGaussian:
      return std::normal_distribution<double>(0.0, noise.param)(rng);
  }
  return 0.0;
}

bool is_circle_experiment(const std::string& name) {
  return name == "circle-example1" || name == "circle-example2";
}

int circle_example_of(const std::string& name) { return name == "circle-example1" ? 1 : 2; }

// Target value at a sphere point, shared by stream generation and metrics.
class TargetEvaluator {
 public:
  TargetEvaluator(const ExperimentSpec& spec)
      : circle_(is_circle_experiment(spec.name)),
        example_(circle_ ? circle_example_of(spec.name) : 0),
        target_(&spec.target),
        evaluator_(spec.config.d) {
    if (!circle_) evaluator_.ensure_degree(std::max(0, spec.target.max_degree()));
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (circle_) return circle_target_value(example_, std::atan2(x[1], x[0]));
    return model::evaluate(*target_, evaluator_.eval(x, target_->max_degree()));
  }

 private:
  bool circle_;
  int example_;
  const model::CoefficientVector* target_;
  harmonics::BasisEvaluator evaluator_;
};

// Fixed quadrature nodes for function-space learners: exact trapezoid on the
// circle, Monte Carlo on higher spheres.
std::vector<Eigen::VectorXd> quadrature_nodes(const ExperimentSpec& spec, int replication) {
  std::vector<Eigen::VectorXd> nodes;
  if (spec.config.d == 2) {
    nodes.reserve(kCircleQuadraturePoints);
    for (int i = 0; i < kCircleQuadraturePoints; ++i) {
      const double theta = 2.0 * M_PI * i / kCircleQuadraturePoints;
      nodes.push_back(Eigen::Vector2d(std::cos(theta), std::sin(theta)));
    }
  } else {
    geometry::SphereSampler sampler(spec.config.d, spec.seed, quad_stream(replication));
    nodes.reserve(kSphereQuadraturePoints);
    for (int i = 0; i < kSphereQuadraturePoints; ++i) nodes.push_back(sampler());
  }
  return nodes;
}

struct RiskTestSet {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> labels;
  std::vector<double> target_values;
};

RiskTestSet make_risk_test_set(const ExperimentSpec& spec, int replication, TargetEvaluator& target) {
  RiskTestSet set;
  geometry::SphereSampler sampler(spec.config.d, spec.seed, test_stream(replication));
  set.points.reserve(kRiskTestPoints);
  for (int i = 0; i < kRiskTestPoints; ++i) {
    Eigen::VectorXd x = sampler();
    const double f = target(x);
    set.points.push_back(std::move(x));
    set.target_values.push_back(f);
    set.labels.push_back(f + draw_noise(spec.noise, sampler.rng()));
  }
  return set;
}

double mean_risk(const loss::LossSpec& spec, const std::vector<double>& predictions,
                 const std::vector<double>& labels) {
  double sum = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) sum += loss::value(spec, predictions[i], labels[i]);
  return sum / static_cast<double>(labels.size());
}

std::vector<ErrorRecord> run_regression_replication(const ExperimentSpec& spec, int replication) {
  std::vector<ErrorRecord> rows;
  TargetEvaluator target(spec);
  geometry::SphereSampler sampler(spec.config.d, spec.seed, static_cast<std::uint64_t>(replication));
  auto stream = [&]() -> std::optional<std::pair<Eigen::VectorXd, double>> {
    Eigen::VectorXd x = sampler();
    const double y = target(x) + draw_noise(spec.noise, sampler.rng());
    return std::make_pair(std::move(x), y);
  };

  if (spec.learner == LearnerKind::kTKernelSgd) {
    const auto checkpoints = sgd::run_stream(spec.config, stream, spec.checkpoints);
    RiskTestSet test = make_risk_test_set(spec, replication, target);
    const double target_risk = mean_risk(spec.config.loss, test.target_values, test.labels);
    harmonics::BasisEvaluator evaluator(spec.config.d);
    for (const auto& cp : checkpoints) {
      for (const char* estimator : {"last", "suffix"}) {
        const model::CoefficientVector& f =
            std::string_view(estimator) == "last" ? cp.last : cp.suffix;
        rows.push_back({spec.name, replication, estimator, cp.n, "l2_sq",
                        model::l2_distance_sq(f, spec.target), cp.train_seconds});
        std::vector<double> predictions(test.points.size());
        for (size_t i = 0; i < test.points.size(); ++i)
          predictions[i] = model::evaluate(f, evaluator.eval(test.points[i], f.max_degree()));
        rows.push_back({spec.name, replication, estimator, cp.n, "risk_gap",
                        mean_risk(spec.config.loss, predictions, test.labels) - target_risk,
                        cp.train_seconds});
      }
    }
    return rows;
  }

  // Function-space baseline: quadrature against the target on fixed nodes.
  baseline::SupportExpansion learner(spec.baseline_kernel, spec.config.loss);
  const auto nodes = quadrature_nodes(spec, replication);
  std::vector<double> node_targets(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) node_targets[i] = target(nodes[i]);

  double train_seconds = 0.0;
  size_t next_cp = 0;
  for (long long n = 1; next_cp < spec.checkpoints.size(); ++n) {
    const auto sample = *stream();
    const double gamma = spec.baseline_gamma0 * std::pow(static_cast<double>(n), -spec.baseline_t);
    const auto start = std::chrono::steady_clock::now();
    learner.step(sample.first, sample.second, gamma);
    train_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    while (next_cp < spec.checkpoints.size() && spec.checkpoints[next_cp] == n) {
      double err_last = 0.0, err_polyak = 0.0;
      for (size_t i = 0; i < nodes.size(); ++i) {
        const double dl = learner.predict(nodes[i]) - node_targets[i];
        const double dp = learner.predict_polyak(nodes[i]) - node_targets[i];
        err_last += dl * dl;
        err_polyak += dp * dp;
      }
      err_last /= static_cast<double>(nodes.size());
      err_polyak /= static_cast<double>(nodes.size());
      rows.push_back({spec.name, replication, "last", n, "l2_sq", err_last, train_seconds});
      rows.push_back({spec.name, replication, "polyak", n, "l2_sq", err_polyak, train_seconds});
      ++next_cp;
    }
  }
  return rows;
}

// Fixed separating direction for the synthetic classification stream.
double classification_score(const Eigen::Ref<const Eigen::VectorXd>& x) {
  double g = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double c = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + i % 3);
    g += c * (x[i] - 0.5);
  }
  return g;
}

struct LabelledPoint {
  Eigen::VectorXd x;  // raw features in [0,1]^d
  Eigen::VectorXd z;  // lifted to S^d
  double y;
};

LabelledPoint draw_classification_point(int feature_dim, std::mt19937_64& rng, bool flip_labels) {
  LabelledPoint p;
  p.x.resize(feature_dim);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < feature_dim; ++i) p.x[i] = unit(rng);
  p.y = classification_score(p.x) >= 0.0 ? 1.0 : -1.0;
  if (flip_labels && unit(rng) < kLabelFlipProbability) p.y = -p.y;
  p.z = geometry::inverse_polar(p.x);
  return p;
}

std::vector<ErrorRecord> run_classification_replication(const ExperimentSpec& spec, int replication) {
  std::vector<ErrorRecord> rows;
  const bool flips = spec.noise.kind != NoiseKind::kNone;

  std::mt19937_64 test_rng = geometry::substream(spec.seed, test_stream(replication));
  std::vector<LabelledPoint> test;
  test.reserve(kClassificationTestPoints);
  for (int i = 0; i < kClassificationTestPoints; ++i)
    test.push_back(draw_classification_point(spec.feature_dim, test_rng, flips));

  auto accuracy = [&](auto&& predict) {
    int correct = 0;
    for (const auto& p : test) {
      const double value = predict(p);
      if ((value >= 0.0 ? 1.0 : -1.0) == p.y) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
  };

  // Truncated-kernel learner on the lifted points.
  {
    std::mt19937_64 rng = geometry::substream(spec.seed, static_cast<std::uint64_t>(replication));
    auto stream = [&]() -> std::optional<std::pair<Eigen::VectorXd, double>> {
      LabelledPoint p = draw_classification_point(spec.feature_dim, rng, flips);
      return std::make_pair(std::move(p.z), p.y);
    };
    const auto checkpoints = sgd::run_stream(spec.config, stream, spec.checkpoints);
    harmonics::BasisEvaluator evaluator(spec.config.d);
    for (const auto& cp : checkpoints) {
      for (const char* estimator : {"last", "suffix"}) {
        const model::CoefficientVector& f =
            std::string_view(estimator) == "last" ? cp.last : cp.suffix;
        const double acc = accuracy([&](const LabelledPoint& p) {
          return model::evaluate(f, evaluator.eval(p.z, f.max_degree()));
        });
        rows.push_back({spec.name, replication, estimator, cp.n, "accuracy", acc, cp.train_seconds});
      }
    }
  }

  // Gaussian-kernel baseline on the raw features; rows are tagged with a
  // "-baseline-gaussian" suffix so the two learners stay distinguishable.
  {
    const std::string tag = spec.name + "-baseline-gaussian";
    std::mt19937_64 rng = geometry::substream(spec.seed, static_cast<std::uint64_t>(replication));
    baseline::SupportExpansion learner(spec.baseline_kernel, spec.config.loss);
    double train_seconds = 0.0;
    size_t next_cp = 0;
    for (long long n = 1; next_cp < spec.checkpoints.size(); ++n) {
      LabelledPoint p = draw_classification_point(spec.feature_dim, rng, flips);
      const double gamma = spec.baseline_gamma0 * std::pow(static_cast<double>(n), -spec.baseline_t);
      const auto start = std::chrono::steady_clock::now();
      learner.step(p.x, p.y, gamma);
      train_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      while (next_cp < spec.checkpoints.size() && spec.checkpoints[next_cp] == n) {
        rows.push_back({tag, replication, "last", n, "accuracy",
                        accuracy([&](const LabelledPoint& q) { return learner.predict(q.x); }),
                        train_seconds});
        rows.push_back({tag, replication, "polyak", n, "accuracy",
                        accuracy([&](const LabelledPoint& q) { return learner.predict_polyak(q.x); }),
                        train_seconds});
        ++next_cp;
      }
    }
  }
  return rows;
}

std::vector<ErrorRecord> run_replicated(const ExperimentSpec& spec,
                                        std::vector<ErrorRecord> (*runner)(const ExperimentSpec&, int)) {
  spec.validate();
  std::vector<std::vector<ErrorRecord>> outputs(spec.replications);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    while (true) {
      const int rep = next.fetch_add(1);
      if (rep >= spec.replications) return;
      try {
        outputs[rep] = runner(spec, rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), spec.replications));
  std::vector<std::thread> threads;
  for (unsigned i = 0; i < workers; ++i) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<ErrorRecord> rows;
  for (auto& out : outputs)
    for (auto& row : out) rows.push_back(std::move(row));
  std::stable_sort(rows.begin(), rows.end(), [](const ErrorRecord& a, const ErrorRecord& b) {
    if (a.replication != b.replication) return a.replication < b.replication;
    return a.n < b.n;
  });
  return rows;
}

}  // namespace

void ExperimentSpec::validate() const {
  for (size_t i = 0; i + 1 < checkpoints.size(); ++i)
    if (checkpoints[i] >= checkpoints[i + 1])
      throw std::invalid_argument("ExperimentSpec: checkpoints must be strictly increasing");
  if (!checkpoints.empty() && checkpoints.front() < 1)
    throw std::invalid_argument("ExperimentSpec: checkpoints must be >= 1");
  if (replications < 1) throw std::invalid_argument("ExperimentSpec: replications must be >= 1");
  if (name == "classification") {
    if (feature_dim < 1 || feature_dim > 50)
      throw std::invalid_argument("ExperimentSpec: classification feature dimension must be in [1, 50]");
    if (config.loss.kind != loss::Kind::kLogistic)
      throw std::invalid_argument("ExperimentSpec: classification requires the logistic loss");
    config.validate();
    return;
  }
  switch (config.loss.kind) {
    case loss::Kind::kLogistic:
    case loss::Kind::kPoisson:
      throw std::invalid_argument("ExperimentSpec: regression experiments need a real-label loss");
    default:
      break;
  }
  if (target.blocks.empty()) throw std::invalid_argument("ExperimentSpec: regression target is empty");
  if (learner == LearnerKind::kTKernelSgd) config.validate();
  if (learner == LearnerKind::kBaselineCircle && config.d != 2)
    throw std::invalid_argument("ExperimentSpec: circle baseline kernel needs d = 2");
}

double circle_target_value(int example, double theta) {
  if (example == 1) return 0.5 * kernel::bernoulli_poly(4, theta / (2.0 * M_PI) - std::floor(theta / (2.0 * M_PI)));
  if (example == 2) return 0.2 * kernel::bernoulli_poly(2, theta / (2.0 * M_PI) - std::floor(theta / (2.0 * M_PI)));
  throw std::invalid_argument("circle_target_value: example must be 1 or 2");
}

model::CoefficientVector make_target_circle(int example) {
  if (example != 1 && example != 2) throw std::invalid_argument("make_target_circle: example must be 1 or 2");
  const int sb = example == 1 ? 2 : 1;  // Bernoulli order 2*sb
  const double scale = example == 1 ? 0.5 : 0.2;
  const double sign = sb % 2 == 1 ? 1.0 : -1.0;
  const double fact = sb == 1 ? 2.0 : 24.0;
  // B_{2s}({t/2pi}) = sign * 2 (2s)! / (2pi)^{2s} * sum_k cos(k t)/k^{2s};
  // on the sqrt(2)-normalized cosine basis that is amp * k^{-2s} with:
  const double amp = scale * sign * std::sqrt(2.0) * fact / std::pow(2.0 * M_PI, 2 * sb);

  // Truncate where the tail energy bound amp^2 K^{1-4s}/(4s-1) drops below
  // 1e-12 of the accumulated energy.
  auto schedule = kernel::CoefficientSchedule::circle_paper(1.0);
  model::CoefficientVector target = model::CoefficientVector::zero(schedule, 0);
  double energy = 0.0;
  for (int k = 1;; ++k) {
    const double coeff = amp * std::pow(static_cast<double>(k), -2.0 * sb);
    target.extend_to_degree(k);
    target.blocks[k][0] = coeff;
    energy += coeff * coeff;
    const double tail = amp * amp * std::pow(static_cast<double>(k), 1.0 - 4.0 * sb) / (4.0 * sb - 1.0);
    if (tail <= 1e-12 * energy) break;
  }
  return target;
}

model::CoefficientVector make_target_sphere3() {
  auto schedule = kernel::CoefficientSchedule::power_of_dim(3, 1.0);
  model::CoefficientVector target = model::CoefficientVector::zero(schedule, 10);
  for (int k = 0; k <= 10; ++k) {
    const double dim_pi = static_cast<double>(harmonics::dim_pi(3, k));
    target.blocks[k].setConstant(0.2 * std::pow(dim_pi, -2.501));
  }
  return target;
}

std::vector<ErrorRecord> run_experiment(const ExperimentSpec& spec) {
  if (spec.name == "classification")
    throw std::invalid_argument("run_experiment: use classification_experiment for classification");
  return run_replicated(spec, &run_regression_replication);
}

std::vector<ErrorRecord> classification_experiment(const ExperimentSpec& spec) {
  if (spec.name != "classification")
    throw std::invalid_argument("classification_experiment: spec is not a classification experiment");
  return run_replicated(spec, &run_classification_replication);
}

SlopeFit fit_slope(const std::vector<ErrorRecord>& records, double n_min, double n_max,
                   const std::string& estimator, const std::string& metric) {
  std::map<long long, std::pair<double, int>> sums;
  for (const auto& r : records) {
    if (r.estimator != estimator || r.metric != metric) continue;
    if (static_cast<double>(r.n) < n_min || static_cast<double>(r.n) > n_max) continue;
    auto& slot = sums[r.n];
    slot.first += r.value;
    slot.second += 1;
  }
  if (sums.size() < 4)
    throw std::invalid_argument("fit_slope: need at least 4 checkpoints in range");
  std::vector<double> xs, ys;
  for (const auto& [n, sum] : sums) {
    const double mean = sum.first / sum.second;
    if (!(mean > 0.0)) throw std::invalid_argument("fit_slope: non-positive mean value");
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(mean));
  }
  const auto m = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  double rss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - intercept - slope * xs[i];
    rss += r * r;
  }
  SlopeFit fit;
  fit.slope = slope;
  fit.points = static_cast<int>(xs.size());
  fit.stderr_slope = xs.size() > 2 ? std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
  return fit;
}

std::vector<std::pair<std::string, std::string>> record_groups(const std::vector<ErrorRecord>& records) {
  std::set<std::pair<std::string, std::string>> groups;
  for (const auto& r : records) groups.insert({r.estimator, r.metric});
  return {groups.begin(), groups.end()};
}

void write_csv(const std::string& path, const std::vector<ErrorRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << r.experiment << ',' << r.replication << ',' << r.estimator << ',' << r.n << ',' << r.metric
        << ',' << format_double(r.value) << ',' << format_double(r.wall_time_s) << '\n';
}

std::vector<ErrorRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file");
  if (trim(line) != kCsvHeader) throw std::runtime_error("read_csv: unexpected header");
  std::vector<ErrorRecord> records;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ErrorRecord r;
    std::getline(ss, r.experiment, ',');
    std::getline(ss, field, ',');
    r.replication = std::stoi(field);
    std::getline(ss, r.estimator, ',');
    std::getline(ss, field, ',');
    r.n = std::stoll(field);
    std::getline(ss, r.metric, ',');
    std::getline(ss, field, ',');
    r.value = std::stod(field);
    std::getline(ss, field, ',');
    r.wall_time_s = std::stod(field);
    records.push_back(std::move(r));
  }
  return records;
}

void write_metadata(const std::string& csv_path, const ExperimentSpec& spec,
                    const std::map<std::string, std::string>& raw_config) {
  std::string base = csv_path;
  if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") base.resize(base.size() - 4);
  nlohmann::json meta;
  meta["experiment"] = spec.name;
  meta["seed"] = spec.seed;
  meta["replications"] = spec.replications;
  meta["rng"] = geometry::kRngName;
  meta["git_describe"] = git_describe();
  meta["csv"] = csv_path;
  meta["config"] = raw_config;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["created"] = buf;
  std::ofstream out(base + ".meta.json");
  if (!out) throw std::runtime_error("write_metadata: cannot open sidecar for " + csv_path);
  out << meta.dump(2) << '\n';
}

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_config_file: cannot open " + path);
  return parse_config(in);
}

ExperimentSpec build_experiment(const std::map<std::string, std::string>& kv) {
  static const std::set<std::string> known = {"experiment", "d",     "s",           "r",
                                              "theta",      "t",     "gamma0",      "log_factor",
                                              "Q",          "alpha", "loss",        "noise",
                                              "replications", "checkpoints", "seed", "learner"};
  for (const auto& [key, value] : kv)
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  const std::string* exp_name = get("experiment");
  if (!exp_name) throw std::invalid_argument("config: missing required key 'experiment'");

  ExperimentSpec spec;
  spec.name = *exp_name;

  // Per-experiment presets.
  double preset_r = 0.0;
  if (spec.name == "circle-example1") {
    spec.config.d = 2;
    spec.config.s = 1.0;
    preset_r = 1.75;  // theta = 1/9, t = 7/9
    spec.config.gamma0 = 2.0;
    spec.config.loss = loss::LossSpec::make(loss::Kind::kCauchy);
    spec.noise = {NoiseKind::kUniform, 0.2};
    spec.baseline_kernel = {kernel::BaselineKind::kCircleBernoulli, 1.0, 1};
    spec.baseline_gamma0 = 2.0;
  } else if (spec.name == "circle-example2") {
    spec.config.d = 2;
    spec.config.s = 1.0;
    preset_r = 0.75;  // theta = 1/5, t = 3/5
    spec.config.gamma0 = 2.0;
    spec.config.loss = loss::LossSpec::make(loss::Kind::kHuberSqrt);
    spec.noise = {NoiseKind::kUniform, 0.2};
    spec.baseline_kernel = {kernel::BaselineKind::kCircleBernoulli, 1.0, 1};
    spec.baseline_gamma0 = 2.0;
  } else if (spec.name == "sphere3") {
    spec.config.d = 3;
    spec.config.s = 1.0;
    preset_r = 1.0;  // theta = 1/6, t = 2/3
    spec.config.gamma0 = 2.0;
    spec.config.loss = loss::LossSpec::make(loss::Kind::kWelsch);
    spec.noise = {NoiseKind::kGaussian, 0.2};
    spec.baseline_kernel = {kernel::BaselineKind::kGaussian, 1.0, 1};
    spec.baseline_gamma0 = 2.0;
  } else if (spec.name == "classification") {
    spec.feature_dim = 10;
    spec.config.s = 0.505;
    spec.config.theta = 0.45;
    spec.config.t = 0.5;
    spec.config.gamma0 = 0.6;
    spec.config.q = 1000.0;
    spec.config.loss = loss::LossSpec::make(loss::Kind::kLogistic, 50.0, 1.0);
    spec.noise = {NoiseKind::kUniform, kLabelFlipProbability};  // label flips
    spec.baseline_kernel = {kernel::BaselineKind::kGaussian, 20.0, 1};
    spec.baseline_gamma0 = 0.1;
    spec.baseline_t = 0.0;
    spec.replications = 3;
  } else {
    throw std::invalid_argument("config: unknown experiment '" + spec.name + "'");
  }

  if (const auto* v = get("d")) {
    const int d = std::stoi(*v);
    if (spec.name == "classification") {
      spec.feature_dim = d;
    } else if (d != spec.config.d) {
      throw std::invalid_argument("config: experiment '" + spec.name + "' fixes d = " +
                                  std::to_string(spec.config.d));
    }
  }
  if (spec.name == "classification") spec.config.d = spec.feature_dim + 1;

  if (const auto* v = get("s")) spec.config.s = std::stod(*v);

  // Schedule follows the experiment geometry and the final s.
  spec.config.schedule = is_circle_experiment(spec.name)
                             ? kernel::CoefficientSchedule::circle_paper(spec.config.s)
                             : kernel::CoefficientSchedule::power_of_dim(spec.config.d, spec.config.s);

  // (s, r) mode derives theta and t and turns the log factor on; raw theta/t
  // keep it off.  Explicit keys always win.
  const std::string* theta_key = get("theta");
  const std::string* t_key = get("t");
  const std::string* r_key = get("r");
  double r_value = preset_r;
  if (r_key) r_value = std::stod(*r_key);
  if (r_value > 0.0) {
    spec.config.theta = 1.0 / (2.0 * spec.config.s * (2.0 * r_value + 1.0));
    spec.config.t = 2.0 * r_value / (2.0 * r_value + 1.0);
  }
  spec.config.log_factor = r_key && !theta_key && !t_key;
  if (theta_key) spec.config.theta = std::stod(*theta_key);
  if (t_key) spec.config.t = std::stod(*t_key);
  if (const auto* v = get("log_factor")) spec.config.log_factor = parse_bool(*v);
  if (const auto* v = get("gamma0")) spec.config.gamma0 = std::stod(*v);
  if (const auto* v = get("alpha")) spec.config.alpha = std::stod(*v);
  if (const auto* v = get("loss")) {
    const auto kind = loss::kind_from_name(*v);
    spec.config.loss = loss::LossSpec::make(kind);
  }
  if (const auto* v = get("noise")) spec.noise = parse_noise(*v);
  if (const auto* v = get("replications")) spec.replications = std::stoi(*v);
  if (const auto* v = get("seed")) {
    spec.seed = std::stoull(*v);
    spec.config.seed = spec.seed;
  }
  if (const auto* v = get("learner")) spec.learner = parse_learner(*v);
  if (const auto* v = get("checkpoints")) {
    spec.checkpoints = parse_checkpoints(*v);
  } else {
    spec.checkpoints = parse_checkpoints(spec.name == "classification" ? "2^7..2^13" : "2^10..2^17");
  }

  // Baseline learners share the gamma0/t keys.
  if (spec.learner != LearnerKind::kTKernelSgd) {
    if (const auto* v = get("gamma0")) spec.baseline_gamma0 = std::stod(*v);
    if (t_key) spec.baseline_t = std::stod(*t_key);
    else if (r_value > 0.0) spec.baseline_t = spec.config.t;
    switch (spec.learner) {
      case LearnerKind::kBaselineGaussian:
        spec.baseline_kernel.kind = kernel::BaselineKind::kGaussian;
        break;
      case LearnerKind::kBaselineMatern32:
        spec.baseline_kernel.kind = kernel::BaselineKind::kMatern32;
        break;
      case LearnerKind::kBaselineMatern52:
        spec.baseline_kernel.kind = kernel::BaselineKind::kMatern52;
        break;
      case LearnerKind::kBaselineCircle:
        spec.baseline_kernel.kind = kernel::BaselineKind::kCircleBernoulli;
        spec.baseline_kernel.s = static_cast<int>(std::lround(spec.config.s));
        break;
      default:
        break;
    }
  }

  // Regression target and the default ball radius Q = min(1, 0.9 B / kappa),
  // which keeps predictions inside the loss domain.
  if (spec.name != "classification") {
    if (spec.name == "sphere3") spec.target = make_target_sphere3();
    else spec.target = make_target_circle(circle_example_of(spec.name));
    const double kappa = std::sqrt(kernel::kappa_sq(spec.config.schedule));
    spec.config.q = std::min(1.0, 0.9 * spec.config.loss.domain_halfwidth / kappa);
    if (const auto* v = get("Q")) spec.config.q = std::stod(*v);
    if (kappa * spec.config.q >= spec.config.loss.domain_halfwidth)
      std::cerr << "warning: kappa * Q = " << kappa * spec.config.q
                << " reaches the loss domain half-width B = " << spec.config.loss.domain_halfwidth
                << "; the learner may raise a domain error\n";
  } else if (const auto* v = get("Q")) {
    spec.config.q = std::stod(*v);
  }

  spec.validate();
  return spec;
}

}  // namespace tksgd::bench
