#include "tksgd/bench.hpp"
#include "tksgd/harmonics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path, const std::string& out_path) {
  const auto kv = tksgd::bench::parse_config_file(config_path);
  const auto spec = tksgd::bench::build_experiment(kv);

  std::cerr << "running experiment '" << spec.name << "' (" << spec.replications
            << " replications, " << spec.checkpoints.size() << " checkpoints)\n";
  const auto records = spec.name == "classification"
                           ? tksgd::bench::classification_experiment(spec)
                           : tksgd::bench::run_experiment(spec);

  tksgd::bench::write_csv(out_path, records);
  tksgd::bench::write_metadata(out_path, spec, kv);
  std::cerr << "wrote " << records.size() << " rows to " << out_path << "\n";

  // Convenience summary: the fitted slope over the top decade of checkpoints.
  if (!spec.checkpoints.empty() && spec.name != "classification") {
    const double n_max = static_cast<double>(spec.checkpoints.back());
    for (const auto& [estimator, metric] : tksgd::bench::record_groups(records)) {
      if (metric != "l2_sq") continue;
      try {
        const auto fit = tksgd::bench::fit_slope(records, n_max / 10.0, n_max, estimator, metric);
        std::printf("slope %-8s %-8s [%g, %g]: %+.4f +- %.4f (%d points)\n", estimator.c_str(),
                    metric.c_str(), n_max / 10.0, n_max, fit.slope, fit.stderr_slope, fit.points);
      } catch (const std::exception&) {
        // fewer than 4 checkpoints in the top decade; nothing to report
      }
    }
  }
  return 0;
}

int cmd_slope(const std::string& csv_path, double n_min, double n_max) {
  const auto records = tksgd::bench::read_csv(csv_path);
  bool any = false;
  for (const auto& [estimator, metric] : tksgd::bench::record_groups(records)) {
    try {
      const auto fit = tksgd::bench::fit_slope(records, n_min, n_max, estimator, metric);
      std::printf("%-8s %-8s slope %+.6f stderr %.6f points %d\n", estimator.c_str(),
                  metric.c_str(), fit.slope, fit.stderr_slope, fit.points);
      any = true;
    } catch (const std::invalid_argument&) {
      // group has too few checkpoints in range or non-positive values
    }
  }
  if (!any) {
    std::cerr << "no (estimator, metric) group has >= 4 positive checkpoints in range\n";
    return 1;
  }
  return 0;
}

int cmd_dump_target(const std::string& name, const std::string& out_path) {
  tksgd::model::CoefficientVector target;
  if (name == "circle-example1") {
    target = tksgd::bench::make_target_circle(1);
  } else if (name == "circle-example2") {
    target = tksgd::bench::make_target_circle(2);
  } else if (name == "sphere3") {
    target = tksgd::bench::make_target_sphere3();
  } else {
    std::cerr << "unknown target '" << name
              << "' (expected circle-example1, circle-example2 or sphere3)\n";
    return 1;
  }
  std::FILE* out = out_path.empty() ? stdout : std::fopen(out_path.c_str(), "w");
  if (!out) {
    std::cerr << "cannot open " << out_path << "\n";
    return 1;
  }
  std::fprintf(out, "k,j,coefficient\n");
  for (int k = 0; k <= target.max_degree(); ++k)
    for (Eigen::Index j = 0; j < target.blocks[k].size(); ++j)
      std::fprintf(out, "%d,%lld,%.17g\n", k, static_cast<long long>(j + 1), target.blocks[k][j]);
  if (!out_path.empty()) std::fclose(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated-kernel SGD benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_path = "results.csv";
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "key-value config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_path, "output CSV path (sidecar metadata alongside)");

  std::string csv_path;
  double n_min = 1.0, n_max = 1e18;
  auto* slope = app.add_subcommand("slope", "fit log-log error slopes from a results CSV");
  slope->add_option("csv", csv_path, "results CSV")->required()->check(CLI::ExistingFile);
  slope->add_option("--nmin", n_min, "smallest checkpoint included");
  slope->add_option("--nmax", n_max, "largest checkpoint included");

  std::string target_name, target_out;
  auto* dump = app.add_subcommand("dump-target", "write a target's coefficients as CSV");
  dump->add_option("name", target_name, "circle-example1 | circle-example2 | sphere3")->required();
  dump->add_option("-o,--output", target_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_path);
    if (slope->parsed()) return cmd_slope(csv_path, n_min, n_max);
    if (dump->parsed()) return cmd_dump_target(target_name, target_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
