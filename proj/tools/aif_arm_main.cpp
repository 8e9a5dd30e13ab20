// aif-arm: scenario runner CLI.
//
//   aif-arm run --scenario <file> --out <dir> [--seed N] [--trials N] [--quiet]
//   aif-arm summarize <dir>
//   aif-arm fit-gpr --samples N --out <model-file> [--links ...] [...]
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime divergence.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aif/experiments.hpp"

namespace {

// Halton low-discrepancy sequence over [lo, hi]^n; deterministic coverage of
// the joint workspace for GPR training sets.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

Eigen::MatrixXd halton_grid(int samples, int dims, double lo, double hi) {
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  Eigen::MatrixXd X(samples, dims);
  for (int s = 0; s < samples; ++s)
    for (int d = 0; d < dims; ++d)
      X(s, d) = lo + (hi - lo) * halton(s + 1, primes[d % 6]);
  return X;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<long> seed, std::optional<int> trials, bool quiet) {
  aif::Scenario s = aif::parse_scenario_file(scenario_path);
  if (seed) s.seed = static_cast<std::uint64_t>(*seed);
  if (trials) s.trials = *trials;
  s.validate();
  aif::run_and_write(s, out_dir, quiet);
  return 0;
}

int cmd_summarize(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "summary.json";
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: no summary.json under " << dir << "\n";
    return 1;
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  std::cout << "scenario:                 " << doc.value("scenario", "?") << "\n"
            << "trials:                   " << doc.value("trials", 0) << "\n"
            << "converged:                " << doc.value("converged", 0) << "\n"
            << "mean final joint err rad: " << doc.value("mean_final_joint_err_rad", 0.0) << "\n"
            << "std final joint err rad:  " << doc.value("std_final_joint_err_rad", 0.0) << "\n"
            << "mean final ee err m:      " << doc.value("mean_final_ee_err_m", 0.0) << "\n"
            << "mean vfe final:           " << doc.value("mean_vfe_final", 0.0) << "\n";
  return 0;
}

int cmd_fit_gpr(int samples, const std::string& out_file,
                const std::vector<double>& links_arg, double joint_min,
                double joint_max, double length_scale, double signal_variance,
                double noise_variance) {
  Eigen::VectorXd links(links_arg.size());
  for (size_t i = 0; i < links_arg.size(); ++i) links[i] = links_arg[i];
  const aif::AnalyticFK fk(links);

  const int n = static_cast<int>(links.size());
  const Eigen::MatrixXd X = halton_grid(samples, n, joint_min, joint_max);
  Eigen::MatrixXd Y(samples, 2);
  for (int i = 0; i < samples; ++i)
    Y.row(i) = fk.predict(X.row(i).transpose()).transpose();

  const aif::GprModel model =
      aif::GprModel::fit(X, Y, length_scale, signal_variance, noise_variance);
  model.save_file(out_file);

  // Held-out check against the analytic mapping.
  const Eigen::MatrixXd H = halton_grid(100, n, joint_min + 0.05, joint_max - 0.05);
  double max_err = 0.0;
  for (int i = 0; i < H.rows(); ++i) {
    const Eigen::VectorXd q = H.row(i).transpose();
    max_err = std::max(max_err, (model.predict(q) - fk.predict(q)).norm());
  }
  std::cout << "fit " << samples << " samples over [" << joint_min << ", "
            << joint_max << "]^" << n << "; held-out max err " << max_err
            << " m; saved to " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-inference arm: scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir;
  std::optional<long> seed;
  std::optional<int> trials;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--seed", seed, "override scenario seed");
  run->add_option("--trials", trials, "override trial count");
  run->add_flag("--quiet", quiet, "suppress progress output");

  std::string summary_dir;
  auto* summ = app.add_subcommand("summarize", "print a run's summary");
  summ->add_option("dir", summary_dir, "output directory of a run")->required();

  int samples = 200;
  std::string model_out = "gpr_model.json";
  std::vector<double> links{1.0, 1.0};
  double joint_min = -M_PI, joint_max = M_PI;
  double length_scale = 0.5, signal_variance = 1.0, noise_variance = 1e-4;
  auto* fit = app.add_subcommand("fit-gpr", "fit a GPR visual model to FK samples");
  fit->add_option("--samples", samples, "training sample count");
  fit->add_option("--out", model_out, "model file")->required();
  fit->add_option("--links", links, "link lengths");
  fit->add_option("--joint-min", joint_min, "workspace lower bound (rad)");
  fit->add_option("--joint-max", joint_max, "workspace upper bound (rad)");
  fit->add_option("--length-scale", length_scale, "SE kernel length scale (rad)");
  fit->add_option("--signal-variance", signal_variance, "SE kernel signal variance");
  fit->add_option("--noise-variance", noise_variance, "observation noise variance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir, seed, trials, quiet);
    if (summ->parsed()) return cmd_summarize(summary_dir);
    if (fit->parsed())
      return cmd_fit_gpr(samples, model_out, links, joint_min, joint_max,
                         length_scale, signal_variance, noise_variance);
  } catch (const aif::DivergenceError& e) {
    std::cerr << "runtime divergence: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
