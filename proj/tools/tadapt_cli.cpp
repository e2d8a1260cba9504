/// Batch driver: configure a problem and a step controller from a JSON
/// file, integrate, and leave machine-readable results (steps.csv,
/// summary.txt, convergence tables, solution snapshots) in the output
/// directory.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tadapt/reporting.hpp"
#include "tadapt/run_config.hpp"
#include "tadapt/verification.hpp"

namespace {

constexpr int kExitBadConfig = 2;
constexpr int kExitAborted = 3;

struct Overrides {
  std::optional<std::string> estimator;
  std::optional<int> refine;
  std::optional<std::string> out_dir;
};

tadapt::RunConfig load_with_overrides(const std::string& config_path,
                                      const Overrides& overrides) {
  tadapt::RunConfig config = tadapt::load_run_config(config_path);
  if (overrides.estimator) {
    config.controller.estimator = tadapt::parse_estimator_token(*overrides.estimator);
  }
  if (overrides.refine) config.refine = *overrides.refine;
  if (overrides.out_dir) config.output_dir = *overrides.out_dir;
  config.validate();
  return config;
}

int report_run(const tadapt::RunOutputs& outputs) {
  const tadapt::RunSummary& s = outputs.log.summary;
  std::printf("accepted %d steps (%d rejected attempts, %d forced) to t = %s\n",
              s.accepted_steps, s.rejected_attempts, s.forced_accepts,
              tadapt::format_number(s.final_time).c_str());
  std::printf("results in %s\n", outputs.directory.string().c_str());
  if (s.aborted) {
    std::fprintf(stderr, "run aborted: %s\n", s.abort_reason.c_str());
    return kExitAborted;
  }
  return 0;
}

int cmd_run(const std::string& config_path, const Overrides& overrides) {
  const auto config = load_with_overrides(config_path, overrides);
  return report_run(tadapt::execute_run(config));
}

int cmd_compare_estimators(const std::string& config_path, const Overrides& overrides) {
  auto config = load_with_overrides(config_path, overrides);
  config.controller.estimator = tadapt::DriveEstimator::both;
  const auto outputs = tadapt::execute_run(config);
  const auto costs = tadapt::estimator_costs(outputs.log);
  std::printf("implicit estimator: %s +- %s s per evaluation (%d samples)\n",
              tadapt::format_number(costs.implicit_cost.mean).c_str(),
              tadapt::format_number(costs.implicit_cost.stddev).c_str(),
              costs.implicit_cost.samples);
  std::printf("linear-implicit estimator: %s +- %s s per evaluation (%d samples)\n",
              tadapt::format_number(costs.li_cost.mean).c_str(),
              tadapt::format_number(costs.li_cost.stddev).c_str(),
              costs.li_cost.samples);
  return report_run(outputs);
}

int cmd_convergence(const std::string& problem_id, const std::string& out_dir) {
  using tadapt::Scheme;
  std::shared_ptr<tadapt::ManufacturedProblem> problem;
  if (problem_id == "stiff-ode") {
    problem = tadapt::make_stiff_relaxation_ode();
  } else if (problem_id == "poly-ode") {
    problem = tadapt::make_polynomial_ode(2);
  } else if (problem_id == "saddle-dae") {
    problem = tadapt::make_linear_saddle_dae();
  } else {
    std::fprintf(stderr,
                 "convergence sweeps need a closed-form solution; pick one of "
                 "stiff-ode, poly-ode, saddle-dae (got '%s')\n",
                 problem_id.c_str());
    return kExitBadConfig;
  }
  const std::vector<double> steps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  std::vector<tadapt::ConvergenceStudy> studies;
  for (const Scheme scheme : {Scheme::bdf2, Scheme::bdf3, Scheme::li_bdf3}) {
    studies.push_back(tadapt::convergence_study(*problem, scheme, steps, 0.0, 1.0));
    std::printf("%s: least-squares order %s over h in [%s, %s]\n",
                tadapt::to_string(scheme),
                tadapt::format_number(studies.back().order).c_str(),
                tadapt::format_number(steps.back()).c_str(),
                tadapt::format_number(steps.front()).c_str());
  }
  std::filesystem::create_directories(out_dir);
  const auto table = std::filesystem::path(out_dir) / "orders.csv";
  tadapt::write_orders_csv(table, studies);
  std::printf("results in %s\n", table.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive time integration for semi-discrete DAE systems"};
  app.require_subcommand(1);
  int seed = 0;
  app.add_option("--seed", seed, "Reserved for future randomized experiments");

  Overrides overrides;
  std::string config_path;
  std::string problem_id;
  std::string convergence_out = "out/convergence";

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--estimator", overrides.estimator,
                    "Override the configured estimator")
        ->check(CLI::IsMember({"implicit", "li", "both"}));
    cmd->add_option("--refine", overrides.refine, "Override the mesh refinement level");
    cmd->add_option("--out", overrides.out_dir, "Override the output directory");
  };

  CLI::App* run_cmd = app.add_subcommand(
      "run", "Integrate one configured problem adaptively and emit steps.csv");
  add_common(run_cmd);

  CLI::App* compare_cmd = app.add_subcommand(
      "compare-estimators",
      "Run with both error estimators side by side and compare their cost");
  add_common(compare_cmd);

  CLI::App* conv_cmd = app.add_subcommand(
      "convergence", "Constant-step order sweep on a problem with a known solution");
  conv_cmd->add_option("problem", problem_id, "stiff-ode | poly-ode | saddle-dae")
      ->required();
  conv_cmd->add_option("--out", convergence_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, overrides);
    if (compare_cmd->parsed()) return cmd_compare_estimators(config_path, overrides);
    if (conv_cmd->parsed()) return cmd_convergence(problem_id, convergence_out);
  } catch (const tadapt::InvalidInputError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
