#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "tadapt/controller.hpp"
#include "tadapt/problem.hpp"

namespace tadapt {

/// Everything one batch run needs: which problem, over which interval, and
/// how the step controller behaves. Loadable from JSON; unknown keys are
/// rejected so a typo fails loudly instead of silently keeping a default.
struct RunConfig {
  /// One of "stiff-ode", "poly-ode", "saddle-dae", "backward-step",
  /// "pressure-channel" (see instantiate_problem).
  std::string problem = "stiff-ode";
  int refine = 0;          ///< mesh refinement level (flow problems)
  int degree = 2;          ///< monomial degree (poly-ode)
  double viscosity = 0.0;  ///< kinematic viscosity; 0 keeps the problem default
  bool advection = true;   ///< include the convective term (flow problems)
  double t0 = 0.0;
  double t_end = 1.0;
  ControllerConfig controller;
  std::string output_dir = "out";
  /// March at constant dt_min with no estimation instead of adapting; used
  /// to produce the reference curves adaptive runs are judged against.
  bool reference_run = false;

  /// Throws InvalidInputError when the controller settings, the time
  /// interval, or the problem parameters are out of range.
  void validate() const;
};

/// Inverse of to_string(DriveEstimator): accepts "implicit", "li", "both".
[[nodiscard]] DriveEstimator parse_estimator_token(const std::string& token);

/// Parse JSON text into a validated RunConfig. Throws InvalidInputError on
/// malformed JSON, unknown keys, wrong value types, or invalid settings.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text);

/// parse_run_config applied to a file's contents.
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& file);

/// The fully resolved configuration — every field, defaults filled in — as
/// JSON text that parse_run_config accepts back unchanged.
[[nodiscard]] std::string serialize_run_config(const RunConfig& config);

/// Build the problem the config names. Throws InvalidInputError on an
/// unknown problem id.
[[nodiscard]] std::shared_ptr<Problem> instantiate_problem(const RunConfig& config);

}  // namespace tadapt
