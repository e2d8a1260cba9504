#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tadapt/bdf.hpp"
#include "tadapt/newton.hpp"
#include "tadapt/problem.hpp"
#include "tadapt/types.hpp"

namespace tadapt {

enum class EstimatorKind { implicit_bdf3, linear_implicit };

[[nodiscard]] const char* to_string(EstimatorKind kind);

/// Temporal error estimate for one candidate step, reported per component and
/// aggregated with a max so no field can hide behind another.
struct EstimateReport {
  double total = 0.0;
  std::vector<std::pair<std::string, double>> per_component;  // partition order
  EstimatorKind kind = EstimatorKind::implicit_bdf3;
  double cost_seconds = 0.0;
  int newton_iterations = 0;  // inner solve of the implicit variant; 0 otherwise
};

struct EstimatorOptions {
  /// Controls the inner third order solve of the implicit variant.
  NewtonConfig newton;
  /// Divide each component's estimate by the norm of the accepted second
  /// order solution for that component. Off by default: the absolute scale
  /// is what the step controller's tolerance is calibrated against.
  bool relative_components = false;
};

/// Per-component norms of (a - b). Layouts must agree.
[[nodiscard]] std::vector<std::pair<std::string, double>> component_l2_diff(
    const Problem& problem, const StateVector& a, const StateVector& b);

/// Difference between the accepted second order solution and a fully solved
/// third order solution at the same time, started from the second order
/// iterate. `steps` is the pattern [dt_new, dt_n, dt_nm1]. Returns nothing
/// when the inner solve fails; callers treat that as an unusable step.
[[nodiscard]] std::optional<EstimateReport> estimate_implicit(
    const Problem& problem, const HistoryBuffer& history, double t_new,
    const StateVector& u_bdf2, ConstVectorRef steps, const EstimatorOptions& options = {});

/// One Newton correction toward the third order solution: assemble the third
/// order residual and shifted Jacobian at the second order iterate, solve
/// once, and measure the update. Exactly one residual evaluation, one
/// Jacobian assembly, one factorization and one back substitution.
[[nodiscard]] std::optional<EstimateReport> estimate_linear_implicit(
    const Problem& problem, const HistoryBuffer& history, double t_new,
    const StateVector& u_bdf2, ConstVectorRef steps, const EstimatorOptions& options = {});

struct LinearImplicitCorrection {
  StateVector corrected;  // u_bdf2 + delta
  Vector delta;
};

/// The raw correction behind estimate_linear_implicit. Also usable as a cheap
/// third order scheme in its own right (solve second order, then correct).
[[nodiscard]] std::optional<LinearImplicitCorrection> linear_implicit_bdf3(
    const Problem& problem, const HistoryBuffer& history, double t_new,
    const StateVector& u_bdf2, ConstVectorRef steps);

}  // namespace tadapt
