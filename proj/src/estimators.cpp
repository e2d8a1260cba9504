#include "tadapt/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "tadapt/instrumentation.hpp"

namespace tadapt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_estimator_inputs(const HistoryBuffer& history, double t_new,
                               ConstVectorRef steps) {
  if (steps.size() != 3) {
    throw InvalidInputError("estimator needs the step pattern [dt_new, dt_n, dt_nm1]");
  }
  if (history.size() < 3) {
    throw HistoryUnderflowError("third order estimate needs 3 history states, have " +
                                std::to_string(history.size()));
  }
  const double implied = t_new - history.time(0);
  if (std::abs(implied - steps[0]) > 1e-10 * std::max(1.0, std::abs(t_new))) {
    throw InvalidInputError("estimator: t_new inconsistent with steps[0]");
  }
}

std::vector<std::pair<std::string, double>> component_norms(const Problem& problem,
                                                            ConstVectorRef diff,
                                                            const StateVector& reference,
                                                            bool relative) {
  const auto partition = problem.partition();
  std::vector<std::pair<std::string, double>> out;
  out.reserve(static_cast<std::size_t>(partition->component_count()));
  for (const auto& c : partition->components()) {
    double value = partition->norm(c, diff.segment(c.offset, c.size));
    if (relative) {
      const double base = partition->norm(c, reference.values.segment(c.offset, c.size));
      value /= std::max(base, 1e-30);
    }
    out.emplace_back(c.name, value);
  }
  return out;
}

double max_component(const std::vector<std::pair<std::string, double>>& values) {
  double m = 0.0;
  for (const auto& [name, v] : values) m = std::max(m, v);
  return m;
}

}  // namespace

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::implicit_bdf3: return "implicit";
    case EstimatorKind::linear_implicit: return "li";
  }
  return "unknown";
}

std::vector<std::pair<std::string, double>> component_l2_diff(const Problem& problem,
                                                              const StateVector& a,
                                                              const StateVector& b) {
  require_same_layout(a, b, "component_l2_diff");
  const Vector diff = a.values - b.values;
  return component_norms(problem, diff, b, false);
}

std::optional<EstimateReport> estimate_implicit(const Problem& problem,
                                                const HistoryBuffer& history, double t_new,
                                                const StateVector& u_bdf2,
                                                ConstVectorRef steps,
                                                const EstimatorOptions& options) {
  validate_estimator_inputs(history, t_new, steps);
  const auto start = Clock::now();

  const BdfStencil third = compute_coefficients(3, steps);
  const NewtonResult solve =
      solve_implicit_step(problem, third, history, t_new, u_bdf2, options.newton);
  if (!solve.converged) return std::nullopt;

  EstimateReport report;
  report.kind = EstimatorKind::implicit_bdf3;
  report.newton_iterations = solve.iterations;
  const Vector diff = solve.state.values - u_bdf2.values;
  report.per_component = component_norms(problem, diff, u_bdf2, options.relative_components);
  report.total = max_component(report.per_component);
  report.cost_seconds = seconds_since(start);
  return report;
}

std::optional<LinearImplicitCorrection> linear_implicit_bdf3(const Problem& problem,
                                                             const HistoryBuffer& history,
                                                             double t_new,
                                                             const StateVector& u_bdf2,
                                                             ConstVectorRef steps) {
  validate_estimator_inputs(history, t_new, steps);

  // Third order residual and Jacobian evaluated at the second order solution.
  // The Jacobian shift must be the third order leading weight, not the one
  // the step was solved with.
  const BdfStencil third = compute_coefficients(3, steps);
  const StateVector udot = apply_xi(third, u_bdf2, history);
  ++work_counters().residual_evals;
  const Vector r = problem.residual(t_new, udot, u_bdf2);
  if (!r.allFinite()) return std::nullopt;

  ++work_counters().jacobian_evals;
  const Eigen::SparseMatrix<double> jac =
      problem.jacobian(t_new, udot, u_bdf2, third.shift());

  Vector delta;
  try {
    delta = SparseFactorization(jac).solve(-r);
  } catch (const LinearSolverError&) {
    return std::nullopt;
  }
  if (!delta.allFinite()) return std::nullopt;

  // Strong constraints hold at both orders; do not let roundoff from the
  // solve leak into the estimate.
  for (const Eigen::Index dof : problem.constrained_dofs()) delta[dof] = 0.0;

  LinearImplicitCorrection out;
  out.delta = delta;
  out.corrected = StateVector{u_bdf2.values + delta, u_bdf2.layout};
  return out;
}

std::optional<EstimateReport> estimate_linear_implicit(const Problem& problem,
                                                       const HistoryBuffer& history,
                                                       double t_new,
                                                       const StateVector& u_bdf2,
                                                       ConstVectorRef steps,
                                                       const EstimatorOptions& options) {
  const auto start = Clock::now();
  const auto correction = linear_implicit_bdf3(problem, history, t_new, u_bdf2, steps);
  if (!correction) return std::nullopt;

  EstimateReport report;
  report.kind = EstimatorKind::linear_implicit;
  report.per_component =
      component_norms(problem, correction->delta, u_bdf2, options.relative_components);
  report.total = max_component(report.per_component);
  report.cost_seconds = seconds_since(start);
  return report;
}

}  // namespace tadapt
