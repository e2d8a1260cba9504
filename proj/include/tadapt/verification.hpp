#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tadapt/newton.hpp"
#include "tadapt/problem.hpp"

namespace tadapt {

/// A problem with a known closed-form solution, used to measure convergence
/// orders and to cross-check estimators against real errors.
class ManufacturedProblem : public Problem {
 public:
  [[nodiscard]] virtual StateVector exact_state(double t) const = 0;
  [[nodiscard]] virtual StateVector exact_derivative(double t) const = 0;
  [[nodiscard]] virtual std::string description() const = 0;
};

/// u' = d t^(d-1), u(t) = 1 + t^d. Any stencil of order >= d reproduces the
/// solution to roundoff, which pins down the exactness of the weights.
[[nodiscard]] std::shared_ptr<ManufacturedProblem> make_polynomial_ode(int degree);

/// u' = -lambda (u - sin t) + cos t with u = sin t: a classic stiff test
/// where the transient is fast but the solution is tame.
[[nodiscard]] std::shared_ptr<ManufacturedProblem> make_stiff_relaxation_ode(
    double lambda = 1e3);

/// u' = -u^2, u(t) = u0 / (1 + u0 t). Genuinely nonlinear; Newton needs to
/// iterate for real.
[[nodiscard]] std::shared_ptr<ManufacturedProblem> make_quadratic_decay_ode(
    double u0 = 1.0);

/// Small dense linear DAE with the same saddle structure as an
/// incompressible flow problem:
///   M u' + K u + B^T p = f(t),   B u = g(t)
/// with 8 differential and 3 algebraic unknowns, components named
/// "velocity" and "pressure". Forcing is manufactured from a smooth exact
/// solution.
[[nodiscard]] std::shared_ptr<ManufacturedProblem> make_linear_saddle_dae();

/// Max norm of R(exact_derivative, exact_state, t) over uniformly sampled
/// times: must be at roundoff for a correctly manufactured problem.
[[nodiscard]] double residual_defect(const ManufacturedProblem& problem, double t0,
                                     double t1, int samples = 101);

enum class Scheme { bdf1, bdf2, bdf3, li_bdf3 };

[[nodiscard]] const char* to_string(Scheme scheme);

struct ConstantStepResult {
  double max_error = 0.0;  // max over time and components
  std::vector<std::pair<std::string, double>> component_max_error;
  int steps = 0;
};

/// Marches from t0 to t_end at fixed step h, seeding the history with exact
/// states so ramp-up error cannot pollute the order measurement. The
/// li_bdf3 scheme solves the second order step and then advances the
/// linear-implicit third order correction.
[[nodiscard]] ConstantStepResult constant_step_run(
    const ManufacturedProblem& problem, Scheme scheme, double h, double t0, double t_end,
    const NewtonConfig& config = NewtonConfig{1e-11, 1e-12, 30, 1.0});

/// Least squares slope of log(error) against log(h). Errors must be
/// positive; at least two points.
[[nodiscard]] double observed_order(const std::vector<double>& hs,
                                    const std::vector<double>& errors);

struct ConvergenceRow {
  double h = 0.0;
  double error = 0.0;
};

struct ConvergenceStudy {
  Scheme scheme;
  std::vector<ConvergenceRow> rows;
  double order = 0.0;
};

[[nodiscard]] ConvergenceStudy convergence_study(
    const ManufacturedProblem& problem, Scheme scheme, const std::vector<double>& hs,
    double t0, double t_end, const NewtonConfig& config = NewtonConfig{1e-11, 1e-12, 30, 1.0});

}  // namespace tadapt
