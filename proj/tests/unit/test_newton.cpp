#include "tadapt/newton.hpp"

#include <doctest.h>

#include <cmath>

#include "tadapt/instrumentation.hpp"
#include "tadapt/verification.hpp"

using namespace tadapt;

namespace {

Eigen::SparseMatrix<double> sparse3x3() {
  Eigen::SparseMatrix<double> m(3, 3);
  m.insert(0, 0) = 4.0;
  m.insert(0, 1) = 1.0;
  m.insert(1, 1) = 3.0;
  m.insert(2, 0) = -1.0;
  m.insert(2, 2) = 2.0;
  m.makeCompressed();
  return m;
}

/// Two identical rows: structurally fine, numerically singular.
class SingularProblem final : public Problem {
 public:
  SingularProblem() {
    auto p = std::make_shared<ComponentPartition>();
    p->add("u", 2);
    layout_ = std::move(p);
  }
  std::shared_ptr<const ComponentPartition> partition() const override { return layout_; }
  StateVector initial_state(double) const override { return zero_state(layout_); }
  Vector residual(double, const StateVector& udot, const StateVector& u) const override {
    Vector r(2);
    r[0] = udot.values[0] + u.values[0] + u.values[1] - 1.0;
    r[1] = u.values[0] + u.values[1] - 0.5;
    return r;
  }
  Eigen::SparseMatrix<double> jacobian(double, const StateVector&, const StateVector&,
                                       double) const override {
    Eigen::SparseMatrix<double> j(2, 2);
    j.insert(0, 0) = 1.0;
    j.insert(0, 1) = 1.0;
    j.insert(1, 0) = 1.0;
    j.insert(1, 1) = 1.0;
    j.makeCompressed();
    return j;
  }

 private:
  std::shared_ptr<const ComponentPartition> layout_;
};

}  // namespace

TEST_CASE("sparse factorization solves a small system") {
  const auto m = sparse3x3();
  SparseFactorization f(m);
  CHECK(f.rows() == 3);

  Eigen::VectorXd x_expected(3);
  x_expected << 1.0, -2.0, 0.5;
  const Eigen::VectorXd rhs = m * x_expected;
  const Eigen::VectorXd x = f.solve(rhs);
  CHECK((x - x_expected).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXd bad(2);
  bad.setZero();
  CHECK_THROWS_AS((void)f.solve(bad), InvalidInputError);
}

TEST_CASE("sparse factorization counts work") {
  work_counters().reset();
  const auto f = factorize(sparse3x3());
  CHECK(work_counters().factorizations == 1);
  (void)back_solve(f, Eigen::VectorXd::Ones(3));
  (void)back_solve(f, Eigen::VectorXd::Zero(3));
  CHECK(work_counters().back_solves == 2);
}

TEST_CASE("singular matrices are reported with a diagnostic") {
  Eigen::SparseMatrix<double> m(2, 2);
  m.insert(0, 0) = 1.0;
  m.insert(0, 1) = 2.0;
  m.insert(1, 0) = 2.0;
  m.insert(1, 1) = 4.0;
  m.makeCompressed();
  try {
    SparseFactorization f(m);
    FAIL("expected LinearSolverError");
  } catch (const LinearSolverError& err) {
    CHECK(std::string(err.what()).size() > 10);
  }
}

TEST_CASE("one iteration suffices for a linear problem") {
  auto problem = make_linear_saddle_dae();
  const double h = 0.05;
  HistoryBuffer history;
  history.push(0.0, problem->exact_state(0.0));
  history.push(h, problem->exact_state(h));

  const double t_new = 2 * h;
  const auto stencil = compute_coefficients(2, history.steps_for(h, 2));
  // Start from a deliberately poor guess; linearity still means one update.
  StateVector guess = problem->exact_state(h);
  guess.values.array() += 0.5;

  NewtonConfig config;
  config.abs_tol = 1e-11;
  const auto result = solve_implicit_step(*problem, stencil, history, t_new, guess, config);
  CHECK(result.converged);
  CHECK(result.iterations == 1);
  CHECK(result.residual_norm < 1e-11);
}

TEST_CASE("newton solves the quadratic decay step to the closed form") {
  auto problem = make_quadratic_decay_ode(1.0);
  const double h = 0.1;
  HistoryBuffer history;
  history.push(0.0, problem->exact_state(0.0));

  // Backward Euler on u' = -u^2: h u^2 + u - u0 = 0, positive root
  // u = (-1 + sqrt(1 + 4 h u0)) / (2 h).
  const double u0 = 1.0;
  const double expected = (-1.0 + std::sqrt(1.0 + 4.0 * h * u0)) / (2.0 * h);

  const auto stencil = compute_coefficients(1, history.steps_for(h, 1));
  // A guess far from the root, so convergence is earned, not inherited.
  const StateVector guess = make_state(problem->partition(), Vector::Constant(1, 5.0));

  NewtonConfig config;
  config.abs_tol = 1e-13;
  config.rel_tol = 1e-13;  // the guess is far off, so the relative drop is easy
  const auto result = solve_implicit_step(*problem, stencil, history, h, guess, config);
  CHECK(result.converged);
  CHECK(result.iterations >= 2);  // genuinely nonlinear from this guess
  CHECK(result.state.values[0] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("a guess that already solves the step converges with zero updates") {
  auto problem = make_quadratic_decay_ode(1.0);
  const double h = 0.1;
  HistoryBuffer history;
  history.push(0.0, problem->exact_state(0.0));
  const auto stencil = compute_coefficients(1, history.steps_for(h, 1));

  NewtonConfig config;
  config.abs_tol = 1e-12;
  const auto first = solve_implicit_step(*problem, stencil, history, h,
                                         problem->exact_state(0.0), config);
  REQUIRE(first.converged);
  const auto again =
      solve_implicit_step(*problem, stencil, history, h, first.state, config);
  CHECK(again.converged);
  CHECK(again.iterations == 0);
}

TEST_CASE("iteration budget exhaustion is reported, not thrown") {
  auto problem = make_quadratic_decay_ode(1.0);
  const double h = 0.1;
  HistoryBuffer history;
  history.push(0.0, problem->exact_state(0.0));
  const auto stencil = compute_coefficients(1, history.steps_for(h, 1));

  StateVector guess = problem->exact_state(0.0);
  guess.values[0] = 80.0;

  NewtonConfig config;
  config.abs_tol = 1e-13;
  config.max_iterations = 1;
  const auto result = solve_implicit_step(*problem, stencil, history, h, guess, config);
  CHECK(!result.converged);
  CHECK(result.message.find("iteration") != std::string::npos);
}

TEST_CASE("a singular jacobian makes the step fail gracefully") {
  SingularProblem problem;
  HistoryBuffer history;
  history.push(0.0, problem.initial_state(0.0));
  const auto stencil = compute_coefficients(1, history.steps_for(0.1, 1));
  const auto result =
      solve_implicit_step(problem, stencil, history, 0.1, problem.initial_state(0.0));
  CHECK(!result.converged);
  CHECK(!result.message.empty());
}

TEST_CASE("the step time must match the stencil") {
  auto problem = make_quadratic_decay_ode(1.0);
  HistoryBuffer history;
  history.push(0.0, problem->exact_state(0.0));
  const auto stencil = compute_coefficients(1, history.steps_for(0.1, 1));
  CHECK_THROWS_AS((void)solve_implicit_step(*problem, stencil, history, 0.2,
                                            problem->exact_state(0.0)),
                  InvalidInputError);
}

TEST_CASE("auto absolute tolerance scales with problem size") {
  NewtonConfig config;
  CHECK(config.effective_abs_tol(100) == doctest::Approx(1e-9));
  config.abs_tol = 3e-7;
  CHECK(config.effective_abs_tol(100) == doctest::Approx(3e-7));
}
