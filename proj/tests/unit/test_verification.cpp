#include "tadapt/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace tadapt;

namespace {

const std::vector<double> kSteps = {1e-2, 5e-3, 2.5e-3, 1.25e-3};

}  // namespace

TEST_CASE("manufactured problems satisfy their own residual") {
  CHECK(residual_defect(*make_polynomial_ode(3), 0.0, 2.0) < 1e-10);
  CHECK(residual_defect(*make_stiff_relaxation_ode(), 0.0, 2.0) < 1e-9);
  CHECK(residual_defect(*make_quadratic_decay_ode(1.0), 0.0, 2.0) < 1e-12);
  CHECK(residual_defect(*make_linear_saddle_dae(), 0.0, 2.0) < 1e-12);
}

TEST_CASE("manufactured problem construction is validated") {
  CHECK_THROWS_AS((void)make_polynomial_ode(0), InvalidInputError);
  CHECK_THROWS_AS((void)make_stiff_relaxation_ode(-1.0), InvalidInputError);
  CHECK_THROWS_AS((void)make_quadratic_decay_ode(0.0), InvalidInputError);
}

TEST_CASE("the saddle problem exposes velocity and pressure components") {
  auto dae = make_linear_saddle_dae();
  const auto partition = dae->partition();
  REQUIRE(partition->component_count() == 2);
  CHECK(partition->component(0).name == "velocity");
  CHECK(partition->component(0).size == 8);
  CHECK(partition->component(1).name == "pressure");
  CHECK(partition->component(1).size == 3);
}

TEST_CASE("stencils reproduce polynomials of their own degree") {
  // Second order on a quadratic and third order on a cubic run at the
  // solver-tolerance floor; second order on a cubic visibly does not.
  const auto quadratic = make_polynomial_ode(2);
  const auto cubic = make_polynomial_ode(3);

  const auto r22 = constant_step_run(*quadratic, Scheme::bdf2, 0.05, 0.0, 1.0);
  CHECK(r22.max_error < 1e-9);

  const auto r33 = constant_step_run(*cubic, Scheme::bdf3, 0.05, 0.0, 1.0);
  CHECK(r33.max_error < 1e-9);

  const auto r23 = constant_step_run(*cubic, Scheme::bdf2, 0.05, 0.0, 1.0);
  CHECK(r23.max_error > 1e-5);
}

TEST_CASE("backward Euler converges at first order") {
  const auto problem = make_quadratic_decay_ode(1.0);
  const auto study = convergence_study(*problem, Scheme::bdf1, kSteps, 0.0, 1.0);
  CHECK(study.order == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("the second order scheme converges at second order") {
  const auto problem = make_quadratic_decay_ode(1.0);
  const auto study = convergence_study(*problem, Scheme::bdf2, kSteps, 0.0, 1.0);
  CHECK(study.order == doctest::Approx(2.0).epsilon(0.06));
  // Errors must actually shrink monotonically across the ladder.
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    CHECK(study.rows[i].error < study.rows[i - 1].error);
  }
}

TEST_CASE("the third order scheme converges at third order") {
  const auto problem = make_quadratic_decay_ode(1.0);
  const auto study = convergence_study(*problem, Scheme::bdf3, kSteps, 0.0, 1.0);
  CHECK(study.order == doctest::Approx(3.0).epsilon(0.06));
}

TEST_CASE("one corrected update per step is enough for third order") {
  const auto problem = make_quadratic_decay_ode(1.0);
  const auto study = convergence_study(*problem, Scheme::li_bdf3, kSteps, 0.0, 1.0);
  CHECK(study.order == doctest::Approx(3.0).epsilon(0.08));
}

TEST_CASE("the corrected scheme matches the full third order one on a linear problem") {
  // One Newton update solves a linear step exactly, so both schemes walk the
  // same trajectory up to solver tolerance.
  const auto problem = make_linear_saddle_dae();
  const double h = 5e-3;
  const auto full = constant_step_run(*problem, Scheme::bdf3, h, 0.0, 0.5);
  const auto corrected = constant_step_run(*problem, Scheme::li_bdf3, h, 0.0, 0.5);
  CHECK(std::abs(full.max_error - corrected.max_error) <
        1e-4 * std::max(full.max_error, corrected.max_error) + 1e-10);
}

TEST_CASE("second order convergence holds for the saddle problem") {
  const auto problem = make_linear_saddle_dae();
  const auto study = convergence_study(*problem, Scheme::bdf2, kSteps, 0.0, 1.0);
  CHECK(study.order == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("stiff relaxation is integrated stably at second order") {
  // lambda h spans 10 down to 1.25 across the ladder; the error constant is
  // stiffness-affected, so only demand a conservative order band.
  const auto problem = make_stiff_relaxation_ode(1e3);
  const auto study = convergence_study(*problem, Scheme::bdf2, kSteps, 0.0, 1.0);
  CHECK(study.order > 1.6);
  CHECK(study.order < 2.6);
  CHECK(study.rows.back().error < 1e-6);
}

TEST_CASE("order measurement recovers a synthetic slope") {
  std::vector<double> hs = {0.1, 0.05, 0.025};
  std::vector<double> errors;
  for (const double h : hs) errors.push_back(3.0 * std::pow(h, 2.5));
  CHECK(observed_order(hs, errors) == doctest::Approx(2.5).epsilon(1e-10));

  CHECK_THROWS_AS((void)observed_order({0.1}, {1.0}), InvalidInputError);
  CHECK_THROWS_AS((void)observed_order({0.1, 0.1}, {1.0, 1.0}), InvalidInputError);
  CHECK_THROWS_AS((void)observed_order({0.1, 0.05}, {1.0, -1.0}), InvalidInputError);
}

TEST_CASE("constant step march rejects impossible requests") {
  const auto problem = make_quadratic_decay_ode(1.0);
  CHECK_THROWS_AS((void)constant_step_run(*problem, Scheme::bdf3, 0.5, 0.0, 1.0),
                  InvalidInputError);
  CHECK_THROWS_AS((void)constant_step_run(*problem, Scheme::bdf2, -0.1, 0.0, 1.0),
                  InvalidInputError);
}
