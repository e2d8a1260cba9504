#include "tadapt/problem.hpp"

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tadapt/verification.hpp"

using namespace tadapt;
using test_helpers::layout_of;

TEST_CASE("partition assigns contiguous offsets in insertion order") {
  ComponentPartition p;
  p.add("velocity", 6);
  p.add("pressure", 2);

  CHECK(p.size() == 8);
  CHECK(p.component_count() == 2);
  CHECK(p.component(0).name == "velocity");
  CHECK(p.component(0).offset == 0);
  CHECK(p.component(1).offset == 6);
  CHECK(p.find("pressure") != nullptr);
  CHECK(p.find("temperature") == nullptr);

  CHECK_THROWS_AS(p.add("velocity", 3), InvalidInputError);
  CHECK_THROWS_AS(p.add("empty", 0), InvalidInputError);
}

TEST_CASE("partition norms default to Euclidean and honor custom norms") {
  ComponentPartition p;
  p.add("a", 2);
  p.add("b", 2, [](ConstVectorRef v) { return v.cwiseAbs().maxCoeff(); });

  Eigen::VectorXd v(4);
  v << 3.0, 4.0, -7.0, 2.0;
  CHECK(p.norm("a", v.head(2)) == doctest::Approx(5.0));
  CHECK(p.norm("b", v.tail(2)) == doctest::Approx(7.0));

  Eigen::VectorXd wrong(3);
  wrong.setZero();
  CHECK_THROWS_AS((void)p.norm("a", wrong), LayoutError);
  CHECK_THROWS_AS((void)p.norm("missing", v.head(2)), InvalidInputError);
}

TEST_CASE("state construction is checked against the layout") {
  auto layout = layout_of({{"u", 3}});
  CHECK_THROWS_AS((void)make_state(layout, Eigen::VectorXd::Zero(2)), LayoutError);

  auto s = zero_state(layout);
  CHECK(s.size() == 3);
  CHECK(s.values.norm() == 0.0);

  auto other = zero_state(layout_of({{"v", 3}}));
  CHECK(!same_layout(s, other));
  CHECK_THROWS_AS(require_same_layout(s, other, "test"), LayoutError);
}

TEST_CASE("jacobian check accepts a correct jacobian") {
  // The saddle DAE has a nontrivial shifted Jacobian: sigma M in the
  // differential block, none in the algebraic block.
  auto problem = make_linear_saddle_dae();
  const double t = 0.8;
  const auto u = problem->exact_state(t);
  const auto udot = problem->exact_derivative(t);
  const double mismatch = check_jacobian(*problem, t, udot, u, 120.0);
  CHECK(mismatch < 1e-6);
}

TEST_CASE("jacobian check flags a wrong shift") {
  // Evaluate the Jacobian with one shift but difference with another: the
  // probe must notice the disagreement in the differential rows.
  class WrongShift final : public ManufacturedProblem {
   public:
    WrongShift() : inner_(make_linear_saddle_dae()) {}
    std::shared_ptr<const ComponentPartition> partition() const override {
      return inner_->partition();
    }
    StateVector initial_state(double t0) const override { return inner_->initial_state(t0); }
    StateVector exact_state(double t) const override { return inner_->exact_state(t); }
    StateVector exact_derivative(double t) const override {
      return inner_->exact_derivative(t);
    }
    std::string description() const override { return "wrong shift"; }
    Vector residual(double t, const StateVector& udot, const StateVector& u) const override {
      return inner_->residual(t, udot, u);
    }
    Eigen::SparseMatrix<double> jacobian(double t, const StateVector& udot,
                                         const StateVector& u, double shift) const override {
      return inner_->jacobian(t, udot, u, 0.5 * shift);
    }

   private:
    std::shared_ptr<ManufacturedProblem> inner_;
  };

  WrongShift problem;
  const double t = 0.8;
  const auto u = problem.exact_state(t);
  const auto udot = problem.exact_derivative(t);
  CHECK(check_jacobian(problem, t, udot, u, 120.0) > 1e-2);
}

TEST_CASE("problem norm delegates to the partition") {
  auto problem = make_linear_saddle_dae();
  Eigen::VectorXd v(8);
  v.setConstant(2.0);
  CHECK(problem->l2_norm("velocity", v) == doctest::Approx(std::sqrt(32.0)));
}
