#include "tadapt/newton.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <utility>

#include "tadapt/instrumentation.hpp"

namespace tadapt {

double NewtonConfig::effective_abs_tol(Eigen::Index n) const {
  if (abs_tol > 0.0) return abs_tol;
  return 1e-10 * std::sqrt(static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

struct SparseFactorization::Impl {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SparseFactorization::SparseFactorization(const Eigen::SparseMatrix<double>& matrix)
    : impl_(std::make_unique<Impl>()), rows_(matrix.rows()) {
  if (matrix.rows() != matrix.cols()) {
    throw InvalidInputError("factorize: matrix must be square");
  }
  Eigen::SparseMatrix<double> compressed = matrix;
  compressed.makeCompressed();
  impl_->lu.compute(compressed);
  ++work_counters().factorizations;
  if (impl_->lu.info() != Eigen::Success) {
    throw LinearSolverError("sparse LU failed: " + impl_->lu.lastErrorMessage());
  }
}

SparseFactorization::~SparseFactorization() = default;
SparseFactorization::SparseFactorization(SparseFactorization&&) noexcept = default;
SparseFactorization& SparseFactorization::operator=(SparseFactorization&&) noexcept =
    default;

Vector SparseFactorization::solve(ConstVectorRef rhs) const {
  if (rhs.size() != rows_) {
    throw InvalidInputError("back solve: right hand side has wrong length");
  }
  ++work_counters().back_solves;
  Vector x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success) {
    throw LinearSolverError("sparse LU back substitution failed");
  }
  return x;
}

NewtonResult solve_implicit_step(const Problem& problem, const BdfStencil& stencil,
                                 const HistoryBuffer& history, double t_new,
                                 const StateVector& guess, const NewtonConfig& config) {
  if (history.size() < static_cast<std::size_t>(stencil.order)) {
    throw HistoryUnderflowError("solve_implicit_step: history shorter than stencil");
  }
  {
    const double implied = t_new - history.time(0);
    if (std::abs(implied - stencil.steps[0]) > 1e-10 * std::max(1.0, std::abs(t_new))) {
      throw InvalidInputError("solve_implicit_step: t_new inconsistent with stencil step");
    }
  }

  NewtonResult result;
  result.state = StateVector{guess.values, guess.layout};
  problem.apply_time_dependent_constraints(t_new, result.state);

  const Eigen::Index n = result.state.size();
  const double abs_tol = config.effective_abs_tol(n);

  double first_norm2 = -1.0;
  for (int iter = 0; iter <= config.max_iterations; ++iter) {
    const StateVector udot = apply_xi(stencil, result.state, history);
    ++work_counters().residual_evals;
    const Vector r = problem.residual(t_new, udot, result.state);
    if (!r.allFinite()) {
      result.message = "residual is not finite";
      return result;
    }
    const double norm_inf = r.cwiseAbs().maxCoeff();
    const double norm2 = r.norm();
    if (first_norm2 < 0.0) first_norm2 = norm2;

    result.iterations = iter;
    result.residual_norm = norm_inf;
    if (norm_inf <= abs_tol || norm2 <= config.rel_tol * first_norm2) {
      result.converged = true;
      return result;
    }
    if (iter == config.max_iterations) break;

    ++work_counters().jacobian_evals;
    const Eigen::SparseMatrix<double> jac =
        problem.jacobian(t_new, udot, result.state, stencil.shift());
    Vector delta;
    try {
      delta = SparseFactorization(jac).solve(-r);
    } catch (const LinearSolverError& err) {
      result.message = err.what();
      return result;
    }

    // Halve the update while it would leave the admissible region entirely
    // (non-finite trial state). This is a crash guard, not a line search.
    double lambda = config.damping;
    Vector trial = result.state.values + lambda * delta;
    for (int halvings = 0; !trial.allFinite() && halvings < 4; ++halvings) {
      lambda *= 0.5;
      trial = result.state.values + lambda * delta;
    }
    if (!trial.allFinite()) {
      result.message = "update is not finite";
      return result;
    }
    result.state.values = std::move(trial);
    problem.apply_time_dependent_constraints(t_new, result.state);
  }

  result.message = "no convergence in " + std::to_string(config.max_iterations) +
                   " iterations (residual " + std::to_string(result.residual_norm) + ")";
  return result;
}

}  // namespace tadapt
