#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <string>

#include "tadapt/bdf.hpp"
#include "tadapt/problem.hpp"
#include "tadapt/types.hpp"

namespace tadapt {

struct NewtonConfig {
  /// Absolute tolerance on the residual max norm. Nonpositive means pick
  /// 1e-10 * sqrt(N) so the threshold scales with problem size.
  double abs_tol = 0.0;
  /// Relative drop of the residual 2-norm against the first iterate.
  double rel_tol = 1e-8;
  int max_iterations = 20;
  /// Initial scaling of the Newton update; halved while the trial state is
  /// not finite.
  double damping = 1.0;

  [[nodiscard]] double effective_abs_tol(Eigen::Index n) const;
};

/// Owns a sparse LU decomposition. Construction throws LinearSolverError on
/// a singular matrix, quoting the solver's diagnostic (which names the failed
/// pivot column).
class SparseFactorization {
 public:
  explicit SparseFactorization(const Eigen::SparseMatrix<double>& matrix);
  ~SparseFactorization();
  SparseFactorization(SparseFactorization&&) noexcept;
  SparseFactorization& operator=(SparseFactorization&&) noexcept;
  SparseFactorization(const SparseFactorization&) = delete;
  SparseFactorization& operator=(const SparseFactorization&) = delete;

  [[nodiscard]] Vector solve(ConstVectorRef rhs) const;
  [[nodiscard]] Eigen::Index rows() const { return rows_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Eigen::Index rows_ = 0;
};

[[nodiscard]] inline SparseFactorization factorize(const Eigen::SparseMatrix<double>& m) {
  return SparseFactorization(m);
}

[[nodiscard]] inline Vector back_solve(const SparseFactorization& f, ConstVectorRef rhs) {
  return f.solve(rhs);
}

struct NewtonResult {
  StateVector state;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;  // max norm at exit
  std::string message;         // empty on success
};

/// Solves the implicit step R(Xi(U), U, t_new) = 0 for the new state U, where
/// Xi applies the given stencil against the history. The guess is typically
/// an extrapolation of the history; strongly constrained entries are pinned
/// to their prescribed values before the first residual evaluation.
///
/// A singular Jacobian or a non-finite residual is reported as
/// converged = false rather than thrown, so callers can shrink the step and
/// retry.
[[nodiscard]] NewtonResult solve_implicit_step(const Problem& problem,
                                               const BdfStencil& stencil,
                                               const HistoryBuffer& history,
                                               double t_new, const StateVector& guess,
                                               const NewtonConfig& config = {});

}  // namespace tadapt
