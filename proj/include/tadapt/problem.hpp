#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

#include "tadapt/types.hpp"

namespace tadapt {

/// A semi-discrete differential-algebraic system in fully implicit form
///
///   R(Udot, U, t) = 0.
///
/// Rows follow the same component layout as the state. Algebraic rows (e.g.
/// the incompressibility constraint) simply do not involve Udot.
class Problem {
 public:
  virtual ~Problem() = default;

  [[nodiscard]] virtual std::shared_ptr<const ComponentPartition> partition() const = 0;

  /// Consistent state at the start time.
  [[nodiscard]] virtual StateVector initial_state(double t0) const = 0;

  [[nodiscard]] virtual Vector residual(double t, const StateVector& udot,
                                        const StateVector& u) const = 0;

  /// Shifted Jacobian  shift * dR/dUdot + dR/dU  evaluated at (t, udot, u).
  /// The shift is the leading stencil weight of the time discretization.
  [[nodiscard]] virtual Eigen::SparseMatrix<double> jacobian(double t,
                                                             const StateVector& udot,
                                                             const StateVector& u,
                                                             double shift) const = 0;

  /// Overwrites strongly constrained entries of u with their prescribed
  /// values at time t. Default: nothing is constrained.
  virtual void apply_time_dependent_constraints(double t, StateVector& u) const {
    (void)t;
    (void)u;
  }

  /// Indices of strongly constrained entries (rows the solver should not
  /// read error out of). Default: none.
  [[nodiscard]] virtual const std::vector<Eigen::Index>& constrained_dofs() const {
    static const std::vector<Eigen::Index> none;
    return none;
  }

  [[nodiscard]] Eigen::Index size() const { return partition()->size(); }

  /// Norm of one component slice, delegating to the partition (which may
  /// carry, e.g., a mass-matrix norm for finite element fields).
  [[nodiscard]] double l2_norm(std::string_view component, ConstVectorRef slice) const {
    return partition()->norm(component, slice);
  }
};

/// Compares the analytic shifted Jacobian against central finite differences
/// of the residual along a handful of deterministic probe directions, where a
/// probe perturbs U by h*d and Udot by shift*h*d so that the combination
/// matches what the Jacobian claims. Returns the largest relative mismatch.
[[nodiscard]] double check_jacobian(const Problem& problem, double t,
                                    const StateVector& udot, const StateVector& u,
                                    double shift, int probes = 5,
                                    double relative_step = 1e-6);

}  // namespace tadapt
