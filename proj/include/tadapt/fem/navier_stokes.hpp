#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tadapt/fem/taylor_hood.hpp"
#include "tadapt/problem.hpp"

namespace tadapt::fem {

/// Time-dependent plane field (x, y, t) -> value.
using VectorField = std::function<Eigen::Vector2d(double, double, double)>;
using ScalarField = std::function<double(double, double, double)>;

/// What happens to the velocity on one tagged part of the boundary.
struct VelocityBc {
  enum class Kind {
    open,       ///< natural do-nothing outflow
    dirichlet,  ///< velocity prescribed strongly
    traction,   ///< boundary stress prescribed weakly
  };
  Kind kind = Kind::open;
  VectorField velocity;  ///< used when kind == dirichlet
  VectorField traction;  ///< used when kind == traction
};

struct NsOptions {
  double viscosity = 1.0;
  /// Stokes limit switch: drops the nonlinear advection term entirely.
  bool include_advection = true;
  std::map<BoundaryTag, VelocityBc> boundary;
  /// Optional body force density.
  VectorField forcing;
  /// Strong pin of one pressure value, needed only when every boundary is
  /// Dirichlet and the pressure level would otherwise float.
  struct PressurePin {
    Eigen::Index vertex = 0;
    std::function<double(double)> value;  ///< pinned value as a function of time
  };
  std::optional<PressurePin> pressure_pin;
};

/// Incompressible Navier-Stokes on a Taylor-Hood space, in the fully
/// implicit form R(Udot, U, t) = 0 the time integrator consumes:
///
///   velocity rows:  M udot + nu A u + C(u) u + B^T p - loads(t)
///   pressure rows:  B u
///
/// where B is the pressure-velocity coupling with entries -(q, div v).
/// Dirichlet velocity rows (and the optional pressure pin) are replaced by
/// u_i - g_i(t). Component norms are the mass-matrix L2 norms of the fields,
/// so error estimates read as physical function norms.
class NavierStokesProblem : public Problem {
 public:
  NavierStokesProblem(std::shared_ptr<const TaylorHoodSpace> space, NsOptions options);

  [[nodiscard]] std::shared_ptr<const ComponentPartition> partition() const override;
  [[nodiscard]] StateVector initial_state(double t0) const override;
  [[nodiscard]] Vector residual(double t, const StateVector& udot,
                                const StateVector& u) const override;
  [[nodiscard]] Eigen::SparseMatrix<double> jacobian(double t, const StateVector& udot,
                                                     const StateVector& u,
                                                     double shift) const override;
  void apply_time_dependent_constraints(double t, StateVector& u) const override;
  [[nodiscard]] const std::vector<Eigen::Index>& constrained_dofs() const override;

  [[nodiscard]] const TaylorHoodSpace& space() const { return *space_; }
  [[nodiscard]] const NsOptions& options() const { return options_; }

  /// Assembled constant operators, full rows (no boundary row replacement).
  [[nodiscard]] const Eigen::SparseMatrix<double>& velocity_mass() const { return *mass_v_; }
  [[nodiscard]] const Eigen::SparseMatrix<double>& pressure_mass() const { return *mass_p_; }
  /// nu-scaled vector Laplacian.
  [[nodiscard]] const Eigen::SparseMatrix<double>& viscous_matrix() const { return visc_; }
  /// Coupling B (pressure rows by velocity columns), entries -(q, div v).
  [[nodiscard]] const Eigen::SparseMatrix<double>& coupling_matrix() const { return coupling_; }

  /// Nodal interpolant of analytic fields at time t.
  [[nodiscard]] StateVector interpolate(double t, const VectorField& velocity,
                                        const ScalarField& pressure) const;

  /// Assembled body-force and boundary-traction load vector at time t
  /// (velocity rows only; the subtracted term of the residual).
  [[nodiscard]] Vector loads(double t) const;

  /// L2 norm of the velocity divergence of a state.
  [[nodiscard]] double divergence_l2(const StateVector& u) const;

  /// Trilinear advection form ((a . grad) b, c) over the velocity fields of
  /// three states, evaluated with the same quadrature the residual uses.
  [[nodiscard]] double advection_form(const StateVector& a, const StateVector& b,
                                      const StateVector& c) const;

 private:
  void assemble_constant_operators();
  void add_advection_residual(const Vector& u, Vector& r) const;
  void add_advection_jacobian(const Vector& u,
                              std::vector<Eigen::Triplet<double>>& triplets) const;
  [[nodiscard]] const VelocityBc& bc_for(BoundaryTag tag) const;

  std::shared_ptr<const TaylorHoodSpace> space_;
  NsOptions options_;
  std::shared_ptr<ComponentPartition> partition_;

  // Shared so the partition's norm callbacks can outlive this object.
  std::shared_ptr<const Eigen::SparseMatrix<double>> mass_v_;  // velocity block
  std::shared_ptr<const Eigen::SparseMatrix<double>> mass_p_;  // pressure block
  Eigen::SparseMatrix<double> visc_;      // velocity block only
  Eigen::SparseMatrix<double> coupling_;  // pressure rows x velocity columns

  /// Linear, time-independent part of dR/dU with constrained rows removed
  /// and replaced by unit diagonals, as triplets ready to reassemble.
  std::vector<Eigen::Triplet<double>> jacobian_const_triplets_;
  /// dR/dUdot triplets (the velocity mass), constrained rows removed; the
  /// jacobian call scales these by the stencil shift.
  std::vector<Eigen::Triplet<double>> mass_triplets_;
  /// Full-size operators for the residual's sparse matvec path.
  Eigen::SparseMatrix<double> full_linear_;  // [[nu A, B^T], [B, 0]]
  Eigen::SparseMatrix<double> full_mass_;    // [[M, 0], [0, 0]]

  std::vector<Eigen::Index> constrained_;       // sorted
  std::vector<char> is_constrained_;            // size = total dofs
  std::vector<std::pair<Eigen::Index, BoundaryTag>> dirichlet_nodes_;
};

/// Parabolic inflow for the backward-facing step, ramped smoothly from rest
/// over one second: (phi(t) * (20/9) (y-2)(5-y), 0) with
/// phi(t) = (1 - cos(pi t)) / 2 for t <= 1 and 1 afterwards.
[[nodiscard]] Eigen::Vector2d step_inflow_velocity(double t, double y);

/// Inlet pressure impulse for the straight channel: 5 (1 - cos(pi t / 0.2))
/// for t <= 0.1, then the plateau value 5.
[[nodiscard]] double channel_inlet_pressure(double t);

/// Flow over a backward-facing step at nu = 0.05: ramped parabolic inflow,
/// no-slip walls, free outflow. Starts from rest, which is consistent
/// because the inflow ramp starts at zero.
[[nodiscard]] std::unique_ptr<NavierStokesProblem> make_backward_step_problem(
    int refine, bool include_advection = true, double viscosity = 0.05);

/// Straight channel at nu = 0.035 driven by an impulsively ramped inlet
/// pressure (traction -p_in(t) n), no-slip walls, free outflow. The fast
/// ramp makes the pressure field carry the dynamics early on.
[[nodiscard]] std::unique_ptr<NavierStokesProblem> make_pressure_channel_problem(
    int refine, bool include_advection = true, double viscosity = 0.035);

/// Smooth divergence-free reference fields on the unit square plus the body
/// force that makes them solve the steady Stokes equations at the given
/// viscosity: velocity is the curl of sin(pi x) sin(pi y), pressure is
/// sin(pi x) cos(pi y) (zero mean).
struct ManufacturedStokesFields {
  VectorField velocity;
  ScalarField pressure;
  VectorField forcing;
};
[[nodiscard]] ManufacturedStokesFields manufactured_stokes_fields(double viscosity);

/// Steady Stokes problem on the unit square whose exact solution is the
/// manufactured field above: Dirichlet velocity everywhere, pressure pinned
/// at vertex 0 to its exact value, advection off.
[[nodiscard]] std::unique_ptr<NavierStokesProblem> make_manufactured_stokes_problem(
    int cells_per_side, double viscosity = 1.0);

}  // namespace tadapt::fem
