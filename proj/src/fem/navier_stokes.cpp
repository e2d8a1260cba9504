#include "tadapt/fem/navier_stokes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace tadapt::fem {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

ComponentNorm mass_norm(std::shared_ptr<const SpMat> m) {
  return [m = std::move(m)](ConstVectorRef x) {
    const Vector mx = (*m) * x;
    return std::sqrt(std::max(0.0, x.dot(mx)));
  };
}

const std::array<BoundaryTag, 3> kAllTags = {BoundaryTag::inlet, BoundaryTag::outlet,
                                             BoundaryTag::wall};

}  // namespace

NavierStokesProblem::NavierStokesProblem(std::shared_ptr<const TaylorHoodSpace> space,
                                         NsOptions options)
    : space_(std::move(space)), options_(std::move(options)) {
  if (!space_) throw InvalidInputError("flow problem: null space");
  if (!(options_.viscosity > 0.0)) {
    throw InvalidInputError("flow problem: viscosity must be positive");
  }
  for (const auto& [tag, bc] : options_.boundary) {
    if (bc.kind == VelocityBc::Kind::dirichlet && !bc.velocity) {
      throw InvalidInputError(std::string("flow problem: Dirichlet boundary '") +
                              to_string(tag) + "' needs a velocity callback");
    }
    if (bc.kind == VelocityBc::Kind::traction && !bc.traction) {
      throw InvalidInputError(std::string("flow problem: traction boundary '") +
                              to_string(tag) + "' needs a traction callback");
    }
  }
  if (options_.pressure_pin) {
    const auto& pin = *options_.pressure_pin;
    if (pin.vertex < 0 || pin.vertex >= space_->vertex_count()) {
      throw InvalidInputError("flow problem: pressure pin vertex out of range");
    }
    if (!pin.value) throw InvalidInputError("flow problem: pressure pin needs a value");
  }

  // Strongly constrained rows. Tags are visited in a fixed order so that a
  // corner node shared by two Dirichlet boundaries is applied
  // deterministically; the prescribed values must agree there.
  is_constrained_.assign(static_cast<std::size_t>(space_->total_dof_count()), 0);
  for (const BoundaryTag tag : kAllTags) {
    if (bc_for(tag).kind != VelocityBc::Kind::dirichlet) continue;
    for (const int node : space_->boundary_nodes(tag)) {
      dirichlet_nodes_.emplace_back(node, tag);
      is_constrained_[static_cast<std::size_t>(space_->velocity_dof(node, 0))] = 1;
      is_constrained_[static_cast<std::size_t>(space_->velocity_dof(node, 1))] = 1;
    }
  }
  if (options_.pressure_pin) {
    is_constrained_[static_cast<std::size_t>(
        space_->pressure_dof(options_.pressure_pin->vertex))] = 1;
  }
  for (Eigen::Index i = 0; i < space_->total_dof_count(); ++i) {
    if (is_constrained_[static_cast<std::size_t>(i)]) constrained_.push_back(i);
  }

  assemble_constant_operators();

  auto partition = std::make_shared<ComponentPartition>();
  partition->add("velocity", space_->velocity_dof_count(), mass_norm(mass_v_));
  partition->add("pressure", space_->pressure_dof_count(), mass_norm(mass_p_));
  partition_ = std::move(partition);
}

const VelocityBc& NavierStokesProblem::bc_for(BoundaryTag tag) const {
  static const VelocityBc open{};
  const auto it = options_.boundary.find(tag);
  return it == options_.boundary.end() ? open : it->second;
}

void NavierStokesProblem::assemble_constant_operators() {
  const Eigen::Index nu = space_->velocity_dof_count();
  const Eigen::Index np = space_->pressure_dof_count();
  const Eigen::Index total = space_->total_dof_count();
  const TriangleQuadrature& quad = triangle_quadrature();
  const auto& q2 = space_->q2_values();
  const auto& q1 = space_->q1_values();

  std::vector<Triplet> tm, ta, tb, tmp;
  for (Eigen::Index t = 0; t < space_->element_count(); ++t) {
    const auto& el = space_->element(t);
    Eigen::Matrix<double, 6, 6> mloc = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> aloc = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 3, 12> bloc = Eigen::Matrix<double, 3, 12>::Zero();
    Eigen::Matrix3d mploc = Eigen::Matrix3d::Zero();
    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const double s = el.area * quad.weights(q);
      const auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      mloc += s * (q2.row(q).transpose() * q2.row(q));
      aloc += s * (g * g.transpose());
      mploc += s * (q1.row(q).transpose() * q1.row(q));
      for (int l = 0; l < 3; ++l) {
        for (int b = 0; b < 6; ++b) {
          bloc(l, 2 * b) -= s * q1(q, l) * g(b, 0);
          bloc(l, 2 * b + 1) -= s * q1(q, l) * g(b, 1);
        }
      }
    }
    for (int a = 0; a < 6; ++a) {
      const Eigen::Index na = el.nodes[static_cast<std::size_t>(a)];
      for (int b = 0; b < 6; ++b) {
        const Eigen::Index nb = el.nodes[static_cast<std::size_t>(b)];
        for (int i = 0; i < 2; ++i) {
          tm.emplace_back(space_->velocity_dof(na, i), space_->velocity_dof(nb, i),
                          mloc(a, b));
          ta.emplace_back(space_->velocity_dof(na, i), space_->velocity_dof(nb, i),
                          options_.viscosity * aloc(a, b));
        }
      }
    }
    for (int l = 0; l < 3; ++l) {
      const Eigen::Index vl = el.nodes[static_cast<std::size_t>(l)];  // vertex id
      for (int b = 0; b < 6; ++b) {
        const Eigen::Index nb = el.nodes[static_cast<std::size_t>(b)];
        for (int j = 0; j < 2; ++j) {
          tb.emplace_back(vl, space_->velocity_dof(nb, j), bloc(l, 2 * b + j));
        }
      }
      for (int k = 0; k < 3; ++k) {
        tmp.emplace_back(vl, el.nodes[static_cast<std::size_t>(k)], mploc(l, k));
      }
    }
  }

  auto mass_v = std::make_shared<SpMat>(nu, nu);
  mass_v->setFromTriplets(tm.begin(), tm.end());
  mass_v_ = std::move(mass_v);
  visc_.resize(nu, nu);
  visc_.setFromTriplets(ta.begin(), ta.end());
  coupling_.resize(np, nu);
  coupling_.setFromTriplets(tb.begin(), tb.end());
  auto mass_p = std::make_shared<SpMat>(np, np);
  mass_p->setFromTriplets(tmp.begin(), tmp.end());
  mass_p_ = std::move(mass_p);

  // Full-size linear part [[nu A, B^T], [B, 0]] and mass [[M, 0], [0, 0]],
  // once with untouched rows for the residual matvec, once as triplets with
  // constrained rows swapped for unit diagonals for the Jacobian.
  std::vector<Triplet> linear_full, linear_masked, mass_full;
  const auto push = [this](std::vector<Triplet>& full, std::vector<Triplet>& masked,
                           Eigen::Index row, Eigen::Index col, double value) {
    full.emplace_back(row, col, value);
    if (!is_constrained_[static_cast<std::size_t>(row)]) masked.emplace_back(row, col, value);
  };
  for (Eigen::Index k = 0; k < visc_.outerSize(); ++k) {
    for (SpMat::InnerIterator it(visc_, k); it; ++it) {
      push(linear_full, linear_masked, it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index k = 0; k < coupling_.outerSize(); ++k) {
    for (SpMat::InnerIterator it(coupling_, k); it; ++it) {
      push(linear_full, linear_masked, nu + it.row(), it.col(), it.value());
      push(linear_full, linear_masked, it.col(), nu + it.row(), it.value());
    }
  }
  for (const Eigen::Index i : constrained_) {
    linear_masked.emplace_back(i, i, 1.0);
  }
  for (Eigen::Index k = 0; k < mass_v_->outerSize(); ++k) {
    for (SpMat::InnerIterator it(*mass_v_, k); it; ++it) {
      mass_full.emplace_back(it.row(), it.col(), it.value());
      if (!is_constrained_[static_cast<std::size_t>(it.row())]) {
        mass_triplets_.emplace_back(it.row(), it.col(), it.value());
      }
    }
  }
  full_linear_.resize(total, total);
  full_linear_.setFromTriplets(linear_full.begin(), linear_full.end());
  full_mass_.resize(total, total);
  full_mass_.setFromTriplets(mass_full.begin(), mass_full.end());
  jacobian_const_triplets_ = std::move(linear_masked);
}

std::shared_ptr<const ComponentPartition> NavierStokesProblem::partition() const {
  return partition_;
}

StateVector NavierStokesProblem::initial_state(double t0) const {
  StateVector state = zero_state(partition_);
  apply_time_dependent_constraints(t0, state);
  return state;
}

void NavierStokesProblem::apply_time_dependent_constraints(double t, StateVector& u) const {
  if (u.values.size() != partition_->size()) {
    throw LayoutError("flow problem: state size does not match the space");
  }
  const auto& coords = space_->node_coords();
  for (const auto& [node, tag] : dirichlet_nodes_) {
    const Eigen::Vector2d g = bc_for(tag).velocity(coords(node, 0), coords(node, 1), t);
    u.values[space_->velocity_dof(node, 0)] = g.x();
    u.values[space_->velocity_dof(node, 1)] = g.y();
  }
  if (options_.pressure_pin) {
    u.values[space_->pressure_dof(options_.pressure_pin->vertex)] =
        options_.pressure_pin->value(t);
  }
}

const std::vector<Eigen::Index>& NavierStokesProblem::constrained_dofs() const {
  return constrained_;
}

Vector NavierStokesProblem::loads(double t) const {
  Vector f = Vector::Zero(partition_->size());
  if (options_.forcing) {
    const TriangleQuadrature& quad = triangle_quadrature();
    const auto& q2 = space_->q2_values();
    for (Eigen::Index e = 0; e < space_->element_count(); ++e) {
      const auto& el = space_->element(e);
      Eigen::Matrix<double, 6, 2> floc = Eigen::Matrix<double, 6, 2>::Zero();
      for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
        const Eigen::Vector2d& x = el.points[static_cast<std::size_t>(q)];
        const Eigen::Vector2d fq = options_.forcing(x.x(), x.y(), t);
        floc += (el.area * quad.weights(q)) * (q2.row(q).transpose() * fq.transpose());
      }
      for (int n = 0; n < 6; ++n) {
        const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
        f[space_->velocity_dof(node, 0)] += floc(n, 0);
        f[space_->velocity_dof(node, 1)] += floc(n, 1);
      }
    }
  }
  const auto& coords = space_->node_coords();
  for (const auto& facet : space_->boundary_facets()) {
    const VelocityBc& bc = bc_for(facet.tag);
    if (bc.kind != VelocityBc::Kind::traction) continue;
    // Exact edge integrals of a quadratic test function against the
    // edge-interpolated traction: ends carry length/6, the midpoint 2/3.
    const std::array<std::pair<int, double>, 3> nodes = {
        std::pair{facet.a, facet.length / 6.0},
        std::pair{facet.b, facet.length / 6.0},
        std::pair{facet.mid, 2.0 * facet.length / 3.0},
    };
    for (const auto& [node, weight] : nodes) {
      const Eigen::Vector2d tr = bc.traction(coords(node, 0), coords(node, 1), t);
      f[space_->velocity_dof(node, 0)] += weight * tr.x();
      f[space_->velocity_dof(node, 1)] += weight * tr.y();
    }
  }
  return f;
}

void NavierStokesProblem::add_advection_residual(const Vector& u, Vector& r) const {
  const TriangleQuadrature& quad = triangle_quadrature();
  const auto& q2 = space_->q2_values();
  for (Eigen::Index e = 0; e < space_->element_count(); ++e) {
    const auto& el = space_->element(e);
    Eigen::Matrix<double, 6, 2> u_loc;
    for (int n = 0; n < 6; ++n) {
      const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
      u_loc(n, 0) = u[space_->velocity_dof(node, 0)];
      u_loc(n, 1) = u[space_->velocity_dof(node, 1)];
    }
    Eigen::Matrix<double, 6, 2> r_loc = Eigen::Matrix<double, 6, 2>::Zero();
    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      const Eigen::Vector2d uq = u_loc.transpose() * q2.row(q).transpose();
      const Eigen::Matrix2d grad = u_loc.transpose() * g;  // (i,j) = du_i/dx_j
      const Eigen::Vector2d conv = grad * uq;
      r_loc += (el.area * quad.weights(q)) * (q2.row(q).transpose() * conv.transpose());
    }
    for (int n = 0; n < 6; ++n) {
      const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
      r[space_->velocity_dof(node, 0)] += r_loc(n, 0);
      r[space_->velocity_dof(node, 1)] += r_loc(n, 1);
    }
  }
}

void NavierStokesProblem::add_advection_jacobian(const Vector& u,
                                                 std::vector<Triplet>& triplets) const {
  const TriangleQuadrature& quad = triangle_quadrature();
  const auto& q2 = space_->q2_values();
  for (Eigen::Index e = 0; e < space_->element_count(); ++e) {
    const auto& el = space_->element(e);
    Eigen::Matrix<double, 6, 2> u_loc;
    for (int n = 0; n < 6; ++n) {
      const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
      u_loc(n, 0) = u[space_->velocity_dof(node, 0)];
      u_loc(n, 1) = u[space_->velocity_dof(node, 1)];
    }
    Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      const Eigen::Matrix<double, 6, 1> nv = q2.row(q).transpose();
      const Eigen::Vector2d uq = u_loc.transpose() * nv;
      const Eigen::Matrix2d grad = u_loc.transpose() * g;
      const Eigen::Matrix<double, 6, 1> adv = g * uq;  // (u . grad) N_b
      const double s = el.area * quad.weights(q);
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          const double nanb = s * nv(a) * nv(b);
          const double diag = s * nv(a) * adv(b);
          k(2 * a, 2 * b) += nanb * grad(0, 0) + diag;
          k(2 * a, 2 * b + 1) += nanb * grad(0, 1);
          k(2 * a + 1, 2 * b) += nanb * grad(1, 0);
          k(2 * a + 1, 2 * b + 1) += nanb * grad(1, 1) + diag;
        }
      }
    }
    for (int a = 0; a < 6; ++a) {
      for (int i = 0; i < 2; ++i) {
        const Eigen::Index row =
            space_->velocity_dof(el.nodes[static_cast<std::size_t>(a)], i);
        if (is_constrained_[static_cast<std::size_t>(row)]) continue;
        for (int b = 0; b < 6; ++b) {
          const Eigen::Index nb = el.nodes[static_cast<std::size_t>(b)];
          triplets.emplace_back(row, space_->velocity_dof(nb, 0), k(2 * a + i, 2 * b));
          triplets.emplace_back(row, space_->velocity_dof(nb, 1), k(2 * a + i, 2 * b + 1));
        }
      }
    }
  }
}

Vector NavierStokesProblem::residual(double t, const StateVector& udot,
                                     const StateVector& u) const {
  if (u.values.size() != partition_->size() || udot.values.size() != partition_->size()) {
    throw LayoutError("flow problem: state size does not match the space");
  }
  Vector r = full_mass_ * udot.values + full_linear_ * u.values;
  if (options_.include_advection) add_advection_residual(u.values, r);
  r -= loads(t);
  const auto& coords = space_->node_coords();
  for (const auto& [node, tag] : dirichlet_nodes_) {
    const Eigen::Vector2d g = bc_for(tag).velocity(coords(node, 0), coords(node, 1), t);
    r[space_->velocity_dof(node, 0)] = u.values[space_->velocity_dof(node, 0)] - g.x();
    r[space_->velocity_dof(node, 1)] = u.values[space_->velocity_dof(node, 1)] - g.y();
  }
  if (options_.pressure_pin) {
    const Eigen::Index dof = space_->pressure_dof(options_.pressure_pin->vertex);
    r[dof] = u.values[dof] - options_.pressure_pin->value(t);
  }
  return r;
}

Eigen::SparseMatrix<double> NavierStokesProblem::jacobian(double /*t*/,
                                                          const StateVector& /*udot*/,
                                                          const StateVector& u,
                                                          double shift) const {
  if (u.values.size() != partition_->size()) {
    throw LayoutError("flow problem: state size does not match the space");
  }
  std::vector<Triplet> triplets = jacobian_const_triplets_;
  triplets.reserve(triplets.size() + mass_triplets_.size() +
                   (options_.include_advection ? 144 * space_->element_count() : 0));
  for (const Triplet& m : mass_triplets_) {
    triplets.emplace_back(m.row(), m.col(), shift * m.value());
  }
  if (options_.include_advection) add_advection_jacobian(u.values, triplets);
  SpMat j(partition_->size(), partition_->size());
  j.setFromTriplets(triplets.begin(), triplets.end());
  return j;
}

StateVector NavierStokesProblem::interpolate(double t, const VectorField& velocity,
                                             const ScalarField& pressure) const {
  if (!velocity || !pressure) throw InvalidInputError("interpolate: need both fields");
  StateVector state = zero_state(partition_);
  const auto& coords = space_->node_coords();
  for (Eigen::Index n = 0; n < space_->node_count(); ++n) {
    const Eigen::Vector2d v = velocity(coords(n, 0), coords(n, 1), t);
    state.values[space_->velocity_dof(n, 0)] = v.x();
    state.values[space_->velocity_dof(n, 1)] = v.y();
  }
  const auto& verts = space_->mesh().vertices;
  for (Eigen::Index v = 0; v < space_->vertex_count(); ++v) {
    state.values[space_->pressure_dof(v)] = pressure(verts(v, 0), verts(v, 1), t);
  }
  return state;
}

double NavierStokesProblem::divergence_l2(const StateVector& u) const {
  if (u.values.size() != partition_->size()) {
    throw LayoutError("divergence_l2: state size does not match the space");
  }
  const TriangleQuadrature& quad = triangle_quadrature();
  double acc = 0.0;
  for (Eigen::Index e = 0; e < space_->element_count(); ++e) {
    const auto& el = space_->element(e);
    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      double div = 0.0;
      for (int n = 0; n < 6; ++n) {
        const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
        div += u.values[space_->velocity_dof(node, 0)] * g(n, 0) +
               u.values[space_->velocity_dof(node, 1)] * g(n, 1);
      }
      acc += el.area * quad.weights(q) * div * div;
    }
  }
  return std::sqrt(acc);
}

double NavierStokesProblem::advection_form(const StateVector& a, const StateVector& b,
                                           const StateVector& c) const {
  for (const StateVector* s : {&a, &b, &c}) {
    if (s->values.size() != partition_->size()) {
      throw LayoutError("advection_form: state size does not match the space");
    }
  }
  const TriangleQuadrature& quad = triangle_quadrature();
  const auto& q2 = space_->q2_values();
  double acc = 0.0;
  for (Eigen::Index e = 0; e < space_->element_count(); ++e) {
    const auto& el = space_->element(e);
    Eigen::Matrix<double, 6, 2> a_loc, b_loc, c_loc;
    for (int n = 0; n < 6; ++n) {
      const Eigen::Index node = el.nodes[static_cast<std::size_t>(n)];
      for (int i = 0; i < 2; ++i) {
        a_loc(n, i) = a.values[space_->velocity_dof(node, i)];
        b_loc(n, i) = b.values[space_->velocity_dof(node, i)];
        c_loc(n, i) = c.values[space_->velocity_dof(node, i)];
      }
    }
    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      const Eigen::Matrix<double, 6, 1> nv = q2.row(q).transpose();
      const Eigen::Vector2d aq = a_loc.transpose() * nv;
      const Eigen::Vector2d cq = c_loc.transpose() * nv;
      const Eigen::Matrix2d grad_b = b_loc.transpose() * g;
      acc += el.area * quad.weights(q) * (grad_b * aq).dot(cq);
    }
  }
  return acc;
}

Eigen::Vector2d step_inflow_velocity(double t, double y) {
  const double phi = (t <= 1.0) ? 0.5 * (1.0 - std::cos(std::numbers::pi * t)) : 1.0;
  return {phi * (20.0 / 9.0) * (y - 2.0) * (5.0 - y), 0.0};
}

double channel_inlet_pressure(double t) {
  return (t <= 0.1) ? 5.0 * (1.0 - std::cos(std::numbers::pi * t / 0.2)) : 5.0;
}

std::unique_ptr<NavierStokesProblem> make_backward_step_problem(int refine,
                                                                bool include_advection,
                                                                double viscosity) {
  auto space = std::make_shared<const TaylorHoodSpace>(build_step_mesh(refine));
  NsOptions opt;
  opt.viscosity = viscosity;
  opt.include_advection = include_advection;
  VelocityBc inlet;
  inlet.kind = VelocityBc::Kind::dirichlet;
  inlet.velocity = [](double, double y, double t) { return step_inflow_velocity(t, y); };
  VelocityBc wall;
  wall.kind = VelocityBc::Kind::dirichlet;
  wall.velocity = [](double, double, double) { return Eigen::Vector2d{0.0, 0.0}; };
  opt.boundary[BoundaryTag::inlet] = std::move(inlet);
  opt.boundary[BoundaryTag::wall] = std::move(wall);
  return std::make_unique<NavierStokesProblem>(std::move(space), std::move(opt));
}

std::unique_ptr<NavierStokesProblem> make_pressure_channel_problem(int refine,
                                                                   bool include_advection,
                                                                   double viscosity) {
  auto space = std::make_shared<const TaylorHoodSpace>(build_channel_mesh(refine));
  NsOptions opt;
  opt.viscosity = viscosity;
  opt.include_advection = include_advection;
  VelocityBc inlet;
  inlet.kind = VelocityBc::Kind::traction;
  // Stress -p_in(t) n on the inlet, whose outward normal is (-1, 0).
  inlet.traction = [](double, double, double t) {
    return Eigen::Vector2d{channel_inlet_pressure(t), 0.0};
  };
  VelocityBc wall;
  wall.kind = VelocityBc::Kind::dirichlet;
  wall.velocity = [](double, double, double) { return Eigen::Vector2d{0.0, 0.0}; };
  opt.boundary[BoundaryTag::inlet] = std::move(inlet);
  opt.boundary[BoundaryTag::wall] = std::move(wall);
  return std::make_unique<NavierStokesProblem>(std::move(space), std::move(opt));
}

ManufacturedStokesFields manufactured_stokes_fields(double viscosity) {
  const double pi = std::numbers::pi;
  ManufacturedStokesFields fields;
  fields.velocity = [pi](double x, double y, double) {
    return Eigen::Vector2d{pi * std::sin(pi * x) * std::cos(pi * y),
                           -pi * std::cos(pi * x) * std::sin(pi * y)};
  };
  fields.pressure = [pi](double x, double y, double) {
    return std::sin(pi * x) * std::cos(pi * y);
  };
  // f = -nu lap(u) + grad(p) with lap(u) = -2 pi^2 u.
  fields.forcing = [pi, viscosity](double x, double y, double) {
    const double fx = 2.0 * viscosity * pi * pi * pi * std::sin(pi * x) * std::cos(pi * y) +
                      pi * std::cos(pi * x) * std::cos(pi * y);
    const double fy = -2.0 * viscosity * pi * pi * pi * std::cos(pi * x) * std::sin(pi * y) -
                      pi * std::sin(pi * x) * std::sin(pi * y);
    return Eigen::Vector2d{fx, fy};
  };
  return fields;
}

std::unique_ptr<NavierStokesProblem> make_manufactured_stokes_problem(int cells_per_side,
                                                                      double viscosity) {
  auto space = std::make_shared<const TaylorHoodSpace>(build_square_mesh(cells_per_side));
  ManufacturedStokesFields fields = manufactured_stokes_fields(viscosity);
  NsOptions opt;
  opt.viscosity = viscosity;
  opt.include_advection = false;
  VelocityBc wall;
  wall.kind = VelocityBc::Kind::dirichlet;
  wall.velocity = fields.velocity;
  opt.boundary[BoundaryTag::wall] = std::move(wall);
  opt.forcing = fields.forcing;
  // Every boundary is Dirichlet, so fix the pressure level at vertex 0.
  const double x0 = space->mesh().vertices(0, 0);
  const double y0 = space->mesh().vertices(0, 1);
  NsOptions::PressurePin pin;
  pin.vertex = 0;
  pin.value = [fields, x0, y0](double t) { return fields.pressure(x0, y0, t); };
  opt.pressure_pin = std::move(pin);
  return std::make_unique<NavierStokesProblem>(std::move(space), std::move(opt));
}

}  // namespace tadapt::fem
