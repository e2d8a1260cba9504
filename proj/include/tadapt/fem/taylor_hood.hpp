#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "tadapt/fem/mesh.hpp"

namespace tadapt::fem {

/// Six-point symmetric triangle quadrature, exact for polynomials of total
/// degree four. Weights sum to one, so integrals are `area * sum(w_q f_q)`.
struct TriangleQuadrature {
  static constexpr int point_count = 6;
  Eigen::Matrix<double, point_count, 3> barycentric;  // row = point
  Eigen::Matrix<double, point_count, 1> weights;
};

[[nodiscard]] const TriangleQuadrature& triangle_quadrature();

/// Values of the six quadratic shape functions at a barycentric point,
/// ordered as the element nodes: three vertices, then the midpoints of
/// edges (0,1), (1,2), (2,0).
[[nodiscard]] Eigen::Matrix<double, 6, 1> quadratic_basis(const Eigen::Vector3d& lambda);

/// Quadratic/linear mixed element pair on a triangular mesh. Quadratic
/// (velocity) nodes are the mesh vertices followed by one midpoint node per
/// edge; linear (pressure) nodes coincide with the vertices.
///
/// Flat unknown layout: the two velocity components of node k live at
/// 2k and 2k+1, and the pressures follow after all velocity entries.
class TaylorHoodSpace {
 public:
  explicit TaylorHoodSpace(TriangularMesh mesh);

  [[nodiscard]] const TriangularMesh& mesh() const { return mesh_; }

  [[nodiscard]] Eigen::Index vertex_count() const { return mesh_.vertex_count(); }
  [[nodiscard]] Eigen::Index edge_count() const { return edge_count_; }
  [[nodiscard]] Eigen::Index node_count() const { return vertex_count() + edge_count(); }
  [[nodiscard]] Eigen::Index element_count() const { return mesh_.triangle_count(); }

  [[nodiscard]] Eigen::Index velocity_dof(Eigen::Index node, int component) const {
    return 2 * node + component;
  }
  [[nodiscard]] Eigen::Index pressure_dof(Eigen::Index vertex) const {
    return 2 * node_count() + vertex;
  }
  [[nodiscard]] Eigen::Index velocity_dof_count() const { return 2 * node_count(); }
  [[nodiscard]] Eigen::Index pressure_dof_count() const { return vertex_count(); }
  [[nodiscard]] Eigen::Index total_dof_count() const {
    return velocity_dof_count() + pressure_dof_count();
  }

  /// Coordinates of all quadratic nodes: vertices first, then edge midpoints.
  [[nodiscard]] const Eigen::MatrixX2d& node_coords() const { return node_coords_; }

  /// Everything assembly loops need per element, precomputed once.
  struct ElementData {
    std::array<int, 6> nodes;  ///< v0, v1, v2, then midpoints of (0,1), (1,2), (2,0)
    double area = 0.0;
    /// Gradients of the three barycentric coordinates (constant per element).
    Eigen::Matrix<double, 3, 2> grad_lambda;
    /// Gradients of the six quadratic shape functions at each quadrature
    /// point; entry (n, d) of element q is dN_n/dx_d.
    std::array<Eigen::Matrix<double, 6, 2>, TriangleQuadrature::point_count> grad_q2;
    /// Physical coordinates of the quadrature points.
    std::array<Eigen::Vector2d, TriangleQuadrature::point_count> points;
  };
  [[nodiscard]] const ElementData& element(Eigen::Index t) const {
    return elements_[static_cast<std::size_t>(t)];
  }

  /// Quadratic shape values at the quadrature points (row = point, col = node).
  [[nodiscard]] const Eigen::Matrix<double, 6, 6>& q2_values() const { return q2_values_; }
  /// Linear shape values at the quadrature points: just the barycentrics.
  [[nodiscard]] const Eigen::Matrix<double, 6, 3>& q1_values() const { return q1_values_; }

  /// One boundary facet, promoted to the quadratic space. Integrals of a
  /// quadratic test function against an edge-interpolated field use the
  /// exact weights length/6 at the ends and 2*length/3 at the midpoint.
  struct FacetNodes {
    int a = 0;
    int b = 0;
    int mid = 0;
    double length = 0.0;
    BoundaryTag tag = BoundaryTag::wall;
  };
  [[nodiscard]] const std::vector<FacetNodes>& boundary_facets() const { return facets_; }

  /// Sorted unique quadratic node ids lying on facets with the given tag.
  [[nodiscard]] const std::vector<int>& boundary_nodes(BoundaryTag tag) const;

 private:
  TriangularMesh mesh_;
  Eigen::Index edge_count_ = 0;
  Eigen::MatrixX2d node_coords_;
  std::vector<ElementData> elements_;
  Eigen::Matrix<double, 6, 6> q2_values_;
  Eigen::Matrix<double, 6, 3> q1_values_;
  std::vector<FacetNodes> facets_;
  std::array<std::vector<int>, 3> nodes_by_tag_;
};

}  // namespace tadapt::fem
