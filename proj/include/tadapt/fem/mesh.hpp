#pragma once

#include <Eigen/Core>

#include <vector>

#include "tadapt/types.hpp"

namespace tadapt::fem {

enum class BoundaryTag { inlet, outlet, wall };

[[nodiscard]] const char* to_string(BoundaryTag tag);

/// One boundary edge between two mesh vertices.
struct BoundaryFacet {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::wall;
};

/// Conforming triangulation with counterclockwise elements and tagged
/// boundary facets. Lengths are centimeters throughout.
struct TriangularMesh {
  Eigen::Matrix<double, Eigen::Dynamic, 2> vertices;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;
  std::vector<BoundaryFacet> facets;
  double cell_size = 0.0;  // lattice pitch the mesh was built from

  [[nodiscard]] Eigen::Index vertex_count() const { return vertices.rows(); }
  [[nodiscard]] Eigen::Index triangle_count() const { return triangles.rows(); }

  /// Sum of signed triangle areas; positive iff orientation is consistent.
  [[nodiscard]] double area() const;

  [[nodiscard]] double triangle_area(Eigen::Index t) const;
};

/// Backward-facing step channel: the union of [0,18]x[2,5] and [4,18]x[0,2].
/// The inlet is the segment x = 0, the outlet x = 18, everything else walls.
/// Cells of size 1/2^refine are split into four triangles around their
/// center, so the step corner at (4,2) is resolved exactly at every level.
[[nodiscard]] TriangularMesh build_step_mesh(int refine);

/// Straight channel [0,10]x[0,2.5] with inlet x = 0, outlet x = 10, walls on
/// both horizontal sides. Base cell size 0.5, halved per refinement.
[[nodiscard]] TriangularMesh build_channel_mesh(int refine);

/// Unit square [0,1]^2 with every boundary edge tagged wall; for
/// manufactured-solution checks.
[[nodiscard]] TriangularMesh build_square_mesh(int cells_per_side);

}  // namespace tadapt::fem
