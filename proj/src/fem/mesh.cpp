#include "tadapt/fem/mesh.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace tadapt::fem {

namespace {

/// Builds a crossed-triangle mesh over the active cells of an nx-by-ny
/// lattice with pitch h: every active cell contributes its four corner
/// vertices, a center vertex, and four triangles fanned around the center.
/// A cell edge with no active neighbor is a boundary facet; `side` is
/// 0 left, 1 right, 2 bottom, 3 top.
TriangularMesh build_lattice_mesh(int nx, int ny, double h,
                                  const std::function<bool(int, int)>& active,
                                  const std::function<BoundaryTag(int, int, int)>& tag) {
  if (nx < 1 || ny < 1 || !(h > 0.0)) {
    throw InvalidInputError("lattice mesh: need positive cell counts and pitch");
  }

  std::vector<int> corner_id(static_cast<std::size_t>((nx + 1) * (ny + 1)), -1);
  const auto corner_index = [nx](int i, int j) { return j * (nx + 1) + i; };

  std::vector<double> xs;
  std::vector<double> ys;
  const auto add_vertex = [&](double x, double y) {
    xs.push_back(x);
    ys.push_back(y);
    return static_cast<int>(xs.size()) - 1;
  };
  const auto corner = [&](int i, int j) {
    int& id = corner_id[static_cast<std::size_t>(corner_index(i, j))];
    if (id < 0) id = add_vertex(i * h, j * h);
    return id;
  };
  const auto is_active = [&](int i, int j) {
    return i >= 0 && i < nx && j >= 0 && j < ny && active(i, j);
  };

  std::vector<int> tris;
  std::vector<BoundaryFacet> facets;
  int cells = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!active(i, j)) continue;
      ++cells;
      const int v00 = corner(i, j);
      const int v10 = corner(i + 1, j);
      const int v11 = corner(i + 1, j + 1);
      const int v01 = corner(i, j + 1);
      const int c = add_vertex((i + 0.5) * h, (j + 0.5) * h);

      const int quads[4][2] = {{v00, v10}, {v10, v11}, {v11, v01}, {v01, v00}};
      for (const auto& edge : quads) {
        tris.push_back(edge[0]);
        tris.push_back(edge[1]);
        tris.push_back(c);
      }

      if (!is_active(i - 1, j)) facets.push_back({v00, v01, tag(i, j, 0)});
      if (!is_active(i + 1, j)) facets.push_back({v10, v11, tag(i, j, 1)});
      if (!is_active(i, j - 1)) facets.push_back({v00, v10, tag(i, j, 2)});
      if (!is_active(i, j + 1)) facets.push_back({v01, v11, tag(i, j, 3)});
    }
  }
  if (cells == 0) throw InvalidInputError("lattice mesh: no active cells");

  TriangularMesh mesh;
  mesh.cell_size = h;
  mesh.vertices.resize(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t v = 0; v < xs.size(); ++v) {
    mesh.vertices(static_cast<Eigen::Index>(v), 0) = xs[v];
    mesh.vertices(static_cast<Eigen::Index>(v), 1) = ys[v];
  }
  mesh.triangles.resize(static_cast<Eigen::Index>(tris.size() / 3), 3);
  for (Eigen::Index t = 0; t < mesh.triangles.rows(); ++t) {
    mesh.triangles(t, 0) = tris[static_cast<std::size_t>(3 * t)];
    mesh.triangles(t, 1) = tris[static_cast<std::size_t>(3 * t + 1)];
    mesh.triangles(t, 2) = tris[static_cast<std::size_t>(3 * t + 2)];
  }
  mesh.facets = std::move(facets);
  return mesh;
}

int refinement_factor(int refine) {
  if (refine < 0 || refine > 8) {
    throw InvalidInputError("refine must lie in [0, 8], got " + std::to_string(refine));
  }
  return 1 << refine;
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::inlet: return "inlet";
    case BoundaryTag::outlet: return "outlet";
    case BoundaryTag::wall: return "wall";
  }
  return "unknown";
}

double TriangularMesh::triangle_area(Eigen::Index t) const {
  const auto p0 = vertices.row(triangles(t, 0));
  const auto p1 = vertices.row(triangles(t, 1));
  const auto p2 = vertices.row(triangles(t, 2));
  return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
}

double TriangularMesh::area() const {
  double sum = 0.0;
  for (Eigen::Index t = 0; t < triangle_count(); ++t) sum += triangle_area(t);
  return sum;
}

TriangularMesh build_step_mesh(int refine) {
  // Integer activity test: with m cells per unit length, the upper channel
  // is j >= 2m and the lower recess (behind the step) is i >= 4m.
  const int m = refinement_factor(refine);
  const int nx = 18 * m;
  const int ny = 5 * m;
  const double h = 1.0 / m;
  return build_lattice_mesh(
      nx, ny, h,
      [m](int i, int j) { return j >= 2 * m || i >= 4 * m; },
      [nx](int i, int /*j*/, int side) {
        if (side == 0 && i == 0) return BoundaryTag::inlet;
        if (side == 1 && i == nx - 1) return BoundaryTag::outlet;
        return BoundaryTag::wall;
      });
}

TriangularMesh build_channel_mesh(int refine) {
  const int m = refinement_factor(refine);
  const int nx = 20 * m;
  const int ny = 5 * m;
  const double h = 0.5 / m;
  return build_lattice_mesh(
      nx, ny, h, [](int, int) { return true; },
      [nx](int i, int /*j*/, int side) {
        if (side == 0 && i == 0) return BoundaryTag::inlet;
        if (side == 1 && i == nx - 1) return BoundaryTag::outlet;
        return BoundaryTag::wall;
      });
}

TriangularMesh build_square_mesh(int cells_per_side) {
  if (cells_per_side < 1) throw InvalidInputError("square mesh: need at least one cell");
  const double h = 1.0 / cells_per_side;
  return build_lattice_mesh(
      cells_per_side, cells_per_side, h, [](int, int) { return true; },
      [](int, int, int) { return BoundaryTag::wall; });
}

}  // namespace tadapt::fem
