#include "tadapt/fem/taylor_hood.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace tadapt::fem {

const TriangleQuadrature& triangle_quadrature() {
  static const TriangleQuadrature rule = [] {
    TriangleQuadrature q;
    // Two symmetric orbits of three points each.
    const double w1 = 0.223381589678011;
    const double a1 = 0.445948490915965;
    const double w2 = 0.109951743655322;
    const double a2 = 0.091576213509771;
    int row = 0;
    for (const auto& [w, a] : {std::pair{w1, a1}, std::pair{w2, a2}}) {
      const double b = 1.0 - 2.0 * a;
      q.barycentric.row(row) << a, a, b;
      q.weights(row++) = w;
      q.barycentric.row(row) << a, b, a;
      q.weights(row++) = w;
      q.barycentric.row(row) << b, a, a;
      q.weights(row++) = w;
    }
    return q;
  }();
  return rule;
}

Eigen::Matrix<double, 6, 1> quadratic_basis(const Eigen::Vector3d& lambda) {
  Eigen::Matrix<double, 6, 1> n;
  n(0) = lambda(0) * (2.0 * lambda(0) - 1.0);
  n(1) = lambda(1) * (2.0 * lambda(1) - 1.0);
  n(2) = lambda(2) * (2.0 * lambda(2) - 1.0);
  n(3) = 4.0 * lambda(0) * lambda(1);
  n(4) = 4.0 * lambda(1) * lambda(2);
  n(5) = 4.0 * lambda(2) * lambda(0);
  return n;
}

TaylorHoodSpace::TaylorHoodSpace(TriangularMesh mesh) : mesh_(std::move(mesh)) {
  const Eigen::Index nv = mesh_.vertex_count();
  const Eigen::Index nt = mesh_.triangle_count();
  if (nv == 0 || nt == 0) throw InvalidInputError("mixed space: empty mesh");

  // Number the edges in first-seen order; the midpoint node of edge e is
  // vertex_count + e.
  std::map<std::pair<int, int>, int> edge_ids;
  const auto edge_id = [&](int va, int vb) {
    const auto key = std::minmax(va, vb);
    const auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(edge_ids.size()));
    (void)inserted;
    return it->second;
  };

  elements_.resize(static_cast<std::size_t>(nt));
  for (Eigen::Index t = 0; t < nt; ++t) {
    auto& el = elements_[static_cast<std::size_t>(t)];
    const int v0 = mesh_.triangles(t, 0);
    const int v1 = mesh_.triangles(t, 1);
    const int v2 = mesh_.triangles(t, 2);
    el.nodes = {v0, v1, v2, edge_id(v0, v1), edge_id(v1, v2), edge_id(v2, v0)};
  }
  edge_count_ = static_cast<Eigen::Index>(edge_ids.size());
  for (auto& el : elements_) {
    for (int k = 3; k < 6; ++k) el.nodes[static_cast<std::size_t>(k)] += static_cast<int>(nv);
  }

  node_coords_.resize(node_count(), 2);
  node_coords_.topRows(nv) = mesh_.vertices;
  for (const auto& [key, e] : edge_ids) {
    node_coords_.row(nv + e) =
        0.5 * (mesh_.vertices.row(key.first) + mesh_.vertices.row(key.second));
  }

  const TriangleQuadrature& quad = triangle_quadrature();
  for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
    q2_values_.row(q) = quadratic_basis(quad.barycentric.row(q).transpose()).transpose();
    q1_values_.row(q) = quad.barycentric.row(q);
  }

  for (Eigen::Index t = 0; t < nt; ++t) {
    auto& el = elements_[static_cast<std::size_t>(t)];
    el.area = mesh_.triangle_area(t);
    if (!(el.area > 0.0)) {
      throw InvalidInputError("mixed space: triangle " + std::to_string(t) +
                              " is degenerate or negatively oriented");
    }
    const Eigen::Vector2d p0 = mesh_.vertices.row(mesh_.triangles(t, 0)).transpose();
    const Eigen::Vector2d p1 = mesh_.vertices.row(mesh_.triangles(t, 1)).transpose();
    const Eigen::Vector2d p2 = mesh_.vertices.row(mesh_.triangles(t, 2)).transpose();
    const double inv2a = 1.0 / (2.0 * el.area);
    el.grad_lambda.row(0) << (p1.y() - p2.y()) * inv2a, (p2.x() - p1.x()) * inv2a;
    el.grad_lambda.row(1) << (p2.y() - p0.y()) * inv2a, (p0.x() - p2.x()) * inv2a;
    el.grad_lambda.row(2) << (p0.y() - p1.y()) * inv2a, (p1.x() - p0.x()) * inv2a;

    for (int q = 0; q < TriangleQuadrature::point_count; ++q) {
      const Eigen::Vector3d lam = quad.barycentric.row(q).transpose();
      auto& g = el.grad_q2[static_cast<std::size_t>(q)];
      for (int v = 0; v < 3; ++v) {
        g.row(v) = (4.0 * lam(v) - 1.0) * el.grad_lambda.row(v);
      }
      const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
      for (int e = 0; e < 3; ++e) {
        const int i = pairs[e][0];
        const int j = pairs[e][1];
        g.row(3 + e) = 4.0 * (lam(j) * el.grad_lambda.row(i) + lam(i) * el.grad_lambda.row(j));
      }
      el.points[static_cast<std::size_t>(q)] =
          lam(0) * p0 + lam(1) * p1 + lam(2) * p2;
    }
  }

  facets_.reserve(mesh_.facets.size());
  for (const auto& f : mesh_.facets) {
    const auto key = std::minmax(f.a, f.b);
    const auto it = edge_ids.find(key);
    if (it == edge_ids.end()) {
      throw InvalidInputError("mixed space: boundary facet does not match any element edge");
    }
    FacetNodes fn;
    fn.a = f.a;
    fn.b = f.b;
    fn.mid = static_cast<int>(nv) + it->second;
    fn.length = (mesh_.vertices.row(f.b) - mesh_.vertices.row(f.a)).norm();
    fn.tag = f.tag;
    facets_.push_back(fn);
    auto& group = nodes_by_tag_[static_cast<std::size_t>(f.tag)];
    group.push_back(fn.a);
    group.push_back(fn.b);
    group.push_back(fn.mid);
  }
  for (auto& group : nodes_by_tag_) {
    std::sort(group.begin(), group.end());
    group.erase(std::unique(group.begin(), group.end()), group.end());
  }
}

const std::vector<int>& TaylorHoodSpace::boundary_nodes(BoundaryTag tag) const {
  return nodes_by_tag_[static_cast<std::size_t>(tag)];
}

}  // namespace tadapt::fem
