// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_MESH_HPP
#define STDG_MESH_HPP

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace stdg {

// Equidistant partition of (a,b) into n cells, each carrying a subdomain
// tag so that piecewise-defined material coefficients (indicator weights)
// are constant per cell.
struct IntervalMesh {
  double a = 0.0, b = 1.0;
  std::vector<double> vertices;  // n+1 ascending, vertices[0]=a, back()=b
  std::vector<int> tags;         // per cell

  int n_cells() const { return static_cast<int>(tags.size()); }
  double cell_left(int e) const { return vertices[e]; }
  double cell_size(int e) const { return vertices[e + 1] - vertices[e]; }
};

// tag_of receives the cell midpoint.
IntervalMesh build_interval_mesh(double a, double b, int n_cells,
                                 const std::function<int(double)>& tag_of);

// Structured triangulation of a rectangle: nx x ny squares, each split by
// the bottom-left to top-right diagonal.  Triangle vertices are stored with
// ascending global indices; edges are oriented from the smaller to the
// larger vertex index, which makes every edge direction (and hence every
// normal) single-valued across the two adjacent elements.
struct TriMesh {
  struct Tri {
    std::array<int, 3> v;      // ascending global vertex ids
    std::array<int, 3> edge;   // global edge ids, edge[i] opposite vertex i
    int tag = 0;
    int cls = 0;               // congruence class (0 = lower, 1 = upper)
  };
  struct Edge {
    std::array<int, 2> v;      // v[0] < v[1]
    bool on_boundary = false;
  };

  std::vector<Eigen::Vector2d> vertices;
  std::vector<Tri> tris;
  std::vector<Edge> edges;
  std::vector<bool> vertex_on_boundary;
  double hx = 0.0, hy = 0.0;   // cell sizes of the underlying grid

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_tris() const { return static_cast<int>(tris.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Eigen::Vector2d centroid(int t) const {
    return (vertices[tris[t].v[0]] + vertices[tris[t].v[1]] +
            vertices[tris[t].v[2]]) /
           3.0;
  }
  double area(int t) const;

  // Index of the triangle containing p (points on shared edges resolve to a
  // deterministic neighbor); throws if p lies outside the rectangle.
  int locate(const Eigen::Vector2d& p) const;
};

// tag_of receives the triangle centroid.
TriMesh build_rect_trimesh(
    double ax, double bx, double ay, double by, int nx, int ny,
    const std::function<int(const Eigen::Vector2d&)>& tag_of);

}  // namespace stdg

#endif  // STDG_MESH_HPP
