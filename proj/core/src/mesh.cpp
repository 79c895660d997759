// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace stdg {

IntervalMesh build_interval_mesh(double a, double b, int n_cells,
                                 const std::function<int(double)>& tag_of) {
  if (!(b > a)) throw std::invalid_argument("interval mesh: need b > a");
  if (n_cells < 1) throw std::invalid_argument("interval mesh: need n >= 1");
  IntervalMesh m;
  m.a = a;
  m.b = b;
  m.vertices.resize(n_cells + 1);
  const double h = (b - a) / n_cells;
  for (int i = 0; i <= n_cells; ++i) m.vertices[i] = a + i * h;
  m.vertices[0] = a;
  m.vertices[n_cells] = b;
  m.tags.resize(n_cells);
  for (int e = 0; e < n_cells; ++e) {
    const double mid = 0.5 * (m.vertices[e] + m.vertices[e + 1]);
    m.tags[e] = tag_of ? tag_of(mid) : 0;
  }
  return m;
}

double TriMesh::area(int t) const {
  const auto& tr = tris[t];
  const Eigen::Vector2d d1 = vertices[tr.v[1]] - vertices[tr.v[0]];
  const Eigen::Vector2d d2 = vertices[tr.v[2]] - vertices[tr.v[0]];
  return 0.5 * std::abs(d1.x() * d2.y() - d1.y() * d2.x());
}

TriMesh build_rect_trimesh(
    double ax, double bx, double ay, double by, int nx, int ny,
    const std::function<int(const Eigen::Vector2d&)>& tag_of) {
  if (!(bx > ax) || !(by > ay))
    throw std::invalid_argument("trimesh: degenerate rectangle");
  if (nx < 1 || ny < 1) throw std::invalid_argument("trimesh: need nx,ny >= 1");

  TriMesh m;
  m.hx = (bx - ax) / nx;
  m.hy = (by - ay) / ny;
  m.vertices.resize((nx + 1) * (ny + 1));
  m.vertex_on_boundary.assign(m.vertices.size(), false);
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? bx : ax + i * m.hx;
      const double y = (j == ny) ? by : ay + j * m.hy;
      m.vertices[vid(i, j)] = Eigen::Vector2d(x, y);
      if (i == 0 || i == nx || j == 0 || j == ny)
        m.vertex_on_boundary[vid(i, j)] = true;
    }
  }

  // Two triangles per square, diagonal from (i,j) to (i+1,j+1).  Vertex
  // triples are ascending in the row-major numbering.
  m.tris.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      TriMesh::Tri lo, up;
      lo.v = {v00, v10, v11};
      lo.cls = 0;
      up.v = {v00, v01, v11};
      up.cls = 1;
      m.tris.push_back(lo);
      m.tris.push_back(up);
    }
  }

  // Global edges keyed by ascending vertex pair; local edge i sits opposite
  // local vertex i.
  std::map<std::array<int, 2>, int> edge_id;
  std::vector<int> edge_use;
  for (auto& tr : m.tris) {
    for (int i = 0; i < 3; ++i) {
      int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
      if (a > b) std::swap(a, b);
      const std::array<int, 2> key = {a, b};
      auto it = edge_id.find(key);
      int id;
      if (it == edge_id.end()) {
        id = static_cast<int>(m.edges.size());
        edge_id.emplace(key, id);
        m.edges.push_back({key, false});
        edge_use.push_back(0);
      } else {
        id = it->second;
      }
      tr.edge[i] = id;
      ++edge_use[id];
    }
  }
  for (std::size_t e = 0; e < m.edges.size(); ++e)
    m.edges[e].on_boundary = (edge_use[e] == 1);

  for (auto& tr : m.tris) {
    const Eigen::Vector2d c = (m.vertices[tr.v[0]] + m.vertices[tr.v[1]] +
                               m.vertices[tr.v[2]]) /
                              3.0;
    tr.tag = tag_of ? tag_of(c) : 0;
  }
  return m;
}

int TriMesh::locate(const Eigen::Vector2d& p) const {
  const int nx = static_cast<int>(std::lround((vertices.back().x() -
                                               vertices.front().x()) /
                                              hx));
  const int ny = static_cast<int>(std::lround((vertices.back().y() -
                                               vertices.front().y()) /
                                              hy));
  const double ax = vertices.front().x(), ay = vertices.front().y();
  const double tol = 1e-12 * std::max(hx, hy);
  if (p.x() < ax - tol || p.y() < ay - tol ||
      p.x() > vertices.back().x() + tol || p.y() > vertices.back().y() + tol)
    throw std::invalid_argument("locate: point outside mesh");
  int i = std::clamp(static_cast<int>(std::floor((p.x() - ax) / hx)), 0,
                     nx - 1);
  int j = std::clamp(static_cast<int>(std::floor((p.y() - ay) / hy)), 0,
                     ny - 1);
  const double lx = (p.x() - (ax + i * hx)) / hx;
  const double ly = (p.y() - (ay + j * hy)) / hy;
  return 2 * (j * nx + i) + (ly > lx ? 1 : 0);
}

}  // namespace stdg
