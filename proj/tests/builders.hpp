#pragma once

// Hand-built configurations shared by the tests.

#include <vector>

#include "perclab/lattice.hpp"

namespace build {

using perclab::EdgeId;
using perclab::GeometryPtr;
using perclab::PercolationSample;
using perclab::Point;

inline GeometryPtr box(int d, int L) { return perclab::make_geometry(perclab::BoxSpec{d, L, {}}); }

inline Point pt(std::initializer_list<int> c) { return Point(c); }

inline Point axis_point(int d, int axis, int value) {
  Point x(d, 0);
  x[axis] = value;
  return x;
}

inline EdgeId edge(const perclab::BoxGeometry& g, const Point& a, const Point& b) {
  return *g.edge_between(g.vertex(a), g.vertex(b));
}

// edges of consecutive points of a nearest-neighbour path
inline std::vector<EdgeId> path_edges(const perclab::BoxGeometry& g, const std::vector<Point>& path) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) out.push_back(edge(g, path[i], path[i + 1]));
  return out;
}

// straight segment from a along axis for `length` steps (negative goes down)
inline std::vector<Point> segment(const Point& a, int axis, int length) {
  std::vector<Point> out{a};
  Point x = a;
  const int step = length >= 0 ? 1 : -1;
  for (int i = 0; i != length; i += step) {
    x[axis] += step;
    out.push_back(x);
  }
  return out;
}

inline PercolationSample with_open_path(const GeometryPtr& g, const std::vector<Point>& path) {
  return PercolationSample::from_open_edges(g, path_edges(*g, path));
}

inline PercolationSample with_open_paths(const GeometryPtr& g, const std::vector<std::vector<Point>>& paths) {
  std::vector<EdgeId> e;
  for (const auto& p : paths) {
    const auto pe = path_edges(*g, p);
    e.insert(e.end(), pe.begin(), pe.end());
  }
  return PercolationSample::from_open_edges(g, e);
}

}  // namespace build
