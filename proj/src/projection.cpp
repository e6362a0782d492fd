#include <algorithm>
#include <cmath>
#include <map>

#include "perclab/combinatorics.hpp"

namespace perclab {

PointSet::PointSet(int dimension, std::vector<Point> points) : dimension_(dimension), points_(std::move(points)) {
  if (dimension < 1) throw std::invalid_argument("point set dimension must be positive");
  for (const auto& p : points_)
    if (static_cast<int>(p.size()) != dimension) throw std::invalid_argument("point has wrong dimension");
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  diam_.assign(dimension, 0);
  if (points_.empty()) return;
  for (int a = 0; a < dimension; ++a) {
    int lo = points_[0][a], hi = points_[0][a];
    for (const auto& p : points_) {
      lo = std::min(lo, p[a]);
      hi = std::max(hi, p[a]);
    }
    diam_[a] = hi - lo;
  }
}

bool PointSet::contains(const Point& x) const { return std::binary_search(points_.begin(), points_.end(), x); }

int PointSet::diam() const { return diam_.empty() ? 0 : *std::max_element(diam_.begin(), diam_.end()); }

std::vector<Point> project(std::span<const Point> S, int axis) {
  std::vector<Point> out(S.begin(), S.end());
  for (auto& p : out) p[axis] = 0;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LemmaCheck ProjectionResult::verify(std::size_t set_size) const {
  LemmaCheck c;
  c.bound = 0.5 * std::pow(static_cast<double>(set_size), 2.0 / 3.0);
  c.achieved = static_cast<double>(projection.size());
  c.pass = c.achieved >= c.bound;
  c.detail = "axis " + std::to_string(axis) + (from_case_analysis ? "" : " (exhaustive fallback)");
  return c;
}

ProjectionResult projection_best(const PointSet& S) {
  if (S.empty()) throw std::invalid_argument("projection_best needs a nonempty set");
  const int d = S.dimension();
  const auto& pts = S.points();
  const double n = static_cast<double>(S.size());
  const double target = 0.5 * std::pow(n, 2.0 / 3.0);
  const double cube_root = std::cbrt(n);

  auto finish = [&](int axis) {
    ProjectionResult r;
    r.axis = axis;
    r.projection = project(pts, axis);
    return r;
  };

  // Case analysis: axis 0 directly, then the heavy fibres of P_0 either have
  // many distinct P_1 images (axis 1) or concentrate on one P_1 o P_0 fibre (axis 2).
  int axis = -1;
  auto p0 = project(pts, 0);
  if (static_cast<double>(p0.size()) >= target) {
    axis = 0;
  } else if (d >= 2) {
    std::map<Point, std::size_t> fibre;
    for (auto p : pts) {
      p[0] = 0;
      ++fibre[p];
    }
    std::vector<Point> heavy;
    for (const auto& [z, count] : fibre)
      if (static_cast<double>(count) >= cube_root) heavy.push_back(z);
    const auto s2 = project(heavy, 1);
    if (static_cast<double>(s2.size()) >= cube_root)
      axis = 1;
    else if (d >= 3)
      axis = 2;
  }
  if (axis >= 0) {
    auto r = finish(axis);
    if (static_cast<double>(r.projection.size()) >= target) return r;
  }
  // exhaustive fallback over all axes
  ProjectionResult best;
  for (int a = 0; a < d; ++a) {
    auto r = finish(a);
    if (a == 0 || r.projection.size() > best.projection.size()) best = std::move(r);
  }
  best.from_case_analysis = false;
  return best;
}

double distinct_subset_bound(const PointSet& S) {
  const int d = S.dimension();
  const int diam = S.diam();
  if (diam == 0) return S.empty() ? 0.0 : 1.0;
  return std::pow(static_cast<double>(S.size()) / (std::ldexp(1.0, d - 1) * diam), 1.0 / (d - 1));
}

LemmaCheck DistinctSubset::verify(const PointSet& S) const {
  LemmaCheck c;
  c.bound = distinct_subset_bound(S);
  c.achieved = static_cast<double>(subset.size());
  bool ok = axis_i != axis_j && axis_i >= 0 && axis_j >= 0 && axis_i < S.dimension() && axis_j < S.dimension();
  for (const auto& p : subset) ok = ok && S.contains(p);
  for (std::size_t a = 0; a < subset.size() && ok; ++a)
    for (std::size_t b = a + 1; b < subset.size() && ok; ++b)
      ok = subset[a][axis_i] != subset[b][axis_i] && subset[a][axis_j] != subset[b][axis_j];
  c.pass = ok && c.achieved + 1e-9 >= c.bound;
  c.detail = ok ? "distinct" : "coordinate clash or foreign point";
  return c;
}

namespace {

// Largest set of points with pairwise distinct values on axes a and b:
// a maximum matching between a-values and b-values (Kuhn's algorithm).
std::vector<Point> max_distinct_matching(const std::vector<Point>& pts, int a, int b) {
  std::map<int, int> left_id, right_id;
  for (const auto& p : pts) {
    left_id.emplace(p[a], 0);
    right_id.emplace(p[b], 0);
  }
  int k = 0;
  for (auto& [v, id] : left_id) id = k++;
  k = 0;
  for (auto& [v, id] : right_id) id = k++;
  std::vector<std::vector<std::pair<int, std::size_t>>> adj(left_id.size());
  for (std::size_t i = 0; i < pts.size(); ++i) adj[left_id[pts[i][a]]].push_back({right_id[pts[i][b]], i});
  std::vector<long> match_right(right_id.size(), -1);  // point index
  std::vector<int> owner(right_id.size(), -1);
  std::vector<char> seen;
  auto augment = [&](auto&& self, int u) -> bool {
    for (auto [r, idx] : adj[u]) {
      if (seen[r]) continue;
      seen[r] = 1;
      if (owner[r] < 0 || self(self, owner[r])) {
        owner[r] = u;
        match_right[r] = static_cast<long>(idx);
        return true;
      }
    }
    return false;
  };
  for (int u = 0; u < static_cast<int>(adj.size()); ++u) {
    seen.assign(right_id.size(), 0);
    augment(augment, u);
  }
  std::vector<Point> out;
  for (long idx : match_right)
    if (idx >= 0) out.push_back(pts[static_cast<std::size_t>(idx)]);
  std::sort(out.begin(), out.end());
  return out;
}

// Greedy removal of the lines (d = 2) or hyperplanes through chosen points on axes a, b.
std::vector<Point> greedy_distinct(const std::vector<Point>& pts, int a, int b) {
  std::vector<Point> chosen;
  std::vector<int> used_a, used_b;
  for (const auto& p : pts) {
    if (std::find(used_a.begin(), used_a.end(), p[a]) != used_a.end()) continue;
    if (std::find(used_b.begin(), used_b.end(), p[b]) != used_b.end()) continue;
    chosen.push_back(p);
    used_a.push_back(p[a]);
    used_b.push_back(p[b]);
  }
  return chosen;
}

struct SubsetInAxes {
  int i, j;
  std::vector<Point> subset;
  bool fallback;
};

// Recursion on the number of active axes; `axes` lists the coordinates still in play.
SubsetInAxes distinct_rec(const std::vector<Point>& pts, std::vector<int> axes) {
  const int d = static_cast<int>(axes.size());
  const PointSet view = [&] {
    std::vector<Point> proj;
    proj.reserve(pts.size());
    for (const auto& p : pts) {
      Point q(d);
      for (int k = 0; k < d; ++k) q[k] = p[axes[k]];
      proj.push_back(q);
    }
    return PointSet(d, std::move(proj));
  }();
  const double m = distinct_subset_bound(view);
  const int a = axes[d - 2], b = axes[d - 1];
  if (view.diam() == 0) return {a, b, {pts.front()}, false};
  auto greedy = greedy_distinct(pts, a, b);
  if (static_cast<double>(greedy.size()) + 1e-9 >= m) return {a, b, greedy, false};
  if (d == 2) {
    // the greedy bound in the plane can fall one short; a maximum matching
    // always reaches |S| / (Diam + 1) >= m(2, S)
    return {a, b, max_distinct_matching(pts, a, b), true};
  }
  // some chosen point's two hyperplanes carry >= |S|/m points; keep the
  // heavier hyperplane and drop its axis
  std::size_t best_count = 0;
  int best_axis = b;
  int best_value = 0;
  for (const auto& v : greedy) {
    for (int r : {a, b}) {
      std::size_t count = 0;
      for (const auto& p : pts) count += p[r] == v[r];
      if (count > best_count) {
        best_count = count;
        best_axis = r;
        best_value = v[r];
      }
    }
  }
  std::vector<Point> slice;
  for (const auto& p : pts)
    if (p[best_axis] == best_value) slice.push_back(p);
  std::vector<int> rest;
  for (int k : axes)
    if (k != best_axis) rest.push_back(k);
  auto inner = distinct_rec(slice, rest);
  if (static_cast<double>(inner.subset.size()) + 1e-9 >= m) return inner;
  // not reached when the recursion's bound holds; keep the larger candidate
  if (inner.subset.size() >= greedy.size()) return inner;
  return {a, b, greedy, false};
}

}  // namespace

DistinctSubset distinct_coordinate_subset(const PointSet& S) {
  if (S.empty()) throw std::invalid_argument("distinct_coordinate_subset needs a nonempty set");
  const int d = S.dimension();
  if (d < 2) throw std::invalid_argument("distinct_coordinate_subset needs d >= 2");
  std::vector<int> axes(d);
  for (int k = 0; k < d; ++k) axes[k] = k;
  auto r = distinct_rec(S.points(), axes);
  DistinctSubset out;
  out.axis_i = std::min(r.i, r.j);
  out.axis_j = std::max(r.i, r.j);
  out.subset = std::move(r.subset);
  out.used_matching_fallback = r.fallback;
  return out;
}

}  // namespace perclab
