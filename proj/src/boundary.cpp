#include <algorithm>
#include <cmath>
#include <deque>

#include "perclab/combinatorics.hpp"

namespace perclab {

namespace {

// Dense grid over a box [lo, hi] (inclusive)
struct LocalGrid {
  Point lo, hi;
  std::vector<std::size_t> size, stride;
  std::size_t total = 1;

  LocalGrid(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    const std::size_t d = lo.size();
    size.resize(d);
    stride.resize(d);
    for (std::size_t k = d; k-- > 0;) {
      size[k] = static_cast<std::size_t>(hi[k] - lo[k] + 1);
      stride[k] = total;
      total *= size[k];
    }
  }
  std::size_t index(const Point& x) const {
    std::size_t i = 0;
    for (std::size_t k = 0; k < lo.size(); ++k) i += static_cast<std::size_t>(x[k] - lo[k]) * stride[k];
    return i;
  }
  Point point(std::size_t i) const {
    Point x(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      x[k] = lo[k] + static_cast<int>((i / stride[k]) % size[k]);
    }
    return x;
  }
  bool on_shell(std::size_t i) const {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const auto c = (i / stride[k]) % size[k];
      if (c == 0 || c + 1 == size[k]) return true;
    }
    return false;
  }
  int coord(std::size_t i, std::size_t k) const { return static_cast<int>((i / stride[k]) % size[k]); }
};

std::vector<Point> star_offsets(int d) {
  std::vector<Point> out;
  Point cur(d, -1);
  while (true) {
    bool zero = std::all_of(cur.begin(), cur.end(), [](int c) { return c == 0; });
    if (!zero) out.push_back(cur);
    int k = d - 1;
    while (k >= 0 && cur[k] == 1) cur[k--] = -1;
    if (k < 0) break;
    ++cur[k];
  }
  return out;
}

std::vector<Point> axis_offsets(int d) {
  std::vector<Point> out;
  for (int k = 0; k < d; ++k)
    for (int s : {-1, 1}) {
      Point p(d, 0);
      p[k] = s;
      out.push_back(p);
    }
  return out;
}

bool connected_under(std::span<const Point> S, const std::vector<Point>& offsets) {
  if (S.empty()) return true;
  std::vector<Point> sorted(S.begin(), S.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<char> seen(sorted.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const Point x = sorted[queue.front()];
    queue.pop_front();
    for (const auto& off : offsets) {
      Point y = x;
      for (std::size_t k = 0; k < y.size(); ++k) y[k] += off[k];
      auto it = std::lower_bound(sorted.begin(), sorted.end(), y);
      if (it == sorted.end() || *it != y) continue;
      const auto idx = static_cast<std::size_t>(it - sorted.begin());
      if (seen[idx]) continue;
      seen[idx] = 1;
      ++count;
      queue.push_back(idx);
    }
  }
  return count == sorted.size();
}

}  // namespace

bool is_star_connected(std::span<const Point> S) {
  if (S.empty()) return true;
  return connected_under(S, star_offsets(static_cast<int>(S.front().size())));
}

bool is_connected(std::span<const Point> S) {
  if (S.empty()) return true;
  return connected_under(S, axis_offsets(static_cast<int>(S.front().size())));
}

ExteriorBoundary exterior_boundary(std::span<const Point> gamma, const BoxSpec& ambient) {
  for (const auto& x : gamma) {
    if (!ambient.contains(x)) throw HypothesisError("gamma leaves the ambient box");
    for (int k = 0; k < ambient.dimension; ++k)
      if (std::abs(x[k] - ambient.offset(k)) == ambient.radius) throw HypothesisError("gamma touches the box face");
  }
  return exterior_boundary(gamma);
}

ExteriorBoundary exterior_boundary(std::span<const Point> gamma) {
  if (gamma.empty()) throw HypothesisError("gamma must be nonempty");
  const std::size_t d = gamma.front().size();
  Point lo = gamma.front(), hi = gamma.front();
  for (const auto& x : gamma) {
    if (x.size() != d) throw HypothesisError("gamma has points of mixed dimension");
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], x[k]);
      hi[k] = std::max(hi[k], x[k]);
    }
  }
  // one spare layer: the shell of the enlarged bounding box is outside gamma
  // and connected, so reaching it means reaching infinity
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] -= 1;
    hi[k] += 1;
  }
  LocalGrid grid(lo, hi);
  std::vector<std::uint8_t> in_gamma(grid.total, 0), outside(grid.total, 0);
  for (const auto& x : gamma) in_gamma[grid.index(x)] = 1;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < grid.total; ++i)
    if (grid.on_shell(i)) {
      outside[i] = 1;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < d; ++k) {
      const int c = grid.coord(i, k);
      if (c > 0) {
        const std::size_t j = i - grid.stride[k];
        if (!outside[j] && !in_gamma[j]) {
          outside[j] = 1;
          queue.push_back(j);
        }
      }
      if (static_cast<std::size_t>(c) + 1 < grid.size[k]) {
        const std::size_t j = i + grid.stride[k];
        if (!outside[j] && !in_gamma[j]) {
          outside[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  ExteriorBoundary out;
  for (std::size_t i = 0; i < grid.total; ++i) {
    if (in_gamma[i]) continue;
    if (!outside[i]) {
      out.interior.push_back(grid.point(i));
      continue;
    }
    bool touches = false;
    for (std::size_t k = 0; k < d && !touches; ++k) {
      const int c = grid.coord(i, k);
      if (c > 0 && in_gamma[i - grid.stride[k]]) touches = true;
      if (static_cast<std::size_t>(c) + 1 < grid.size[k] && in_gamma[i + grid.stride[k]]) touches = true;
    }
    if (touches) out.boundary.push_back(grid.point(i));
  }
  out.star_connected = is_star_connected(out.boundary);
  return out;
}

LemmaCheck isoperimetry_check(std::size_t gamma_size, std::size_t boundary_size, int d, double kappa) {
  LemmaCheck c;
  c.achieved = static_cast<double>(gamma_size);
  c.bound = kappa * std::pow(static_cast<double>(boundary_size), static_cast<double>(d) / (d - 1));
  c.pass = c.achieved <= c.bound;
  return c;
}

}  // namespace perclab
