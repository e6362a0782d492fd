#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "perclab/combinatorics.hpp"

namespace perclab {

namespace {

bool unit_step(const Point& a, const Point& b) {
  int total = 0;
  for (std::size_t k = 0; k < a.size(); ++k) total += std::abs(a[k] - b[k]);
  return total == 1;
}

bool is_lattice_path(const std::vector<Point>& path) {
  for (std::size_t i = 1; i < path.size(); ++i)
    if (!unit_step(path[i - 1], path[i])) return false;
  return true;
}

void append_path(std::vector<Point>& path, const std::vector<Point>& tail) {
  if (tail.empty()) return;
  std::size_t start = (!path.empty() && path.back() == tail.front()) ? 1 : 0;
  path.insert(path.end(), tail.begin() + static_cast<std::ptrdiff_t>(start), tail.end());
}

void check_dims(std::span<const Point> S, int d, const char* name) {
  for (const auto& p : S)
    if (static_cast<int>(p.size()) != d) throw HypothesisError(std::string(name) + " has points of mixed dimension");
}

std::vector<Point> sorted_unique(std::span<const Point> S) {
  std::vector<Point> v(S.begin(), S.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw HypothesisError("repeated point");
  return v;
}

}  // namespace

std::size_t PathBundle::max_length() const {
  std::size_t m = 0;
  for (const auto& p : paths) m = std::max(m, p.empty() ? std::size_t{0} : p.size() - 1);
  return m;
}

std::map<Point, std::size_t> PathBundle::multiplicity() const {
  std::map<Point, std::size_t> count;
  for (const auto& p : paths) {
    std::set<Point> distinct(p.begin(), p.end());
    for (const auto& v : distinct) ++count[v];
  }
  return count;
}

std::size_t PathBundle::max_multiplicity() const {
  std::size_t m = 0;
  for (const auto& [v, c] : multiplicity()) m = std::max(m, c);
  return m;
}

std::vector<Point> staircase_path(const Point& x, const Point& y) {
  const std::size_t d = x.size();
  std::vector<long> delta(d), progress(d, 0);
  long total = 0;
  for (std::size_t k = 0; k < d; ++k) {
    delta[k] = std::abs(static_cast<long>(y[k]) - x[k]);
    total += delta[k];
  }
  std::vector<Point> path{x};
  Point cur = x;
  for (long s = 1; s <= total; ++s) {
    // step along the axis lagging furthest behind the straight line:
    // maximize delta_k * s / total - progress_k
    std::size_t best = d;
    long best_gap = 0;
    for (std::size_t k = 0; k < d; ++k) {
      if (progress[k] == delta[k]) continue;
      const long gap = delta[k] * s - progress[k] * total;
      if (best == d || gap > best_gap) {
        best = k;
        best_gap = gap;
      }
    }
    ++progress[best];
    cur[best] += y[best] > x[best] ? 1 : -1;
    path.push_back(cur);
  }
  return path;
}

double linf_distance_to_segment(const Point& z, const Point& x, const Point& y) {
  auto f = [&](double lam) {
    double m = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k)
      m = std::max(m, std::fabs(x[k] + lam * (y[k] - x[k]) - z[k]));
    return m;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min({f(0.5 * (lo + hi)), f(0.0), f(1.0)});
}

double default_chi(int d) { return std::pow(2.0 * d, 2.0 * d); }

LemmaCheck BundleResult::verify(std::span<const Point> S1, std::span<const Point> S2) const {
  LemmaCheck c;
  c.bound = multiplicity_bound;
  c.achieved = static_cast<double>(bundle.max_multiplicity());
  std::vector<std::string> problems;
  if (bundle.paths.size() < required_paths) problems.push_back("too few paths");
  if (bundle.paths.size() != starts.size() || starts.size() != ends.size()) problems.push_back("endpoint bookkeeping");
  const std::set<Point> set1(S1.begin(), S1.end()), set2(S2.begin(), S2.end());
  std::set<Point> used_start, used_end;
  for (std::size_t k = 0; k < bundle.paths.size() && k < starts.size(); ++k) {
    const auto& p = bundle.paths[k];
    if (p.empty() || p.front() != starts[k] || p.back() != ends[k]) problems.push_back("path endpoints");
    if (!set1.count(starts[k]) || !set2.count(ends[k])) problems.push_back("endpoint outside S1/S2");
    if (!used_start.insert(starts[k]).second || !used_end.insert(ends[k]).second) problems.push_back("endpoint reused");
    if (!is_lattice_path(p)) problems.push_back("not a lattice path");
    if (static_cast<double>(p.size() - 1) > length_bound) problems.push_back("path too long");
  }
  if (c.achieved > c.bound) problems.push_back("multiplicity above bound");
  c.pass = problems.empty();
  for (const auto& s : problems) c.detail += (c.detail.empty() ? "" : "; ") + s;
  return c;
}

BundleResult disjoint_path_bundle(std::span<const Point> S1_in, std::span<const Point> S2_in, const BundleGeometry& g,
                                  std::optional<double> chi_opt) {
  if (S1_in.empty() || S2_in.empty()) throw HypothesisError("path bundle needs nonempty sets");
  const int d = static_cast<int>(S1_in.front().size());
  if (d < 3) throw HypothesisError("disjoint path bundles need d >= 3");
  check_dims(S1_in, d, "S1");
  check_dims(S2_in, d, "S2");
  const auto S1 = sorted_unique(S1_in);
  const auto S2 = sorted_unique(S2_in);
  const double chi = chi_opt.value_or(default_chi(d));
  const int K = g.spread;
  const std::size_t m = std::min(S1.size(), S2.size());
  BundleResult out;
  out.required_paths = (m + 1) / 2;
  out.length_bound = 2.0 * d * K;
  const int i = g.axis_i;
  if (i < 0 || i >= d) throw HypothesisError("axis out of range");

  if (g.kind == BundleGeometry::Kind::parallel) {
    const int l = g.gap;
    if (l < 1 || K < l) throw HypothesisError("parallel case needs K >= l >= 1");
    for (const auto& p : S1)
      if (p[i] != S1.front()[i]) throw HypothesisError("S1 is not on one hyperplane");
    for (const auto& p : S2)
      if (p[i] != S1.front()[i] + l) throw HypothesisError("S2 is not on the hyperplane at distance l");
    std::span<const Point> A(S1.data(), m), B(S2.data(), m);
    const auto match = separated_matching(A, B, K, i);
    out.multiplicity_bound = chi * std::pow(static_cast<double>(K) / l, d - 1);
    for (std::size_t k = 0; k < m; ++k) {
      out.starts.push_back(A[k]);
      out.ends.push_back(B[match.sigma[k]]);
      out.bundle.paths.push_back(staircase_path(A[k], B[match.sigma[k]]));
    }
    return out;
  }

  const int j = g.axis_j;
  if (j < 0 || j >= d || j == i) throw HypothesisError("perpendicular case needs two distinct axes");
  if (K < 1) throw HypothesisError("perpendicular case needs K >= 1");
  for (const auto& p : S1)
    if (p[i] != 0) throw HypothesisError("S1 is not on H_i(0)");
  for (const auto& p : S2)
    if (p[j] != 0) throw HypothesisError("S2 is not on H_j(0)");
  for (const auto* S : {&S1, &S2})
    for (const auto& p : *S)
      for (int c : p)
        if (std::abs(c) > K) throw HypothesisError("points must lie in [-K, K]^d");

  // reflect so that at least half of S1 has x_j >= 0 and half of S2 has x_i >= 0
  auto count_nonneg = [](const std::vector<Point>& S, int axis) {
    return static_cast<std::size_t>(std::count_if(S.begin(), S.end(), [&](const Point& p) { return p[axis] >= 0; }));
  };
  const bool flip_j = 2 * count_nonneg(S1, j) < S1.size();
  const bool flip_i = 2 * count_nonneg(S2, i) < S2.size();
  auto reflect = [&](Point p) {
    if (flip_j) p[j] = -p[j];
    if (flip_i) p[i] = -p[i];
    return p;
  };
  const std::size_t half = (m + 1) / 2;
  std::vector<Point> plus1, plus2;
  for (const auto& p : S1) {
    auto q = reflect(p);
    if (q[j] >= 0 && plus1.size() < half) plus1.push_back(q);
  }
  for (const auto& p : S2) {
    auto q = reflect(p);
    if (q[i] >= 0 && plus2.size() < half) plus2.push_back(q);
  }
  // lift S2+ along e_i + e_j onto H_i(K e_i)
  std::vector<Point> lifted;
  std::vector<std::vector<Point>> lift_paths;
  for (const auto& z : plus2) {
    std::vector<Point> path{z};
    Point cur = z;
    for (int step = 0; step < K - z[i]; ++step) {
      ++cur[i];
      path.push_back(cur);
      ++cur[j];
      path.push_back(cur);
    }
    lifted.push_back(cur);
    lift_paths.push_back(std::move(path));
  }
  const auto match = separated_matching(plus1, lifted, 2 * K, i);
  out.multiplicity_bound = chi + std::pow(4.0, d);
  for (std::size_t k = 0; k < plus1.size(); ++k) {
    const std::size_t t = match.sigma[k];
    std::vector<Point> path = staircase_path(plus1[k], lifted[t]);
    std::vector<Point> down(lift_paths[t].rbegin(), lift_paths[t].rend());
    append_path(path, down);
    for (auto& v : path) v = reflect(v);  // reflections are involutions
    out.starts.push_back(path.front());
    out.ends.push_back(path.back());
    out.bundle.paths.push_back(std::move(path));
  }
  return out;
}

LemmaCheck AxisAvoidingResult::verify(std::span<const Point> xs, std::span<const Point> ys) const {
  LemmaCheck c;
  c.bound = 8.0 * n;
  c.achieved = static_cast<double>(bundle.max_length());
  std::vector<std::string> problems;
  if (bundle.paths.size() != xs.size()) problems.push_back("path count");
  std::set<Point> seen;
  for (std::size_t k = 0; k < bundle.paths.size() && k < xs.size(); ++k) {
    const auto& p = bundle.paths[k];
    if (p.empty() || p.front() != xs[k] || p.back() != ys[k]) problems.push_back("endpoints");
    if (!is_lattice_path(p)) problems.push_back("not a lattice path");
    for (std::size_t v = 0; v < p.size(); ++v) {
      const auto& z = p[v];
      bool on_axis = true;
      for (std::size_t a = 0; a < z.size(); ++a)
        if (a != 2 && z[a] != 0) on_axis = false;
      if (on_axis) problems.push_back("meets L_3(0)");
      if (v != 0 && v + 1 != p.size() && (z[0] <= -2 * n || z[0] >= 2 * n)) problems.push_back("leaves the slab");
    }
    for (const auto& z : std::set<Point>(p.begin(), p.end()))
      if (!seen.insert(z).second) problems.push_back("paths intersect");
  }
  if (c.achieved > c.bound) problems.push_back("path too long");
  c.pass = problems.empty();
  for (const auto& s : problems) c.detail += (c.detail.empty() ? "" : "; ") + s;
  return c;
}

AxisAvoidingResult axis_avoiding_paths(std::span<const Point> xs, std::span<const Point> ys) {
  const auto n = static_cast<int>(xs.size());
  if (n < 1 || ys.size() != xs.size()) throw HypothesisError("need n >= 1 pairs");
  const int d = static_cast<int>(xs.front().size());
  if (d < 3) throw HypothesisError("axis-avoiding paths need d >= 3");
  check_dims(xs, d, "x");
  check_dims(ys, d, "y");
  for (int k = 0; k < n; ++k) {
    if (xs[k][0] != -2 * n || ys[k][0] != 2 * n) throw HypothesisError("need x_1 = -2n and y_1 = 2n");
    for (int a = 1; a < d; ++a)
      if (xs[k][a] != ys[k][a]) throw HypothesisError("x and y must agree off the first axis");
  }
  sorted_unique(xs);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a][1] < xs[b][1]; });
  AxisAvoidingResult out;
  out.n = n;
  out.bundle.paths.resize(n);
  auto run = [](std::vector<Point>& path, int axis, int target) {
    Point cur = path.back();
    const int step = target > cur[axis] ? 1 : -1;
    while (cur[axis] != target) {
      cur[axis] += step;
      path.push_back(cur);
    }
  };
  for (int rank = 1; rank <= n; ++rank) {
    const std::size_t k = order[rank - 1];
    std::vector<Point> path{xs[k]};
    if (xs[k][1] < 0) {
      run(path, 0, 2 * n);
    } else {
      // detour one row up over the columns -(2 rank - 1) .. 2 rank - 1
      const int column = 2 * rank - 1;
      run(path, 0, -column);
      run(path, 1, xs[k][1] + 1);
      run(path, 0, column);
      run(path, 1, xs[k][1]);
      run(path, 0, 2 * n);
    }
    out.bundle.paths[k] = std::move(path);
  }
  return out;
}

}  // namespace perclab
