#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "perclab/combinatorics.hpp"

namespace perclab {

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  for (const auto& row : cost)
    if (row.size() != n) throw std::invalid_argument("assignment cost matrix must be square");
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; column 0 is a sentinel
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double segment_distance(std::span<const double> p0, std::span<const double> p1, std::span<const double> q0,
                        std::span<const double> q1) {
  const std::size_t d = p0.size();
  auto dot = [d](auto&& f, auto&& g) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += f(k) * g(k);
    return s;
  };
  auto d1 = [&](std::size_t k) { return p1[k] - p0[k]; };
  auto d2 = [&](std::size_t k) { return q1[k] - q0[k]; };
  auto r = [&](std::size_t k) { return p0[k] - q0[k]; };
  const double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
  constexpr double eps = 1e-15;
  double s = 0.0, t = 0.0;
  auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
  if (a <= eps && e <= eps) {
    s = t = 0.0;
  } else if (a <= eps) {
    t = clamp01(f / e);
  } else {
    const double c = dot(d1, r);
    if (e <= eps) {
      s = clamp01(-c / a);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > eps * a * e ? clamp01((b * f - c * e) / denom) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = clamp01(-c / a);
      } else if (t > 1.0) {
        t = 1.0;
        s = clamp01((b - c) / a);
      }
    }
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = (p0[k] + s * d1(k)) - (q0[k] + t * d2(k));
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double matching_cost(const Point& x, const Point& y, int axis, int spread) {
  double c = 0.0;
  const double K2 = static_cast<double>(spread) * spread;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (static_cast<int>(k) == axis) continue;
    const double diff = static_cast<double>(x[k] - y[k]);
    c += std::sqrt(K2 + diff * diff);
  }
  return c;
}

double SeparatedMatching::required() const { return gap / (std::sqrt(2.0) * spread); }

namespace {

void check_hypotheses(std::span<const Point> S1, std::span<const Point> S2, int spread, int axis, int& gap) {
  if (S1.empty() || S1.size() != S2.size()) throw HypothesisError("matching needs two nonempty sets of equal size");
  const std::size_t d = S1.front().size();
  if (d < 3) throw HypothesisError("separated matching needs d >= 3");
  if (axis < 0 || axis >= static_cast<int>(d)) throw HypothesisError("axis out of range");
  for (const auto& p : S1)
    if (p.size() != d || p[axis] != S1.front()[axis]) throw HypothesisError("S1 is not on one hyperplane");
  for (const auto& p : S2)
    if (p.size() != d || p[axis] != S2.front()[axis]) throw HypothesisError("S2 is not on one hyperplane");
  gap = std::abs(S2.front()[axis] - S1.front()[axis]);
  if (gap < 1) throw HypothesisError("hyperplanes must be at distance l >= 1");
  if (spread < gap) throw HypothesisError("need K >= l");
  for (auto* S : {&S1, &S2}) {
    std::vector<Point> v(S->begin(), S->end());
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw HypothesisError("repeated point");
  }
  for (const auto& x : S1)
    for (const auto& y : S2)
      for (std::size_t k = 0; k < d; ++k)
        if (std::abs(x[k] - y[k]) > spread) throw HypothesisError("spread hypothesis max |x - y|_inf <= K fails");
}

std::vector<double> as_real(const Point& p) { return {p.begin(), p.end()}; }

SeparatedMatching finish(std::span<const Point> S1, std::span<const Point> S2, int spread, int axis, int gap,
                         std::vector<std::size_t> sigma) {
  SeparatedMatching out;
  out.axis = axis;
  out.gap = gap;
  out.spread = spread;
  out.sources.assign(S1.begin(), S1.end());
  out.targets.assign(S2.begin(), S2.end());
  out.sigma = std::move(sigma);
  for (std::size_t i = 0; i < out.sigma.size(); ++i)
    out.cost += matching_cost(out.sources[i], out.targets[out.sigma[i]], axis, spread);
  out.min_distance = std::numeric_limits<double>::infinity();
  const std::size_t m = out.sources.size();
  std::vector<std::vector<double>> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = as_real(out.sources[i]);
    b[i] = as_real(out.targets[out.sigma[i]]);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      out.min_distance = std::min(out.min_distance, segment_distance(a[i], b[i], a[j], b[j]));
  return out;
}

double min_pair_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                          const std::vector<std::size_t>& sigma) {
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sigma.size(); ++i)
    for (std::size_t j = i + 1; j < sigma.size(); ++j)
      out = std::min(out, segment_distance(a[i], b[sigma[i]], a[j], b[sigma[j]]));
  return out;
}

// The minimizer is not unique when transpositions are cost-neutral, and only
// some of the tied minimizers are separated. Walk cost-neutral transpositions
// while they raise the smallest pairwise distance; the cost stays optimal.
void prefer_separated_minimizer(std::span<const Point> S1, std::span<const Point> S2,
                                const std::vector<std::vector<double>>& cost, double required,
                                std::vector<std::size_t>& sigma) {
  const std::size_t m = sigma.size();
  std::vector<std::vector<double>> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = as_real(S1[i]);
    b[i] = as_real(S2[i]);
  }
  double current = min_pair_distance(a, b, sigma);
  for (std::size_t round = 0; round < m * m && current < required - 1e-9; ++round) {
    bool moved = false;
    for (std::size_t i = 0; i < m && !moved; ++i)
      for (std::size_t j = i + 1; j < m && !moved; ++j) {
        const double now = cost[i][sigma[i]] + cost[j][sigma[j]];
        const double swapped = cost[i][sigma[j]] + cost[j][sigma[i]];
        if (std::abs(swapped - now) > 1e-9 * std::max(1.0, now)) continue;
        std::swap(sigma[i], sigma[j]);
        const double next = min_pair_distance(a, b, sigma);
        if (next > current + 1e-12) {
          current = next;
          moved = true;
        } else {
          std::swap(sigma[i], sigma[j]);
        }
      }
    if (!moved) break;
  }
}

}  // namespace

LemmaCheck SeparatedMatching::verify() const {
  LemmaCheck c;
  c.bound = required();
  c.achieved = sources.size() < 2 ? std::numeric_limits<double>::infinity() : min_distance;
  std::vector<std::size_t> perm = sigma;
  std::sort(perm.begin(), perm.end());
  bool bijection = perm.size() == targets.size();
  for (std::size_t i = 0; i < perm.size() && bijection; ++i) bijection = perm[i] == i;
  c.pass = bijection && c.achieved >= c.bound - 1e-9 && c.achieved > 0.0;
  c.detail = bijection ? "" : "not a bijection";
  return c;
}

SeparatedMatching separated_matching(std::span<const Point> S1, std::span<const Point> S2, int spread, int axis) {
  int gap = 0;
  check_hypotheses(S1, S2, spread, axis, gap);
  const std::size_t m = S1.size();
  std::vector<std::vector<double>> cost(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i][j] = matching_cost(S1[i], S2[j], axis, spread);
  auto sigma = min_cost_assignment(cost);
  prefer_separated_minimizer(S1, S2, cost, gap / (std::sqrt(2.0) * spread), sigma);
  return finish(S1, S2, spread, axis, gap, std::move(sigma));
}

SeparatedMatching two_swap_matching(std::span<const Point> S1, std::span<const Point> S2, int spread, int axis) {
  int gap = 0;
  check_hypotheses(S1, S2, spread, axis, gap);
  const std::size_t m = S1.size();
  std::vector<std::vector<double>> cost(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cost[i][j] = matching_cost(S1[i], S2[j], axis, spread);
  std::vector<std::size_t> sigma(m);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double now = cost[i][sigma[i]] + cost[j][sigma[j]];
        const double swapped = cost[i][sigma[j]] + cost[j][sigma[i]];
        if (swapped < now - 1e-12 * std::max(1.0, now)) {
          std::swap(sigma[i], sigma[j]);
          improved = true;
        }
      }
    }
  }
  return finish(S1, S2, spread, axis, gap, std::move(sigma));
}

}  // namespace perclab
