#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "oracles.hpp"
#include "perclab/combinatorics.hpp"
#include "perclab/lemma_check.hpp"
#include "perclab/rng.hpp"

using namespace perclab;

namespace {

// distance between segments by nested ternary search on the convex function
// |p(s) - q(t)|, s, t in [0, 1]
double segment_distance_oracle(const Point& p0, const Point& p1, const Point& q0, const Point& q1) {
  auto dist = [&](double s, double t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) {
      const double a = p0[k] + s * (p1[k] - p0[k]);
      const double b = q0[k] + t * (q1[k] - q0[k]);
      sum += (a - b) * (a - b);
    }
    return std::sqrt(sum);
  };
  auto ternary = [](auto f) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (f(m1) <= f(m2))
        hi = m2;
      else
        lo = m1;
    }
    return std::min({f(0.5 * (lo + hi)), f(0.0), f(1.0)});
  };
  return ternary([&](double s) { return ternary([&](double t) { return dist(s, t); }); });
}

bool unit_steps(const std::vector<Point>& path) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    int l1 = 0;
    for (std::size_t k = 0; k < path[i].size(); ++k) l1 += std::abs(path[i][k] - path[i - 1][k]);
    if (l1 != 1) return false;
  }
  return true;
}

// vertices of Z^d \ gamma with a nearest neighbour in gamma that connect to
// the outside of the bounding box, by flood fill from a corner
std::set<Point> exterior_boundary_oracle(const std::vector<Point>& gamma) {
  const std::size_t d = gamma.front().size();
  Point lo = gamma.front(), hi = gamma.front();
  for (const auto& x : gamma)
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], x[k] - 1);
      hi[k] = std::max(hi[k], x[k] + 1);
    }
  const std::set<Point> G(gamma.begin(), gamma.end());
  auto inside = [&](const Point& x) {
    for (std::size_t k = 0; k < d; ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
  };
  std::set<Point> outside{lo};
  std::vector<Point> stack{lo};
  while (!stack.empty()) {
    const Point x = stack.back();
    stack.pop_back();
    for (std::size_t k = 0; k < d; ++k)
      for (int s : {-1, 1}) {
        Point y = x;
        y[k] += s;
        if (inside(y) && !G.count(y) && outside.insert(y).second) stack.push_back(y);
      }
  }
  std::set<Point> out;
  for (const auto& x : outside)
    for (std::size_t k = 0; k < d; ++k)
      for (int s : {-1, 1}) {
        Point y = x;
        y[k] += s;
        if (G.count(y)) out.insert(x);
      }
  return out;
}

}  // namespace

TEST_CASE("point set diameters") {
  const PointSet S(3, {{0, 0, 0}, {2, -1, 5}, {1, 3, 0}, {2, -1, 5}});
  CHECK(S.size() == 3);
  CHECK(S.diam(0) == 2);
  CHECK(S.diam(1) == 4);
  CHECK(S.diam(2) == 5);
  CHECK(S.diam() == 5);
  CHECK(S.contains({1, 3, 0}));
  CHECK_THROWS(PointSet(2, {{1, 2, 3}}));
}

TEST_CASE("projection of a single point and of a line") {
  const auto one = projection_best(PointSet(3, {{4, 5, 6}}));
  CHECK(one.projection.size() == 1);
  CHECK(one.verify(1).pass);
  std::vector<Point> line;
  for (int k = 0; k < 30; ++k) line.push_back({k, 0, 0});
  const auto r = projection_best(PointSet(3, line));
  CHECK(r.axis != 0);
  CHECK(r.projection.size() == 30);
  CHECK(r.verify(30).pass);
}

TEST_CASE("projection bound on random sets in d = 3") {
  SplitMix64 rng(101);
  for (int trial = 0; trial < 500; ++trial) {
    const PointSet S(3, random_point_set(rng, 3, 2000, 20));
    const auto r = projection_best(S);
    CHECK(r.projection.size() == oracle::projection_size(S.points(), r.axis));
    CHECK(static_cast<double>(r.projection.size()) >= 0.5 * std::pow(static_cast<double>(S.size()), 2.0 / 3.0));
    if (!r.from_case_analysis) {
      std::size_t best = 0;
      for (int a = 0; a < 3; ++a) best = std::max(best, oracle::projection_size(S.points(), a));
      CHECK(r.projection.size() == best);
    }
  }
}

TEST_CASE("projection bound is reported as failing for a planar grid") {
  // in d = 2 a k x k grid has projections of size k < k^{4/3} / 2 once k > 8
  std::vector<Point> grid;
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b) grid.push_back({a, b});
  const auto r = projection_best(PointSet(2, grid));
  CHECK(r.projection.size() == 20);
  CHECK_FALSE(r.verify(400).pass);
}

TEST_CASE("distinct-coordinate subsets") {
  SUBCASE("singleton") {
    const PointSet S(3, {{1, 2, 3}});
    const auto r = distinct_coordinate_subset(S);
    CHECK(r.subset == S.points());
    CHECK(r.verify(S).pass);
  }
  SUBCASE("k x k grid against the diagonal") {
    for (int k : {2, 5, 9}) {
      std::vector<Point> grid;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) grid.push_back({a, b});
      const PointSet S(2, grid);
      const double m = static_cast<double>(k * k) / (2.0 * (k - 1));
      CHECK(distinct_subset_bound(S) == doctest::Approx(m));
      CHECK(static_cast<double>(k) >= m);  // the diagonal certifies the bound
      const auto r = distinct_coordinate_subset(S);
      CHECK(static_cast<double>(r.subset.size()) >= m - 1e-9);
      CHECK(r.verify(S).pass);
    }
  }
  SUBCASE("random sets, verified directly") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
      const int d = 2 + trial % 3;
      const PointSet S(d, random_point_set(rng, d, 2000, 15));
      const auto r = distinct_coordinate_subset(S);
      REQUIRE(r.axis_i != r.axis_j);
      std::set<int> ci, cj;
      for (const auto& p : r.subset) {
        CHECK(S.contains(p));
        ci.insert(p[r.axis_i]);
        cj.insert(p[r.axis_j]);
      }
      CHECK(ci.size() == r.subset.size());
      CHECK(cj.size() == r.subset.size());
      const double bound = S.diam() == 0 ? 1.0
                                         : std::pow(static_cast<double>(S.size()) / (std::pow(2.0, d - 1) * S.diam()),
                                                    1.0 / (d - 1));
      CHECK(static_cast<double>(r.subset.size()) + 1e-9 >= bound);
    }
  }
}

TEST_CASE("minimum-cost assignment matches brute force") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = static_cast<std::size_t>(rng.range(1, 7));
    std::vector<std::vector<double>> cost(m, std::vector<double>(m));
    for (auto& row : cost)
      for (auto& c : row) c = static_cast<double>(rng.range(0, 50)) + rng.uniform();
    const auto sigma = min_cost_assignment(cost);
    double total = 0.0;
    std::set<std::size_t> cols(sigma.begin(), sigma.end());
    CHECK(cols.size() == m);
    for (std::size_t i = 0; i < m; ++i) total += cost[i][sigma[i]];
    CHECK(total == doctest::Approx(oracle::brute_force_assignment(cost)));
  }
}

TEST_CASE("segment distance") {
  const std::vector<double> a0{0, 0, 0}, a1{1, 0, 0}, b0{0, 1, 0}, b1{1, 1, 0}, c0{0.5, -1, 1}, c1{0.5, 1, 1};
  CHECK(segment_distance(a0, a1, b0, b1) == doctest::Approx(1.0));
  CHECK(segment_distance(a0, a1, c0, c1) == doctest::Approx(1.0));
  CHECK(segment_distance(a0, a1, a0, b1) == doctest::Approx(0.0));
  SplitMix64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    Point p[4];
    for (auto& q : p) q = {static_cast<int>(rng.range(-5, 5)), static_cast<int>(rng.range(-5, 5)),
                           static_cast<int>(rng.range(-5, 5))};
    const std::vector<double> d[4] = {{p[0].begin(), p[0].end()}, {p[1].begin(), p[1].end()},
                                      {p[2].begin(), p[2].end()}, {p[3].begin(), p[3].end()}};
    CHECK(segment_distance(d[0], d[1], d[2], d[3]) ==
          doctest::Approx(segment_distance_oracle(p[0], p[1], p[2], p[3])).epsilon(1e-6));
  }
}

TEST_CASE("separated matching examples") {
  SUBCASE("single pair") {
    const std::vector<Point> S1{{0, 3, 4}}, S2{{2, 1, 1}};
    const auto r = separated_matching(S1, S2, 5);
    CHECK(r.sigma == std::vector<std::size_t>{0});
    CHECK(r.verify().pass);
  }
  SUBCASE("two parallel unit-separated segments") {
    const int K = 6;
    const std::vector<Point> S1{{0, 0, 0}, {0, 1, 0}}, S2{{K, 0, 0}, {K, 1, 0}};
    const auto r = separated_matching(S1, S2, K);
    CHECK(r.sigma == std::vector<std::size_t>{0, 1});
    CHECK(r.min_distance == doctest::Approx(1.0));
    CHECK(r.min_distance >= 1.0 / std::sqrt(2.0));
    CHECK(r.verify().pass);
  }
  SUBCASE("hypothesis violations") {
    const std::vector<Point> S1{{0, 0, 0}, {0, 9, 0}}, S2{{2, 0, 0}, {2, 1, 0}};
    CHECK_THROWS_AS(separated_matching(S1, S2, 3), HypothesisError);  // spread
    CHECK_THROWS_AS(separated_matching(S1, std::vector<Point>{{2, 0, 0}}, 10), HypothesisError);
    CHECK_THROWS_AS(separated_matching(std::vector<Point>{{0, 0}}, std::vector<Point>{{1, 0}}, 2), HypothesisError);
  }
}

TEST_CASE("separated matching is optimal and non-crossing on random instances") {
  SplitMix64 rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_matching_instance(rng, 6, 12);
    const auto r = separated_matching(inst.S1, inst.S2, inst.spread);
    const std::size_t m = inst.S1.size();
    std::vector<std::vector<double>> cost(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) cost[i][j] = matching_cost(r.sources[i], r.targets[j], 0, inst.spread);
    CHECK(r.cost == doctest::Approx(oracle::brute_force_assignment(cost)));
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        smallest = std::min(smallest, segment_distance_oracle(r.sources[a], r.targets[r.sigma[a]], r.sources[b],
                                                              r.targets[r.sigma[b]]));
    if (m > 1) {
      CHECK(smallest > 0.1);
      CHECK(r.min_distance == doctest::Approx(smallest).epsilon(1e-6));
    }
  }
}

TEST_CASE("the separation constant fails on a small instance for every bijection") {
  // K = l = 3; the best of the 3! bijections keeps its segments 0.688 apart,
  // below l / (sqrt 2 K) = 0.707. verify() must report this instance as failing.
  const std::vector<Point> S1{{0, 2, 2}, {0, 3, 1}, {0, 1, 2}}, S2{{3, 0, 2}, {3, 0, 1}, {3, 3, 0}};
  std::vector<std::size_t> perm{0, 1, 2};
  double best = 0.0;
  do {
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        smallest = std::min(smallest, segment_distance_oracle(S1[a], S2[perm[a]], S1[b], S2[perm[b]]));
    best = std::max(best, smallest);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(best == doctest::Approx(0.68825).epsilon(1e-4));
  CHECK(best < 1.0 / std::sqrt(2.0));
  const auto r = separated_matching(S1, S2, 3);
  CHECK(r.min_distance <= best + 1e-9);
  CHECK(r.min_distance > 0.0);
  CHECK_FALSE(r.verify().pass);
}

TEST_CASE("cost-neutral transpositions pick a separated minimizer") {
  // both bijections cost 2 + 2 sqrt 2; only the identity pairing is separated
  const std::vector<Point> S1{{0, 0, 0}, {0, 1, 0}}, S2{{1, 0, 0}, {1, 0, 1}};
  const auto r = separated_matching(S1, S2, 1);
  CHECK(r.min_distance == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(r.verify().pass);
}

TEST_CASE("transposition-optimal matchings do not cross") {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_matching_instance(rng, 25, 15);
    const auto exact = separated_matching(inst.S1, inst.S2, inst.spread);
    const auto swap = two_swap_matching(inst.S1, inst.S2, inst.spread);
    CHECK(swap.cost >= exact.cost - 1e-9);
    if (inst.S1.size() > 1) CHECK(swap.min_distance > 0.0);
  }
}

TEST_CASE("path bundle with two aligned pairs") {
  const std::vector<Point> S1{{0, 0, 0}, {0, 3, 0}}, S2{{4, 0, 0}, {4, 3, 0}};
  BundleGeometry g;
  g.gap = 4;
  g.spread = 4;
  const auto r = disjoint_path_bundle(S1, S2, g);
  REQUIRE(r.bundle.paths.size() == 2);
  for (const auto& p : r.bundle.paths) CHECK(p.size() == 5);
  CHECK(r.bundle.max_multiplicity() == 1);
  CHECK(r.verify(S1, S2).pass);
  CHECK_THROWS_AS(disjoint_path_bundle(std::vector<Point>{{0, 0}}, std::vector<Point>{{1, 0}}, g), HypothesisError);
}

TEST_CASE("path bundle invariants, verified independently") {
  SplitMix64 rng(505);
  for (bool perpendicular : {false, true})
    for (int trial = 0; trial < 60; ++trial) {
      const auto inst = perpendicular ? random_perpendicular_bundle(rng, 30, 15) : random_parallel_bundle(rng, 30, 20);
      const auto r = disjoint_path_bundle(inst.S1, inst.S2, inst.geometry);
      const std::set<Point> A(inst.S1.begin(), inst.S1.end()), B(inst.S2.begin(), inst.S2.end());
      const std::size_t m = std::min(A.size(), B.size());
      CHECK(2 * r.bundle.paths.size() >= m);
      std::map<Point, std::size_t> mult;
      std::set<Point> starts, ends;
      for (const auto& p : r.bundle.paths) {
        CHECK(unit_steps(p));
        CHECK(A.count(p.front()));
        CHECK(B.count(p.back()));
        CHECK(starts.insert(p.front()).second);
        CHECK(ends.insert(p.back()).second);
        CHECK(static_cast<double>(p.size() - 1) <= 2.0 * 3 * inst.geometry.spread);
        for (const auto& v : std::set<Point>(p.begin(), p.end())) ++mult[v];
      }
      std::size_t worst = 0;
      for (const auto& [v, c] : mult) worst = std::max(worst, c);
      const double chi = std::pow(6.0, 6.0);
      const double bound = perpendicular ? chi + std::pow(4.0, 3)
                                         : chi * std::pow(static_cast<double>(inst.geometry.spread) / inst.geometry.gap, 2);
      CHECK(static_cast<double>(worst) <= bound);
      CHECK(r.verify(inst.S1, inst.S2).pass);
    }
}

TEST_CASE("axis-avoiding paths") {
  auto check_instance = [](const std::vector<Point>& xs, const std::vector<Point>& ys) {
    const int n = static_cast<int>(xs.size());
    const auto r = axis_avoiding_paths(xs, ys);
    REQUIRE(r.bundle.paths.size() == xs.size());
    std::set<Point> used;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const auto& p = r.bundle.paths[k];
      CHECK(p.front() == xs[k]);
      CHECK(p.back() == ys[k]);
      CHECK(unit_steps(p));
      CHECK(static_cast<int>(p.size()) - 1 <= 8 * n);
      for (std::size_t v = 0; v < p.size(); ++v) {
        CHECK_FALSE((p[v][0] == 0 && p[v][1] == 0));
        if (v > 0 && v + 1 < p.size()) CHECK(std::abs(p[v][0]) < 2 * n);
      }
      const std::set<Point> mine(p.begin(), p.end());
      for (const auto& z : mine) CHECK(used.insert(z).second);
    }
    CHECK(r.verify(xs, ys).pass);
  };
  SUBCASE("n = 1") {
    check_instance({{-2, 3, 1}}, {{2, 3, 1}});
    check_instance({{-2, 0, 5}}, {{2, 0, 5}});
  }
  SUBCASE("n = 4 with sorted second coordinates") {
    std::vector<Point> xs, ys;
    for (int k = 0; k < 4; ++k) {
      xs.push_back({-8, k - 1, 2 * k});
      ys.push_back({8, k - 1, 2 * k});
    }
    check_instance(xs, ys);
  }
  SUBCASE("stacked on the forbidden line") {
    std::vector<Point> xs, ys;
    for (int k = 0; k < 5; ++k) {
      xs.push_back({-10, 0, k});
      ys.push_back({10, 0, k});
    }
    check_instance(xs, ys);
  }
  SUBCASE("random instances") {
    SplitMix64 rng(606);
    for (int trial = 0; trial < 100; ++trial) {
      const auto inst = random_axis_avoiding_instance(rng, 20);
      check_instance(inst.xs, inst.ys);
    }
  }
  SUBCASE("hypothesis violations") {
    CHECK_THROWS_AS(axis_avoiding_paths(std::vector<Point>{{-4, 0, 0}}, std::vector<Point>{{2, 0, 0}}),
                    HypothesisError);
    CHECK_THROWS_AS(axis_avoiding_paths(std::vector<Point>{{-2, 0, 0}}, std::vector<Point>{{2, 1, 0}}),
                    HypothesisError);
  }
}

TEST_CASE("exterior boundary examples") {
  SUBCASE("single vertex") {
    for (int d : {2, 3}) {
      const auto r = exterior_boundary(std::vector<Point>{Point(d, 0)});
      CHECK(r.boundary.size() == static_cast<std::size_t>(2 * d));
      CHECK(r.star_connected);
    }
  }
  SUBCASE("3 x 3 square") {
    std::vector<Point> sq;
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b) sq.push_back({a, b});
    const auto r = exterior_boundary(sq);
    std::set<Point> expected;
    for (int c = -1; c <= 1; ++c) {
      expected.insert({-2, c});
      expected.insert({2, c});
      expected.insert({c, -2});
      expected.insert({c, 2});
    }
    CHECK(expected.size() == 12);
    CHECK(std::set<Point>(r.boundary.begin(), r.boundary.end()) == expected);
    CHECK(r.star_connected);
    CHECK(oracle::star_connected(r.boundary));
  }
  SUBCASE("a ring has an interior that is not boundary") {
    std::vector<Point> ring;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        if (std::max(std::abs(a), std::abs(b)) == 2) ring.push_back({a, b});
    const auto r = exterior_boundary(ring);
    CHECK(r.interior.size() == 9);
    for (const auto& z : r.boundary) CHECK(std::max(std::abs(z[0]), std::abs(z[1])) == 3);
  }
  SUBCASE("face contact is rejected") {
    CHECK_THROWS_AS(exterior_boundary(std::vector<Point>{{3, 0}}, BoxSpec{2, 3, {}}), HypothesisError);
    CHECK_NOTHROW(exterior_boundary(std::vector<Point>{{2, 0}}, BoxSpec{2, 3, {}}));
  }
}

TEST_CASE("exterior boundaries of random connected sets") {
  SplitMix64 rng(707);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + trial % 2;
    const auto gamma = random_connected_set(rng, d, static_cast<std::size_t>(rng.range(1, d == 2 ? 300 : 120)));
    REQUIRE(is_connected(gamma));
    const auto r = exterior_boundary(gamma);
    CHECK(std::set<Point>(r.boundary.begin(), r.boundary.end()) == exterior_boundary_oracle(gamma));
    CHECK(oracle::star_connected(r.boundary));
    CHECK(r.star_connected == oracle::star_connected(r.boundary));
    CHECK(static_cast<double>(gamma.size()) <=
          std::pow(static_cast<double>(r.boundary.size()), static_cast<double>(d) / (d - 1)));
    CHECK(isoperimetry_check(gamma.size(), r.boundary.size(), d).pass);
  }
}

TEST_CASE("connectivity predicates") {
  CHECK(is_connected(std::vector<Point>{{0, 0}, {0, 1}, {1, 1}}));
  CHECK_FALSE(is_connected(std::vector<Point>{{0, 0}, {1, 1}}));
  CHECK(is_star_connected(std::vector<Point>{{0, 0}, {1, 1}}));
  CHECK_FALSE(is_star_connected(std::vector<Point>{{0, 0}, {2, 0}}));
}

TEST_CASE("lattice animals") {
  CHECK(count_lattice_animals(2, 1) == 1);
  CHECK(count_lattice_animals(3, 1) == 1);
  CHECK(count_lattice_animals(2, 2) == 8);
  CHECK(count_lattice_animals(3, 2) == 26);
  for (int k = 1; k <= 5; ++k) {
    const auto n = count_lattice_animals(2, k);
    CHECK(n == oracle::brute_force_animals(2, k));
    CHECK(static_cast<double>(n) <= animal_bound(2, k));
  }
  CHECK(count_lattice_animals(3, 3) == oracle::brute_force_animals(3, 3));
  CHECK(static_cast<double>(count_lattice_animals(2, 7)) <= animal_bound(2, 7));
  CHECK(static_cast<double>(count_lattice_animals(3, 4)) <= animal_bound(3, 4));
  CHECK_THROWS(count_lattice_animals(2, 8));
  CHECK_THROWS(count_lattice_animals(3, 5));
}
