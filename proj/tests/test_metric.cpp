#include <doctest.h>

#include <set>
#include <sstream>

#include "builders.hpp"
#include "oracles.hpp"
#include "perclab/metric.hpp"
#include "perclab/rng.hpp"

using namespace perclab;

namespace {

std::vector<std::size_t> layer_sizes(const BallGrowth& b) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < b.layer_count(); ++t) out.push_back(b.layer_size(t));
  return out;
}

}  // namespace

TEST_CASE("all-open balls are l1 balls") {
  const auto g = build::box(2, 6);
  const auto s = PercolationSample::uniform(g, true);
  const auto b = grow_ball(s, Point{0, 0}, 2);
  CHECK(layer_sizes(b) == std::vector<std::size_t>{1, 4, 8});
  CHECK_FALSE(b.contaminated());
  for (const auto& x : oracle::all_points(g->spec())) {
    const auto d = static_cast<std::uint32_t>(std::abs(x[0]) + std::abs(x[1]));
    CHECK(b.dist(g->vertex(x)) == (d <= 2 ? d : kInfinity));
  }
}

TEST_CASE("all-closed ball is the source alone") {
  const auto g = build::box(2, 3);
  const auto b = grow_ball(PercolationSample::uniform(g, false), Point{0, 0});
  CHECK(layer_sizes(b) == std::vector<std::size_t>{1});
  for (VertexId v = 0; v < g->vertex_count(); ++v)
    if (v != b.source()) CHECK(b.dist(v) == kInfinity);
}

TEST_CASE("BFS distances equal unit-weight Dijkstra") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = trial % 2 ? 3 : 2;
    const int L = d == 2 ? 7 : 3;
    const double ps[] = {0.3, 0.55, 0.7, 0.9};
    const auto s = sample_configuration(BoxSpec{d, L, {}}, ps[trial % 4], rng());
    const auto& g = s.geometry();
    const auto pts = oracle::all_points(s.box());
    const Point src = pts[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(pts.size()) - 1))];
    const auto b = grow_ball(s, src);
    const auto ref = oracle::dijkstra(s, {src});
    for (const auto& x : pts) CHECK(b.dist(g.vertex(x)) == oracle::lookup(ref, x));
  }
}

TEST_CASE("ball layers are disjoint, nested and consistent with dist") {
  const auto s = sample_configuration(BoxSpec{2, 10, {}}, 0.65, 5);
  const auto b = grow_ball(s, Point{0, 0});
  std::set<VertexId> seen;
  std::uint64_t vol = 0;
  for (std::size_t t = 0; t < b.layer_count(); ++t) {
    for (auto v : b.layer(t)) {
      CHECK(seen.insert(v).second);
      CHECK(b.dist(v) == t);
    }
    vol += b.layer_size(t);
    CHECK(b.volume(t) == vol);
  }
  CHECK(b.reached().size() == seen.size());
  for (auto v : b.reached()) {
    std::uint32_t steps = 0;
    for (VertexId w = v; w != b.source(); w = b.pred(w)) {
      CHECK(b.dist(b.pred(w)) + 1 == b.dist(w));
      ++steps;
    }
    CHECK(steps == b.dist(v));
  }
}

TEST_CASE("ball records boundary contamination") {
  const auto g = build::box(2, 3);
  const auto open = PercolationSample::uniform(g, true);
  CHECK(grow_ball(open, Point{0, 0}).contaminated());
  CHECK(grow_ball(open, Point{0, 0}).face_time() == std::optional<std::uint32_t>(3));
  CHECK_FALSE(grow_ball(open, Point{0, 0}, 2).contaminated());
  CHECK(grow_ball(open, Point{0, 0}, 2).truncated());
}

TEST_CASE("chemical distance along a single open path") {
  const auto g = build::box(2, 8);
  const auto s = build::with_open_path(g, build::segment({0, 0}, 0, 5));
  CHECK(chemical_distance(s, Point{0, 0}, Point{5, 0}).distance == 5);
  CHECK(chemical_distance(s, Point{0, 0}, Point{0, 1}).distance == kInfinity);
  const std::vector<double> x{0.4, 0.9}, y{5.7, 0.2};
  CHECK(chemical_distance(s, x, y).distance == 5);
  CHECK(floor_point(std::vector<double>{-0.5, 2.0}) == Point{-1, 2});
}

TEST_CASE("chemical distance is symmetric and at least the l1 distance") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = sample_configuration(BoxSpec{2, 6, {}}, 0.6, rng());
    const Point x{static_cast<int>(rng.range(-6, 6)), static_cast<int>(rng.range(-6, 6))};
    const Point y{static_cast<int>(rng.range(-6, 6)), static_cast<int>(rng.range(-6, 6))};
    const auto dxy = chemical_distance(s, x, y).distance;
    CHECK(dxy == chemical_distance(s, y, x).distance);
    if (dxy != kInfinity) CHECK(dxy >= static_cast<std::uint32_t>(std::abs(x[0] - y[0]) + std::abs(x[1] - y[1])));
  }
  const auto open = PercolationSample::uniform(build::box(3, 3), true);
  CHECK(chemical_distance(open, Point{-1, 2, 0}, Point{2, -1, 1}).distance == 7);
}

TEST_CASE("constrained distance") {
  const auto s = sample_configuration(BoxSpec{2, 6, {}}, 0.7, 21);
  const auto& g = s.geometry();
  std::vector<VertexId> all(g.vertex_count());
  for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
  const std::vector<VertexId> from{g.vertex({-3, 0}), g.vertex({-3, 1})};
  const std::vector<VertexId> to{g.vertex({4, 2})};
  SUBCASE("whole box is the unconstrained set distance") {
    CHECK(constrained_distance(s, all, from, to).distance == set_distance(s, from, to).distance);
  }
  SUBCASE("empty endpoint set is signalled") {
    const auto r = constrained_distance(s, all, {}, to);
    CHECK(r.distance == kInfinity);
    CHECK(r.empty_endpoint);
  }
  SUBCASE("single line region") {
    const auto g2 = build::box(2, 6);
    const auto line = build::segment({-2, 1}, 0, 6);
    std::vector<VertexId> region;
    for (const auto& x : line) region.push_back(g2->vertex(x));
    const std::vector<VertexId> a{g2->vertex({-2, 1})}, b{g2->vertex({4, 1})};
    CHECK(constrained_distance(PercolationSample::uniform(g2, true), region, a, b).distance == 6);
    auto closed_one = PercolationSample::uniform(g2, true).with_changes(
        std::vector<EdgeId>{build::edge(*g2, {0, 1}, {1, 1})}, {});
    CHECK(constrained_distance(closed_one, region, a, b).distance == kInfinity);
  }
}

TEST_CASE("slab-constrained distance equals Dijkstra on the induced subgraph") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = sample_configuration(BoxSpec{3, 4, {}}, 0.6, seed);
    const auto& g = s.geometry();
    std::set<Point> slab;
    std::vector<VertexId> region;
    for (const auto& x : oracle::all_points(s.box()))
      if (x[2] == 0) {
        slab.insert(x);
        region.push_back(g.vertex(x));
      }
    const Point a{-4, -4, 0};
    const auto ref = oracle::dijkstra(s, {a}, &slab);
    for (const auto& y : slab) {
      const std::vector<VertexId> from{g.vertex(a)}, to{g.vertex(y)};
      CHECK(constrained_distance(s, region, from, to).distance == oracle::lookup(ref, y));
    }
  }
}

TEST_CASE("geodesics follow the lexicographically least predecessor") {
  const auto g = build::box(2, 4);
  const auto b = grow_ball(PercolationSample::uniform(g, true), Point{0, 0});
  const auto path = geodesic(b, g->vertex({2, 1}));
  std::vector<Point> pts;
  for (auto v : path) pts.push_back(g->point(v));
  CHECK(pts == std::vector<Point>{{0, 0}, {0, 1}, {1, 1}, {2, 1}});
  CHECK_THROWS(geodesic(grow_ball(PercolationSample::uniform(g, false), Point{0, 0}), g->vertex({1, 0})));
}

TEST_CASE("geodesic on a path graph is the path") {
  const auto g = build::box(2, 6);
  const std::vector<Point> p{{0, 0}, {1, 0}, {1, 1}, {1, 2}, {0, 2}, {-1, 2}};
  const auto b = grow_ball(build::with_open_path(g, p), Point{0, 0});
  std::vector<Point> pts;
  for (auto v : geodesic(b, g->vertex({-1, 2}))) pts.push_back(g->point(v));
  CHECK(pts == p);
}

TEST_CASE("geodesic length equals the chemical distance and is self-avoiding") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = sample_configuration(BoxSpec{2, 8, {}}, 0.7, seed);
    const auto b = grow_ball(s, Point{0, 0});
    for (auto v : b.reached()) {
      const auto path = geodesic(b, v);
      CHECK(path.size() == b.dist(v) + 1);
      CHECK(std::set<VertexId>(path.begin(), path.end()).size() == path.size());
      CHECK(path.front() == b.source());
      CHECK(path.back() == v);
    }
  }
}

TEST_CASE("volume threshold times") {
  const auto g = build::box(2, 5);
  const auto b = grow_ball(PercolationSample::uniform(g, true), Point{0, 0});
  CHECK(volume_threshold_time(b, 1) == std::optional<std::uint32_t>(0));
  CHECK(volume_threshold_time(b, 5) == std::optional<std::uint32_t>(1));
  CHECK_FALSE(volume_threshold_time(grow_ball(PercolationSample::uniform(g, false), Point{0, 0}), 2).has_value());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = sample_configuration(BoxSpec{2, 9, {}}, 0.6, seed);
    const auto ball = grow_ball(s, Point{0, 0});
    const auto ref = oracle::dijkstra(s, {Point{0, 0}});
    std::vector<std::uint64_t> prefix;
    for (const auto& [x, dist] : ref) {
      if (prefix.size() <= dist) prefix.resize(dist + 1, 0);
      ++prefix[dist];
    }
    for (std::size_t t = 1; t < prefix.size(); ++t) prefix[t] += prefix[t - 1];
    for (std::uint64_t vol = 1; vol <= prefix.back() + 1; vol += 3) {
      std::optional<std::uint32_t> expect;
      for (std::size_t t = 0; t < prefix.size(); ++t)
        if (prefix[t] >= vol) {
          expect = static_cast<std::uint32_t>(t);
          break;
        }
      CHECK(volume_threshold_time(ball, vol) == expect);
    }
  }
}

TEST_CASE("closing edges never decreases a distance") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = sample_configuration(BoxSpec{2, 8, {}}, 0.7, rng());
    auto open = s.open_edges();
    std::vector<EdgeId> close;
    for (auto e : open)
      if (rng.uniform() < 0.1) close.push_back(e);
    const auto t = s.with_changes(close, {});
    const auto before = grow_ball(s, Point{0, 0});
    const auto after = grow_ball(t, Point{0, 0});
    for (VertexId v = 0; v < s.geometry().vertex_count(); ++v) CHECK(after.dist(v) >= before.dist(v));
  }
}

TEST_CASE("distance CSV dump") {
  const auto g = build::box(2, 1);
  const auto b = grow_ball(build::with_open_path(g, {{0, 0}, {1, 0}}), Point{0, 0});
  std::ostringstream out;
  write_distance_csv(out, b);
  const auto text = out.str();
  CHECK(text.rfind("# perclab-schema distance v1\nx1,x2,dist\n", 0) == 0);
  CHECK(text.find("0,0,0\n") != std::string::npos);
  CHECK(text.find("1,0,1\n") != std::string::npos);
  CHECK(text.find("-1,-1,inf\n") != std::string::npos);
}
