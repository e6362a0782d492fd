#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "perclab/estimators.hpp"
#include "perclab/rng.hpp"

using namespace perclab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// roots of (phat - q)^2 = z^2 q (1 - q) / n
Interval wilson_by_quadratic(double k, double n, double z) {
  const double phat = k / n;
  const double a = 1.0 + z * z / n;
  const double b = -(2.0 * phat + z * z / n);
  const double c = phat * phat;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
}

std::vector<SurfacePoint> l1_surface(int d, double step, double s_max, double y_max) {
  std::vector<SurfacePoint> out;
  const int ns = static_cast<int>(std::lround(s_max / step));
  const int ny = static_cast<int>(std::lround(y_max / step));
  for (int i = 0; i <= ns; ++i)
    for (int a = -ny; a <= ny; ++a)
      for (int b = -ny; b <= ny; ++b) {
        SurfacePoint p;
        p.s = i * step;
        p.y = {a * step, b * step};
        if (d == 2) p.value = p.s + std::abs(p.y[0]) + std::abs(p.y[1]);
        p.sigma = 0.01;
        out.push_back(p);
      }
  return out;
}

}  // namespace

TEST_CASE("wilson interval matches the quadratic root form") {
  for (auto [k, n] : {std::pair{1, 10}, {5, 10}, {37, 200}, {999, 1000}, {3, 100000}}) {
    const auto got = wilson_interval(k, n);
    const auto want = wilson_by_quadratic(k, n, 1.96);
    CHECK(got.lo == doctest::Approx(want.lo).epsilon(1e-10));
    CHECK(got.hi == doctest::Approx(want.hi).epsilon(1e-10));
  }
  CHECK(wilson_interval(0, 10).lo == 0.0);
  CHECK(wilson_interval(0, 10).hi == doctest::Approx(1.96 * 1.96 / (10 + 1.96 * 1.96)));
  CHECK(wilson_interval(10, 10).hi == 1.0);
  CHECK(wilson_interval(0, 0).lo == 0.0);
  CHECK(wilson_interval(0, 0).hi == 1.0);
}

TEST_CASE("tally merging is associative and commutative") {
  SplitMix64 rng(5);
  std::vector<Tally> parts(3);
  Tally all;
  for (int i = 0; i < 300; ++i) {
    const auto o = static_cast<Outcome>(rng.range(0, 3));
    parts[i % 3].add(o);
    all.add(o);
  }
  Tally left = parts[0];
  (left += parts[1]) += parts[2];
  Tally right = parts[1];
  right += parts[2];
  Tally right_all = parts[0];
  right_all += right;
  Tally reversed = parts[2];
  (reversed += parts[1]) += parts[0];
  CHECK(left == all);
  CHECK(right_all == all);
  CHECK(reversed == all);
  CHECK(all.resolved() == all.hits + all.misses + all.disconnected);
}

TEST_CASE("running stats merge equals a single pass") {
  SplitMix64 rng(9);
  RunningStats a, b, whole;
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform() * 10.0 - 3.0;
    (i < 400 ? a : b).add(x);
    whole.add(x);
  }
  a += b;
  CHECK(a.count == whole.count);
  CHECK(a.mean == doctest::Approx(whole.mean).epsilon(1e-12));
  CHECK(a.variance() == doctest::Approx(whole.variance()).epsilon(1e-10));
  CHECK(a.min == whole.min);
  CHECK(a.max == whole.max);
}

TEST_CASE("rate finalization handles certain, impossible and partial outcomes") {
  RateEstimate r;
  r.n = 10;
  r.tally = {100, 100, 0, 0, 0};
  finalize_rate(r);
  CHECK(r.rate == 0.0);
  CHECK_FALSE(r.one_sided);

  r.tally = {100, 0, 100, 0, 0};
  finalize_rate(r);
  CHECK(r.one_sided);
  CHECK(r.rate == kInf);
  CHECK(r.rate_ci.lo == doctest::Approx(-std::log(wilson_interval(0, 100).hi) / 10.0));

  r.tally = {100, 25, 70, 0, 5};
  finalize_rate(r);
  CHECK(r.p_hat == doctest::Approx(25.0 / 95.0));
  CHECK(r.rate == doctest::Approx(-std::log(25.0 / 95.0) / 10.0));
  CHECK(r.rate_ci.lo <= r.rate);
  CHECK(r.rate <= r.rate_ci.hi);
}

TEST_CASE("mu estimate near p = 1 approaches the l1 norm") {
  MuConfig c;
  c.d = 2;
  c.p = 0.999;
  c.n_grid = {50};
  c.mc.seed = 3;
  c.mc.replicates = 200;
  const auto e = estimate_mu(c);
  REQUIRE(e.rows.size() == 1);
  CHECK(e.mu_hat >= 1.0);
  CHECK(e.mu_hat <= 1.02);
  CHECK(e.rows[0].below_l1 == 0);
  CHECK(e.rows[0].ratio.min >= 1.0);
}

TEST_CASE("mu estimates never fall below the l1 floor") {
  for (auto x : {std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}, std::vector<double>{0.3, -0.8}}) {
    MuConfig c;
    c.d = 2;
    c.p = 0.7;
    c.x = x;
    c.n_grid = {10, 20};
    c.mc.seed = 11;
    c.mc.replicates = 100;
    const auto e = estimate_mu(c);
    for (const auto& row : e.rows) {
      CHECK(row.below_l1 == 0);
      if (row.connected) CHECK(row.ratio.min >= row.l1_floor);
      CHECK(row.connected + row.disconnected + row.contaminated == row.replicates);
    }
  }
}

TEST_CASE("mu estimation rejects bad parameters") {
  MuConfig c;
  c.n_grid = {10};
  c.p = 0.4;
  CHECK_THROWS_AS(estimate_mu(c), std::invalid_argument);
  c.p = 0.7;
  c.x = {0.0, 0.0};
  CHECK_THROWS_AS(estimate_mu(c), std::invalid_argument);
  c.x = {1.0};
  CHECK_THROWS_AS(estimate_mu(c), std::invalid_argument);
  c.x = {};
  c.n_grid = {};
  CHECK_THROWS_AS(estimate_mu(c), std::invalid_argument);
  CHECK(critical_probability_proxy(2) == 0.5);
  CHECK_THROWS(critical_probability_proxy(7));
}

TEST_CASE("event A with s = 0 at the origin has probability one") {
  RateConfig c;
  c.kind = EventKind::A;
  c.levels = {0.0};
  c.n_grid = {8, 16};
  c.mc.replicates = 50;
  const auto s = estimate_event_rate(c);
  for (const auto& e : s.estimates) {
    CHECK(e.tally.hits == e.tally.resolved());
    CHECK(e.p_hat == 1.0);
    CHECK(e.rate == 0.0);
  }
}

TEST_CASE("coupled estimates are monotone in s") {
  RateConfig c;
  c.kind = EventKind::A;
  c.levels = {0.0, 0.125, 0.25, 0.5, 1.0};
  c.xs = {{0.0, 0.0}, {0.25, 0.0}};
  c.n_grid = {8};
  c.mc.seed = 4;
  c.mc.replicates = 2000;
  const auto s = estimate_event_rate(c);
  for (const auto& x : c.xs)
    for (std::size_t i = 0; i + 1 < c.levels.size(); ++i) {
      const auto* a = s.find(8, c.levels[i], x);
      const auto* b = s.find(8, c.levels[i + 1], x);
      REQUIRE(a);
      REQUIRE(b);
      CHECK(b->tally.hits <= a->tally.hits);
      CHECK(b->tally.contaminated == a->tally.contaminated);
    }
  const auto* mid = s.find(8, 0.25, c.xs[0]);
  CHECK(mid->p_hat > 0.0);
  CHECK(mid->p_hat < 1.0);
}

TEST_CASE("boundary-limited events are rarer than A") {
  RateConfig c;
  c.levels = {0.25, 0.5};
  c.n_grid = {8};
  c.mc.seed = 21;
  c.mc.replicates = 500;
  c.kind = EventKind::A;
  const auto a = estimate_event_rate(c);
  c.kind = EventKind::A_K;
  c.K = 2.0;
  const auto k = estimate_event_rate(c);
  for (double level : c.levels) {
    const std::vector<double> x{0.0, 0.0};
    CHECK(k.find(8, level, x)->tally.hits <= a.find(8, level, x)->tally.hits);
  }
}

TEST_CASE("subadditivity rows are produced for n + m on the grid") {
  RateConfig c;
  c.levels = {0.125};
  c.n_grid = {4, 8};
  c.mc.seed = 2;
  c.mc.replicates = 400;
  const auto s = estimate_event_rate(c);
  REQUIRE(s.subadditivity.size() == 1);
  const auto& row = s.subadditivity[0];
  CHECK(row.n == 4);
  CHECK(row.m == 4);
  const auto* a = s.find(4, 0.125, std::vector<double>{0.0, 0.0});
  const auto* b = s.find(8, 0.125, std::vector<double>{0.0, 0.0});
  CHECK(row.defect == doctest::Approx(8.0 * b->rate - 8.0 * a->rate));
  CHECK(row.reference == doctest::Approx(std::pow(8.0, EventSpec::default_alpha(2))));
}

TEST_CASE("rate estimation is reproducible across worker counts") {
  RateConfig c;
  c.levels = {0.25};
  c.n_grid = {6};
  c.mc.seed = 77;
  c.mc.replicates = 300;
  c.mc.workers = 1;
  const auto one = estimate_event_rate(c);
  c.mc.workers = 3;
  const auto three = estimate_event_rate(c);
  std::ostringstream a, b;
  write_rate_csv(a, one);
  write_rate_csv(b, three);
  CHECK(a.str() == b.str());
}

TEST_CASE("rate table round-trips through csv") {
  RateConfig c;
  c.levels = {0.0, 0.25, 3.0};
  c.xs = {{0.0, 0.0}, {0.5, -0.25}};
  c.n_grid = {6};
  c.mc.replicates = 60;
  const auto s = estimate_event_rate(c);
  std::stringstream ss;
  write_rate_csv(ss, s);
  const auto back = read_rate_csv(ss);
  REQUIRE(back.size() == s.estimates.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].tally == s.estimates[i].tally);
    CHECK(back[i].x == s.estimates[i].x);
    CHECK(back[i].level == s.estimates[i].level);
    CHECK(back[i].one_sided == s.estimates[i].one_sided);
    if (!back[i].one_sided) CHECK(back[i].rate == doctest::Approx(s.estimates[i].rate).epsilon(1e-9));
  }
  std::stringstream bad("# perclab-schema mu v1\nx\n");
  CHECK_THROWS(read_rate_csv(bad));
}

TEST_CASE("upper tail estimates are monotone in xi and one-sided when unseen") {
  RateConfig c;
  c.kind = EventKind::upper_tail;
  c.levels = {0.0, 0.2, 0.5, 5.0};
  c.n_grid = {10};
  c.mu_hat = 1.28;
  c.mc.seed = 8;
  c.mc.replicates = 400;
  const auto s = estimate_event_rate(c);
  const std::vector<double> e1{1.0, 0.0};
  for (std::size_t i = 0; i + 1 < c.levels.size(); ++i)
    CHECK(s.find(10, c.levels[i + 1], e1)->tally.hits <= s.find(10, c.levels[i], e1)->tally.hits);
  const auto* far = s.find(10, 5.0, e1);
  CHECK(far->tally.hits == 0);
  CHECK(far->one_sided);
  const auto surface = surface_from_rates(s.estimates, 10);
  CHECK(surface.back().value == kInf);
}

TEST_CASE("J of a synthetic l1 surface matches its closed form") {
  // I(s, y) = s + |y|_1 with mu = l1 and x = e1: J(xi) = xi, reached at y = 0
  const auto mu = scaled_l1_norm(1.0);
  const std::vector<double> x{1.0, 0.0};
  const auto fine = l1_surface(2, 0.05, 3.0, 1.5);
  const auto coarse = l1_surface(2, 0.25, 3.0, 1.5);
  double last = -1.0;
  for (double xi : {0.0, 0.25, 0.5, 1.0, 1.5}) {
    const auto jf = estimate_J(fine, x, xi, mu);
    const auto jc = estimate_J(coarse, x, xi, mu);
    CHECK(jf.value == doctest::Approx(xi).epsilon(1e-9));
    CHECK(std::abs(jc.value - jf.value) <= 3 * 0.25 + 1e-12);
    CHECK(jf.slack >= -1e-12);
    CHECK(jf.value >= last);
    last = jf.value;
  }
  CHECK(estimate_J(fine, x, 0.0, mu).value == 0.0);
  const auto j = estimate_J(fine, x, 0.5, mu);
  CHECK(j.compact_range == doctest::Approx(0.5));
  CHECK(j.covers_compact_range);
}

TEST_CASE("J with a mu error margin never exceeds the exact-mu value") {
  const auto mu = scaled_l1_norm(1.3);
  const std::vector<double> x{1.0, 0.0};
  const auto grid = l1_surface(2, 0.1, 4.0, 2.0);
  for (double xi : {0.1, 0.4, 0.9}) {
    CHECK(estimate_J(grid, x, xi, mu, 0.05).value <= estimate_J(grid, x, xi, mu).value + 1e-12);
  }
}

TEST_CASE("J needs a feasible grid point") {
  const auto mu = scaled_l1_norm(1.0);
  std::vector<SurfacePoint> tiny{{0.0, {1.0, 0.0}, 1.0, 0.1}};
  CHECK_THROWS_AS(estimate_J(tiny, std::vector<double>{1.0, 0.0}, 0.5, mu), std::invalid_argument);
  CHECK_THROWS_AS(estimate_J(tiny, std::vector<double>{1.0, 0.0}, -0.1, mu), std::invalid_argument);
}

TEST_CASE("property checks accept a homogeneous convex surface") {
  const auto grid = l1_surface(2, 0.25, 2.0, 1.0);
  const auto report = check_rate_properties(grid);
  for (const char* kind : {"homogeneity", "center", "convexity"}) {
    CHECK(report.count(kind) > 0);
    CHECK(report.holding(kind) == report.count(kind));
  }
}

TEST_CASE("property checks flag a non-convex surface") {
  auto grid = l1_surface(2, 0.25, 2.0, 1.0);
  for (auto& p : grid)
    if (p.s == 1.0 && p.y[0] == 0.0 && p.y[1] == 0.0) p.value = 5.0;
  const auto report = check_rate_properties(grid);
  CHECK(report.holding("convexity") < report.count("convexity"));
  CHECK(report.holding("homogeneity") < report.count("homogeneity"));
}

TEST_CASE("upper tail versus late cut-point tallies add up") {
  UpperTailCutConfig c;
  c.xi = 0.2;
  c.s = 0.5;
  c.mu_hat = 1.28;
  c.n_grid = {8, 12};
  c.mc.seed = 6;
  c.mc.replicates = 400;
  const auto rows = upper_tail_vs_cutpoint_experiment(c);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.replicates == 400);
    CHECK(r.both + r.tail_only + r.cut_only + r.neither + r.contaminated == r.replicates);
    CHECK(r.cut_given_tail.lo <= r.cut_given_tail.hi);
  }
  c.mc.workers = 2;
  const auto again = upper_tail_vs_cutpoint_experiment(c);
  CHECK(again[1].both == rows[1].both);
  CHECK(again[1].neither == rows[1].neither);
}

TEST_CASE("slab comparison pairs replicates and reports a verdict") {
  SlabComparisonConfig c;
  c.d = 3;
  c.p = 0.7;
  c.slab.epsilon = 0.1;
  c.slab.xi = 0.2;
  c.slab.N = 1;
  c.slab.n = 8;
  c.slab.mu_hat = 1.1;
  c.slab.rho = 1;
  c.mc.seed = 12;
  c.mc.replicates = 40;
  const auto r = slab_vs_point_experiment(c);
  CHECK(r.box_to_box.replicates == 40);
  CHECK(r.point_to_point.replicates == 40);
  CHECK(r.paired <= 40);
  CHECK(r.rho == 1);
  CHECK((r.verdict == "separated" || r.verdict == "indistinguishable" || r.verdict == "reversed"));
  std::ostringstream out;
  write_slab_comparison_csv(out, c, r);
  CHECK(out.str().rfind("# perclab-schema", 0) == 0);
}
