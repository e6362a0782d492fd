#include "perclab/lemma_check.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "perclab/csv.hpp"
#include "perclab/parallel.hpp"

namespace perclab {

const std::vector<std::string>& lemma_names() {
  static const std::vector<std::string> names{"proj",           "distinct",     "dislines",
                                              "disjpaths-parallel", "disjpaths-perpendicular",
                                              "axis-avoiding",  "boundary",     "animals"};
  return names;
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t instance) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(instance) + 0x2545f4914f6cdd1dULL));
}

std::vector<Point> random_point_set(SplitMix64& rng, int d, std::size_t max_size, int max_half_width) {
  const auto side = static_cast<std::uint64_t>(2 * max_half_width + 1);
  std::uint64_t volume = 1;
  for (int k = 0; k < d; ++k) volume *= side;
  auto size = static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_size)));
  size = static_cast<std::size_t>(std::min<std::uint64_t>(size, volume));
  std::set<Point> pts;
  switch (rng.range(0, 2)) {
    case 0: {
      // uniform in a cube just large enough to hold the requested size
      int w = 0;
      std::uint64_t vol = 1;
      while (vol < 2 * size && w < max_half_width) {
        ++w;
        vol = 1;
        for (int k = 0; k < d; ++k) vol *= static_cast<std::uint64_t>(2 * w + 1);
      }
      w = static_cast<int>(rng.range(w, max_half_width));
      vol = 1;
      for (int k = 0; k < d; ++k) vol *= static_cast<std::uint64_t>(2 * w + 1);
      size = static_cast<std::size_t>(std::min<std::uint64_t>(size, vol));
      while (pts.size() < size) {
        Point p(d);
        for (auto& c : p) c = static_cast<int>(rng.range(-w, w));
        pts.insert(p);
      }
      break;
    }
    case 1: {
      // a full sub-box
      Point hi(d, 0);
      std::uint64_t vol = 1;
      for (int k = 0; k < d; ++k) {
        const auto room = std::max<std::uint64_t>(1, size / vol);
        hi[k] = static_cast<int>(rng.range(0, std::min<std::int64_t>(2 * max_half_width, room - 1)));
        vol *= static_cast<std::uint64_t>(hi[k] + 1);
      }
      Point cur(d, 0);
      while (true) {
        Point p(d);
        for (int k = 0; k < d; ++k) p[k] = cur[k] - max_half_width;
        pts.insert(p);
        int k = d - 1;
        while (k >= 0 && cur[k] == hi[k]) cur[k--] = 0;
        if (k < 0) break;
        ++cur[k];
      }
      break;
    }
    default: {
      // points of one axis line
      const int axis = static_cast<int>(rng.range(0, d - 1));
      Point base(d);
      for (auto& c : base) c = static_cast<int>(rng.range(-max_half_width, max_half_width));
      const auto len = std::min<std::size_t>(size, side);
      for (std::size_t t = 0; t < len; ++t) {
        Point p = base;
        p[axis] = static_cast<int>(t) - max_half_width;
        pts.insert(p);
      }
      break;
    }
  }
  return {pts.begin(), pts.end()};
}

namespace {

std::vector<Point> random_plane_points(SplitMix64& rng, int d, int axis, int axis_value, std::size_t m, int lo,
                                       int hi) {
  std::set<Point> pts;
  while (pts.size() < m) {
    Point p(d);
    for (int k = 0; k < d; ++k) p[k] = k == axis ? axis_value : static_cast<int>(rng.range(lo, hi));
    pts.insert(p);
  }
  std::vector<Point> out(pts.begin(), pts.end());
  // random order so the instance is not presorted
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[static_cast<std::size_t>(rng.range(0, i - 1))]);
  return out;
}

}  // namespace

MatchingInstance random_matching_instance(SplitMix64& rng, std::size_t max_m, int max_K) {
  MatchingInstance inst;
  inst.spread = static_cast<int>(rng.range(1, max_K));
  inst.gap = static_cast<int>(rng.range(1, inst.spread));
  const auto cap = static_cast<std::size_t>((inst.spread + 1) * (inst.spread + 1));
  const auto m = std::min(static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_m))), cap);
  inst.S1 = random_plane_points(rng, 3, 0, 0, m, 0, inst.spread);
  inst.S2 = random_plane_points(rng, 3, 0, inst.gap, m, 0, inst.spread);
  return inst;
}

BundleInstance random_parallel_bundle(SplitMix64& rng, std::size_t max_m, int max_K) {
  const auto base = random_matching_instance(rng, max_m, max_K);
  BundleInstance inst;
  inst.S1 = base.S1;
  inst.S2 = base.S2;
  inst.geometry.kind = BundleGeometry::Kind::parallel;
  inst.geometry.axis_i = 0;
  inst.geometry.gap = base.gap;
  inst.geometry.spread = base.spread;
  return inst;
}

BundleInstance random_perpendicular_bundle(SplitMix64& rng, std::size_t max_m, int max_K) {
  BundleInstance inst;
  const int K = static_cast<int>(rng.range(1, max_K));
  const auto cap = static_cast<std::size_t>((2 * K + 1) * (2 * K + 1));
  const auto m = std::min(static_cast<std::size_t>(rng.range(1, static_cast<std::int64_t>(max_m))), cap);
  inst.S1 = random_plane_points(rng, 3, 0, 0, m, -K, K);
  inst.S2 = random_plane_points(rng, 3, 1, 0, m, -K, K);
  inst.geometry.kind = BundleGeometry::Kind::perpendicular;
  inst.geometry.axis_i = 0;
  inst.geometry.axis_j = 1;
  inst.geometry.spread = K;
  return inst;
}

AxisAvoidingInstance random_axis_avoiding_instance(SplitMix64& rng, int max_n, int d) {
  const int n = static_cast<int>(rng.range(1, max_n));
  const auto pts = random_plane_points(rng, d, 0, -2 * n, static_cast<std::size_t>(n), -2 * n, 2 * n);
  AxisAvoidingInstance inst;
  for (const auto& p : pts) {
    inst.xs.push_back(p);
    Point q = p;
    q[0] = 2 * n;
    inst.ys.push_back(q);
  }
  return inst;
}

std::vector<Point> random_connected_set(SplitMix64& rng, int d, std::size_t size) {
  std::set<Point> in{Point(d, 0)};
  std::vector<Point> members{Point(d, 0)};
  while (members.size() < size) {
    Point p = members[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(members.size()) - 1))];
    p[static_cast<std::size_t>(rng.range(0, d - 1))] += rng.range(0, 1) ? 1 : -1;
    if (in.insert(p).second) members.push_back(p);
  }
  return members;
}

namespace {

int pick_dimension(SplitMix64& rng, int requested, int lo, int hi) {
  return requested ? requested : static_cast<int>(rng.range(lo, hi));
}

LemmaRow check_instance(const std::string& lemma, std::size_t i, std::uint64_t seed, int requested_d) {
  SplitMix64 rng(instance_seed(seed, i));
  LemmaRow row;
  row.instance = i;
  row.lemma = lemma;
  auto take = [&row](const LemmaCheck& c) {
    row.bound = c.bound;
    row.achieved = c.achieved;
    row.pass = c.pass;
    row.detail = c.detail;
  };
  if (lemma == "proj") {
    row.dimension = pick_dimension(rng, requested_d, 2, 4);
    const PointSet S(row.dimension, random_point_set(rng, row.dimension, 5000, row.dimension == 2 ? 60 : 15));
    row.size = S.size();
    take(projection_best(S).verify(S.size()));
  } else if (lemma == "distinct") {
    row.dimension = pick_dimension(rng, requested_d, 2, 4);
    const PointSet S(row.dimension, random_point_set(rng, row.dimension, 2000, 15));
    row.size = S.size();
    take(distinct_coordinate_subset(S).verify(S));
  } else if (lemma == "dislines") {
    row.dimension = 3;
    const auto inst = random_matching_instance(rng, 40, 20);
    row.size = inst.S1.size();
    take(separated_matching(inst.S1, inst.S2, inst.spread).verify());
  } else if (lemma == "disjpaths-parallel" || lemma == "disjpaths-perpendicular") {
    row.dimension = 3;
    const auto inst = lemma == "disjpaths-parallel" ? random_parallel_bundle(rng, 30, 20)
                                                    : random_perpendicular_bundle(rng, 30, 15);
    row.size = inst.S1.size();
    take(disjoint_path_bundle(inst.S1, inst.S2, inst.geometry).verify(inst.S1, inst.S2));
  } else if (lemma == "axis-avoiding") {
    row.dimension = requested_d ? requested_d : 3;
    const auto inst = random_axis_avoiding_instance(rng, 20, row.dimension);
    row.size = inst.xs.size();
    take(axis_avoiding_paths(inst.xs, inst.ys).verify(inst.xs, inst.ys));
  } else if (lemma == "boundary") {
    row.dimension = pick_dimension(rng, requested_d, 2, 3);
    const auto gamma =
        random_connected_set(rng, row.dimension, static_cast<std::size_t>(rng.range(1, 500)));
    row.size = gamma.size();
    const auto ext = exterior_boundary(gamma);
    const auto iso = isoperimetry_check(gamma.size(), ext.boundary.size(), row.dimension);
    row.bound = iso.bound;
    row.achieved = iso.achieved;
    row.pass = iso.pass && ext.star_connected;
    if (!ext.star_connected) row.detail = "exterior boundary not *-connected";
  } else if (lemma == "animals") {
    row.dimension = pick_dimension(rng, requested_d, 2, 3);
    const int k_max = std::min(kAnimalCap / row.dimension, row.dimension == 2 ? 6 : 4);
    const int k = static_cast<int>(rng.range(1, k_max));
    row.size = static_cast<std::size_t>(k);
    row.achieved = static_cast<double>(count_lattice_animals(row.dimension, k));
    row.bound = animal_bound(row.dimension, k);
    row.pass = row.achieved <= row.bound;
  } else {
    throw std::invalid_argument("unknown lemma '" + lemma + "'");
  }
  return row;
}

}  // namespace

std::vector<LemmaRow> run_lemma_check(const std::string& lemma, std::size_t instances, std::uint64_t seed,
                                      const LemmaCheckOptions& options) {
  if (std::find(lemma_names().begin(), lemma_names().end(), lemma) == lemma_names().end())
    throw std::invalid_argument("unknown lemma '" + lemma + "'");
  ParallelOptions popt;
  popt.workers = options.workers;
  auto result = run_parallel<LemmaRow>(
      instances, [&](std::size_t i) { return check_instance(lemma, i, seed, options.dimension); }, popt);
  if (result.partial) throw std::runtime_error("lemma check failed: " + result.error);
  return std::move(result.results);
}

void write_lemma_csv(std::ostream& out, std::span<const LemmaRow> rows) {
  CsvWriter csv(out, "lemma_check", {"instance", "lemma", "d", "size", "bound", "achieved", "pass", "detail"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.instance), r.lemma, std::to_string(r.dimension), std::to_string(r.size),
             format_real(r.bound), format_real(r.achieved), r.pass ? "1" : "0", r.detail});
}

}  // namespace perclab
