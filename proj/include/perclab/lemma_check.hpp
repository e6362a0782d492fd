#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perclab/combinatorics.hpp"
#include "perclab/rng.hpp"

namespace perclab {

struct LemmaRow {
  std::size_t instance = 0;
  std::string lemma;
  int dimension = 0;
  std::size_t size = 0;  // instance size (|S|, m, n, |Gamma| or k)
  double bound = 0.0;
  double achieved = 0.0;
  bool pass = false;
  std::string detail;
};

// proj, distinct, dislines, disjpaths-parallel, disjpaths-perpendicular,
// axis-avoiding, boundary, animals
const std::vector<std::string>& lemma_names();

struct LemmaCheckOptions {
  int dimension = 0;  // 0: the lemma's default range of dimensions
  unsigned workers = 0;
};

// Instance i is generated from SplitMix64(instance_seed(seed, i)), so rows do
// not depend on the worker count.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t instance);
std::vector<LemmaRow> run_lemma_check(const std::string& lemma, std::size_t instances, std::uint64_t seed,
                                      const LemmaCheckOptions& options = {});
void write_lemma_csv(std::ostream& out, std::span<const LemmaRow> rows);

// Random instance generators
std::vector<Point> random_point_set(SplitMix64& rng, int d, std::size_t max_size, int max_half_width);

struct MatchingInstance {
  std::vector<Point> S1, S2;
  int spread = 1;
  int gap = 1;
};
// d = 3, S1 on H_1(0), S2 on H_1(l e_1), coordinates in [0, K]
MatchingInstance random_matching_instance(SplitMix64& rng, std::size_t max_m, int max_K);

struct BundleInstance {
  std::vector<Point> S1, S2;
  BundleGeometry geometry;
};
BundleInstance random_parallel_bundle(SplitMix64& rng, std::size_t max_m, int max_K);
BundleInstance random_perpendicular_bundle(SplitMix64& rng, std::size_t max_m, int max_K);

struct AxisAvoidingInstance {
  std::vector<Point> xs, ys;
};
AxisAvoidingInstance random_axis_avoiding_instance(SplitMix64& rng, int max_n, int d = 3);

// nearest-neighbor connected set grown from the origin by random accretion
std::vector<Point> random_connected_set(SplitMix64& rng, int d, std::size_t size);

}  // namespace perclab
