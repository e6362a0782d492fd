#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perclab/cutpoints.hpp"
#include "perclab/lattice.hpp"
#include "perclab/metric.hpp"

namespace perclab {

// Norm evaluator standing in for the time constant
using Norm = std::function<double(std::span<const double>)>;
Norm scaled_l1_norm(double scale);  // scale * |x|_1
Norm scaled_l2_norm(double scale);  // scale * |x|_2
double norm_of_axis(const Norm& mu, int dimension, int axis = 0);

class RenormError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Macroscopic lattice of boxes [-N, N)^d + 2 i N.
class MacroLattice {
 public:
  MacroLattice(int dimension, int N, double mu_e1);

  int dimension() const { return dimension_; }
  int N() const { return N_; }
  double mu_e1() const { return mu_e1_; }
  // floor(10 d mu(e1)), at least 1
  int rho() const { return rho_; }

  Point site_of(const Point& x) const;
  // per-axis half-open microscopic ranges [lo, hi)
  int box_lo(int site_coord) const { return 2 * site_coord * N_ - N_; }
  int box_hi(int site_coord) const { return 2 * site_coord * N_ + N_; }
  bool in_box(const Point& x, const Point& site) const { return in_block(x, site, 0); }
  bool in_enlarged_box(const Point& x, const Point& site) const { return in_block(x, site, 1); }
  bool in_rho_box(const Point& x, const Point& site) const { return in_block(x, site, rho_); }
  // union of the boxes within l_inf distance `reach` of the site
  bool in_block(const Point& x, const Point& site, int reach) const;
  // every site whose enlarged box lies inside the sample box
  std::vector<Point> classifiable_sites(const BoxSpec& box) const;
  // every site whose box meets the sample box
  std::vector<Point> sites_meeting(const BoxSpec& box) const;

 private:
  int dimension_;
  int N_;
  double mu_e1_;
  int rho_;
};

enum class Verdict { good, bad, unclassifiable };
std::string to_string(Verdict v);

struct SiteClassification {
  Point site;
  Verdict verdict = Verdict::unclassifiable;
  int failed_condition = 0;             // 0 when good, else the first failing condition 1..3
  std::uint64_t large_clusters = 0;     // clusters of diameter >= N/2 in the enlarged box
  std::uint64_t cluster_size = 0;       // size of the dominant cluster (0 if none)
  bool sampled_pairs = false;           // condition 3 checked from a subset of sources
  std::vector<VertexId> cluster;        // dominant cluster, sorted sample vertex ids
};

struct ClassifyOptions {
  // condition 3 is exact (all sources) up to this cluster size ...
  std::size_t exact_pair_limit = 256;
  // ... and uses this many evenly spaced sources above it
  std::size_t sampled_sources = 32;
  unsigned workers = 0;
};

struct MacroClassification {
  int dimension = 2;
  int N = 1;
  double epsilon = 0.5;
  double mu_e1 = 1.0;
  std::vector<SiteClassification> sites;  // sorted by site

  const SiteClassification* find(const Point& site) const;
  std::size_t count(Verdict v) const;
  double bad_fraction() const;  // among classifiable sites
};

MacroClassification classify_boxes(const PercolationSample& sample, int N, double epsilon, const Norm& mu_hat,
                                   const ClassifyOptions& options = {});

enum class MacroAdjacency { nearest, star };

struct BadCluster {
  std::vector<Point> sites;  // sorted
  std::size_t size() const { return sites.size(); }
};

struct BadClusterReport {
  std::vector<BadCluster> nearest;  // Z^d adjacency
  std::vector<BadCluster> star;     // *-adjacency
};

std::vector<BadCluster> bad_clusters(const MacroClassification& classification, MacroAdjacency adjacency);
BadClusterReport bad_clusters(const MacroClassification& classification);

struct RouteResult {
  std::vector<VertexId> path;  // x ... y, consecutive vertices joined by open edges
  double bound = 0.0;          // 2 d mu(e1) N |Gamma|
  std::size_t length() const { return path.empty() ? 0 : path.size() - 1; }
  bool within_bound() const { return static_cast<double>(length()) <= bound; }
};

// Open path from x to y inside the union of the rho-enlargements of the macro
// path's boxes (clipped to the sample box). The path is a shortest open path
// in that region, so it is no longer than any chain of geodesics through the
// intersections of consecutive dominant clusters.
RouteResult route_through_good(const PercolationSample& sample, const MacroClassification& classification,
                               std::span<const Point> macro_path, VertexId x, VertexId y);
bool is_open_path(const PercolationSample& sample, std::span<const VertexId> path);

struct SlabSpec {
  double epsilon = 0.1;
  double xi = 0.3;
  int N = 1;
  int n = 40;
  double mu_hat = 1.0;       // mu(e1)
  std::optional<int> rho;    // defaults to floor(10 d mu_hat)
};

struct SlabRecord {
  std::size_t slab_index = 0;
  Point offset;  // microscopic offset of the slab along axes 2..d-1
  std::uint32_t distance = kInfinity;  // box-to-box distance inside the slab and sample box
  Outcome outcome = Outcome::miss;     // hit: distance > (mu + xi) n
};

struct SlabExperiment {
  int rho = 1;
  double threshold = 0.0;
  std::vector<SlabRecord> slabs;
};

// Slabs are the rho-thickenings of Z^2 x {z}, z in (2 rho + 1) Z^{d-2}; they are
// pairwise disjoint. Every slab that fits strictly inside the sample box is
// evaluated.
SlabExperiment slab_experiment(const PercolationSample& sample, const SlabSpec& spec);
// smallest radius of a box around 0 holding one slab and both endpoint boxes
int slab_box_radius(int dimension, const SlabSpec& spec);

void write_classification_csv(std::ostream& out, const MacroClassification& classification);
void write_bad_clusters_csv(std::ostream& out, const BadClusterReport& report);
void write_slab_csv(std::ostream& out, const SlabSpec& spec, const SlabExperiment& experiment);

}  // namespace perclab
