#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

inline constexpr std::uint32_t kInfinity = ~std::uint32_t{0};

// Interval known to contain the infinite-lattice chemical distance.
// Connectivity itself is decided inside the box: a vertex the box BFS never
// reaches is reported as unreachable, and upper is kInfinity.
struct DistanceBound {
  std::uint32_t lower = 0;
  std::uint32_t upper = kInfinity;
  bool exact() const { return lower == upper; }
};

// Per-vertex membership mask used to restrict searches.
using RegionMask = std::vector<std::uint8_t>;

class BallGrowth {
 public:
  VertexId source() const { return sources_.front(); }
  std::span<const VertexId> sources() const { return sources_; }
  const BoxGeometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }

  std::size_t layer_count() const { return layer_start_.size() - 1; }
  std::span<const VertexId> layer(std::size_t t) const;
  std::size_t layer_size(std::size_t t) const;
  // |B_t|; t past the last layer gives the total reached volume
  std::uint64_t volume(std::size_t t) const;
  std::span<const VertexId> reached() const { return order_; }

  std::uint32_t dist(VertexId v) const { return dist_[v]; }
  bool reached(VertexId v) const { return dist_[v] != kInfinity; }
  // lexicographically least neighbor one step closer to the source
  VertexId pred(VertexId v) const { return pred_[v]; }

  // boundary contamination: some layer met a face of the box
  bool contaminated() const { return face_time_.has_value(); }
  std::optional<std::uint32_t> face_time() const { return face_time_; }
  bool truncated() const { return truncated_; }
  // Last time t for which layer t equals its infinite-lattice counterpart;
  // kInfinity when every layer (including the empty ones) is exact.
  std::uint32_t certified_through() const;
  DistanceBound bound(VertexId v) const;

 private:
  friend BallGrowth grow_ball(const PercolationSample&, std::span<const VertexId>, std::optional<std::uint32_t>,
                              const RegionMask*);
  GeometryPtr geometry_;
  std::vector<VertexId> sources_;
  std::vector<std::uint32_t> dist_;
  std::vector<VertexId> pred_;
  std::vector<VertexId> order_;
  std::vector<std::size_t> layer_start_;
  std::optional<std::uint32_t> face_time_;
  std::optional<std::uint32_t> t_max_;
  bool truncated_ = false;
};

BallGrowth grow_ball(const PercolationSample& sample, VertexId source, std::optional<std::uint32_t> t_max = {});
BallGrowth grow_ball(const PercolationSample& sample, const Point& source, std::optional<std::uint32_t> t_max = {});
// multi-source growth restricted to a region (sources must lie in the region)
BallGrowth grow_ball(const PercolationSample& sample, std::span<const VertexId> sources,
                     std::optional<std::uint32_t> t_max, const RegionMask* region);

struct DistanceResult {
  std::uint32_t distance = kInfinity;  // inside the box
  bool contaminated = false;           // search met a box face before settling
  DistanceBound certified;
};

DistanceResult chemical_distance(const PercolationSample& sample, VertexId x, VertexId y);
DistanceResult chemical_distance(const PercolationSample& sample, const Point& x, const Point& y);
// real inputs are floored componentwise
DistanceResult chemical_distance(const PercolationSample& sample, std::span<const double> x,
                                 std::span<const double> y);
Point floor_point(std::span<const double> x);

struct ConstrainedDistance {
  std::uint32_t distance = kInfinity;
  bool empty_endpoint = false;
};

ConstrainedDistance constrained_distance(const PercolationSample& sample, const RegionMask& region,
                                         std::span<const VertexId> from, std::span<const VertexId> to);
ConstrainedDistance constrained_distance(const PercolationSample& sample, std::span<const VertexId> region,
                                         std::span<const VertexId> from, std::span<const VertexId> to);
// set-to-set distance in the whole box
ConstrainedDistance set_distance(const PercolationSample& sample, std::span<const VertexId> from,
                                 std::span<const VertexId> to);

RegionMask make_region(const BoxGeometry& geometry, std::span<const VertexId> vertices);

std::vector<VertexId> geodesic(const BallGrowth& ball, VertexId target);
std::optional<std::uint32_t> volume_threshold_time(const BallGrowth& ball, std::uint64_t volume);

void write_distance_csv(std::ostream& out, const BallGrowth& ball);

}  // namespace perclab
