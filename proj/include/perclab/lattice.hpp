#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace perclab {

using Point = std::vector<int>;
using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;

inline constexpr VertexId kNoVertex = ~VertexId{0};
inline constexpr int kMinDimension = 2;
inline constexpr int kMaxDimension = 6;
// resource guard: per-vertex arrays of a few bytes must fit comfortably in memory
inline constexpr std::uint64_t kMaxVertices = std::uint64_t{1} << 27;

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoxSpec {
  int dimension = 2;
  int radius = 1;
  Point origin_offset;  // empty means the zero vector

  void validate() const;
  std::uint64_t side() const { return 2 * static_cast<std::uint64_t>(radius) + 1; }
  std::uint64_t vertex_count() const;
  std::uint64_t edge_count() const;
  int offset(int axis) const { return origin_offset.empty() ? 0 : origin_offset[axis]; }
  bool contains(const Point& x) const;
  bool operator==(const BoxSpec& o) const;
};

// Index arithmetic for a box. Vertices are numbered lexicographically with
// axis 0 most significant, so comparing ids compares points lexicographically.
// Edge e = {v, v + e_a} has canonical index
//   a * (2L)(2L+1)^(d-1) + (lexicographic rank of v among lower endpoints of axis a).
class BoxGeometry {
 public:
  explicit BoxGeometry(BoxSpec spec);

  const BoxSpec& spec() const { return spec_; }
  int dimension() const { return spec_.dimension; }
  int radius() const { return spec_.radius; }
  std::uint64_t vertex_count() const { return vertex_count_; }
  std::uint64_t edge_count() const { return edge_count_; }
  std::uint64_t edges_per_axis() const { return edges_per_axis_; }
  std::uint32_t stride(int axis) const { return strides_[axis]; }

  bool contains(const Point& x) const { return spec_.contains(x); }
  VertexId vertex(const Point& x) const;  // throws if outside
  Point point(VertexId v) const;
  // local coordinate in [0, 2L]
  int local_coordinate(VertexId v, int axis) const {
    return static_cast<int>((v / strides_[axis]) % side_);
  }
  std::optional<VertexId> neighbor(VertexId v, int axis, int direction) const;

  bool on_face(VertexId v) const { return (face_bits_[v >> 6] >> (v & 63)) & 1U; }
  // bit 2a set: local coord 0 on axis a; bit 2a+1 set: local coord 2L on axis a
  unsigned face_mask(VertexId v) const;
  // l1 distance from v to the nearest lattice point outside the box
  std::uint32_t margin(VertexId v) const;

  EdgeId edge_index(VertexId lower, int axis) const {
    const std::uint64_t block = static_cast<std::uint64_t>(strides_[axis]) * side_;
    return axis * edges_per_axis_ + lower - (lower / block) * strides_[axis];
  }
  struct EdgeEnds {
    VertexId lower;
    int axis;
  };
  EdgeEnds edge_endpoints(EdgeId e) const;
  // canonical index of the edge between two adjacent vertices, if it exists
  std::optional<EdgeId> edge_between(VertexId a, VertexId b) const;

 private:
  BoxSpec spec_;
  std::uint32_t side_;
  std::uint64_t vertex_count_;
  std::uint64_t edge_count_;
  std::uint64_t edges_per_axis_;
  std::vector<std::uint32_t> strides_;
  std::vector<std::uint64_t> face_bits_;
};

using GeometryPtr = std::shared_ptr<const BoxGeometry>;
GeometryPtr make_geometry(const BoxSpec& spec);

// Immutable open/closed assignment of every edge of a box.
// Storage is padded per axis (bit a*V + v is the edge v -- v+e_a, zero when
// that edge leaves the box), which keeps neighbor scans free of coordinate
// arithmetic.
class PercolationSample {
 public:
  PercolationSample(GeometryPtr geometry, double p, std::uint64_t seed);

  static PercolationSample uniform(GeometryPtr geometry, bool open);
  static PercolationSample from_open_edges(GeometryPtr geometry, std::span<const EdgeId> open);

  const BoxSpec& box() const { return geometry_->spec(); }
  const BoxGeometry& geometry() const { return *geometry_; }
  const GeometryPtr& geometry_ptr() const { return geometry_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  bool is_open(EdgeId e) const;
  // edge v -- v + e_axis; false when it does not exist
  bool open_up(VertexId v, int axis) const noexcept {
    const std::uint64_t i = static_cast<std::uint64_t>(axis) * geometry_->vertex_count() + v;
    return (bits_[i >> 6] >> (i & 63)) & 1U;
  }
  // edge v - e_axis -- v; false when it does not exist
  bool open_down(VertexId v, int axis) const noexcept {
    const std::uint32_t s = geometry_->stride(axis);
    return v >= s && open_up(v - s, axis);
  }
  std::uint64_t open_count() const;
  std::vector<EdgeId> open_edges() const;

  // new sample with the listed edges forced closed / open; *this is untouched
  PercolationSample with_changes(std::span<const EdgeId> close, std::span<const EdgeId> open) const;

  bool same_edges(const PercolationSample& other) const { return bits_ == other.bits_; }

  void write(std::ostream& out) const;
  static PercolationSample read(std::istream& in);

 private:
  PercolationSample(GeometryPtr geometry, double p, std::uint64_t seed, std::vector<std::uint64_t> bits);
  std::uint64_t padded_index(EdgeId e) const;
  void set_padded(std::uint64_t i, bool open);

  GeometryPtr geometry_;
  double p_;
  std::uint64_t seed_;
  std::vector<std::uint64_t> bits_;
};

PercolationSample sample_configuration(const BoxSpec& box, double p, std::uint64_t seed);
PercolationSample sample_configuration(GeometryPtr geometry, double p, std::uint64_t seed);

void save_sample(const PercolationSample& sample, const std::string& path);
PercolationSample load_sample(const std::string& path);

struct ClusterLabeling {
  std::vector<std::uint32_t> component;    // per vertex, ids ordered by smallest member
  std::vector<std::uint64_t> sizes;        // per component
  std::vector<unsigned> faces;             // per component, union of face_mask bits
  std::uint32_t largest = 0;               // smallest id among the largest components
  int dimension = 2;

  std::size_t component_count() const { return sizes.size(); }
  bool touches_boundary(std::uint32_t c) const { return faces[c] != 0; }
  bool touches_all_faces(std::uint32_t c) const {
    return faces[c] == (1U << (2 * dimension)) - 1;
  }
};

ClusterLabeling label_clusters(const PercolationSample& sample);
std::optional<std::uint32_t> infinite_cluster_proxy(const ClusterLabeling& labeling);

std::string format_point(const Point& x);
Point parse_point(const std::string& text);

}  // namespace perclab
