#include "perclab/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "perclab/rng.hpp"
#include "perclab/union_find.hpp"

namespace perclab {

namespace {

constexpr char kMagic[8] = {'P', 'E', 'R', 'C', 'S', 'M', 'P', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char buf[sizeof(T)];
  auto u = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw LatticeError("sample file truncated");
  std::make_unsigned_t<T> u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::make_unsigned_t<T>>(buf[i]) << (8 * i);
  return static_cast<T>(u);
}

std::size_t word_count(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

// Visit lower endpoints of axis-a edges in canonical order.
template <typename F>
void for_each_lower(const BoxGeometry& g, int axis, F&& f) {
  const std::uint64_t stride = g.stride(axis);
  const std::uint64_t side = g.spec().side();
  const std::uint64_t block = stride * side;
  const std::uint64_t blocks = g.vertex_count() / block;
  EdgeId e = axis * g.edges_per_axis();
  for (std::uint64_t h = 0; h < blocks; ++h) {
    for (std::uint64_t c = 0; c + 1 < side; ++c) {
      const std::uint64_t base = h * block + c * stride;
      for (std::uint64_t low = 0; low < stride; ++low) f(static_cast<VertexId>(base + low), e++);
    }
  }
}

}  // namespace

void BoxSpec::validate() const {
  if (dimension < kMinDimension || dimension > kMaxDimension)
    throw LatticeError("dimension must be in [2, 6], got " + std::to_string(dimension));
  if (radius < 1) throw LatticeError("radius must be >= 1");
  if (!origin_offset.empty() && static_cast<int>(origin_offset.size()) != dimension)
    throw LatticeError("origin offset has wrong dimension");
  if (radius > (1 << 20)) throw LatticeError("radius too large");
  long double v = std::pow(static_cast<long double>(side()), dimension);
  if (v > static_cast<long double>(kMaxVertices))
    throw LatticeError("box has too many vertices for the resource guard");
}

std::uint64_t BoxSpec::vertex_count() const {
  std::uint64_t v = 1;
  for (int i = 0; i < dimension; ++i) v *= side();
  return v;
}

std::uint64_t BoxSpec::edge_count() const {
  return static_cast<std::uint64_t>(dimension) * (vertex_count() / side()) * (side() - 1);
}

bool BoxSpec::contains(const Point& x) const {
  if (static_cast<int>(x.size()) != dimension) return false;
  for (int i = 0; i < dimension; ++i) {
    const long rel = static_cast<long>(x[i]) - offset(i);
    if (rel < -radius || rel > radius) return false;
  }
  return true;
}

bool BoxSpec::operator==(const BoxSpec& o) const {
  if (dimension != o.dimension || radius != o.radius) return false;
  for (int i = 0; i < dimension; ++i)
    if (offset(i) != o.offset(i)) return false;
  return true;
}

BoxGeometry::BoxGeometry(BoxSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.origin_offset.empty()) spec_.origin_offset.assign(spec_.dimension, 0);
  side_ = static_cast<std::uint32_t>(spec_.side());
  vertex_count_ = spec_.vertex_count();
  edge_count_ = spec_.edge_count();
  edges_per_axis_ = edge_count_ / spec_.dimension;
  strides_.resize(spec_.dimension);
  std::uint64_t s = 1;
  for (int a = spec_.dimension - 1; a >= 0; --a) {
    strides_[a] = static_cast<std::uint32_t>(s);
    s *= side_;
  }
  face_bits_.assign(word_count(vertex_count_), 0);
  std::vector<std::uint32_t> c(spec_.dimension, 0);
  const std::uint32_t top = side_ - 1;
  for (std::uint64_t v = 0; v < vertex_count_; ++v) {
    bool face = false;
    for (auto ci : c) face = face || ci == 0 || ci == top;
    if (face) face_bits_[v >> 6] |= std::uint64_t{1} << (v & 63);
    for (int a = spec_.dimension - 1; a >= 0; --a) {
      if (++c[a] < side_) break;
      c[a] = 0;
    }
  }
}

GeometryPtr make_geometry(const BoxSpec& spec) { return std::make_shared<const BoxGeometry>(spec); }

VertexId BoxGeometry::vertex(const Point& x) const {
  if (!contains(x)) throw LatticeError("point " + format_point(x) + " outside box");
  std::uint64_t v = 0;
  for (int a = 0; a < spec_.dimension; ++a)
    v = v * side_ + static_cast<std::uint64_t>(x[a] - spec_.origin_offset[a] + spec_.radius);
  return static_cast<VertexId>(v);
}

Point BoxGeometry::point(VertexId v) const {
  Point x(spec_.dimension);
  for (int a = spec_.dimension - 1; a >= 0; --a) {
    x[a] = static_cast<int>(v % side_) - spec_.radius + spec_.origin_offset[a];
    v /= side_;
  }
  return x;
}

std::optional<VertexId> BoxGeometry::neighbor(VertexId v, int axis, int direction) const {
  const int c = local_coordinate(v, axis);
  if (direction > 0) {
    if (c + 1 >= static_cast<int>(side_)) return std::nullopt;
    return v + strides_[axis];
  }
  if (c == 0) return std::nullopt;
  return v - strides_[axis];
}

unsigned BoxGeometry::face_mask(VertexId v) const {
  unsigned mask = 0;
  for (int a = spec_.dimension - 1; a >= 0; --a) {
    const auto c = v % side_;
    v /= side_;
    if (c == 0) mask |= 1U << (2 * a);
    if (c == side_ - 1) mask |= 1U << (2 * a + 1);
  }
  return mask;
}

std::uint32_t BoxGeometry::margin(VertexId v) const {
  std::uint32_t best = side_;
  for (int a = 0; a < spec_.dimension; ++a) {
    const auto c = static_cast<std::uint32_t>(local_coordinate(v, a));
    best = std::min({best, c, side_ - 1 - c});
  }
  return best + 1;
}

BoxGeometry::EdgeEnds BoxGeometry::edge_endpoints(EdgeId e) const {
  if (e >= edge_count_) throw LatticeError("edge index out of range");
  const int axis = static_cast<int>(e / edges_per_axis_);
  const std::uint64_t within = e % edges_per_axis_;
  const std::uint64_t run = static_cast<std::uint64_t>(strides_[axis]) * (side_ - 1);
  const std::uint64_t block = static_cast<std::uint64_t>(strides_[axis]) * side_;
  return {static_cast<VertexId>((within / run) * block + within % run), axis};
}

std::optional<EdgeId> BoxGeometry::edge_between(VertexId a, VertexId b) const {
  if (a > b) std::swap(a, b);
  for (int axis = 0; axis < spec_.dimension; ++axis) {
    if (b - a == strides_[axis] && local_coordinate(a, axis) + 1 < static_cast<int>(side_))
      return edge_index(a, axis);
  }
  return std::nullopt;
}

PercolationSample::PercolationSample(GeometryPtr geometry, double p, std::uint64_t seed,
                                     std::vector<std::uint64_t> bits)
    : geometry_(std::move(geometry)), p_(p), seed_(seed), bits_(std::move(bits)) {}

PercolationSample::PercolationSample(GeometryPtr geometry, double p, std::uint64_t seed)
    : geometry_(std::move(geometry)), p_(p), seed_(seed) {
  if (!(p > 0.0 && p < 1.0)) throw LatticeError("p must lie in (0, 1)");
  const auto& g = *geometry_;
  const std::uint64_t V = g.vertex_count();
  bits_.assign(word_count(V * g.dimension()), 0);
  const CounterRng rng(seed);
  for (int a = 0; a < g.dimension(); ++a) {
    const std::uint64_t base = a * V;
    for_each_lower(g, a, [&](VertexId v, EdgeId e) {
      if (rng.uniform(e) < p) {
        const std::uint64_t i = base + v;
        bits_[i >> 6] |= std::uint64_t{1} << (i & 63);
      }
    });
  }
}

PercolationSample PercolationSample::uniform(GeometryPtr geometry, bool open) {
  const auto& g = *geometry;
  std::vector<std::uint64_t> bits(word_count(g.vertex_count() * g.dimension()), 0);
  PercolationSample s(std::move(geometry), open ? 1.0 : 0.0, 0, std::move(bits));
  if (open) {
    for (int a = 0; a < s.geometry_->dimension(); ++a)
      for_each_lower(*s.geometry_, a, [&](VertexId v, EdgeId) {
        s.set_padded(a * s.geometry_->vertex_count() + v, true);
      });
  }
  return s;
}

PercolationSample PercolationSample::from_open_edges(GeometryPtr geometry, std::span<const EdgeId> open) {
  auto s = uniform(std::move(geometry), false);
  s.p_ = std::numeric_limits<double>::quiet_NaN();
  for (EdgeId e : open) s.set_padded(s.padded_index(e), true);
  return s;
}

std::uint64_t PercolationSample::padded_index(EdgeId e) const {
  const auto ends = geometry_->edge_endpoints(e);
  return static_cast<std::uint64_t>(ends.axis) * geometry_->vertex_count() + ends.lower;
}

void PercolationSample::set_padded(std::uint64_t i, bool open) {
  const std::uint64_t m = std::uint64_t{1} << (i & 63);
  if (open)
    bits_[i >> 6] |= m;
  else
    bits_[i >> 6] &= ~m;
}

bool PercolationSample::is_open(EdgeId e) const {
  const std::uint64_t i = padded_index(e);
  return (bits_[i >> 6] >> (i & 63)) & 1U;
}

std::uint64_t PercolationSample::open_count() const {
  std::uint64_t n = 0;
  for (auto w : bits_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

std::vector<EdgeId> PercolationSample::open_edges() const {
  std::vector<EdgeId> out;
  for (int a = 0; a < geometry_->dimension(); ++a)
    for_each_lower(*geometry_, a, [&](VertexId v, EdgeId e) {
      if (open_up(v, a)) out.push_back(e);
    });
  return out;
}

PercolationSample PercolationSample::with_changes(std::span<const EdgeId> close,
                                                  std::span<const EdgeId> open) const {
  PercolationSample s(geometry_, p_, seed_, bits_);
  for (EdgeId e : close) s.set_padded(s.padded_index(e), false);
  for (EdgeId e : open) s.set_padded(s.padded_index(e), true);
  return s;
}

void PercolationSample::write(std::ostream& out) const {
  const auto& spec = geometry_->spec();
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.dimension));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.radius));
  for (int a = 0; a < spec.dimension; ++a) put_le<std::int32_t>(out, spec.offset(a));
  std::uint64_t pbits;
  std::memcpy(&pbits, &p_, sizeof pbits);
  put_le<std::uint64_t>(out, pbits);
  put_le<std::uint64_t>(out, seed_);
  put_le<std::uint64_t>(out, geometry_->edge_count());
  std::vector<unsigned char> bytes((geometry_->edge_count() + 7) / 8, 0);
  for (int a = 0; a < geometry_->dimension(); ++a)
    for_each_lower(*geometry_, a, [&](VertexId v, EdgeId e) {
      if (open_up(v, a)) bytes[e >> 3] |= static_cast<unsigned char>(1U << (e & 7));
    });
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LatticeError("failed to write sample");
}

PercolationSample PercolationSample::read(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw LatticeError("not a sample file (bad magic)");
  if (get_le<std::uint32_t>(in) != kFormatVersion) throw LatticeError("unsupported sample file version");
  BoxSpec spec;
  spec.dimension = static_cast<int>(get_le<std::uint32_t>(in));
  spec.radius = static_cast<int>(get_le<std::uint32_t>(in));
  if (spec.dimension < kMinDimension || spec.dimension > kMaxDimension)
    throw LatticeError("sample file has unsupported dimension");
  spec.origin_offset.resize(spec.dimension);
  for (auto& o : spec.origin_offset) o = get_le<std::int32_t>(in);
  const auto pbits = get_le<std::uint64_t>(in);
  double p;
  std::memcpy(&p, &pbits, sizeof p);
  const auto seed = get_le<std::uint64_t>(in);
  auto geometry = make_geometry(spec);
  if (get_le<std::uint64_t>(in) != geometry->edge_count()) throw LatticeError("edge count mismatch");
  std::vector<unsigned char> bytes((geometry->edge_count() + 7) / 8);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
    throw LatticeError("sample file truncated");
  std::vector<std::uint64_t> bits(word_count(geometry->vertex_count() * geometry->dimension()), 0);
  PercolationSample s(geometry, p, seed, std::move(bits));
  for (int a = 0; a < geometry->dimension(); ++a)
    for_each_lower(*geometry, a, [&](VertexId v, EdgeId e) {
      if ((bytes[e >> 3] >> (e & 7)) & 1U) s.set_padded(a * geometry->vertex_count() + v, true);
    });
  return s;
}

PercolationSample sample_configuration(GeometryPtr geometry, double p, std::uint64_t seed) {
  return PercolationSample(std::move(geometry), p, seed);
}

PercolationSample sample_configuration(const BoxSpec& box, double p, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) throw LatticeError("p must lie in (0, 1)");
  return PercolationSample(make_geometry(box), p, seed);
}

void save_sample(const PercolationSample& sample, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LatticeError("cannot open " + path + " for writing");
  sample.write(out);
}

PercolationSample load_sample(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LatticeError("cannot open " + path);
  return PercolationSample::read(in);
}

ClusterLabeling label_clusters(const PercolationSample& sample) {
  const auto& g = sample.geometry();
  const auto V = static_cast<VertexId>(g.vertex_count());
  UnionFind uf(V);
  for (int a = 0; a < g.dimension(); ++a) {
    const auto s = g.stride(a);
    for (VertexId v = 0; v + s < V; ++v)
      if (sample.open_up(v, a)) uf.unite(v, v + s);
  }
  ClusterLabeling out;
  out.dimension = g.dimension();
  out.component.assign(V, 0);
  std::vector<std::uint32_t> id_of_root(V, ~std::uint32_t{0});
  for (VertexId v = 0; v < V; ++v) {
    const auto r = uf.find(v);
    if (id_of_root[r] == ~std::uint32_t{0}) {
      id_of_root[r] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
      out.faces.push_back(0);
    }
    const auto c = id_of_root[r];
    out.component[v] = c;
    ++out.sizes[c];
    if (g.on_face(v)) out.faces[c] |= g.face_mask(v);
  }
  for (std::uint32_t c = 1; c < out.sizes.size(); ++c)
    if (out.sizes[c] > out.sizes[out.largest]) out.largest = c;
  return out;
}

std::optional<std::uint32_t> infinite_cluster_proxy(const ClusterLabeling& labeling) {
  std::optional<std::uint32_t> best;
  for (std::uint32_t c = 0; c < labeling.sizes.size(); ++c) {
    if (!labeling.touches_all_faces(c)) continue;
    if (!best || labeling.sizes[c] > labeling.sizes[*best]) best = c;
  }
  return best;
}

std::string format_point(const Point& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s;
}

Point parse_point(const std::string& text) {
  Point x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw LatticeError("malformed point '" + text + "'");
    }
    if (used != item.size()) throw LatticeError("malformed point '" + text + "'");
    x.push_back(value);
  }
  if (x.empty()) throw LatticeError("empty point");
  return x;
}

}  // namespace perclab
