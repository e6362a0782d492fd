#include "perclab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "perclab/csv.hpp"

namespace perclab {

namespace {

std::uint32_t sat_add(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t s = static_cast<std::uint64_t>(a) + b;
  return s >= kInfinity ? kInfinity - 1 : static_cast<std::uint32_t>(s);
}

// Layer-synchronous BFS that stops as soon as a target vertex is discovered.
// Returns the box distance to the nearest target and a lower bound on the
// smallest box distance of a face vertex.
struct EarlyStop {
  std::uint32_t distance = kInfinity;
  VertexId hit = kNoVertex;
  std::uint32_t face_floor = kInfinity;  // every face vertex has box distance >= this
  bool face_seen = false;
};

EarlyStop search(const PercolationSample& sample, std::span<const VertexId> sources, const RegionMask* region,
                 const RegionMask& targets) {
  const auto& g = sample.geometry();
  const int d = g.dimension();
  std::vector<std::uint32_t> dist(g.vertex_count(), kInfinity);
  std::vector<VertexId> frontier, next;
  EarlyStop out;
  for (VertexId s : sources) {
    if (dist[s] == 0) continue;
    dist[s] = 0;
    frontier.push_back(s);
    if (g.on_face(s)) {
      out.face_seen = true;
      out.face_floor = 0;
    }
  }
  for (VertexId s : frontier) {
    if (targets[s]) {
      out.distance = 0;
      out.hit = s;
      return out;
    }
  }
  std::uint32_t t = 0;
  while (!frontier.empty()) {
    next.clear();
    for (VertexId v : frontier) {
      for (int a = 0; a < d; ++a) {
        const auto s = g.stride(a);
        VertexId cand[2];
        int nc = 0;
        if (sample.open_up(v, a)) cand[nc++] = v + s;
        if (sample.open_down(v, a)) cand[nc++] = v - s;
        for (int k = 0; k < nc; ++k) {
          const VertexId w = cand[k];
          if (dist[w] != kInfinity) continue;
          if (region && !(*region)[w]) continue;
          dist[w] = t + 1;
          next.push_back(w);
          if (!out.face_seen && g.on_face(w)) {
            out.face_seen = true;
            out.face_floor = t + 1;
          }
          if (targets[w]) {
            out.distance = t + 1;
            out.hit = w;
            // layers < t+1 are complete, so no face vertex is closer than t+1
            out.face_floor = std::min(out.face_floor, t + 1);
            return out;
          }
        }
      }
    }
    frontier.swap(next);
    ++t;
  }
  return out;
}

}  // namespace

std::span<const VertexId> BallGrowth::layer(std::size_t t) const {
  if (t >= layer_count()) return {};
  return std::span<const VertexId>(order_).subspan(layer_start_[t], layer_start_[t + 1] - layer_start_[t]);
}

std::size_t BallGrowth::layer_size(std::size_t t) const {
  return t >= layer_count() ? 0 : layer_start_[t + 1] - layer_start_[t];
}

std::uint64_t BallGrowth::volume(std::size_t t) const {
  return t >= layer_count() ? order_.size() : layer_start_[t + 1];
}

std::uint32_t BallGrowth::certified_through() const {
  if (face_time_) return *face_time_;
  if (truncated_) return *t_max_;
  return kInfinity;
}

DistanceBound BallGrowth::bound(VertexId v) const {
  const std::uint32_t delta = dist_[v];
  DistanceBound b{delta, delta};
  if (face_time_) {
    // a path leaving the box first reaches a face vertex (>= F steps),
    // steps outside, and then needs at least margin(v) steps to return
    const std::uint32_t via_outside = sat_add(sat_add(*face_time_, 1), geometry_->margin(v));
    b.lower = std::min(delta, via_outside);
  }
  if (truncated_ && delta == kInfinity) b.lower = std::min(b.lower, sat_add(*t_max_, 1));
  return b;
}

BallGrowth grow_ball(const PercolationSample& sample, std::span<const VertexId> sources,
                     std::optional<std::uint32_t> t_max, const RegionMask* region) {
  const auto& g = sample.geometry();
  if (sources.empty()) throw LatticeError("ball growth needs at least one source");
  BallGrowth ball;
  ball.geometry_ = sample.geometry_ptr();
  ball.t_max_ = t_max;
  ball.dist_.assign(g.vertex_count(), kInfinity);
  ball.pred_.assign(g.vertex_count(), kNoVertex);
  for (VertexId s : sources) {
    if (s >= g.vertex_count()) throw LatticeError("source outside box");
    if (region && !(*region)[s]) throw LatticeError("source outside region");
    if (ball.dist_[s] == 0) continue;
    ball.dist_[s] = 0;
    ball.sources_.push_back(s);
    ball.order_.push_back(s);
    if (!ball.face_time_ && g.on_face(s)) ball.face_time_ = 0;
  }
  ball.layer_start_ = {0, ball.order_.size()};
  const int d = g.dimension();
  std::uint32_t t = 0;
  auto& dist = ball.dist_;
  auto& pred = ball.pred_;
  auto& order = ball.order_;
  while (true) {
    const std::size_t begin = ball.layer_start_[t];
    const std::size_t end = ball.layer_start_[t + 1];
    if (begin == end) break;
    const bool stop_here = t_max && t >= *t_max;
    bool frontier_open = false;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const VertexId v = order[idx];
      for (int a = 0; a < d; ++a) {
        const auto s = g.stride(a);
        VertexId cand[2];
        int nc = 0;
        if (sample.open_up(v, a)) cand[nc++] = v + s;
        if (sample.open_down(v, a)) cand[nc++] = v - s;
        for (int k = 0; k < nc; ++k) {
          const VertexId w = cand[k];
          if (region && !(*region)[w]) continue;
          if (dist[w] == kInfinity) {
            if (stop_here) {
              frontier_open = true;
              continue;
            }
            dist[w] = t + 1;
            pred[w] = v;
            order.push_back(w);
            if (!ball.face_time_ && g.on_face(w)) ball.face_time_ = t + 1;
          } else if (dist[w] == t + 1 && v < pred[w]) {
            pred[w] = v;
          }
        }
      }
    }
    if (stop_here) {
      ball.truncated_ = frontier_open;
      break;
    }
    ball.layer_start_.push_back(order.size());
    ++t;
  }
  // drop the trailing empty layer
  while (ball.layer_start_.size() > 2 && ball.layer_start_[ball.layer_start_.size() - 1] ==
                                             ball.layer_start_[ball.layer_start_.size() - 2])
    ball.layer_start_.pop_back();
  return ball;
}

BallGrowth grow_ball(const PercolationSample& sample, VertexId source, std::optional<std::uint32_t> t_max) {
  const VertexId s[1] = {source};
  return grow_ball(sample, s, t_max, nullptr);
}

BallGrowth grow_ball(const PercolationSample& sample, const Point& source, std::optional<std::uint32_t> t_max) {
  return grow_ball(sample, sample.geometry().vertex(source), t_max);
}

DistanceResult chemical_distance(const PercolationSample& sample, VertexId x, VertexId y) {
  const auto& g = sample.geometry();
  if (x >= g.vertex_count() || y >= g.vertex_count()) throw LatticeError("vertex outside box");
  RegionMask targets(g.vertex_count(), 0);
  targets[y] = 1;
  const VertexId src[1] = {x};
  const auto r = search(sample, src, nullptr, targets);
  DistanceResult out;
  out.distance = r.distance;
  out.contaminated = r.face_seen;
  out.certified.upper = r.distance;
  out.certified.lower = r.distance;
  if (r.face_seen) {
    const std::uint32_t via_outside = sat_add(sat_add(r.face_floor, 1), g.margin(y));
    out.certified.lower = std::min(r.distance, via_outside);
  }
  return out;
}

DistanceResult chemical_distance(const PercolationSample& sample, const Point& x, const Point& y) {
  return chemical_distance(sample, sample.geometry().vertex(x), sample.geometry().vertex(y));
}

Point floor_point(std::span<const double> x) {
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<int>(std::floor(x[i]));
  return out;
}

DistanceResult chemical_distance(const PercolationSample& sample, std::span<const double> x,
                                 std::span<const double> y) {
  return chemical_distance(sample, floor_point(x), floor_point(y));
}

RegionMask make_region(const BoxGeometry& geometry, std::span<const VertexId> vertices) {
  RegionMask mask(geometry.vertex_count(), 0);
  for (VertexId v : vertices) {
    if (v >= geometry.vertex_count()) throw LatticeError("region vertex outside box");
    mask[v] = 1;
  }
  return mask;
}

ConstrainedDistance constrained_distance(const PercolationSample& sample, const RegionMask& region,
                                         std::span<const VertexId> from, std::span<const VertexId> to) {
  const auto& g = sample.geometry();
  if (region.size() != g.vertex_count()) throw LatticeError("region mask has wrong size");
  ConstrainedDistance out;
  if (from.empty() || to.empty()) {
    out.empty_endpoint = true;
    return out;
  }
  for (auto v : from)
    if (v >= g.vertex_count() || !region[v]) throw LatticeError("source set not inside region");
  RegionMask targets(g.vertex_count(), 0);
  for (auto v : to) {
    if (v >= g.vertex_count() || !region[v]) throw LatticeError("target set not inside region");
    targets[v] = 1;
  }
  out.distance = search(sample, from, &region, targets).distance;
  return out;
}

ConstrainedDistance constrained_distance(const PercolationSample& sample, std::span<const VertexId> region,
                                         std::span<const VertexId> from, std::span<const VertexId> to) {
  return constrained_distance(sample, make_region(sample.geometry(), region), from, to);
}

ConstrainedDistance set_distance(const PercolationSample& sample, std::span<const VertexId> from,
                                 std::span<const VertexId> to) {
  return constrained_distance(sample, RegionMask(sample.geometry().vertex_count(), 1), from, to);
}

std::vector<VertexId> geodesic(const BallGrowth& ball, VertexId target) {
  if (target >= ball.geometry().vertex_count() || !ball.reached(target))
    throw LatticeError("geodesic target unreachable");
  std::vector<VertexId> path(ball.dist(target) + 1);
  VertexId v = target;
  for (std::size_t i = path.size(); i-- > 0;) {
    path[i] = v;
    v = ball.pred(v);
  }
  return path;
}

std::optional<std::uint32_t> volume_threshold_time(const BallGrowth& ball, std::uint64_t volume) {
  for (std::size_t t = 0; t < ball.layer_count(); ++t)
    if (ball.volume(t) >= volume) return static_cast<std::uint32_t>(t);
  return std::nullopt;
}

void write_distance_csv(std::ostream& out, const BallGrowth& ball) {
  const auto& g = ball.geometry();
  std::vector<std::string> columns;
  for (int a = 0; a < g.dimension(); ++a) columns.push_back("x" + std::to_string(a + 1));
  columns.push_back("dist");
  CsvWriter csv(out, "distance", columns);
  std::vector<std::string> cells(columns.size());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const Point x = g.point(v);
    for (int a = 0; a < g.dimension(); ++a) cells[a] = std::to_string(x[a]);
    cells.back() = format_distance(ball.dist(v));
    csv.row(cells);
  }
}

}  // namespace perclab
