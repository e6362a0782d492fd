#include "perclab/cutpoints.hpp"

#include <algorithm>
#include <cmath>

#include "perclab/combinatorics.hpp"

namespace perclab {

namespace {

std::uint64_t isqrt(std::uint64_t k) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(k)));
  while (r * r > k) --r;
  while ((r + 1) * (r + 1) <= k) ++r;
  return r;
}

// Window Lambda_r(c) as vertex ids; throws when it leaves the box.
std::vector<VertexId> window_vertices(const BoxGeometry& g, const Point& c, std::int64_t r) {
  const int d = g.dimension();
  Point lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = static_cast<int>(c[a] - r);
    hi[a] = static_cast<int>(c[a] + r);
  }
  if (!g.contains(lo) || !g.contains(hi)) throw LatticeError("event window leaves the sample box");
  std::vector<VertexId> out;
  Point cur = lo;
  while (true) {
    out.push_back(g.vertex(cur));
    int a = d - 1;
    while (a >= 0 && cur[a] == hi[a]) {
      cur[a] = lo[a];
      --a;
    }
    if (a < 0) break;
    ++cur[a];
  }
  return out;
}

bool in_window(const BoxGeometry& g, VertexId v, const Point& c, std::int64_t r) {
  for (int a = 0; a < g.dimension(); ++a) {
    const std::int64_t x = g.local_coordinate(v, a) - g.radius() + g.spec().offset(a);
    if (x < c[a] - r || x > c[a] + r) return false;
  }
  return true;
}

// Decide the outcome when no certified witness exists: the answer is
// unknowable if some window vertex could still be a late singleton layer.
Outcome unresolved_outcome(const BallGrowth& ball, const std::vector<VertexId>& window, std::uint32_t t_min) {
  const std::uint32_t certified = ball.certified_through();
  if (certified == kInfinity) return Outcome::miss;
  for (VertexId w : window) {
    if (ball.reached(w)) {
      const auto t = ball.dist(w);
      if (t > certified && t >= t_min) return Outcome::contaminated;
    } else if (ball.truncated()) {
      return Outcome::contaminated;
    }
  }
  return Outcome::miss;
}

std::uint32_t scan_end(const BallGrowth& ball) {
  const auto last = static_cast<std::uint32_t>(ball.layer_count() - 1);
  return std::min(last, ball.certified_through());
}

void require_origin(const BallGrowth& ball) {
  const auto& g = ball.geometry();
  const Point zero(g.dimension(), 0);
  if (ball.sources().size() != 1 || !g.contains(zero) || ball.source() != g.vertex(zero))
    throw LatticeError("event balls must be grown from the origin");
}

template <typename Accept>
EventResult scan_event(const BallGrowth& ball, const EventSpec& spec, int window_multiplier, int relax, Accept&& accept) {
  const auto& g = ball.geometry();
  const int d = g.dimension();
  spec.validate(d);
  require_origin(ball);
  const std::int64_t a = spec.scale(d);
  const std::int64_t r = window_multiplier * a;
  const Point c = spec.center();
  const auto window = window_vertices(g, c, r);
  const std::int64_t raw_min = ceil_product(spec.s, spec.n) - relax * a;
  const auto t_min = static_cast<std::uint32_t>(std::max<std::int64_t>(0, raw_min));
  EventResult out;
  const std::uint32_t end = scan_end(ball);
  for (std::uint32_t t = t_min; t <= end && t < ball.layer_count(); ++t) {
    if (ball.layer_size(t) != 1) continue;
    const VertexId w = ball.layer(t)[0];
    if (!in_window(g, w, c, r)) continue;
    if (!accept(t, w, out)) continue;
    out.outcome = Outcome::hit;
    out.witness = CutPointRecord{t, w};
    return out;
  }
  out.outcome = unresolved_outcome(ball, window, t_min);
  return out;
}

}  // namespace

std::int64_t floor_pow(std::int64_t n, double a) {
  const double v = std::pow(static_cast<double>(n), a);
  const double r = std::round(v);
  if (std::fabs(v - r) <= 1e-9 * std::max(1.0, v)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(v));
}

std::int64_t ceil_product(double s, std::int64_t n) {
  const double v = s * static_cast<double>(n);
  const double r = std::round(v);
  if (std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

std::int64_t EventSpec::min_time(int d) const {
  return std::max<std::int64_t>(0, ceil_product(s, n) - time_relax_multiplier * scale(d));
}

Point EventSpec::center() const {
  Point c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = static_cast<int>(std::floor(x[i] * static_cast<double>(n)));
  return c;
}

void EventSpec::validate(int d) const {
  if (!(s >= 0.0)) throw std::invalid_argument("event time rate s must be >= 0");
  if (n < 1) throw std::invalid_argument("event scale n must be >= 1");
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("event direction has wrong dimension");
  const double al = alpha_for(d);
  if (!(al > 0.0 && al <= 1.0)) throw std::invalid_argument("window exponent must lie in (0, 1]");
  if (window_multiplier < 0 || time_relax_multiplier < 0) throw std::invalid_argument("negative multiplier");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::hit: return "hit";
    case Outcome::miss: return "miss";
    case Outcome::disconnected: return "disconnected";
    case Outcome::contaminated: return "contaminated";
  }
  return "?";
}

std::vector<CutPointRecord> detect_cutpoints(const BallGrowth& ball, std::uint32_t t_min,
                                             std::optional<std::uint32_t> t_max) {
  const auto last = static_cast<std::uint32_t>(ball.layer_count() - 1);
  const std::uint32_t hi = t_max ? std::min(*t_max, last) : last;
  const std::uint32_t certified = ball.certified_through();
  if (certified != kInfinity && hi > certified)
    throw ContaminationError("cut-point scan reaches past the certified layers of the ball (t = " +
                             std::to_string(certified) + ")");
  std::vector<CutPointRecord> out;
  for (std::uint32_t t = t_min; t <= hi; ++t)
    if (ball.layer_size(t) == 1) out.push_back({t, ball.layer(t)[0]});
  return out;
}

EventResult event_A(const BallGrowth& ball, const EventSpec& spec) {
  return scan_event(ball, spec, spec.window_multiplier, spec.time_relax_multiplier,
                    [](std::uint32_t, VertexId, EventResult&) { return true; });
}

EventResult event_A(const PercolationSample& sample, const EventSpec& spec) {
  return event_A(grow_ball(sample, Point(sample.geometry().dimension(), 0)), spec);
}

EventResult event_A_K(const BallGrowth& ball, const EventSpec& spec, double K) {
  const auto& g = ball.geometry();
  const double limit = K * static_cast<double>(spec.n);
  bool boundary_unknown = false;
  auto result = scan_event(ball, spec, spec.window_multiplier, spec.time_relax_multiplier,
                           [&](std::uint32_t t, VertexId, EventResult&) {
                             std::vector<Point> gamma;
                             gamma.reserve(ball.volume(t));
                             for (std::size_t i = 0; i < ball.volume(t); ++i)
                               gamma.push_back(g.point(ball.reached()[i]));
                             try {
                               const auto ext = exterior_boundary(gamma, g.spec());
                               return static_cast<double>(ext.boundary.size()) <= limit;
                             } catch (const HypothesisError&) {
                               boundary_unknown = true;  // ball touches the face
                               return false;
                             }
                           });
  if (!result.hit() && boundary_unknown) result.outcome = Outcome::contaminated;
  return result;
}

EventResult event_A_free(const BallGrowth& ball, const EventSpec& spec) {
  const auto& g = ball.geometry();
  const int d = g.dimension();
  const std::int64_t a = spec.scale(d);
  const std::int64_t volume_cap = floor_pow(spec.n, 1.75);
  std::vector<VertexId> keys;
  return scan_event(ball, spec, 4, 3, [&](std::uint32_t t, VertexId w, EventResult& out) {
    if (static_cast<std::int64_t>(ball.volume(t)) > volume_cap) return false;
    const auto ball_t = ball.reached().subspan(0, ball.volume(t));
    // free lines: L_i(w) meets B_t only at w
    std::vector<int> free_axes;
    for (int i = 0; i < d; ++i) {
      const auto s = g.stride(i);
      const int c = g.local_coordinate(w, i);
      const VertexId base = w - static_cast<VertexId>(c) * s;
      bool free = true;
      for (std::uint32_t k = 0; k < g.spec().side() && free; ++k) {
        const VertexId u = base + k * s;
        if (u != w && ball.dist(u) <= t) free = false;
      }
      if (free) free_axes.push_back(i);
    }
    if (free_axes.empty()) return false;
    // thin sections: N_k(H_j(w) cap B_t) <= n^alpha for all k != j
    for (int j = 0; j < d; ++j) {
      bool candidate = false;
      for (int i : free_axes) candidate = candidate || i != j;
      if (!candidate) continue;
      const int wj = g.local_coordinate(w, j);
      std::vector<VertexId> section;
      for (VertexId v : ball_t)
        if (g.local_coordinate(v, j) == wj) section.push_back(v);
      bool thin = true;
      for (int k = 0; k < d && thin; ++k) {
        if (k == j) continue;
        if (static_cast<std::int64_t>(line_count(g, section, k)) > a) thin = false;
      }
      if (!thin) continue;
      for (int i : free_axes) {
        if (i == j) continue;
        out.line_axis = i;
        out.plane_axis = j;
        return true;
      }
    }
    return false;
  });
}

EventResult event_A_free(const PercolationSample& sample, const EventSpec& spec) {
  return event_A_free(grow_ball(sample, Point(sample.geometry().dimension(), 0)), spec);
}

std::size_t line_count(std::span<const Point> A, int axis) {
  std::vector<Point> keys(A.begin(), A.end());
  for (auto& p : keys) {
    if (axis < 0 || axis >= static_cast<int>(p.size())) throw std::invalid_argument("axis out of range");
    p[axis] = 0;
  }
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

std::size_t line_count(const BoxGeometry& geometry, std::span<const VertexId> A, int axis) {
  std::vector<VertexId> keys(A.begin(), A.end());
  const auto s = geometry.stride(axis);
  for (auto& v : keys) v -= static_cast<VertexId>(geometry.local_coordinate(v, axis)) * s;
  std::sort(keys.begin(), keys.end());
  return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

void SurgeryPlan::validate() const {
  std::vector<EdgeId> a = edges_to_close, b = edges_to_open;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<EdgeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  if (!common.empty()) throw std::invalid_argument("surgery plan closes and opens the same edge");
}

PercolationSample apply_surgery(const PercolationSample& sample, const SurgeryPlan& plan) {
  plan.validate();
  const auto E = sample.geometry().edge_count();
  for (auto e : plan.edges_to_close)
    if (e >= E) throw LatticeError("surgery edge outside box");
  for (auto e : plan.edges_to_open)
    if (e >= E) throw LatticeError("surgery edge outside box");
  return sample.with_changes(plan.edges_to_close, plan.edges_to_open);
}

ForcedCutPoint force_cutpoint(const PercolationSample& sample, const BallGrowth& ball, std::uint32_t t, VertexId w,
                              std::uint64_t k) {
  const auto& g = sample.geometry();
  if (!(ball.geometry().spec() == g.spec())) throw std::invalid_argument("ball was grown on a different box");
  if (w >= g.vertex_count() || !ball.reached(w) || ball.dist(w) != t)
    throw std::invalid_argument("w is not in layer t of the ball");
  if (t < 1) throw std::invalid_argument("t must be >= 1");
  const auto certified = ball.certified_through();
  if (certified != kInfinity && t > certified) throw ContaminationError("layer t is not certified");
  if (ball.volume(t) > k) throw std::invalid_argument("|B_t| exceeds the volume bound k");
  const std::uint64_t root = isqrt(k);
  const std::uint64_t root_up = root * root == k ? root : root + 1;
  const std::int64_t lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(t) - static_cast<std::int64_t>(root_up) + 1);
  std::optional<std::uint32_t> r;
  for (std::int64_t cand = t; cand >= lo; --cand) {
    if (ball.layer_size(static_cast<std::size_t>(cand)) <= root) {
      r = static_cast<std::uint32_t>(cand);
      break;
    }
  }
  if (!r) throw std::invalid_argument("no layer of size <= floor(sqrt k) in the window below t");

  ForcedCutPoint out;
  out.thin_layer = *r;
  out.geodesic = geodesic(ball, w);
  const auto& path = out.geodesic;
  std::vector<EdgeId> keep;
  for (std::size_t i = 1; i < path.size(); ++i) keep.push_back(*g.edge_between(path[i - 1], path[i]));
  std::sort(keep.begin(), keep.end());
  auto on_path = [&](EdgeId e) { return std::binary_search(keep.begin(), keep.end(), e); };

  auto& close = out.plan.edges_to_close;
  auto add_incident = [&](VertexId v, auto&& want) {
    for (int a = 0; a < g.dimension(); ++a) {
      for (int dir : {-1, 1}) {
        const auto u = g.neighbor(v, a, dir);
        if (!u || !want(*u)) continue;
        const EdgeId e = *g.edge_between(v, *u);
        if (!on_path(e)) close.push_back(e);
      }
    }
  };
  for (std::size_t m = *r; m < path.size(); ++m) add_incident(path[m], [](VertexId) { return true; });
  for (VertexId u : ball.layer(*r))
    add_incident(u, [&](VertexId z) { return ball.reached(z) && ball.dist(z) + 1 <= *r; });
  std::sort(close.begin(), close.end());
  close.erase(std::unique(close.begin(), close.end()), close.end());
  const double cap = 4.0 * g.dimension() * std::sqrt(static_cast<double>(k));
  if (static_cast<double>(close.size()) > cap)
    throw std::logic_error("forced cut-point plan exceeds 4d sqrt(k) edges");
  return out;
}

UpperTailResult upper_tail_event(const BallGrowth& ball, VertexId target, double threshold) {
  UpperTailResult out;
  out.threshold = threshold;
  out.distance = ball.bound(target);
  if (!ball.reached(target)) {
    out.outcome = ball.truncated() ? Outcome::contaminated : Outcome::disconnected;
    return out;
  }
  if (static_cast<double>(out.distance.upper) <= threshold)
    out.outcome = Outcome::miss;
  else if (static_cast<double>(out.distance.lower) > threshold)
    out.outcome = Outcome::hit;
  else
    out.outcome = Outcome::contaminated;
  return out;
}

UpperTailResult upper_tail_event(const PercolationSample& sample, std::int64_t n, double xi, double mu_hat,
                                 std::span<const double> x) {
  const auto& g = sample.geometry();
  const int d = g.dimension();
  std::vector<double> dir(d, 0.0);
  if (x.empty())
    dir[0] = 1.0;
  else if (static_cast<int>(x.size()) == d)
    dir.assign(x.begin(), x.end());
  else
    throw std::invalid_argument("direction has wrong dimension");
  for (auto& c : dir) c *= static_cast<double>(n);
  const Point target = floor_point(dir);
  const Point zero(d, 0);
  const auto dist = chemical_distance(sample, zero, target);
  UpperTailResult out;
  out.threshold = mu_hat * (1.0 + xi) * static_cast<double>(n);
  out.distance = dist.certified;
  if (dist.distance == kInfinity)
    out.outcome = Outcome::disconnected;
  else if (static_cast<double>(dist.certified.upper) <= out.threshold)
    out.outcome = Outcome::miss;
  else if (static_cast<double>(dist.certified.lower) > out.threshold)
    out.outcome = Outcome::hit;
  else
    out.outcome = Outcome::contaminated;
  return out;
}

}  // namespace perclab
