#include "perclab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include "perclab/csv.hpp"
#include "perclab/parallel.hpp"

namespace perclab {

Norm scaled_l1_norm(double scale) {
  return [scale](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += std::abs(c);
    return scale * s;
  };
}

Norm scaled_l2_norm(double scale) {
  return [scale](std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return scale * std::sqrt(s);
  };
}

double norm_of_axis(const Norm& mu, int dimension, int axis) {
  std::vector<double> e(dimension, 0.0);
  e[axis] = 1.0;
  return mu(e);
}

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

// Odometer over the integer box [lo, hi] (inclusive), lexicographic order.
template <class F>
void for_each_point(const Point& lo, const Point& hi, F&& f) {
  const std::size_t d = lo.size();
  for (std::size_t k = 0; k < d; ++k)
    if (lo[k] > hi[k]) return;
  Point cur = lo;
  while (true) {
    f(cur);
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (cur[k] < hi[k]) {
        ++cur[k];
        break;
      }
      cur[k] = lo[k];
      if (k == 0) return;
    }
    if (d == 0) return;
  }
}

// Dense view of a sub-box of the sample, with local lexicographic indices.
struct SubBox {
  const PercolationSample& sample;
  int d;
  Point lo;  // microscopic corner
  std::vector<std::size_t> size, stride;
  std::size_t total = 1;
  VertexId base;

  SubBox(const PercolationSample& s, Point lo_, Point hi_) : sample(s), d(s.box().dimension), lo(std::move(lo_)) {
    size.resize(d);
    stride.resize(d);
    for (int k = d - 1; k >= 0; --k) {
      size[k] = static_cast<std::size_t>(hi_[k] - lo[k] + 1);
      stride[k] = total;
      total *= size[k];
    }
    base = s.geometry().vertex(lo);
  }
  int coord(std::size_t i, int k) const { return static_cast<int>((i / stride[k]) % size[k]); }
  VertexId global(std::size_t i) const {
    VertexId v = base;
    for (int k = 0; k < d; ++k) v += static_cast<VertexId>(coord(i, k)) * sample.geometry().stride(k);
    return v;
  }
  template <class F>
  void for_open_neighbors(std::size_t i, VertexId gv, F&& f) const {
    for (int k = 0; k < d; ++k) {
      const int c = coord(i, k);
      if (static_cast<std::size_t>(c) + 1 < size[k] && sample.open_up(gv, k)) f(i + stride[k], k);
      if (c > 0 && sample.open_down(gv, k)) f(i - stride[k], k);
    }
  }
};

// Does every window of w points per axis contain a marked cell?
bool every_window_hit(const SubBox& box, const std::vector<std::uint8_t>& marked, std::size_t w) {
  const int d = box.d;
  std::vector<std::size_t> psize(d), pstride(d);
  std::size_t ptotal = 1;
  for (int k = d - 1; k >= 0; --k) {
    psize[k] = box.size[k] + 1;
    pstride[k] = ptotal;
    ptotal *= psize[k];
  }
  // summed-area table with a zero border
  std::vector<std::uint32_t> pre(ptotal, 0);
  for (std::size_t i = 0; i < box.total; ++i) {
    std::size_t pi = 0;
    for (int k = 0; k < d; ++k) pi += static_cast<std::size_t>(box.coord(i, k) + 1) * pstride[k];
    pre[pi] = marked[i];
  }
  for (int k = 0; k < d; ++k)
    for (std::size_t pi = 0; pi < ptotal; ++pi)
      if ((pi / pstride[k]) % psize[k] > 0) pre[pi] += pre[pi - pstride[k]];
  Point lo(d, 0), hi(d);
  for (int k = 0; k < d; ++k) hi[k] = static_cast<int>(box.size[k] - std::min(w, box.size[k]));
  bool all = true;
  for_each_point(lo, hi, [&](const Point& c) {
    if (!all) return;
    std::int64_t sum = 0;
    for (unsigned mask = 0; mask < (1U << d); ++mask) {
      std::size_t pi = 0;
      int parity = 0;
      for (int k = 0; k < d; ++k) {
        const std::size_t wk_axis = std::min(w, box.size[k]);
        if (mask >> k & 1U) {
          pi += static_cast<std::size_t>(c[k]) * pstride[k];
          ++parity;
        } else {
          pi += (static_cast<std::size_t>(c[k]) + wk_axis) * pstride[k];
        }
      }
      sum += (parity % 2 ? -1 : 1) * static_cast<std::int64_t>(pre[pi]);
    }
    if (sum <= 0) all = false;
  });
  return all;
}

SiteClassification classify_site(const PercolationSample& sample, const MacroLattice& lattice, const Point& site,
                                  double epsilon, const Norm& mu_hat, const ClassifyOptions& options) {
  SiteClassification out;
  out.site = site;
  const int d = lattice.dimension();
  const int N = lattice.N();
  Point lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = lattice.box_lo(site[k]) - 2 * N;
    hi[k] = lattice.box_hi(site[k]) + 2 * N - 1;
  }
  const SubBox box(sample, lo, hi);

  // condition 1: exactly one open cluster of diameter >= N/2 in the enlarged box
  std::vector<std::uint32_t> label(box.total, ~std::uint32_t{0});
  std::vector<std::size_t> queue;
  queue.reserve(box.total);
  std::uint32_t next_label = 0;
  std::optional<std::uint32_t> dominant;
  std::vector<std::size_t> dominant_members;
  for (std::size_t s = 0; s < box.total; ++s) {
    if (label[s] != ~std::uint32_t{0}) continue;
    const std::uint32_t id = next_label++;
    queue.clear();
    queue.push_back(s);
    label[s] = id;
    std::vector<int> cmin(d), cmax(d);
    for (int k = 0; k < d; ++k) cmin[k] = cmax[k] = box.coord(s, k);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t i = queue[head];
      for (int k = 0; k < d; ++k) {
        const int c = box.coord(i, k);
        cmin[k] = std::min(cmin[k], c);
        cmax[k] = std::max(cmax[k], c);
      }
      box.for_open_neighbors(i, box.global(i), [&](std::size_t j, int) {
        if (label[j] != ~std::uint32_t{0}) return;
        label[j] = id;
        queue.push_back(j);
      });
    }
    int diam = 0;
    for (int k = 0; k < d; ++k) diam = std::max(diam, cmax[k] - cmin[k]);
    if (2 * diam >= N) {
      ++out.large_clusters;
      if (!dominant) {
        dominant = id;
        dominant_members = queue;
      }
    }
  }
  if (out.large_clusters != 1) {
    out.verdict = Verdict::bad;
    out.failed_condition = 1;
    return out;
  }
  out.cluster_size = dominant_members.size();
  out.cluster.reserve(dominant_members.size());
  for (std::size_t i : dominant_members) out.cluster.push_back(box.global(i));
  std::sort(out.cluster.begin(), out.cluster.end());

  // condition 2: the cluster meets every sub-box of side epsilon N
  std::vector<std::uint8_t> marked(box.total, 0);
  for (std::size_t i : dominant_members) marked[i] = 1;
  const auto w = static_cast<std::size_t>(std::floor(epsilon * N + 1e-12)) + 1;
  if (!every_window_hit(box, marked, w)) {
    out.verdict = Verdict::bad;
    out.failed_condition = 2;
    return out;
  }

  // condition 3: D(x, y) <= mu(x - y) + epsilon N inside the cluster
  std::vector<std::size_t> members = dominant_members;
  std::sort(members.begin(), members.end());
  std::vector<std::size_t> sources;
  if (members.size() <= options.exact_pair_limit) {
    sources = members;
  } else {
    out.sampled_pairs = true;
    const std::size_t k = std::max<std::size_t>(1, options.sampled_sources);
    for (std::size_t j = 0; j < k; ++j) sources.push_back(members[j * members.size() / k]);
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }
  const double slack = epsilon * N;
  std::vector<std::uint32_t> dist(box.total, kInfinity);
  std::vector<double> diff(d);
  for (std::size_t src : sources) {
    for (std::size_t i : members) dist[i] = kInfinity;
    queue.clear();
    queue.push_back(src);
    dist[src] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t i = queue[head];
      box.for_open_neighbors(i, box.global(i), [&](std::size_t j, int) {
        if (dist[j] != kInfinity) return;
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      });
    }
    for (std::size_t y : members) {
      for (int k = 0; k < d; ++k) diff[k] = static_cast<double>(box.coord(src, k) - box.coord(y, k));
      if (static_cast<double>(dist[y]) > mu_hat(diff) + slack + 1e-9) {
        out.verdict = Verdict::bad;
        out.failed_condition = 3;
        return out;
      }
    }
  }
  out.verdict = Verdict::good;
  return out;
}

}  // namespace

MacroLattice::MacroLattice(int dimension, int N, double mu_e1) : dimension_(dimension), N_(N), mu_e1_(mu_e1) {
  if (dimension < kMinDimension || dimension > kMaxDimension) throw RenormError("unsupported dimension");
  if (N < 1) throw RenormError("macroscopic box half-side N must be >= 1");
  if (!(mu_e1 > 0.0) || !std::isfinite(mu_e1)) throw RenormError("mu(e1) must be positive and finite");
  rho_ = std::max(1, static_cast<int>(std::floor(10.0 * dimension * mu_e1)));
}

Point MacroLattice::site_of(const Point& x) const {
  Point i(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) i[k] = floor_div(x[k] + N_, 2 * N_);
  return i;
}

bool MacroLattice::in_block(const Point& x, const Point& site, int reach) const {
  for (int k = 0; k < dimension_; ++k) {
    const int lo = box_lo(site[k]) - 2 * reach * N_;
    const int hi = box_hi(site[k]) + 2 * reach * N_;
    if (x[k] < lo || x[k] >= hi) return false;
  }
  return true;
}

std::vector<Point> MacroLattice::classifiable_sites(const BoxSpec& box) const {
  Point lo(dimension_), hi(dimension_);
  for (int k = 0; k < dimension_; ++k) {
    const int blo = box.offset(k) - box.radius, bhi = box.offset(k) + box.radius;
    // 2iN - 3N >= blo and 2iN + 3N - 1 <= bhi
    lo[k] = ceil_div(blo + 3 * N_, 2 * N_);
    hi[k] = floor_div(bhi - 3 * N_ + 1, 2 * N_);
  }
  std::vector<Point> out;
  for_each_point(lo, hi, [&](const Point& p) { out.push_back(p); });
  return out;
}

std::vector<Point> MacroLattice::sites_meeting(const BoxSpec& box) const {
  Point lo(dimension_), hi(dimension_);
  for (int k = 0; k < dimension_; ++k) {
    lo[k] = floor_div(box.offset(k) - box.radius + N_, 2 * N_);
    hi[k] = floor_div(box.offset(k) + box.radius + N_, 2 * N_);
  }
  std::vector<Point> out;
  for_each_point(lo, hi, [&](const Point& p) { out.push_back(p); });
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::good:
      return "good";
    case Verdict::bad:
      return "bad";
    case Verdict::unclassifiable:
      return "unclassifiable";
  }
  return "?";
}

const SiteClassification* MacroClassification::find(const Point& site) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), site,
                             [](const SiteClassification& s, const Point& p) { return s.site < p; });
  return it != sites.end() && it->site == site ? &*it : nullptr;
}

std::size_t MacroClassification::count(Verdict v) const {
  return static_cast<std::size_t>(
      std::count_if(sites.begin(), sites.end(), [v](const SiteClassification& s) { return s.verdict == v; }));
}

double MacroClassification::bad_fraction() const {
  const std::size_t good = count(Verdict::good), bad = count(Verdict::bad);
  return good + bad == 0 ? 0.0 : static_cast<double>(bad) / static_cast<double>(good + bad);
}

MacroClassification classify_boxes(const PercolationSample& sample, int N, double epsilon, const Norm& mu_hat,
                                   const ClassifyOptions& options) {
  const int d = sample.box().dimension;
  if (!(epsilon > 0.0)) throw RenormError("epsilon must be positive");
  if (epsilon * N < 1.0 - 1e-12) throw RenormError("need epsilon N >= 1");
  MacroClassification out;
  out.dimension = d;
  out.N = N;
  out.epsilon = epsilon;
  out.mu_e1 = norm_of_axis(mu_hat, d);
  const MacroLattice lattice(d, N, out.mu_e1);
  const auto all = lattice.sites_meeting(sample.box());
  const auto inner = lattice.classifiable_sites(sample.box());
  std::vector<Point> todo;
  for (const auto& s : all)
    if (std::binary_search(inner.begin(), inner.end(), s)) todo.push_back(s);
  ParallelOptions popt;
  popt.workers = options.workers;
  auto result = run_parallel<SiteClassification>(
      todo.size(), [&](std::size_t i) { return classify_site(sample, lattice, todo[i], epsilon, mu_hat, options); },
      popt);
  if (result.partial) throw std::runtime_error("classification failed: " + result.error);
  std::size_t j = 0;
  for (const auto& s : all) {
    if (j < result.results.size() && result.results[j].site == s) {
      out.sites.push_back(std::move(result.results[j++]));
    } else {
      SiteClassification u;
      u.site = s;
      out.sites.push_back(std::move(u));
    }
  }
  return out;
}

std::vector<BadCluster> bad_clusters(const MacroClassification& classification, MacroAdjacency adjacency) {
  std::vector<Point> bad;
  for (const auto& s : classification.sites)
    if (s.verdict == Verdict::bad) bad.push_back(s.site);
  const int d = classification.dimension;
  std::vector<Point> offsets;
  if (adjacency == MacroAdjacency::nearest) {
    for (int k = 0; k < d; ++k)
      for (int sgn : {-1, 1}) {
        Point o(d, 0);
        o[k] = sgn;
        offsets.push_back(o);
      }
  } else {
    for_each_point(Point(d, -1), Point(d, 1), [&](const Point& o) {
      if (std::any_of(o.begin(), o.end(), [](int c) { return c != 0; })) offsets.push_back(o);
    });
  }
  std::vector<char> seen(bad.size(), 0);
  std::vector<BadCluster> out;
  for (std::size_t s = 0; s < bad.size(); ++s) {
    if (seen[s]) continue;
    BadCluster c;
    std::deque<std::size_t> queue{s};
    seen[s] = 1;
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      c.sites.push_back(bad[i]);
      for (const auto& o : offsets) {
        Point y = bad[i];
        for (int k = 0; k < d; ++k) y[k] += o[k];
        auto it = std::lower_bound(bad.begin(), bad.end(), y);
        if (it == bad.end() || *it != y) continue;
        const auto j = static_cast<std::size_t>(it - bad.begin());
        if (seen[j]) continue;
        seen[j] = 1;
        queue.push_back(j);
      }
    }
    std::sort(c.sites.begin(), c.sites.end());
    out.push_back(std::move(c));
  }
  return out;
}

BadClusterReport bad_clusters(const MacroClassification& classification) {
  return {bad_clusters(classification, MacroAdjacency::nearest), bad_clusters(classification, MacroAdjacency::star)};
}

bool is_open_path(const PercolationSample& sample, std::span<const VertexId> path) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto e = sample.geometry().edge_between(path[i], path[i + 1]);
    if (!e || !sample.is_open(*e)) return false;
  }
  return true;
}

RouteResult route_through_good(const PercolationSample& sample, const MacroClassification& classification,
                               std::span<const Point> macro_path, VertexId x, VertexId y) {
  const auto& g = sample.geometry();
  const int d = g.dimension();
  if (macro_path.empty()) throw RenormError("macro path is empty");
  if (classification.dimension != d) throw RenormError("classification dimension does not match the sample");
  for (std::size_t i = 0; i < macro_path.size(); ++i) {
    const auto* s = classification.find(macro_path[i]);
    if (!s || s->verdict != Verdict::good) throw RenormError("macro path visits a site that is not good");
    if (i > 0) {
      int linf = 0;
      for (int k = 0; k < d; ++k) linf = std::max(linf, std::abs(macro_path[i][k] - macro_path[i - 1][k]));
      if (linf != 1) throw RenormError("consecutive macro sites are not *-adjacent");
    }
  }
  const MacroLattice lattice(d, classification.N, classification.mu_e1);
  auto check_endpoint = [&](VertexId v, const Point& site) {
    const auto* s = classification.find(site);
    if (v >= g.vertex_count() || !lattice.in_box(g.point(v), site) ||
        !std::binary_search(s->cluster.begin(), s->cluster.end(), v))
      throw RenormError("endpoint is not in the dominant cluster of its box");
  };
  check_endpoint(x, macro_path.front());
  check_endpoint(y, macro_path.back());

  std::vector<Point> gamma(macro_path.begin(), macro_path.end());
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());

  RegionMask region(g.vertex_count(), 0);
  const BoxSpec& spec = g.spec();
  for (const auto& site : gamma) {
    Point lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::max(lattice.box_lo(site[k]) - 2 * lattice.rho() * classification.N, spec.offset(k) - spec.radius);
      hi[k] = std::min(lattice.box_hi(site[k]) + 2 * lattice.rho() * classification.N - 1,
                       spec.offset(k) + spec.radius);
    }
    for_each_point(lo, hi, [&](const Point& p) { region[g.vertex(p)] = 1; });
  }

  RouteResult out;
  out.bound = 2.0 * d * classification.mu_e1 * classification.N * static_cast<double>(gamma.size());
  const VertexId src[1] = {x};
  const BallGrowth ball = grow_ball(sample, src, std::nullopt, &region);
  if (!ball.reached(y)) throw std::runtime_error("no open path joins the endpoints inside the routing region");
  out.path = geodesic(ball, y);
  return out;
}

int slab_box_radius(int dimension, const SlabSpec& spec) {
  const int rho = spec.rho ? *spec.rho : std::max(1, static_cast<int>(std::floor(10.0 * dimension * spec.mu_hat)));
  const int half = (2 * rho + 1) * spec.N;
  const int en = static_cast<int>(std::floor(spec.epsilon * spec.n + 1e-12));
  const int thr = static_cast<int>(std::floor((spec.mu_hat + spec.xi) * spec.n));
  return std::max({half + 1, spec.n + en, en + thr + 1});
}

SlabExperiment slab_experiment(const PercolationSample& sample, const SlabSpec& spec) {
  const auto& g = sample.geometry();
  const int d = g.dimension();
  if (d < 3) throw RenormError("slab experiment needs d >= 3");
  if (spec.n < 1 || spec.N < 1) throw RenormError("slab experiment needs n >= 1 and N >= 1");
  if (!(spec.epsilon >= 0.0) || !(spec.mu_hat > 0.0)) throw RenormError("invalid epsilon or mu");
  SlabExperiment out;
  out.rho = spec.rho ? *spec.rho : std::max(1, static_cast<int>(std::floor(10.0 * d * spec.mu_hat)));
  if (out.rho < 1) throw RenormError("rho must be >= 1");
  out.threshold = (spec.mu_hat + spec.xi) * spec.n;
  const int N = spec.N;
  const int half = (2 * out.rho + 1) * N;  // slab occupies [c - half, c + half) on axes >= 2
  const int en = static_cast<int>(std::floor(spec.epsilon * spec.n + 1e-12));
  const int core = out.rho * N;
  const BoxSpec& box = g.spec();
  auto lo = [&](int k) { return box.offset(k) - box.radius; };
  auto hi = [&](int k) { return box.offset(k) + box.radius; };
  if (-en < lo(0) || spec.n + en > hi(0) || -en < lo(1) || en > hi(1))
    throw RenormError("slab endpoint boxes are not contained in the sample box");

  // slab centers 2 m half along each axis >= 2, strictly inside the box
  Point mlo(d - 2), mhi(d - 2);
  for (int k = 2; k < d; ++k) {
    mhi[k - 2] = (std::max(std::abs(lo(k)), std::abs(hi(k))) + half) / (2 * half) + 1;
    mlo[k - 2] = -mhi[k - 2];
  }
  std::vector<Point> centers;
  for_each_point(mlo, mhi, [&](const Point& m) {
    Point c(d - 2);
    for (int k = 0; k < d - 2; ++k) {
      c[k] = 2 * m[k] * half;
      if (c[k] - half <= lo(k + 2) || c[k] + half - 1 >= hi(k + 2)) return;
    }
    centers.push_back(c);
  });
  if (centers.empty()) throw RenormError("no slab fits strictly inside the sample box");

  const auto thr_floor = static_cast<std::uint32_t>(std::floor(out.threshold));
  RegionMask region(g.vertex_count());
  for (std::size_t si = 0; si < centers.size(); ++si) {
    const Point& c = centers[si];
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      bool inside = true;
      for (int k = 2; k < d && inside; ++k) {
        const int x = g.local_coordinate(v, k) - box.radius + box.offset(k);
        inside = x >= c[k - 2] - half && x < c[k - 2] + half;
      }
      region[v] = inside;
    }
    Point alo(d), ahi(d);
    alo[0] = alo[1] = -en;
    ahi[0] = ahi[1] = en;
    for (int k = 2; k < d; ++k) {
      alo[k] = c[k - 2] - core;
      ahi[k] = c[k - 2] + core;
    }
    std::vector<VertexId> from, to;
    for_each_point(alo, ahi, [&](const Point& p) {
      from.push_back(g.vertex(p));
      Point q = p;
      q[0] += spec.n;
      to.push_back(g.vertex(q));
    });
    const BallGrowth ball = grow_ball(sample, from, std::nullopt, &region);
    SlabRecord rec;
    rec.slab_index = si;
    rec.offset = c;
    for (VertexId v : to) rec.distance = std::min(rec.distance, ball.dist(v));
    if (rec.distance != kInfinity && static_cast<double>(rec.distance) <= out.threshold)
      rec.outcome = Outcome::miss;
    else if (ball.certified_through() >= thr_floor)
      rec.outcome = Outcome::hit;
    else
      rec.outcome = Outcome::contaminated;
    out.slabs.push_back(std::move(rec));
  }
  return out;
}

void write_classification_csv(std::ostream& out, const MacroClassification& c) {
  CsvWriter csv(out, "classification",
                {"site", "verdict", "failed_condition", "cluster_size", "large_clusters", "sampled_pairs"});
  for (const auto& s : c.sites)
    csv.row({format_coords(s.site), to_string(s.verdict), std::to_string(s.failed_condition),
             std::to_string(s.cluster_size), std::to_string(s.large_clusters), s.sampled_pairs ? "1" : "0"});
}

void write_bad_clusters_csv(std::ostream& out, const BadClusterReport& report) {
  CsvWriter csv(out, "bad_clusters", {"adjacency", "cluster", "size", "sites"});
  const auto emit = [&csv](const char* name, const std::vector<BadCluster>& clusters) {
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      std::string sites;
      for (const auto& s : clusters[i].sites) {
        if (!sites.empty()) sites += ' ';
        sites += format_coords(s);
      }
      csv.row({name, std::to_string(i), std::to_string(clusters[i].size()), sites});
    }
  };
  emit("nearest", report.nearest);
  emit("star", report.star);
}

void write_slab_csv(std::ostream& out, const SlabSpec& spec, const SlabExperiment& e) {
  CsvWriter csv(out, "slab", {"n", "slab_index", "offset", "rho", "threshold", "distance", "event"});
  for (const auto& r : e.slabs)
    csv.row({std::to_string(spec.n), std::to_string(r.slab_index), format_coords(r.offset), std::to_string(e.rho),
             format_real(e.threshold), format_distance(r.distance), to_string(r.outcome)});
}

}  // namespace perclab
