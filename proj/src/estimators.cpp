#include "perclab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <istream>
#include <ostream>
#include <string>
#include <stdexcept>

#include "perclab/config.hpp"
#include "perclab/csv.hpp"
#include "perclab/parallel.hpp"
#include "perclab/rng.hpp"

namespace perclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double linf(std::span<const double> x) {
  double m = 0.0;
  for (double c : x) m = std::max(m, std::abs(c));
  return m;
}

int ceil_int(double v) { return static_cast<int>(std::ceil(v - 1e-12)); }

Point scaled_floor(std::span<const double> x, std::int64_t n) {
  std::vector<double> v(x.begin(), x.end());
  for (auto& c : v) c *= static_cast<double>(n);
  return floor_point(v);
}

void check_common(int d, double p, const std::vector<std::int64_t>& n_grid) {
  if (d < kMinDimension || d > kMaxDimension) throw std::invalid_argument("unsupported dimension");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0, 1)");
  if (p <= critical_probability_proxy(d))
    throw std::invalid_argument("p must exceed the critical probability (supercritical regime only)");
  if (n_grid.empty()) throw std::invalid_argument("n grid is empty");
  for (auto n : n_grid)
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}

ParallelOptions parallel_options(const McOptions& mc) {
  ParallelOptions o;
  o.workers = mc.workers;
  o.fail_at = mc.fail_at;
  return o;
}

std::vector<double> with_y(double s, std::span<const double> y) {
  std::vector<double> v{s};
  v.insert(v.end(), y.begin(), y.end());
  return v;
}

std::vector<long long> grid_key(double s, std::span<const double> y) {
  std::vector<long long> k;
  k.push_back(std::llround(s * 1e9));
  for (double c : y) k.push_back(std::llround(c * 1e9));
  return k;
}

std::string format_vector(std::span<const double> x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ';';
    s += format_real(x[i]);
  }
  return s;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

double critical_probability_proxy(int d) {
  // exact for d = 2; numerical estimates from the literature otherwise
  switch (d) {
    case 2: return 0.5;
    case 3: return 0.2488;
    case 4: return 0.1601;
    case 5: return 0.1182;
    case 6: return 0.0942;
    default: throw std::invalid_argument("unsupported dimension");
  }
}

int mu_box_radius(std::int64_t n, std::span<const double> x, double box_factor) {
  return ceil_int(static_cast<double>(n) * linf(x)) + ceil_int(box_factor * static_cast<double>(n)) + 1;
}

MuEstimate estimate_mu(const MuConfig& config) {
  check_common(config.d, config.p, config.n_grid);
  MuEstimate out;
  out.x = config.x.empty() ? std::vector<double>(config.d, 0.0) : config.x;
  if (config.x.empty()) out.x[0] = 1.0;
  if (static_cast<int>(out.x.size()) != config.d) throw std::invalid_argument("direction has wrong dimension");
  if (linf(out.x) == 0.0) throw std::invalid_argument("direction must be nonzero");
  if (!(config.box_factor >= 0.0)) throw std::invalid_argument("box factor must be >= 0");

  struct Rep {
    std::uint32_t distance = kInfinity;
    bool exact = false;
  };
  for (auto n : config.n_grid) {
    MuRow row;
    row.n = n;
    const Point target = scaled_floor(out.x, n);
    const Point zero(config.d, 0);
    std::int64_t l1 = 0;
    for (int c : target) l1 += std::abs(c);
    row.l1_floor = static_cast<double>(l1) / static_cast<double>(n);
    const auto geometry = make_geometry(BoxSpec{config.d, mu_box_radius(n, out.x, config.box_factor), {}});
    const auto base = stream_seed(config.mc.seed, static_cast<std::uint64_t>(n));
    auto result = run_parallel<Rep>(
        config.mc.replicates,
        [&](std::size_t r) {
          const auto sample = sample_configuration(geometry, config.p, replicate_seed(base, r));
          const auto d = chemical_distance(sample, zero, target);
          return Rep{d.distance, d.certified.exact()};
        },
        parallel_options(config.mc));
    if (result.partial) {
      out.partial = true;
      out.warnings.push_back("n = " + std::to_string(n) + ": " + result.error);
    }
    for (const auto& rep : result.results) {
      ++row.replicates;
      if (rep.distance == kInfinity) {
        ++row.disconnected;
      } else if (!rep.exact) {
        ++row.contaminated;
      } else {
        ++row.connected;
        if (static_cast<std::int64_t>(rep.distance) < l1) ++row.below_l1;
        row.ratio.add(static_cast<double>(rep.distance) / static_cast<double>(n));
      }
    }
    const double se = row.ratio.std_error();
    row.ci = {row.ratio.mean - 1.96 * se, row.ratio.mean + 1.96 * se};
    if (row.connected == 0) out.warnings.push_back("n = " + std::to_string(n) + ": no connected replicate, dropped");
    out.rows.push_back(std::move(row));
    if (out.partial) break;
  }
  const MuRow* prev = nullptr;
  for (const auto& row : out.rows) {
    if (row.connected == 0) continue;
    if (row.n >= out.n_used) {
      out.n_used = row.n;
      out.mu_hat = row.ratio.mean;
      out.mu_se = row.ratio.std_error();
    }
    if (prev && row.connected >= 2 && prev->connected >= 2) {
      const double s = std::hypot(row.ratio.std_error(), prev->ratio.std_error());
      if (row.ratio.mean > prev->ratio.mean + 3.0 * s) out.trend_consistent = false;
    }
    prev = &row;
  }
  return out;
}

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::A: return "A";
    case EventKind::A_free: return "A_free";
    case EventKind::A_K: return "A_K";
    case EventKind::upper_tail: return "upper_tail";
  }
  return "?";
}

EventKind parse_event_kind(const std::string& s) {
  if (s == "A") return EventKind::A;
  if (s == "A_free") return EventKind::A_free;
  if (s == "A_K") return EventKind::A_K;
  if (s == "upper_tail") return EventKind::upper_tail;
  throw std::invalid_argument("unknown event kind '" + s + "' (expected A, A_free, A_K or upper_tail)");
}

const RateEstimate* RateSurface::find(std::int64_t n, double level, std::span<const double> x) const {
  for (const auto& e : estimates)
    if (e.n == n && std::abs(e.level - level) < 1e-12 && std::equal(x.begin(), x.end(), e.x.begin(), e.x.end()))
      return &e;
  return nullptr;
}

namespace {

std::vector<std::vector<double>> default_points(const RateConfig& c) {
  if (!c.xs.empty()) return c.xs;
  std::vector<double> v(c.d, 0.0);
  if (c.kind == EventKind::upper_tail) v[0] = 1.0;
  return {v};
}

}  // namespace

int event_box_radius(const RateConfig& config, std::int64_t n) {
  double reach = 0.0;
  for (const auto& x : default_points(config)) reach = std::max(reach, linf(x));
  int r = ceil_int(config.box_factor * static_cast<double>(n)) + ceil_int(reach * static_cast<double>(n)) + 1;
  if (config.kind != EventKind::upper_tail) {
    const double alpha = config.alpha.value_or(EventSpec::default_alpha(config.d));
    const int mult = config.kind == EventKind::A_free ? 4 : 1;
    r += mult * static_cast<int>(floor_pow(n, alpha));
  }
  return r;
}

RateSurface estimate_event_rate(const RateConfig& config) {
  check_common(config.d, config.p, config.n_grid);
  if (config.levels.empty()) throw std::invalid_argument("level grid is empty");
  const auto points = default_points(config);
  for (const auto& x : points)
    if (static_cast<int>(x.size()) != config.d) throw std::invalid_argument("spatial point has wrong dimension");
  if (config.kind == EventKind::upper_tail) {
    if (points.size() != 1) throw std::invalid_argument("upper tail estimation takes exactly one direction");
    if (linf(points[0]) == 0.0) throw std::invalid_argument("upper tail direction must be nonzero");
    if (!(config.mu_hat > 0.0)) throw std::invalid_argument("mu_hat must be positive");
  }
  for (double l : config.levels)
    if (!(l >= 0.0)) throw std::invalid_argument("levels must be >= 0");

  RateSurface out;
  const std::size_t per_rep = points.size() * config.levels.size();
  for (auto n : config.n_grid) {
    const auto geometry = make_geometry(BoxSpec{config.d, event_box_radius(config, n), {}});
    const auto base = stream_seed(config.mc.seed, static_cast<std::uint64_t>(n));
    const Point zero(config.d, 0);
    std::vector<VertexId> targets;
    if (config.kind == EventKind::upper_tail)
      for (const auto& x : points) targets.push_back(geometry->vertex(scaled_floor(x, n)));
    auto result = run_parallel<std::vector<std::uint8_t>>(
        config.mc.replicates,
        [&](std::size_t r) {
          const auto sample = sample_configuration(geometry, config.p, replicate_seed(base, r));
          const auto ball = grow_ball(sample, zero);
          std::vector<std::uint8_t> outcomes;
          outcomes.reserve(per_rep);
          for (std::size_t xi = 0; xi < points.size(); ++xi) {
            for (double level : config.levels) {
              Outcome o;
              if (config.kind == EventKind::upper_tail) {
                const double threshold = config.mu_hat * (1.0 + level) * static_cast<double>(n);
                o = upper_tail_event(ball, targets[xi], threshold).outcome;
              } else {
                EventSpec spec;
                spec.s = level;
                spec.x = points[xi];
                spec.n = n;
                spec.alpha = config.alpha;
                if (config.kind == EventKind::A)
                  o = event_A(ball, spec).outcome;
                else if (config.kind == EventKind::A_free)
                  o = event_A_free(ball, spec).outcome;
                else
                  o = event_A_K(ball, spec, config.K).outcome;
              }
              outcomes.push_back(static_cast<std::uint8_t>(o));
            }
          }
          return outcomes;
        },
        parallel_options(config.mc));
    if (result.partial) {
      out.partial = true;
      out.error = result.error;
    }
    std::vector<Tally> tallies(per_rep);
    for (const auto& rep : result.results)
      for (std::size_t k = 0; k < per_rep; ++k) tallies[k].add(static_cast<Outcome>(rep[k]));
    std::size_t k = 0;
    for (const auto& x : points) {
      for (double level : config.levels) {
        RateEstimate e;
        e.event = to_string(config.kind);
        e.level = level;
        e.x = x;
        e.n = n;
        e.tally = tallies[k++];
        e.partial = result.partial;
        finalize_rate(e);
        out.estimates.push_back(std::move(e));
      }
    }
    if (out.partial) break;
  }

  const double alpha = config.alpha.value_or(EventSpec::default_alpha(config.d));
  for (const auto& x : points) {
    for (double level : config.levels) {
      for (auto n : config.n_grid) {
        for (auto m : config.n_grid) {
          if (m < n) continue;
          const auto* a = out.find(n, level, x);
          const auto* b = out.find(m, level, x);
          const auto* c = out.find(n + m, level, x);
          if (!a || !b || !c || a->one_sided || b->one_sided || c->one_sided) continue;
          SubadditivityRow row;
          row.level = level;
          row.x = x;
          row.n = n;
          row.m = m;
          const auto nl = [](const RateEstimate* e) { return e->rate * static_cast<double>(e->n); };
          const auto sl = [](const RateEstimate* e) { return e->rate_sigma * static_cast<double>(e->n); };
          row.defect = nl(c) - nl(a) - nl(b);
          row.sigma = std::sqrt(sl(a) * sl(a) + sl(b) * sl(b) + sl(c) * sl(c));
          row.reference = std::pow(static_cast<double>(n + m), alpha);
          out.subadditivity.push_back(std::move(row));
        }
      }
    }
  }
  return out;
}

std::vector<SurfacePoint> surface_from_rates(std::span<const RateEstimate> estimates, std::int64_t n) {
  std::vector<SurfacePoint> out;
  for (const auto& e : estimates) {
    if (e.n != n) continue;
    SurfacePoint p;
    p.s = e.level;
    p.y = e.x;
    if (e.one_sided || std::isnan(e.rate)) {
      p.value = kInf;
      p.sigma = kInf;
    } else {
      p.value = e.rate;
      p.sigma = e.rate_sigma;
    }
    out.push_back(std::move(p));
  }
  return out;
}

JResult estimate_J(std::span<const SurfacePoint> surface, std::span<const double> x, double xi, const Norm& mu,
                   double mu_rel_error) {
  if (!(xi >= 0.0)) throw std::invalid_argument("xi must be >= 0");
  if (!(mu_rel_error >= 0.0 && mu_rel_error < 1.0)) throw std::invalid_argument("relative error must lie in [0, 1)");
  const double rhs = (1.0 + xi) * (1.0 - mu_rel_error) * mu(x);
  const double tol = 1e-12 * std::max(1.0, std::abs(rhs));
  JResult out;
  out.value = kInf;
  std::vector<double> diff(x.size());
  bool found = false;
  for (const auto& p : surface) {
    if (p.y.size() != x.size()) throw std::invalid_argument("surface point has wrong dimension");
    for (std::size_t k = 0; k < x.size(); ++k) diff[k] = p.y[k] - x[k];
    const double lhs = p.s + (1.0 + mu_rel_error) * mu(diff);
    if (lhs < rhs - tol) continue;
    ++out.feasible;
    if (!found || p.value < out.value) {
      found = true;
      out.value = p.value;
      out.s = p.s;
      out.y = p.y;
      out.slack = lhs - rhs;
    }
  }
  if (out.feasible == 0)
    throw std::invalid_argument("no grid point satisfies s + mu(y - x) >= (1 + xi) mu(x); enlarge the grid");
  double s_max = 0.0, y_max = 0.0;
  const SurfacePoint* unit = nullptr;
  for (const auto& p : surface) {
    s_max = std::max(s_max, p.s);
    y_max = std::max(y_max, linf(p.y));
    if (std::abs(p.s - 1.0) < 1e-12 && linf(p.y) == 0.0) unit = &p;
  }
  if (unit && std::isfinite(unit->value) && unit->value > 0.0 && std::isfinite(out.value)) {
    out.compact_range = out.value / unit->value;
    out.covers_compact_range = s_max >= out.compact_range && y_max >= out.compact_range;
  }
  return out;
}

std::size_t PropertyReport::count(const std::string& kind) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [&](const PropertyCheck& c) { return c.kind == kind; }));
}

std::size_t PropertyReport::holding(const std::string& kind) const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [&](const PropertyCheck& c) { return c.kind == kind && c.holds; }));
}

double PropertyReport::fraction(const std::string& kind) const {
  const auto n = count(kind);
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(holding(kind)) / n;
}

PropertyReport check_rate_properties(std::span<const SurfacePoint> surface) {
  std::map<std::vector<long long>, const SurfacePoint*> index;
  for (const auto& p : surface) index[grid_key(p.s, p.y)] = &p;
  auto lookup = [&](double s, std::span<const double> y) -> const SurfacePoint* {
    auto it = index.find(grid_key(s, y));
    return it == index.end() ? nullptr : it->second;
  };
  auto finite = [](const SurfacePoint* p) { return p && std::isfinite(p->value) && std::isfinite(p->sigma); };
  auto is_origin = [](const SurfacePoint& p) { return p.s == 0.0 && linf(p.y) == 0.0; };

  PropertyReport out;
  for (const auto& p : surface) {
    if (!finite(&p) || is_origin(p)) continue;
    std::vector<double> y2(p.y);
    for (auto& c : y2) c *= 2.0;
    if (const auto* q = lookup(2.0 * p.s, y2); finite(q)) {
      PropertyCheck c;
      c.kind = "homogeneity";
      c.a = with_y(p.s, p.y);
      c.b = with_y(q->s, q->y);
      c.lhs = q->value;
      c.rhs = 2.0 * p.value;
      c.sigma = std::sqrt(q->sigma * q->sigma + 4.0 * p.sigma * p.sigma);
      c.holds = std::abs(c.lhs - c.rhs) <= 3.0 * c.sigma + 1e-12;
      out.checks.push_back(std::move(c));
    }
    std::vector<double> zero(p.y.size(), 0.0);
    if (const auto* q = lookup(2.0 * p.s, zero); finite(q)) {
      PropertyCheck c;
      c.kind = "center";
      c.a = with_y(p.s, p.y);
      c.b = with_y(q->s, q->y);
      c.lhs = q->value;
      c.rhs = 2.0 * p.value;
      c.sigma = std::sqrt(q->sigma * q->sigma + 4.0 * p.sigma * p.sigma);
      c.holds = c.lhs <= c.rhs + 3.0 * c.sigma + 1e-12;
      out.checks.push_back(std::move(c));
    }
  }
  for (std::size_t i = 0; i < surface.size(); ++i) {
    for (std::size_t j = i + 1; j < surface.size(); ++j) {
      const auto& p = surface[i];
      const auto& q = surface[j];
      if (!finite(&p) || !finite(&q)) continue;
      std::vector<double> ym(p.y.size());
      for (std::size_t k = 0; k < ym.size(); ++k) ym[k] = 0.5 * (p.y[k] + q.y[k]);
      const auto* m = lookup(0.5 * (p.s + q.s), ym);
      if (!finite(m) || m == &p || m == &q) continue;
      PropertyCheck c;
      c.kind = "convexity";
      c.a = with_y(p.s, p.y);
      c.b = with_y(q.s, q.y);
      c.c = with_y(m->s, m->y);
      c.lhs = m->value;
      c.rhs = 0.5 * (p.value + q.value);
      c.sigma = std::sqrt(m->sigma * m->sigma + 0.25 * (p.sigma * p.sigma + q.sigma * q.sigma));
      c.holds = c.lhs <= c.rhs + 3.0 * c.sigma + 1e-12;
      out.checks.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<UpperTailCutRow> upper_tail_vs_cutpoint_experiment(const UpperTailCutConfig& config) {
  check_common(config.d, config.p, config.n_grid);
  if (!(config.mu_hat > 0.0) || !(config.xi >= 0.0) || !(config.s >= 0.0))
    throw std::invalid_argument("need mu_hat > 0, xi >= 0, s >= 0");
  std::vector<UpperTailCutRow> rows;
  enum : std::uint8_t { kUnknown = 0, kBoth, kTailOnly, kCutOnly, kNeither };
  for (auto n : config.n_grid) {
    const int radius = ceil_int(config.box_factor * static_cast<double>(n)) + static_cast<int>(n) + 1;
    const auto geometry = make_geometry(BoxSpec{config.d, radius, {}});
    const Point zero(config.d, 0);
    Point target(config.d, 0);
    target[0] = static_cast<int>(n);
    const VertexId t_id = geometry->vertex(target);
    const auto t_min = static_cast<std::uint32_t>(ceil_product(config.s, n));
    const double threshold = config.mu_hat * (1.0 + config.xi) * static_cast<double>(n);
    const auto base = stream_seed(config.mc.seed, static_cast<std::uint64_t>(n));
    auto result = run_parallel<std::uint8_t>(
        config.mc.replicates,
        [&](std::size_t r) -> std::uint8_t {
          const auto sample = sample_configuration(geometry, config.p, replicate_seed(base, r));
          const auto ball = grow_ball(sample, zero);
          const auto tail = upper_tail_event(ball, t_id, threshold).outcome;
          if (tail == Outcome::contaminated) return kUnknown;
          const auto last = static_cast<std::uint32_t>(ball.layer_count() - 1);
          const auto end = std::min(last, ball.certified_through());
          bool cut = false;
          for (std::uint32_t t = t_min; t <= end && !cut; ++t) cut = ball.layer_size(t) == 1;
          if (!cut && end < last) return kUnknown;
          const bool hit = tail == Outcome::hit;
          return hit ? (cut ? kBoth : kTailOnly) : (cut ? kCutOnly : kNeither);
        },
        parallel_options(config.mc));
    UpperTailCutRow row;
    row.n = n;
    for (auto v : result.results) {
      ++row.replicates;
      switch (v) {
        case kUnknown: ++row.contaminated; break;
        case kBoth: ++row.both; break;
        case kTailOnly: ++row.tail_only; break;
        case kCutOnly: ++row.cut_only; break;
        default: ++row.neither; break;
      }
    }
    row.cut_given_tail = wilson_interval(row.both, row.both + row.tail_only);
    row.tail_given_cut = wilson_interval(row.both, row.both + row.cut_only);
    rows.push_back(row);
    if (result.partial) throw std::runtime_error("upper tail experiment failed: " + result.error);
  }
  return rows;
}

SlabComparison slab_vs_point_experiment(const SlabComparisonConfig& config) {
  check_common(config.d, config.p, {config.slab.n});
  SlabComparison out;
  out.box_radius = slab_box_radius(config.d, config.slab);
  const auto geometry = make_geometry(BoxSpec{config.d, out.box_radius, {}});
  struct Rep {
    Outcome box;
    Outcome point;
  };
  auto result = run_parallel<Rep>(
      config.mc.replicates,
      [&](std::size_t r) {
        const auto sample = sample_configuration(geometry, config.p, replicate_seed(config.mc.seed, r));
        const auto slab = slab_experiment(sample, config.slab);
        const auto it = std::find_if(slab.slabs.begin(), slab.slabs.end(), [](const SlabRecord& s) {
          return std::all_of(s.offset.begin(), s.offset.end(), [](int c) { return c == 0; });
        });
        if (it == slab.slabs.end()) throw std::logic_error("central slab missing");
        const auto point = upper_tail_event(sample, config.slab.n, config.slab.xi, config.slab.mu_hat);
        return Rep{it->outcome, point.outcome};
      },
      parallel_options(config.mc));
  if (result.partial) throw std::runtime_error("slab experiment failed: " + result.error);
  out.rho = config.slab.rho ? *config.slab.rho
                            : std::max(1, static_cast<int>(std::floor(10.0 * config.d * config.slab.mu_hat)));
  for (const auto& rep : result.results) {
    out.box_to_box.add(rep.box);
    out.point_to_point.add(rep.point);
    if (rep.box == Outcome::contaminated || rep.point == Outcome::contaminated) continue;
    ++out.paired;
    out.difference.add((rep.point == Outcome::hit ? 1.0 : 0.0) - (rep.box == Outcome::hit ? 1.0 : 0.0));
  }
  const double m = out.difference.mean;
  const double se = out.paired > 1 ? out.difference.std_error() : 0.0;
  if (out.paired > 0 && m - 3.0 * se > 0.0)
    out.verdict = "separated";
  else if (out.paired > 0 && m + 3.0 * se < 0.0)
    out.verdict = "reversed";
  else
    out.verdict = "indistinguishable";
  return out;
}

void write_mu_csv(std::ostream& out, const MuEstimate& e) {
  CsvWriter csv(out, "mu", {"x", "n", "replicates", "connected", "disconnected", "contaminated", "mean", "std_error",
                            "ci_lo", "ci_hi", "min_ratio", "l1_floor", "below_l1"});
  for (const auto& r : e.rows)
    csv.row({format_vector(e.x), std::to_string(r.n), std::to_string(r.replicates), std::to_string(r.connected),
             std::to_string(r.disconnected), std::to_string(r.contaminated), format_real(r.ratio.mean),
             format_real(r.connected ? r.ratio.std_error() : kInf), format_real(r.ci.lo), format_real(r.ci.hi),
             format_real(r.ratio.min), format_real(r.l1_floor), std::to_string(r.below_l1)});
  if (e.partial) csv.mark_partial(e.warnings.empty() ? "worker failure" : e.warnings.back());
}

void write_rate_csv(std::ostream& out, const RateSurface& s) {
  CsvWriter csv(out, "rate",
                {"event", "n", "level", "x", "replicates", "hits", "misses", "disconnected", "contaminated", "p_hat",
                 "p_lo", "p_hi", "rate", "rate_sigma", "rate_lo", "rate_hi", "one_sided"});
  for (const auto& e : s.estimates)
    csv.row({e.event, std::to_string(e.n), format_real(e.level), format_vector(e.x),
             std::to_string(e.tally.replicates), std::to_string(e.tally.hits), std::to_string(e.tally.misses),
             std::to_string(e.tally.disconnected), std::to_string(e.tally.contaminated), format_real(e.p_hat),
             format_real(e.p_ci.lo), format_real(e.p_ci.hi), format_real(e.rate), format_real(e.rate_sigma),
             format_real(e.rate_ci.lo), format_real(e.rate_ci.hi), e.one_sided ? "1" : "0"});
  if (s.partial) csv.mark_partial(s.error);
}

void write_subadditivity_csv(std::ostream& out, const RateSurface& s) {
  CsvWriter csv(out, "subadditivity", {"level", "x", "n", "m", "defect", "sigma", "reference"});
  for (const auto& r : s.subadditivity)
    csv.row({format_real(r.level), format_vector(r.x), std::to_string(r.n), std::to_string(r.m),
             format_real(r.defect), format_real(r.sigma), format_real(r.reference)});
}

void write_upper_tail_cut_csv(std::ostream& out, std::span<const UpperTailCutRow> rows) {
  CsvWriter csv(out, "upper_tail_cut",
                {"n", "replicates", "contaminated", "both", "tail_only", "cut_only", "neither", "cut_given_tail_lo",
                 "cut_given_tail_hi", "tail_given_cut_lo", "tail_given_cut_hi"});
  for (const auto& r : rows)
    csv.row({std::to_string(r.n), std::to_string(r.replicates), std::to_string(r.contaminated),
             std::to_string(r.both), std::to_string(r.tail_only), std::to_string(r.cut_only),
             std::to_string(r.neither), format_real(r.cut_given_tail.lo), format_real(r.cut_given_tail.hi),
             format_real(r.tail_given_cut.lo), format_real(r.tail_given_cut.hi)});
}

void write_slab_comparison_csv(std::ostream& out, const SlabComparisonConfig& config, const SlabComparison& c) {
  CsvWriter csv(out, "slab_comparison",
                {"d", "p", "n", "epsilon", "xi", "mu_hat", "rho", "box_radius", "replicates", "box_hits",
                 "box_contaminated", "point_hits", "point_disconnected", "point_contaminated", "paired",
                 "mean_difference", "difference_se", "verdict"});
  const auto& s = config.slab;
  csv.row({std::to_string(config.d), format_real(config.p), std::to_string(s.n), format_real(s.epsilon),
           format_real(s.xi), format_real(s.mu_hat), std::to_string(c.rho), std::to_string(c.box_radius),
           std::to_string(c.box_to_box.replicates), std::to_string(c.box_to_box.hits),
           std::to_string(c.box_to_box.contaminated), std::to_string(c.point_to_point.hits),
           std::to_string(c.point_to_point.disconnected), std::to_string(c.point_to_point.contaminated),
           std::to_string(c.paired), format_real(c.difference.mean),
           format_real(c.paired > 1 ? c.difference.std_error() : 0.0), c.verdict});
}

void write_j_csv(std::ostream& out, std::span<const JRow> rows) {
  CsvWriter csv(out, "j", {"xi", "J", "s", "y", "slack", "feasible", "compact_range", "covers_compact_range"});
  for (const auto& r : rows)
    csv.row({format_real(r.xi), format_real(r.result.value), format_real(r.result.s), format_vector(r.result.y),
             format_real(r.result.slack), std::to_string(r.result.feasible), format_real(r.result.compact_range),
             r.result.covers_compact_range ? "1" : "0"});
}

std::vector<RateEstimate> read_rate_csv(std::istream& in) {
  std::vector<RateEstimate> out;
  std::string line;
  bool header = false, partial = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# partial", 0) == 0) partial = true;
      continue;
    }
    const auto cells = split_list(line, ',');
    if (!header) {
      if (cells.size() != 17 || cells[0] != "event" || cells[3] != "x")
        throw std::invalid_argument("not a rate table: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    if (cells.size() != 17) throw std::invalid_argument("rate table row has wrong width: '" + line + "'");
    RateEstimate e;
    e.event = cells[0];
    e.n = parse_integer(cells[1], "n");
    e.level = parse_real(cells[2], "level");
    for (const auto& c : split_list(cells[3], ';')) e.x.push_back(parse_real(c, "x"));
    auto count = [](const std::string& c, const char* what) {
      const auto v = parse_integer(c, what);
      if (v < 0) throw std::invalid_argument(std::string(what) + " must be >= 0");
      return static_cast<std::uint64_t>(v);
    };
    e.tally.replicates = count(cells[4], "replicates");
    e.tally.hits = count(cells[5], "hits");
    e.tally.misses = count(cells[6], "misses");
    e.tally.disconnected = count(cells[7], "disconnected");
    e.tally.contaminated = count(cells[8], "contaminated");
    finalize_rate(e);
    out.push_back(std::move(e));
  }
  if (!header) throw std::invalid_argument("rate table is empty");
  if (partial)
    for (auto& e : out) e.partial = true;
  return out;
}

}  // namespace perclab
