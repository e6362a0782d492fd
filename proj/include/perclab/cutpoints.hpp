#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perclab/lattice.hpp"
#include "perclab/metric.hpp"

namespace perclab {

class ContaminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CutPointRecord {
  std::uint32_t time = 0;
  VertexId location = kNoVertex;
  bool operator==(const CutPointRecord&) const = default;
};

// floor(n^a), robust to floating error at exact integer powers
std::int64_t floor_pow(std::int64_t n, double a);
// ceil(s n), robust to floating error at exact products
std::int64_t ceil_product(double s, std::int64_t n);

struct EventSpec {
  double s = 0.0;
  std::vector<double> x;         // spatial rate, size d
  std::int64_t n = 1;
  std::optional<double> alpha;   // default 1 - 1/(6d)
  int window_multiplier = 1;     // window radius = multiplier * floor(n^alpha)
  int time_relax_multiplier = 0; // minimum time = ceil(s n) - multiplier * floor(n^alpha)

  static double default_alpha(int d) { return 1.0 - 1.0 / (6.0 * d); }
  double alpha_for(int d) const { return alpha.value_or(default_alpha(d)); }
  std::int64_t scale(int d) const { return floor_pow(n, alpha_for(d)); }
  std::int64_t window_radius(int d) const { return window_multiplier * scale(d); }
  std::int64_t min_time(int d) const;
  Point center() const;  // floor(n x)
  void validate(int d) const;
};

enum class Outcome { hit, miss, disconnected, contaminated };
std::string to_string(Outcome o);

struct EventResult {
  Outcome outcome = Outcome::miss;
  std::optional<CutPointRecord> witness;
  int line_axis = -1;   // A^free: axis i of the free line
  int plane_axis = -1;  // A^free: axis j of the thin hyperplane section
  bool hit() const { return outcome == Outcome::hit; }
};

// All t >= t_min (and <= t_max when given) with a single-vertex layer.
// Throws ContaminationError when the scanned range extends past the
// ball's certified range.
std::vector<CutPointRecord> detect_cutpoints(const BallGrowth& ball, std::uint32_t t_min,
                                             std::optional<std::uint32_t> t_max = {});

// The ball must be grown from the origin.
EventResult event_A(const BallGrowth& ball, const EventSpec& spec);
EventResult event_A(const PercolationSample& sample, const EventSpec& spec);

// A_{s,x}(n) with the additional requirement that the witness ball has
// exterior boundary of size at most K n.
EventResult event_A_K(const BallGrowth& ball, const EventSpec& spec, double K);

EventResult event_A_free(const BallGrowth& ball, const EventSpec& spec);
EventResult event_A_free(const PercolationSample& sample, const EventSpec& spec);

// number of distinct axis-parallel lines in direction `axis` meeting A
std::size_t line_count(std::span<const Point> A, int axis);
std::size_t line_count(const BoxGeometry& geometry, std::span<const VertexId> A, int axis);

struct SurgeryPlan {
  std::vector<EdgeId> edges_to_close;
  std::vector<EdgeId> edges_to_open;
  void validate() const;  // throws on overlap
};

PercolationSample apply_surgery(const PercolationSample& sample, const SurgeryPlan& plan);

struct ForcedCutPoint {
  SurgeryPlan plan;
  std::uint32_t thin_layer = 0;  // the layer r that was cut
  std::vector<VertexId> geodesic;
};

// Plan closing every edge off the geodesic to w that touches it from layer
// r on, plus every edge between layer r and B_{r-1}. r is the largest time in
// [max(1, t - ceil(sqrt k) + 1), t] with |layer r| <= floor(sqrt k).
ForcedCutPoint force_cutpoint(const PercolationSample& sample, const BallGrowth& ball, std::uint32_t t, VertexId w,
                              std::uint64_t k);

struct UpperTailResult {
  Outcome outcome = Outcome::miss;
  DistanceBound distance;
  double threshold = 0.0;
};

// mu_hat (1 + xi) n < D(0, floor(n x)) < infinity; x defaults to e_1
UpperTailResult upper_tail_event(const PercolationSample& sample, std::int64_t n, double xi, double mu_hat,
                                 std::span<const double> x = {});
UpperTailResult upper_tail_event(const BallGrowth& ball, VertexId target, double threshold);

}  // namespace perclab
