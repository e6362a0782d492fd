#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perclab/cutpoints.hpp"
#include "perclab/renorm.hpp"
#include "perclab/stats.hpp"

namespace perclab {

struct McOptions {
  std::uint64_t seed = 1;
  std::uint64_t replicates = 100;
  unsigned workers = 0;                // 0 means PERCLAB_WORKERS or 1
  std::optional<std::size_t> fail_at;  // fault injection for the harness tests
};

// Seed of an independent stream (one per n, say); replicate r then uses
// replicate_seed(stream_seed(seed, stream), r).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

// Numerical proxy for p_c(d) used to reject subcritical parameters.
double critical_probability_proxy(int d);

struct MuConfig {
  int d = 2;
  double p = 0.7;
  std::vector<double> x;  // direction; defaults to e1
  std::vector<std::int64_t> n_grid;
  double box_factor = 1.0;  // box radius ceil(n |x|_inf) + ceil(box_factor n) + 1
  McOptions mc;
};

struct MuRow {
  std::int64_t n = 0;
  std::uint64_t replicates = 0;
  std::uint64_t connected = 0;     // exact, finite distances used in the mean
  std::uint64_t disconnected = 0;
  std::uint64_t contaminated = 0;  // distance bound not exact
  RunningStats ratio;              // D(0, floor(n x)) / n over connected replicates
  Interval ci;                     // mean +- 1.96 se
  double l1_floor = 0.0;           // |floor(n x)|_1 / n, a per-replicate lower bound
  std::uint64_t below_l1 = 0;      // replicates violating the lower bound (always 0)
};

struct MuEstimate {
  std::vector<double> x;
  std::vector<MuRow> rows;
  double mu_hat = 0.0;
  double mu_se = 0.0;
  std::int64_t n_used = 0;
  bool trend_consistent = true;  // consecutive means never increase by more than 3 sigma
  bool partial = false;
  std::vector<std::string> warnings;
};

int mu_box_radius(std::int64_t n, std::span<const double> x, double box_factor);
MuEstimate estimate_mu(const MuConfig& config);

enum class EventKind { A, A_free, A_K, upper_tail };
std::string to_string(EventKind k);
EventKind parse_event_kind(const std::string& s);

struct RateConfig {
  EventKind kind = EventKind::A;
  int d = 2;
  double p = 0.7;
  std::vector<double> levels;            // s values, or xi values for the upper tail
  std::vector<std::vector<double>> xs;   // spatial rates; directions for the upper tail
  std::vector<std::int64_t> n_grid;
  std::optional<double> alpha;
  double K = 8.0;       // A_K: |exterior boundary| <= K n
  double mu_hat = 1.0;  // upper tail: mu(x)
  double box_factor = 3.0;
  McOptions mc;
};

struct SubadditivityRow {
  double level = 0.0;
  std::vector<double> x;
  std::int64_t n = 0, m = 0;
  double defect = 0.0;  // -log P(n+m) - (-log P(n) - log P(m))
  double sigma = 0.0;
  double reference = 0.0;  // (n+m)^alpha, the scale of the allowed defect
};

struct RateSurface {
  std::vector<RateEstimate> estimates;  // ordered by n, then x, then level
  std::vector<SubadditivityRow> subadditivity;
  bool partial = false;
  std::string error;
  const RateEstimate* find(std::int64_t n, double level, std::span<const double> x) const;
};

int event_box_radius(const RateConfig& config, std::int64_t n);
RateSurface estimate_event_rate(const RateConfig& config);

// Point of an estimated rate surface I(s, y)
struct SurfacePoint {
  double s = 0.0;
  std::vector<double> y;
  double value = 0.0;
  double sigma = 0.0;  // Monte Carlo standard error; inf when only a bound is known
};
std::vector<SurfacePoint> surface_from_rates(std::span<const RateEstimate> estimates, std::int64_t n);

struct JResult {
  double value = 0.0;
  double s = 0.0;
  std::vector<double> y;
  double slack = 0.0;            // s + mu(y - x) - (1 + xi) mu(x) at the argmin
  std::size_t feasible = 0;
  double compact_range = 0.0;    // R = J / I(1, 0) when I(1, 0) is on the grid
  bool covers_compact_range = false;
};

// Grid infimum of I over {s + mu(y - x) >= (1 + xi) mu(x)}. With mu_rel_error r
// the constraint uses the CI edge that enlarges the feasible set,
// s + (1 + r) mu(y - x) >= (1 + xi)(1 - r) mu(x), so the result never
// overstates J.
JResult estimate_J(std::span<const SurfacePoint> surface, std::span<const double> x, double xi, const Norm& mu,
                   double mu_rel_error = 0.0);

struct PropertyCheck {
  std::string kind;  // homogeneity, convexity, center
  std::vector<double> a, b, c;  // (s, y...) of the points involved
  double lhs = 0.0, rhs = 0.0, sigma = 0.0;
  bool holds = true;  // lhs <= rhs + 3 sigma (two-sided for homogeneity)
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  std::size_t count(const std::string& kind) const;
  std::size_t holding(const std::string& kind) const;
  double fraction(const std::string& kind) const;
};

PropertyReport check_rate_properties(std::span<const SurfacePoint> surface);

struct UpperTailCutConfig {
  int d = 2;
  double p = 0.7;
  double xi = 0.3;
  double s = 0.5;  // cut-point counts as late when t >= s n
  double mu_hat = 1.0;
  std::vector<std::int64_t> n_grid;
  double box_factor = 3.0;
  McOptions mc;
};

struct UpperTailCutRow {
  std::int64_t n = 0;
  std::uint64_t replicates = 0;
  std::uint64_t contaminated = 0;
  std::uint64_t both = 0, tail_only = 0, cut_only = 0, neither = 0;
  Interval cut_given_tail;  // Wilson CI of P(late cut-point | upper tail)
  Interval tail_given_cut;
};

std::vector<UpperTailCutRow> upper_tail_vs_cutpoint_experiment(const UpperTailCutConfig& config);

struct SlabComparisonConfig {
  int d = 3;
  double p = 0.7;
  SlabSpec slab;
  McOptions mc;
};

struct SlabComparison {
  Tally box_to_box;     // slab-constrained box-to-box distance above (mu + xi) n
  Tally point_to_point; // mu (1 + xi) n < D(0, n e1) < infinity
  std::uint64_t paired = 0;      // replicates resolved for both
  RunningStats difference;       // 1[point hit] - 1[box hit] over paired replicates
  std::string verdict;           // separated, indistinguishable, reversed
  int box_radius = 0;
  int rho = 0;
};

SlabComparison slab_vs_point_experiment(const SlabComparisonConfig& config);

void write_mu_csv(std::ostream& out, const MuEstimate& e);
void write_rate_csv(std::ostream& out, const RateSurface& s);
void write_subadditivity_csv(std::ostream& out, const RateSurface& s);
void write_upper_tail_cut_csv(std::ostream& out, std::span<const UpperTailCutRow> rows);
void write_slab_comparison_csv(std::ostream& out, const SlabComparisonConfig& config, const SlabComparison& c);

struct JRow {
  double xi = 0.0;
  JResult result;
};
void write_j_csv(std::ostream& out, std::span<const JRow> rows);

// Reads a table written by write_rate_csv; derived columns are recomputed
// from the tallies, so the estimates equal the ones that were written.
std::vector<RateEstimate> read_rate_csv(std::istream& in);

}  // namespace perclab
