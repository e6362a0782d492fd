#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perclab/cutpoints.hpp"

namespace perclab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);

struct Tally {
  std::uint64_t replicates = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t disconnected = 0;
  std::uint64_t contaminated = 0;

  void add(Outcome o);
  Tally& operator+=(const Tally& o);
  bool operator==(const Tally&) const = default;
  // replicates whose outcome is known
  std::uint64_t resolved() const { return replicates - contaminated; }
  double p_hat() const;
};

// Streaming mean and variance (Welford), mergeable
struct RunningStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = 0.0;
  double max = 0.0;

  void add(double x);
  RunningStats& operator+=(const RunningStats& o);
  double variance() const;  // sample variance
  double stddev() const;
  double std_error() const;
};

struct RateEstimate {
  std::string event;
  double level = 0.0;     // s for cut-point events, xi for the upper tail
  std::vector<double> x;  // spatial rate or direction
  std::int64_t n = 0;
  Tally tally;
  double p_hat = 0.0;
  Interval p_ci;
  double rate = 0.0;        // -log(p_hat) / n
  double rate_sigma = 0.0;  // delta method
  Interval rate_ci;
  bool one_sided = false;   // no hits: only a lower bound on the rate is known
  bool partial = false;
};

// Fills the derived fields from the tally.
void finalize_rate(RateEstimate& r, double z = 1.96);

}  // namespace perclab
