#include "perclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perclab {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) out.lo = 0.0;
  if (successes == trials) out.hi = 1.0;
  return out;
}

void Tally::add(Outcome o) {
  ++replicates;
  switch (o) {
    case Outcome::hit:
      ++hits;
      break;
    case Outcome::miss:
      ++misses;
      break;
    case Outcome::disconnected:
      ++disconnected;
      break;
    case Outcome::contaminated:
      ++contaminated;
      break;
  }
}

Tally& Tally::operator+=(const Tally& o) {
  replicates += o.replicates;
  hits += o.hits;
  misses += o.misses;
  disconnected += o.disconnected;
  contaminated += o.contaminated;
  return *this;
}

double Tally::p_hat() const {
  const auto m = resolved();
  return m == 0 ? std::numeric_limits<double>::quiet_NaN() : static_cast<double>(hits) / static_cast<double>(m);
}

void RunningStats::add(double x) {
  if (count == 0) {
    min = max = x;
  } else {
    min = std::min(min, x);
    max = std::max(max, x);
  }
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

RunningStats& RunningStats::operator+=(const RunningStats& o) {
  if (o.count == 0) return *this;
  if (count == 0) {
    *this = o;
    return *this;
  }
  const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
  const double delta = o.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += o.m2 + delta * delta * na * nb / total;
  count += o.count;
  min = std::min(min, o.min);
  max = std::max(max, o.max);
  return *this;
}

double RunningStats::variance() const { return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1); }
double RunningStats::stddev() const { return std::sqrt(variance()); }
double RunningStats::std_error() const {
  return count == 0 ? std::numeric_limits<double>::infinity() : stddev() / std::sqrt(static_cast<double>(count));
}

void finalize_rate(RateEstimate& r, double z) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto m = r.tally.resolved();
  const auto n = static_cast<double>(r.n);
  r.p_ci = wilson_interval(r.tally.hits, m, z);
  if (m == 0) {
    r.p_hat = r.rate = r.rate_sigma = nan;
    r.rate_ci = {0.0, inf};
    r.one_sided = true;
    return;
  }
  r.p_hat = r.tally.p_hat();
  const auto to_rate = [n, inf](double p) { return p <= 0.0 ? inf : (p >= 1.0 ? 0.0 : -std::log(p) / n); };
  r.rate_ci = {to_rate(r.p_ci.hi), to_rate(r.p_ci.lo)};
  if (r.tally.hits == 0) {
    r.rate = inf;
    r.rate_sigma = inf;
    r.one_sided = true;
    return;
  }
  r.one_sided = false;
  r.rate = to_rate(r.p_hat);
  r.rate_sigma = std::sqrt((1.0 - r.p_hat) / (r.p_hat * static_cast<double>(m))) / n;
}

}  // namespace perclab
