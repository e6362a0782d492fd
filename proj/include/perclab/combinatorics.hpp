#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Outcome of a self-verification routine: the lemma's conclusion as a
// numeric comparison (achieved vs bound) plus a pass flag.
struct LemmaCheck {
  bool pass = true;
  double bound = 0.0;
  double achieved = 0.0;
  std::string detail;
};

class PointSet {
 public:
  PointSet() = default;
  PointSet(int dimension, std::vector<Point> points);  // sorts and removes duplicates

  int dimension() const { return dimension_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  bool contains(const Point& x) const;

  int diam(int axis) const { return diam_[axis]; }
  int diam() const;

 private:
  int dimension_ = 0;
  std::vector<Point> points_;
  std::vector<int> diam_;
};

// P_i(S): S with coordinate i set to zero, duplicates removed
std::vector<Point> project(std::span<const Point> S, int axis);

struct ProjectionResult {
  int axis = 0;
  std::vector<Point> projection;
  bool from_case_analysis = true;  // false when the exhaustive fallback chose the axis
  LemmaCheck verify(std::size_t set_size) const;
};
ProjectionResult projection_best(const PointSet& S);

struct DistinctSubset {
  int axis_i = 0;
  int axis_j = 1;
  std::vector<Point> subset;
  bool used_matching_fallback = false;
  LemmaCheck verify(const PointSet& S) const;
};
// m(d, S) = (|S| / (2^{d-1} Diam S))^{1/(d-1)}; 1 when Diam S = 0
double distinct_subset_bound(const PointSet& S);
DistinctSubset distinct_coordinate_subset(const PointSet& S);

// Exact minimum-cost perfect assignment for a square cost matrix (Hungarian
// method with potentials); returns column assigned to each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

// Euclidean distance between the segments [p0,p1] and [q0,q1] in R^d
double segment_distance(std::span<const double> p0, std::span<const double> p1, std::span<const double> q0,
                        std::span<const double> q1);

struct SeparatedMatching {
  int axis = 0;
  int gap = 0;    // l
  int spread = 0; // K
  std::vector<Point> sources;
  std::vector<Point> targets;
  std::vector<std::size_t> sigma;  // sources[i] is matched with targets[sigma[i]]
  double cost = 0.0;
  double min_distance = 0.0;       // certified minimum pairwise segment distance
  double required() const;         // l / (sqrt(2) K)
  LemmaCheck verify() const;
};

// cost c(i, j) = sum_{k != axis} sqrt(K^2 + (x_k - y_k)^2), the projected lengths
// after stretching the axis direction from l to K
double matching_cost(const Point& x, const Point& y, int axis, int spread);
SeparatedMatching separated_matching(std::span<const Point> S1, std::span<const Point> S2, int spread,
                                     int axis = 0);
// Same hypotheses, assignment found by transposition descent from the identity.
SeparatedMatching two_swap_matching(std::span<const Point> S1, std::span<const Point> S2, int spread,
                                    int axis = 0);

struct PathBundle {
  std::vector<std::vector<Point>> paths;
  std::size_t max_length() const;
  std::map<Point, std::size_t> multiplicity() const;
  std::size_t max_multiplicity() const;
};

struct BundleGeometry {
  enum class Kind { parallel, perpendicular } kind = Kind::parallel;
  int axis_i = 0;
  int axis_j = 1;  // perpendicular only
  int gap = 1;     // l, parallel only
  int spread = 1;  // K
};

struct BundleResult {
  PathBundle bundle;
  std::vector<Point> starts;  // path k runs from starts[k] to ends[k]
  std::vector<Point> ends;
  double multiplicity_bound = 0.0;
  double length_bound = 0.0;
  std::size_t required_paths = 0;
  LemmaCheck verify(std::span<const Point> S1, std::span<const Point> S2) const;
};

double default_chi(int d);  // (2d)^{2d}
BundleResult disjoint_path_bundle(std::span<const Point> S1, std::span<const Point> S2, const BundleGeometry& g,
                                  std::optional<double> chi = {});

// Lattice path from x to y whose vertices stay within l_inf distance 1 of the segment [x, y].
std::vector<Point> staircase_path(const Point& x, const Point& y);
// l_inf distance from z to the segment [x, y]
double linf_distance_to_segment(const Point& z, const Point& x, const Point& y);

struct AxisAvoidingResult {
  PathBundle bundle;
  int n = 0;
  LemmaCheck verify(std::span<const Point> xs, std::span<const Point> ys) const;
};
AxisAvoidingResult axis_avoiding_paths(std::span<const Point> xs, std::span<const Point> ys);

struct ExteriorBoundary {
  std::vector<Point> boundary;
  std::vector<Point> interior;  // Int(Gamma)
  bool star_connected = false;
};
ExteriorBoundary exterior_boundary(std::span<const Point> gamma, const BoxSpec& ambient);
// ambient box chosen as the bounding box of gamma enlarged by 2
ExteriorBoundary exterior_boundary(std::span<const Point> gamma);
bool is_star_connected(std::span<const Point> S);
bool is_connected(std::span<const Point> S);

// Loomis-Whitney gives |Gamma| <= (|ext boundary| / 2)^{d/(d-1)}, so 1 is a safe default
inline constexpr double kDefaultKappa = 1.0;
LemmaCheck isoperimetry_check(std::size_t gamma_size, std::size_t boundary_size, int d,
                              double kappa = kDefaultKappa);

inline constexpr int kAnimalCap = 14;
// number of *-connected k-sets of Z^d containing a fixed site
std::uint64_t count_lattice_animals(int d, int k);
double animal_bound(int d, int k);  // 7^{dk}

}  // namespace perclab
