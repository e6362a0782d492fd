#include <cmath>
#include <vector>

#include "perclab/combinatorics.hpp"

namespace perclab {

namespace {

// Redelmeier's enumeration of fixed *-animals whose lexicographically least
// cell is the origin.
class Redelmeier {
 public:
  Redelmeier(int d, int k) : d_(d), k_(k) {
    side_ = 2 * k + 1;
    stride_.resize(d);
    std::size_t s = 1;
    for (int a = d - 1; a >= 0; --a) {
      stride_[a] = s;
      s *= side_;
    }
    total_ = s;
    origin_ = 0;
    for (int a = 0; a < d; ++a) origin_ += static_cast<std::size_t>(k) * stride_[a];
    // neighbor offsets of the *-adjacency
    std::vector<int> cur(d, -1);
    while (true) {
      long off = 0;
      bool zero = true;
      for (int a = 0; a < d; ++a) {
        off += cur[a] * static_cast<long>(stride_[a]);
        zero = zero && cur[a] == 0;
      }
      if (!zero) offsets_.push_back(off);
      int a = d - 1;
      while (a >= 0 && cur[a] == 1) cur[a--] = -1;
      if (a < 0) break;
      ++cur[a];
    }
    reached_.assign(total_, 0);
  }

  std::uint64_t run() {
    reached_[origin_] = 1;
    std::vector<std::size_t> untried{origin_};
    count_ = 0;
    recurse(untried, 0);
    return count_;
  }

 private:
  bool allowed(std::size_t cell) const {
    // inside the padded grid and lexicographically after the origin;
    // index order is lexicographic order, so compare indices
    if (cell <= origin_) return false;
    for (int a = 0; a < d_; ++a) {
      const auto c = (cell / stride_[a]) % side_;
      if (c == 0 || c + 1 == side_) return false;
    }
    return true;
  }

  void recurse(std::vector<std::size_t> untried, int size) {
    while (!untried.empty()) {
      const std::size_t cell = untried.back();
      untried.pop_back();
      if (size + 1 == k_) {
        ++count_;
        continue;
      }
      std::vector<std::size_t> fresh;
      for (long off : offsets_) {
        const auto n = static_cast<std::size_t>(static_cast<long>(cell) + off);
        if (n >= total_ || reached_[n] || !allowed(n)) continue;
        reached_[n] = 1;
        fresh.push_back(n);
      }
      std::vector<std::size_t> next = untried;
      next.insert(next.end(), fresh.begin(), fresh.end());
      recurse(std::move(next), size + 1);
      for (auto n : fresh) reached_[n] = 0;
    }
  }

  int d_, k_;
  std::size_t side_, total_, origin_;
  std::vector<std::size_t> stride_;
  std::vector<long> offsets_;
  std::vector<std::uint8_t> reached_;
  std::uint64_t count_ = 0;
};

}  // namespace

std::uint64_t count_lattice_animals(int d, int k) {
  if (d < 1 || k < 1) throw std::invalid_argument("lattice animals need d >= 1 and k >= 1");
  if (d * k > kAnimalCap) throw std::invalid_argument("lattice animal enumeration capped at d k <= 14");
  // each translation class has exactly k translates containing the site
  return Redelmeier(d, k).run() * static_cast<std::uint64_t>(k);
}

double animal_bound(int d, int k) { return std::pow(7.0, static_cast<double>(d) * k); }

}  // namespace perclab
