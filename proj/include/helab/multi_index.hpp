#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace helab {

inline constexpr int kMaxDimension = 4;

using IndexMask = std::uint8_t;

int binomial(int n, int k);

/// Increasing multi-indices of length p in {0..n-1}, in lexicographic order,
/// stored as bitmasks. `position(mask)` inverts `mask(i)`; it is -1 for masks
/// of the wrong length.
class MultiIndexTable {
 public:
  MultiIndexTable(int n, int p);

  int n() const { return n_; }
  int p() const { return p_; }
  int size() const { return static_cast<int>(masks_.size()); }
  IndexMask mask(int i) const { return masks_[i]; }
  int position(IndexMask mask) const { return position_[mask]; }
  std::vector<int> indices(int i) const;

 private:
  int n_;
  int p_;
  std::vector<IndexMask> masks_;
  std::array<int, 1 << kMaxDimension> position_{};
};

/// Cached table; valid for 0 <= p <= n <= kMaxDimension.
const MultiIndexTable& multi_index_table(int n, int p);

int popcount(IndexMask mask);

/// Sign of the shuffle that sorts the concatenation of the increasing
/// sequences `a` then `b`; zero when they overlap.
int merge_sign(IndexMask a, IndexMask b);

}  // namespace helab
