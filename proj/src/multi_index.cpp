#include "helab/multi_index.hpp"

#include <bit>
#include <stdexcept>

namespace helab {

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

int popcount(IndexMask mask) { return std::popcount(static_cast<unsigned>(mask)); }

MultiIndexTable::MultiIndexTable(int n, int p) : n_(n), p_(p) {
  position_.fill(-1);
  // Lexicographic order on increasing tuples: enumerate by recursion on the
  // first element.
  std::vector<int> tuple(p);
  auto emit = [&](auto&& self, int depth, int start) -> void {
    if (depth == p) {
      IndexMask mask = 0;
      for (int j : tuple) mask |= static_cast<IndexMask>(1u << j);
      position_[mask] = static_cast<int>(masks_.size());
      masks_.push_back(mask);
      return;
    }
    for (int j = start; j < n; ++j) {
      tuple[depth] = j;
      self(self, depth + 1, j + 1);
    }
  };
  emit(emit, 0, 0);
}

std::vector<int> MultiIndexTable::indices(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (masks_[i] & (1u << j)) out.push_back(j);
  return out;
}

const MultiIndexTable& multi_index_table(int n, int p) {
  static const auto tables = [] {
    std::vector<std::vector<MultiIndexTable>> t;
    for (int n = 0; n <= kMaxDimension; ++n) {
      t.emplace_back();
      for (int p = 0; p <= n; ++p) t.back().emplace_back(n, p);
    }
    return t;
  }();
  if (n < 0 || n > kMaxDimension || p < 0 || p > n)
    throw std::out_of_range("multi_index_table: bad (n, p)");
  return tables[n][p];
}

int merge_sign(IndexMask a, IndexMask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int x = 0; x < 8; ++x) {
    if (!(a & (1u << x))) continue;
    // elements of b smaller than x must jump over x
    inversions += popcount(static_cast<IndexMask>(b & ((1u << x) - 1u)));
  }
  return (inversions % 2) ? -1 : 1;
}

}  // namespace helab
