#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hornforge {

/// Square {0,1} matrix stored as sorted per-row column lists (CSR without
/// values). Products clamp to 1, so they compute relational composition.
class SparseBoolMatrix {
 public:
  using Index = std::uint32_t;
  using Coordinate = std::pair<Index, Index>;

  SparseBoolMatrix() : SparseBoolMatrix(0) {}
  explicit SparseBoolMatrix(std::size_t dim);

  /// Duplicates are dropped; throws hornforge::Error on out-of-range entries.
  static SparseBoolMatrix from_coordinates(std::size_t dim, std::vector<Coordinate> coordinates);
  static SparseBoolMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return cols_.size(); }
  bool contains(Index row, Index col) const;
  std::span<const Index> row(Index r) const {
    return {cols_.data() + offsets_[r], cols_.data() + offsets_[r + 1]};
  }
  std::vector<Coordinate> coordinates() const;

  SparseBoolMatrix transpose() const;

  /// Boolean product: entry (i,j) is set iff some k has (i,k) in a and (k,j) in b.
  friend SparseBoolMatrix operator*(const SparseBoolMatrix& a, const SparseBoolMatrix& b);
  /// Element-wise AND.
  friend SparseBoolMatrix operator&(const SparseBoolMatrix& a, const SparseBoolMatrix& b);

  friend bool operator==(const SparseBoolMatrix&, const SparseBoolMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<std::size_t> offsets_;
  std::vector<Index> cols_;
};

}  // namespace hornforge
