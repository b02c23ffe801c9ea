#include "hornforge/sparse_bool_matrix.hpp"

#include <algorithm>
#include <iterator>

#include "hornforge/error.hpp"

namespace hornforge {

SparseBoolMatrix::SparseBoolMatrix(std::size_t dim) : dim_(dim), offsets_(dim + 1, 0) {}

SparseBoolMatrix SparseBoolMatrix::from_coordinates(std::size_t dim, std::vector<Coordinate> coordinates) {
  std::sort(coordinates.begin(), coordinates.end());
  coordinates.erase(std::unique(coordinates.begin(), coordinates.end()), coordinates.end());
  SparseBoolMatrix m(dim);
  m.cols_.reserve(coordinates.size());
  for (const auto& [r, c] : coordinates) {
    if (r >= dim || c >= dim) throw Error("matrix coordinate out of range");
    ++m.offsets_[r + 1];
    m.cols_.push_back(c);
  }
  for (std::size_t i = 0; i < dim; ++i) m.offsets_[i + 1] += m.offsets_[i];
  return m;
}

SparseBoolMatrix SparseBoolMatrix::identity(std::size_t dim) {
  SparseBoolMatrix m(dim);
  m.cols_.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.cols_[i] = static_cast<Index>(i);
    m.offsets_[i + 1] = i + 1;
  }
  return m;
}

bool SparseBoolMatrix::contains(Index r, Index c) const {
  if (r >= dim_) return false;
  const auto cols = row(r);
  return std::binary_search(cols.begin(), cols.end(), c);
}

std::vector<SparseBoolMatrix::Coordinate> SparseBoolMatrix::coordinates() const {
  std::vector<Coordinate> out;
  out.reserve(nnz());
  for (Index r = 0; r < dim_; ++r) {
    for (Index c : row(r)) out.emplace_back(r, c);
  }
  return out;
}

SparseBoolMatrix SparseBoolMatrix::transpose() const {
  std::vector<Coordinate> flipped;
  flipped.reserve(nnz());
  for (Index r = 0; r < dim_; ++r) {
    for (Index c : row(r)) flipped.emplace_back(c, r);
  }
  return from_coordinates(dim_, std::move(flipped));
}

SparseBoolMatrix operator*(const SparseBoolMatrix& a, const SparseBoolMatrix& b) {
  if (a.dim_ != b.dim_) throw Error("matrix dimension mismatch");
  SparseBoolMatrix out(a.dim_);
  std::vector<SparseBoolMatrix::Index> merged;
  std::vector<SparseBoolMatrix::Index> scratch;
  for (SparseBoolMatrix::Index r = 0; r < a.dim_; ++r) {
    merged.clear();
    for (auto k : a.row(r)) {
      const auto next = b.row(k);
      scratch.clear();
      std::set_union(merged.begin(), merged.end(), next.begin(), next.end(), std::back_inserter(scratch));
      merged.swap(scratch);
    }
    out.cols_.insert(out.cols_.end(), merged.begin(), merged.end());
    out.offsets_[r + 1] = out.cols_.size();
  }
  return out;
}

SparseBoolMatrix operator&(const SparseBoolMatrix& a, const SparseBoolMatrix& b) {
  if (a.dim_ != b.dim_) throw Error("matrix dimension mismatch");
  SparseBoolMatrix out(a.dim_);
  for (SparseBoolMatrix::Index r = 0; r < a.dim_; ++r) {
    const auto x = a.row(r);
    const auto y = b.row(r);
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out.cols_));
    out.offsets_[r + 1] = out.cols_.size();
  }
  return out;
}

}  // namespace hornforge
