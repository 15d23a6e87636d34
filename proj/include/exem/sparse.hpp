#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace exem {

using FeatureId = std::uint32_t;

struct SparseEntry {
  FeatureId id = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector with strictly increasing ids, no stored zeros and
/// finite weights.
class SparseVector {
 public:
  SparseVector() = default;

  /// Sorts by id, sums duplicate ids and drops zero weights.
  /// Throws NumericalError on a non-finite weight.
  static SparseVector from_entries(std::vector<SparseEntry> entries);

  /// Builds from a dense array, keeping nonzero coordinates.
  static SparseVector from_dense(std::span<const double> dense);

  std::span<const SparseEntry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// One past the largest stored id, 0 when empty.
  std::size_t extent() const noexcept;

  double sum() const noexcept;
  double l1_norm() const noexcept;
  double l2_norm() const noexcept;

  double dot(std::span<const double> dense) const noexcept;
  double dot(const SparseVector& other) const noexcept;

  /// Returns a copy with every weight multiplied by `factor`.
  SparseVector scaled(double factor) const;

  std::vector<double> to_dense(std::size_t size) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<SparseEntry> entries_;
};

}  // namespace exem
