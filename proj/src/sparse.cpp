#include "exem/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "exem/error.hpp"

namespace exem {

SparseVector SparseVector::from_entries(std::vector<SparseEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.id < b.id; });
  SparseVector out;
  out.entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!std::isfinite(e.weight)) {
      throw NumericalError("non-finite weight for feature " + std::to_string(e.id));
    }
    if (!out.entries_.empty() && out.entries_.back().id == e.id) {
      out.entries_.back().weight += e.weight;
    } else {
      out.entries_.push_back(e);
    }
  }
  std::erase_if(out.entries_, [](const SparseEntry& e) { return e.weight == 0.0; });
  return out;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<SparseEntry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) entries.push_back({static_cast<FeatureId>(i), dense[i]});
  }
  return from_entries(std::move(entries));
}

std::size_t SparseVector::extent() const noexcept {
  return entries_.empty() ? 0 : static_cast<std::size_t>(entries_.back().id) + 1;
}

double SparseVector::sum() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight;
  return s;
}

double SparseVector::l1_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += std::abs(e.weight);
  return s;
}

double SparseVector::l2_norm() const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * e.weight;
  return std::sqrt(s);
}

double SparseVector::dot(std::span<const double> dense) const noexcept {
  double s = 0.0;
  for (const auto& e : entries_) {
    if (e.id < dense.size()) s += e.weight * dense[e.id];
  }
  return s;
}

double SparseVector::dot(const SparseVector& other) const noexcept {
  double s = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->id < b->id) {
      ++a;
    } else if (b->id < a->id) {
      ++b;
    } else {
      s += a->weight * b->weight;
      ++a;
      ++b;
    }
  }
  return s;
}

SparseVector SparseVector::scaled(double factor) const {
  SparseVector out;
  out.entries_.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double w = e.weight * factor;
    if (w != 0.0) out.entries_.push_back({e.id, w});
  }
  return out;
}

std::vector<double> SparseVector::to_dense(std::size_t size) const {
  std::vector<double> dense(size, 0.0);
  for (const auto& e : entries_) {
    if (e.id < size) dense[e.id] = e.weight;
  }
  return dense;
}

}  // namespace exem
