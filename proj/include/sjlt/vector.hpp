#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sjlt/errors.hpp"

namespace sjlt {

struct SparseEntry {
  std::uint64_t index = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Coordinate list with an explicit dimension. Duplicate indices are allowed
/// and mean their values add.
struct SparseVector {
  std::uint64_t dim = 0;
  std::vector<SparseEntry> entries;

  SparseVector() = default;
  explicit SparseVector(std::uint64_t d) : dim(d) {}
  SparseVector(std::uint64_t d, std::vector<SparseEntry> e) : dim(d), entries(std::move(e)) {}

  static SparseVector basis(std::uint64_t d, std::uint64_t j, double v = 1.0) {
    return SparseVector(d, {{j, v}});
  }

  static SparseVector from_dense(std::span<const double> x) {
    SparseVector s(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] != 0.0) s.entries.push_back({j, x[j]});
    }
    return s;
  }

  void push(std::uint64_t j, double v) { entries.push_back({j, v}); }

  /// Entries with the same index merged, sorted by index, zeros dropped.
  SparseVector coalesced() const {
    SparseVector out(dim);
    std::vector<SparseEntry> sorted = entries;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
    for (const auto& e : sorted) {
      if (!out.entries.empty() && out.entries.back().index == e.index) {
        out.entries.back().value += e.value;
      } else {
        out.entries.push_back(e);
      }
    }
    std::erase_if(out.entries, [](const SparseEntry& e) { return e.value == 0.0; });
    return out;
  }

  std::vector<double> to_dense() const {
    std::vector<double> x(dim, 0.0);
    for (const auto& e : entries) x.at(e.index) += e.value;
    return x;
  }

  std::size_t nnz() const { return entries.size(); }
};

/// Sum of squares by pairwise summation; rounding error grows with log n
/// rather than n, which matters for replicated vectors of length c*d.
inline double sq_norm(std::span<const double> x) {
  constexpr std::size_t kLeaf = 256;
  if (x.size() <= kLeaf) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return sq_norm(x.first(half)) + sq_norm(x.subspan(half));
}

inline double inf_norm(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline void check_dim(std::uint64_t got, std::uint64_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace sjlt
