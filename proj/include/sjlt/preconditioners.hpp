#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjlt/errors.hpp"
#include "sjlt/hash_projection.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

/// P in R^{cd x d}: coordinate j is copied to slots [j*c, (j+1)*c) scaled by 1/sqrt(c).
class ReplicationPlan {
 public:
  ReplicationPlan(std::uint64_t c, std::uint64_t d) : c_(c), d_(d), scale_(1.0 / std::sqrt(double(c))) {
    if (c == 0 || d == 0) throw std::invalid_argument("replication needs c >= 1 and d >= 1");
  }

  std::uint64_t c() const { return c_; }
  std::uint64_t d() const { return d_; }
  std::uint64_t input_dim() const { return d_; }
  std::uint64_t output_dim() const { return c_ * d_; }
  double scale() const { return scale_; }

  SparseVector replicate(const SparseVector& x) const {
    check_dim(x.dim, d_, "replication");
    SparseVector out(output_dim());
    out.entries.reserve(x.entries.size() * c_);
    for (const auto& e : x.entries) {
      const double v = e.value * scale_;
      for (std::uint64_t r = 0; r < c_; ++r) out.entries.push_back({e.index * c_ + r, v});
    }
    return out;
  }

  std::vector<double> replicate(std::span<const double> x) const {
    std::vector<double> out(output_dim());
    replicate_into(x, out);
    return out;
  }

  /// Writes P x into out (length c*d) without allocating.
  void replicate_into(std::span<const double> x, std::span<double> out) const {
    check_dim(x.size(), d_, "replication");
    check_dim(out.size(), output_dim(), "replication output");
    for (std::uint64_t j = 0; j < d_; ++j) {
      const double v = x[j] * scale_;
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(j * c_), c_, v);
    }
  }

  std::vector<double> apply(const SparseVector& x) const { return replicate(x).to_dense(); }

 private:
  std::uint64_t c_;
  std::uint64_t d_;
  double scale_;
};

/// z <- F z with F_ij = m^{-1/2} (-1)^{popcount(i & j)}, m = z.size() a power of two.
inline void fwht_in_place(std::span<double> z) {
  const std::size_t m = z.size();
  if (m == 0 || !std::has_single_bit(m)) {
    throw std::invalid_argument("fwht length must be a power of two, got " + std::to_string(m));
  }
  for (std::size_t h = 1; h < m; h <<= 1) {
    for (std::size_t i = 0; i < m; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = z[j];
        const double b = z[j + h];
        z[j] = a + b;
        z[j + h] = a - b;
      }
    }
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& v : z) v *= norm;
}

/// Output of the block-sparse Hadamard path: the full contents of every block
/// that held a nonzero, in increasing block order.
struct BlockedVector {
  std::uint64_t dim = 0;
  std::uint64_t block_size = 0;
  std::vector<std::uint64_t> blocks;
  std::vector<double> data;  // blocks.size() * block_size values

  SparseVector to_sparse() const {
    SparseVector s(dim);
    s.entries.reserve(data.size());
    for (std::size_t t = 0; t < blocks.size(); ++t) {
      for (std::uint64_t i = 0; i < block_size; ++i) {
        s.entries.push_back({blocks[t] * block_size + i, data[t * block_size + i]});
      }
    }
    return s;
  }

  std::vector<double> to_dense() const {
    std::vector<double> x(dim, 0.0);
    for (std::size_t t = 0; t < blocks.size(); ++t) {
      for (std::uint64_t i = 0; i < block_size; ++i) x[blocks[t] * block_size + i] = data[t * block_size + i];
    }
    return x;
  }
};

/// Block-diagonal G whose diagonal blocks are independent b x b randomized
/// Hadamard matrices F D_t. Inputs of dimension d are zero-padded to
/// num_blocks * b; outputs live in the padded space.
class BlockHadamard {
 public:
  BlockHadamard(std::uint64_t b, std::uint64_t d, SeededSource diag_src)
      : b_(b), d_(d), num_blocks_((d + b - 1) / (b == 0 ? 1 : b)), diag_src_(diag_src) {
    if (b == 0 || !std::has_single_bit(b)) {
      throw std::invalid_argument("hadamard block size must be a power of two, got " + std::to_string(b));
    }
    if (d == 0) throw std::invalid_argument("hadamard preconditioner needs d >= 1");
  }

  std::uint64_t block_size() const { return b_; }
  std::uint64_t num_blocks() const { return num_blocks_; }
  std::uint64_t padded_dim() const { return num_blocks_ * b_; }
  std::uint64_t input_dim() const { return d_; }
  std::uint64_t output_dim() const { return padded_dim(); }
  const SeededSource& diagonal_source() const { return diag_src_; }

  /// D entry for padded coordinate j (block j / b, offset j % b).
  int diagonal_at(std::uint64_t j) const { return diag_src_.sign_at(j); }

  /// Transforms every block.
  std::vector<double> apply(std::span<const double> x) const {
    check_dim(x.size(), d_, "block hadamard");
    std::vector<double> y(padded_dim(), 0.0);
    for (std::uint64_t j = 0; j < d_; ++j) y[j] = diagonal_at(j) * x[j];
    for (std::uint64_t t = 0; t < num_blocks_; ++t) {
      fwht_in_place(std::span<double>(y).subspan(t * b_, b_));
    }
    return y;
  }

  /// Transforms only blocks that contain a nonzero entry.
  BlockedVector apply_blocks(const SparseVector& x) const {
    check_dim(x.dim, d_, "block hadamard");
    BlockedVector out;
    out.dim = padded_dim();
    out.block_size = b_;
    for (const auto& e : x.entries) {
      if (e.index >= d_) throw std::out_of_range("index " + std::to_string(e.index) + " out of range");
      if (e.value != 0.0) out.blocks.push_back(e.index / b_);
    }
    std::sort(out.blocks.begin(), out.blocks.end());
    out.blocks.erase(std::unique(out.blocks.begin(), out.blocks.end()), out.blocks.end());

    out.data.assign(out.blocks.size() * b_, 0.0);
    for (const auto& e : x.entries) {
      if (e.value == 0.0) continue;
      const std::uint64_t blk = e.index / b_;
      const auto slot = static_cast<std::uint64_t>(
          std::lower_bound(out.blocks.begin(), out.blocks.end(), blk) - out.blocks.begin());
      out.data[slot * b_ + e.index % b_] += diagonal_at(e.index) * e.value;
    }
    for (std::size_t t = 0; t < out.blocks.size(); ++t) {
      fwht_in_place(std::span<double>(out.data).subspan(t * b_, b_));
    }
    return out;
  }

  std::vector<double> apply(const SparseVector& x) const { return apply_blocks(x).to_dense(); }

 private:
  std::uint64_t b_;
  std::uint64_t d_;
  std::uint64_t num_blocks_;
  SeededSource diag_src_;
};

/// Per-bucket mass sigma_i^2 = sum_{h(j)=i} x_j^2 and the goodness flags.
struct BucketStats {
  std::vector<double> sigmas;
  double sigma_star_sq = 0.0;
  std::vector<bool> good_flags;

  /// The hash is good when every bucket is.
  bool all_good() const {
    for (bool g : good_flags) {
      if (!g) return false;
    }
    return true;
  }

  std::size_t bad_count() const {
    std::size_t n = 0;
    for (bool g : good_flags) n += g ? 0 : 1;
    return n;
  }
};

template <typename Weights>
BucketStats bucket_stats(const BasicHashProjection<Weights>& h, std::span<const double> x,
                         double sigma_star_sq) {
  check_dim(x.size(), h.cols(), "bucket stats");
  BucketStats s;
  s.sigmas.assign(h.rows(), 0.0);
  s.sigma_star_sq = sigma_star_sq;
  for (std::uint64_t j = 0; j < x.size(); ++j) s.sigmas[h.bucket_of(j)] += x[j] * x[j];
  s.good_flags.resize(h.rows());
  for (std::size_t i = 0; i < s.sigmas.size(); ++i) s.good_flags[i] = s.sigmas[i] <= sigma_star_sq;
  return s;
}

template <typename Weights>
BucketStats bucket_stats(const BasicHashProjection<Weights>& h, const SparseVector& x,
                         double sigma_star_sq) {
  check_dim(x.dim, h.cols(), "bucket stats");
  BucketStats s;
  s.sigmas.assign(h.rows(), 0.0);
  s.sigma_star_sq = sigma_star_sq;
  // Duplicates must be summed before squaring.
  for (const auto& e : x.coalesced().entries) {
    if (e.index >= h.cols()) throw std::out_of_range("index " + std::to_string(e.index) + " out of range");
    s.sigmas[h.bucket_of(e.index)] += e.value * e.value;
  }
  s.good_flags.resize(h.rows());
  for (std::size_t i = 0; i < s.sigmas.size(); ++i) s.good_flags[i] = s.sigmas[i] <= sigma_star_sq;
  return s;
}

}  // namespace sjlt
