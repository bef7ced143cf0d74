#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjlt/errors.hpp"
#include "sjlt/hash_projection.hpp"
#include "sjlt/params.hpp"
#include "sjlt/preconditioners.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

/// Phi = H' P: replicate each coordinate c times at scale 1/sqrt(c), then hash
/// the c*d replicated coordinates into k buckets with random signs.
///
/// Applying Phi costs c evaluations per nonzero of x; P x is never formed.
class SparseJL {
 public:
  explicit SparseJL(const JLParams& p) : SparseJL(p.k, p.c, p.d, p.seed) {}

  SparseJL(std::uint64_t k, std::uint64_t c, std::uint64_t d, std::uint64_t seed)
      : seed_(seed),
        plan_(c, d),
        h_prime_(k, c * d, RademacherWeights{SeededSource(seed, DomainTag::kPhiSigns)},
                 SeededSource(seed, DomainTag::kPhiBuckets)) {}

  std::uint64_t k() const { return h_prime_.rows(); }
  std::uint64_t c() const { return plan_.c(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t input_dim() const { return plan_.d(); }
  std::uint64_t output_dim() const { return h_prime_.rows(); }
  const ReplicationPlan& plan() const { return plan_; }
  const HashProjection& h_prime() const { return h_prime_; }

  /// The c (row, +-1/sqrt(c)) contributions of column j, one per replica, before
  /// replicas that share a row are summed.
  std::vector<Column> replicas_of(std::uint64_t j) const {
    check_index(j);
    std::vector<Column> out;
    out.reserve(plan_.c());
    for (std::uint64_t r = 0; r < plan_.c(); ++r) {
      Column col = h_prime_.column_unchecked(j * plan_.c() + r);
      col.value *= plan_.scale();
      out.push_back(col);
    }
    return out;
  }

  void scatter(std::uint64_t j, double v, std::span<double> acc) const {
    check_index(j);
    scatter_unchecked(j, v, acc);
  }

  std::vector<double> apply(const SparseVector& x) const {
    check_dim(x.dim, input_dim(), "sparse JL");
    std::vector<double> y(k(), 0.0);
    for (const auto& e : x.entries) scatter(e.index, e.value, y);
    return y;
  }

  std::vector<double> apply(std::span<const double> x) const {
    check_dim(x.size(), input_dim(), "sparse JL");
    std::vector<double> y(k(), 0.0);
    for (std::uint64_t j = 0; j < x.size(); ++j) {
      if (x[j] != 0.0) scatter_unchecked(j, x[j], y);
    }
    return y;
  }

 private:
  void check_index(std::uint64_t j) const {
    if (j >= input_dim()) {
      throw std::out_of_range("index " + std::to_string(j) + " out of range for dim " +
                              std::to_string(input_dim()));
    }
  }

  void scatter_unchecked(std::uint64_t j, double v, std::span<double> acc) const {
    const std::uint64_t c = plan_.c();
    const double scaled = v * plan_.scale();
    const std::uint64_t base = j * c;
    for (std::uint64_t r = 0; r < c; ++r) {
      const Column col = h_prime_.column_unchecked(base + r);
      acc[col.row] += col.value * scaled;
    }
  }

  std::uint64_t seed_;
  ReplicationPlan plan_;
  HashProjection h_prime_;
};

inline ProjectionId identity_of(const SparseJL& t) {
  return {t.seed(),
          t.seed(),
          t.k(),
          t.input_dim(),
          t.c(),
          static_cast<std::uint32_t>(DomainTag::kPhiSigns),
          static_cast<std::uint32_t>(DomainTag::kPhiBuckets)};
}

inline std::vector<double> phi_apply(const SparseJL& t, const SparseVector& x) { return t.apply(x); }
inline std::vector<double> phi_apply(const SparseJL& t, std::span<const double> x) { return t.apply(x); }

/// H G: block randomized Hadamard preconditioning followed by hashing of the
/// padded coordinates.
class HadamardJL {
 public:
  /// Refuses unless d > 6c ln(3c/delta).
  explicit HadamardJL(const JLParams& p) : HadamardJL(checked(p).k, p.b, p.d, p.seed) {}

  /// Unchecked assembly for arbitrary (k, b, d); used for small-instance tests.
  HadamardJL(std::uint64_t k, std::uint64_t b, std::uint64_t d, std::uint64_t seed)
      : seed_(seed),
        g_(b, d, SeededSource(seed, DomainTag::kHadamardDiagonal)),
        h_(k, g_.padded_dim(), RademacherWeights{SeededSource(seed, DomainTag::kHgSigns)},
           SeededSource(seed, DomainTag::kHgBuckets)) {}

  std::uint64_t k() const { return h_.rows(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t input_dim() const { return g_.input_dim(); }
  std::uint64_t output_dim() const { return h_.rows(); }
  const BlockHadamard& preconditioner() const { return g_; }
  const HashProjection& hash() const { return h_; }

  /// G x in the padded space.
  std::vector<double> precondition(std::span<const double> x) const { return g_.apply(x); }

  std::vector<double> apply(std::span<const double> x) const {
    const std::vector<double> gx = g_.apply(x);
    return h_.apply(std::span<const double>(gx));
  }

  /// Transforms and hashes only the blocks that hold a nonzero of x.
  std::vector<double> apply(const SparseVector& x) const {
    const BlockedVector gx = g_.apply_blocks(x);
    std::vector<double> y(k(), 0.0);
    const std::uint64_t b = gx.block_size;
    for (std::size_t t = 0; t < gx.blocks.size(); ++t) {
      const std::uint64_t base = gx.blocks[t] * b;
      for (std::uint64_t i = 0; i < b; ++i) {
        const Column col = h_.column_unchecked(base + i);
        y[col.row] += col.value * gx.data[t * b + i];
      }
    }
    return y;
  }

 private:
  static const JLParams& checked(const JLParams& p) {
    if (!p.hadamard_admissible()) {
      throw PreconditionError("hg path requires d > 6c ln(3c/delta) = " +
                              format_real(p.hadamard_threshold()) + ", got d=" + std::to_string(p.d));
    }
    return p;
  }

  std::uint64_t seed_;
  BlockHadamard g_;
  HashProjection h_;
};

inline std::vector<double> hg_apply(const HadamardJL& t, const SparseVector& x) { return t.apply(x); }
inline std::vector<double> hg_apply(const HadamardJL& t, std::span<const double> x) { return t.apply(x); }

/// Replication with c = ceil(k / epsilon) followed by hashing with Gaussian
/// column weights; the l1 norm of the output estimates the l2 norm of x.
class L1Embed {
 public:
  explicit L1Embed(const JLParams& p)
      : L1Embed(p.k, replication_for(p), p.d, p.seed, p.seed) {}

  /// bucket_seed drives h, gaussian_seed drives the weights; they may differ
  /// so that one can be held fixed while the other is redrawn.
  L1Embed(std::uint64_t k, std::uint64_t c, std::uint64_t d, std::uint64_t bucket_seed,
          std::uint64_t gaussian_seed)
      : plan_(c, d),
        h_(k, c * d, GaussianWeights{SeededSource(gaussian_seed, DomainTag::kL1Gaussians)},
           SeededSource(bucket_seed, DomainTag::kL1Buckets)) {}

  static std::uint64_t replication_for(const JLParams& p) {
    return static_cast<std::uint64_t>(std::ceil(static_cast<double>(p.k) / p.epsilon));
  }

  /// E|z| for z ~ N(0, 1).
  static constexpr double beta0 = std::numbers::sqrt2 * std::numbers::inv_sqrtpi;

  std::uint64_t k() const { return h_.rows(); }
  std::uint64_t c() const { return plan_.c(); }
  std::uint64_t input_dim() const { return plan_.d(); }
  std::uint64_t output_dim() const { return h_.rows(); }
  const ReplicationPlan& plan() const { return plan_; }
  const GaussianHashProjection& hash() const { return h_; }

  /// Y = H_gauss P x.
  std::vector<double> project(const SparseVector& x) const { return h_.apply(plan_.replicate(x)); }
  std::vector<double> project(std::span<const double> x) const {
    return project(SparseVector::from_dense(x));
  }

  /// (1 / (beta0 sqrt(k))) sum_i |Y_i|.
  double estimate(const SparseVector& x) const { return from_projection(project(x)); }
  double estimate(std::span<const double> x) const { return from_projection(project(x)); }

  /// sigma_i = sqrt(sum_{h(j)=i} (P x)_j^2) for the realized buckets.
  std::vector<double> bucket_sigmas(const SparseVector& x) const {
    BucketStats s = bucket_stats(h_, plan_.replicate(x), 0.0);
    for (double& v : s.sigmas) v = std::sqrt(v);
    return s.sigmas;
  }

  /// E_r[estimate] = (1/sqrt(k)) sum_i sigma_i for the realized buckets.
  double conditional_mean(const SparseVector& x) const {
    double s = 0.0;
    for (double v : bucket_sigmas(x)) s += v;
    return s / std::sqrt(static_cast<double>(k()));
  }

 private:
  double from_projection(const std::vector<double>& y) const {
    double s = 0.0;
    for (double v : y) s += std::abs(v);
    return s / (beta0 * std::sqrt(static_cast<double>(k())));
  }

  ReplicationPlan plan_;
  GaussianHashProjection h_;
};

inline double l1_estimate(const L1Embed& t, const SparseVector& x) { return t.estimate(x); }
inline double l1_estimate(const L1Embed& t, std::span<const double> x) { return t.estimate(x); }

enum class TransformPath { kPhi, kHg, kL1 };

inline const char* to_string(TransformPath p) {
  switch (p) {
    case TransformPath::kPhi: return "phi";
    case TransformPath::kHg: return "hg";
    case TransformPath::kL1: return "l1";
  }
  return "?";
}

struct AutoResult {
  std::vector<double> y;
  TransformPath path = TransformPath::kPhi;
  bool hg_unavailable = false;  // phi chosen because HG's dimension bound fails
  double phi_cost = 0.0;
  double hg_cost = 0.0;
};

/// Operation-count estimates for the two L2 paths on x.
inline double phi_cost(const JLParams& p, const SparseVector& x) {
  return static_cast<double>(p.c) * static_cast<double>(x.coalesced().nnz());
}

inline double hg_cost(const JLParams& p, const SparseVector& x) {
  std::vector<std::uint64_t> blocks;
  for (const auto& e : x.coalesced().entries) blocks.push_back(e.index / p.b);
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  const double b = static_cast<double>(p.b);
  const double log_b = static_cast<double>(std::bit_width(p.b) - 1);
  return static_cast<double>(blocks.size()) * b * (log_b + 1.0);
}

/// Runs whichever of phi / hg is cheaper for x, falling back to phi when hg
/// cannot be built for these parameters.
inline AutoResult auto_apply(const JLParams& p, const SparseVector& x) {
  check_dim(x.dim, p.d, "auto transform");
  AutoResult r;
  r.phi_cost = phi_cost(p, x);
  r.hg_cost = hg_cost(p, x);
  if (!p.hadamard_admissible()) {
    r.hg_unavailable = true;
    r.path = TransformPath::kPhi;
  } else {
    r.path = r.phi_cost < r.hg_cost ? TransformPath::kPhi : TransformPath::kHg;
  }
  r.y = r.path == TransformPath::kPhi ? SparseJL(p).apply(x) : HadamardJL(p).apply(x);
  return r;
}

}  // namespace sjlt
