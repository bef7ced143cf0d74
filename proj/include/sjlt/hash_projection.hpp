#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjlt/errors.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

/// The single nonzero of a hash-matrix column.
struct Column {
  std::uint64_t row = 0;
  double value = 0.0;

  bool operator==(const Column&) const = default;
};

/// Column weights r_j in {+1, -1}.
struct RademacherWeights {
  SeededSource src;
  double operator()(std::uint64_t j) const { return static_cast<double>(src.sign_at(j)); }
};

/// Column weights r_j ~ N(0, 1).
struct GaussianWeights {
  SeededSource src;
  double operator()(std::uint64_t j) const { return src.gaussian_at(j); }
};

/// A k x dim matrix with exactly one nonzero per column, H_ij = [h(j) = i] r_j.
///
/// Never materialized; column j is recomputed from the seeded sources on demand.
template <typename Weights>
class BasicHashProjection {
 public:
  BasicHashProjection(std::uint64_t k, std::uint64_t dim, Weights weights, SeededSource bucket_src)
      : k_(k), dim_(dim), weights_(weights), bucket_src_(bucket_src) {
    if (k == 0) throw std::invalid_argument("hash projection needs k >= 1");
  }

  std::uint64_t rows() const { return k_; }
  std::uint64_t cols() const { return dim_; }
  std::uint64_t input_dim() const { return dim_; }
  std::uint64_t output_dim() const { return k_; }
  const Weights& weights() const { return weights_; }
  const SeededSource& bucket_source() const { return bucket_src_; }

  Column column_of(std::uint64_t j) const {
    if (j >= dim_) {
      throw std::out_of_range("column index " + std::to_string(j) + " out of range for dim " +
                              std::to_string(dim_));
    }
    return column_unchecked(j);
  }

  Column column_unchecked(std::uint64_t j) const {
    return {bucket_src_.bucket_at(j, k_), weights_(j)};
  }

  std::uint64_t bucket_of(std::uint64_t j) const { return bucket_src_.bucket_at(j, k_); }

  /// acc[row(j)] += r_j * v. acc must have length k.
  void scatter(std::uint64_t j, double v, std::span<double> acc) const {
    const Column col = column_of(j);
    acc[col.row] += col.value * v;
  }

  std::vector<double> apply(const SparseVector& x) const {
    check_dim(x.dim, dim_, "hash projection");
    std::vector<double> y(k_, 0.0);
    for (const auto& e : x.entries) scatter(e.index, e.value, y);
    return y;
  }

  std::vector<double> apply(std::span<const double> x) const {
    check_dim(x.size(), dim_, "hash projection");
    std::vector<double> y(k_, 0.0);
    for (std::uint64_t j = 0; j < x.size(); ++j) {
      const Column col = column_unchecked(j);
      y[col.row] += col.value * x[j];
    }
    return y;
  }

 private:
  std::uint64_t k_;
  std::uint64_t dim_;
  Weights weights_;
  SeededSource bucket_src_;
};

using HashProjection = BasicHashProjection<RademacherWeights>;
using GaussianHashProjection = BasicHashProjection<GaussianWeights>;

inline HashProjection make_hash_projection(std::uint64_t k, std::uint64_t dim, std::uint64_t seed,
                                           DomainTag sign_tag = DomainTag::kSketchSigns,
                                           DomainTag bucket_tag = DomainTag::kSketchBuckets) {
  return HashProjection(k, dim, RademacherWeights{SeededSource(seed, sign_tag)},
                        SeededSource(seed, bucket_tag));
}

/// Identity of a linear map a sketch accumulates; sketches merge only when equal.
struct ProjectionId {
  std::uint64_t seed = 0;
  std::uint64_t sign_seed = 0;
  std::uint64_t k = 0;
  std::uint64_t dim = 0;
  std::uint64_t replication = 1;
  std::uint32_t sign_tag = 0;
  std::uint32_t bucket_tag = 0;

  bool operator==(const ProjectionId&) const = default;
};

inline ProjectionId identity_of(const HashProjection& h) {
  return {h.bucket_source().master_seed(), h.weights().src.master_seed(), h.rows(), h.cols(), 1,
          h.weights().src.domain_tag(), h.bucket_source().domain_tag()};
}

/// Turnstile accumulator Y = T x for a linear hashing transform T.
///
/// T must provide output_dim(), input_dim(), scatter(j, v, acc) and an
/// identity_of(T) overload. The accumulator is exact up to floating-point
/// summation order.
template <typename Transform>
class Sketch {
 public:
  explicit Sketch(const Transform& t) : t_(&t), id_(identity_of(t)), acc_(t.output_dim(), 0.0) {}

  void update(std::uint64_t j, double delta) {
    if (j >= t_->input_dim()) {
      throw std::out_of_range("update index " + std::to_string(j) + " out of range for dim " +
                              std::to_string(t_->input_dim()));
    }
    t_->scatter(j, delta, acc_);
    ++update_count_;
  }

  /// Elementwise sum into *this.
  void merge(const Sketch& other) {
    if (!(other.id_ == id_)) throw IdentityMismatch("cannot merge sketches of different projections");
    for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i] += other.acc_[i];
    update_count_ += other.update_count_;
  }

  /// Overwrite state, e.g. after deserialization. Length must be k.
  void assign(std::vector<double> acc, std::uint64_t update_count) {
    check_dim(acc.size(), acc_.size(), "sketch accumulator");
    acc_ = std::move(acc);
    update_count_ = update_count;
  }

  double sq_norm() const { return sjlt::sq_norm(acc_); }
  const std::vector<double>& values() const { return acc_; }
  std::uint64_t update_count() const { return update_count_; }
  const ProjectionId& id() const { return id_; }
  const Transform& transform() const { return *t_; }

 private:
  const Transform* t_;
  ProjectionId id_;
  std::vector<double> acc_;
  std::uint64_t update_count_ = 0;
};

template <typename Transform>
Sketch<Transform> sketch_merge(const Sketch<Transform>& a, const Sketch<Transform>& b) {
  Sketch<Transform> out = a;
  out.merge(b);
  return out;
}

}  // namespace sjlt
