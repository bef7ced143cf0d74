#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "../support/test_util.hpp"
#include "sjlt/transforms.hpp"
#include "sjlt/verification.hpp"

namespace sjlt {
namespace {

using testing::max_abs_diff;
using testing::random_unit;
using testing::random_vector;

DenseMatrix hash_matrix(std::uint64_t k, std::uint64_t dim, std::uint64_t seed, DomainTag sign_tag,
                        DomainTag bucket_tag) {
  const SeededSource signs(seed, sign_tag);
  const SeededSource buckets(seed, bucket_tag);
  DenseMatrix m(k, dim);
  for (std::uint64_t j = 0; j < dim; ++j) m(buckets.bucket_at(j, k), j) = signs.sign_at(j);
  return m;
}

/// P_ij = 1/sqrt(c) when row i is one of column j's c slots (0-based: j*c <= i < (j+1)*c).
DenseMatrix replication_matrix(std::uint64_t c, std::uint64_t d) {
  DenseMatrix p(c * d, d);
  for (std::uint64_t i = 0; i < c * d; ++i)
    for (std::uint64_t j = 0; j < d; ++j) p(i, j) = (j * c <= i && i < (j + 1) * c) ? 1.0 / std::sqrt(double(c)) : 0.0;
  return p;
}

/// Block-diagonal G from F_ij = b^{-1/2} (-1)^{popcount(i & j)} and the diagonal signs.
DenseMatrix block_hadamard_matrix(std::uint64_t b, std::uint64_t d, std::uint64_t seed) {
  const SeededSource diag(seed, DomainTag::kHadamardDiagonal);
  const std::uint64_t padded = (d + b - 1) / b * b;
  DenseMatrix g(padded, d);
  const double s = 1.0 / std::sqrt(double(b));
  for (std::uint64_t i = 0; i < padded; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) {
      if (i / b != j / b) continue;
      const int parity = std::popcount((i % b) & (j % b)) % 2;
      g(i, j) = (parity == 0 ? s : -s) * diag.sign_at(j);
    }
  }
  return g;
}

TEST(PhiApply, ZeroInput) {
  const SparseJL t(8, 3, 20, 1);
  EXPECT_EQ(phi_apply(t, SparseVector(20)), std::vector<double>(8, 0.0));
  EXPECT_THROW(phi_apply(t, SparseVector(21)), DimensionError);
  EXPECT_THROW(phi_apply(t, SparseVector::basis(20, 20)), std::out_of_range);
}

TEST(PhiApply, BasisVectorNormFromReplicaBuckets) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SparseJL t(4, 3, 4, seed);
    const DenseMatrix phi = hash_matrix(4, 12, seed, DomainTag::kPhiSigns, DomainTag::kPhiBuckets)
                                .multiply(replication_matrix(3, 4));
    for (std::uint64_t j = 0; j < 4; ++j) {
      std::vector<double> per_row(4, 0.0);
      bool collided = false;
      std::vector<int> hits(4, 0);
      for (const Column& c : t.replicas_of(j)) {
        per_row[c.row] += c.value;
        collided |= ++hits[c.row] > 1;
      }
      const double want = sq_norm(per_row);
      const auto y = phi_apply(t, SparseVector::basis(4, j));
      EXPECT_NEAR(sq_norm(y), want, 1e-12);
      EXPECT_LE(max_abs_diff(y, phi.column(j)), 1e-12);
      if (!collided) {
        EXPECT_NEAR(sq_norm(y), 1.0, 1e-12);
      }
    }
  }
}

TEST(PhiApply, MatchesDenseOracle) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SparseJL t(16, 5, 64, seed);
    const DenseMatrix phi = hash_matrix(16, 320, seed, DomainTag::kPhiSigns, DomainTag::kPhiBuckets)
                                .multiply(replication_matrix(5, 64));
    const auto x = random_unit(64, rng);
    EXPECT_LE(max_abs_diff(phi_apply(t, std::span<const double>(x)), phi.multiply(x)), 1e-10);
    EXPECT_LE(max_abs_diff(phi_apply(t, SparseVector::from_dense(x)), phi.multiply(x)), 1e-10);
    // Fused application equals hashing the explicitly replicated vector.
    EXPECT_EQ(t.apply(SparseVector::from_dense(x)), t.h_prime().apply(t.plan().replicate(SparseVector::from_dense(x))));
  }
}

TEST(PhiApply, ColumnStructure) {
  const SparseJL t(16, 7, 40, 3);
  const DenseMatrix dense = dense_matrix_of(t);
  for (std::uint64_t j = 0; j < 40; ++j) {
    const auto reps = t.replicas_of(j);
    ASSERT_EQ(reps.size(), 7u);
    std::vector<double> col(16, 0.0);
    for (const auto& r : reps) {
      EXPECT_NEAR(std::abs(r.value), 1.0 / std::sqrt(7.0), 1e-15);
      col[r.row] += r.value;
    }
    EXPECT_LE(max_abs_diff(col, dense.column(j)), 1e-15);
  }
}

TEST(PhiApply, Linearity) {
  std::mt19937_64 rng(2);
  const SparseJL t(32, 9, 100, 4);
  for (int k = 0; k < 10; ++k) {
    const auto x = random_vector(100, rng);
    const auto y = random_vector(100, rng);
    const double a = 1.7, b = -0.3;
    std::vector<double> z(100);
    for (int j = 0; j < 100; ++j) z[j] = a * x[j] + b * y[j];
    auto tx = t.apply(std::span<const double>(x));
    const auto ty = t.apply(std::span<const double>(y));
    for (std::size_t i = 0; i < tx.size(); ++i) tx[i] = a * tx[i] + b * ty[i];
    EXPECT_LE(max_abs_diff(t.apply(std::span<const double>(z)), tx), 1e-10);
  }
}

TEST(HgApply, ZeroAndEnergy) {
  std::mt19937_64 rng(3);
  const HadamardJL t(8, 16, 100, 5);
  EXPECT_EQ(hg_apply(t, SparseVector(100)), std::vector<double>(8, 0.0));
  for (int k = 0; k < 10; ++k) {
    const auto x = random_vector(100, rng);
    EXPECT_NEAR(sq_norm(t.precondition(x)), sq_norm(x), 1e-12 * sq_norm(x));
  }
}

TEST(HgApply, MatchesDenseOracle) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const HadamardJL t(4, 4, 16, seed);
    const DenseMatrix hg = hash_matrix(4, 16, seed, DomainTag::kHgSigns, DomainTag::kHgBuckets)
                               .multiply(block_hadamard_matrix(4, 16, seed));
    const auto x = random_vector(16, rng);
    EXPECT_LE(max_abs_diff(hg_apply(t, std::span<const double>(x)), hg.multiply(x)), 1e-10);
    EXPECT_LE(max_abs_diff(hg_apply(t, SparseVector::from_dense(x)), hg.multiply(x)), 1e-10);
  }
  // Padding when b does not divide d.
  const HadamardJL t(8, 16, 50, 9);
  const DenseMatrix hg = hash_matrix(8, 64, 9, DomainTag::kHgSigns, DomainTag::kHgBuckets)
                             .multiply(block_hadamard_matrix(16, 50, 9));
  const auto x = random_vector(50, rng);
  EXPECT_LE(max_abs_diff(hg_apply(t, std::span<const double>(x)), hg.multiply(x)), 1e-10);
}

TEST(HgApply, SparseSkipsBlocksButAgreesWithDense) {
  std::mt19937_64 rng(5);
  const HadamardJL t(16, 64, 4096, 6);
  for (int k = 0; k < 10; ++k) {
    const SparseVector x = testing::random_sparse(4096, 1 + k, rng);
    EXPECT_EQ(t.apply(x), t.apply(std::span<const double>(x.to_dense())));
  }
}

TEST(HgApply, ConstructorEnforcesDimensionBound) {
  const JLParams small = derive_params(0.9, 0.09, 1000, 1);
  EXPECT_THROW(HadamardJL{small}, PreconditionError);
  const JLParams big = derive_params(0.9, 0.09, 131072, 1);
  ASSERT_TRUE(big.hadamard_admissible());
  EXPECT_NO_THROW(HadamardJL{big});
}

TEST(AutoApply, SparseInputTakesPhi) {
  const JLParams p = derive_params(0.9, 0.09, 1 << 20, 2);
  const SparseVector x = SparseVector::basis(p.d, 12345, 2.0);
  const AutoResult r = auto_apply(p, x);
  EXPECT_EQ(r.path, TransformPath::kPhi);
  EXPECT_FALSE(r.hg_unavailable);
  EXPECT_EQ(r.y, SparseJL(p).apply(x));
}

TEST(AutoApply, DenseInputTakesHg) {
  std::mt19937_64 rng(6);
  const JLParams p = derive_params(0.9, 0.09, 262144, 3);
  const auto xd = random_unit(p.d, rng);
  const SparseVector x = SparseVector::from_dense(xd);
  const AutoResult r = auto_apply(p, x);
  EXPECT_EQ(r.path, TransformPath::kHg);
  EXPECT_LT(r.hg_cost, r.phi_cost);
  EXPECT_EQ(r.y, HadamardJL(p).apply(x));
}

TEST(AutoApply, FallsBackWhenHgUnavailable) {
  std::mt19937_64 rng(7);
  const JLParams p = derive_params(0.9, 0.09, 512, 3);
  const SparseVector x = SparseVector::from_dense(random_unit(512, rng));
  const AutoResult r = auto_apply(p, x);
  EXPECT_EQ(r.path, TransformPath::kPhi);
  EXPECT_TRUE(r.hg_unavailable);
  EXPECT_EQ(r.y, SparseJL(p).apply(x));
}

TEST(L1Embed, ZeroAndHomogeneity) {
  std::mt19937_64 rng(8);
  const L1Embed t(12, 5, 30, 1, 1);
  EXPECT_EQ(l1_estimate(t, SparseVector(30)), 0.0);
  const auto x = random_unit(30, rng);
  std::vector<double> x2(x);
  for (double& v : x2) v *= 2;
  EXPECT_NEAR(l1_estimate(t, x2), 2 * l1_estimate(t, x), 1e-12);
  EXPECT_NEAR(L1Embed::beta0, std::sqrt(2.0 / std::numbers::pi), 1e-16);
}

TEST(L1Embed, SizingFromParams) {
  const JLParams p = derive_params(0.5, 0.05, 10, 1);
  const L1Embed t(p);
  EXPECT_EQ(t.k(), 144u);
  EXPECT_EQ(t.c(), 288u);
}

TEST(L1Embed, FixedBucketMeanAbsoluteRatio) {
  // Buckets fixed by one seed, Gaussian weights redrawn per trial.
  std::mt19937_64 rng(9);
  const auto x = random_unit(20, rng);
  const SparseVector xs = SparseVector::from_dense(x);
  const L1Embed ref(8, 4, 20, 77, 0);
  const auto sigmas = ref.bucket_sigmas(xs);
  std::uint64_t bucket = 0;
  while (sigmas[bucket] == 0.0) ++bucket;

  double sum_abs = 0, m1 = 0, m2 = 0, m4 = 0;
  constexpr int kTrials = 10000;
  for (int s = 0; s < kTrials; ++s) {
    const L1Embed t(8, 4, 20, 77, 1000 + s);
    const double y = t.project(xs)[bucket] / sigmas[bucket];
    sum_abs += std::abs(y);
    m1 += y;
    m2 += y * y;
    m4 += y * y * y * y;
  }
  EXPECT_NEAR(sum_abs / kTrials / L1Embed::beta0, 1.0, 0.02);
  const double mean = m1 / kTrials;
  const double var = m2 / kTrials - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.05);
  EXPECT_NEAR(var, 1.0, 0.05);
  EXPECT_NEAR((m4 / kTrials) / (var * var), 3.0, 0.25);
}

TEST(L1Embed, ConditionalMeanAtMostOne) {
  std::mt19937_64 rng(10);
  const auto x = SparseVector::from_dense(random_unit(40, rng));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const L1Embed t(16, 8, 40, s, s);
    EXPECT_LE(t.conditional_mean(x), 1.0 + 1e-12);
    double sq = 0;
    for (double v : t.bucket_sigmas(x)) sq += v * v;
    EXPECT_NEAR(sq, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace sjlt
