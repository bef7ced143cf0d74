#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sjlt/randomness.hpp"

namespace sjlt {
namespace {

constexpr std::uint64_t kN = 1'000'000;

TEST(SeededSource, Deterministic) {
  const SeededSource a(42, DomainTag::kPhiSigns);
  const SeededSource b(42, DomainTag::kPhiSigns);
  for (std::uint64_t j : {0ULL, 1ULL, 17ULL, 1ULL << 40, ~0ULL - 1}) {
    EXPECT_EQ(a.sign_at(j), b.sign_at(j));
    EXPECT_EQ(a.bucket_at(j, 97), b.bucket_at(j, 97));
    EXPECT_EQ(a.gaussian_at(j), b.gaussian_at(j));
    EXPECT_EQ(a.sign_at(j), a.sign_at(j));
  }
}

TEST(SeededSource, SignIsBalanced) {
  const SeededSource src(7, DomainTag::kPhiSigns);
  std::uint64_t plus = 0;
  for (std::uint64_t j = 0; j < kN; ++j) {
    const int s = src.sign_at(j);
    ASSERT_TRUE(s == 1 || s == -1);
    plus += s == 1;
  }
  const double frac = static_cast<double>(plus) / kN;
  EXPECT_NEAR(frac, 0.5, 3.0 * 0.5 / std::sqrt(double(kN)));
}

TEST(SeededSource, SingletonBucket) {
  const SeededSource src(3, DomainTag::kPhiBuckets);
  for (std::uint64_t j = 0; j < 1000; ++j) EXPECT_EQ(src.bucket_at(j, 1), 0u);
}

TEST(SeededSource, BucketsNearUniform) {
  const SeededSource src(11, DomainTag::kPhiBuckets);
  constexpr std::uint64_t k = 16;
  std::vector<std::uint64_t> count(k, 0);
  for (std::uint64_t j = 0; j < kN; ++j) {
    const auto b = src.bucket_at(j, k);
    ASSERT_LT(b, k);
    ++count[b];
  }
  const double p = 1.0 / k;
  const double sd = std::sqrt(p * (1 - p) / kN);
  for (auto c : count) EXPECT_NEAR(static_cast<double>(c) / kN, p, 4 * sd);
}

TEST(SeededSource, GaussianMoments) {
  const SeededSource src(5, DomainTag::kL1Gaussians);
  double sum = 0, sum_abs = 0, sum_sq = 0;
  for (std::uint64_t j = 0; j < kN; ++j) {
    const double g = src.gaussian_at(j);
    ASSERT_TRUE(std::isfinite(g));
    sum += g;
    sum_abs += std::abs(g);
    sum_sq += g * g;
  }
  const double n = kN;
  EXPECT_NEAR(sum / n, 0.0, 3.0 / std::sqrt(n));
  const double beta0 = std::sqrt(2.0 / std::numbers::pi);
  EXPECT_NEAR(sum_abs / n, beta0, 3.0 * std::sqrt(1.0 - 2.0 / std::numbers::pi) / std::sqrt(n));
  // Var(g^2) = 2.
  EXPECT_NEAR(sum_sq / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(SeededSource, SignAndBucketStreamsUncorrelated) {
  const SeededSource signs(9, DomainTag::kPhiSigns);
  const SeededSource buckets(9, DomainTag::kPhiBuckets);
  // Correlate r_j with the bucket's parity bit, both +-1 with mean ~0.
  double s = 0;
  for (std::uint64_t j = 0; j < kN; ++j) {
    const int parity = (buckets.bucket_at(j, 2) == 0) ? 1 : -1;
    s += signs.sign_at(j) * parity;
  }
  EXPECT_NEAR(s / kN, 0.0, 3.0 / std::sqrt(double(kN)));
}

TEST(SeededSource, DistinctTagsAndSeedsDiffer) {
  const SeededSource a(1, DomainTag::kPhiSigns);
  const SeededSource b(1, DomainTag::kHgSigns);
  const SeededSource c(2, DomainTag::kPhiSigns);
  int same_ab = 0, same_ac = 0;
  for (std::uint64_t j = 0; j < 10000; ++j) {
    same_ab += a.word_at(j) == b.word_at(j);
    same_ac += a.word_at(j) == c.word_at(j);
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(TrialSeed, IndexedSchedule) {
  EXPECT_EQ(trial_seed(3, 10), trial_seed(3, 10));
  EXPECT_NE(trial_seed(3, 10), trial_seed(3, 11));
  EXPECT_NE(trial_seed(3, 10), trial_seed(4, 10));
}

}  // namespace
}  // namespace sjlt
