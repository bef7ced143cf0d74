#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sjlt {

/// Stafford's variant 13 of the MurmurHash3 finalizer (the SplitMix64 output
/// function). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent streams carved out of one master seed.
enum class DomainTag : std::uint32_t {
  kPhiSigns = 1,
  kPhiBuckets = 2,
  kHgSigns = 3,
  kHgBuckets = 4,
  kHadamardDiagonal = 5,
  kL1Gaussians = 6,
  kL1Buckets = 7,
  kSketchSigns = 8,
  kSketchBuckets = 9,
  // Test vectors and trial schedules.
  kVectorDraw = 64,
  kTrialSchedule = 65,
};

/// Deterministic per-index random stream keyed by (master_seed, domain_tag).
///
/// value(j) is SplitMix64 evaluated at position j of a stream whose start and
/// increment are both derived from the key, so any index can be evaluated in
/// O(1) with no state. This is a pseudorandom stand-in for fully independent
/// random functions; it carries no cryptographic or k-wise guarantees.
class SeededSource {
 public:
  constexpr SeededSource() : SeededSource(0, 0) {}

  constexpr SeededSource(std::uint64_t master_seed, std::uint32_t domain_tag)
      : master_seed_(master_seed),
        domain_tag_(domain_tag),
        start_(mix64(master_seed ^ mix64(0x6a09e667f3bcc909ULL + domain_tag))),
        gamma_(mix64(start_ ^ 0xbb67ae8584caa73bULL) | 1ULL) {}

  constexpr SeededSource(std::uint64_t master_seed, DomainTag tag)
      : SeededSource(master_seed, static_cast<std::uint32_t>(tag)) {}

  constexpr std::uint64_t master_seed() const { return master_seed_; }
  constexpr std::uint32_t domain_tag() const { return domain_tag_; }

  /// Raw mixed 64-bit word for index j.
  constexpr std::uint64_t word_at(std::uint64_t j) const { return mix64(start_ + (j + 1) * gamma_); }

  /// +1 or -1 from the top bit. Branch-free: the bit is a coin flip.
  constexpr int sign_at(std::uint64_t j) const { return 1 - 2 * static_cast<int>(word_at(j) >> 63); }

  /// Bucket in [0, k) via the high half of a 64x64->128 product (no modulo bias).
  constexpr std::uint64_t bucket_at(std::uint64_t j, std::uint64_t k) const {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(word_at(j)) * k) >> 64);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform_at(std::uint64_t j) const {
    return static_cast<double>(word_at(j) >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller on two words derived from index j.
  double gaussian_at(std::uint64_t j) const {
    const std::uint64_t w = word_at(j);
    const std::uint64_t w2 = mix64(w ^ 0x3c6ef372fe94f82bULL);
    const double u1 = static_cast<double>((w >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;       // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr bool operator==(const SeededSource& o) const {
    return master_seed_ == o.master_seed_ && domain_tag_ == o.domain_tag_;
  }

 private:
  std::uint64_t master_seed_;
  std::uint32_t domain_tag_;
  std::uint64_t start_;
  std::uint64_t gamma_;
};

/// Seed for trial t of a schedule; independent of execution order.
constexpr std::uint64_t trial_seed(std::uint64_t schedule_seed, std::uint64_t t) {
  return SeededSource(schedule_seed, DomainTag::kTrialSchedule).word_at(t);
}

}  // namespace sjlt
