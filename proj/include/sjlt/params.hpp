#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sjlt/errors.hpp"
#include "sjlt/text.hpp"

namespace sjlt {

/// Every constant the sparse JL constructions need, derived from (epsilon, delta).
///
/// All logarithms are natural. Integer quantities are rounded up, and the
/// Hadamard block size is rounded up to a power of two.
struct JLParams {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
  std::uint64_t k = 0;
  std::uint64_t c = 0;
  double alpha = 0.0;
  double sigma_star_sq = 0.0;
  std::uint64_t b = 0;

  /// 6 c ln(3c/delta): the block size lower bound and the dimension threshold
  /// the block-Hadamard path requires (d must exceed it strictly).
  double hadamard_threshold() const {
    const double cd = static_cast<double>(c);
    return 6.0 * cd * std::log(3.0 * cd / delta);
  }

  bool hadamard_admissible() const { return static_cast<double>(d) > hadamard_threshold(); }

  bool operator==(const JLParams&) const = default;
};

namespace detail {

inline std::uint64_t ceil_to_u64(double v) { return static_cast<std::uint64_t>(std::ceil(v)); }

inline std::uint64_t next_pow2_at_least(double v) {
  std::uint64_t p = 1;
  while (static_cast<double>(p) < v) p <<= 1;
  return p;
}

}  // namespace detail

inline JLParams derive_params(double epsilon, double delta, std::uint64_t d, std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError("epsilon must satisfy 0 < epsilon < 1, got " + format_real(epsilon));
  }
  if (!(delta > 0.0 && delta < 0.1)) {
    throw ParameterError("delta must satisfy 0 < delta < 1/10, got " + format_real(delta));
  }
  if (d < 1) throw ParameterError("d must be at least 1");

  JLParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.d = d;
  p.seed = seed;
  const double log_inv_delta = std::log(1.0 / delta);
  p.k = detail::ceil_to_u64(12.0 / (epsilon * epsilon) * log_inv_delta);
  const double log_k_delta = std::log(static_cast<double>(p.k) / delta);
  p.c = detail::ceil_to_u64(16.0 / epsilon * log_inv_delta * log_k_delta * log_k_delta);
  p.alpha = 1.0 / (epsilon * log_k_delta);
  p.sigma_star_sq = (1.0 + p.alpha) / static_cast<double>(p.k);
  p.b = detail::next_pow2_at_least(p.hadamard_threshold());
  return p;
}

enum class WarningKind {
  kAlphaBelowThree,          // alpha < 3: the analysis assumes alpha >= 3
  kHadamardDimensionTooSmall,  // d <= 6c ln(3c/delta): HG cannot be built
  kDeltaNotBelowInvKSquared,   // delta >= 1/k^2
};

struct Warning {
  WarningKind kind;
  std::string message;

  bool operator==(const Warning&) const = default;
};

inline std::vector<Warning> validate_assumptions(const JLParams& p) {
  std::vector<Warning> out;
  if (p.alpha < 3.0) {
    out.push_back({WarningKind::kAlphaBelowThree,
                   "alpha=" + format_real(p.alpha) +
                       " is below 3; the distortion analysis assumes alpha >= 3"});
  }
  if (!p.hadamard_admissible()) {
    out.push_back({WarningKind::kHadamardDimensionTooSmall,
                   "d=" + std::to_string(p.d) + " does not exceed 6c ln(3c/delta)=" +
                       format_real(p.hadamard_threshold()) + "; the hg path is unavailable"});
  }
  const double kk = static_cast<double>(p.k);
  if (p.delta >= 1.0 / (kk * kk)) {
    out.push_back({WarningKind::kDeltaNotBelowInvKSquared,
                   "delta=" + format_real(p.delta) + " is not below 1/k^2=" +
                       format_real(1.0 / (kk * kk))});
  }
  return out;
}

/// `name=value` lines in field order.
inline std::string to_record(const JLParams& p) {
  std::string s;
  auto line = [&s](const char* name, const std::string& v) {
    s += name;
    s += '=';
    s += v;
    s += '\n';
  };
  line("epsilon", format_real(p.epsilon));
  line("delta", format_real(p.delta));
  line("d", std::to_string(p.d));
  line("seed", std::to_string(p.seed));
  line("k", std::to_string(p.k));
  line("c", std::to_string(p.c));
  line("alpha", format_real(p.alpha));
  line("sigma_star_sq", format_real(p.sigma_star_sq));
  line("b", std::to_string(p.b));
  return s;
}

}  // namespace sjlt
