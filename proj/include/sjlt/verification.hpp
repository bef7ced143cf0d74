#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sjlt/errors.hpp"
#include "sjlt/hash_projection.hpp"
#include "sjlt/params.hpp"
#include "sjlt/preconditioners.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/text.hpp"
#include "sjlt/transforms.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

// ---------------------------------------------------------------------------
// Dense oracles
// ---------------------------------------------------------------------------

/// Row-major explicit matrix, only for small instances.
struct DenseMatrix {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::uint64_t r, std::uint64_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::uint64_t i, std::uint64_t j) { return data[i * cols + j]; }
  double operator()(std::uint64_t i, std::uint64_t j) const { return data[i * cols + j]; }

  std::vector<double> column(std::uint64_t j) const {
    std::vector<double> out(rows);
    for (std::uint64_t i = 0; i < rows; ++i) out[i] = (*this)(i, j);
    return out;
  }

  std::vector<double> multiply(std::span<const double> x) const {
    check_dim(x.size(), cols, "dense matrix");
    std::vector<double> y(rows, 0.0);
    for (std::uint64_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::uint64_t j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  DenseMatrix multiply(const DenseMatrix& rhs) const {
    check_dim(rhs.rows, cols, "dense matrix product");
    DenseMatrix out(rows, rhs.cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
      for (std::uint64_t l = 0; l < cols; ++l) {
        const double a = (*this)(i, l);
        if (a == 0.0) continue;
        for (std::uint64_t j = 0; j < rhs.cols; ++j) out(i, j) += a * rhs(l, j);
      }
    }
    return out;
  }
};

template <typename T>
concept LinearTransform = requires(const T& t, const SparseVector& x) {
  { t.input_dim() } -> std::convertible_to<std::uint64_t>;
  { t.output_dim() } -> std::convertible_to<std::uint64_t>;
  { t.apply(x) } -> std::same_as<std::vector<double>>;
};

inline constexpr std::uint64_t kDenseCap = 256;

/// Column j is t applied to e_j.
template <LinearTransform T>
DenseMatrix dense_matrix_of(const T& t, std::uint64_t cap = kDenseCap) {
  const std::uint64_t d = t.input_dim();
  if (d > cap) {
    throw std::length_error("dense_matrix_of: dimension " + std::to_string(d) + " exceeds cap " +
                            std::to_string(cap));
  }
  DenseMatrix m(t.output_dim(), d);
  for (std::uint64_t j = 0; j < d; ++j) {
    const std::vector<double> col = t.apply(SparseVector::basis(d, j));
    for (std::uint64_t i = 0; i < col.size(); ++i) m(i, j) = col[i];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Test vector families
// ---------------------------------------------------------------------------

enum class VectorFamily {
  kUniformSphere,   // Gaussian direction, unit norm
  kBasis,           // e_1 (index 0)
  kHeavyPlusNoise,  // half the mass on index 0, half spread as Gaussian noise
  kFlattened,       // P u for uniform unit u, so ||x||_inf <= 1/sqrt(c); dimension c*d
  kZero,
};

inline const char* to_string(VectorFamily f) {
  switch (f) {
    case VectorFamily::kUniformSphere: return "sphere";
    case VectorFamily::kBasis: return "e1";
    case VectorFamily::kHeavyPlusNoise: return "heavy";
    case VectorFamily::kFlattened: return "flat";
    case VectorFamily::kZero: return "zero";
  }
  return "?";
}

inline VectorFamily parse_family(std::string_view s) {
  for (auto f : {VectorFamily::kUniformSphere, VectorFamily::kBasis, VectorFamily::kHeavyPlusNoise,
                 VectorFamily::kFlattened, VectorFamily::kZero}) {
    if (s == to_string(f)) return f;
  }
  throw std::invalid_argument("invalid vector family '" + std::string(s) +
                              "' (expected sphere, e1, heavy, flat or zero)");
}

inline std::vector<double> uniform_unit_vector(std::uint64_t d, std::uint64_t seed) {
  const SeededSource src(seed, DomainTag::kVectorDraw);
  std::vector<double> x(d);
  for (std::uint64_t j = 0; j < d; ++j) x[j] = src.gaussian_at(j);
  const double n = std::sqrt(sq_norm(x));
  for (double& v : x) v /= n;
  return x;
}

/// Vector drawn from a family. kFlattened uses replication factor c and has
/// dimension c*d; every other family has dimension d.
inline std::vector<double> family_vector(VectorFamily f, std::uint64_t d, std::uint64_t seed,
                                         std::uint64_t c = 1) {
  switch (f) {
    case VectorFamily::kUniformSphere: return uniform_unit_vector(d, seed);
    case VectorFamily::kBasis: {
      std::vector<double> x(d, 0.0);
      x[0] = 1.0;
      return x;
    }
    case VectorFamily::kHeavyPlusNoise: {
      std::vector<double> x = uniform_unit_vector(d, seed);
      for (double& v : x) v *= std::sqrt(0.5);
      x[0] += std::sqrt(0.5);
      const double n = std::sqrt(sq_norm(x));
      for (double& v : x) v /= n;
      return x;
    }
    case VectorFamily::kFlattened: {
      const std::vector<double> u = uniform_unit_vector(d, seed);
      return ReplicationPlan(c, d).replicate(u);
    }
    case VectorFamily::kZero: return std::vector<double>(d, 0.0);
  }
  throw std::invalid_argument("invalid vector family");
}

// ---------------------------------------------------------------------------
// Monte Carlo reports
// ---------------------------------------------------------------------------

/// Which transform a distortion run draws each trial. kHash is H alone, meant
/// for inputs already flattened to ||x||_inf <= 1/sqrt(c).
enum class VerifyPath { kPhi, kHg, kHash };

inline const char* to_string(VerifyPath p) {
  switch (p) {
    case VerifyPath::kPhi: return "phi";
    case VerifyPath::kHg: return "hg";
    case VerifyPath::kHash: return "hash";
  }
  return "?";
}

struct DistortionReport {
  std::string label;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t skipped = 0;
  double empirical_rate = 0.0;  // failures / evaluated trials
  double bound = 0.0;
  // Largest per-trial statistic: relative distortion, worst bucket mass, or
  // ||Gx||_inf depending on the check.
  double max_observed = 0.0;
  JLParams params_echo;

  std::uint64_t successes() const { return trials - skipped - failures; }
  bool passed() const { return empirical_rate <= bound; }

  void finalize() {
    const std::uint64_t evaluated = trials - skipped;
    empirical_rate = evaluated == 0 ? 0.0 : static_cast<double>(failures) / static_cast<double>(evaluated);
  }
};

inline std::string to_record(const DistortionReport& r) {
  std::string s;
  s += "check=" + r.label + "\n";
  s += "trials=" + std::to_string(r.trials) + "\n";
  s += "failures=" + std::to_string(r.failures) + "\n";
  s += "skipped=" + std::to_string(r.skipped) + "\n";
  s += "empirical_rate=" + format_real(r.empirical_rate) + "\n";
  s += "bound=" + format_real(r.bound) + "\n";
  s += "max_observed=" + format_real(r.max_observed) + "\n";
  s += "passed=" + std::string(r.passed() ? "true" : "false") + "\n";
  const std::string params = to_record(r.params_echo);
  for (std::string_view rest = params; !rest.empty();) {
    const auto nl = rest.find('\n');
    s += "params.";
    s += rest.substr(0, nl + 1);
    rest.remove_prefix(nl + 1);
  }
  return s;
}

namespace detail {

inline void require_trials(std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
}

}  // namespace detail

/// Fixed x, fresh transform seed per trial: trial t uses trial_seed(schedule_seed, t).
/// A trial fails when | ||T x||^2 - ||x||^2 | > epsilon ||x||^2.
inline DistortionReport estimate_failure_rate(const JLParams& params, VerifyPath path, std::uint64_t trials,
                                              std::span<const double> x, std::uint64_t schedule_seed) {
  detail::require_trials(trials);
  if (path != VerifyPath::kHash) check_dim(x.size(), params.d, "failure-rate input");
  if (path == VerifyPath::kHg && !params.hadamard_admissible()) {
    throw PreconditionError("hg path requires d > 6c ln(3c/delta)");
  }
  DistortionReport r;
  r.label = std::string("distortion.") + to_string(path);
  r.trials = trials;
  r.bound = 4.0 * params.delta;
  r.params_echo = params;

  const double x_sq = sq_norm(x);
  if (x_sq == 0.0) {
    r.skipped = trials;
    r.finalize();
    return r;
  }
  const SparseVector xs = SparseVector::from_dense(x);
  for (std::uint64_t t = 0; t < trials; ++t) {
    JLParams p = params;
    p.seed = trial_seed(schedule_seed, t);
    std::vector<double> y;
    switch (path) {
      case VerifyPath::kPhi: y = SparseJL(p).apply(xs); break;
      case VerifyPath::kHg: y = HadamardJL(p.k, p.b, p.d, p.seed).apply(xs); break;
      case VerifyPath::kHash:
        y = make_hash_projection(p.k, x.size(), p.seed, DomainTag::kPhiSigns, DomainTag::kPhiBuckets).apply(x);
        break;
    }
    const double rel = std::abs(sq_norm(y) - x_sq) / x_sq;
    r.max_observed = std::max(r.max_observed, rel);
    if (rel > params.epsilon) ++r.failures;
  }
  r.finalize();
  return r;
}

inline DistortionReport estimate_failure_rate(const JLParams& params, VerifyPath path, std::uint64_t trials,
                                              VectorFamily family, std::uint64_t schedule_seed,
                                              std::uint64_t vector_seed = 1) {
  if (path == VerifyPath::kHash && family != VectorFamily::kFlattened && family != VectorFamily::kZero) {
    throw std::invalid_argument("hash path expects the flat family (||x||_inf <= 1/sqrt(c))");
  }
  if (path != VerifyPath::kHash && family == VectorFamily::kFlattened) {
    throw std::invalid_argument("flat family has dimension c*d and is only valid for the hash path");
  }
  const std::vector<double> x = family_vector(family, params.d, vector_seed, params.c);
  DistortionReport r = estimate_failure_rate(params, path, trials, x, schedule_seed);
  r.label += std::string(".") + to_string(family);
  return r;
}

/// Fraction of hash functions with a bad bucket for x = P u, fresh u and h per trial.
inline DistortionReport goodness_rate(const JLParams& params, std::uint64_t trials, std::uint64_t schedule_seed) {
  detail::require_trials(trials);
  DistortionReport r;
  r.label = "goodness";
  r.trials = trials;
  r.bound = params.delta;
  r.params_echo = params;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const std::uint64_t s = trial_seed(schedule_seed, t);
    const std::vector<double> x = family_vector(VectorFamily::kFlattened, params.d, s, params.c);
    const HashProjection h =
        make_hash_projection(params.k, x.size(), s, DomainTag::kPhiSigns, DomainTag::kPhiBuckets);
    const BucketStats stats = bucket_stats(h, std::span<const double>(x), params.sigma_star_sq);
    const double worst = *std::max_element(stats.sigmas.begin(), stats.sigmas.end());
    r.max_observed = std::max(r.max_observed, worst);
    if (!stats.all_good()) ++r.failures;
  }
  r.finalize();
  return r;
}

/// Fraction of block-Hadamard draws with ||G x||_inf >= 1/sqrt(c).
inline DistortionReport infnorm_tail_rate(const JLParams& params, std::uint64_t trials, const SparseVector& x,
                                          std::uint64_t schedule_seed) {
  detail::require_trials(trials);
  check_dim(x.dim, params.d, "infnorm tail input");
  if (!params.hadamard_admissible()) {
    throw PreconditionError("infnorm tail requires d > 6c ln(3c/delta)");
  }
  double n = 0.0;
  for (const auto& e : x.coalesced().entries) n += e.value * e.value;
  if (std::abs(n - 1.0) > 1e-9) throw PreconditionError("infnorm tail requires a unit vector");

  DistortionReport r;
  r.label = "infnorm_tail";
  r.trials = trials;
  r.bound = params.delta;
  r.params_echo = params;
  const double threshold = 1.0 / std::sqrt(static_cast<double>(params.c));
  for (std::uint64_t t = 0; t < trials; ++t) {
    const BlockHadamard g(params.b, params.d,
                          SeededSource(trial_seed(schedule_seed, t), DomainTag::kHadamardDiagonal));
    const double m = inf_norm(g.apply_blocks(x).data);
    r.max_observed = std::max(r.max_observed, m);
    if (m >= threshold) ++r.failures;
  }
  r.finalize();
  return r;
}

inline DistortionReport infnorm_tail_rate(const JLParams& params, std::uint64_t trials, std::span<const double> x,
                                          std::uint64_t schedule_seed) {
  return infnorm_tail_rate(params, trials, SparseVector::from_dense(x), schedule_seed);
}

/// Z_i = Y_i^2 - sigma_i^2; their sum is ||Hx||^2 - ||x||^2.
inline std::vector<double> bucket_z_values(const HashProjection& h, std::span<const double> x) {
  const std::vector<double> y = h.apply(x);
  const BucketStats s = bucket_stats(h, x, 0.0);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = y[i] * y[i] - s.sigmas[i];
  return z;
}

// ---------------------------------------------------------------------------
// Column intersection diagnostic
// ---------------------------------------------------------------------------

struct ColumnIntersectionReport {
  std::uint64_t pairs_sampled = 0;
  std::uint64_t max_intersection = 0;
  double threshold_z = 0.0;  // 16 eps^2 c^2
};

inline std::string to_record(const ColumnIntersectionReport& r) {
  return "pairs_sampled=" + std::to_string(r.pairs_sampled) + "\nmax_intersection=" +
         std::to_string(r.max_intersection) + "\nthreshold_z=" + format_real(r.threshold_z) + "\n";
}

/// Sorted rows where column j of Phi is nonzero. Replicas landing in one row
/// with opposite signs cancel.
inline std::vector<std::uint64_t> column_support(const SparseJL& t, std::uint64_t j) {
  std::vector<std::pair<std::uint64_t, int>> hits;
  for (const Column& col : t.replicas_of(j)) hits.emplace_back(col.row, col.value > 0 ? 1 : -1);
  std::sort(hits.begin(), hits.end());
  std::vector<std::uint64_t> rows;
  for (std::size_t a = 0; a < hits.size();) {
    int sum = 0;
    std::size_t b = a;
    for (; b < hits.size() && hits[b].first == hits[a].first; ++b) sum += hits[b].second;
    if (sum != 0) rows.push_back(hits[a].first);
    a = b;
  }
  return rows;
}

inline std::uint64_t intersection_size(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::uint64_t n = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

/// Max |C_i ∩ C_j| over column pairs of Phi. Every pair is visited when
/// `pairs` covers all d(d-1)/2 of them; otherwise pairs are drawn from `seed`.
inline ColumnIntersectionReport max_column_intersection(const SparseJL& t, double epsilon, std::uint64_t pairs,
                                                        std::uint64_t seed, std::uint64_t cap = kDenseCap) {
  const std::uint64_t d = t.input_dim();
  if (d > cap) {
    throw std::length_error("max_column_intersection: dimension " + std::to_string(d) + " exceeds cap " +
                            std::to_string(cap));
  }
  std::vector<std::vector<std::uint64_t>> supports(d);
  for (std::uint64_t j = 0; j < d; ++j) supports[j] = column_support(t, j);

  ColumnIntersectionReport r;
  const double c = static_cast<double>(t.c());
  r.threshold_z = 16.0 * epsilon * epsilon * c * c;
  const std::uint64_t all_pairs = d * (d - 1) / 2;
  auto visit = [&](std::uint64_t i, std::uint64_t j) {
    r.max_intersection = std::max(r.max_intersection, intersection_size(supports[i], supports[j]));
    ++r.pairs_sampled;
  };
  if (pairs >= all_pairs) {
    for (std::uint64_t i = 0; i < d; ++i) {
      for (std::uint64_t j = i + 1; j < d; ++j) visit(i, j);
    }
  } else if (d >= 2) {
    const SeededSource src(seed, DomainTag::kTrialSchedule);
    for (std::uint64_t s = 0; s < pairs; ++s) {
      const std::uint64_t i = src.bucket_at(2 * s, d);
      std::uint64_t j = src.bucket_at(2 * s + 1, d - 1);
      if (j >= i) ++j;
      visit(i, j);
    }
  }
  return r;
}

}  // namespace sjlt
