#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <vector>

#include "sjlt/params.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/transforms.hpp"
#include "sjlt/vector.hpp"

namespace sjlt {

/// nnz distinct coordinates of [0, d) with Gaussian values, from seed.
inline SparseVector bench_vector(std::uint64_t d, std::uint64_t nnz, std::uint64_t seed) {
  const SeededSource idx(seed, DomainTag::kVectorDraw);
  const SeededSource val(seed, DomainTag::kTrialSchedule);
  SparseVector x(d);
  std::vector<std::uint64_t> picked;
  picked.reserve(nnz);
  // Stride sampling keeps indices distinct without a d-sized bitmap.
  const std::uint64_t stride = d / std::max<std::uint64_t>(nnz, 1);
  for (std::uint64_t t = 0; t < nnz && t < d; ++t) {
    const std::uint64_t lo = t * std::max<std::uint64_t>(stride, 1);
    const std::uint64_t j = stride > 1 ? lo + idx.bucket_at(t, stride) : lo;
    x.push(j, val.gaussian_at(t));
  }
  return x;
}

struct Timing {
  double seconds = 0.0;  // best of reps
  std::uint64_t nnz = 0;
  std::uint64_t d = 0;
};

template <typename Fn>
double best_seconds(int reps, Fn&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

inline Timing time_phi_apply(double epsilon, double delta, std::uint64_t d, std::uint64_t nnz, std::uint64_t seed,
                             int reps) {
  const SparseJL t(derive_params(epsilon, delta, d, seed));
  const SparseVector x = bench_vector(d, nnz, seed);
  volatile double sink = 0.0;
  Timing out{best_seconds(reps, [&] { sink = sink + t.apply(x)[0]; }), x.nnz(), d};
  return out;
}

inline Timing time_hg_apply_dense(double epsilon, double delta, std::uint64_t d, std::uint64_t seed, int reps) {
  const HadamardJL t(derive_params(epsilon, delta, d, seed));
  std::vector<double> x(d);
  const SeededSource g(seed, DomainTag::kVectorDraw);
  for (std::uint64_t j = 0; j < d; ++j) x[j] = g.gaussian_at(j);
  volatile double sink = 0.0;
  return {best_seconds(reps, [&] { sink = sink + t.apply(std::span<const double>(x))[0]; }), d, d};
}

}  // namespace sjlt
