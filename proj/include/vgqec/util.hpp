// Copyright 2026 The vgqec developers.
//
// This source code is licensed under the Apache License, Version 2.0 found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include "vgqec/qcore.hpp"

namespace vgqec {

// Deterministic RNG layer. std::mt19937_64 is fully specified by the
// standard; the distributions below are hand-rolled because the standard
// library ones are implementation-defined and would break the byte-identical
// reproducibility contract.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stable per-task seed derivation: seed -> task 0, 1, ... streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny compared to 2^64.
    return gen_() % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  Complex normal_complex() { return Complex(normal(), normal()); }

 private:
  std::mt19937_64 gen_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/// Haar-like random isometry (cols <= rows) via QR of a Gaussian matrix,
/// with the R-diagonal phase fix so the distribution is basis-invariant.
inline ComplexMatrix random_isometry(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw std::invalid_argument("random_isometry: needs cols <= rows");
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal_complex();
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
  ComplexMatrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    Complex d = r(j, j);
    q.col(j) *= std::abs(d) > 1e-300 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

// ---------------------------------------------------------------------------
// Worker pool

/// Runs fn(i) for i in [0, count) across at most `threads` workers. Work item
/// i always owns slot i of any result buffer, so the outcome is independent
/// of scheduling.
inline void parallel_for(Index count, const std::function<void(Index)>& fn, int threads) {
  if (threads <= 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (;;) {
      Index i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  int n = static_cast<int>(std::min<Index>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

/// Thread budget: VGQEC_THREADS caps it, default is the hardware count.
inline int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("VGQEC_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

}  // namespace vgqec
