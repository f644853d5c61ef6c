#pragma once

#include "mixvol/common.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <thread>

namespace mixvol {

using Rng = std::mt19937_64;

struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
// Independent stream seed for (seed, a, b); used per chunk and per face tuple.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

Vec gaussian_vector(Rng& rng, int d);
Vec uniform_sphere(Rng& rng, int d);
// Haar-distributed element of SO(d).
Mat random_rotation(Rng& rng, int d);
double uniform01(Rng& rng);

// Welford accumulator, mergeable in a fixed order.
struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x);
  void merge(const Accumulator& o);
  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }
};

// Worker threads: MIXVOL_THREADS if set, else hardware concurrency.
int default_threads();
void set_default_threads(int t);

inline constexpr std::uint64_t kChunkSize = 4096;

// Runs body(chunk_index) for chunk_index in [0, chunks) over `threads` workers.
void parallel_chunks(std::uint64_t chunks, int threads, const std::function<void(std::uint64_t)>& body);

// Mean of f(rng) over `samples` draws. Chunk c uses stream derive_seed(seed, c),
// so the result does not depend on the thread count.
template <class F>
MCEstimate mc_mean(std::uint64_t seed, std::uint64_t samples, F&& f, int threads = 0) {
  if (threads <= 0) threads = default_threads();
  const std::uint64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<Accumulator> acc(chunks);
  parallel_chunks(chunks, threads, [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, c));
    const std::uint64_t lo = c * kChunkSize;
    const std::uint64_t hi = std::min(samples, lo + kChunkSize);
    for (std::uint64_t s = lo; s < hi; ++s) acc[c].add(f(rng));
  });
  Accumulator total;
  for (const auto& a : acc) total.merge(a);
  return {total.mean, total.std_error(), samples, seed};
}

struct VecEstimate {
  Vec mean;
  Mat covariance;  // covariance of the mean
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Vector-valued version; f(rng, out) fills `out` (size dim).
template <class F>
VecEstimate mc_mean_vec(std::uint64_t seed, std::uint64_t samples, int dim, F&& f, int threads = 0) {
  if (threads <= 0) threads = default_threads();
  const std::uint64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<Vec> sums(chunks, Vec::Zero(dim));
  std::vector<Mat> outer(chunks, Mat::Zero(dim, dim));
  parallel_chunks(chunks, threads, [&](std::uint64_t c) {
    Rng rng(derive_seed(seed, c));
    Vec y(dim);
    const std::uint64_t lo = c * kChunkSize;
    const std::uint64_t hi = std::min(samples, lo + kChunkSize);
    for (std::uint64_t s = lo; s < hi; ++s) {
      f(rng, y);
      sums[c] += y;
      outer[c].noalias() += y * y.transpose();
    }
  });
  Vec sum = Vec::Zero(dim);
  Mat sq = Mat::Zero(dim, dim);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += outer[c];
  }
  VecEstimate r;
  const double n = double(samples);
  r.mean = sum / n;
  Mat cov = (sq - n * r.mean * r.mean.transpose()) / std::max(1.0, n - 1.0);
  r.covariance = cov / n;
  r.samples = samples;
  r.seed = seed;
  return r;
}

}  // namespace mixvol
