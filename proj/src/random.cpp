#include "mixvol/random.hpp"

#include <atomic>
#include <mutex>
#include <cstdlib>

namespace mixvol {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ splitmix64(a + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(b + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

Vec gaussian_vector(Rng& rng, int d) {
  std::normal_distribution<double> nd;
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = nd(rng);
  return v;
}

Vec uniform_sphere(Rng& rng, int d) {
  while (true) {
    Vec v = gaussian_vector(rng, d);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Mat random_rotation(Rng& rng, int d) {
  Mat g(d, d);
  for (int j = 0; j < d; ++j) g.col(j) = gaussian_vector(rng, d);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

void Accumulator::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / double(n);
  m2 += delta * (x - mean);
}

void Accumulator::merge(const Accumulator& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = double(n), nb = double(o.n);
  const double delta = o.mean - mean;
  const double nt = na + nb;
  mean += delta * nb / nt;
  m2 += o.m2 + delta * delta * na * nb / nt;
  n += o.n;
}

namespace {
std::atomic<int> g_threads{0};
}

int default_threads() {
  int t = g_threads.load();
  if (t > 0) return t;
  if (const char* env = std::getenv("MIXVOL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

void set_default_threads(int t) { g_threads.store(t); }

void parallel_chunks(std::uint64_t chunks, int threads, const std::function<void(std::uint64_t)>& body) {
  if (threads <= 1 || chunks <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  const int nt = int(std::min<std::uint64_t>(chunks, std::uint64_t(threads)));
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mu;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::uint64_t c = next++; c < chunks; c = next++) body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace mixvol
