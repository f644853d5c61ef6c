#include "mixvol/kernels.hpp"

#include "mixvol/exterior_algebra.hpp"

#include <array>
#include <limits>
#include <type_traits>

namespace mixvol {

int KernelSpec::j() const {
  if (mode == KernelMode::MixedVolume) return 0;
  int s = 0;
  for (int r : degrees) s += r;
  return s - (k() - 1) * d;
}

void KernelSpec::validate() const {
  if (d < 1) throw InputError("kernel: dimension must be positive");
  if (k() < 2) throw InputError("kernel: need at least two directions");
  if (!(epsilon >= 0.0)) throw InputError("kernel: epsilon must be nonnegative");
  int s = 0;
  for (int r : degrees) s += r;
  if (mode == KernelMode::MixedVolume) {
    if (s != d) throw InputError("kernel: degrees must sum to d");
    for (int n : degrees)
      if (n < 0 || n > d - 1) throw InputError("kernel: degree out of range 0..d-1");
  } else {
    for (int r : degrees)
      if (r < 1 || r > d - 1) throw InputError("kernel: degree out of range 1..d-1");
    if (s < (k() - 1) * d) throw InputError("kernel: degrees must sum to at least (k-1)d");
  }
}

KernelSpec KernelSpec::mixed(int d, std::vector<int> n, double eps) {
  KernelSpec s{d, KernelMode::MixedVolume, std::move(n), eps};
  s.validate();
  return s;
}

KernelSpec KernelSpec::translative(int d, std::vector<int> r, double eps) {
  KernelSpec s{d, KernelMode::Translative, std::move(r), eps};
  s.validate();
  return s;
}

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct GaussLegendre {
  std::array<double, 16> x{}, w{};
  GaussLegendre() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int m = 2; m <= n; ++m) {
          const double p2 = ((2.0 * m - 1.0) * z * p1 - (m - 1.0) * p0) / m;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[size_t(i)] = z;
      w[size_t(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gl16() {
  static const GaussLegendre g;
  return g;
}

// cos/sin at the nodes of [0,π/2], [0,π/4], [π/4,π/2].
struct ArcNodes {
  std::array<std::array<double, 16>, 3> c{}, s{};
  ArcNodes() {
    const auto& g = gl16();
    const double a[3] = {0.0, 0.0, 0.25 * std::numbers::pi};
    const double b[3] = {kHalfPi, 0.25 * std::numbers::pi, kHalfPi};
    for (int p = 0; p < 3; ++p)
      for (size_t i = 0; i < 16; ++i) {
        const double t = 0.5 * (a[p] + b[p]) + 0.5 * (b[p] - a[p]) * g.x[i];
        c[size_t(p)][i] = std::cos(t);
        s[size_t(p)][i] = std::sin(t);
      }
  }
};

const ArcNodes& arc_nodes() {
  static const ArcNodes n;
  return n;
}

// Adaptive Gauss–Legendre on [a,b]; g(x) for generic, g(cos θ, sin θ) for the arc version.
template <class G>
struct Adaptive {
  G& g;
  int max_depth;
  bool ok = true;
  std::uint64_t evals = 0;
  double err = 0.0;
  double floor_tol = 0.0;

  double panel(double a, double b, int cached) {
    const auto& q = gl16();
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0;
    evals += 16;
    if constexpr (std::is_invocable_v<G, double, double>) {
      if (cached >= 0) {
        const auto& an = arc_nodes();
        for (size_t i = 0; i < 16; ++i) s += q.w[i] * g(an.c[size_t(cached)][i], an.s[size_t(cached)][i]);
      } else {
        for (size_t i = 0; i < 16; ++i) {
          const double t = m + h * q.x[i];
          s += q.w[i] * g(std::cos(t), std::sin(t));
        }
      }
    } else {
      for (size_t i = 0; i < 16; ++i) s += q.w[i] * g(m + h * q.x[i]);
    }
    return s * h;
  }

  double rec(double a, double b, double whole, double tol, int depth, bool top) {
    const double m = 0.5 * (a + b);
    const double l = panel(a, m, top ? 1 : -1);
    const double r = panel(m, b, top ? 2 : -1);
    const double diff = std::abs(l + r - whole);
    if (diff <= std::max(tol, floor_tol) || !std::isfinite(l + r)) {
      err += diff;
      if (!std::isfinite(l + r)) ok = false;
      return l + r;
    }
    if (depth >= max_depth) {
      ok = false;
      err += diff;
      return l + r;
    }
    return rec(a, m, l, 0.5 * tol, depth + 1, false) + rec(m, b, r, 0.5 * tol, depth + 1, false);
  }

  QuadResult run(double a, double b, double rel_tol, bool use_cache) {
    const double whole = panel(a, b, use_cache ? 0 : -1);
    const double tol = rel_tol * std::abs(whole);
    floor_tol = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(whole);
    const double v = rec(a, b, whole, tol, 0, use_cache);
    QuadResult res{v, err, evals, ok};
    if (ok && err > rel_tol * std::abs(v) + floor_tol) res.converged = false;
    return res;
  }
};

template <class G>
QuadResult integrate_arc(G&& g, double rel_tol, int max_depth) {
  Adaptive<std::remove_reference_t<G>> a{g, max_depth};
  return a.run(0.0, kHalfPi, rel_tol, true);
}

template <class G>
QuadResult integrate_line(G&& g, double a, double b, double rel_tol, int max_depth) {
  Adaptive<std::remove_reference_t<G>> q{g, max_depth};
  return q.run(a, b, rel_tol, false);
}

// Octant of S² over (θ, φ): t = (sinθ cosφ, sinθ sinφ, cosθ).
template <class F3>
QuadResult integrate_octant(F3&& f, double rel_tol, int max_depth) {
  bool ok = true;
  std::uint64_t evals = 0;
  auto outer = [&](double theta) {
    const double st = std::sin(theta), ct = std::cos(theta);
    auto inner = [&](double c, double s) { return f(st * c, st * s, ct); };
    QuadResult r = integrate_arc(inner, 0.01 * rel_tol, max_depth);
    ok = ok && r.converged;
    evals += r.evals;
    return st * r.value;
  };
  QuadResult r = integrate_line(outer, 0.0, kHalfPi, rel_tol, max_depth);
  r.converged = r.converged && ok;
  r.evals = evals;
  return r;
}

template <class FK>
QuadResult integrate_mc(FK&& f, int k, std::uint64_t samples, std::uint64_t seed) {
  MCEstimate e = mc_mean(
      seed, samples,
      [&](Rng& rng) {
        Vec t = gaussian_vector(rng, k).cwiseAbs();
        t /= t.norm();
        return f(t);
      },
      1);
  const double area = omega(k) / double(1 << k);
  return {area * e.value, area * e.std_error, samples, std::isfinite(e.value)};
}

// Caller-owned stream, used when the kernel sits inside an outer Monte Carlo loop.
template <class FK>
QuadResult integrate_mc(FK&& f, int k, std::uint64_t samples, Rng& rng) {
  Accumulator acc;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Vec t = gaussian_vector(rng, k).cwiseAbs();
    t /= t.norm();
    acc.add(f(t));
  }
  const double area = omega(k) / double(1 << k);
  return {area * acc.mean, area * acc.std_error(), samples, std::isfinite(acc.mean)};
}

}  // namespace

QuadResult sphere_plus_integrate(const std::function<double(const Vec&)>& f, int k, const QuadratureOptions& opt) {
  if (k < 1) throw InputError("sphere_plus_integrate: k must be positive");
  if (k == 1) {
    Vec t = Vec::Ones(1);
    return {f(t), 0.0, 1, true};
  }
  if (k == 2) {
    Vec t(2);
    return integrate_arc(
        [&](double c, double s) {
          t << c, s;
          return f(t);
        },
        opt.rel_tol_k2, opt.max_depth);
  }
  if (k == 3) {
    Vec t(3);
    return integrate_octant(
        [&](double a, double b, double c) {
          t << a, b, c;
          return f(t);
        },
        opt.rel_tol_k3, opt.max_depth);
  }
  return integrate_mc(f, k, opt.mc_samples, opt.seed);
}

Kernel::Kernel(KernelSpec spec, QuadratureOptions opt) : spec_(std::move(spec)), opt_(opt) {
  spec_.validate();
  const int d = spec_.d, k = spec_.k();
  for (int n : spec_.degrees) tpow_.push_back(d - 1 - n);
  if (spec_.mode == KernelMode::MixedVolume) {
    power_ = (k - 1) * d;
    prefactor_ = std::pow(double(k), 0.5 * (k - 2) * d) / omega((k - 1) * d);
  } else {
    power_ = d - spec_.j();
    prefactor_ = 1.0 / omega(d - spec_.j());
  }
}

QuadResult Kernel::evaluate(const std::vector<Vec>& u, Rng* rng) const {
  if (int(u.size()) != spec_.k()) throw InputError("kernel: wrong number of directions");
  for (const auto& v : u) {
    if (v.size() != spec_.d) throw InputError("kernel: direction has wrong dimension");
    if (std::abs(v.norm() - 1.0) > 1e-9) throw InputError("kernel: directions must be unit vectors");
  }
  return spec_.mode == KernelMode::MixedVolume ? eval_F(u, rng) : eval_G(u, rng);
}

QuadResult Kernel::eval_F(const std::vector<Vec>& u, Rng* rng) const {
  const int k = spec_.k();
  bool all_equal = true;
  for (int i = 1; i < k; ++i) all_equal = all_equal && u[size_t(i)] == u[0];
  if (all_equal) return {0.0, 0.0, 0, true};
  const double spread = diag_projection_norm(u);
  const double eps = spec_.epsilon;
  if (eps > 0.0 && spread < eps) return {0.0, 0.0, 0, true};
  if (eps == 0.0 && spread < 1e-6) throw DivergenceError("F_n: directions (nearly) coincide");

  // ‖t_iu_i − t_ju_j‖² = (t_i − t_j)² + t_i t_j ‖u_i − u_j‖²
  Mat dist = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) dist(i, j) = (u[size_t(i)] - u[size_t(j)]).squaredNorm();

  QuadResult r;
  if (k == 2) {
    const double d12 = dist(0, 1);
    const int a0 = tpow_[0], a1 = tpow_[1], p = power_;
    r = integrate_arc(
        [&](double c, double s) {
          const double q = (c - s) * (c - s) + c * s * d12;
          return ipow(c, a0) * ipow(s, a1) * inv_pow_half(q, p);
        },
        opt_.rel_tol_k2, opt_.max_depth);
  } else {
    auto f = [&](const Vec& t) {
      double q = 0.0, w = 1.0;
      for (int i = 0; i < k; ++i) {
        w *= ipow(t[i], tpow_[size_t(i)]);
        for (int j = i + 1; j < k; ++j) q += (t[i] - t[j]) * (t[i] - t[j]) + t[i] * t[j] * dist(i, j);
      }
      return w * inv_pow_half(q, power_);
    };
    if (k == 3) {
      Vec t(3);
      r = integrate_octant(
          [&](double a, double b, double c) {
            t << a, b, c;
            return f(t);
          },
          opt_.rel_tol_k3, opt_.max_depth);
    } else {
      r = rng ? integrate_mc(f, k, opt_.mc_samples, *rng) : integrate_mc(f, k, opt_.mc_samples, opt_.seed);
    }
  }
  if (!r.converged && eps == 0.0) throw DivergenceError("F_n: quadrature did not converge");
  r.value *= prefactor_;
  r.error *= prefactor_;
  return r;
}

QuadResult Kernel::eval_G(const std::vector<Vec>& u, Rng* rng) const {
  const int k = spec_.k(), d = spec_.d;
  if (wedge_norm_sq(u) <= 1e-20) return {0.0, 0.0, 0, true};
  const double dist = hull_distance(u);
  const double eps = spec_.epsilon;
  if (eps > 0.0 && dist < eps) return {0.0, 0.0, 0, true};
  if (eps == 0.0 && dist < 1e-6) throw DivergenceError("G_r: origin (nearly) in conv of directions");

  QuadResult r;
  Vec w(d);
  if (k == 2) {
    const int a0 = tpow_[0], a1 = tpow_[1], p = power_;
    const Vec& u0 = u[0];
    const Vec& u1 = u[1];
    r = integrate_arc(
        [&](double c, double s) {
          w = c * u0 + s * u1;
          return ipow(c, a0) * ipow(s, a1) * inv_pow_half(w.squaredNorm(), p);
        },
        opt_.rel_tol_k2, opt_.max_depth);
  } else {
    auto f = [&](const Vec& t) {
      double wt = 1.0;
      w.setZero();
      for (int i = 0; i < k; ++i) {
        wt *= ipow(t[i], tpow_[size_t(i)]);
        w += t[i] * u[size_t(i)];
      }
      return wt * inv_pow_half(w.squaredNorm(), power_);
    };
    if (k == 3) {
      Vec t(3);
      r = integrate_octant(
          [&](double a, double b, double c) {
            t << a, b, c;
            return f(t);
          },
          opt_.rel_tol_k3, opt_.max_depth);
    } else {
      r = rng ? integrate_mc(f, k, opt_.mc_samples, *rng) : integrate_mc(f, k, opt_.mc_samples, opt_.seed);
    }
  }
  if (!r.converged && eps == 0.0) throw DivergenceError("G_r: quadrature did not converge");
  r.value *= prefactor_;
  r.error *= prefactor_;
  return r;
}

double eval_F(const KernelSpec& spec, const std::vector<Vec>& u, const QuadratureOptions& opt) {
  if (spec.mode != KernelMode::MixedVolume) throw InputError("eval_F: spec is not in mode n");
  return Kernel(spec, opt)(u);
}

double eval_G(const KernelSpec& spec, const std::vector<Vec>& u, const QuadratureOptions& opt) {
  if (spec.mode != KernelMode::Translative) throw InputError("eval_G: spec is not in mode r");
  return Kernel(spec, opt)(u);
}

MinNormPoint min_norm_point(const std::vector<Vec>& u) {
  const int k = int(u.size());
  if (k == 0) throw InputError("min_norm_point: empty set");
  const int d = int(u[0].size());
  MinNormPoint best;
  best.distance = std::numeric_limits<double>::infinity();
  // Every face of the simplex over the points; the optimum is the affine
  // minimizer of some face that has nonnegative weights.
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int m = int(idx.size());
    Mat kkt = Mat::Zero(m + 1, m + 1);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) kkt(a, b) = u[size_t(idx[size_t(a)])].dot(u[size_t(idx[size_t(b)])]);
      kkt(a, m) = kkt(m, a) = 1.0;
    }
    Vec rhs = Vec::Zero(m + 1);
    rhs[m] = 1.0;
    Eigen::FullPivLU<Mat> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) continue;
    Vec sol = lu.solve(rhs);
    Vec lam = sol.head(m);
    if (lam.minCoeff() < -1e-12) continue;
    lam = lam.cwiseMax(0.0);
    lam /= lam.sum();
    Vec p = Vec::Zero(d);
    for (int a = 0; a < m; ++a) p += lam[a] * u[size_t(idx[size_t(a)])];
    const double n = p.norm();
    if (n < best.distance) {
      best.distance = n;
      best.point = p;
      best.weights = Vec::Zero(k);
      for (int a = 0; a < m; ++a) best.weights[idx[size_t(a)]] = lam[a];
    }
  }
  return best;
}

double G_eps_bound(const KernelSpec& spec) {
  if (spec.epsilon <= 0.0) return std::numeric_limits<double>::infinity();
  const int e = spec.d - spec.j();
  return omega(spec.k()) / (omega(e) * std::pow(spec.epsilon, e));
}

double scaled_diag_norm(const Vec& t, const std::vector<Vec>& u) {
  std::vector<Vec> x;
  for (size_t i = 0; i < u.size(); ++i) x.push_back(t[Eigen::Index(i)] * u[i]);
  return diag_projection_norm(x);
}

SphereSelftest sphere_projection_selftest(int p, int d, double beta, std::uint64_t seed, std::uint64_t samples) {
  if (!(1 <= d && d < p)) throw InputError("sphere_projection_selftest: need 1 <= d < p");
  if (!(beta >= 0.0)) throw InputError("sphere_projection_selftest: beta must be nonnegative");
  SphereSelftest out;
  out.exact = omega(p) * std::pow(1.0 + beta, -0.5 * (p - d));
  const double wp = omega(p);
  // L = span(e_1..e_d); s = ‖x|L^⊥‖² ~ Beta((p−d)/2, d/2).
  VecEstimate v = mc_mean_vec(seed, samples, 4, [&](Rng& rng, Vec& y) {
    const Vec x = uniform_sphere(rng, p);
    const double s = x.tail(p - d).squaredNorm();
    y << wp * std::pow(1.0 + beta * s, -0.5 * p), s, s * s, s * s * s;
  });
  const double n = double(samples);
  out.plain = {v.mean[0], std::sqrt(v.covariance(0, 0)), samples, seed};

  const double a = 0.5 * (p - d), b = 0.5 * d;
  Vec mu(3);
  double m = 1.0;
  for (int i = 0; i < 3; ++i) {
    m *= (a + i) / (a + b + i);
    mu[i] = m;
  }
  const Mat cov = v.covariance * n;  // per-sample covariance
  const Mat sxx = cov.bottomRightCorner(3, 3);
  const Vec sxf = cov.block(1, 0, 3, 1);
  const Vec coef = sxx.ldlt().solve(sxf);
  const double value = v.mean[0] - coef.dot(v.mean.tail(3) - mu);
  const double resid = std::max(0.0, cov(0, 0) - sxf.dot(coef));
  out.controlled = {value, std::sqrt(resid / n), samples, seed};
  return out;
}

}  // namespace mixvol
