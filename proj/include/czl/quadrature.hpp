#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "czl/core.hpp"

namespace czl {

/// Pairwise (cascade) summation; the tree depends only on the length.
template <typename T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n <= 8) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) acc += v[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Callers write results
/// into per-index slots, so the outcome never depends on the thread count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, threads > 1 ? static_cast<std::size_t>(threads) : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre needs at least one node");
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    g.x[i] = -z;
    g.x[n - 1 - i] = z;
    g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

/// Tanh-sinh nodes on [-1, 1], kept as distances to both ends so endpoint
/// singularities are evaluated without cancellation.
struct TanhSinhRule {
  std::vector<double> dl;  // 1 + x
  std::vector<double> dr;  // 1 - x
  std::vector<double> w;
};

inline TanhSinhRule tanh_sinh(double h) {
  TanhSinhRule r;
  const long kmax = static_cast<long>(std::ceil(6.5 / h));
  for (long k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double s = 0.5 * kPi * std::sinh(t);
    const double e = std::exp(-2.0 * std::abs(s));  // in (0, 1]
    const double near = 2.0 * e / (1.0 + e);          // distance to the closer end
    const double far = 2.0 / (1.0 + e);
    const double w = h * 0.5 * kPi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (near < 1e-300 || w < 1e-300) continue;
    r.dl.push_back(s < 0 ? near : far);
    r.dr.push_back(s < 0 ? far : near);
    r.w.push_back(w);
  }
  return r;
}

/// Exp-sinh nodes on (0, inf).
struct ExpSinhRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline ExpSinhRule exp_sinh(double h) {
  ExpSinhRule r;
  const long kmax = static_cast<long>(std::ceil(6.8 / h));
  for (long k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double s = 0.5 * kPi * std::sinh(t);
    if (std::abs(s) > 690.0) continue;
    const double x = std::exp(s);
    r.x.push_back(x);
    r.w.push_back(h * 0.5 * kPi * std::cosh(t) * x);
  }
  return r;
}

/// Quadrature settings shared by every integral.
struct QuadratureSpec {
  enum class Scheme { double_exponential, tensor_gauss, monte_carlo };
  Scheme scheme = Scheme::double_exponential;
  int nodes_per_axis = 0;  // 0: choose from the effective dimension
  long mc_samples = 200000;
  std::uint64_t seed = 20240607;
  double target_tol = 0.0;  // 0: use the tolerance ladder
  int threads = 1;
  bool check_doubling = true;

  static const char* scheme_name(Scheme s) {
    switch (s) {
      case Scheme::double_exponential: return "double-exponential";
      case Scheme::tensor_gauss: return "tensor-gauss";
      default: return "monte-carlo";
    }
  }
};

/// Tolerances by effective dimension after radial reduction.
inline double tolerance_ladder(int effective_dim) {
  if (effective_dim <= 2) return 1e-8;
  if (effective_dim <= 3) return 1e-4;
  return 5e-3;
}

inline nlohmann::json quad_to_json(const QuadratureSpec& q) {
  return {{"scheme", QuadratureSpec::scheme_name(q.scheme)},
          {"nodes_per_axis", q.nodes_per_axis},
          {"mc_samples", q.mc_samples},
          {"seed", q.seed},
          {"target_tol", q.target_tol},
          {"check_doubling", q.check_doubling}};
}

}  // namespace czl
