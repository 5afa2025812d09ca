#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "czl/core.hpp"
#include "czl/report.hpp"

namespace czl {

/// Coefficients of the monic polynomial p_m with h_m(x) = p_m(x) e^{-pi x^2}.
/// p_{m+1} = x p_m - m/(4 pi) p_{m-1}; then F(h_m) = i^m h_m for the kernel e^{2 pi i x y}.
inline std::vector<double> hermite_poly(int m) {
  if (m < 0) throw DomainError("Hermite degree must be nonnegative");
  std::vector<double> prev{1.0};
  if (m == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += cur[i];
    for (int i = 0; i < k; ++i) next[i] -= (k / (4.0 * kPi)) * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// x^j = sum_m c_m p_m(x).
inline std::vector<double> monomial_in_hermite(int j) {
  std::vector<double> rem(j + 1, 0.0), out(j + 1, 0.0);
  rem[j] = 1.0;
  for (int m = j; m >= 0; --m) {
    const double c = rem[m];
    if (c == 0.0) continue;
    out[m] = c;
    const auto p = hermite_poly(m);
    for (int i = 0; i <= m; ++i) rem[i] -= c * p[i];
  }
  return out;
}

/// Polynomial in monomial form: exponent vector -> coefficient.
using Polynomial = std::map<IVec, cplx>;

/// f = sum_k c_k prod_i h_{k_i}(xi_i) in orthonormal coordinates.
struct TestFunction {
  int dimension = 0;
  std::map<IVec, cplx> terms;
  std::string label;

  /// The polynomial P with f = P(xi) e^{-pi |xi|^2}.
  /// Coefficients that cancel to rounding level (relative to the magnitudes summed into
  /// them) are dropped, so exact cancellations stay exact for power counting.
  Polynomial polynomial() const {
    Polynomial out;
    std::map<IVec, double> mag;
    for (auto& [k, c] : terms) {
      Polynomial part{{IVec(dimension, 0), c}};
      for (int i = 0; i < dimension; ++i) {
        if (k[i] == 0) continue;
        const auto p = hermite_poly(k[i]);
        Polynomial next;
        for (auto& [e, v] : part)
          for (int d = 0; d <= k[i]; ++d) {
            if (p[d] == 0.0) continue;
            IVec e2 = e;
            e2[i] += d;
            next[e2] += v * p[d];
          }
        part = std::move(next);
      }
      for (auto& [e, v] : part) {
        out[e] += v;
        mag[e] += std::abs(v);
      }
    }
    for (auto it = out.begin(); it != out.end();)
      it = std::abs(it->second) <= 1e-13 * mag[it->first] ? out.erase(it) : std::next(it);
    return out;
  }

  cplx operator()(const std::vector<double>& xi) const {
    if (static_cast<int>(xi.size()) != dimension) throw DomainError("test function dimension mismatch");
    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    cplx acc = 0.0;
    for (auto& [e, c] : polynomial()) {
      double mono = 1.0;
      for (int i = 0; i < dimension; ++i) mono *= std::pow(xi[i], e[i]);
      acc += c * mono;
    }
    return acc * std::exp(-kPi * r2);
  }

  bool is_zero() const {
    for (auto& [k, c] : terms)
      if (c != cplx(0.0)) return false;
    return true;
  }
};

inline TestFunction gaussian(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  TestFunction f;
  f.dimension = n;
  f.terms[IVec(n, 0)] = 1.0;
  f.label = "gaussian";
  return f;
}

/// Single product h_k; k has one entry per coordinate.
inline TestFunction hermite(const IVec& k) {
  for (int v : k)
    if (v < 0) throw DomainError("Hermite degrees must be nonnegative");
  TestFunction f;
  f.dimension = static_cast<int>(k.size());
  f.terms[k] = 1.0;
  f.label = "hermite";
  return f;
}

/// h_k in the first coordinate, Gaussian in the rest.
inline TestFunction hermite(int k, int n) {
  IVec deg(n, 0);
  deg[0] = k;
  auto f = hermite(deg);
  f.label = "hermite(" + std::to_string(k) + ")";
  return f;
}

inline TestFunction combination(int n, const std::map<IVec, cplx>& terms) {
  TestFunction f;
  f.dimension = n;
  for (auto& [k, c] : terms) {
    if (static_cast<int>(k.size()) != n) throw DomainError("multi-degree length must equal dimension");
    for (int v : k)
      if (v < 0) throw DomainError("Hermite degrees must be nonnegative");
    f.terms[k] += c;
  }
  f.label = "combination";
  return f;
}

/// The test function P(xi) e^{-pi |xi|^2} for a monomial-form P.
inline TestFunction from_polynomial(int n, const Polynomial& poly) {
  TestFunction f;
  f.dimension = n;
  for (auto& [e, c] : poly) {
    if (static_cast<int>(e.size()) != n) throw DomainError("exponent length must equal dimension");
    std::map<IVec, cplx> part{{IVec(n, 0), c}};
    for (int i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      const auto h = monomial_in_hermite(e[i]);
      std::map<IVec, cplx> next;
      for (auto& [k, v] : part)
        for (int m = 0; m <= e[i]; ++m) {
          if (h[m] == 0.0) continue;
          IVec k2 = k;
          k2[i] = m;
          next[k2] += v * h[m];
        }
      part = std::move(next);
    }
    for (auto& [k, v] : part) f.terms[k] += v;
  }
  f.label = "polynomial";
  return f;
}

inline cplx i_pow(int k) {
  static const cplx t[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return t[((k % 4) + 4) % 4];
}

/// Exact: coefficient at k times i^{|k|}.
inline TestFunction fourier_transform(const TestFunction& f) {
  TestFunction g = f;
  for (auto& [k, c] : g.terms) {
    int deg = 0;
    for (int v : k) deg += v;
    c *= i_pow(deg);
  }
  g.label = "F[" + f.label + "]";
  return g;
}

/// Inverse transform (coefficient times (-i)^{|k|}).
inline TestFunction inverse_fourier_transform(const TestFunction& f) {
  TestFunction g = f;
  for (auto& [k, c] : g.terms) {
    int deg = 0;
    for (int v : k) deg += v;
    c *= i_pow(-deg);
  }
  g.label = "Finv[" + f.label + "]";
  return g;
}

/// f(-x): coefficient at k times (-1)^{|k|}.
inline TestFunction reflect(const TestFunction& f) {
  TestFunction g = f;
  for (auto& [k, c] : g.terms) {
    int deg = 0;
    for (int v : k) deg += v;
    if (deg & 1) c = -c;
  }
  g.label = f.label + "(-x)";
  return g;
}

inline nlohmann::json test_function_to_json(const TestFunction& f) {
  nlohmann::json terms = nlohmann::json::array();
  for (auto& [k, c] : f.terms) terms.push_back({{"k", k}, {"c", complex_to_json(c)}});
  return {{"label", f.label}, {"dimension", f.dimension}, {"terms", terms}};
}

}  // namespace czl
