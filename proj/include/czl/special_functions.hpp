#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"

namespace czl {

/// Distance below which gamma-based quantities refuse to evaluate.
inline constexpr double kPoleGuard = 1e-8;

namespace detail {

// Lanczos, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                       771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                       -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline cplx lanczos_log_gamma(cplx z) {
  // valid for Re z >= 1/2
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

/// Distance from z to the nearest nonpositive integer (infinity if Re z > 1/2).
inline double pole_distance(cplx z) {
  if (z.real() > 0.5) return HUGE_VAL;
  const double n = std::min(0.0, std::round(z.real()));
  return std::abs(z - n);
}

}  // namespace detail

/// Principal-branch log Gamma(z).
inline cplx log_gamma_complex(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("log_gamma of a non-finite value");
  if (detail::pole_distance(z) < 1e-12) throw PoleError("log_gamma at a pole", z);
  if (z.real() >= 0.5) return detail::lanczos_log_gamma(z);
  // Reflection gives the value; the shifted recurrence fixes the branch.
  const cplx refl = std::log(kPi) - std::log(std::sin(kPi * z)) - detail::lanczos_log_gamma(1.0 - z);
  const int shift = static_cast<int>(std::ceil(0.5 - z.real()));
  cplx rec = detail::lanczos_log_gamma(z + static_cast<double>(shift));
  for (int k = 0; k < shift; ++k) rec -= std::log(z + static_cast<double>(k));
  const double turns = std::round((rec.imag() - refl.imag()) / (2.0 * kPi));
  return refl + cplx(0.0, 2.0 * kPi * turns);
}

inline void guard_pole(cplx z, const std::string& what) {
  if (detail::pole_distance(z) < kPoleGuard) throw PoleError(what + ": gamma argument near a pole", z);
}

/// Gamma(z) with the 1e-8 pole guard.
inline cplx gamma_complex(cplx z) {
  guard_pole(z, "gamma");
  return std::exp(log_gamma_complex(z));
}

/// 1/Gamma(z); zero at the poles.
inline cplx rgamma_complex(cplx z) {
  if (detail::pole_distance(z) < 1e-14) return 0.0;
  return std::exp(-log_gamma_complex(z));
}

/// prod_j Gamma(alpha_j), via summed log-gamma.
inline cplx gamma_vector(const CVec& alpha) {
  cplx acc = 0.0;
  for (auto& a : alpha) {
    guard_pole(a, "gamma_vector");
    acc += log_gamma_complex(a);
  }
  return std::exp(acc);
}

/// b^z for real b > 0.
inline cplx real_pow(double base, cplx z) { return std::exp(z * std::log(base)); }

/// log of the Gindikin gamma: ((n - r)/2) log 2pi + sum log Gamma(alpha_j - p_j/2).
inline cplx log_gindikin_gamma(const ConeStructure& s, const CVec& alpha, Side side = Side::primal) {
  if (static_cast<int>(alpha.size()) != s.rank) throw DomainError("alpha length must equal rank");
  const IVec& shift = side == Side::primal ? s.p : s.q;
  cplx acc = 0.5 * (s.ambient_dim - s.rank) * std::log(2.0 * kPi);
  for (int j = 0; j < s.rank; ++j) {
    const cplx z = alpha[j] - 0.5 * shift[j];
    guard_pole(z, "gindikin_gamma");
    acc += log_gamma_complex(z);
  }
  return acc;
}

/// Gamma_Omega(alpha) = (2pi)^{(n-r)/2} Gamma(alpha - p/2); the dual uses q.
inline cplx gindikin_gamma(const ConeStructure& s, const CVec& alpha, Side side = Side::primal) {
  return std::exp(log_gindikin_gamma(s, alpha, side));
}

/// Diagonal of Lambda(alpha): pi^{|alpha|/2} / Gamma((alpha + a)/2) over a in the fixed order.
inline CVec lambda_matrix(const CVec& alpha) {
  const int r = static_cast<int>(alpha.size());
  const std::size_t count = std::size_t{1} << r;
  const cplx half_sum = 0.5 * component_sum(alpha);
  CVec diag(count);
  for (std::size_t i = 0; i < count; ++i) {
    const IVec a = parity_from_index(i, r);
    cplx acc = half_sum * std::log(kPi);
    for (int j = 0; j < r; ++j) {
      const cplx z = 0.5 * (alpha[j] + static_cast<double>(a[j]));
      if (detail::pole_distance(z) < kPoleGuard) {
        std::string tag;
        for (int v : a) tag += std::to_string(v);
        throw PoleError("lambda_matrix: pole at a=" + tag, z);
      }
      acc -= log_gamma_complex(z);
    }
    diag[i] = std::exp(acc);
  }
  return diag;
}

struct IdentitySides {
  cplx lhs;
  cplx rhs;
};

/// Gamma(z) cos(pi/2 (z - a)) against 2^z sqrt(pi)/2 Gamma((z+a)/2) / Gamma((1-z+a)/2).
inline IdentitySides reflection_duplication(cplx z, int a) {
  if (a != 0 && a != 1) throw DomainError("parity must be 0 or 1");
  guard_pole(z, "reflection_duplication");
  guard_pole(0.5 * (z + static_cast<double>(a)), "reflection_duplication");
  IdentitySides out;
  out.lhs = gamma_complex(z) * std::cos(0.5 * kPi * (z - static_cast<double>(a)));
  const cplx num = log_gamma_complex(0.5 * (z + static_cast<double>(a)));
  const cplx den_arg = 0.5 * (1.0 - z + static_cast<double>(a));
  out.rhs = real_pow(2.0, z) * std::sqrt(kPi) * 0.5 * std::exp(num) * rgamma_complex(den_arg);
  return out;
}

/// Q_a(alpha) = prod_j cos(pi/2 (alpha_j - a_j)).
inline cplx q_factor(const IVec& a, const CVec& alpha) {
  if (a.size() != alpha.size()) throw DomainError("q_factor: length mismatch");
  cplx acc = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc *= std::cos(0.5 * kPi * (alpha[j] - static_cast<double>(a[j])));
  return acc;
}

/// s sigma as a row vector.
inline CVec row_times(const CVec& s, const IMat& m) {
  const std::size_t r = s.size();
  CVec out(r, 0.0);
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t j = 0; j < r; ++j) out[k] += s[j] * static_cast<double>(m[j][k]);
  return out;
}

enum class TauDirection { primal_to_dual, dual_to_primal };

/// primal->dual: (d - s sigma) sigma_*^{-1}; dual->primal: (d - s sigma_*) sigma^{-1}.
inline CVec tau_transform(const ConeModel& cone, const CVec& s, TauDirection dir = TauDirection::primal_to_dual) {
  if (static_cast<int>(s.size()) != cone.rank()) throw DomainError("s length must equal rank");
  const bool fwd = dir == TauDirection::primal_to_dual;
  const IMat& from = fwd ? cone.sigma : cone.sigma_star;
  const IMat inv = unimodular_inverse(fwd ? cone.sigma_star : cone.sigma);
  CVec ss = row_times(s, from);
  for (int j = 0; j < cone.rank(); ++j) ss[j] = cone.structure.d(j) - ss[j];
  return row_times(ss, inv);
}

/// Exact version of tau on rational s.
inline std::vector<Rational> tau_transform_exact(const ConeModel& cone, const std::vector<Rational>& s,
                                                 TauDirection dir = TauDirection::primal_to_dual) {
  const int r = cone.rank();
  const bool fwd = dir == TauDirection::primal_to_dual;
  const IMat& from = fwd ? cone.sigma : cone.sigma_star;
  const IMat inv = unimodular_inverse(fwd ? cone.sigma_star : cone.sigma);
  std::vector<Rational> ss(r, Rational(0));
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < r; ++j) ss[k] = ss[k] + s[j] * Rational(from[j][k]);
  for (int j = 0; j < r; ++j) ss[j] = Rational(cone.structure.d_twice[j], 2) - ss[j];
  std::vector<Rational> out(r, Rational(0));
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < r; ++j) out[k] = out[k] + ss[j] * Rational(inv[j][k]);
  return out;
}

/// s together with w = s sigma - p/2 and v = tau(s) sigma_* - q/2.
struct SpectralPoint {
  CVec s;
  CVec w;
  CVec v;
  CVec tau;
};

inline SpectralPoint spectral_point(const ConeModel& cone, const CVec& s) {
  SpectralPoint pt;
  pt.s = s;
  pt.tau = tau_transform(cone, s);
  pt.w = row_times(s, cone.sigma);
  pt.v = row_times(pt.tau, cone.sigma_star);
  for (int j = 0; j < cone.rank(); ++j) {
    pt.w[j] -= 0.5 * cone.structure.p[j];
    pt.v[j] -= 0.5 * cone.structure.q[j];
  }
  return pt;
}

/// Gamma(w)/(2pi)^{|w|} Q_a(w) against pi^{r/2-|w|}/2^r Gamma((w+a)/2)/Gamma((v+a)/2).
inline IdentitySides half_gamma_ratio(const SpectralPoint& pt, const IVec& a) {
  const int r = static_cast<int>(pt.w.size());
  const cplx wsum = component_sum(pt.w);
  IdentitySides out;
  cplx lg = -wsum * std::log(2.0 * kPi);
  for (int j = 0; j < r; ++j) {
    guard_pole(pt.w[j], "half_gamma_ratio");
    lg += log_gamma_complex(pt.w[j]);
  }
  out.lhs = std::exp(lg) * q_factor(a, pt.w);
  cplx lr = (0.5 * r - wsum) * std::log(kPi) - r * std::log(2.0);
  cplx recip = 1.0;
  for (int j = 0; j < r; ++j) {
    const cplx num = 0.5 * (pt.w[j] + static_cast<double>(a[j]));
    guard_pole(num, "half_gamma_ratio");
    lr += log_gamma_complex(num);
    recip *= rgamma_complex(0.5 * (pt.v[j] + static_cast<double>(a[j])));
  }
  out.rhs = std::exp(lr) * recip;
  return out;
}

}  // namespace czl
