#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/quadrature.hpp"
#include "czl/report.hpp"
#include "czl/special_functions.hpp"
#include "czl/test_function.hpp"

namespace czl {

// Integration layout. Orbit integrals are reduced before any quadrature:
//
//  orthant   Z_eps = prod_j int_{eps_j x > 0} |x|^{s_j - 1} f_j(x) dx.
//
//  star, primal   (x1 = eps1 u, rho = |xi_k|, Delta_k = x1 x_k - rho^2/2)
//    Z_eps = c int_0^inf u^{s1-m1} f1(eps1 u) prod_k G_k(u) du,
//    G_k(u) = u^{a_k} int_0^inf rho^{n_k-1} F_k(rho) Phi(eps1 rho^2/(2u); a_k, eps_k) drho,
//    a_k = s_k - m_k,  Phi(c; a, e) = int_{sgn(x-c)=e} |x-c|^a f_k(x) dx.
//
//  star, dual     (a_k = |eta_k|^2 / (2|y_k|), Delta*_1 = prod y_k (y1 - sum delta_k a_k))
//    Z*_delta = c* int prod_k B_k(a_k) da_k  Phi(sum_k delta_k a_k; b1, delta1)[g1],
//    B_k(a) = a^{n_k/2-1}/2 int_0^inf y^{b1+b_k} (2y)^{n_k/2} g_k(delta_k y) Gbar_k(sqrt(2ay)) dy.
//
// Test functions are handled monomial by monomial (P(x) e^{-pi|x|^2}); block
// monomials are averaged over the sphere exactly, which is the radial reduction.

namespace detail {

inline constexpr double kCut = 6.0;  // e^{-pi x^2} is below 1e-49 past this

struct Rules {
  int resolution = 8;
  TanhSinhRule ts;
  std::vector<double> ts_logdl;
  std::vector<double> ts_logw;
  ExpSinhRule es;
  GaussRule gl;

  explicit Rules(int n) : resolution(n), ts(tanh_sinh(1.0 / n)), es(exp_sinh(1.0 / n)), gl(gauss_legendre(std::clamp(n, 8, 48))) {
    for (double v : ts.dl) ts_logdl.push_back(std::log(v));
    for (double v : ts.w) ts_logw.push_back(std::log(v));
  }
};

/// phi_e(c) = int_c^inf (x - c)^a x^e e^{-pi x^2} dx for e = 0..E, times e^{log_pre}
/// (folded into the exponent so huge and tiny factors never meet).
inline void phi_moments(double c, cplx a, int E, const Rules& R, cplx* out, cplx log_pre = 0.0) {
  for (int e = 0; e <= E; ++e) out[e] = 0.0;
  if (c >= kCut) return;
  // Weights enter through their logarithm: near the endpoint a huge power and a tiny
  // weight must meet inside one exponential.
  auto add = [&](double x, double log_u, double log_w) {
    cplx base = std::exp(a * log_u + log_pre + log_w - kPi * x * x);
    for (int e = 0; e <= E; ++e) {
      out[e] += base;
      base *= x;
    }
  };
  double start = -kCut;
  if (c > -kCut - 1.0) {
    const double delta = std::min(1.0, kCut - c);
    const double half = 0.5 * delta;
    const double log_half = std::log(half);
    for (std::size_t i = 0; i < R.ts.w.size(); ++i)
      add(c + half * R.ts.dl[i], log_half + R.ts_logdl[i], log_half + R.ts_logw[i]);
    start = c + delta;
  }
  if (start >= kCut) return;
  const int panels = static_cast<int>(std::ceil(kCut - start - 1e-12));
  const double width = (kCut - start) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = start + (p + 0.5) * width;
    for (std::size_t i = 0; i < R.gl.x.size(); ++i) {
      const double x = mid + 0.5 * width * R.gl.x[i];
      add(x, std::log(x - c), std::log(0.5 * width * R.gl.w[i]));
    }
  }
}

/// Phi_e(c; a, side) = side^e phi_e(side c).
inline void signed_phi(double c, cplx a, int side, int E, const Rules& R, cplx* out, cplx log_pre = 0.0) {
  phi_moments(side * c, a, E, R, out, log_pre);
  if (side < 0)
    for (int e = 1; e <= E; e += 2) out[e] = -out[e];
}

/// 2 prod Gamma((beta_i+1)/2) / Gamma((|beta|+n)/2): sphere measure times the average of theta^beta.
inline double sphere_moment(const IVec& beta) {
  int tot = 0;
  double lg = 0.0;
  for (int b : beta) {
    if (b & 1) return 0.0;
    tot += b;
    lg += std::lgamma(0.5 * (b + 1));
  }
  lg -= std::lgamma(0.5 * (tot + static_cast<double>(beta.size())));
  return 2.0 * std::exp(lg);
}

/// One monomial after radial reduction.
struct Term {
  cplx coef;
  int d1 = 0;  // degree in the first diagonal coordinate
  IVec e;      // degree in diagonal coordinate k (k >= 1)
  IVec j;      // radial degree of block k
  IVec full;   // orthant: all degrees
};

inline std::vector<Term> reduce_terms(const ConeModel& cone, const TestFunction& f) {
  if (f.dimension != cone.dim())
    throw DomainError("test function dimension " + std::to_string(f.dimension) + " != cone dimension " +
                      std::to_string(cone.dim()));
  std::vector<Term> out;
  const int r = cone.rank();
  for (auto& [mono, c] : f.polynomial()) {
    Term t;
    t.coef = c;
    if (cone.family == Family::orthant) {
      t.full = mono;
      out.push_back(t);
      continue;
    }
    t.d1 = mono[0];
    t.e.assign(r, 0);
    t.j.assign(r, 0);
    for (int k = 1; k < r; ++k) {
      t.e[k] = mono[k];
      const int off = cone.block_offset(k);
      IVec beta(mono.begin() + off, mono.begin() + off + cone.block_dim(k));
      const double sm = sphere_moment(beta);
      t.coef *= sm;
      t.j[k] = weight(beta);
    }
    if (t.coef != cplx(0.0)) out.push_back(t);
  }
  return out;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

/// Effective integration dimension after reduction.
inline int effective_dimension(const ConeModel& cone) {
  if (cone.family == Family::orthant) return 1;
  return 2 * cone.rank() - 1;
}

inline int default_resolution(const ConeModel& cone) { return cone.family == Family::orthant ? 32 : 8; }

/// Strict Gindikin-domain check: Re s sigma - p/2 > 0 (primal), Re s sigma_* - q/2 > 0 (dual).
inline std::vector<std::string> gindikin_guard(const ConeModel& cone, const CVec& s, Side side) {
  std::vector<std::string> bad;
  const CVec ss = row_times(s, cone.multiplier(side));
  const IVec& shift = side == Side::primal ? cone.structure.p : cone.structure.q;
  for (int j = 0; j < cone.rank(); ++j) {
    const double margin = ss[j].real() - 0.5 * shift[j];
    if (!(margin > 0.0))
      bad.push_back(std::string(side == Side::primal ? "Re(s sigma)_" : "Re(s sigma*)_") + std::to_string(j + 1) +
                    " - " + (side == Side::primal ? "p" : "q") + "/2 = " + detail::fmt(margin) + " <= 0");
  }
  return bad;
}

/// Power counting for one orbit and every monomial of f; empty when all integrals converge absolutely.
inline std::vector<std::string> orbit_guard(const ConeModel& cone, const std::vector<detail::Term>& terms, const CVec& s,
                                            Side side, const IVec& eps) {
  std::vector<std::string> bad;
  const int r = cone.rank();
  const auto m = cone.measure_exponents(side);
  auto fail = [&](const std::string& what, double lhs, const std::string& rel, double rhs) {
    std::string msg = what + " = " + detail::fmt(lhs) + " must be " + rel + " " + detail::fmt(rhs);
    if (std::find(bad.begin(), bad.end(), msg) == bad.end()) bad.push_back(msg);
  };
  for (auto& t : terms) {
    if (cone.family == Family::orthant) {
      for (int j = 0; j < r; ++j) {
        const double ex = s[j].real() - m[j] + t.full[j];
        if (!(ex > -1.0)) fail("Re s_" + std::to_string(j + 1) + " - m_" + std::to_string(j + 1) + " + degree", ex, ">", -1.0);
      }
      continue;
    }
    if (side == Side::primal) {
      double outer = s[0].real() - m[0] + t.d1;
      for (int k = 1; k < r; ++k) {
        const double a = s[k].real() - m[k];
        if (!(a > -1.0)) fail("Re a_" + std::to_string(k + 1), a, ">", -1.0);
        const double same = s[k].real() - 1.0 + 0.5 * t.j[k];
        outer += eps[0] * eps[k] > 0 ? same : std::min(0.0, same);
      }
      if (!(outer > -1.0)) fail("small-|x1| exponent", outer, ">", -1.0);
      continue;
    }
    const double b1 = s[0].real() - m[0];
    if (!(b1 > -1.0)) fail("Re b_1", b1, ">", -1.0);
    std::vector<double> beta(r, 0.0);
    for (int k = 1; k < r; ++k) {
      const double bk = s[k].real() - m[k];
      const double nk = cone.block_dim(k);
      const double at0 = b1 + bk + 0.5 * nk + t.e[k] + 0.5 * t.j[k];
      if (!(at0 > -1.0)) fail("small-|y" + std::to_string(k + 1) + "| exponent", at0, ">", -1.0);
      beta[k] = -2.0 - (b1 + bk) - t.e[k];
    }
    const int blocks = r - 1;
    for (unsigned mask = 1; mask < (1u << blocks); ++mask) {
      double sum = 0.0;
      int size = 0;
      bool inside = false, plus = false, minus = false;
      for (int k = 1; k < r; ++k) {
        if (!(mask & (1u << (k - 1)))) continue;
        sum += beta[k] + 1.0;
        ++size;
        inside = inside || eps[k] == -eps[0];
        (eps[k] > 0 ? plus : minus) = true;
      }
      if (inside && !(sum + b1 < 0.0)) fail("large-a exponent (inside)", sum + b1, "<", 0.0);
      if (plus && minus && !(sum - 1.0 < 0.0)) fail("large-a exponent (cancelling)", sum - 1.0, "<", 0.0);
      (void)size;
    }
  }
  return bad;
}

namespace detail {

/// Orthant orbit integral at one resolution.
inline cplx orthant_orbit(const ConeModel& cone, const std::vector<Term>& terms, const CVec& s, Side side,
                          const IVec& eps, const Rules& R) {
  const int r = cone.rank();
  const auto m = cone.measure_exponents(side);
  std::vector<int> emax(r, 0);
  for (auto& t : terms)
    for (int j = 0; j < r; ++j) emax[j] = std::max(emax[j], t.full[j]);
  std::vector<CVec> mom(r);
  for (int j = 0; j < r; ++j) {
    mom[j].assign(emax[j] + 1, 0.0);
    signed_phi(0.0, s[j] - m[j], eps[j], emax[j], R, mom[j].data());
  }
  CVec parts;
  for (auto& t : terms) {
    cplx v = t.coef;
    for (int j = 0; j < r; ++j) v *= mom[j][t.full[j]];
    parts.push_back(v);
  }
  return cone.calibration(side) * pairwise_sum(parts);
}

/// Star primal orbit integral at one resolution.
inline cplx star_primal_orbit(const ConeModel& cone, const std::vector<Term>& terms, const CVec& s, const IVec& eps,
                              const Rules& R, int threads) {
  const int r = cone.rank();
  const auto m = cone.measure_exponents(Side::primal);
  std::vector<int> emax(r, 0), jmax(r, 0);
  for (auto& t : terms)
    for (int k = 1; k < r; ++k) {
      emax[k] = std::max(emax[k], t.e[k]);
      jmax[k] = std::max(jmax[k], t.j[k]);
    }
  const auto& U = R.es;
  std::vector<cplx> node_val(U.x.size(), 0.0);
  parallel_for(U.x.size(), threads, [&](std::size_t iu) {
    const double u = U.x[iu];
    if (kPi * u * u > 700.0) return;
    const double logu = std::log(u);
    // G[k][e * (jmax+1) + j], each carrying its u^{a_k}
    std::vector<CVec> G(r);
    CVec phi;
    for (int k = 1; k < r; ++k) {
      const int J = jmax[k] + 1;
      G[k].assign(static_cast<std::size_t>((emax[k] + 1) * J), 0.0);
      phi.assign(emax[k] + 1, 0.0);
      const cplx a = s[k] - m[k];
      const int nk = cone.block_dim(k);
      const int sgn = eps[0] * eps[k];
      for (std::size_t ir = 0; ir < R.es.x.size(); ++ir) {
        const double rho = R.es.x[ir];
        if (kPi * rho * rho > 700.0) continue;
        const double c = sgn * rho * rho / (2.0 * u);
        if (c >= kCut) continue;
        const double log_base = std::log(R.es.w[ir]) - kPi * rho * rho + (nk - 1) * std::log(rho);
        phi_moments(c, a, emax[k], R, phi.data(), a * logu + log_base);
        for (int e = 1; e <= emax[k]; e += 2)
          if (eps[k] < 0) phi[e] = -phi[e];
        double base = 1.0;
        for (int j = 0; j < J; ++j) {
          if (j > 0) base *= rho;
          for (int e = 0; e <= emax[k]; ++e) G[k][e * J + j] += base * phi[e];
        }
      }
    }
    // The outer power can overflow on its own for tiny u; combine in logs.
    const cplx log_outer = std::log(U.w[iu]) + (s[0] - m[0]) * logu - kPi * u * u;
    cplx acc = 0.0;
    for (auto& t : terms) {
      cplx lg = log_outer + static_cast<double>(t.d1) * logu;
      bool zero = false;
      for (int k = 1; k < r && !zero; ++k) {
        const cplx g = G[k][t.e[k] * (jmax[k] + 1) + t.j[k]];
        if (g == cplx(0.0)) zero = true;
        else lg += std::log(g);
      }
      if (zero) continue;
      const double sign = (eps[0] < 0 && (t.d1 & 1)) ? -1.0 : 1.0;
      acc += sign * t.coef * std::exp(lg);
    }
    node_val[iu] = acc;
  });
  return cone.calibration(Side::primal) * pairwise_sum(node_val);
}

struct DualBlock {
  int emax = 0;
  int jmax = 0;
  double nk = 0;
  cplx expo;  // b1 + b_k
  int sign = 1;
};

/// B_k(a) moments, layout e * (jmax+1) + j.
inline void dual_block_values(const DualBlock& blk, double a, const Rules& R, CVec& out) {
  const int J = blk.jmax + 1;
  out.assign(static_cast<std::size_t>((blk.emax + 1) * J), 0.0);
  for (std::size_t iy = 0; iy < R.es.x.size(); ++iy) {
    const double y = R.es.x[iy];
    const double damp = kPi * y * y + 2.0 * kPi * a * y;
    if (damp > 700.0) continue;
    const double logy = std::log(y);
    cplx base = std::exp(std::log(R.es.w[iy]) + blk.expo * logy + 0.5 * blk.nk * (logy + std::log(2.0)) - damp);
    const double ey = blk.sign * y;
    const double jy = std::sqrt(2.0 * a * y);
    for (int e = 0; e <= blk.emax; ++e) {
      cplx v = base;
      for (int j = 0; j < J; ++j) {
        out[e * J + j] += v;
        v *= jy;
      }
      base *= ey;
    }
  }
  const double pre = 0.5 * std::pow(a, 0.5 * blk.nk - 1.0);
  for (auto& v : out) v *= pre;
}

/// Nodes for the innermost a: tanh-sinh from 0 to the first cut past a = 1, unit Gauss panels
/// across the band |A + dk a| < kCut where the inner Phi varies on the Gaussian scale, exp-sinh
/// beyond. Gauss panels stay a panel width away from the a^{n/2-1} endpoint.
inline void band_nodes(double A, int dk, const Rules& R, std::vector<double>& xs, std::vector<double>& ws) {
  std::vector<double> cuts;
  for (int t = -static_cast<int>(kCut); t <= static_cast<int>(kCut); ++t) {
    const double a = dk * (t - A);
    if (a >= 1.0) cuts.push_back(a);
  }
  std::sort(cuts.begin(), cuts.end());
  xs.clear();
  ws.clear();
  double lo = 0.0;
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const double hi = cuts[c];
    const double half = 0.5 * (hi - lo);
    if (c == 0) {
      for (std::size_t i = 0; i < R.ts.w.size(); ++i) {
        xs.push_back(R.ts.dl[i] <= 1.0 ? lo + half * R.ts.dl[i] : hi - half * R.ts.dr[i]);
        ws.push_back(half * R.ts.w[i]);
      }
    } else {
      for (std::size_t i = 0; i < R.gl.x.size(); ++i) {
        xs.push_back(lo + half * (1.0 + R.gl.x[i]));
        ws.push_back(half * R.gl.w[i]);
      }
    }
    lo = hi;
  }
  for (std::size_t i = 0; i < R.es.x.size(); ++i) {
    xs.push_back(lo + R.es.x[i]);
    ws.push_back(R.es.w[i]);
  }
}

struct DualContext {
  const std::vector<Term>* terms;
  std::vector<DualBlock> blocks;  // index k = 1..r-1
  cplx b1;
  int d1max = 0;
  IVec eps;
  int r = 0;
};

/// Integral over a_k, ..., a_{r-1} given the partial sum A; one value per term.
inline CVec dual_level(const DualContext& C, int k, double A, const Rules& R) {
  const auto& terms = *C.terms;
  CVec acc(terms.size(), 0.0);
  CVec B, psi(C.d1max + 1);
  const int dk = C.eps[k];
  const bool last = k == C.r - 1;
  std::vector<double> xs, ws;
  if (last) {
    band_nodes(A, dk, R, xs, ws);
  } else {
    xs = R.es.x;
    ws = R.es.w;
  }
  std::vector<CVec> contrib(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double a = xs[i];
    if (!(a > 0.0) || !std::isfinite(a)) continue;
    dual_block_values(C.blocks[k], a, R, B);
    const int J = C.blocks[k].jmax + 1;
    const double Anew = A + dk * a;
    CVec inner;
    if (last) {
      signed_phi(Anew, C.b1, C.eps[0], C.d1max, R, psi.data());
    } else {
      inner = dual_level(C, k + 1, Anew, R);
    }
    CVec& out = contrib[i];
    out.assign(terms.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const cplx bv = B[terms[t].e[k] * J + terms[t].j[k]];
      out[t] = ws[i] * bv * (last ? psi[terms[t].d1] : inner[t]);
    }
  }
  for (std::size_t t = 0; t < terms.size(); ++t) {
    CVec col(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!contrib[i].empty()) col[i] = contrib[i][t];
    acc[t] = pairwise_sum(col);
  }
  return acc;
}

/// Star dual orbit integral at one resolution.
inline cplx star_dual_orbit(const ConeModel& cone, const std::vector<Term>& terms, const CVec& tau, const IVec& del,
                            const Rules& R, int threads) {
  const int r = cone.rank();
  const auto m = cone.measure_exponents(Side::dual);
  DualContext C;
  C.terms = &terms;
  C.r = r;
  C.eps = del;
  C.b1 = tau[0] - m[0];
  C.blocks.resize(r);
  for (auto& t : terms) {
    C.d1max = std::max(C.d1max, t.d1);
    for (int k = 1; k < r; ++k) {
      C.blocks[k].emax = std::max(C.blocks[k].emax, t.e[k]);
      C.blocks[k].jmax = std::max(C.blocks[k].jmax, t.j[k]);
    }
  }
  for (int k = 1; k < r; ++k) {
    C.blocks[k].nk = cone.block_dim(k);
    C.blocks[k].expo = C.b1 + (tau[k] - m[k]);
    C.blocks[k].sign = del[k];
  }
  if (r == 2) {
    const CVec v = dual_level(C, 1, 0.0, R);
    cplx acc = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) acc += terms[t].coef * v[t];
    return cone.calibration(Side::dual) * acc;
  }
  // Split the outermost level across threads.
  const auto& X = R.es;
  std::vector<cplx> node_val(X.x.size(), 0.0);
  parallel_for(X.x.size(), threads, [&](std::size_t i) {
    const double a = X.x[i];
    CVec B;
    dual_block_values(C.blocks[1], a, R, B);
    const int J = C.blocks[1].jmax + 1;
    const CVec inner = dual_level(C, 2, del[1] * a, R);
    cplx acc = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) acc += terms[t].coef * B[terms[t].e[1] * J + terms[t].j[1]] * inner[t];
    node_val[i] = X.w[i] * acc;
  });
  return cone.calibration(Side::dual) * pairwise_sum(node_val);
}

inline cplx orbit_integral(const ConeModel& cone, const std::vector<Term>& terms, const CVec& s, Side side,
                           const IVec& eps, int resolution, int threads) {
  const Rules R(resolution);
  if (terms.empty()) return 0.0;
  if (cone.family == Family::orthant) return orthant_orbit(cone, terms, s, side, eps, R);
  if (side == Side::primal) return star_primal_orbit(cone, terms, s, eps, R, threads);
  return star_dual_orbit(cone, terms, s, eps, R, threads);
}

}  // namespace detail

/// Values in the fixed I_r order, with node-doubling deltas and guard status.
struct ZetaVector {
  CVec values;
  Side side = Side::primal;
  CVec s;
  bool convergence_ok = true;
  bool gindikin_ok = true;
  std::vector<std::string> guard_messages;
  std::vector<double> doubling_delta;
  int resolution = 0;
  double target_tol = 0.0;
  bool reached_tol = true;
};

inline nlohmann::json zeta_vector_to_json(const ZetaVector& z) {
  return {{"side", side_name(z.side)},
          {"s", cvec_to_json(z.s)},
          {"values", cvec_to_json(z.values)},
          {"convergence_ok", z.convergence_ok},
          {"gindikin_domain_ok", z.gindikin_ok},
          {"guard", z.guard_messages},
          {"doubling_delta", z.doubling_delta},
          {"resolution", z.resolution},
          {"target_tol", z.target_tol},
          {"reached_tol", z.reached_tol}};
}

inline int resolve_resolution(const ConeModel& cone, const QuadratureSpec& q) {
  return q.nodes_per_axis > 0 ? q.nodes_per_axis : default_resolution(cone);
}

inline double resolve_tolerance(const ConeModel& cone, const QuadratureSpec& q) {
  return q.target_tol > 0.0 ? q.target_tol : tolerance_ladder(effective_dimension(cone));
}

/// All guard messages for (cone, f, s, side); empty when every orbit integral converges.
inline std::vector<std::string> convergence_report(const ConeModel& cone, const TestFunction& f, const CVec& s, Side side,
                                                   bool* gindikin_ok = nullptr) {
  if (static_cast<int>(s.size()) != cone.rank()) throw DomainError("s length must equal rank");
  auto msgs = gindikin_guard(cone, s, side);
  if (gindikin_ok) *gindikin_ok = msgs.empty();
  const auto terms = detail::reduce_terms(cone, f);
  const std::size_t count = std::size_t{1} << cone.rank();
  for (std::size_t i = 0; i < count; ++i) {
    const IVec eps = sign_from_index(i, cone.rank());
    for (auto& m : orbit_guard(cone, terms, s, side, eps)) {
      std::string tag;
      for (int v : eps) tag += v > 0 ? '+' : '-';
      msgs.push_back("orbit " + tag + ": " + m);
    }
  }
  return msgs;
}

/// Every orbit integral of f at s; throws GuardError when an integral diverges.
inline ZetaVector zeta_vector(const ConeModel& cone, const TestFunction& f, const CVec& s, const QuadratureSpec& quad,
                              Side side) {
  if (quad.scheme == QuadratureSpec::Scheme::monte_carlo)
    throw DomainError("orbit integrals support the deterministic schemes only");
  ZetaVector z;
  z.side = side;
  z.s = s;
  z.guard_messages = convergence_report(cone, f, s, side, &z.gindikin_ok);
  z.convergence_ok = z.guard_messages.empty();
  if (!z.convergence_ok) {
    std::string all;
    for (auto& m : z.guard_messages) all += (all.empty() ? "" : "; ") + m;
    throw GuardError(std::string(side_name(side)) + " orbit integrals diverge", all);
  }
  // Orbits with eps_1 = -1 are the images of -eps under x -> -x; integrating
  // f(-x) over -eps keeps symmetry-forced cancellations exact.
  const auto terms = detail::reduce_terms(cone, f);
  const auto mirrored = detail::reduce_terms(cone, reflect(f));
  const int r = cone.rank();
  const std::size_t count = std::size_t{1} << r;
  z.resolution = resolve_resolution(cone, quad);
  z.target_tol = resolve_tolerance(cone, quad);
  z.values.resize(count);
  z.doubling_delta.assign(count, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    IVec eps = sign_from_index(i, r);
    const bool flip = eps[0] < 0;
    if (flip)
      for (auto& v : eps) v = -v;
    const auto& use = flip ? mirrored : terms;
    const cplx coarse = detail::orbit_integral(cone, use, s, side, eps, z.resolution, quad.threads);
    if (quad.check_doubling) {
      const cplx fine = detail::orbit_integral(cone, use, s, side, eps, 2 * z.resolution, quad.threads);
      z.values[i] = fine;
      z.doubling_delta[i] = std::abs(fine - coarse);
    } else {
      z.values[i] = coarse;
    }
    scale = std::max(scale, std::abs(z.values[i]));
  }
  for (double d : z.doubling_delta)
    if (d > z.target_tol * std::max(scale, 1e-300) * 0.1) z.reached_tol = false;
  return z;
}

/// One orbit integral; fails when node doubling does not confirm the target tolerance.
inline cplx local_zeta(const ConeModel& cone, const IVec& eps, const TestFunction& f, const CVec& s,
                       const QuadratureSpec& quad, Side side) {
  if (static_cast<int>(eps.size()) != cone.rank()) throw DomainError("sign vector length must equal rank");
  if (static_cast<int>(s.size()) != cone.rank()) throw DomainError("s length must equal rank");
  const auto terms = detail::reduce_terms(cone, f);
  auto bad = gindikin_guard(cone, s, side);
  for (auto& m : orbit_guard(cone, terms, s, side, eps)) bad.push_back(m);
  if (!bad.empty()) {
    std::string all;
    for (auto& m : bad) all += (all.empty() ? "" : "; ") + m;
    throw GuardError("local zeta integral diverges", all);
  }
  const int n = resolve_resolution(cone, quad);
  IVec orbit = eps;
  const bool flip = eps[0] < 0;
  if (flip)
    for (auto& v : orbit) v = -v;
  const auto use = flip ? detail::reduce_terms(cone, reflect(f)) : terms;
  const cplx coarse = detail::orbit_integral(cone, use, s, side, orbit, n, quad.threads);
  if (!quad.check_doubling) return coarse;
  const cplx fine = detail::orbit_integral(cone, use, s, side, orbit, 2 * n, quad.threads);
  const double tol = resolve_tolerance(cone, quad);
  if (std::abs(fine - coarse) > tol * std::max(std::abs(fine), 1e-300))
    throw QuadratureError("node doubling changed the integral by " + detail::fmt(std::abs(fine - coarse)) +
                          ", above the target tolerance");
  return fine;
}

}  // namespace czl
