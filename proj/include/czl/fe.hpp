#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/quadrature.hpp"
#include "czl/report.hpp"
#include "czl/sign_character.hpp"
#include "czl/special_functions.hpp"
#include "czl/test_function.hpp"
#include "czl/zeta_engine.hpp"

namespace czl {

/// Violations of p/2 < Re s sigma < p/2 + 1; empty inside the overlap strip.
inline std::vector<std::string> strip_violations(const ConeModel& cone, const CVec& s) {
  if (static_cast<int>(s.size()) != cone.rank()) throw DomainError("s length must equal rank");
  std::vector<std::string> bad;
  const CVec ss = row_times(s, cone.sigma);
  for (int j = 0; j < cone.rank(); ++j) {
    const double w = ss[j].real() - 0.5 * cone.structure.p[j];
    if (!(w > 0.0 && w < 1.0))
      bad.push_back("Re(s sigma)_" + std::to_string(j + 1) + " - p_" + std::to_string(j + 1) + "/2 = " +
                    detail::fmt(w) + " outside (0, 1)");
  }
  return bad;
}

inline void require_strip(const ConeModel& cone, const CVec& s) {
  const auto bad = strip_violations(cone, s);
  if (bad.empty()) return;
  std::string all;
  for (auto& m : bad) all += (all.empty() ? "" : "; ") + m;
  throw GuardError("s is outside the overlap strip", all);
}

/// s with Re s sigma = p/2 + theta.
inline CVec strip_point(const ConeModel& cone, const std::vector<double>& theta, const std::vector<double>& imag = {}) {
  const int r = cone.rank();
  CVec target(r);
  for (int j = 0; j < r; ++j)
    target[j] = cplx(0.5 * cone.structure.p[j] + theta[j], imag.empty() ? 0.0 : imag[j]);
  return row_times(target, unimodular_inverse(cone.sigma));
}

/// The strip midpoint, then pseudorandom strip points from the seed. Points at which an
/// orbit integral of f or of its transform would diverge are skipped.
inline std::vector<CVec> auto_strip_points(const ConeModel& cone, const TestFunction& f, std::uint64_t seed,
                                           int count = 3) {
  const int r = cone.rank();
  const TestFunction fh = fourier_transform(f);
  auto usable = [&](const CVec& s) {
    return convergence_report(cone, fh, s, Side::primal).empty() &&
           convergence_report(cone, f, tau_transform(cone, s), Side::dual).empty();
  };
  std::vector<CVec> out;
  const CVec mid = strip_point(cone, std::vector<double>(r, 0.5));
  if (usable(mid)) out.push_back(mid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int attempt = 0; attempt < 500 && static_cast<int>(out.size()) < count; ++attempt) {
    std::vector<double> theta(r);
    for (auto& t : theta) t = u(rng);
    const CVec s = strip_point(cone, theta);
    if (usable(s)) out.push_back(s);
  }
  if (out.empty()) throw GuardError("no strip point gives convergent orbit integrals for this test function",
                                    "per-orbit power counting fails on the sampled strip");
  return out;
}

/// Both zeta vectors entering one functional equation.
struct FEData {
  SpectralPoint point;
  TestFunction f;
  TestFunction fhat;
  ZetaVector primal;  // Z(fhat; s)
  ZetaVector dual;    // Z*(f; tau(s))
  long runtime_ms = 0;
};

inline FEData fe_data(const ConeModel& cone, const TestFunction& f, const CVec& s, const QuadratureSpec& quad) {
  const auto t0 = std::chrono::steady_clock::now();
  require_strip(cone, s);
  FEData d;
  d.point = spectral_point(cone, s);
  d.f = f;
  d.fhat = fourier_transform(f);
  d.primal = zeta_vector(cone, d.fhat, s, quad, Side::primal);
  d.dual = zeta_vector(cone, f, d.point.tau, quad, Side::dual);
  d.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return d;
}

namespace detail {

inline nlohmann::json fe_inputs(const ConeModel& cone, const FEData& d, const QuadratureSpec& quad) {
  return {{"s", cvec_to_json(d.point.s)},
          {"tau", cvec_to_json(d.point.tau)},
          {"w", cvec_to_json(d.point.w)},
          {"v", cvec_to_json(d.point.v)},
          {"f", test_function_to_json(d.f)},
          {"quadrature", quad_to_json(quad)},
          {"effective_dimension", effective_dimension(cone)},
          {"seed", quad.seed}};
}

inline nlohmann::json fe_convergence(const FEData& d) {
  return {{"primal", zeta_vector_to_json(d.primal)},
          {"dual", zeta_vector_to_json(d.dual)},
          {"reached_tol", d.primal.reached_tol && d.dual.reached_tol}};
}

inline CMat column(const CVec& v) {
  CMat m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

inline CVec to_cvec(const CMat& m) {
  CVec v(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, 0);
  return v;
}

/// Gamma_Omega(s sigma) / (2 pi)^{|s sigma|}.
inline cplx raw_fe_factor(const ConeModel& cone, const CVec& s) {
  const CVec ss = row_times(s, cone.sigma);
  return std::exp(log_gindikin_gamma(cone.structure, ss) - component_sum(ss) * std::log(2.0 * kPi));
}

inline double max_dev_from_one(const CVec& w, const CVec& v) {
  double dev = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) dev = std::max(dev, std::abs(w[j] + v[j] - 1.0));
  return dev;
}

inline void finish(VerificationReport& rep, const ConeModel& cone, const FEData& d, const QuadratureSpec& quad,
                   std::chrono::steady_clock::time_point t0) {
  const double tol = resolve_tolerance(cone, quad);
  rep.score(tol, tol);
  if (!d.primal.reached_tol || !d.dual.reached_tol)
    rep.notes.push_back("node doubling moved some orbit integral by more than a tenth of the tolerance");
  rep.runtime_ms = d.runtime_ms +
                   std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

/// Z(fhat; s) against Gamma_Omega(s sigma)/(2pi)^{|s sigma|} A(w)^T Z*(f; tau(s)).
/// A(w) is stored with rows delta and columns eps; the transpose pairs the primal
/// index eps with the column index (the literal product is reported alongside).
inline VerificationReport verify_raw_fe(const ConeModel& cone, const FEData& d, const QuadratureSpec& quad) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "fe-raw";
  rep.cone = cone.name;
  rep.inputs = detail::fe_inputs(cone, d, quad);
  const GammaMatrix A = gamma_matrix_general(cone.structure, d.point.w);
  const cplx g = detail::raw_fe_factor(cone, d.point.s);
  const CMat Zd = detail::column(d.dual.values);
  rep.lhs = d.primal.values;
  rep.rhs = detail::to_cvec(g * (A.values.transpose() * Zd));
  VerificationReport literal;
  literal.lhs = rep.lhs;
  literal.rhs = detail::to_cvec(g * (A.values * Zd));
  literal.score(1.0, resolve_tolerance(cone, quad));
  rep.convergence = detail::fe_convergence(d);
  rep.details = {{"gamma_factor", complex_to_json(g)},
                 {"matrix_orientation", "A(w)^T (rows delta, columns eps)"},
                 {"untransposed_rel_residual", literal.rel_residual},
                 {"completion_m", check_completion_condition(cone.structure) ? nlohmann::json(*check_completion_condition(cone.structure))
                                                                              : nlohmann::json("fails")}};
  detail::finish(rep, cone, d, quad, t0);
  return rep;
}

inline VerificationReport verify_raw_fe(const ConeModel& cone, const TestFunction& f, const CVec& s,
                                        const QuadratureSpec& quad) {
  return verify_raw_fe(cone, fe_data(cone, f, s, quad), quad);
}

inline int require_completion(const ConeModel& cone) {
  const auto m = check_completion_condition(cone.structure);
  if (!m) throw DomainError(cone.name + " fails the completion condition; only the raw functional equation applies");
  return *m;
}

/// Lambda(w) tJ Z(fhat; s) against E Lambda(v) tJ Z*(f; tau(s)).
inline VerificationReport verify_completed_fe(const ConeModel& cone, const FEData& d, const QuadratureSpec& quad) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = require_completion(cone);
  const int r = cone.rank();
  VerificationReport rep;
  rep.check_id = "fe-completed";
  rep.cone = cone.name;
  rep.inputs = detail::fe_inputs(cone, d, quad);
  const double dev = detail::max_dev_from_one(d.point.w, d.point.v);
  if (dev > 1e-12) throw DomainError("w + v = 1 fails by " + detail::fmt(dev));
  const auto basis = build_J(r);
  const CMat Jt = basis.J.transpose().cast<cplx>();
  const CVec lw = lambda_matrix(d.point.w);
  const CVec lv = lambda_matrix(d.point.v);
  const CVec E = epsilon_factor(m, r);
  const CVec P = detail::to_cvec(Jt * detail::column(d.primal.values));
  const CVec D = detail::to_cvec(Jt * detail::column(d.dual.values));
  for (std::size_t a = 0; a < P.size(); ++a) {
    rep.lhs.push_back(lw[a] * P[a]);
    rep.rhs.push_back(E[a] * lv[a] * D[a]);
  }
  // The algebra behind the completion: J Lambda(w)^{-1} E Lambda(v) tJ = gamma * A(w).
  CMat mid = CMat::Zero(static_cast<Eigen::Index>(lw.size()), static_cast<Eigen::Index>(lw.size()));
  for (std::size_t a = 0; a < lw.size(); ++a)
    mid(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = E[a] * lv[a] / lw[a];
  const CMat J = basis.J.cast<cplx>();
  const CMat chain = J * mid * J.transpose();
  const CMat target = detail::raw_fe_factor(cone, d.point.s) * gamma_matrix_reduced(m, d.point.w).values;
  const double chain_res = (chain - target).cwiseAbs().maxCoeff() / std::max(target.cwiseAbs().maxCoeff(), 1e-300);
  rep.convergence = detail::fe_convergence(d);
  rep.details = {{"m", m},
                 {"w_plus_v_minus_1", dev},
                 {"epsilon_factor", cvec_to_json(E)},
                 {"completion_chain_rel_residual", chain_res}};
  detail::finish(rep, cone, d, quad, t0);
  return rep;
}

inline VerificationReport verify_completed_fe(const ConeModel& cone, const TestFunction& f, const CVec& s,
                                              const QuadratureSpec& quad) {
  require_completion(cone);
  return verify_completed_fe(cone, fe_data(cone, f, s, quad), quad);
}

// ---------------------------------------------------------------- zeta distributions

/// Z_b = sum_eps kappa_eps(b sigma) Z_eps for every b, in the fixed order on A.
inline CVec distribution_vector(const ConeModel& cone, const CVec& zeta, Side side) {
  const int r = cone.rank();
  const std::size_t count = std::size_t{1} << r;
  if (zeta.size() != count) throw DomainError("zeta vector has the wrong length");
  CVec out(count);
  for (std::size_t ib = 0; ib < count; ++ib) {
    const IVec bs = row_times_mod2(parity_from_index(ib, r), cone.multiplier(side));
    CVec parts(count);
    for (std::size_t ie = 0; ie < count; ++ie) parts[ie] = static_cast<double>(kappa(sign_from_index(ie, r), bs)) * zeta[ie];
    out[ib] = pairwise_sum(parts);
  }
  return out;
}

struct DistributionValue {
  cplx value;   // linear combination
  cplx direct;  // sign characters read off the invariants on each orbit
  double discrepancy = 0.0;
};

/// Z_b two ways: sum_eps kappa_eps(b sigma) Z_eps, and prod_j sgn(Delta_j)^{b_j} evaluated
/// at a seeded chart point of every orbit.
inline DistributionValue zeta_distribution_from(const ConeModel& cone, const IVec& b, const CVec& zeta, Side side,
                                               std::uint64_t seed = 20240607) {
  const int r = cone.rank();
  if (static_cast<int>(b.size()) != r) throw DomainError("parity vector length must equal rank");
  const std::size_t count = std::size_t{1} << r;
  const IVec bs = row_times_mod2(b, cone.multiplier(side));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.5, 2.0), uu(-1.5, 1.5);
  CVec lin(count), dir(count);
  for (std::size_t ie = 0; ie < count; ++ie) {
    const IVec eps = sign_from_index(ie, r);
    lin[ie] = static_cast<double>(kappa(eps, bs)) * zeta[ie];
    ChartPoint pt;
    pt.orbit_sign = eps;
    for (int j = 0; j < r; ++j) pt.t.push_back(ut(rng));
    for (int j = r; j < cone.dim(); ++j) pt.u.push_back(uu(rng));
    const auto img = orbit_chart(cone, pt, side);
    const auto delta = evaluate_invariants(cone, img.x, side);
    double chi = 1.0;
    for (int j = 0; j < r; ++j)
      if (b[j] && delta[j] < 0) chi = -chi;
    dir[ie] = chi * zeta[ie];
  }
  DistributionValue out;
  out.value = pairwise_sum(lin);
  out.direct = pairwise_sum(dir);
  const double scale = std::max(std::abs(out.value), std::abs(out.direct));
  out.discrepancy = scale < 1e-300 ? 0.0 : std::abs(out.value - out.direct) / scale;
  return out;
}

inline DistributionValue zeta_distribution(const ConeModel& cone, const IVec& b, const TestFunction& f, const CVec& s,
                                           const QuadratureSpec& quad, Side side) {
  const auto z = zeta_vector(cone, f, s, quad, side);
  auto out = zeta_distribution_from(cone, b, z.values, side, quad.seed);
  if (out.discrepancy > 1e-10)
    throw QuadratureError("zeta distribution cross-check discrepancy " + detail::fmt(out.discrepancy));
  return out;
}

/// Lambda(w) Z~(fhat; s) against E Lambda(v) Z~*(f; tau(s)), with Z~ the zeta
/// distributions listed along A_sigma (primal) and A_sigma* (dual). The entries are
/// 2^{r/2} times the completed-FE entries; the report records that comparison.
inline VerificationReport verify_distribution_fe(const ConeModel& cone, const FEData& d, const QuadratureSpec& quad) {
  const auto t0 = std::chrono::steady_clock::now();
  const int m = require_completion(cone);
  const int r = cone.rank();
  VerificationReport rep;
  rep.check_id = "fe-distribution";
  rep.cone = cone.name;
  rep.inputs = detail::fe_inputs(cone, d, quad);
  const auto ord_p = order_map_sigma(cone.sigma);
  const auto ord_d = order_map_sigma(cone.sigma_star);
  const CVec Zp = distribution_vector(cone, d.primal.values, Side::primal);
  const CVec Zd = distribution_vector(cone, d.dual.values, Side::dual);
  const CVec lw = lambda_matrix(d.point.w);
  const CVec lv = lambda_matrix(d.point.v);
  const CVec E = epsilon_factor(m, r);
  double lin_worst = 0.0;
  for (std::size_t i = 0; i < lw.size(); ++i) {
    rep.lhs.push_back(lw[i] * Zp[ord_p.order[i]]);
    rep.rhs.push_back(E[i] * lv[i] * Zd[ord_d.order[i]]);
    for (Side side : {Side::primal, Side::dual}) {
      const auto dv = zeta_distribution_from(cone, parity_from_index(i, r),
                                             side == Side::primal ? d.primal.values : d.dual.values, side, quad.seed);
      lin_worst = std::max(lin_worst, dv.discrepancy);
    }
  }
  const auto completed = verify_completed_fe(cone, d, quad);
  const double scale = std::pow(2.0, 0.5 * r);
  double entry_dev = 0.0;
  for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
    const double ref = std::max(std::abs(completed.lhs[i]), 1e-300);
    entry_dev = std::max(entry_dev, std::abs(rep.lhs[i] - scale * completed.lhs[i]) / (scale * ref));
  }
  auto perm = [](const OrderMap& o) {
    nlohmann::json a = nlohmann::json::array();
    for (auto b : o.order) a.push_back(b);
    return a;
  };
  rep.convergence = detail::fe_convergence(d);
  detail::finish(rep, cone, d, quad, t0);
  rep.runtime_ms += completed.runtime_ms - d.runtime_ms;
  rep.details["m"] = m;
  rep.details["order_sigma"] = perm(ord_p);
  rep.details["order_sigma_star"] = perm(ord_d);
  rep.details["scale_vs_completed"] = scale;
  rep.details["completed_rel_residual"] = completed.rel_residual;
  rep.details["residual_match"] = std::abs(rep.rel_residual - completed.rel_residual);
  rep.details["entry_rel_deviation_vs_completed"] = entry_dev;
  rep.details["linear_combination_discrepancy"] = lin_worst;
  if (std::abs(rep.rel_residual - completed.rel_residual) > 1e-12) {
    rep.pass = false;
    rep.notes.push_back("residual differs from the completed-FE residual");
  }
  if (lin_worst > 1e-10) {
    rep.pass = false;
    rep.notes.push_back("linear combination disagrees with the direct zeta distribution");
  }
  return rep;
}

inline VerificationReport verify_distribution_fe(const ConeModel& cone, const TestFunction& f, const CVec& s,
                                                 const QuadratureSpec& quad) {
  require_completion(cone);
  return verify_distribution_fe(cone, fe_data(cone, f, s, quad), quad);
}

}  // namespace czl
