#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/fe.hpp"
#include "czl/report.hpp"
#include "czl/sign_character.hpp"
#include "czl/special_functions.hpp"
#include "czl/test_function.hpp"

namespace czl {

namespace detail {

inline long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
}

inline double rel_dev(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < 1e-300 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace detail

/// tJ J = I for r = 1..rmax, and kappa_a . kappa_b = 2^r delta_ab in integers.
inline VerificationReport verify_character_orthogonality(int rmax = 6) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "characters";
  rep.inputs = {{"r_max", rmax}};
  double worst = 0.0;
  long bad_int = 0;
  for (int r = 1; r <= rmax; ++r) {
    const auto b = build_J(r);
    const RMat dev = b.J.transpose() * b.J - RMat::Identity(b.J.rows(), b.J.cols());
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
    const std::size_t count = std::size_t{1} << r;
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t c = 0; c < count; ++c) {
        long dot = 0;
        for (std::size_t e = 0; e < count; ++e) dot += static_cast<long>(b.kappa[e][a]) * b.kappa[e][c];
        if (dot != (a == c ? static_cast<long>(count) : 0L)) ++bad_int;
      }
  }
  rep.lhs = {worst, static_cast<double>(bad_int)};
  rep.rhs = {0.0, 0.0};
  rep.abs_residual = worst;
  rep.rel_residual = worst;
  rep.tolerance = 1e-14;
  rep.pass = worst < 1e-14 && bad_int == 0;
  rep.details = {{"max_orthogonality_deviation", worst}, {"integer_kappa_failures", bad_int}};
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Diagonalization: tJ A_reduced(alpha) J is diagonal with entries (-1)^m 2^r i^{|a|} Q_a(alpha); both m.
inline VerificationReport verify_lemma_diag(int r, int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "lemma-diag";
  rep.inputs = {{"r", r}, {"trials", trials}, {"seed", seed}};
  const auto basis = build_J(r);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(-1.0, 1.0);
  double offdiag = 0.0;
  for (int m : {0, 1})
    for (int t = 0; t < trials; ++t) {
      CVec alpha(r);
      for (auto& a : alpha) a = cplx(re(rng), im(rng));
      const auto D = diagonalize_gamma_matrix(gamma_matrix_reduced(m, alpha), basis);
      offdiag = std::max(offdiag, D.offdiag_residual);
      const CVec want = lemma_diagonal(m, alpha);
      rep.lhs.insert(rep.lhs.end(), D.diagonal.begin(), D.diagonal.end());
      rep.rhs.insert(rep.rhs.end(), want.begin(), want.end());
    }
  rep.score(1e-10);
  const double off_tol = 1e-10 * std::ldexp(1.0, r);
  rep.details = {{"offdiag_residual", offdiag}, {"offdiag_tolerance", off_tol}, {"m_values", {0, 1}}};
  if (!(offdiag < off_tol)) {
    rep.pass = false;
    rep.notes.push_back("off-diagonal residual above 1e-10 * 2^r");
  }
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// The reflection-duplication identity at random z (both parities), with the recurrence,
/// reflection and duplication formulas it is built from.
inline VerificationReport verify_gamma_identity(int trials, std::uint64_t seed, double pole_margin = 0.1) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "gamma-identity";
  rep.inputs = {{"trials", trials}, {"seed", seed}, {"pole_margin", pole_margin}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double rec = 0.0, refl = 0.0, dup = 0.0;
  int drawn = 0;
  while (drawn < trials) {
    const cplx z(u(rng), u(rng));
    // every gamma argument below stays off the poles
    if (detail::pole_distance(z) < pole_margin || detail::pole_distance(1.0 - z) < pole_margin ||
        detail::pole_distance(0.5 * z) < pole_margin || detail::pole_distance(0.5 * (z + 1.0)) < pole_margin)
      continue;
    ++drawn;
    for (int a : {0, 1}) {
      const auto sides = reflection_duplication(z, a);
      rep.lhs.push_back(sides.lhs);
      rep.rhs.push_back(sides.rhs);
    }
    const cplx g = gamma_complex(z);
    rec = std::max(rec, detail::rel_dev(gamma_complex(z + 1.0), z * g));
    refl = std::max(refl, detail::rel_dev(g * gamma_complex(1.0 - z) * sin_pi(z), cplx(kPi)));
    const cplx dup_rhs = real_pow(2.0, z) / (2.0 * std::sqrt(kPi)) * gamma_complex(0.5 * z) * gamma_complex(0.5 * (z + 1.0));
    dup = std::max(dup, detail::rel_dev(g, dup_rhs));
  }
  rep.score(1e-10);
  rep.details = {{"recurrence_rel", rec}, {"reflection_rel", refl}, {"duplication_rel", dup}};
  if (!(rec < 1e-12)) rep.notes.push_back("Gamma(z+1) = z Gamma(z) above 1e-12");
  if (!(refl < 1e-10)) rep.notes.push_back("reflection formula above 1e-10");
  if (!(dup < 1e-10)) rep.notes.push_back("duplication formula above 1e-10");
  rep.pass = rep.pass && rec < 1e-12 && refl < 1e-10 && dup < 1e-10;
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Half-gamma ratio at random strip points of a cone, every parity a.
inline VerificationReport verify_half_gamma(const ConeModel& cone, int points, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "half-gamma";
  rep.cone = cone.name;
  rep.inputs = {{"points", points}, {"seed", seed}};
  const int r = cone.rank();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(0.05, 0.95), im(-2.0, 2.0);
  double wv = 0.0;
  nlohmann::json pts = nlohmann::json::array();
  for (int i = 0; i < points; ++i) {
    std::vector<double> theta(r), imag(r);
    for (int j = 0; j < r; ++j) {
      theta[j] = th(rng);
      imag[j] = im(rng);
    }
    const auto pt = spectral_point(cone, strip_point(cone, theta, imag));
    pts.push_back(cvec_to_json(pt.s));
    wv = std::max(wv, detail::max_dev_from_one(pt.w, pt.v));
    for (std::size_t ia = 0; ia < (std::size_t{1} << r); ++ia) {
      const auto sides = half_gamma_ratio(pt, parity_from_index(ia, r));
      rep.lhs.push_back(sides.lhs);
      rep.rhs.push_back(sides.rhs);
    }
  }
  rep.score(1e-9);
  rep.details = {{"points", pts}, {"w_plus_v_minus_1", wv}};
  if (wv > 1e-12) {
    rep.pass = false;
    rep.notes.push_back("w + v = 1 fails");
  }
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Structure constants of a chordal A4-free graph; the checked invariants are
/// sum n_kj = 4 |E| and m = |E| mod 2. Rejections propagate as errors.
inline VerificationReport verify_graph(const IMat& adj, const std::string& label = "graph") {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "graph";
  rep.cone = label;
  rep.inputs = {{"adjacency", adj}};
  const auto g = build_structure_from_graph(adj);
  long edges = 0, total = 0;
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (std::size_t j = i + 1; j < adj.size(); ++j) edges += adj[i][j];
  for (auto& row : g.structure.dims)
    for (int v : row) total += v;
  rep.lhs = {static_cast<double>(total), g.m ? static_cast<double>(*g.m) : -1.0};
  rep.rhs = {4.0 * edges, static_cast<double>(edges % 2)};
  rep.score(0.0);
  nlohmann::json dims = nlohmann::json::array();
  for (int k = 0; k < g.structure.rank; ++k)
    for (int j = 0; j < k; ++j) dims.push_back({k + 1, j + 1, g.structure.dims[k][j]});
  nlohmann::json d = nlohmann::json::array();
  for (int j = 0; j < g.structure.rank; ++j) d.push_back(g.structure.d(j));
  rep.details = {{"rank", g.structure.rank},
                 {"vertex_order", g.order},
                 {"dims", dims},
                 {"p", g.structure.p},
                 {"q", g.structure.q},
                 {"d", d},
                 {"n", g.structure.ambient_dim},
                 {"edges", edges},
                 {"m", g.m ? nlohmann::json(*g.m) : nlohmann::json("fails")}};
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// Zeta distributions two ways on both sides of an FE computation: the sign-character
/// combination of orbit integrals and the characters read off the invariants.
inline VerificationReport verify_linear_combination(const ConeModel& cone, const FEData& d, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "zeta-distribution";
  rep.cone = cone.name;
  rep.inputs = {{"s", cvec_to_json(d.point.s)}, {"f", test_function_to_json(d.f)}, {"seed", seed}};
  const int r = cone.rank();
  double worst = 0.0;
  for (Side side : {Side::primal, Side::dual}) {
    const CVec& z = side == Side::primal ? d.primal.values : d.dual.values;
    for (std::size_t ib = 0; ib < (std::size_t{1} << r); ++ib) {
      const auto v = zeta_distribution_from(cone, parity_from_index(ib, r), z, side, seed);
      rep.lhs.push_back(v.value);
      rep.rhs.push_back(v.direct);
      worst = std::max(worst, v.discrepancy);
    }
  }
  rep.score(1e-10);
  rep.details = {{"max_discrepancy", worst}, {"order", "primal b in A, then dual b in A"}};
  rep.runtime_ms = detail::elapsed_ms(t0);
  return rep;
}

/// R sigma_* R^{-1} against sigma; passes when the integer comparison gives the expected verdict.
inline VerificationReport verify_reversal(const ConeModel& cone, bool expect_equal) {
  VerificationReport rep;
  rep.check_id = "reversal";
  rep.cone = cone.name;
  const auto rc = reversal_conjugation_check(cone.sigma, cone.sigma_star);
  for (auto& row : rc.conjugated)
    for (int v : row) rep.lhs.push_back(static_cast<double>(v));
  for (auto& row : cone.sigma)
    for (int v : row) rep.rhs.push_back(static_cast<double>(v));
  rep.score(0.0);
  rep.tolerance = 0.0;
  rep.pass = rc.equal == expect_equal;
  rep.details = {{"conjugated", rc.conjugated}, {"sigma", cone.sigma}, {"sigma_star", cone.sigma_star},
                 {"equal", rc.equal}, {"expected_equal", expect_equal}};
  return rep;
}

// ---------------------------------------------------------------- test functions

/// Hermite polynomial orthogonal for the weight e^{-pi x^2} (variance 1/(2 pi)), monic.
inline std::vector<double> gaussian_orthogonal_poly(int deg) {
  if (deg < 0) throw DomainError("degree must be nonnegative");
  const double v = 1.0 / (2.0 * kPi);
  std::vector<double> prev{1.0};
  if (deg == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int k = 1; k < deg; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += cur[i];
    for (int i = 0; i < k; ++i) next[i] -= k * v * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// He_deg(x_1) * prod_{k >= 2} x_k^2 * e^{-pi |x|^2}. Its moments in x_1 below deg vanish,
/// which makes the mixed-orbit integrals converge where the bare Gaussian does not.
inline TestFunction vanishing_moment_function(const ConeModel& cone, int deg) {
  const auto P = gaussian_orthogonal_poly(deg);
  Polynomial poly;
  IVec e(cone.dim(), 0);
  if (cone.family == Family::star)
    for (int k = 1; k < cone.rank(); ++k) e[k] = 2;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (P[i] != 0.0) {
      e[0] = static_cast<int>(i);
      poly[e] = P[i];
    }
  auto f = from_polynomial(cone.dim(), poly);
  f.label = "vanishing:" + std::to_string(deg);
  return f;
}

/// Descriptor: gaussian | hermite:K (first coordinate) | hermite:k1,k2,... | vanishing:D.
inline TestFunction make_test_function(const ConeModel& cone, const std::string& desc) {
  auto ints = [&](const std::string& s) {
    IVec out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t comma = s.find(',', pos);
      const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        out.push_back(std::stoi(tok, &used));
        if (used != tok.size()) throw DomainError("");
      } catch (const std::exception&) {
        throw DomainError("bad integer '" + tok + "' in test function '" + desc + "'");
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  };
  if (desc == "gaussian") return gaussian(cone.dim());
  const auto colon = desc.find(':');
  const std::string kind = desc.substr(0, colon);
  if (colon == std::string::npos) throw DomainError("unknown test function '" + desc + "'");
  const IVec k = ints(desc.substr(colon + 1));
  if (kind == "hermite") {
    if (k.size() == 1) {
      auto f = hermite(k[0], cone.dim());
      return f;
    }
    if (static_cast<int>(k.size()) != cone.dim()) throw DomainError("hermite multi-degree length must equal the cone dimension");
    return hermite(k);
  }
  if (kind == "vanishing" && k.size() == 1) return vanishing_moment_function(cone, k[0]);
  throw DomainError("unknown test function '" + desc + "'");
}

}  // namespace czl
