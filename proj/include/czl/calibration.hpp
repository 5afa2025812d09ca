#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/quadrature.hpp"
#include "czl/report.hpp"
#include "czl/special_functions.hpp"
#include "czl/zeta_engine.hpp"

namespace czl {

// Exponential-weight integral over the convex orbit,
//   I(s) = int_Omega prod Delta_j(x)^{s_j} e^{-<x, e>} |Delta|^{-m} dx   (c = 1),
// on the chart (t, u) with every off-diagonal block radially reduced (u_k = rho_k e_1).

struct ChartAxis {
  std::vector<double> x;
  std::vector<double> w;
};

struct GindikinIntegral {
  cplx value;
  double delta = 0.0;  // node-doubling change, or the Monte Carlo standard error
  long nodes = 0;
  int axes = 0;
  std::string method;
};

namespace detail {

inline double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Exp-sinh nodes restricted to [lo, hi].
inline ChartAxis chart_axis(double h, double lo, double hi) {
  const auto es = exp_sinh(h);
  ChartAxis a;
  for (std::size_t i = 0; i < es.x.size(); ++i)
    if (es.x[i] >= lo && es.x[i] <= hi) {
      a.x.push_back(es.x[i]);
      a.w.push_back(es.w[i]);
    }
  return a;
}

struct ChartSetup {
  int r = 0;
  int axes = 0;
  std::vector<double> lo, hi;
  std::vector<int> block;  // rho axes: block index k; t axes: -1
};

inline ChartSetup chart_setup(const ConeModel& cone, const CVec& s, Side side) {
  ChartSetup c;
  c.r = cone.rank();
  const CVec ss = row_times(s, cone.multiplier(side));
  const IVec& shift = side == Side::primal ? cone.structure.p : cone.structure.q;
  for (int j = 0; j < c.r; ++j) {
    const double margin = ss[j].real() - 0.5 * shift[j];
    c.lo.push_back(std::exp(-40.0 / (2.0 * margin)));
    c.hi.push_back(9.0);
    c.block.push_back(-1);
  }
  if (cone.family == Family::star)
    for (int k = 1; k < c.r; ++k) {
      c.lo.push_back(std::exp(-40.0 / cone.block_dim(k)));
      c.hi.push_back(9.0);
      c.block.push_back(k);
    }
  c.axes = static_cast<int>(c.lo.size());
  return c;
}

/// Integrand at one chart node (axis values v), without quadrature weights.
inline cplx chart_integrand(const ConeModel& cone, const CVec& s, Side side, const ChartSetup& c,
                            const std::vector<double>& v, const std::vector<double>& m) {
  const int r = c.r;
  ChartPoint pt;
  pt.orbit_sign.assign(r, 1);
  pt.t.assign(v.begin(), v.begin() + r);
  pt.u.assign(cone.dim() - r, 0.0);
  double sphere = 1.0;
  for (int a = r; a < c.axes; ++a) {
    const int k = c.block[a];
    const int nk = cone.block_dim(k);
    pt.u[cone.block_offset(k) - r] = v[a];
    sphere *= sphere_area(nk) * std::pow(v[a], nk - 1);
  }
  const auto img = orbit_chart(cone, pt, side);
  double trace = 0.0;
  for (int j = 0; j < r; ++j) trace += img.x[j];
  // Delta_j = prod_k t_k^{2 sigma_jk} on the chart; evaluating it from x cancels badly when t_k << rho.
  const IMat& sig = cone.multiplier(side);
  cplx lg = -trace + std::log(img.jacobian * sphere);
  for (int j = 0; j < r; ++j) {
    double log_delta = 0.0;
    for (int k = 0; k < r; ++k) log_delta += 2.0 * sig[j][k] * std::log(pt.t[k]);
    lg += (s[j] - m[j]) * log_delta;
  }
  return std::exp(lg);
}

inline cplx chart_tensor(const ConeModel& cone, const CVec& s, Side side, int n, int threads, long* nodes) {
  const auto c = chart_setup(cone, s, side);
  const auto m = cone.measure_exponents(side);
  std::vector<ChartAxis> ax;
  for (int a = 0; a < c.axes; ++a) ax.push_back(chart_axis(1.0 / n, c.lo[a], c.hi[a]));
  std::size_t inner = 1;
  for (int a = 1; a < c.axes; ++a) inner *= ax[a].x.size();
  if (nodes) *nodes = static_cast<long>(inner * ax[0].x.size());
  CVec outer(ax[0].x.size(), 0.0);
  parallel_for(ax[0].x.size(), threads, [&](std::size_t i0) {
    std::vector<double> v(c.axes);
    v[0] = ax[0].x[i0];
    CVec vals(inner);
    for (std::size_t flat = 0; flat < inner; ++flat) {
      std::size_t rem = flat;
      double w = ax[0].w[i0];
      for (int a = c.axes - 1; a >= 1; --a) {
        const std::size_t sz = ax[a].x.size();
        const std::size_t idx = rem % sz;
        rem /= sz;
        v[a] = ax[a].x[idx];
        w *= ax[a].w[idx];
      }
      vals[flat] = w * chart_integrand(cone, s, side, c, v, m);
    }
    outer[i0] = pairwise_sum(vals);
  });
  return pairwise_sum(outer);
}

/// Importance sampling: t_j^2 ~ Gamma(Re(s sigma)_j - p_j/2) and rho_k^2 ~ Gamma(n_k/2), the
/// marginals of the integrand for real s. Fixed chunks with their own streams.
inline cplx chart_monte_carlo(const ConeModel& cone, const CVec& s, Side side, long samples, std::uint64_t seed,
                              int threads, double* stderr_out) {
  const auto c = chart_setup(cone, s, side);
  const auto m = cone.measure_exponents(side);
  const CVec ss = row_times(s, cone.multiplier(side));
  const IVec& shift = side == Side::primal ? cone.structure.p : cone.structure.q;
  std::vector<double> shape(c.axes);
  for (int a = 0; a < c.axes; ++a)
    shape[a] = a < c.r ? ss[a].real() - 0.5 * shift[a] : 0.5 * cone.block_dim(c.block[a]);
  // log of the proposal density of sqrt(G), G ~ Gamma(k): 2 v^{2k-1} e^{-v^2} / Gamma(k)
  auto log_pdf = [](double v, double k) { return std::log(2.0) + (2.0 * k - 1.0) * std::log(v) - v * v - std::lgamma(k); };
  constexpr long kChunk = 4096;
  const long chunks = std::max<long>(1, (samples + kChunk - 1) / kChunk);
  CVec sums(static_cast<std::size_t>(chunks), 0.0);
  std::vector<double> sq(static_cast<std::size_t>(chunks), 0.0);
  parallel_for(static_cast<std::size_t>(chunks), threads, [&](std::size_t ch) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * (ch + 1));
    std::vector<std::gamma_distribution<double>> draw;
    for (double k : shape) draw.emplace_back(k, 1.0);
    const long count = std::min<long>(kChunk, samples - static_cast<long>(ch) * kChunk);
    std::vector<double> v(c.axes);
    cplx acc = 0.0;
    double acc2 = 0.0;
    for (long i = 0; i < count; ++i) {
      double lp = 0.0;
      for (int a = 0; a < c.axes; ++a) {
        double g = draw[a](rng);
        while (!(g > 0.0)) g = draw[a](rng);
        v[a] = std::sqrt(g);
        lp += log_pdf(v[a], shape[a]);
      }
      const cplx val = chart_integrand(cone, s, side, c, v, m) * std::exp(-lp);
      acc += val;
      acc2 += std::norm(val);
    }
    sums[ch] = acc;
    sq[ch] = acc2;
  });
  const cplx total = pairwise_sum(sums);
  const double total2 = pairwise_sum(sq);
  const double mean_norm = std::norm(total / static_cast<double>(samples));
  const double var = std::max(0.0, total2 / samples - mean_norm);
  if (stderr_out) *stderr_out = std::sqrt(var / samples);
  return total / static_cast<double>(samples);
}

}  // namespace detail

inline int calibration_resolution(int axes, const QuadratureSpec& q) {
  if (q.nodes_per_axis > 0) return q.nodes_per_axis;
  return axes <= 3 ? 8 : 6;
}

/// I(s) with c = 1 on the given side.
inline GindikinIntegral gindikin_integral(const ConeModel& cone, const CVec& s, Side side, const QuadratureSpec& quad) {
  if (static_cast<int>(s.size()) != cone.rank()) throw DomainError("s length must equal rank");
  const auto bad = gindikin_guard(cone, s, side);
  if (!bad.empty()) {
    std::string all;
    for (auto& m : bad) all += (all.empty() ? "" : "; ") + m;
    throw GuardError("Gindikin integral diverges", all);
  }
  GindikinIntegral out;
  out.axes = detail::chart_setup(cone, s, side).axes;
  if (quad.scheme == QuadratureSpec::Scheme::monte_carlo) {
    out.method = "monte-carlo";
    out.nodes = quad.mc_samples;
    out.value = detail::chart_monte_carlo(cone, s, side, quad.mc_samples, quad.seed, quad.threads, &out.delta);
    return out;
  }
  out.method = "tensor exp-sinh";
  const int n = calibration_resolution(out.axes, quad);
  out.value = detail::chart_tensor(cone, s, side, n, quad.threads, &out.nodes);
  // Doubling is affordable up to three axes; beyond that the validation point is the check.
  if (quad.check_doubling && out.axes <= 3) {
    long fine_nodes = 0;
    const cplx fine = detail::chart_tensor(cone, s, side, 2 * n, quad.threads, &fine_nodes);
    out.delta = std::abs(fine - out.value);
    out.value = fine;
    out.nodes = fine_nodes;
  }
  return out;
}

inline double calibration_tolerance(int axes, const QuadratureSpec& q) {
  if (q.target_tol > 0.0) return q.target_tol;
  if (q.scheme == QuadratureSpec::Scheme::monte_carlo) return 5e-2;
  return axes <= 3 ? 1e-6 : 1e-4;
}

/// Default calibration point: s sigma = p/2 + (1.3, 1.4, ...) on the primal side,
/// and the analogue with sigma_*, q on the dual side.
inline CVec default_calibration_point(const ConeModel& cone, Side side, double base = 1.3) {
  const int r = cone.rank();
  const IVec& shift = side == Side::primal ? cone.structure.p : cone.structure.q;
  CVec target(r);
  for (int j = 0; j < r; ++j) target[j] = 0.5 * shift[j] + base + 0.1 * j;
  return row_times(target, unimodular_inverse(cone.multiplier(side)));
}

/// c * I(s) against the closed-form Gindikin gamma.
inline VerificationReport verify_gindikin_identity(const ConeModel& cone, const CVec& s, const QuadratureSpec& quad,
                                                   Side side = Side::primal) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check_id = "gindikin";
  rep.cone = cone.name;
  rep.inputs = {{"s", cvec_to_json(s)}, {"side", side_name(side)}, {"quadrature", quad_to_json(quad)}};
  const auto I = gindikin_integral(cone, s, side, quad);
  rep.lhs = {cone.calibration(side) * I.value};
  rep.rhs = {gindikin_gamma(cone.structure, row_times(s, cone.multiplier(side)), side)};
  rep.convergence = {{"method", I.method}, {"axes", I.axes}, {"nodes", I.nodes}, {"delta", I.delta}};
  rep.details = {{"calibration", cone.calibration(side)}};
  rep.score(calibration_tolerance(I.axes, quad));
  rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct CalibrationResult {
  ConeModel cone;
  VerificationReport report;
};

/// Fixes c_primal and c_dual from the Gindikin identity at s0 and validates at s1.
/// Without explicit points each side uses its own default point.
inline CalibrationResult calibration_report(const ConeModel& cone, const QuadratureSpec& quad,
                                            std::optional<CVec> s0 = std::nullopt,
                                            std::optional<CVec> s1 = std::nullopt) {
  const auto t0 = std::chrono::steady_clock::now();
  CalibrationResult out{cone, {}};
  auto& rep = out.report;
  rep.check_id = "calibrate";
  rep.cone = cone.name;
  rep.inputs = {{"quadrature", quad_to_json(quad)}};
  nlohmann::json sides = nlohmann::json::object();
  int axes = 0;
  for (Side side : {Side::primal, Side::dual}) {
    const CVec a = s0 ? *s0 : default_calibration_point(cone, side);
    const CVec b = s1 ? *s1 : default_calibration_point(cone, side, 1.75);
    const auto Ia = gindikin_integral(cone, a, side, quad);
    const cplx ga = gindikin_gamma(cone.structure, row_times(a, cone.multiplier(side)), side);
    const cplx c = ga / Ia.value;
    (side == Side::primal ? out.cone.c_primal : out.cone.c_dual) = c.real();
    const auto Ib = gindikin_integral(cone, b, side, quad);
    rep.lhs.push_back(c.real() * Ib.value);
    rep.rhs.push_back(gindikin_gamma(cone.structure, row_times(b, cone.multiplier(side)), side));
    axes = std::max(axes, Ia.axes);
    sides[side_name(side)] = {{"s0", cvec_to_json(a)},
                              {"s1", cvec_to_json(b)},
                              {"constant", c.real()},
                              {"constant_imag", c.imag()},
                              {"integral_s0", complex_to_json(Ia.value)},
                              {"method", Ia.method},
                              {"nodes", Ia.nodes},
                              {"delta_s0", Ia.delta},
                              {"delta_s1", Ib.delta}};
  }
  rep.details = sides;
  rep.score(calibration_tolerance(axes, quad));
  rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// As calibration_report, but a failed validation is an error.
inline ConeModel calibrate_measure(const ConeModel& cone, const QuadratureSpec& quad,
                                   std::optional<CVec> s0 = std::nullopt, std::optional<CVec> s1 = std::nullopt) {
  auto res = calibration_report(cone, quad, s0, s1);
  if (!res.report.pass)
    throw QuadratureError("calibration validation residual " + detail::fmt(res.report.rel_residual) +
                          " above tolerance " + detail::fmt(res.report.tolerance));
  return res.cone;
}

}  // namespace czl
