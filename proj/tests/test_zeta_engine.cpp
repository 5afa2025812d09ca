#include <gtest/gtest.h>

#include <random>

#include "czl/checks.hpp"
#include "czl/fe.hpp"
#include "czl/zeta_engine.hpp"

using namespace czl;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// integral over [-L, L] of g by composite Gauss-Legendre
template <typename G>
cplx integrate_line(G g, double L = 7.0, int panels = 140) {
  const auto rule = gauss_legendre(20);
  cplx acc = 0.0;
  const double h = 2.0 * L / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -L + p * h;
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += 0.5 * h * rule.w[i] * g(a + 0.5 * h * (rule.x[i] + 1.0));
  }
  return acc;
}

}  // namespace

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  const auto g = gauss_legendre(10);
  double acc = 0.0, wsum = 0.0;
  for (int i = 0; i < 10; ++i) {
    acc += g.w[i] * std::pow(g.x[i], 18);
    wsum += g.w[i];
  }
  EXPECT_NEAR(acc, 2.0 / 19.0, 1e-15);
  EXPECT_NEAR(wsum, 2.0, 1e-15);
  EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(Quadrature, TanhSinhHandlesEndpointSingularity) {
  const auto r = tanh_sinh(1.0 / 16);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.w.size(); ++i) acc += r.w[i] / std::sqrt(r.dl[i]);
  EXPECT_NEAR(acc, 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Quadrature, ExpSinhOnHalfLine) {
  const auto r = exp_sinh(1.0 / 16);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.w.size(); ++i) acc += r.w[i] * std::exp(-r.x[i]) / std::sqrt(r.x[i]);
  EXPECT_NEAR(acc, std::sqrt(kPi), 1e-12);
}

TEST(Quadrature, ParallelForIsOrderIndependent) {
  std::vector<double> one(1000), four(1000);
  auto body = [](std::vector<double>& out) {
    return [&out](std::size_t i) { out[i] = std::sin(static_cast<double>(i)) / (1.0 + i); };
  };
  parallel_for(one.size(), 1, body(one));
  parallel_for(four.size(), 4, body(four));
  EXPECT_EQ(one, four);
  EXPECT_EQ(pairwise_sum(one), pairwise_sum(four));
  EXPECT_THROW(parallel_for(8, 3, [](std::size_t i) { if (i == 5) throw QuadratureError("x"); }), QuadratureError);
}

TEST(Quadrature, Ladder) {
  EXPECT_EQ(tolerance_ladder(1), 1e-8);
  EXPECT_EQ(tolerance_ladder(2), 1e-8);
  EXPECT_EQ(tolerance_ladder(3), 1e-4);
  EXPECT_EQ(tolerance_ladder(5), 5e-3);
}

TEST(TestFunctions, HermiteFunctionsAreFourierEigenfunctions) {
  const double y = 0.37;
  for (int k = 0; k <= 5; ++k) {
    const auto f = hermite(k, 1);
    const cplx num = integrate_line([&](double x) { return f({x}) * std::exp(cplx(0.0, 2.0 * kPi * x * y)); });
    const cplx want = fourier_transform(f)({y});
    EXPECT_LT(std::abs(num - want), 1e-13) << "k=" << k;
    EXPECT_LT(std::abs(inverse_fourier_transform(fourier_transform(f))({y}) - f({y})), 1e-15);
  }
}

TEST(TestFunctions, PolynomialRoundTrip) {
  const Polynomial p{{{2, 0}, 1.5}, {{1, 3}, cplx(0.0, -2.0)}, {{0, 0}, 0.25}};
  const auto f = from_polynomial(2, p);
  const auto back = f.polynomial();
  ASSERT_EQ(back.size(), p.size());
  for (auto& [e, c] : p) EXPECT_LT(std::abs(back.at(e) - c), 1e-14);
}

TEST(TestFunctions, ReflectionIsParity) {
  const auto f = combination(2, {{{1, 0}, 1.0}, {{2, 1}, cplx(0.5, 0.5)}, {{2, 2}, 3.0}});
  const auto g = reflect(f);
  EXPECT_LT(std::abs(g({0.3, -0.8}) - f({-0.3, 0.8})), 1e-15);
}

TEST(TestFunctions, VanishingMoments) {
  const auto cone = load_catalog_cone("orthant_1");
  for (int deg : {2, 3, 4}) {
    const auto f = vanishing_moment_function(cone, deg);
    for (int j = 0; j < deg; ++j) {
      const cplx m = integrate_line([&](double x) { return f({x}) * std::pow(x, j); });
      EXPECT_LT(std::abs(m), 1e-15) << "deg " << deg << " moment " << j;
    }
    const cplx top = integrate_line([&](double x) { return f({x}) * std::pow(x, deg); });
    EXPECT_GT(std::abs(top), 1e-4);
  }
}

TEST(TestFunctions, Descriptors) {
  const auto c = load_catalog_cone("lorentz_4");
  EXPECT_EQ(make_test_function(c, "gaussian").terms.size(), 1u);
  EXPECT_EQ(make_test_function(c, "hermite:3").terms.begin()->first, (IVec{3, 0, 0, 0, 0, 0}));
  EXPECT_EQ(make_test_function(c, "hermite:1,0,0,0,2,0").terms.begin()->first, (IVec{1, 0, 0, 0, 2, 0}));
  EXPECT_EQ(make_test_function(c, "vanishing:3").label, "vanishing:3");
  EXPECT_THROW(make_test_function(c, "hermite:1,2"), DomainError);
  EXPECT_THROW(make_test_function(c, "hermite:x"), DomainError);
  EXPECT_THROW(make_test_function(c, "bump"), DomainError);
}

TEST(Zeta, RankOneTateIntegrals) {
  // Z_+(e^{-pi x^2}; s) = pi^{-s/2} Gamma(s/2) / 2, and the odd Hermite function gives the s+1 analogue
  const auto c = load_catalog_cone("orthant_1");
  const QuadratureSpec q;
  const CVec s{cplx(0.7, 0.4)};
  const cplx g_want(0.520594941543172490, -0.504243230563607261);
  const cplx h_want(0.186207058884804445, -0.077664142079814386);
  EXPECT_LT(rel(local_zeta(c, {1}, gaussian(1), s, q, Side::primal), g_want), 1e-12);
  EXPECT_LT(rel(local_zeta(c, {-1}, gaussian(1), s, q, Side::primal), g_want), 1e-12);
  EXPECT_LT(rel(local_zeta(c, {1}, hermite(1, 1), s, q, Side::primal), h_want), 1e-12);
  EXPECT_LT(rel(local_zeta(c, {-1}, hermite(1, 1), s, q, Side::primal), -h_want), 1e-12);
}

TEST(Zeta, LorentzPositiveOrbitGaussian) {
  // independent three-dimensional cubature in (x1, x2, |X|), times 4 for the orthonormal block coordinates
  const auto c = load_catalog_cone("lorentz_4");
  const cplx got = local_zeta(c, {1, 1}, gaussian(6), {1.0, 4.5}, QuadratureSpec{}, Side::primal);
  EXPECT_LT(rel(got, 0.00167917725073461256), 1e-9);
}

TEST(Zeta, BareGaussianDivergesOnLorentzMixedOrbits) {
  const auto c = load_catalog_cone("lorentz_4");
  const CVec s = strip_point(c, {0.5, 0.5});
  try {
    zeta_vector(c, gaussian(6), s, QuadratureSpec{}, Side::primal);
    FAIL() << "expected a guard error";
  } catch (const GuardError& e) {
    EXPECT_NE(e.inequality().find("small-|x1|"), std::string::npos) << e.inequality();
  }
  EXPECT_THROW(local_zeta(c, {1, -1}, gaussian(6), s, QuadratureSpec{}, Side::primal), GuardError);
  EXPECT_FALSE(convergence_report(c, gaussian(6), s, Side::primal).empty());
  // the functional equation integrates the transform on the primal side and f on the dual side
  const auto f = vanishing_moment_function(c, 2);
  EXPECT_TRUE(convergence_report(c, fourier_transform(f), s, Side::primal).empty());
  EXPECT_TRUE(convergence_report(c, f, tau_transform(c, s), Side::dual).empty());
}

TEST(Zeta, GindikinDomainGuard) {
  const auto c = load_catalog_cone("lorentz_4");
  EXPECT_FALSE(gindikin_guard(c, {0.5, 1.0}, Side::primal).empty());
  EXPECT_FALSE(gindikin_guard(c, {1.5, 2.0}, Side::primal).empty());
  EXPECT_TRUE(gindikin_guard(c, {1.5, 2.5}, Side::primal).empty());
}

TEST(Zeta, MonteCarloIsRejected) {
  QuadratureSpec q;
  q.scheme = QuadratureSpec::Scheme::monte_carlo;
  const auto c = load_catalog_cone("orthant_1");
  EXPECT_THROW(zeta_vector(c, gaussian(1), {cplx(0.5)}, q, Side::primal), DomainError);
}

TEST(Zeta, ThreadCountDoesNotChangeValues) {
  const auto c = load_catalog_cone("lorentz_4");
  const auto f = fourier_transform(vanishing_moment_function(c, 2));
  const CVec s = strip_point(c, {0.3, 0.6}, {0.4, -0.2});
  QuadratureSpec one, three;
  three.threads = 3;
  const auto a = zeta_vector(c, f, s, one, Side::primal);
  const auto b = zeta_vector(c, f, s, three, Side::primal);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.doubling_delta, b.doubling_delta);
}

TEST(Strip, PointsAndViolations) {
  for (auto& name : catalog_names()) {
    const auto c = load_catalog_cone(name);
    const int r = c.rank();
    const CVec mid = strip_point(c, std::vector<double>(r, 0.5));
    EXPECT_TRUE(strip_violations(c, mid).empty()) << name;
    const auto pt = spectral_point(c, mid);
    for (int j = 0; j < r; ++j) EXPECT_NEAR(pt.w[j].real(), 0.5, 1e-14) << name;
    EXPECT_EQ(strip_violations(c, strip_point(c, std::vector<double>(r, 1.5))).size(), static_cast<std::size_t>(r));
  }
  EXPECT_THROW(require_strip(load_catalog_cone("orthant_1"), {cplx(1.2)}), GuardError);
}

TEST(Strip, AutoPointsStartAtMidpointAndRepeat) {
  const auto c = load_catalog_cone("vinberg");
  const auto f = gaussian(c.dim());
  const auto a = auto_strip_points(c, f, 7), b = auto_strip_points(c, f, 7), d = auto_strip_points(c, f, 8);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a[1], d[1]);
  const auto pt = spectral_point(c, a[0]);
  for (auto& w : pt.w) EXPECT_NEAR(w.real(), 0.5, 1e-14);
  for (auto& s : a) EXPECT_TRUE(strip_violations(c, s).empty());
}

TEST(Strip, AutoPointsRejectDivergentFunctions) {
  const auto c = load_catalog_cone("lorentz_4");
  EXPECT_THROW(auto_strip_points(c, gaussian(6), 7), GuardError);
}
