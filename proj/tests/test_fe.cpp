#include <gtest/gtest.h>

#include "czl/calibration.hpp"
#include "czl/checks.hpp"
#include "czl/fe.hpp"

using namespace czl;

TEST(CompletedFE, RankOneClosedForms) {
  const auto c = load_catalog_cone("orthant_1");
  const QuadratureSpec q;
  for (cplx s : {cplx(0.3), cplx(0.5, 2.0), cplx(0.9)}) {
    const auto even = verify_completed_fe(c, gaussian(1), {s}, q);
    EXPECT_TRUE(even.pass) << s;
    EXPECT_LT(std::abs(even.lhs[0] - std::sqrt(0.5)), 1e-8);
    EXPECT_LT(std::abs(even.rhs[0] - std::sqrt(0.5)), 1e-8);
    const auto odd = verify_completed_fe(c, hermite(1, 1), {s}, q);
    const cplx want(0.0, 1.0 / std::sqrt(2.0 * kPi));
    EXPECT_TRUE(odd.pass) << s;
    EXPECT_LT(std::abs(odd.lhs[1] - want), 1e-8 * std::abs(want));
    EXPECT_LT(std::abs(odd.rhs[1] - want), 1e-8 * std::abs(want));
  }
}

TEST(RawFE, OrthantTwoMixedHermite) {
  const auto c = load_catalog_cone("orthant_2");
  const auto f = combination(2, {{{1, 0}, 1.0}, {{0, 2}, cplx(0.3, -0.2)}});
  const auto d = fe_data(c, f, {cplx(0.4, 1.0), cplx(0.7)}, QuadratureSpec{});
  EXPECT_TRUE(verify_raw_fe(c, d, QuadratureSpec{}).pass);
  EXPECT_TRUE(verify_completed_fe(c, d, QuadratureSpec{}).pass);
  EXPECT_TRUE(verify_distribution_fe(c, d, QuadratureSpec{}).pass);
  EXPECT_TRUE(verify_linear_combination(c, d, 3).pass);
}

TEST(RawFE, LorentzAdmissibleFunction) {
  const auto c = load_catalog_cone("lorentz_4");
  const auto rep = verify_raw_fe(c, vanishing_moment_function(c, 2), strip_point(c, {0.5, 0.5}), QuadratureSpec{});
  EXPECT_TRUE(rep.pass) << rep.rel_residual;
  EXPECT_LT(rep.rel_residual, 1e-4);
}

TEST(CompletedFE, LorentzOddFunction) {
  const auto c = load_catalog_cone("lorentz_4");
  const auto rep =
      verify_completed_fe(c, vanishing_moment_function(c, 3), strip_point(c, {0.35, 0.6}, {0.5, 0.0}), QuadratureSpec{});
  EXPECT_TRUE(rep.pass) << rep.rel_residual;
  EXPECT_LT(rep.rel_residual, 1e-4);
}

TEST(CompletedFE, NeedsTheCompletionCondition) {
  const auto c = load_catalog_cone("vinberg");
  EXPECT_THROW(require_completion(c), DomainError);
}

TEST(CompletedFE, OutsideStripIsAGuardError) {
  const auto c = load_catalog_cone("orthant_1");
  try {
    verify_completed_fe(c, gaussian(1), {cplx(1.5)}, QuadratureSpec{});
    FAIL();
  } catch (const GuardError& e) {
    EXPECT_NE(e.inequality().find("outside (0, 1)"), std::string::npos);
  }
}

TEST(Distribution, ResidualMatchesCompletedResidual) {
  const auto c = load_catalog_cone("orthant_1");
  const auto d = fe_data(c, hermite(1, 1), {cplx(0.6, -0.5)}, QuadratureSpec{});
  const auto completed = verify_completed_fe(c, d, QuadratureSpec{});
  const auto dist = verify_distribution_fe(c, d, QuadratureSpec{});
  EXPECT_TRUE(dist.pass);
  EXPECT_LE(std::abs(dist.rel_residual - completed.rel_residual), 1e-12);
}

TEST(Distribution, ZetaDistributionIsTheCharacterSum) {
  // Z_b = sum_eps kappa_eps(b sigma) Z_eps, computed against the orbit values directly
  const auto c = load_catalog_cone("orthant_2");
  const auto f = hermite(IVec{1, 1});
  const CVec s{cplx(0.3, 0.2), cplx(0.8)};
  const auto z = zeta_vector(c, fourier_transform(f), s, QuadratureSpec{}, Side::primal);
  for (std::size_t ib = 0; ib < 4; ++ib) {
    const IVec b = parity_from_index(ib, 2);
    const auto dv = zeta_distribution_from(c, b, z.values, Side::primal);
    cplx want = 0.0;
    for (std::size_t ie = 0; ie < 4; ++ie) want += static_cast<double>(kappa(sign_from_index(ie, 2), row_times_mod2(b, c.sigma))) * z.values[ie];
    EXPECT_LT(std::abs(dv.value - want), 1e-14 * std::max(1.0, std::abs(want)));
  }
}

TEST(Calibration, OrthantConstantsAreOne) {
  for (auto name : {"orthant_1", "orthant_2"}) {
    const auto res = calibration_report(load_catalog_cone(name), QuadratureSpec{});
    EXPECT_TRUE(res.report.pass) << name;
    EXPECT_NEAR(*res.cone.c_primal, 1.0, 1e-8) << name;
    EXPECT_NEAR(*res.cone.c_dual, 1.0, 1e-8) << name;
  }
}

TEST(Calibration, LorentzReproducesGindikinGamma) {
  const auto cone = calibrate_measure(load_catalog_cone("lorentz_4"), QuadratureSpec{});
  EXPECT_NEAR(*cone.c_primal, 1.0, 1e-6);
  QuadratureSpec q;
  q.target_tol = 1e-6;
  for (const CVec& s : {CVec{cplx(0.8, 0.3), cplx(3.1, -0.6)}, CVec{cplx(1.6), cplx(2.4, 0.9)}}) {
    const auto rep = verify_gindikin_identity(cone, s, q);
    EXPECT_TRUE(rep.pass) << rep.rel_residual;
  }
}

TEST(Calibration, MonteCarloAgreesLoosely) {
  QuadratureSpec q;
  q.scheme = QuadratureSpec::Scheme::monte_carlo;
  q.mc_samples = 200000;
  // for real s the sampler matches the integrand exactly; the phase of complex s gives it variance
  const auto c = load_catalog_cone("lorentz_4");
  const auto rep = verify_gindikin_identity(c, {cplx(1.0, 0.7), cplx(3.0, 0.3)}, q);
  EXPECT_TRUE(rep.pass) << rep.rel_residual;
  EXPECT_EQ(rep.tolerance, 5e-2);
  const double se = rep.convergence["delta"].get<double>();
  EXPECT_GT(se, 0.0);
  EXPECT_LT(std::abs(rep.lhs[0] - rep.rhs[0]), 5.0 * se);
}

TEST(Calibration, DivergentPointIsAGuardError) {
  const auto c = load_catalog_cone("lorentz_4");
  EXPECT_THROW(gindikin_integral(c, {cplx(0.5), cplx(1.0)}, Side::primal, QuadratureSpec{}), GuardError);
}
