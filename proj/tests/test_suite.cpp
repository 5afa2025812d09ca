#include <gtest/gtest.h>

#include "czl/suite.hpp"

using namespace czl;

TEST(Report, ScoreUsesRelativeResidual) {
  VerificationReport r;
  r.lhs = {cplx(1.0), cplx(100.0)};
  r.rhs = {cplx(1.0 + 1e-9), cplx(100.0)};
  r.score(1e-8);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.rel_residual, 1e-9, 1e-12);
  r.score(1e-10);
  EXPECT_FALSE(r.pass);
}

TEST(Report, TinyComponentsAreJudgedAbsolutely) {
  VerificationReport r;
  r.lhs = {cplx(1e-14), cplx(1.0)};
  r.rhs = {cplx(-1e-14), cplx(1.0)};
  r.score(1e-8);
  EXPECT_TRUE(r.pass);
  // with a noise floor relative to the largest component
  r.lhs = {cplx(1e-6), cplx(1.0)};
  r.rhs = {cplx(2e-6), cplx(1.0)};
  r.score(1e-2, 1e-3);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.rel_residual, 1e-3, 1e-12);
  r.score(1e-2);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.rel_residual, 0.5, 1e-12);
}

TEST(Report, NonFiniteFails) {
  VerificationReport r;
  r.lhs = {cplx(NAN)};
  r.rhs = {cplx(1.0)};
  r.score(1.0);
  EXPECT_FALSE(r.pass);
}

TEST(Report, JsonShape) {
  VerificationReport r;
  r.check_id = "x";
  r.lhs = {cplx(1.0, 2.0)};
  r.rhs = {cplx(1.0, 2.0)};
  r.runtime_ms = 12;
  r.score(1e-8);
  const auto j = to_json(r);
  EXPECT_EQ(j["lhs"][0], nlohmann::json::array({1.0, 2.0}));
  EXPECT_EQ(j["runtime_ms"], 12);
  EXPECT_FALSE(to_json(r, false).contains("runtime_ms"));
  EXPECT_EQ(complex_from_json(j["lhs"][0]), cplx(1.0, 2.0));
  EXPECT_EQ(complex_from_json(3.5), cplx(3.5));
  EXPECT_THROW(complex_from_json(nlohmann::json::array({1, 2, 3})), DomainError);
}

TEST(Errors, Classification) {
  EXPECT_EQ(error_to_json(GuardError("a", "x > 0"))["type"], "guard");
  EXPECT_EQ(error_to_json(GuardError("a", "x > 0"))["inequality"], "x > 0");
  EXPECT_EQ(error_to_json(PoleError("p", cplx(-1.0)))["where"], nlohmann::json::array({-1.0, 0.0}));
  EXPECT_EQ(error_to_json(NotChordalError("c"))["type"], "not-chordal");
  EXPECT_EQ(error_to_json(NotA4FreeError("c"))["type"], "not-a4-free");
  EXPECT_EQ(error_to_json(QuadratureError("q"))["type"], "quadrature");
  EXPECT_EQ(error_to_json(DomainError("d"))["type"], "domain");
  EXPECT_EQ(error_to_json(std::logic_error("l"))["type"], "internal");
}

TEST(Suite, AggregateDocument) {
  SuiteResult s;
  s.name = "desk";
  s.seed = 7;
  VerificationReport ok;
  ok.check_id = "a";
  ok.pass = true;
  s.entries.push_back({1, "one", ok, nullptr, true});
  s.entries.push_back({2, "two", std::nullopt, error_to_json(GuardError("g", "i")), false});
  EXPECT_FALSE(s.pass());
  EXPECT_TRUE(s.criterion_pass(1));
  EXPECT_FALSE(s.criterion_pass(2));
  EXPECT_FALSE(s.criterion_pass(3));
  const auto j = suite_to_json(s);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["kind"], "suite");
  EXPECT_EQ(j["failed"], nlohmann::json::array({"two"}));
  EXPECT_EQ(j["entries"][1]["error"]["type"], "guard");
  EXPECT_FALSE(j["entries"][1].contains("report"));
}

TEST(Checks, GraphReportCarriesStructure) {
  const auto rep = verify_graph({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, "K3");
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.details["m"], 1);
  EXPECT_EQ(rep.details["edges"], 3);
  EXPECT_THROW(verify_graph({{0, 1, 0, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, 1, 0}}), NotChordalError);
}
