#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "czl/core.hpp"

namespace czl {

inline constexpr const char* kSchemaVersion = "czl-report/1";

/// One named check with both sides and residuals.
struct VerificationReport {
  std::string check_id;
  std::string cone;
  nlohmann::json inputs = nlohmann::json::object();
  CVec lhs;
  CVec rhs;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long runtime_ms = 0;
  nlohmann::json convergence = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> notes;

  /// Residuals from lhs/rhs. A component is judged relative to its own size unless
  /// that size is below floor = max(1e-12, floor_rel * largest component), in which
  /// case it is judged against the floor.
  void score(double tol, double floor_rel = 0.0) {
    tolerance = tol;
    abs_residual = 0.0;
    rel_residual = 0.0;
    double top = 0.0;
    for (std::size_t i = 0; i < lhs.size() && i < rhs.size(); ++i)
      top = std::max({top, std::abs(lhs[i]), std::abs(rhs[i])});
    const double floor = std::max(1e-12, floor_rel * top);
    for (std::size_t i = 0; i < lhs.size() && i < rhs.size(); ++i) {
      const double d = std::abs(lhs[i] - rhs[i]);
      const double scale = std::max(std::abs(lhs[i]), std::abs(rhs[i]));
      if (!std::isfinite(d)) {
        abs_residual = rel_residual = HUGE_VAL;
        continue;
      }
      abs_residual = std::max(abs_residual, d);
      rel_residual = std::max(rel_residual, scale < floor ? (floor > 1e-12 ? d / floor : d) : d / scale);
    }
    if (floor_rel > 0.0) details["residual_floor"] = floor;
    pass = rel_residual <= tol;
  }
};

inline nlohmann::json complex_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json cvec_to_json(const CVec& v) {
  auto a = nlohmann::json::array();
  for (auto& z : v) a.push_back(complex_to_json(z));
  return a;
}

inline cplx complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("complex value must be a number or [re, im]");
}

inline nlohmann::json to_json(const VerificationReport& r, bool with_runtime = true) {
  nlohmann::json j;
  j["check_id"] = r.check_id;
  j["cone"] = r.cone;
  j["inputs"] = r.inputs;
  j["lhs"] = cvec_to_json(r.lhs);
  j["rhs"] = cvec_to_json(r.rhs);
  j["abs_residual"] = r.abs_residual;
  j["rel_residual"] = r.rel_residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  if (with_runtime) j["runtime_ms"] = r.runtime_ms;
  j["convergence"] = r.convergence;
  j["details"] = r.details;
  j["notes"] = r.notes;
  return j;
}

}  // namespace czl
