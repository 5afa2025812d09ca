#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "czl/core.hpp"
#include "czl/report.hpp"

namespace czl {

enum class Side { primal, dual };

inline const char* side_name(Side s) { return s == Side::primal ? "primal" : "dual"; }

/// Structure constants n_kj and everything derived from them. Indices are 0-based:
/// dims[k][j] for j < k holds n_{k+1,j+1}.
struct ConeStructure {
  int rank = 0;
  IMat dims;
  IVec p;
  IVec q;
  IVec d_twice;  // 2d, so d stays exact
  int ambient_dim = 0;

  double d(int j) const { return 0.5 * d_twice[j]; }
  std::vector<double> d_vec() const {
    std::vector<double> out(rank);
    for (int j = 0; j < rank; ++j) out[j] = d(j);
    return out;
  }
  int n(int k, int j) const { return dims[k][j]; }
};

/// Builds p, q, d, n from a full r x r table (only the strict lower triangle is read).
inline ConeStructure derive_constants(const IMat& table, int rank) {
  if (rank < 1) throw DomainError("rank must be at least 1");
  if (static_cast<int>(table.size()) != rank) throw DomainError("dims table must have rank rows");
  ConeStructure s;
  s.rank = rank;
  s.dims.assign(rank, IVec(rank, 0));
  s.p.assign(rank, 0);
  s.q.assign(rank, 0);
  s.d_twice.assign(rank, 2);
  int off = 0;
  for (int k = 0; k < rank; ++k) {
    if (static_cast<int>(table[k].size()) != rank) throw DomainError("dims table must be square");
    for (int j = 0; j < k; ++j) {
      const int v = table[k][j];
      if (v < 0) throw DomainError("structure constants must be nonnegative");
      s.dims[k][j] = v;
      s.p[k] += v;
      s.q[j] += v;
      off += v;
    }
  }
  for (int j = 0; j < rank; ++j) s.d_twice[j] = 2 + s.p[j] + s.q[j];
  s.ambient_dim = rank + off;
  return s;
}

/// Same, from (k, j, n_kj) triples with 1-based k > j.
inline ConeStructure derive_constants(int rank, const std::vector<std::array<int, 3>>& triples) {
  if (rank < 1) throw DomainError("rank must be at least 1");
  IMat table(rank, IVec(rank, 0));
  for (auto& t : triples) {
    const int k = t[0], j = t[1];
    if (!(1 <= j && j < k && k <= rank)) throw DomainError("dims entry needs 1 <= j < k <= rank");
    table[k - 1][j - 1] = t[2];
  }
  return derive_constants(table, rank);
}

/// The m in {0,1} with sum_{j<k} eps_j delta_k n_kj = 4m mod 8 for all sign pairs, if any.
inline std::optional<int> check_completion_condition(const ConeStructure& s) {
  const int r = s.rank;
  const std::size_t count = std::size_t{1} << r;
  std::optional<int> found;
  for (std::size_t ie = 0; ie < count; ++ie) {
    const IVec eps = sign_from_index(ie, r);
    for (std::size_t id = 0; id < count; ++id) {
      const IVec del = sign_from_index(id, r);
      long sum = 0;
      for (int k = 0; k < r; ++k)
        for (int j = 0; j < k; ++j) sum += static_cast<long>(eps[j]) * del[k] * s.dims[k][j];
      const long res = ((sum % 8) + 8) % 8;
      if (res != 0 && res != 4) return std::nullopt;
      const int m = static_cast<int>(res / 4);
      if (found && *found != m) return std::nullopt;
      found = m;
    }
  }
  return found;
}

// ---------------------------------------------------------------- integer matrices

inline IMat identity_matrix(int r) {
  IMat m(r, IVec(r, 0));
  for (int i = 0; i < r; ++i) m[i][i] = 1;
  return m;
}

/// Exact inverse of an integer matrix with determinant +-1.
inline IMat unimodular_inverse(const IMat& m) {
  const int r = static_cast<int>(m.size());
  std::vector<std::vector<Rational>> a(r, std::vector<Rational>(2 * r));
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(m[i].size()) != r) throw DomainError("matrix must be square");
    for (int j = 0; j < r; ++j) a[i][j] = Rational(m[i][j]);
    a[i][r + i] = Rational(1);
  }
  Rational det(1);
  for (int c = 0; c < r; ++c) {
    int piv = -1;
    for (int i = c; i < r; ++i)
      if (a[i][c].num != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw DomainError("matrix is singular");
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = det * Rational(-1);
    }
    const Rational pv = a[c][c];
    det = det * pv;
    const Rational inv(pv.den, pv.num);
    for (auto& v : a[c]) v = v * inv;
    for (int i = 0; i < r; ++i) {
      if (i == c || a[i][c].num == 0) continue;
      const Rational f = a[i][c];
      for (int j = 0; j < 2 * r; ++j) a[i][j] = a[i][j] - f * a[c][j];
    }
  }
  if (!(det == Rational(1) || det == Rational(-1))) throw DomainError("matrix is not unimodular");
  IMat out(r, IVec(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (a[i][r + j].den != 1) throw DomainError("inverse is not integral");
      out[i][j] = static_cast<int>(a[i][r + j].num);
    }
  return out;
}

inline bool has_unit_diagonal(const IMat& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i][i] != 1) return false;
  return true;
}

// ---------------------------------------------------------------- cone models

/// Invariant families with a closed-form realization.
/// star: only the blocks V_k1 are nonzero; Delta_1 = x1, Delta_k = x1 x_k - |X_k|^2.
enum class Family { orthant, star };

/// A concrete cone: coordinates are x_1..x_r followed by the blocks X_k (k = 2..r,
/// n_k1 components each) in matrix coordinates. The inner product is
/// sum x_j y_j + 2 sum X_k . Y_k, so orthonormal coordinates are x_j and sqrt(2) X_k.
struct ConeModel {
  ConeStructure structure;
  std::string name;
  Family family = Family::orthant;
  IVec block_sizes;
  std::vector<std::string> coordinates;
  std::vector<double> gram_scale;
  IMat sigma;
  IMat sigma_star;
  std::optional<double> c_primal;
  std::optional<double> c_dual;

  int rank() const { return structure.rank; }
  int dim() const { return structure.ambient_dim; }
  /// Number of components of the off-diagonal block attached to diagonal k (k >= 1, 0-based).
  int block_dim(int k) const { return family == Family::star ? structure.dims[k][0] : 0; }
  /// First coordinate index of block k.
  int block_offset(int k) const {
    int off = rank();
    for (int l = 1; l < k; ++l) off += block_dim(l);
    return off;
  }
  const IMat& multiplier(Side s) const { return s == Side::primal ? sigma : sigma_star; }
  double calibration(Side s) const {
    const auto& c = s == Side::primal ? c_primal : c_dual;
    return c ? *c : 1.0;
  }

  /// m = d sigma^{-1} (primal) or d sigma_*^{-1} (dual): exponents of the invariant measure.
  std::vector<double> measure_exponents(Side s) const {
    const IMat inv = unimodular_inverse(multiplier(s));
    const int r = rank();
    std::vector<double> m(r, 0.0);
    for (int k = 0; k < r; ++k)
      for (int j = 0; j < r; ++j) m[k] += structure.d(j) * inv[j][k];
    return m;
  }
};

/// Smallest 2^a admitting k anticommuting symmetric unit matrices (Radon-Hurwitz).
inline int clifford_module_size(int k) {
  for (int a = 0; a < 30; ++a) {
    const int b = a / 4, c = a % 4;
    const int rho = 8 * b + (1 << c);
    if (rho >= k) return 1 << a;
  }
  throw DomainError("block dimension too large");
}

inline ConeModel make_orthant(int r) {
  if (r < 1 || r > 12) throw DomainError("orthant rank must be in 1..12");
  ConeModel m;
  m.structure = derive_constants(IMat(r, IVec(r, 0)), r);
  m.name = "orthant_" + std::to_string(r);
  m.family = Family::orthant;
  m.block_sizes.assign(r, 1);
  for (int j = 1; j <= r; ++j) m.coordinates.push_back("x" + std::to_string(j));
  m.gram_scale.assign(r, 1.0);
  m.sigma = identity_matrix(r);
  m.sigma_star = identity_matrix(r);
  return m;
}

/// Star cone with blocks V_k1 of dimensions blocks[0..r-2]; r = blocks.size() + 1.
inline ConeModel make_star(const std::string& name, const IVec& blocks, IVec block_sizes = {}) {
  const int r = static_cast<int>(blocks.size()) + 1;
  if (r < 2) throw DomainError("star cone needs rank >= 2");
  if (r > 12) throw DomainError("rank must be at most 12");
  IMat table(r, IVec(r, 0));
  for (int k = 1; k < r; ++k) {
    if (blocks[k - 1] < 1) throw DomainError("star cone blocks must be nonempty");
    table[k][0] = blocks[k - 1];
  }
  ConeModel m;
  m.structure = derive_constants(table, r);
  m.name = name;
  m.family = Family::star;
  m.block_sizes = block_sizes.empty() ? IVec(r, 1) : block_sizes;
  for (int j = 1; j <= r; ++j) m.coordinates.push_back("x" + std::to_string(j));
  for (int k = 2; k <= r; ++k)
    for (int c = 1; c <= blocks[k - 2]; ++c)
      m.coordinates.push_back("x" + std::to_string(k) + "1_" + std::to_string(c));
  m.gram_scale.assign(r, 1.0);
  m.gram_scale.resize(m.coordinates.size(), 2.0);
  m.sigma.assign(r, IVec(r, 0));
  m.sigma_star.assign(r, IVec(r, 0));
  m.sigma[0][0] = 1;
  for (int k = 1; k < r; ++k) {
    m.sigma[k][0] = 1;
    m.sigma[k][k] = 1;
    m.sigma_star[k][k] = 1;
  }
  for (int k = 0; k < r; ++k) m.sigma_star[0][k] = 1;
  return m;
}

inline std::vector<std::string> catalog_names() {
  return {"orthant_1", "orthant_2", "orthant_3", "lorentz_1", "lorentz_4", "vinberg", "rank3_quat"};
}

/// orthant_r, lorentz_k, vinberg, rank3_quat.
inline ConeModel load_catalog_cone(const std::string& name) {
  auto suffix_int = [&](const std::string& prefix) -> std::optional<int> {
    if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return std::nullopt;
    const std::string tail = name.substr(prefix.size());
    if (!std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; })) return std::nullopt;
    if (tail.size() > 3) return std::nullopt;
    return std::stoi(tail);
  };
  if (auto r = suffix_int("orthant_")) return make_orthant(*r);
  if (auto k = suffix_int("lorentz_")) {
    if (*k < 1 || *k > 64) throw DomainError("lorentz_k needs 1 <= k <= 64");
    const int sz = clifford_module_size(*k);
    return make_star(name, {*k}, {sz, sz});
  }
  if (name == "vinberg") return make_star(name, {1, 1}, {2, 1, 1});
  if (name == "rank3_quat") return make_star(name, {4, 4}, {8, 1, 1});
  throw DomainError("unknown cone: " + name);
}

// ---------------------------------------------------------------- invariants

inline void check_point(const ConeModel& cone, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != cone.dim())
    throw DomainError("point has " + std::to_string(x.size()) + " coordinates, cone needs " +
                      std::to_string(cone.dim()));
}

/// Delta_j(x) or Delta*_j(x) in matrix coordinates.
template <typename T>
std::vector<T> evaluate_invariants_t(const ConeModel& cone, const std::vector<T>& x, Side side) {
  const int r = cone.rank();
  std::vector<T> out(r);
  if (cone.family == Family::orthant) {
    for (int j = 0; j < r; ++j) out[j] = x[j];
    return out;
  }
  std::vector<T> norm2(r, T(0));
  for (int k = 1; k < r; ++k) {
    const int off = cone.block_offset(k);
    for (int c = 0; c < cone.block_dim(k); ++c) norm2[k] = norm2[k] + x[off + c] * x[off + c];
  }
  if (side == Side::primal) {
    out[0] = x[0];
    for (int k = 1; k < r; ++k) out[k] = x[0] * x[k] - norm2[k];
    return out;
  }
  // y1 prod y_k - sum_k |Y_k|^2 prod_{l != k} y_l
  T prod_all = x[0];
  for (int k = 1; k < r; ++k) prod_all = prod_all * x[k];
  T acc = prod_all;
  for (int k = 1; k < r; ++k) {
    T term = norm2[k];
    for (int l = 1; l < r; ++l)
      if (l != k) term = term * x[l];
    acc = acc - term;
  }
  out[0] = acc;
  for (int k = 1; k < r; ++k) out[k] = x[k];
  return out;
}

inline std::vector<double> evaluate_invariants(const ConeModel& cone, const std::vector<double>& x, Side side) {
  check_point(cone, x);
  return evaluate_invariants_t(cone, x, side);
}

/// c_eps: diagonal coordinates eps_j, off-diagonal zero.
inline std::vector<double> orbit_representative(const ConeModel& cone, const IVec& eps) {
  if (static_cast<int>(eps.size()) != cone.rank()) throw DomainError("sign vector length must equal rank");
  std::vector<double> x(cone.dim(), 0.0);
  for (int j = 0; j < cone.rank(); ++j) x[j] = eps[j];
  return x;
}

/// Expected sign of Delta_j on the orbit: kappa_eps(e_j sigma) = prod_k eps_k^{sigma_jk}.
inline IVec orbit_signs(const ConeModel& cone, const IVec& eps, Side side) {
  const IMat& s = cone.multiplier(side);
  const int r = cone.rank();
  IVec out(r, 1);
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k)
      if (s[j][k] & 1) out[j] *= eps[k];
  return out;
}

// ---------------------------------------------------------------- charts

/// Forward-mode scalar used to differentiate the chart exactly; fixed capacity so
/// chart evaluation never allocates.
inline constexpr std::size_t kMaxChartDim = 80;

struct Dual {
  double v = 0.0;
  std::size_t n = 0;  // only g[0..n) is meaningful
  std::array<double, kMaxChartDim> g;
  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit from constants
  Dual(double value, std::size_t dim, std::size_t i) : v(value), n(dim) {
    std::fill(g.begin(), g.begin() + dim, 0.0);
    g[i] = 1.0;
  }
  friend Dual operator+(const Dual& a, const Dual& b) { return combine(a, b, a.v + b.v, 1.0, 1.0); }
  friend Dual operator-(const Dual& a, const Dual& b) { return combine(a, b, a.v - b.v, 1.0, -1.0); }
  friend Dual operator*(const Dual& a, const Dual& b) { return combine(a, b, a.v * b.v, b.v, a.v); }
  static Dual combine(const Dual& a, const Dual& b, double value, double ca, double cb) {
    Dual out(value);
    out.n = std::max(a.n, b.n);
    for (std::size_t i = 0; i < out.n; ++i)
      out.g[i] = (i < a.n ? ca * a.g[i] : 0.0) + (i < b.n ? cb * b.g[i] : 0.0);
    return out;
  }
};

struct ChartPoint {
  IVec orbit_sign;
  std::vector<double> t;
  std::vector<double> u;
};

/// Chart coordinates (t, u) -> x in matrix coordinates. Primal: x = T c_eps T^t with T
/// lower triangular; dual: the transposed action, landing in the dual orbit.
template <typename T>
std::vector<T> chart_map(const ConeModel& cone, const IVec& eps, const std::vector<T>& t, const std::vector<T>& u,
                         Side side) {
  const int r = cone.rank();
  std::vector<T> x(cone.dim(), T(0));
  if (cone.family == Family::orthant) {
    for (int j = 0; j < r; ++j) x[j] = T(static_cast<double>(eps[j])) * t[j] * t[j];
    return x;
  }
  const T e1(static_cast<double>(eps[0]));
  if (side == Side::primal) {
    x[0] = e1 * t[0] * t[0];
    for (int k = 1; k < r; ++k) {
      const int off = cone.block_offset(k);
      const int uo = off - r;
      T n2(0.0);
      for (int c = 0; c < cone.block_dim(k); ++c) {
        x[off + c] = e1 * t[0] * u[uo + c];
        n2 = n2 + u[uo + c] * u[uo + c];
      }
      x[k] = e1 * n2 + T(static_cast<double>(eps[k])) * t[k] * t[k];
    }
    return x;
  }
  T y1 = e1 * t[0] * t[0];
  for (int k = 1; k < r; ++k) {
    const int off = cone.block_offset(k);
    const int uo = off - r;
    const T ek(static_cast<double>(eps[k]));
    T n2(0.0);
    for (int c = 0; c < cone.block_dim(k); ++c) {
      x[off + c] = ek * t[k] * u[uo + c];
      n2 = n2 + u[uo + c] * u[uo + c];
    }
    x[k] = ek * t[k] * t[k];
    y1 = y1 + ek * n2;
  }
  x[0] = y1;
  return x;
}

/// |det| of an n x n real matrix by partial-pivot elimination.
inline double abs_determinant(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    if (a[piv][c] == 0.0) return 0.0;
    std::swap(a[piv], a[c]);
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      const double f = a[i][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return std::abs(det);
}

struct ChartImage {
  std::vector<double> x;
  double jacobian = 0.0;
};

/// x(eps, t, u) and the Jacobian against orthonormal coordinates of x.
inline ChartImage orbit_chart(const ConeModel& cone, const ChartPoint& pt, Side side = Side::primal) {
  const int r = cone.rank();
  const int n = cone.dim();
  if (static_cast<int>(pt.orbit_sign.size()) != r || static_cast<int>(pt.t.size()) != r ||
      static_cast<int>(pt.u.size()) != n - r)
    throw DomainError("chart point has the wrong shape");
  for (double v : pt.t)
    if (!(v > 0.0)) throw DomainError("chart needs strictly positive t");
  if (static_cast<std::size_t>(n) > kMaxChartDim) throw DomainError("chart dimension above " + std::to_string(kMaxChartDim));
  std::vector<Dual> t(r), u(n - r);
  for (int j = 0; j < r; ++j) t[j] = Dual(pt.t[j], n, j);
  for (int j = 0; j < n - r; ++j) u[j] = Dual(pt.u[j], n, r + j);
  const auto xs = chart_map(cone, pt.orbit_sign, t, u, side);
  std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
  ChartImage out;
  out.x.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x[i] = xs[i].v;
    const double scale = std::sqrt(cone.gram_scale[i]);
    for (std::size_t c = 0; c < xs[i].n; ++c) jac[i][c] = scale * xs[i].g[c];
  }
  out.jacobian = abs_determinant(std::move(jac));
  return out;
}

// ---------------------------------------------------------------- orbits and measure

/// Solves a sigma = b over GF(2) for the parity vector a; sigma is invertible mod 2.
inline IVec solve_mod2(const IMat& sigma, const IVec& b) {
  const int r = static_cast<int>(sigma.size());
  // a sigma = b  <=>  sigma^t a^t = b^t
  std::vector<IVec> m(r, IVec(r + 1));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) m[i][j] = sigma[j][i] & 1;
    m[i][r] = b[i] & 1;
  }
  for (int c = 0; c < r; ++c) {
    int piv = -1;
    for (int i = c; i < r; ++i)
      if (m[i][c]) {
        piv = i;
        break;
      }
    if (piv < 0) throw DomainError("multiplier matrix is not invertible mod 2");
    std::swap(m[piv], m[c]);
    for (int i = 0; i < r; ++i)
      if (i != c && m[i][c])
        for (int j = c; j <= r; ++j) m[i][j] ^= m[c][j];
  }
  IVec a(r);
  for (int i = 0; i < r; ++i) a[i] = m[i][r];
  return a;
}

/// The orbit containing x, or nullopt on the boundary.
inline std::optional<IVec> classify_orbit(const ConeModel& cone, const std::vector<double>& x, Side side = Side::primal) {
  const auto delta = evaluate_invariants(cone, x, side);
  const int r = cone.rank();
  // sign(Delta_j) = prod_k eps_k^{sigma_jk}: parity b = sigma a (column form).
  IVec b(r);
  for (int j = 0; j < r; ++j) {
    if (delta[j] == 0.0) return std::nullopt;
    b[j] = delta[j] < 0 ? 1 : 0;
  }
  IMat st(r, IVec(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) st[i][j] = cone.multiplier(side)[j][i];
  const IVec a = solve_mod2(st, b);
  IVec eps(r);
  for (int j = 0; j < r; ++j) eps[j] = a[j] ? -1 : 1;
  return eps;
}

/// Density of dmu against Lebesgue measure in orthonormal coordinates.
inline double invariant_measure_weight(const ConeModel& cone, const std::vector<double>& x, Side side = Side::primal) {
  const auto delta = evaluate_invariants(cone, x, side);
  const auto m = cone.measure_exponents(side);
  double logw = 0.0;
  for (std::size_t j = 0; j < delta.size(); ++j) {
    if (delta[j] == 0.0) throw DomainError("invariant measure is undefined on the boundary");
    logw -= m[j] * std::log(std::abs(delta[j]));
  }
  return cone.calibration(side) * std::exp(logw);
}

/// Multiplier property on random diagonal points plus orbit sign pattern on c_eps.
inline VerificationReport multiplier_consistency_check(const ConeModel& cone, std::uint64_t seed = 1, int samples = 20) {
  VerificationReport rep;
  rep.check_id = "multiplier";
  rep.cone = cone.name;
  rep.inputs = {{"seed", seed}, {"samples", samples}};
  const int r = cone.rank();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.25, 4.0);
  double worst = 0.0;
  for (Side side : {Side::primal, Side::dual}) {
    const IMat& s = cone.multiplier(side);
    for (int it = 0; it < samples; ++it) {
      std::vector<double> x(cone.dim(), 0.0);
      for (int j = 0; j < r; ++j) x[j] = mag(rng) * (rng() & 1 ? -1.0 : 1.0);
      const auto delta = evaluate_invariants(cone, x, side);
      for (int j = 0; j < r; ++j) {
        double expect = 1.0;
        for (int k = 0; k < r; ++k) expect *= std::pow(x[k], s[j][k]);
        worst = std::max(worst, std::abs(delta[j] - expect) / std::abs(expect));
      }
    }
  }
  int sign_failures = 0;
  const std::size_t count = std::size_t{1} << r;
  for (Side side : {Side::primal, Side::dual})
    for (std::size_t i = 0; i < count; ++i) {
      const IVec eps = sign_from_index(i, r);
      const auto delta = evaluate_invariants(cone, orbit_representative(cone, eps), side);
      const IVec want = orbit_signs(cone, eps, side);
      for (int j = 0; j < r; ++j)
        if (delta[j] != static_cast<double>(want[j])) ++sign_failures;
    }
  rep.abs_residual = worst;
  rep.rel_residual = worst;
  rep.tolerance = 1e-12;
  rep.details = {{"sign_pattern_failures", sign_failures}};
  rep.pass = worst <= 1e-12 && sign_failures == 0;
  return rep;
}

// ---------------------------------------------------------------- graphs

class NotChordalError : public Error {
 public:
  using Error::Error;
};

class NotA4FreeError : public Error {
 public:
  using Error::Error;
};

struct GraphStructure {
  ConeStructure structure;
  std::optional<int> m;
  IVec order;  // order[i] = original vertex placed at index i+1
};

/// Chordal, A4-free graph -> structure constants n_kj = 4 on edges.
inline GraphStructure build_structure_from_graph(const IMat& adj) {
  const int nv = static_cast<int>(adj.size());
  if (nv < 1) throw DomainError("graph needs at least one vertex");
  for (int i = 0; i < nv; ++i) {
    if (static_cast<int>(adj[i].size()) != nv) throw DomainError("adjacency must be square");
    if (adj[i][i] != 0) throw DomainError("graph must not have loops");
    for (int j = 0; j < nv; ++j) {
      if (adj[i][j] != 0 && adj[i][j] != 1) throw DomainError("adjacency entries must be 0/1");
      if (adj[i][j] != adj[j][i]) throw DomainError("adjacency must be symmetric");
    }
  }
  // Maximum cardinality search from a vertex of maximum degree.
  int start = 0;
  for (int v = 1; v < nv; ++v)
    if (weight(adj[v]) > weight(adj[start])) start = v;
  std::vector<int> label(nv, 0), visited(nv, 0), visit;
  for (int step = 0; step < nv; ++step) {
    int pick = -1;
    if (step == 0) {
      pick = start;
    } else {
      for (int v = 0; v < nv; ++v)
        if (!visited[v] && (pick < 0 || label[v] > label[pick])) pick = v;
    }
    visited[pick] = 1;
    visit.push_back(pick);
    for (int v = 0; v < nv; ++v)
      if (adj[pick][v] && !visited[v]) ++label[v];
  }
  // The reverse of the visit order is a perfect elimination ordering iff chordal:
  // for each vertex, its earlier-visited neighbours must form a clique.
  std::vector<int> pos(nv);
  for (int i = 0; i < nv; ++i) pos[visit[i]] = i;
  for (int i = 0; i < nv; ++i) {
    const int v = visit[i];
    std::vector<int> earlier;
    for (int u = 0; u < nv; ++u)
      if (adj[v][u] && pos[u] < i) earlier.push_back(u);
    for (std::size_t a = 0; a < earlier.size(); ++a)
      for (std::size_t b = a + 1; b < earlier.size(); ++b)
        if (!adj[earlier[a]][earlier[b]]) throw NotChordalError("graph is not chordal");
  }
  // No induced path on four vertices.
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b)
      for (int c = b + 1; c < nv; ++c)
        for (int d = c + 1; d < nv; ++d) {
          const int vs[4] = {a, b, c, d};
          int edges = 0;
          int deg[4] = {0, 0, 0, 0};
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
              if (adj[vs[i]][vs[j]]) {
                ++edges;
                ++deg[i];
                ++deg[j];
              }
          if (edges != 3) continue;
          int ones = 0, twos = 0;
          for (int i = 0; i < 4; ++i) {
            ones += deg[i] == 1;
            twos += deg[i] == 2;
          }
          if (ones == 2 && twos == 2) throw NotA4FreeError("graph contains an induced path on four vertices");
        }
  GraphStructure out;
  out.order = visit;  // reversed elimination ordering
  IMat table(nv, IVec(nv, 0));
  for (int k = 0; k < nv; ++k)
    for (int j = 0; j < k; ++j)
      if (adj[visit[k]][visit[j]]) table[k][j] = 4;
  out.structure = derive_constants(table, nv);
  out.m = check_completion_condition(out.structure);
  return out;
}

/// {"vertices": n or [names], "edges": [[u, v], ...]} or {"adjacency": [[...]]}.
/// Integer labels are 0-based, or 1-based when the edges use n but never 0.
inline IMat adjacency_from_json(const nlohmann::json& j) {
  if (j.contains("adjacency")) return j.at("adjacency").get<IMat>();
  if (!j.contains("vertices") || !j.contains("edges")) throw DomainError("graph JSON needs vertices and edges");
  std::vector<std::string> names;
  const auto& vj = j.at("vertices");
  if (vj.is_number_integer()) {
    const int n = vj.get<int>();
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  } else {
    for (auto& v : vj) names.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  }
  const int n = static_cast<int>(names.size());
  IMat adj(n, IVec(n, 0));
  // Integer labels are 0-based unless some edge uses n and none uses 0.
  int base = 0;
  if (vj.is_number_integer()) {
    bool has_zero = false, has_n = false;
    for (auto& e : j.at("edges"))
      for (auto& v : e)
        if (v.is_number_integer()) {
          has_zero = has_zero || v.get<int>() == 0;
          has_n = has_n || v.get<int>() == n;
        }
    if (has_n && !has_zero) base = 1;
  }
  auto find = [&](const nlohmann::json& v) {
    if (vj.is_number_integer()) {
      const int idx = v.is_number_integer() ? v.get<int>() - base : -1;
      if (idx < 0 || idx >= n) throw DomainError("edge refers to unknown vertex " + v.dump());
      return idx;
    }
    const std::string key = v.is_string() ? v.get<std::string>() : v.dump();
    for (int i = 0; i < n; ++i)
      if (names[i] == key) return i;
    throw DomainError("edge refers to unknown vertex " + key);
  };
  for (auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw DomainError("edges must be pairs");
    const int a = find(e[0]), b = find(e[1]);
    if (a == b) throw DomainError("graph must not have loops");
    adj[a][b] = adj[b][a] = 1;
  }
  return adj;
}

// ---------------------------------------------------------------- JSON cones

/// Cone definition document; invariants name a family ("orthant" or "star") or a catalog cone.
inline ConeModel cone_from_json(const nlohmann::json& j) {
  const std::string name = j.value("name", std::string("custom"));
  const int rank = j.at("rank").get<int>();
  std::vector<std::array<int, 3>> triples;
  if (j.contains("dims"))
    for (auto& t : j.at("dims")) triples.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  const ConeStructure s = derive_constants(rank, triples);
  const std::string inv = j.value("invariants", std::string(rank == 1 ? "orthant" : "star"));
  ConeModel m;
  if (inv == "orthant") {
    for (auto& row : s.dims)
      for (int v : row)
        if (v != 0) throw DomainError("orthant invariants need all n_kj = 0");
    m = make_orthant(rank);
  } else if (inv == "star") {
    IVec blocks;
    for (int k = 1; k < rank; ++k) {
      for (int l = 1; l < k; ++l)
        if (s.dims[k][l] != 0) throw DomainError("star invariants need n_kj = 0 for j >= 2");
      blocks.push_back(s.dims[k][0]);
    }
    m = make_star(name, blocks);
  } else {
    m = load_catalog_cone(inv);
    if (m.structure.dims != s.dims) throw DomainError("dims disagree with catalog invariants " + inv);
  }
  m.name = name;
  if (j.contains("block_sizes")) {
    auto bs = j.at("block_sizes").get<IVec>();
    if (static_cast<int>(bs.size()) != rank) throw DomainError("block_sizes length must equal rank");
    m.block_sizes = bs;
  }
  if (j.contains("coordinates")) {
    auto cs = j.at("coordinates").get<std::vector<std::string>>();
    if (static_cast<int>(cs.size()) != m.dim()) throw DomainError("coordinate count must equal ambient dimension");
    m.coordinates = cs;
  }
  if (j.contains("gram_scale")) {
    auto g = j.at("gram_scale").get<std::vector<double>>();
    if (g != m.gram_scale) throw DomainError("only the normalized trace form (1 on diagonal, 2 off) is supported");
  }
  return m;
}

inline nlohmann::json cone_to_json(const ConeModel& m) {
  nlohmann::json dims = nlohmann::json::array();
  for (int k = 0; k < m.rank(); ++k)
    for (int j = 0; j < k; ++j) dims.push_back({k + 1, j + 1, m.structure.dims[k][j]});
  return {{"name", m.name},
          {"rank", m.rank()},
          {"block_sizes", m.block_sizes},
          {"dims", dims},
          {"coordinates", m.coordinates},
          {"invariants", m.family == Family::orthant ? "orthant" : "star"},
          {"gram_scale", m.gram_scale}};
}

}  // namespace czl
