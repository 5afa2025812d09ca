#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "czl/cone_model.hpp"
#include "czl/core.hpp"
#include "czl/report.hpp"
#include "czl/special_functions.hpp"

namespace czl {

using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

/// kappa_a as a column over the fixed order on I_r.
inline IVec kappa_vector(const IVec& a) {
  const int r = static_cast<int>(a.size());
  const std::size_t count = std::size_t{1} << r;
  IVec out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = kappa(sign_from_index(i, r), a);
  return out;
}

struct CharacterBasis {
  int rank = 0;
  IMat kappa;  // kappa[eps_index][a_index]
  RMat J;
};

inline CharacterBasis build_J(int r) {
  if (r < 1 || r > 12) throw DomainError("build_J: rank must be in 1..12");
  const std::size_t count = std::size_t{1} << r;
  CharacterBasis b;
  b.rank = r;
  b.kappa.assign(count, IVec(count));
  b.J.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  const double norm = std::pow(2.0, -0.5 * r);
  for (std::size_t ia = 0; ia < count; ++ia) {
    const IVec col = kappa_vector(parity_from_index(ia, r));
    for (std::size_t ie = 0; ie < count; ++ie) {
      b.kappa[ie][ia] = col[ie];
      b.J(static_cast<Eigen::Index>(ie), static_cast<Eigen::Index>(ia)) = norm * col[ie];
    }
  }
  return b;
}

enum class GammaForm { general, reduced };

/// A(alpha): rows delta, columns eps.
struct GammaMatrix {
  int rank = 0;
  GammaForm form = GammaForm::general;
  int m = 0;  // meaningful for the reduced form
  CMat values;
};

inline GammaMatrix gamma_matrix_general(const ConeStructure& s, const CVec& alpha) {
  const int r = s.rank;
  if (static_cast<int>(alpha.size()) != r) throw DomainError("alpha length must equal rank");
  const std::size_t count = std::size_t{1} << r;
  GammaMatrix g;
  g.rank = r;
  g.form = GammaForm::general;
  g.values.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  const cplx half_i_pi(0.0, 0.5 * kPi);
  for (std::size_t id = 0; id < count; ++id) {
    const IVec del = sign_from_index(id, r);
    for (std::size_t ie = 0; ie < count; ++ie) {
      const IVec eps = sign_from_index(ie, r);
      cplx e = 0.0;
      for (int j = 0; j < r; ++j) e += static_cast<double>(eps[j] * del[j]) * alpha[j];
      long cross = 0;
      for (int k = 0; k < r; ++k)
        for (int j = 0; j < k; ++j) cross += static_cast<long>(eps[j]) * del[k] * s.dims[k][j];
      e += 0.5 * static_cast<double>(cross);
      g.values(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(ie)) = std::exp(half_i_pi * e);
    }
  }
  return g;
}

inline GammaMatrix gamma_matrix_reduced(int m, const CVec& alpha) {
  if (m != 0 && m != 1) throw DomainError("m must be 0 or 1");
  const int r = static_cast<int>(alpha.size());
  const std::size_t count = std::size_t{1} << r;
  GammaMatrix g;
  g.rank = r;
  g.form = GammaForm::reduced;
  g.m = m;
  g.values.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
  const cplx half_i_pi(0.0, 0.5 * kPi);
  const double sign = m ? -1.0 : 1.0;
  for (std::size_t id = 0; id < count; ++id) {
    const IVec del = sign_from_index(id, r);
    for (std::size_t ie = 0; ie < count; ++ie) {
      const IVec eps = sign_from_index(ie, r);
      cplx e = 0.0;
      for (int j = 0; j < r; ++j) e += static_cast<double>(eps[j] * del[j]) * alpha[j];
      g.values(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(ie)) = sign * std::exp(half_i_pi * e);
    }
  }
  return g;
}

/// i^k for integer k.
inline cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct Diagonalization {
  CVec diagonal;
  double offdiag_residual = 0.0;
};

/// tJ A J: its diagonal and the largest off-diagonal modulus.
inline Diagonalization diagonalize_gamma_matrix(const GammaMatrix& A, const CharacterBasis& basis) {
  if (A.rank != basis.rank) throw DomainError("rank mismatch between gamma matrix and basis");
  const CMat J = basis.J.cast<cplx>();
  const CMat D = J.transpose() * A.values * J;
  Diagonalization out;
  const auto n = D.rows();
  out.diagonal.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out.diagonal[static_cast<std::size_t>(i)] = D(i, i);
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) out.offdiag_residual = std::max(out.offdiag_residual, std::abs(D(i, j)));
  }
  return out;
}

/// Predicted diagonal (-1)^m 2^r i^{|a|} Q_a(alpha).
inline CVec lemma_diagonal(int m, const CVec& alpha) {
  const int r = static_cast<int>(alpha.size());
  const std::size_t count = std::size_t{1} << r;
  CVec out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const IVec a = parity_from_index(i, r);
    out[i] = (m ? -1.0 : 1.0) * std::ldexp(1.0, r) * i_power(weight(a)) * q_factor(a, alpha);
  }
  return out;
}

/// E = (-1)^m diag(i^{|a|}).
inline CVec epsilon_factor(int m, int r) {
  if (m != 0 && m != 1) throw DomainError("m must be 0 or 1");
  const std::size_t count = std::size_t{1} << r;
  CVec out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = (m ? -1.0 : 1.0) * i_power(weight(parity_from_index(i, r)));
  return out;
}

inline cplx det_gamma_matrix(const GammaMatrix& A) { return A.values.partialPivLu().determinant(); }

/// sin(pi x) with argument reduction, so integer x gives exact zeros.
inline cplx sin_pi(cplx z) {
  const double n = std::round(z.real());
  const cplx frac = z - n;
  const double sign = (static_cast<long long>(n) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sin(kPi * frac);
}

/// (prod_j 2i sin(pi alpha_j))^{2^{r-1}}.
inline cplx det_conjecture_value(const CVec& alpha) {
  const int r = static_cast<int>(alpha.size());
  cplx base = 1.0;
  for (auto& a : alpha) base *= cplx(0.0, 2.0) * sin_pi(a);
  cplx out = 1.0;
  for (long i = 0; i < (1L << (r - 1)); ++i) out *= base;
  return out;
}

inline VerificationReport check_det_conjecture(const ConeStructure& s, int trials, std::uint64_t seed,
                                               const std::string& cone_name = "") {
  if (s.rank < 2) throw DomainError("det conjecture check needs rank >= 2");
  VerificationReport rep;
  rep.check_id = "det-conjecture";
  rep.cone = cone_name;
  rep.inputs = {{"trials", trials}, {"seed", seed}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < trials; ++t) {
    CVec alpha(s.rank);
    for (auto& a : alpha) a = cplx(u(rng), 0.5 * u(rng));
    rep.lhs.push_back(det_gamma_matrix(gamma_matrix_general(s, alpha)));
    rep.rhs.push_back(det_conjecture_value(alpha));
  }
  rep.score(1e-8);
  return rep;
}

struct OrderMap {
  std::vector<std::size_t> image;  // image[index(b)] = index(b sigma mod 2)
  std::vector<std::size_t> order;  // parity indices b sorted by b sigma
};

/// b -> b sigma mod 2 and the induced order A_sigma.
inline OrderMap order_map_sigma(const IMat& sigma) {
  const int r = static_cast<int>(sigma.size());
  const std::size_t count = std::size_t{1} << r;
  OrderMap out;
  out.image.resize(count);
  out.order.assign(count, count);
  std::vector<int> hit(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = index_from_parity(row_times_mod2(parity_from_index(i, r), sigma));
    out.image[i] = j;
    if (hit[j]++) throw DomainError("multiplier matrix is not invertible mod 2");
    out.order[j] = i;
  }
  return out;
}

struct ReversalCheck {
  IMat conjugated;
  bool equal = false;
};

/// R sigma_* R^{-1} with R the anti-diagonal reversal; compared with sigma.
inline ReversalCheck reversal_conjugation_check(const IMat& sigma, const IMat& sigma_star) {
  const int r = static_cast<int>(sigma.size());
  if (static_cast<int>(sigma_star.size()) != r) throw DomainError("size mismatch");
  ReversalCheck out;
  out.conjugated.assign(r, IVec(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out.conjugated[i][j] = sigma_star[r - 1 - i][r - 1 - j];
  out.equal = out.conjugated == sigma;
  return out;
}

}  // namespace czl
