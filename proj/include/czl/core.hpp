#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace czl {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using IVec = std::vector<int>;
using IMat = std::vector<IVec>;

inline constexpr double kPi = 3.14159265358979323846;

/// Base class of everything the library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A gamma argument landed on (or too close to) a pole.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, cplx where) : Error(what), where_(where) {}
  cplx where() const { return where_; }

 private:
  cplx where_;
};

/// A convergence or strip inequality does not hold.
class GuardError : public Error {
 public:
  GuardError(const std::string& what, std::string inequality)
      : Error(what + ": " + inequality), inequality_(std::move(inequality)) {}
  const std::string& inequality() const { return inequality_; }

 private:
  std::string inequality_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Sign vectors and parity vectors share one index: bit j (counted from the
// left, component 1 is the most significant bit) is 1 iff eps_j = -1 / a_j = 1.
// This realizes the lexicographic order with + before - and 0 before 1.

inline IVec parity_from_index(std::size_t idx, int r) {
  IVec a(r);
  for (int j = 0; j < r; ++j) a[j] = static_cast<int>((idx >> (r - 1 - j)) & 1u);
  return a;
}

inline IVec sign_from_index(std::size_t idx, int r) {
  IVec e = parity_from_index(idx, r);
  for (auto& v : e) v = v ? -1 : 1;
  return e;
}

inline std::size_t index_from_parity(const IVec& a) {
  std::size_t idx = 0;
  for (int v : a) idx = (idx << 1) | static_cast<std::size_t>(v & 1);
  return idx;
}

inline std::size_t index_from_sign(const IVec& eps) {
  std::size_t idx = 0;
  for (int v : eps) {
    if (v != 1 && v != -1) throw DomainError("sign vector entries must be +1 or -1");
    idx = (idx << 1) | static_cast<std::size_t>(v < 0);
  }
  return idx;
}

inline int weight(const IVec& a) { return std::accumulate(a.begin(), a.end(), 0); }

/// a*M mod 2 for a row vector a.
inline IVec row_times_mod2(const IVec& a, const IMat& m) {
  const std::size_t r = a.size();
  IVec out(r, 0);
  for (std::size_t k = 0; k < r; ++k) {
    long acc = 0;
    for (std::size_t j = 0; j < r; ++j) acc += static_cast<long>(a[j]) * m[j][k];
    out[k] = static_cast<int>(((acc % 2) + 2) % 2);
  }
  return out;
}

/// kappa_eps(a) = prod eps_j^{a_j}.
inline int kappa(const IVec& eps, const IVec& a) {
  int v = 1;
  for (std::size_t j = 0; j < eps.size(); ++j)
    if (a[j] & 1) v *= eps[j];
  return v;
}

/// Component sum |z| of a vector (never the modulus).
inline cplx component_sum(const CVec& z) {
  cplx s = 0.0;
  for (auto& v : z) s += v;
  return s;
}

/// Exact rational with 64-bit parts; used for exactness checks on tau.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw DomainError("zero denominator");
    normalize();
  }
  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

}  // namespace czl
