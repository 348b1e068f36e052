#pragma once

#include <initializer_list>
#include <utility>
#include <vector>

#include "specfact/types.hpp"

namespace specfact {

/// Dense complex polynomial, coefficient k is the coefficient of z^k.
/// The zero polynomial has an empty coefficient list and degree -1.
class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<cd> c) : c_(c) { trim(); }
  explicit Poly(std::vector<cd> c) : c_(std::move(c)) { trim(); }

  static Poly one() { return Poly{cd(1.0)}; }
  static Poly monomial(int k, cd c = cd(1.0));

  int deg() const { return static_cast<int>(c_.size()) - 1; }
  bool isZero() const { return c_.empty(); }
  bool isConstant() const { return c_.size() <= 1; }
  cd coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cd(0.0);
  }
  cd leading() const { return c_.empty() ? cd(0.0) : c_.back(); }
  const std::vector<cd>& coeffs() const { return c_; }
  double maxAbs() const;

  cd operator()(cd z) const;  // Horner
  Poly derivative() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(cd s) const;
  Poly operator-() const { return *this * cd(-1.0); }
  Poly& operator*=(cd s);

  /// Coefficients conjugated in place: p*(z) with p*(x) = conj(p(conj(x))).
  Poly conjCoeffs() const;
  /// Conjugate-reversed coefficients: sum_k conj(c_{deg-k}) z^k.
  Poly conjReversed() const;

  /// z^k * p for k >= 0.
  Poly shifted(int k) const;

  /// Synthetic division by (z - r); returns quotient and remainder p(r).
  std::pair<Poly, cd> deflate(cd r) const;

  /// Strip trailing coefficients below trim_rel times the max magnitude.
  Poly& trim();

 private:
  std::vector<cd> c_;
};

inline Poly operator*(cd s, const Poly& p) { return p * s; }

/// All deg(p) roots with multiplicity, via balanced companion-matrix
/// eigenvalues plus Newton refinement. Throws DegenerateLeadingCoefficient
/// for constant or zero input.
std::vector<cd> roots(const Poly& p);

/// Laurent polynomial: coefficient k of the storage is the coefficient of
/// z^{lo+k}. Both stored extremes are nonzero after trim, or the value is
/// identically zero (empty list, lo = 0).
class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(int lo, std::vector<cd> c) : lo_(lo), c_(std::move(c)) { trim(); }
  explicit LaurentPoly(const Poly& p) : lo_(0), c_(p.coeffs()) { trim(); }

  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  bool isZero() const { return c_.empty(); }
  cd coeff(int power) const {
    int k = power - lo_;
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cd(0.0);
  }
  const std::vector<cd>& storage() const { return c_; }
  double maxAbs() const;

  cd operator()(cd z) const;

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator*(cd s) const;

  LaurentPoly adjoint(Domain d) const;
  bool isSelfAdjoint(Domain d, double relTol = tol::herm_rel) const;

  /// The polynomial z^{-lo} * this (requires lo <= 0) or the plain
  /// coefficient list as a polynomial anchored at z^0.
  Poly numeratorPoly() const { return Poly(c_); }

  LaurentPoly& trim();

 private:
  int lo_ = 0;
  std::vector<cd> c_;
};

}  // namespace specfact
