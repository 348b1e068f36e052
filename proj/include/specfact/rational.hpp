#pragma once

#include <Eigen/Dense>
#include <vector>

#include "specfact/poly.hpp"
#include "specfact/types.hpp"

namespace specfact {

/// Rational function num/den in normalized form: den monic, no common
/// num/den root within the cancellation tolerance.
class RationalFn {
 public:
  RationalFn() : num_(), den_(Poly::one()) {}
  RationalFn(Poly num, Poly den);
  RationalFn(cd c) : num_{c}, den_(Poly::one()) { num_.trim(); }  // NOLINT: implicit
  explicit RationalFn(const Poly& p) : num_(p), den_(Poly::one()) {}
  static RationalFn fromLaurent(const LaurentPoly& f);
  /// num/den kept verbatim (den made monic, no root cancellation). Root
  /// cancellation deflates at paired-but-unequal positions and perturbs the
  /// function by the pair mismatch; callers that cancel by value later use
  /// this to avoid that loss.
  static RationalFn uncancelled(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool isZero() const { return num_.isZero(); }
  bool isPolynomial() const { return den_.isConstant(); }
  bool isConstant() const { return num_.isConstant() && den_.isConstant(); }

  cd operator()(cd z) const;  // throws PoleAtEvaluationPoint
  cd evalUnsafe(cd z) const { return num_(z) / den_(z); }

  RationalFn operator+(const RationalFn& o) const;
  RationalFn operator-(const RationalFn& o) const;
  RationalFn operator*(const RationalFn& o) const;
  RationalFn operator/(const RationalFn& o) const;
  RationalFn operator-() const;

  RationalFn adjoint(Domain d) const;
  RationalFn inverse() const;

  /// Poles, i.e. roots of the normalized denominator (empty when polynomial).
  std::vector<cd> poles() const;

  /// The value as a Laurent polynomial; requires the denominator to be a
  /// monomial c*z^k (within trim tolerance), else throws ResidualDenominator.
  LaurentPoly toLaurent() const;

 private:
  void normalize();
  Poly num_, den_;
};

/// m x m grid of rational functions, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(int m) : m_(m), e_(static_cast<size_t>(m) * m) {}
  static RationalMatrix identity(int m);

  int dim() const { return m_; }
  RationalFn& at(int i, int j) { return e_[static_cast<size_t>(i) * m_ + j]; }
  const RationalFn& at(int i, int j) const { return e_[static_cast<size_t>(i) * m_ + j]; }

  RationalMatrix operator*(const RationalMatrix& o) const;
  RationalMatrix adjoint(Domain d) const;

  /// Right multiplication by a constant matrix.
  RationalMatrix mulConst(const Eigen::MatrixXcd& U) const;
  /// Multiply every entry of column j by u.
  void scaleColumn(int j, const RationalFn& u);

  Eigen::MatrixXcd eval(cd z) const;        // throws on pole
  Eigen::MatrixXcd evalUnsafe(cd z) const;  // no pole check

  /// Determinant by cofactor expansion with rational cancellation.
  RationalFn det() const;

 private:
  int m_ = 0;
  std::vector<RationalFn> e_;
};

/// Matrix Laurent polynomial: list of m x m coefficient matrices, entry k
/// of the list is the coefficient of z^{lo+k}.
class MatrixLaurentPoly {
 public:
  MatrixLaurentPoly() = default;
  MatrixLaurentPoly(int m, int lo, std::vector<Eigen::MatrixXcd> coeffs);
  static MatrixLaurentPoly identity(int m);

  int dim() const { return m_; }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(C_.size()) - 1; }
  bool empty() const { return C_.empty(); }
  const std::vector<Eigen::MatrixXcd>& storage() const { return C_; }
  Eigen::MatrixXcd coeff(int power) const;

  LaurentPoly entry(int i, int j) const;
  RationalMatrix toRational() const;

  Eigen::MatrixXcd eval(cd z) const;
  MatrixLaurentPoly adjoint(Domain d) const;
  MatrixLaurentPoly operator*(const MatrixLaurentPoly& o) const;  // convolution
  MatrixLaurentPoly operator-(const MatrixLaurentPoly& o) const;
  MatrixLaurentPoly mulConst(const Eigen::MatrixXcd& U) const;

  double maxAbs() const;
  bool isSelfAdjoint(Domain d, double relTol = tol::herm_rel) const;

  MatrixLaurentPoly& trim();

 private:
  int m_ = 0;
  int lo_ = 0;
  std::vector<Eigen::MatrixXcd> C_;
};

/// Boundary sample points: n-th roots of unity (disc) or a fixed real grid
/// on [-50, 50] with density concentrated toward 0 (line).
std::vector<cd> boundaryGrid(Domain d, int n);

}  // namespace specfact
