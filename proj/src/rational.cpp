#include "specfact/rational.hpp"

#include <algorithm>
#include <cmath>

namespace specfact {

RationalFn::RationalFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

RationalFn RationalFn::fromLaurent(const LaurentPoly& f) {
  if (f.isZero()) return RationalFn();
  if (f.lo() >= 0) return RationalFn(f.numeratorPoly().shifted(f.lo()), Poly::one());
  return RationalFn(f.numeratorPoly(), Poly::monomial(-f.lo()));
}

void RationalFn::normalize() {
  num_.trim();
  den_.trim();
  if (den_.isZero()) throw SpecfactError("RationalFn: zero denominator");
  if (num_.isZero()) {
    num_ = Poly();
    den_ = Poly::one();
    return;
  }
  if (num_.deg() > 0 && den_.deg() > 0) {
    // Pair nearby num/den roots and cancel by deflation, each polynomial
    // deflated by its own computed root.
    std::vector<cd> nr = roots(num_);
    std::vector<cd> dr = roots(den_);
    std::vector<bool> used(nr.size(), false);
    std::vector<cd> numDrop, denDrop;
    for (const cd& r : dr) {
      int best = -1;
      double bestDist = tol::cancel * (1.0 + std::abs(r));
      for (size_t k = 0; k < nr.size(); ++k) {
        if (used[k]) continue;
        double dist = std::abs(nr[k] - r);
        if (dist <= bestDist) {
          bestDist = dist;
          best = static_cast<int>(k);
        }
      }
      if (best >= 0) {
        used[static_cast<size_t>(best)] = true;
        numDrop.push_back(nr[static_cast<size_t>(best)]);
        denDrop.push_back(r);
      }
    }
    for (const cd& r : numDrop) num_ = num_.deflate(r).first;
    for (const cd& r : denDrop) den_ = den_.deflate(r).first;
    num_.trim();
    den_.trim();
    if (den_.isZero()) throw SpecfactError("RationalFn: denominator vanished in cancellation");
  }
  cd lead = den_.leading();
  num_ = num_ * (cd(1.0) / lead);
  den_ = den_ * (cd(1.0) / lead);
}

RationalFn RationalFn::uncancelled(Poly num, Poly den) {
  RationalFn r;
  r.num_ = std::move(num);
  r.den_ = std::move(den);
  r.num_.trim();
  r.den_.trim();
  if (r.den_.isZero()) throw SpecfactError("RationalFn: zero denominator");
  if (r.num_.isZero()) {
    r.den_ = Poly::one();
    return r;
  }
  cd lead = r.den_.leading();
  r.num_ = r.num_ * (cd(1.0) / lead);
  r.den_ = r.den_ * (cd(1.0) / lead);
  return r;
}

cd RationalFn::operator()(cd z) const {
  cd d = den_(z);
  if (std::abs(d) <= tol::eval_rel * (1.0 + den_.maxAbs()))
    throw PoleAtEvaluationPoint("eval at pole");
  return num_(z) / d;
}

RationalFn RationalFn::operator+(const RationalFn& o) const {
  if (isZero()) return o;
  if (o.isZero()) return *this;
  if (isPolynomial() && o.isPolynomial())
    return RationalFn(num_ + o.num_, Poly::one());
  return RationalFn(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFn RationalFn::operator-(const RationalFn& o) const { return *this + (-o); }

RationalFn RationalFn::operator-() const {
  RationalFn r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFn RationalFn::operator*(const RationalFn& o) const {
  if (isZero() || o.isZero()) return RationalFn();
  return RationalFn(num_ * o.num_, den_ * o.den_);
}

RationalFn RationalFn::operator/(const RationalFn& o) const {
  if (o.isZero()) throw SpecfactError("RationalFn: division by zero");
  return RationalFn(num_ * o.den_, den_ * o.num_);
}

RationalFn RationalFn::adjoint(Domain d) const {
  if (isZero()) return RationalFn();
  if (d == Domain::line) return RationalFn(num_.conjCoeffs(), den_.conjCoeffs());
  const int p = num_.deg(), q = den_.deg();
  Poly nrev = num_.conjReversed();
  Poly drev = den_.conjReversed();
  if (q >= p) return RationalFn(nrev.shifted(q - p), drev);
  return RationalFn(nrev, drev.shifted(p - q));
}

RationalFn RationalFn::inverse() const {
  if (isZero()) throw SpecfactError("RationalFn: inverse of zero");
  return RationalFn(den_, num_);
}

std::vector<cd> RationalFn::poles() const {
  if (den_.deg() < 1) return {};
  return roots(den_);
}

LaurentPoly RationalFn::toLaurent() const {
  if (isZero()) return LaurentPoly();
  const double thr = tol::trim_rel * (1.0 + den_.maxAbs());
  for (int k = 0; k < den_.deg(); ++k)
    if (std::abs(den_.coeff(k)) > thr)
      throw ResidualDenominator("toLaurent: non-monomial denominator");
  return LaurentPoly(-den_.deg(), num_.coeffs());
}

RationalMatrix RationalMatrix::identity(int m) {
  RationalMatrix I(m);
  for (int i = 0; i < m; ++i) I.at(i, i) = RationalFn(cd(1.0));
  return I;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (m_ != o.m_) throw DimensionMismatch("RationalMatrix: dimension mismatch");
  RationalMatrix r(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      RationalFn s;
      for (int k = 0; k < m_; ++k) s = s + at(i, k) * o.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

RationalMatrix RationalMatrix::adjoint(Domain d) const {
  RationalMatrix r(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) r.at(i, j) = at(j, i).adjoint(d);
  return r;
}

RationalMatrix RationalMatrix::mulConst(const Eigen::MatrixXcd& U) const {
  if (U.rows() != m_ || U.cols() != m_)
    throw DimensionMismatch("mulConst: dimension mismatch");
  RationalMatrix r(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) {
      RationalFn s;
      for (int k = 0; k < m_; ++k) {
        if (std::abs(U(k, j)) == 0.0) continue;
        s = s + at(i, k) * RationalFn(U(k, j));
      }
      r.at(i, j) = s;
    }
  return r;
}

void RationalMatrix::scaleColumn(int j, const RationalFn& u) {
  for (int i = 0; i < m_; ++i) at(i, j) = at(i, j) * u;
}

Eigen::MatrixXcd RationalMatrix::eval(cd z) const {
  Eigen::MatrixXcd M(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) M(i, j) = at(i, j)(z);
  return M;
}

Eigen::MatrixXcd RationalMatrix::evalUnsafe(cd z) const {
  Eigen::MatrixXcd M(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) M(i, j) = at(i, j).evalUnsafe(z);
  return M;
}

namespace {

RationalFn detRec(const RationalMatrix& A, std::vector<int>& rows, int col0) {
  const int n = static_cast<int>(rows.size());
  if (n == 1) return A.at(rows[0], col0);
  RationalFn s;
  for (int k = 0; k < n; ++k) {
    const RationalFn& pivot = A.at(rows[static_cast<size_t>(k)], col0);
    if (pivot.isZero()) continue;
    std::vector<int> sub;
    sub.reserve(static_cast<size_t>(n) - 1);
    for (int t = 0; t < n; ++t)
      if (t != k) sub.push_back(rows[static_cast<size_t>(t)]);
    RationalFn minor = detRec(A, sub, col0 + 1);
    RationalFn term = pivot * minor;
    s = (k % 2 == 0) ? s + term : s - term;
  }
  return s;
}

}  // namespace

RationalFn RationalMatrix::det() const {
  std::vector<int> rows(static_cast<size_t>(m_));
  for (int i = 0; i < m_; ++i) rows[static_cast<size_t>(i)] = i;
  return detRec(*this, rows, 0);
}

MatrixLaurentPoly::MatrixLaurentPoly(int m, int lo, std::vector<Eigen::MatrixXcd> coeffs)
    : m_(m), lo_(lo), C_(std::move(coeffs)) {
  for (const auto& M : C_)
    if (M.rows() != m_ || M.cols() != m_)
      throw DimensionMismatch("MatrixLaurentPoly: coefficient shape mismatch");
  trim();
}

MatrixLaurentPoly MatrixLaurentPoly::identity(int m) {
  return MatrixLaurentPoly(m, 0, {Eigen::MatrixXcd::Identity(m, m)});
}

Eigen::MatrixXcd MatrixLaurentPoly::coeff(int power) const {
  int k = power - lo_;
  if (k < 0 || k >= static_cast<int>(C_.size()))
    return Eigen::MatrixXcd::Zero(m_, m_);
  return C_[static_cast<size_t>(k)];
}

LaurentPoly MatrixLaurentPoly::entry(int i, int j) const {
  std::vector<cd> c(C_.size());
  for (size_t k = 0; k < C_.size(); ++k) c[k] = C_[k](i, j);
  return LaurentPoly(lo_, std::move(c));
}

RationalMatrix MatrixLaurentPoly::toRational() const {
  RationalMatrix r(m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) r.at(i, j) = RationalFn::fromLaurent(entry(i, j));
  return r;
}

Eigen::MatrixXcd MatrixLaurentPoly::eval(cd z) const {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(m_, m_);
  for (auto it = C_.rbegin(); it != C_.rend(); ++it) v = v * z + *it;
  if (lo_ > 0) v *= std::pow(z, lo_);
  if (lo_ < 0) v /= std::pow(z, -lo_);
  return v;
}

MatrixLaurentPoly MatrixLaurentPoly::adjoint(Domain d) const {
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(C_.size());
  if (d == Domain::disc) {
    for (auto it = C_.rbegin(); it != C_.rend(); ++it) C.push_back(it->adjoint());
    return MatrixLaurentPoly(m_, -hi(), std::move(C));
  }
  for (const auto& M : C_) C.push_back(M.adjoint());
  return MatrixLaurentPoly(m_, lo_, std::move(C));
}

MatrixLaurentPoly MatrixLaurentPoly::operator*(const MatrixLaurentPoly& o) const {
  if (m_ != o.m_) throw DimensionMismatch("MatrixLaurentPoly: dimension mismatch");
  if (empty() || o.empty()) return MatrixLaurentPoly();
  std::vector<Eigen::MatrixXcd> C(C_.size() + o.C_.size() - 1,
                                  Eigen::MatrixXcd::Zero(m_, m_));
  for (size_t i = 0; i < C_.size(); ++i)
    for (size_t j = 0; j < o.C_.size(); ++j) C[i + j] += C_[i] * o.C_[j];
  return MatrixLaurentPoly(m_, lo_ + o.lo_, std::move(C));
}

MatrixLaurentPoly MatrixLaurentPoly::operator-(const MatrixLaurentPoly& o) const {
  if (m_ != o.m_) throw DimensionMismatch("MatrixLaurentPoly: dimension mismatch");
  int lo = std::min(lo_, o.lo_);
  int hi = std::max(this->hi(), o.hi());
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(static_cast<size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) C.push_back(coeff(k) - o.coeff(k));
  return MatrixLaurentPoly(m_, lo, std::move(C));
}

MatrixLaurentPoly MatrixLaurentPoly::mulConst(const Eigen::MatrixXcd& U) const {
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(C_.size());
  for (const auto& M : C_) C.push_back(M * U);
  return MatrixLaurentPoly(m_, lo_, std::move(C));
}

double MatrixLaurentPoly::maxAbs() const {
  double m = 0.0;
  for (const auto& M : C_) m = std::max(m, M.cwiseAbs().maxCoeff());
  return m;
}

bool MatrixLaurentPoly::isSelfAdjoint(Domain d, double relTol) const {
  const double scale = relTol * (1.0 + maxAbs());
  for (int k = lo(); k <= hi(); ++k) {
    Eigen::MatrixXcd want =
        (d == Domain::disc) ? coeff(-k).adjoint().eval() : coeff(k).adjoint().eval();
    if ((coeff(k) - want).cwiseAbs().maxCoeff() > scale) return false;
  }
  return true;
}

MatrixLaurentPoly& MatrixLaurentPoly::trim() {
  const double thr = tol::trim_rel * maxAbs();
  auto negligible = [&](const Eigen::MatrixXcd& M) {
    return M.size() == 0 || M.cwiseAbs().maxCoeff() <= thr;
  };
  while (!C_.empty() && negligible(C_.back())) C_.pop_back();
  while (!C_.empty() && negligible(C_.front())) {
    C_.erase(C_.begin());
    ++lo_;
  }
  if (C_.empty()) lo_ = 0;
  return *this;
}

std::vector<cd> boundaryGrid(Domain d, int n) {
  std::vector<cd> g;
  g.reserve(static_cast<size_t>(n));
  if (d == Domain::disc) {
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * M_PI * k / n;
      g.emplace_back(std::cos(th), std::sin(th));
    }
  } else {
    // Chebyshev abscissae cubed: real points in [-50, 50], denser near 0.
    for (int k = 0; k < n; ++k) {
      double t = std::cos(M_PI * k / (n - 1));
      g.emplace_back(50.0 * t * t * t, 0.0);
    }
  }
  return g;
}

}  // namespace specfact
