#include "specfact/poly.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace specfact {

Poly Poly::monomial(int k, cd c) {
  std::vector<cd> v(static_cast<size_t>(k) + 1, cd(0.0));
  v.back() = c;
  return Poly(std::move(v));
}

double Poly::maxAbs() const {
  double m = 0.0;
  for (const cd& x : c_) m = std::max(m, std::abs(x));
  return m;
}

cd Poly::operator()(cd z) const {
  cd v(0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * z + *it;
  return v;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<cd> d(c_.size() - 1);
  for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * double(k);
  return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<cd> r(std::max(c_.size(), o.c_.size()), cd(0.0));
  for (size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cd(-1.0); }

Poly Poly::operator*(const Poly& o) const {
  if (isZero() || o.isZero()) return Poly();
  std::vector<cd> r(c_.size() + o.c_.size() - 1, cd(0.0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Poly(std::move(r));
}

Poly Poly::operator*(cd s) const {
  std::vector<cd> r = c_;
  for (cd& x : r) x *= s;
  return Poly(std::move(r));
}

Poly& Poly::operator*=(cd s) {
  for (cd& x : c_) x *= s;
  trim();
  return *this;
}

Poly Poly::conjCoeffs() const {
  std::vector<cd> r = c_;
  for (cd& x : r) x = std::conj(x);
  return Poly(std::move(r));
}

Poly Poly::conjReversed() const {
  std::vector<cd> r(c_.rbegin(), c_.rend());
  for (cd& x : r) x = std::conj(x);
  return Poly(std::move(r));
}

Poly Poly::shifted(int k) const {
  if (isZero() || k == 0) return *this;
  std::vector<cd> r(static_cast<size_t>(k), cd(0.0));
  r.insert(r.end(), c_.begin(), c_.end());
  return Poly(std::move(r));
}

std::pair<Poly, cd> Poly::deflate(cd r) const {
  if (c_.size() <= 1) return {Poly(), c_.empty() ? cd(0.0) : c_[0]};
  std::vector<cd> q(c_.size() - 1);
  if (std::abs(r) <= 1.0) {
    // Forward synthetic division, stable for |r| <= 1.
    cd acc = c_.back();
    for (int k = static_cast<int>(c_.size()) - 2; k >= 0; --k) {
      q[k] = acc;
      acc = c_[k] + acc * r;
    }
    return {Poly(std::move(q)), acc};
  }
  // Backward recurrence from the constant term, stable for |r| > 1.
  // Bottom-up division p = (z-r)q + s*z^n: the residue lands on the top
  // coefficient scaled by r^{-n}, so an inexact root only perturbs q by
  // |p(r)|/|r|^n instead of contaminating every low coefficient.
  q[0] = -c_[0] / r;
  for (size_t k = 1; k + 1 < c_.size(); ++k) q[k] = (q[k - 1] - c_[k]) / r;
  return {Poly(std::move(q)), (*this)(r)};
}

Poly& Poly::trim() {
  double thr = tol::trim_rel * maxAbs();
  while (!c_.empty() && std::abs(c_.back()) <= thr) c_.pop_back();
  return *this;
}

namespace {

// Parlett-Reinsch balancing with radix-2 scale factors.
void balance(Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  bool converged = false;
  while (!converged) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        r += std::abs(A(i, j));
        c += std::abs(A(j, i));
      }
      if (r == 0.0 || c == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        A.row(i) /= f;
        A.col(i) *= f;
      }
    }
  }
}

void newtonPolish(const Poly& p, const Poly& dp, cd& z) {
  double best = std::abs(p(z));
  for (int it = 0; it < 3 && best > 0.0; ++it) {
    cd d = dp(z);
    if (std::abs(d) < 1e-14 * (1.0 + std::abs(p(z)))) break;
    cd z2 = z - p(z) / d;
    double v = std::abs(p(z2));
    // Demand a real improvement: at a split multiple root |p| sits at the
    // evaluation noise floor, and accepting a marginal decrease trades a large
    // root displacement (ruining the backward-stable root multiset) for noise.
    if (v < 0.5 * best) {
      z = z2;
      best = v;
    } else {
      break;
    }
  }
}

void quadraticRoots(cd a, cd b, cd c, std::vector<cd>& out) {
  cd d = std::sqrt(b * b - 4.0 * a * c);
  if (std::real(std::conj(b) * d) < 0.0) d = -d;
  cd q = -0.5 * (b + d);
  if (std::abs(q) > 0.0) {
    out.push_back(q / a);
    out.push_back(c / q);
  } else {
    out.push_back(cd(0.0));
    out.push_back(cd(0.0));
  }
}

// Remainder coefficients (degree < k) of T divided by the monic polynomial
// u^k + F[k-1] u^{k-1} + ... + F[0]; Q receives the quotient.
std::vector<cd> polyMod(const std::vector<cd>& T, const std::vector<cd>& F,
                        std::vector<cd>* Q = nullptr) {
  const int N = static_cast<int>(T.size()) - 1;
  const int k = static_cast<int>(F.size());
  std::vector<cd> R = T;
  if (Q) Q->assign(static_cast<size_t>(std::max(N - k + 1, 0)), cd(0.0));
  for (int i = N; i >= k; --i) {
    cd f = R[static_cast<size_t>(i)];
    if (Q) (*Q)[static_cast<size_t>(i - k)] = f;
    for (int j = 0; j < k; ++j) R[static_cast<size_t>(i - k + j)] -= f * F[static_cast<size_t>(j)];
    R[static_cast<size_t>(i)] = cd(0.0);
  }
  R.resize(static_cast<size_t>(k));
  return R;
}

// Tight clusters are eps^(1/m) splits of a multiple root: the root is simple
// in the (m-1)th derivative, where Newton recovers it to full precision, and
// the members snap to that point.
void snapTightClusters(std::vector<cd>& rs, const Poly& p) {
  if (rs.size() < 2) return;
  std::vector<bool> used(rs.size(), false);
  for (size_t i = 0; i < rs.size(); ++i) {
    if (used[i]) continue;
    std::vector<size_t> cluster{i};
    used[i] = true;
    for (size_t j = i + 1; j < rs.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(rs[j] - rs[i]) <= tol::pair * (1.0 + std::abs(rs[i]))) {
        cluster.push_back(j);
        used[j] = true;
      }
    }
    const size_t m = cluster.size();
    if (m < 2) continue;
    cd center(0.0);
    for (size_t j : cluster) center += rs[j];
    center /= double(m);
    Poly dk = p;
    for (size_t k = 1; k < m; ++k) dk = dk.derivative();
    const Poly dk1 = dk.derivative();
    cd z = center;
    for (int it = 0; it < 8; ++it) {
      cd dv = dk1(z);
      if (std::abs(dv) < 1e-300) break;
      cd step = dk(z) / dv;
      if (!std::isfinite(std::abs(step))) break;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(z - center) <= 10.0 * tol::pair * (1.0 + std::abs(center)))
      for (size_t j : cluster) rs[j] = z;
  }
}

// A wider cluster of k computed roots -- genuinely distinct roots too close
// for individually well-conditioned positions, or a strongly split multiple
// root -- is only stable through its local monic factor F, whose coefficients
// are well-conditioned functions of p. Refine F by Newton on "p mod F = 0" in
// shifted/scaled coordinates and re-extract the cluster from F: the returned
// multiset then reproduces p to working precision even where the individual
// roots cannot.
void polishRootClusters(std::vector<cd>& rs, const Poly& p) {
  snapTightClusters(rs, p);
  if (rs.size() < 2) return;
  std::vector<bool> used(rs.size(), false);
  for (size_t i = 0; i < rs.size(); ++i) {
    if (used[i]) continue;
    std::vector<size_t> cluster{i};
    used[i] = true;
    cd center = rs[i];
    for (size_t j = i + 1; j < rs.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(rs[j] - center) <= 1e-3 * (1.0 + std::abs(center))) {
        cluster.push_back(j);
        used[j] = true;
        center = cd(0.0);
        for (size_t q : cluster) center += rs[q];
        center /= double(cluster.size());
      }
    }
    const size_t k = cluster.size();
    if (k < 2 || k > 8 || static_cast<int>(k) > p.deg()) continue;

    double spread = 0.0;
    for (size_t j : cluster) spread = std::max(spread, std::abs(rs[j] - center));
    // Tight clusters were already snapped; refine only genuinely split ones.
    if (spread <= tol::pair * (1.0 + std::abs(center))) continue;
    const double s = spread;

    // Taylor coefficients of p(center + s*u).
    std::vector<cd> T = p.coeffs();
    const int n = static_cast<int>(T.size());
    for (int j = 0; j < n; ++j)
      for (int q = n - 2; q >= j; --q) T[static_cast<size_t>(q)] += center * T[static_cast<size_t>(q) + 1];
    double sp = 1.0;
    for (int j = 0; j < n; ++j) {
      T[static_cast<size_t>(j)] *= sp;
      sp *= s;
    }

    std::vector<cd> F(k);  // monic local factor, low coefficients
    {
      std::vector<cd> f{cd(1.0)};
      for (size_t j : cluster) {
        cd w = (rs[j] - center) / s;
        f.insert(f.begin(), cd(0.0));
        for (size_t q = 0; q + 1 < f.size(); ++q) f[q] -= w * f[q + 1];
      }
      for (size_t q = 0; q < k; ++q) F[q] = f[q];
    }

    std::vector<cd> Q;
    std::vector<cd> R = polyMod(T, F, &Q);
    auto rnorm = [](const std::vector<cd>& v) {
      double a = 0.0;
      for (const cd& x : v) a = std::max(a, std::abs(x));
      return a;
    };
    double best = rnorm(R);
    std::vector<cd> bestF = F;
    bool ok = true;
    for (int it = 0; it < 12 && best > 0.0; ++it) {
      Eigen::MatrixXcd J(k, k);
      std::vector<cd> Qu = Q;  // Q * u^j, reduced mod F
      for (size_t j = 0; j < k; ++j) {
        std::vector<cd> col = polyMod(Qu, F);
        for (size_t q = 0; q < k; ++q) J(static_cast<long>(q), static_cast<long>(j)) = -col[q];
        Qu.insert(Qu.begin(), cd(0.0));
      }
      Eigen::VectorXcd rhs(k);
      for (size_t q = 0; q < k; ++q) rhs(static_cast<long>(q)) = -R[q];
      Eigen::VectorXcd dF = J.fullPivLu().solve(rhs);
      if (!dF.allFinite()) { ok = false; break; }
      for (size_t q = 0; q < k; ++q) F[q] += dF(static_cast<long>(q));
      R = polyMod(T, F, &Q);
      double v = rnorm(R);
      if (v < best) {
        best = v;
        bestF = F;
      } else {
        break;
      }
    }
    if (!ok) continue;

    // Roots of the refined factor, mapped back.
    std::vector<cd> w;
    if (k == 2) {
      quadraticRoots(cd(1.0), bestF[1], bestF[0], w);
    } else {
      Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(static_cast<long>(k), static_cast<long>(k));
      for (size_t q = 0; q < k; ++q) C(static_cast<long>(q), static_cast<long>(k) - 1) = -bestF[q];
      C.block(1, 0, static_cast<long>(k) - 1, static_cast<long>(k) - 1).setIdentity();
      Eigen::ComplexSchur<Eigen::MatrixXcd> sch(C, false);
      if (sch.info() != Eigen::Success) continue;
      for (size_t q = 0; q < k; ++q) w.push_back(sch.matrixT()(static_cast<long>(q), static_cast<long>(q)));
    }
    bool sane = w.size() == k;
    for (const cd& u : w)
      if (!(std::abs(u) <= 1e3)) sane = false;
    if (!sane) continue;
    for (size_t q = 0; q < k; ++q) rs[cluster[q]] = center + s * w[q];
  }
}

}  // namespace

std::vector<cd> roots(const Poly& p) {
  Poly q = p;
  q.trim();
  if (q.deg() < 1) throw DegenerateLeadingCoefficient("roots: degree < 1");

  std::vector<cd> out;
  // Near-zero low coefficients contribute roots at the origin.
  std::vector<cd> c = q.coeffs();
  const double thr = tol::trim_rel * q.maxAbs();
  size_t z0 = 0;
  while (z0 + 1 < c.size() && std::abs(c[z0]) <= thr) ++z0;
  out.insert(out.end(), z0, cd(0.0));
  c.erase(c.begin(), c.begin() + static_cast<long>(z0));

  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) {
    out.push_back(-c[0] / c[1]);
  } else if (n == 2) {
    quadraticRoots(c[2], c[1], c[0], out);
  } else if (n >= 3) {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) C(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
    C.block(1, 0, n - 1, n - 1).setIdentity();
    balance(C);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(C, /*computeU=*/false);
    if (schur.info() != Eigen::Success)
      throw SpecfactError("roots: Schur decomposition failed");
    Poly red{std::vector<cd>(c)};
    Poly dred = red.derivative();
    for (int i = 0; i < n; ++i) {
      cd r = schur.matrixT()(i, i);
      newtonPolish(red, dred, r);
      out.push_back(r);
    }
  }
  polishRootClusters(out, q);
  return out;
}

double LaurentPoly::maxAbs() const {
  double m = 0.0;
  for (const cd& x : c_) m = std::max(m, std::abs(x));
  return m;
}

cd LaurentPoly::operator()(cd z) const {
  cd v(0.0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * z + *it;
  if (lo_ > 0) return v * std::pow(z, lo_);
  if (lo_ < 0) return v / std::pow(z, -lo_);
  return v;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  if (isZero()) return o;
  if (o.isZero()) return *this;
  int lo = std::min(lo_, o.lo_);
  int hi = std::max(this->hi(), o.hi());
  std::vector<cd> r(static_cast<size_t>(hi - lo + 1), cd(0.0));
  for (int k = lo; k <= hi; ++k) r[static_cast<size_t>(k - lo)] = coeff(k) + o.coeff(k);
  return LaurentPoly(lo, std::move(r));
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  return *this + o * cd(-1.0);
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  if (isZero() || o.isZero()) return LaurentPoly();
  std::vector<cd> r(c_.size() + o.c_.size() - 1, cd(0.0));
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return LaurentPoly(lo_ + o.lo_, std::move(r));
}

LaurentPoly LaurentPoly::operator*(cd s) const {
  std::vector<cd> r = c_;
  for (cd& x : r) x *= s;
  return LaurentPoly(lo_, std::move(r));
}

LaurentPoly LaurentPoly::adjoint(Domain d) const {
  std::vector<cd> r;
  r.reserve(c_.size());
  if (d == Domain::disc) {
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r.push_back(std::conj(*it));
    return LaurentPoly(-hi(), std::move(r));
  }
  for (const cd& x : c_) r.push_back(std::conj(x));
  return LaurentPoly(lo_, std::move(r));
}

bool LaurentPoly::isSelfAdjoint(Domain d, double relTol) const {
  LaurentPoly diff = *this - adjoint(d);
  return diff.maxAbs() <= relTol * (1.0 + maxAbs());
}

LaurentPoly& LaurentPoly::trim() {
  double thr = tol::trim_rel * maxAbs();
  while (!c_.empty() && std::abs(c_.back()) <= thr) c_.pop_back();
  while (!c_.empty() && std::abs(c_.front()) <= thr) {
    c_.erase(c_.begin());
    ++lo_;
  }
  if (c_.empty()) lo_ = 0;
  return *this;
}

}  // namespace specfact
