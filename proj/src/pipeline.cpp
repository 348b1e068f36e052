#include "specfact/pipeline.hpp"

#include <functional>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace specfact {

cd anchorPoint(Domain d) { return d == Domain::disc ? cd(0.0) : cd(0.0, 1.0); }

bool strictlyInRegion(cd a, Domain d) {
  if (d == Domain::disc) return std::abs(a) < 1.0 - tol::boundary;
  return std::imag(a) > tol::boundary * (1.0 + std::abs(a));
}

bool onBoundary(cd a, Domain d, double band) {
  if (d == Domain::disc) return std::abs(std::abs(a) - 1.0) <= band;
  return std::abs(std::imag(a)) <= band * (1.0 + std::abs(a));
}

RationalFn BlaschkeFactor::fn() const {
  Poly zMinusA{-a, cd(1.0)};
  Poly other = (d == Domain::disc) ? Poly{cd(1.0), -std::conj(a)}
                                   : Poly{-std::conj(a), cd(1.0)};
  if (kind == poleClear) return RationalFn(zMinusA, other);
  return RationalFn(other, zMinusA);
}

RationalMatrix rationalCholesky(const MatrixLaurentPoly& S, Domain d) {
  const int m = S.dim();
  RationalMatrix A = S.toRational();
  RationalMatrix B(m);
  for (int n = 0; n < m; ++n) {
    RationalFn pivot = A.at(n, n);
    for (int j = 0; j < n; ++j)
      pivot = pivot - B.at(n, j) * B.at(n, j).adjoint(d);
    if (pivot.isZero())
      throw SingularPrincipalMinor("identically zero diagonal pivot");
    B.at(n, n) = rationalSqrt(pivot, d);
    RationalFn adjDiag = B.at(n, n).adjoint(d);
    for (int k = n + 1; k < m; ++k) {
      RationalFn e = A.at(k, n);
      for (int j = 0; j < n; ++j)
        e = e - B.at(k, j) * B.at(n, j).adjoint(d);
      B.at(k, n) = e / adjDiag;
    }
  }
  return B;
}

namespace {

double columnDrift(const RationalMatrix& before, const RationalMatrix& after, int col,
                   const StepTracking& track) {
  const int m = before.dim();
  double worst = 0.0;
  Eigen::VectorXcd b(m), a(m);
  for (size_t g = 0; g < track.grid.size(); ++g) {
    const cd z = track.grid[g];
    for (int i = 0; i < m; ++i) {
      b(i) = before.at(i, col).evalUnsafe(z);
      a(i) = after.at(i, col).evalUnsafe(z);
    }
    // Only column `col` changed, so the product difference is the difference
    // of the two rank-one column contributions.
    double diff = (a * a.adjoint() - b * b.adjoint()).norm();
    worst = std::max(worst, diff / (1.0 + track.spectrumNorm[g]));
  }
  return worst;
}

double fullDrift(const RationalMatrix& before, const RationalMatrix& after,
                 const StepTracking& track) {
  double worst = 0.0;
  for (size_t g = 0; g < track.grid.size(); ++g) {
    const cd z = track.grid[g];
    Eigen::MatrixXcd B = before.evalUnsafe(z);
    Eigen::MatrixXcd A = after.evalUnsafe(z);
    double diff = (A * A.adjoint() - B * B.adjoint()).norm();
    worst = std::max(worst, diff / (1.0 + track.spectrumNorm[g]));
  }
  return worst;
}

// First in-region pole found in a column, or nullopt-style flag via bool.
bool findColumnPole(const RationalMatrix& A, int col, Domain d, cd& out) {
  for (int i = 0; i < A.dim(); ++i) {
    for (const cd& p : A.at(i, col).poles()) {
      if (onBoundary(p, d))
        throw PoleOnBoundary("entry pole on the boundary");
      if (strictlyInRegion(p, d)) {
        out = p;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::pair<RationalMatrix, std::vector<SweepStep>> sweepPoles(
    RationalMatrix S0, Domain d, bool reverseOrder, const StepTracking* track) {
  const int m = S0.dim();
  std::vector<SweepStep> steps;
  std::vector<int> order(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j)
    order[static_cast<size_t>(j)] = reverseOrder ? m - 1 - j : j;

  int guard = 0;
  const int cap = 64 + 64 * m * m;
  bool found = true;
  while (found) {
    found = false;
    for (int j : order) {
      cd pole;
      while (findColumnPole(S0, j, d, pole)) {
        found = true;
        BlaschkeFactor b{pole, d, BlaschkeFactor::poleClear, j};
        SweepStep step;
        step.blaschke = b;
        if (track) {
          RationalMatrix before = S0;
          S0.scaleColumn(j, b.fn());
          step.productDrift = columnDrift(before, S0, j, *track);
        } else {
          S0.scaleColumn(j, b.fn());
        }
        steps.push_back(std::move(step));
        if (++guard > cap)
          throw IterationLimitExceeded("pole sweep did not terminate");
      }
    }
  }
  return {std::move(S0), std::move(steps)};
}

Eigen::MatrixXcd kernelUnitary(const Eigen::MatrixXcd& A, bool altBasis) {
  const int n = static_cast<int>(A.rows());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double norm = sv.size() > 0 ? sv(0) : 0.0;
  if (norm == 0.0) return Eigen::MatrixXcd::Identity(n, n);
  // 1 + norm, not norm: at a determinant root the whole matrix can be tiny
  // (always so for 1x1), and a pure relative test would reject it.
  if (sv(n - 1) > tol::rank_rel * (1.0 + norm))
    throw NotSingular("matrix is not singular to working precision");
  Eigen::VectorXcd v = svd.matrixV().col(n - 1);

  if (altBasis) {
    Eigen::MatrixXcd U(n, n);
    U.col(0) = v;
    for (int j = 1; j < n; ++j) U.col(j) = svd.matrixV().col(j - 1);
    return U;
  }

  // Householder completion of the unit null vector to an orthonormal basis.
  cd beta = (std::abs(v(0)) > 0.0) ? cd(-v(0) / std::abs(v(0))) : cd(1.0);
  Eigen::VectorXcd w = v;
  w(0) -= beta;
  double wn = w.norm();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Identity(n, n);
  if (wn > 1e-14) {
    w /= wn;
    U -= 2.0 * (w * w.adjoint());
  }
  U.col(0) *= beta;
  return U;
}

int inRegionZeroCount(const RationalMatrix& A, Domain d) {
  RationalFn det = A.det();
  if (det.isZero() || det.num().deg() < 1) return 0;
  int count = 0;
  for (const cd& r : roots(det.num()))
    if (strictlyInRegion(r, d)) ++count;
  return count;
}

namespace {

// Matrix of polynomials over one scalar monic denominator. Generic rational
// arithmetic is unusable for the zero sweep: every step multiplies entry
// denominators together, the cofactor determinant degree explodes, and its
// root finder starts reporting phantom in-region zeros. With a shared
// denominator the sweep is pure polynomial arithmetic of bounded degree.
struct CommonDenMatrix {
  int m = 0;
  std::vector<Poly> P;  // row-major m*m
  std::vector<cd> qRoots;

  Poly& at(int i, int j) { return P[static_cast<size_t>(i) * m + j]; }
  const Poly& at(int i, int j) const { return P[static_cast<size_t>(i) * m + j]; }

  cd qAt(cd z) const {
    cd v(1.0);
    for (const cd& r : qRoots) v *= z - r;
    return v;
  }

  Eigen::MatrixXcd eval(cd z) const {
    Eigen::MatrixXcd M(m, m);
    const cd q = qAt(z);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) M(i, j) = at(i, j)(z) / q;
    return M;
  }
};

bool sameRoot(cd a, cd b) { return std::abs(a - b) <= tol::cancel * (1.0 + std::abs(a)); }

// Occurrence counts of each distinct value within one root list.
std::vector<std::pair<cd, int>> rootMultiset(const std::vector<cd>& rs) {
  std::vector<std::pair<cd, int>> out;
  for (const cd& r : rs) {
    bool found = false;
    for (auto& [v, k] : out)
      if (sameRoot(v, r)) {
        ++k;
        found = true;
        break;
      }
    if (!found) out.emplace_back(r, 1);
  }
  return out;
}

CommonDenMatrix toCommonDen(const RationalMatrix& A) {
  const int m = A.dim();
  CommonDenMatrix C;
  C.m = m;
  C.P.resize(static_cast<size_t>(m) * m);

  std::vector<std::vector<cd>> dens(static_cast<size_t>(m) * m);
  std::vector<std::pair<cd, int>> pool;  // root -> max multiplicity over entries
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Poly& den = A.at(i, j).den();
      if (den.deg() < 1) continue;
      auto& rs = dens[static_cast<size_t>(i) * m + j];
      rs = roots(den);
      for (auto& [v, k] : rootMultiset(rs)) {
        bool found = false;
        for (auto& [pv, pk] : pool)
          if (sameRoot(pv, v)) {
            pk = std::max(pk, k);
            found = true;
            break;
          }
        if (!found) pool.emplace_back(v, k);
      }
    }
  for (auto& [v, k] : pool) C.qRoots.insert(C.qRoots.end(), static_cast<size_t>(k), v);

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      // num * (q / den), with q/den taken as the complement root product.
      std::vector<cd> left = C.qRoots;
      for (const cd& r : dens[static_cast<size_t>(i) * m + j]) {
        for (size_t k = 0; k < left.size(); ++k)
          if (sameRoot(left[k], r)) {
            left.erase(left.begin() + static_cast<long>(k));
            break;
          }
      }
      Poly p = A.at(i, j).num();
      for (const cd& r : left) p = p * Poly{-r, cd(1.0)};
      C.at(i, j) = std::move(p);
    }
  return C;
}

Poly polyDet(const CommonDenMatrix& C, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  if (rows.size() == 1) return C.at(rows[0], cols[0]);
  Poly acc;
  std::vector<int> subRows(rows.begin() + 1, rows.end());
  for (size_t k = 0; k < cols.size(); ++k) {
    std::vector<int> subCols;
    for (size_t j = 0; j < cols.size(); ++j)
      if (j != k) subCols.push_back(cols[j]);
    Poly term = C.at(rows[0], cols[k]) * polyDet(C, subRows, subCols);
    acc = (k % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

Poly polyDet(const CommonDenMatrix& C) {
  std::vector<int> idx(static_cast<size_t>(C.m));
  for (int i = 0; i < C.m; ++i) idx[static_cast<size_t>(i)] = i;
  return polyDet(C, idx, idx);
}

std::vector<cd> inRegionDetZeros(const Poly& det, Domain d) {
  std::vector<cd> out;
  if (det.deg() >= 1)
    for (const cd& r : roots(det))
      if (strictlyInRegion(r, d)) out.push_back(r);
  return out;
}

// In-region candidates confirmed against the matrix itself: the high-degree
// cofactor determinant carries cancellation noise in its top coefficients,
// and the phantom roots it spawns must not be swept. Candidates get polished
// with Newton on det(C(z)) evaluated pointwise (immune to that noise) before
// the rank test.
cd newtonOnDet(const CommonDenMatrix& C, Domain d, cd r) {
  auto f = [&](cd z) { return C.eval(z).determinant(); };
  for (int it = 0; it < 6; ++it) {
    cd fv = f(r);
    double h = 6e-6 * (1.0 + std::abs(r));
    cd df = (f(r + h) - f(r - h)) / (2.0 * h);
    if (std::abs(df) == 0.0) break;
    cd z = r - fv / df;
    if (!strictlyInRegion(z, d) || std::abs(f(z)) >= std::abs(fv)) break;
    r = z;
  }
  return r;
}

// Distinct candidates may collapse onto one zero (and true zeros may be
// multiple), so the count per cluster comes from the winding number of
// det(C(z)) on a small circle -- an integer, immune to duplicated candidates.
std::vector<cd> windingRecount(const CommonDenMatrix& C, Domain d,
                               const std::vector<cd>& candidates) {
  auto f = [&](cd z) { return C.eval(z).determinant(); };
  std::vector<cd> out;
  std::vector<bool> done(candidates.size(), false);
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (done[i]) continue;
    cd c = candidates[i];
    int members = 1;
    done[i] = true;
    for (size_t j = i + 1; j < candidates.size(); ++j)
      if (!done[j] && std::abs(candidates[j] - c) <= 1e-5 * (1.0 + std::abs(c))) {
        c += (candidates[j] - c) / cd(double(++members));
        done[j] = true;
      }
    c = newtonOnDet(C, d, c);
    if (!strictlyInRegion(c, d)) continue;
    const double rho = 1e-4 * (1.0 + std::abs(c));
    const int K = 24;
    double winding = 0.0;
    cd prev = f(c + rho);
    for (int k = 1; k <= K; ++k) {
      double th = 2.0 * M_PI * k / K;
      cd cur = f(c + rho * cd(std::cos(th), std::sin(th)));
      winding += std::arg(cur / prev);
      prev = cur;
    }
    int mult = static_cast<int>(std::lround(winding / (2.0 * M_PI)));
    for (int k = 0; k < std::max(mult, 0); ++k) out.push_back(c);
  }
  return out;
}

std::vector<cd> verifiedDetZeros(const CommonDenMatrix& C, const Poly& det, Domain d) {
  std::vector<cd> polished;
  for (cd r : inRegionDetZeros(det, d)) {
    r = newtonOnDet(C, d, r);
    Eigen::MatrixXcd A = C.eval(r);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    if (svd.singularValues()(C.m - 1) <= tol::rank_rel * (1.0 + A.norm()))
      polished.push_back(r);
  }
  return windingRecount(C, d, polished);
}

double commonDenDrift(const CommonDenMatrix& before, const CommonDenMatrix& after,
                      const StepTracking& track) {
  double worst = 0.0;
  for (size_t g = 0; g < track.grid.size(); ++g) {
    const cd z = track.grid[g];
    Eigen::MatrixXcd B = before.eval(z);
    Eigen::MatrixXcd A = after.eval(z);
    double diff = (A * A.adjoint() - B * B.adjoint()).norm();
    worst = std::max(worst, diff / (1.0 + track.spectrumNorm[g]));
  }
  return worst;
}

}  // namespace

std::pair<RationalMatrix, std::vector<SweepStep>> sweepDetZeros(
    RationalMatrix S0p, Domain d, bool altKernelBasis, int iterCap,
    const StepTracking* track) {
  const int m = S0p.dim();
  std::vector<SweepStep> steps;
  if (iterCap <= 0) iterCap = 16 + 8 * m * m;

  CommonDenMatrix C = toCommonDen(S0p);
  int iters = 0;
  Poly det = polyDet(C);
  det.trim();
  if (det.isZero())
    throw SingularPrincipalMinor("identically singular matrix in zero sweep");
  std::vector<cd> inRegion = verifiedDetZeros(C, det, d);
  while (!inRegion.empty()) {
    // Deepest in-region zero first.
    auto depth = [d](cd a) {
      return d == Domain::disc ? 1.0 - std::abs(a) : std::imag(a);
    };
    cd a = *std::max_element(inRegion.begin(), inRegion.end(),
                             [&](cd x, cd y) { return depth(x) < depth(y); });

    Eigen::MatrixXcd U = kernelUnitary(C.eval(a), altKernelBasis);
    BlaschkeFactor b{a, d, BlaschkeFactor::zeroClear, 0};

    SweepStep step;
    step.blaschke = b;
    step.isZeroStep = true;
    step.unitary = U;
    step.zerosBefore = static_cast<int>(inRegion.size());

    CommonDenMatrix next = C;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Poly acc;
        for (int k = 0; k < m; ++k) acc = acc + C.at(i, k) * U(k, j);
        next.at(i, j) = std::move(acc);
      }
    // Column 0 vanishes at a by construction of U; divide the zero out
    // exactly and append the paraunitary numerator.
    const Poly bNum = (d == Domain::disc) ? Poly{cd(1.0), -std::conj(a)}
                                          : Poly{-std::conj(a), cd(1.0)};
    for (int i = 0; i < m; ++i) {
      auto [quot, rem] = next.at(i, 0).deflate(a);
      (void)rem;
      next.at(i, 0) = quot * bNum;
    }
    if (track) step.productDrift = commonDenDrift(C, next, *track);
    C = std::move(next);

    // The step multiplies det by bNum/(z - a): one copy of a leaves the
    // region and no other zero moves, so the survivors are already known.
    // Recounting them by winding numbers on the updated matrix verifies the
    // claim without refactoring the full determinant.
    std::vector<cd> expected = inRegion;
    auto it = std::min_element(expected.begin(), expected.end(),
                               [&](cd x, cd y) { return std::abs(x - a) < std::abs(y - a); });
    expected.erase(it);
    std::vector<cd> zerosAfter = windingRecount(C, d, expected);
    step.zerosAfter = static_cast<int>(zerosAfter.size());
    if (step.zerosAfter >= step.zerosBefore)
      throw ZeroOnBoundaryUnresolvable(
          "determinant zero count did not decrease");
    inRegion = std::move(zerosAfter);
    steps.push_back(std::move(step));
    if (++iters > iterCap)
      throw IterationLimitExceeded("zero sweep exceeded iteration cap");
  }

  // Back to rational entries; shared poles cancel at construction.
  Poly q = Poly::one();
  for (const cd& r : C.qRoots) q = q * Poly{-r, cd(1.0)};
  RationalMatrix out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = RationalFn::uncancelled(C.at(i, j), q);
  return {std::move(out), std::move(steps)};
}

SpectralFactor extractPolynomial(const RationalMatrix& Sp, const MatrixLaurentPoly& S,
                                 Domain d) {
  const int m = Sp.dim();
  const int N = (d == Domain::disc) ? S.hi() : S.hi() / 2;

  int maxDeg = 0;
  const std::vector<cd> grid = boundaryGrid(d, defaultGridSize(d));
  std::vector<double> wscale(grid.size());
  double zmax = 1.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    // Factor entries live at the square root of the spectrum's scale.
    wscale[g] = 1.0 / (1.0 + std::sqrt(S.eval(grid[g]).norm()));
    zmax = std::max(zmax, std::abs(grid[g]));
  }
  std::vector<Poly> entries(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const RationalFn& e = Sp.at(i, j);
      Poly num = e.num();
      const Poly& den = e.den();
      if (num.isZero()) {
        num = Poly();
      } else if (den.deg() >= 1) {
        // Residual poles must be removable, but multiple roots split by
        // eps^(1/k) defeat root matching and coefficient-level division:
        // the entry's boundary values are accurate even when its num / den
        // coefficient pair is not. Fit p to num(z) = p(z) den(z) on the
        // boundary grid (scaled monomial basis) and demand the residual
        // sits at the entry's value noise floor.
        // Trimming can shave noise-level top coefficients off num, so the
        // apparent degree gap is unreliable; the factor entry degree is
        // bounded by N regardless.
        const int dp = N;
        const int rows = static_cast<int>(grid.size());
        Eigen::MatrixXcd A(rows, dp + 1);
        Eigen::VectorXcd b(rows);
        for (int g = 0; g < rows; ++g) {
          const cd z = grid[static_cast<size_t>(g)];
          // Rows weighted against the factor scale: magnitudes span many
          // decades over the grid, and unweighted rows at the extremes
          // drown the rest. The ratio num(z) / den(z) is never formed.
          const double w = wscale[static_cast<size_t>(g)] / (1.0 + std::abs(den(z)));
          b(g) = w * num(z);
          cd basis(1.0);
          for (int c = 0; c <= dp; ++c) {
            A(g, c) = w * basis * den(z);
            basis *= z / zmax;
          }
        }
        Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
        double rmax = (A * x - b).cwiseAbs().maxCoeff();
        // Wide-split zero clusters can leave near-inner rational residue in
        // a single entry; the best polynomial fit is then still inside the
        // Gauss-Newton basin of the final grid polish, while a genuine
        // residual pole rejects at O(1) here.
        if (rmax > 0.5)
          throw ResidualDenominator("non-constant denominator after sweeps");
        std::vector<cd> pc(static_cast<size_t>(dp) + 1);
        double sc = 1.0;
        for (int c = 0; c <= dp; ++c) {
          pc[static_cast<size_t>(c)] = x(c) / sc;
          sc *= zmax;
        }
        num = Poly(std::move(pc));
      } else {
        num = num * (cd(1.0) / den.coeff(0));
      }
      maxDeg = std::max(maxDeg, num.deg());
      entries[static_cast<size_t>(i) * m + j] = std::move(num);
    }
  if (maxDeg > N) throw DegreeOverflow("factor degree exceeds the top power of S");

  std::vector<Eigen::MatrixXcd> C(static_cast<size_t>(maxDeg) + 1,
                                  Eigen::MatrixXcd::Zero(m, m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k <= entries[static_cast<size_t>(i) * m + j].deg(); ++k)
        C[static_cast<size_t>(k)](i, j) = entries[static_cast<size_t>(i) * m + j].coeff(k);

  SpectralFactor F;
  F.plus = MatrixLaurentPoly(m, 0, std::move(C));
  F.certificate.unitaryFix = Eigen::MatrixXcd::Identity(m, m);
  if (d == Domain::disc) {
    F.certificate.degreeCertified = F.plus.hi() <= N;
  } else {
    // The line factor attains degree exactly N with nonzero top coefficient.
    F.certificate.degreeCertified =
        F.plus.hi() == N &&
        F.plus.coeff(N).norm() > tol::trim_rel * (1.0 + F.plus.maxAbs());
  }
  RationalFn det = F.plus.toRational().det();
  if (!det.isZero() && det.num().deg() >= 1)
    F.certificate.detRoots = roots(det.num());
  return F;
}

SpectralFactor canonicalize(SpectralFactor F, Domain d) {
  const int m = F.plus.dim();
  Eigen::MatrixXcd A0 = F.plus.eval(anchorPoint(d));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A0.adjoint().eval());
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    double mag = std::abs(R(i, i));
    if (mag <= tol::rank_rel * (1.0 + A0.norm()))
      throw AnchorSingular("factor singular at the canonical anchor");
    D(i, i) = R(i, i) / mag;
  }
  Eigen::MatrixXcd V = Q * D;
  F.plus = F.plus.mulConst(V);
  if (F.certificate.unitaryFix.size() == 0)
    F.certificate.unitaryFix = V;
  else
    F.certificate.unitaryFix = F.certificate.unitaryFix * V;
  // Root locations are invariant under a constant right unitary; keep the
  // recorded determinant roots.
  return F;
}

namespace {

// Gauss-Newton polish of the factor coefficients against S on the boundary
// grid: solve dP(z) P(z)^* + P(z) dP(z)^* = S(z) - P(z) P(z)^* in least
// squares over perturbations dP with the factor's support. The system is
// real-linear in (Re dP, Im dP); the constant-unitary gauge null space is
// handled by the rank-revealing QR and a later canonicalize. Keeps a step
// only when the worst normalized residual improves.
void polishFactor(MatrixLaurentPoly& P, const MatrixLaurentPoly& S,
                  const std::vector<cd>& grid, const std::vector<double>& norms) {
  const int m = P.dim();
  const int K = static_cast<int>(P.storage().size());
  const int nu = m * m * K;
  const int G = static_cast<int>(grid.size());

  auto worstResidual = [&](const MatrixLaurentPoly& Q) {
    double w = 0.0;
    for (int g = 0; g < G; ++g) {
      Eigen::MatrixXcd V = Q.eval(grid[g]);
      w = std::max(w, (V * V.adjoint() - S.eval(grid[g])).norm() / (1.0 + norms[static_cast<size_t>(g)]));
    }
    return w;
  };

  double best = worstResidual(P);
  // Only worth the least-squares solve when the residual is within an order
  // of magnitude of the acceptance threshold.
  for (int pass = 0; pass < 12 && best > 1e-10; ++pass) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * G * m * m, 2 * nu);
    Eigen::VectorXd b(2 * G * m * m);
    for (int g = 0; g < G; ++g) {
      const cd z = grid[g];
      const double wt = 1.0 / (1.0 + norms[static_cast<size_t>(g)]);
      Eigen::MatrixXcd V = P.eval(z);
      Eigen::MatrixXcd R = S.eval(z) - V * V.adjoint();
      std::vector<cd> zp(static_cast<size_t>(K));
      cd acc = std::pow(z, P.lo());
      for (int k = 0; k < K; ++k) { zp[static_cast<size_t>(k)] = acc; acc *= z; }
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          const int row = 2 * ((g * m + i) * m + j);
          b(row) = wt * R(i, j).real();
          b(row + 1) = wt * R(i, j).imag();
          for (int k = 0; k < K; ++k)
            for (int bcol = 0; bcol < m; ++bcol) {
              // dP_k(i,b) z^k conj(V(j,b))  -- linear in the unknown
              cd c1 = wt * zp[static_cast<size_t>(k)] * std::conj(V(j, bcol));
              int u1 = 2 * ((k * m + i) * m + bcol);
              A(row, u1) += c1.real();
              A(row, u1 + 1) -= c1.imag();
              A(row + 1, u1) += c1.imag();
              A(row + 1, u1 + 1) += c1.real();
              // V(i,b) conj(dP_k(j,b) z^k)  -- linear in the conjugate
              cd c2 = wt * V(i, bcol) * std::conj(zp[static_cast<size_t>(k)]);
              int u2 = 2 * ((k * m + j) * m + bcol);
              A(row, u2) += c2.real();
              A(row, u2 + 1) += c2.imag();
              A(row + 1, u2) += c2.imag();
              A(row + 1, u2 + 1) -= c2.real();
            }
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-6);
    Eigen::VectorXd x = svd.solve(b);
    bool improved = false;
    for (double t : {1.0, 0.5, 0.25, 0.0625}) {
      std::vector<Eigen::MatrixXcd> C = P.storage();
      for (int k = 0; k < K; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            int u = 2 * ((k * m + i) * m + j);
            C[static_cast<size_t>(k)](i, j) += t * cd(x(u), x(u + 1));
          }
      MatrixLaurentPoly cand(m, P.lo(), std::move(C));
      double w = worstResidual(cand);
      if (w < best) {
        best = w;
        P = std::move(cand);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
}

Poly factorDet(const MatrixLaurentPoly& P) {
  const int m = P.dim();
  std::vector<Poly> E(static_cast<size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      E[static_cast<size_t>(i) * m + j] = P.entry(i, j).numeratorPoly();
  std::vector<int> cols(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) cols[static_cast<size_t>(j)] = j;
  std::function<Poly(int, std::vector<int>&)> minor = [&](int row, std::vector<int>& cs) {
    if (cs.size() == 1)
      return E[static_cast<size_t>(row) * m + cs[0]];
    Poly acc;
    for (size_t k = 0; k < cs.size(); ++k) {
      std::vector<int> rest;
      for (size_t q = 0; q < cs.size(); ++q)
        if (q != k) rest.push_back(cs[q]);
      Poly term = E[static_cast<size_t>(row) * m + cs[k]] * minor(row + 1, rest);
      acc = (k % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
  };
  Poly det = minor(0, cols);
  det.trim();
  return det;
}

// The grid polish preserves F F* but can settle on a factor with a
// determinant zero on the wrong side of the boundary. Relocate each
// in-region zero a with kernel vector v through the inner multiplier
// I + (beta(z) - 1) v v*, beta the Blaschke factor swapping a for its
// mirror image: F v is divisible by (z - a), so the product stays
// polynomial and |beta| = 1 keeps F F* intact on the boundary.
bool flipInRegionZeros(MatrixLaurentPoly& P, Domain d) {
  if (P.lo() < 0) return false;
  const int m = P.dim();
  bool any = false;
  for (int guard = 0; guard < 64; ++guard) {
    Poly det = factorDet(P);
    if (det.deg() < 1) return any;
    cd a(0.0);
    bool found = false;
    for (cd r : roots(det))
      if (strictlyInRegion(r, d) && !onBoundary(r, d, tol::boundary)) {
        a = r;
        found = true;
        break;
      }
    if (!found) return any;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P.eval(a), Eigen::ComputeFullV);
    Eigen::VectorXcd v = svd.matrixV().col(m - 1);
    const Poly bNum = (d == Domain::disc) ? Poly{cd(1.0), -std::conj(a)}
                                          : Poly{-std::conj(a), cd(1.0)};
    std::vector<Eigen::MatrixXcd> C = P.storage();
    int hi = static_cast<int>(C.size()) - 1;
    for (int i = 0; i < m; ++i) {
      std::vector<cd> pc(static_cast<size_t>(hi) + 1, cd(0.0));
      for (int k = 0; k <= hi; ++k)
        for (int j = 0; j < m; ++j)
          pc[static_cast<size_t>(k)] += C[static_cast<size_t>(k)](i, j) * v(j);
      Poly p(std::move(pc));
      Poly q = bNum * p.deflate(a).first;
      Poly delta = q - p;
      for (int k = 0; k <= std::max(delta.deg(), hi); ++k) {
        if (k > hi) break;
        for (int j = 0; j < m; ++j)
          C[static_cast<size_t>(k)](i, j) += delta.coeff(k) * std::conj(v(j));
      }
    }
    P = MatrixLaurentPoly(m, P.lo(), std::move(C));
    any = true;
  }
  return any;
}

[[noreturn]] void rethrowTagged(const char* stage) {
  auto tag = [stage](const SpecfactError& e) {
    return std::string(stage) + ": " + e.what();
  };
#define SPECFACT_RETHROW(Type)       \
  catch (const Type& e) {            \
    throw Type(tag(e));              \
  }
  try {
    throw;
  }
  SPECFACT_RETHROW(PoleAtEvaluationPoint)
  SPECFACT_RETHROW(DimensionMismatch)
  SPECFACT_RETHROW(DegenerateLeadingCoefficient)
  SPECFACT_RETHROW(NotSelfAdjoint)
  SPECFACT_RETHROW(NegativeOnBoundary)
  SPECFACT_RETHROW(UnpairedRoot)
  SPECFACT_RETHROW(SingularPrincipalMinor)
  SPECFACT_RETHROW(PoleOnBoundary)
  SPECFACT_RETHROW(ZeroOnBoundaryUnresolvable)
  SPECFACT_RETHROW(IterationLimitExceeded)
  SPECFACT_RETHROW(NotSingular)
  SPECFACT_RETHROW(ResidualDenominator)
  SPECFACT_RETHROW(DegreeOverflow)
  SPECFACT_RETHROW(AnchorSingular)
  SPECFACT_RETHROW(SpecfactError)
#undef SPECFACT_RETHROW
}

}  // namespace

SpectralFactor factorize(const MatrixLaurentPoly& S, Domain d,
                         const PipelineOptions& opts) {
  if (S.empty()) throw SpecfactError("factorize: empty spectrum");
  if (!S.isSelfAdjoint(d)) throw NotSelfAdjoint("factorize: spectrum is not self-adjoint");
  if (d == Domain::line) {
    if (S.lo() < 0) throw NotSelfAdjoint("factorize: line spectrum has negative powers");
    if (S.hi() % 2 != 0)
      throw NotSelfAdjoint("factorize: line spectrum has odd degree");
  }

  const int gridSize = opts.grid > 0 ? opts.grid : defaultGridSize(d);
  StepTracking track;
  track.grid = boundaryGrid(d, gridSize);
  track.spectrumNorm.reserve(track.grid.size());

  double minEig = 0.0;
  double normS = 0.0;
  bool first = true;
  for (const cd& z : track.grid) {
    Eigen::MatrixXcd M = S.eval(z);
    Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    minEig = first ? lo : std::min(minEig, lo);
    first = false;
    double n = M.norm();
    normS = std::max(normS, n);
    track.spectrumNorm.push_back(n);
  }
  if (minEig < -tol::psd_rel * (1.0 + normS))
    throw NegativeOnBoundary("factorize: spectrum not positive semidefinite on grid");

  const StepTracking* trackPtr = opts.trackStepInvariants ? &track : nullptr;
  const int N = (d == Domain::disc) ? S.hi() : S.hi() / 2;

  SpectralFactor F;
  RationalMatrix S0;
  try {
    S0 = rationalCholesky(S, d);
  } catch (const SpecfactError&) {
    rethrowTagged("cholesky");
  }
  std::vector<SweepStep> poleSteps, zeroSteps;
  try {
    auto [S0p, steps] = sweepPoles(std::move(S0), d, opts.reversePoleOrder, trackPtr);
    S0 = std::move(S0p);
    poleSteps = std::move(steps);
  } catch (const SpecfactError&) {
    rethrowTagged("pole sweep");
  }
  try {
    auto [Spp, steps] = sweepDetZeros(std::move(S0), d, opts.altKernelBasis,
                                      4 * S.dim() * std::max(N, 1) + 8, trackPtr);
    S0 = std::move(Spp);
    zeroSteps = std::move(steps);
  } catch (const SpecfactError&) {
    rethrowTagged("zero sweep");
  }
  try {
    F = extractPolynomial(S0, S, d);
  } catch (const SpecfactError&) {
    rethrowTagged("extract");
  }
  F.certificate.transcript = std::move(poleSteps);
  F.certificate.transcript.insert(F.certificate.transcript.end(),
                                  zeroSteps.begin(), zeroSteps.end());
  polishFactor(F.plus, S, track.grid, track.spectrumNorm);
  if (flipInRegionZeros(F.plus, d)) {
    polishFactor(F.plus, S, track.grid, track.spectrumNorm);
    Poly det = factorDet(F.plus);
    F.certificate.detRoots = det.deg() >= 1 ? roots(det) : std::vector<cd>{};
  }

  F.certificate.minBoundaryEigenvalue = minEig;
  bool nearBoundaryRoot = false;
  for (const cd& r : F.certificate.detRoots)
    if (onBoundary(r, d, 1e-6)) nearBoundaryRoot = true;
  F.certificate.boundaryDegenerate =
      nearBoundaryRoot || minEig <= 1e-6 * (1.0 + normS);

  if (opts.canonical) F = canonicalize(std::move(F), d);

  double worst = 0.0;
  for (size_t g = 0; g < track.grid.size(); ++g) {
    Eigen::MatrixXcd P = F.plus.eval(track.grid[g]);
    Eigen::MatrixXcd diff = P * P.adjoint() - S.eval(track.grid[g]);
    worst = std::max(worst, diff.norm() / (1.0 + track.spectrumNorm[g]));
  }
  F.certificate.reconResidual = worst;
  return F;
}

}  // namespace specfact
