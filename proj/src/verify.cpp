#include "specfact/verify.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace specfact {

namespace {

double gridResidual(const MatrixLaurentPoly& S, const MatrixLaurentPoly& plus,
                    const std::vector<cd>& grid) {
  double worst = 0.0;
  for (const cd& z : grid) {
    Eigen::MatrixXcd P = plus.eval(z);
    Eigen::MatrixXcd M = S.eval(z);
    worst = std::max(worst, (P * P.adjoint() - M).norm() / (1.0 + M.norm()));
  }
  return worst;
}

double coefficientResidual(const MatrixLaurentPoly& A, const MatrixLaurentPoly& B) {
  MatrixLaurentPoly diff = A - B;
  return diff.maxAbs() / (1.0 + std::max(A.maxAbs(), B.maxAbs()));
}

std::vector<cd> detRootsOf(const MatrixLaurentPoly& plus) {
  RationalFn det = plus.toRational().det();
  if (det.isZero() || det.num().deg() < 1) return {};
  return roots(det.num());
}

double rootViolation(const std::vector<cd>& rs, Domain d) {
  double worst = -1.0;
  for (const cd& r : rs) {
    double v = (d == Domain::disc) ? 1.0 - std::abs(r) : std::imag(r);
    worst = std::max(worst, v);
  }
  return worst;
}

double paraunitaryResidual(const std::vector<SweepStep>& transcript, Domain d) {
  std::mt19937_64 rng(0x5eedULL);
  auto unif = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
  double worst = 0.0;
  for (const SweepStep& step : transcript) {
    RationalFn u = step.blaschke.fn();
    RationalFn ua = u.adjoint(d);
    int taken = 0;
    while (taken < 64) {
      cd z(4.0 * (unif() - 0.5), 4.0 * (unif() - 0.5));
      if (std::abs(u.den()(z)) < 0.05 || std::abs(ua.den()(z)) < 0.05 ||
          std::abs(z) < 0.05)
        continue;
      ++taken;
      worst = std::max(worst, std::abs(u.evalUnsafe(z) * ua.evalUnsafe(z) - cd(1.0)));
    }
  }
  return worst;
}

}  // namespace

VerificationReport verifyFactorization(const MatrixLaurentPoly& S, const SpectralFactor& F,
                                       Domain d, const ToleranceProfile& profile) {
  VerificationReport rep;
  if (S.dim() != F.plus.dim() || F.plus.empty()) {
    rep.failures.push_back("dimension mismatch or empty factor");
    rep.reconResidual = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (F.plus.lo() < 0) rep.failures.push_back("factor has negative powers");
  if (d == Domain::line) {
    int N = S.hi() / 2;
    if (F.plus.hi() != N) rep.failures.push_back("line factor degree differs from N");
  } else if (F.plus.hi() > S.hi()) {
    rep.failures.push_back("disc factor degree exceeds N");
  }

  // Symbolic coefficient convolution plus an independent boundary-grid check.
  MatrixLaurentPoly prod = F.plus * F.plus.adjoint(d);
  double coeffErr = coefficientResidual(prod, S);
  double gridErr = gridResidual(S, F.plus, boundaryGrid(d, defaultGridSize(d)));
  rep.reconResidual = std::max(coeffErr, gridErr);
  if (rep.reconResidual > profile.recon)
    rep.failures.push_back("reconstruction residual above tolerance");

  rep.maxRootViolation = rootViolation(detRootsOf(F.plus), d);
  if (rep.maxRootViolation > profile.rootViolation)
    rep.failures.push_back("determinant root inside the open region");

  rep.paraunitaryResidual = paraunitaryResidual(F.certificate.transcript, d);
  if (rep.paraunitaryResidual > profile.paraunitary)
    rep.failures.push_back("sweep factor not paraunitary");

  rep.pass = rep.failures.empty();
  return rep;
}

VerificationReport compareUpToUnitary(const SpectralFactor& F1, const SpectralFactor& F2,
                                      Domain d, const ToleranceProfile& profile) {
  VerificationReport rep;
  if (F1.plus.dim() != F2.plus.dim()) {
    rep.failures.push_back("dimension mismatch");
    rep.unitaryQuotientResidual = std::numeric_limits<double>::infinity();
    return rep;
  }
  const cd anchor = anchorPoint(d);
  Eigen::MatrixXcd A1 = F1.plus.eval(anchor);
  Eigen::MatrixXcd A2 = F2.plus.eval(anchor);
  Eigen::MatrixXcd Q = A2.fullPivLu().solve(A1);

  const int m = F1.plus.dim();
  double unitaryErr = (Q * Q.adjoint() - Eigen::MatrixXcd::Identity(m, m)).norm();

  double constancyErr = 0.0;
  for (const cd& z : boundaryGrid(d, 16)) {
    Eigen::MatrixXcd Qz = F2.plus.eval(z).fullPivLu().solve(F1.plus.eval(z));
    constancyErr = std::max(constancyErr, (Qz - Q).norm() / (1.0 + Q.norm()));
  }

  double coeffErr = coefficientResidual(F1.plus, F2.plus.mulConst(Q));
  rep.unitaryQuotientResidual = std::max({unitaryErr, constancyErr, coeffErr});
  if (rep.unitaryQuotientResidual > profile.unitaryQuotient)
    rep.failures.push_back("quotient is not a constant unitary");
  rep.pass = rep.failures.empty();
  return rep;
}

VerificationReport mobiusCrossCheck(const MatrixLaurentPoly& S_line,
                                    const SpectralFactor& F_line,
                                    const ToleranceProfile& profile) {
  VerificationReport rep;
  if (S_line.dim() != F_line.plus.dim() || F_line.plus.empty()) {
    rep.failures.push_back("dimension mismatch or empty factor");
    return rep;
  }
  double worst = 0.0;
  for (int k = 0; k < 16; ++k) {
    double th = 2.0 * M_PI * (k + 0.5) / 16.0;
    cd w(std::cos(th), std::sin(th));
    cd z = (cd(0.0, 1.0) + cd(0.0, 1.0) * w) / (cd(1.0) - w);
    Eigen::MatrixXcd P = F_line.plus.eval(z);
    Eigen::MatrixXcd M = S_line.eval(z);
    worst = std::max(worst, (P * P.adjoint() - M).norm() / (1.0 + M.norm()));
  }
  rep.reconResidual = worst;
  if (worst > profile.recon)
    rep.failures.push_back("factorization fails at mapped circle points");

  rep.maxRootViolation = rootViolation(detRootsOf(F_line.plus), Domain::line);
  if (rep.maxRootViolation > profile.rootViolation)
    rep.failures.push_back("determinant root maps from inside the disc");
  rep.pass = rep.failures.empty();
  return rep;
}

VerificationReport positivityScreen(const MatrixLaurentPoly& S, Domain d) {
  if (!S.isSelfAdjoint(d))
    throw NotSelfAdjoint("positivityScreen: spectrum is not self-adjoint");
  VerificationReport rep;
  double minEig = std::numeric_limits<double>::infinity();
  double normS = 0.0;
  for (const cd& z : boundaryGrid(d, defaultGridSize(d))) {
    Eigen::MatrixXcd M = S.eval(z);
    Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    minEig = std::min(minEig, es.eigenvalues().minCoeff());
    normS = std::max(normS, M.norm());
  }
  rep.minBoundaryEigenvalue = minEig;
  rep.pass = minEig >= -tol::psd_rel * (1.0 + normS);
  if (!rep.pass) rep.failures.push_back("spectrum negative on boundary grid");
  return rep;
}

ReplayReport replaySweeps(const MatrixLaurentPoly& S, const SpectralFactor& F, Domain d,
                          int gridSize) {
  if (gridSize <= 0) gridSize = defaultGridSize(d);
  std::vector<cd> grid = boundaryGrid(d, gridSize);
  std::vector<double> sNorm;
  sNorm.reserve(grid.size());
  for (const cd& z : grid) sNorm.push_back(S.eval(z).norm());

  ReplayReport rep;
  RationalMatrix M = rationalCholesky(S, d);
  for (const SweepStep& step : F.certificate.transcript) {
    RationalMatrix next = M;
    int zBefore = -1;
    if (step.isZeroStep) {
      zBefore = inRegionZeroCount(M, d);
      next = next.mulConst(step.unitary);
      // Column 0 vanishes at a; divide the zero out exactly and append the
      // paraunitary numerator instead of multiplying by the rational factor,
      // which would pile up near-cancelling pole/zero pairs over many steps.
      cd a = step.blaschke.a;
      Poly bNum = (d == Domain::disc) ? Poly{cd(1.0), -std::conj(a)}
                                      : Poly{-std::conj(a), cd(1.0)};
      for (int i = 0; i < next.dim(); ++i) {
        const RationalFn& e = next.at(i, step.blaschke.column);
        next.at(i, step.blaschke.column) =
            RationalFn::uncancelled(e.num().deflate(a).first * bNum, e.den());
      }
    } else {
      next.scaleColumn(step.blaschke.column, step.blaschke.fn());
    }
    double drift = 0.0;
    for (size_t g = 0; g < grid.size(); ++g) {
      Eigen::MatrixXcd B = M.evalUnsafe(grid[g]);
      Eigen::MatrixXcd A = next.evalUnsafe(grid[g]);
      drift = std::max(drift,
                       (A * A.adjoint() - B * B.adjoint()).norm() / (1.0 + sNorm[g]));
    }
    rep.maxStepDrift = std::max(rep.maxStepDrift, drift);
    M = std::move(next);
    if (step.isZeroStep && inRegionZeroCount(M, d) >= zBefore)
      rep.zeroCountMonotone = false;
  }

  MatrixLaurentPoly raw = extractPolynomial(M, S, d).plus;
  MatrixLaurentPoly expected =
      (F.certificate.unitaryFix.size() > 0)
          ? F.plus.mulConst(F.certificate.unitaryFix.adjoint().eval())
          : F.plus;
  rep.factorResidual = coefficientResidual(raw, expected);
  rep.pass = rep.maxStepDrift <= 1e-9 && rep.zeroCountMonotone &&
             rep.factorResidual <= tol::recon;
  return rep;
}

}  // namespace specfact
