#pragma once

#include <string>
#include <vector>

#include "specfact/pipeline.hpp"

namespace specfact {

struct ToleranceProfile {
  double recon = 1e-8;
  double rootViolation = 1e-7;
  double paraunitary = 1e-10;
  double unitaryQuotient = 1e-7;

  static ToleranceProfile standard() { return {}; }
  static ToleranceProfile boundaryDegenerate() { return {1e-5, 1e-5, 1e-5, 1e-5}; }
};

struct VerificationReport {
  double reconResidual = 0.0;
  double maxRootViolation = 0.0;  // signed distance past the boundary, > 0 is bad
  double paraunitaryResidual = 0.0;
  double unitaryQuotientResidual = 0.0;
  double minBoundaryEigenvalue = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Recomputes everything from S and the factor coefficients; certificate
/// fields of F are never trusted.
VerificationReport verifyFactorization(const MatrixLaurentPoly& S, const SpectralFactor& F,
                                       Domain d,
                                       const ToleranceProfile& profile = {});

/// Checks F1 = F2 * Q for a constant unitary Q taken at the canonical anchor.
VerificationReport compareUpToUnitary(const SpectralFactor& F1, const SpectralFactor& F2,
                                      Domain d, const ToleranceProfile& profile = {});

/// Consistency bridge between the two domains: checks a line factorization at
/// points mapped from the unit circle by z = (i + i*w) / (1 - w).
VerificationReport mobiusCrossCheck(const MatrixLaurentPoly& S_line,
                                    const SpectralFactor& F_line,
                                    const ToleranceProfile& profile = {});

/// Minimum Hermitian eigenvalue of S over the boundary grid.
VerificationReport positivityScreen(const MatrixLaurentPoly& S, Domain d);

struct ReplayReport {
  double maxStepDrift = 0.0;
  bool zeroCountMonotone = true;
  double factorResidual = 0.0;  // transcript replay vs plus * unitaryFix^{-1}
  bool pass = false;
};

/// Re-runs the recorded sweep transcript from a fresh rational Cholesky
/// factor, measuring per-step boundary product drift and in-region zero
/// counts independently of the certificate values.
ReplayReport replaySweeps(const MatrixLaurentPoly& S, const SpectralFactor& F, Domain d,
                          int gridSize = 0);

}  // namespace specfact
