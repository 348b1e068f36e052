#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "specfact/rational.hpp"
#include "specfact/scalar_factor.hpp"
#include "specfact/types.hpp"

namespace specfact {

/// One elementary paraunitary multiplier applied to a single column.
struct BlaschkeFactor {
  cd a;
  Domain d = Domain::disc;
  enum Kind { poleClear, zeroClear } kind = poleClear;
  int column = 0;

  /// The scalar rational function u(z) of this factor.
  RationalFn fn() const;
};

/// One recorded sweep application: a pole-clearing column multiply, or a
/// zero-clearing step (constant unitary followed by a column multiply).
struct SweepStep {
  BlaschkeFactor blaschke;
  bool isZeroStep = false;
  Eigen::MatrixXcd unitary;  // identity-sized only for zero steps
  double productDrift = 0.0;
  int zerosBefore = -1;
  int zerosAfter = -1;
};

struct FactorizationCertificate {
  double reconResidual = 0.0;
  std::vector<cd> detRoots;
  std::vector<SweepStep> transcript;
  Eigen::MatrixXcd unitaryFix;
  bool degreeCertified = false;
  bool boundaryDegenerate = false;
  double minBoundaryEigenvalue = 0.0;
};

struct SpectralFactor {
  MatrixLaurentPoly plus;
  FactorizationCertificate certificate;
};

struct PipelineOptions {
  bool reversePoleOrder = false;  // sweep columns last-to-first
  bool altKernelBasis = false;    // SVD basis instead of Householder completion
  bool canonical = true;
  bool trackStepInvariants = true;
  int grid = 0;                   // 0: domain default (512 disc / 257 line)
  double accept = tol::accept;
};

/// Grid context used to measure per-step product drift.
struct StepTracking {
  std::vector<cd> grid;
  std::vector<double> spectrumNorm;  // Frobenius norm of S at each grid point
};

cd anchorPoint(Domain d);

RationalMatrix rationalCholesky(const MatrixLaurentPoly& S, Domain d);

std::pair<RationalMatrix, std::vector<SweepStep>> sweepPoles(
    RationalMatrix S0, Domain d, bool reverseOrder = false,
    const StepTracking* track = nullptr);

std::pair<RationalMatrix, std::vector<SweepStep>> sweepDetZeros(
    RationalMatrix S0p, Domain d, bool altKernelBasis = false, int iterCap = 0,
    const StepTracking* track = nullptr);

/// Unitary whose first column spans a null vector of the singular matrix A.
Eigen::MatrixXcd kernelUnitary(const Eigen::MatrixXcd& A, bool altBasis = false);

SpectralFactor extractPolynomial(const RationalMatrix& Sp, const MatrixLaurentPoly& S,
                                 Domain d);

SpectralFactor canonicalize(SpectralFactor F, Domain d);

/// Full pipeline: rationalCholesky -> sweepPoles -> sweepDetZeros ->
/// extractPolynomial -> canonicalize, with a populated certificate.
SpectralFactor factorize(const MatrixLaurentPoly& S, Domain d,
                         const PipelineOptions& opts = {});

/// In-region determinant zero count (with multiplicity) of a rational matrix.
int inRegionZeroCount(const RationalMatrix& A, Domain d);

bool strictlyInRegion(cd a, Domain d);
bool onBoundary(cd a, Domain d, double band = tol::boundary);

}  // namespace specfact
