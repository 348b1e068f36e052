#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace specfact {

using cd = std::complex<double>;

// Domain selector: unit circle (disc) or real line.
enum class Domain { disc, line };

inline const char* domainName(Domain d) { return d == Domain::disc ? "disc" : "line"; }

// Tolerance constants used across the library. All thresholds that scale
// with the operand are expressed as relative factors.
namespace tol {
inline constexpr double trim_rel = 1e-12;      // degree trimming, relative to max coeff
inline constexpr double cancel = 1e-7;         // pole/zero pairing distance for cancellation
inline constexpr double boundary = 1e-7;       // root-on-boundary classification
inline constexpr double pair = 1e-6;           // root pairing in scalar factorization
inline constexpr double eval_rel = 1e-12;      // pole detection in eval
inline constexpr double psd_rel = 1e-8;        // positivity screen slack
inline constexpr double rank_rel = 1e-8;       // singularity detection in kernelUnitary
inline constexpr double herm_rel = 1e-8;       // self-adjointness check
inline constexpr double recon = 1e-8;          // factorization reconstruction residual
inline constexpr double scalar_recon = 1e-8;   // scalar factor reconstruction residual
inline constexpr double accept = 1e-8;         // default acceptance residual
}  // namespace tol

struct SpecfactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SPECFACT_DEFINE_ERROR(Name)          \
  struct Name : SpecfactError {              \
    using SpecfactError::SpecfactError;      \
  }

SPECFACT_DEFINE_ERROR(PoleAtEvaluationPoint);
SPECFACT_DEFINE_ERROR(DimensionMismatch);
SPECFACT_DEFINE_ERROR(DegenerateLeadingCoefficient);
SPECFACT_DEFINE_ERROR(NotSelfAdjoint);
SPECFACT_DEFINE_ERROR(NegativeOnBoundary);
SPECFACT_DEFINE_ERROR(UnpairedRoot);
SPECFACT_DEFINE_ERROR(SingularPrincipalMinor);
SPECFACT_DEFINE_ERROR(PoleOnBoundary);
SPECFACT_DEFINE_ERROR(ZeroOnBoundaryUnresolvable);
SPECFACT_DEFINE_ERROR(IterationLimitExceeded);
SPECFACT_DEFINE_ERROR(NotSingular);
SPECFACT_DEFINE_ERROR(ResidualDenominator);
SPECFACT_DEFINE_ERROR(DegreeOverflow);
SPECFACT_DEFINE_ERROR(AnchorSingular);
SPECFACT_DEFINE_ERROR(ParseError);

#undef SPECFACT_DEFINE_ERROR

}  // namespace specfact
