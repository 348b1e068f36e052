#pragma once

#include <vector>

#include "specfact/poly.hpp"
#include "specfact/rational.hpp"
#include "specfact/types.hpp"

namespace specfact {

/// Result of a scalar spectral factorization. `factor` already includes the
/// gain; `gain` records the positive normalization separately.
struct ScalarFactorResult {
  Poly factor;
  double gain = 0.0;
  std::vector<cd> boundaryRootFlags;  // one entry per halved boundary root
};

/// Scalar spectral factorization of a Laurent polynomial nonnegative on the
/// boundary. Disc: factor(z) * conj-reversed factor reproduces s, all factor
/// roots outside or on the unit circle, value at 0 positive real. Line: s is
/// an ordinary polynomial nonnegative on the real axis; the factor is monic
/// up to a positive gain with roots in the closed lower half plane.
ScalarFactorResult fejerRiesz(const LaurentPoly& s, Domain d);

/// Scalar spectral factor of a self-adjoint nonnegative rational function:
/// numerator and denominator are factored independently after rewriting as a
/// self-adjoint pair.
RationalFn rationalSqrt(const RationalFn& a, Domain d);

int defaultGridSize(Domain d);

}  // namespace specfact
