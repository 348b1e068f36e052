#pragma once

#include <random>
#include <vector>

#include "specfact/poly.hpp"
#include "specfact/rational.hpp"

namespace testutil {

using specfact::cd;

inline double unif(std::mt19937_64& rng) { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; }

inline cd randomComplex(std::mt19937_64& rng) { return cd(unif(rng), unif(rng)); }

inline specfact::Poly randomPoly(std::mt19937_64& rng, int deg) {
  std::vector<cd> c(static_cast<size_t>(deg) + 1);
  for (cd& x : c) x = randomComplex(rng);
  // keep the leading coefficient well away from zero
  c.back() += cd(c.back().real() >= 0 ? 0.5 : -0.5, 0.0);
  return specfact::Poly(std::move(c));
}

inline specfact::LaurentPoly randomLaurent(std::mt19937_64& rng, int lo, int hi) {
  std::vector<cd> c(static_cast<size_t>(hi - lo) + 1);
  for (cd& x : c) x = randomComplex(rng);
  c.front() += cd(0.5, 0.0);
  c.back() += cd(0.5, 0.0);
  return specfact::LaurentPoly(lo, std::move(c));
}

inline specfact::RationalFn randomRational(std::mt19937_64& rng, int numDeg, int denDeg) {
  return specfact::RationalFn(randomPoly(rng, numDeg), randomPoly(rng, denDeg));
}

inline double maxCoeffDiff(const specfact::Poly& a, const specfact::Poly& b) {
  return (a - b).maxAbs();
}

}  // namespace testutil
