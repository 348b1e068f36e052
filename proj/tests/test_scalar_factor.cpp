#include <doctest.h>

#include <cmath>
#include <random>

#include "specfact/pipeline.hpp"
#include "specfact/scalar_factor.hpp"
#include "test_util.hpp"

using namespace specfact;
using testutil::randomPoly;

namespace {

double reconError(const ScalarFactorResult& r, const LaurentPoly& s, Domain d) {
  RationalFn f(r.factor);
  RationalFn fa = f.adjoint(d);
  double worst = 0.0;
  for (const cd& z : boundaryGrid(d, 200)) {
    cd got = f.evalUnsafe(z) * fa.evalUnsafe(z);
    cd want = s(z);
    worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
  }
  return worst;
}

}  // namespace

TEST_CASE("fejerRiesz worked examples") {
  // 2 + z + z^-1 -> 1 + z, boundary root at -1
  auto r1 = fejerRiesz(LaurentPoly(-1, {cd(1.0), cd(2.0), cd(1.0)}), Domain::disc);
  CHECK((r1.factor - Poly{cd(1.0), cd(1.0)}).maxAbs() < 1e-10);
  REQUIRE(r1.boundaryRootFlags.size() == 1);
  CHECK(std::abs(r1.boundaryRootFlags[0] - cd(-1.0)) < 1e-7);

  // 5 + 2z + 2z^-1 -> 2 + z
  auto r2 = fejerRiesz(LaurentPoly(-1, {cd(2.0), cd(5.0), cd(2.0)}), Domain::disc);
  CHECK((r2.factor - Poly{cd(2.0), cd(1.0)}).maxAbs() < 1e-10);
  CHECK(r2.boundaryRootFlags.empty());

  // z^2 + 1 -> z + i on the line
  auto r3 = fejerRiesz(LaurentPoly(0, {cd(1.0), cd(0.0), cd(1.0)}), Domain::line);
  CHECK((r3.factor - Poly{cd(0.0, 1.0), cd(1.0)}).maxAbs() < 1e-10);

  // constants
  auto r4 = fejerRiesz(LaurentPoly(0, {cd(1.0)}), Domain::disc);
  CHECK((r4.factor - Poly::one()).maxAbs() < 1e-12);
  CHECK(r4.gain == doctest::Approx(1.0));
}

TEST_CASE("fejerRiesz error paths") {
  // not self-adjoint
  CHECK_THROWS_AS(fejerRiesz(LaurentPoly(0, {cd(1.0), cd(1.0)}), Domain::disc),
                  NotSelfAdjoint);
  // negative on the boundary: -2 + z + z^-1
  CHECK_THROWS_AS(fejerRiesz(LaurentPoly(-1, {cd(1.0), cd(-2.0), cd(1.0)}), Domain::disc),
                  NegativeOnBoundary);
  CHECK_THROWS_AS(fejerRiesz(LaurentPoly(0, {cd(-1.0)}), Domain::line),
                  NegativeOnBoundary);
}

TEST_CASE("fejerRiesz reconstruction property") {
  std::mt19937_64 rng(2024);
  int done = 0;
  for (int trial = 0; done < 40 && trial < 200; ++trial) {
    Domain d = (trial % 2 == 0) ? Domain::disc : Domain::line;
    int deg = 1 + int(rng() % 6);
    Poly p = randomPoly(rng, deg);
    // keep roots separated from pairing conflicts
    auto rs = roots(p);
    bool ok = true;
    for (size_t i = 0; i < rs.size(); ++i) {
      if (specfact::onBoundary(rs[i], d, 1e-2)) ok = false;
      for (size_t j = i + 1; j < rs.size(); ++j)
        if (std::abs(rs[i] - rs[j]) < 1e-2) ok = false;
    }
    if (!ok) continue;
    ++done;
    RationalFn f(p);
    LaurentPoly s = (f * f.adjoint(d)).toLaurent();
    ScalarFactorResult r = fejerRiesz(s, d);
    CHECK(reconError(r, s, d) <= 1e-8);

    // root-side certificate
    if (r.factor.deg() >= 1) {
      for (const cd& root : roots(r.factor)) {
        if (d == Domain::disc)
          CHECK(std::abs(root) >= 1.0 - tol::boundary);
        else
          CHECK(std::imag(root) <= tol::boundary * (1.0 + std::abs(root)));
      }
    }

    // gain positivity and phase canonicalization
    CHECK(r.gain > 0.0);
    if (d == Domain::disc) {
      cd v = r.factor(cd(0.0));
      CHECK(std::abs(std::imag(v)) <= 1e-10 * (1.0 + std::abs(v)));
      CHECK(std::real(v) > 0.0);
    } else {
      cd lead = r.factor.leading();
      CHECK(std::abs(std::imag(lead)) <= 1e-10 * (1.0 + std::abs(lead)));
      CHECK(std::real(lead) > 0.0);
    }
  }
  CHECK(done >= 30);
}

TEST_CASE("rationalSqrt") {
  // constants and pure Laurent numerators
  RationalFn one(cd(1.0));
  CHECK((rationalSqrt(one, Domain::disc).num() - Poly::one()).maxAbs() < 1e-12);

  RationalFn s2 = RationalFn::fromLaurent(LaurentPoly(-1, {cd(1.0), cd(2.0), cd(1.0)}));
  RationalFn q2 = rationalSqrt(s2, Domain::disc);
  CHECK((q2.num() - Poly{cd(1.0), cd(1.0)}).maxAbs() < 1e-10);
  CHECK(q2.isPolynomial());

  // (5+2z+2z^-1)/(2+z+z^-1) -> (2+z)/(1+z)
  RationalFn num = RationalFn::fromLaurent(LaurentPoly(-1, {cd(2.0), cd(5.0), cd(2.0)}));
  RationalFn den = RationalFn::fromLaurent(LaurentPoly(-1, {cd(1.0), cd(2.0), cd(1.0)}));
  RationalFn q3 = rationalSqrt(num / den, Domain::disc);
  CHECK((q3.num() - Poly{cd(2.0), cd(1.0)}).maxAbs() < 1e-10);
  CHECK((q3.den() - Poly{cd(1.0), cd(1.0)}).maxAbs() < 1e-10);
}

TEST_CASE("rationalSqrt reconstructs random self-adjoint rationals") {
  std::mt19937_64 rng(31);
  int done = 0;
  for (int trial = 0; done < 20 && trial < 100; ++trial) {
    Domain d = (trial % 2 == 0) ? Domain::disc : Domain::line;
    Poly pn = randomPoly(rng, 2);
    Poly pd = randomPoly(rng, 1 + int(rng() % 2));
    RationalFn g(pn, pd);
    if (g.den().deg() < 1) continue;
    bool ok = true;
    for (const cd& r : roots(g.den()))
      if (specfact::onBoundary(r, d, 1e-2)) ok = false;
    if (g.num().deg() >= 1)
      for (const cd& r : roots(g.num()))
        if (specfact::onBoundary(r, d, 1e-2)) ok = false;
    if (!ok) continue;
    ++done;
    RationalFn a = g * g.adjoint(d);
    RationalFn q = rationalSqrt(a, d);
    RationalFn qa = q.adjoint(d);
    double worst = 0.0;
    for (const cd& z : boundaryGrid(d, 128)) {
      cd got = q.evalUnsafe(z) * qa.evalUnsafe(z);
      cd want = a.evalUnsafe(z);
      worst = std::max(worst, std::abs(got - want) / (1.0 + std::abs(want)));
    }
    CHECK(worst <= 1e-8);
  }
  CHECK(done >= 15);
}
