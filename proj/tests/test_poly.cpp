#include <doctest.h>

#include <algorithm>
#include <random>

#include "specfact/poly.hpp"
#include "specfact/rational.hpp"
#include "test_util.hpp"

using namespace specfact;
using testutil::randomLaurent;
using testutil::randomPoly;
using testutil::randomRational;

TEST_CASE("eval basics") {
  Poly p{cd(1.0), cd(1.0)};  // 1 + z
  CHECK(std::abs(p(cd(0.0)) - cd(1.0)) < 1e-15);

  LaurentPoly l(-1, {cd(1.0), cd(2.0), cd(1.0)});  // z^-1 + 2 + z
  CHECK(std::abs(l(cd(1.0)) - cd(4.0)) < 1e-15);

  RationalFn f(Poly{cd(2.0), cd(1.0)}, Poly{cd(1.0), cd(2.0)});
  CHECK(std::abs(f(cd(-2.0))) < 1e-15);

  RationalFn g(Poly{cd(1.0)}, Poly{cd(0.0), cd(1.0)});  // 1/z
  CHECK_THROWS_AS(g(cd(0.0)), PoleAtEvaluationPoint);
}

TEST_CASE("adjoint examples") {
  // disc: 1 + 2z -> 1 + 2/z
  RationalFn f(Poly{cd(1.0), cd(2.0)}, Poly::one());
  RationalFn fa = f.adjoint(Domain::disc);
  // expect (2 + z) / z
  CHECK((fa.num() - Poly{cd(2.0), cd(1.0)}).maxAbs() < 1e-15);
  CHECK((fa.den() - Poly{cd(0.0), cd(1.0)}).maxAbs() < 1e-15);

  // line: z + i -> z - i
  RationalFn g(Poly{cd(0.0, 1.0), cd(1.0)}, Poly::one());
  RationalFn ga = g.adjoint(Domain::line);
  CHECK((ga.num() - Poly{cd(0.0, -1.0), cd(1.0)}).maxAbs() < 1e-15);

  // disc Blaschke: (z-a)/(1-conj(a)z) maps to its reciprocal, a = 0.5
  cd a(0.5);
  RationalFn u(Poly{-a, cd(1.0)}, Poly{cd(1.0), -std::conj(a)});
  RationalFn ua = u.adjoint(Domain::disc);
  RationalFn prod = u * ua;
  CHECK(prod.isConstant());
  CHECK(std::abs(prod(cd(0.3, 0.2)) - cd(1.0)) < 1e-12);
}

TEST_CASE("adjoint is an involution") {
  std::mt19937_64 rng(42);
  for (Domain d : {Domain::disc, Domain::line}) {
    for (int trial = 0; trial < 30; ++trial) {
      RationalFn f = randomRational(rng, 1 + int(rng() % 8), 1 + int(rng() % 4));
      RationalFn back = f.adjoint(d).adjoint(d);
      CHECK((back.num() - f.num()).maxAbs() < 1e-10 * (1.0 + f.num().maxAbs()));
      CHECK((back.den() - f.den()).maxAbs() < 1e-10 * (1.0 + f.den().maxAbs()));
    }
  }
}

TEST_CASE("adjoint agrees with conjugation on the boundary") {
  std::mt19937_64 rng(7);
  for (Domain d : {Domain::disc, Domain::line}) {
    RationalFn f = randomRational(rng, 5, 3);
    RationalFn fa = f.adjoint(d);
    auto grid = boundaryGrid(d, 100);
    for (const cd& z : grid) {
      cd v = f.evalUnsafe(z);
      cd w = fa.evalUnsafe(z);
      CHECK(std::abs(w - std::conj(v)) <= 1e-10 * (1.0 + std::abs(v)));
    }
  }
}

TEST_CASE("roots examples") {
  auto r1 = roots(Poly{cd(-1.0), cd(0.0), cd(1.0)});  // z^2 - 1
  std::sort(r1.begin(), r1.end(), [](cd a, cd b) { return a.real() < b.real(); });
  CHECK(std::abs(r1[0] - cd(-1.0)) < 1e-12);
  CHECK(std::abs(r1[1] - cd(1.0)) < 1e-12);

  auto r2 = roots(Poly{cd(2.0), cd(5.0), cd(2.0)});  // 2z^2 + 5z + 2
  std::sort(r2.begin(), r2.end(), [](cd a, cd b) { return a.real() < b.real(); });
  CHECK(std::abs(r2[0] - cd(-2.0)) < 1e-12);
  CHECK(std::abs(r2[1] - cd(-0.5)) < 1e-12);

  auto r3 = roots(Poly{cd(0.0), cd(0.0), cd(0.0), cd(1.0)});  // z^3
  REQUIRE(r3.size() == 3);
  for (const cd& r : r3) CHECK(std::abs(r) < 1e-12);

  CHECK_THROWS_AS(roots(Poly{cd(3.0)}), DegenerateLeadingCoefficient);
}

TEST_CASE("roots round trip") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    int deg = 3 + int(rng() % 10);  // up to 12
    Poly p = randomPoly(rng, deg);
    auto rs = roots(p);
    // skip badly clustered draws, the guarantee is for separated roots
    bool separated = true;
    for (size_t i = 0; i < rs.size(); ++i)
      for (size_t j = i + 1; j < rs.size(); ++j)
        if (std::abs(rs[i] - rs[j]) < 1e-3) separated = false;
    if (!separated) continue;
    Poly rebuilt = Poly{p.leading()};
    for (const cd& r : rs) rebuilt = rebuilt * Poly{-r, cd(1.0)};
    CHECK((rebuilt - p).maxAbs() <= 1e-8 * p.maxAbs());
  }
}

TEST_CASE("rational cancellation soundness") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Poly common = randomPoly(rng, 2);
    Poly n = randomPoly(rng, 3);
    Poly d = randomPoly(rng, 2);
    RationalFn f(n * common, d * common);
    if (f.num().deg() < 1 || f.den().deg() < 1) continue;
    auto nr = roots(f.num());
    auto dr = roots(f.den());
    for (const cd& a : nr)
      for (const cd& b : dr) CHECK(std::abs(a - b) >= tol::cancel);
    // the function value is unchanged
    cd z(0.37, 0.21);
    CHECK(std::abs(f.evalUnsafe(z) - n(z) * common(z) / (d(z) * common(z))) <
          1e-8 * (1.0 + std::abs(n(z) / d(z))));
  }
}

TEST_CASE("matrix arithmetic") {
  // [[1,0],[z,1]] * [[1,z^-1],[0,1]] = [[1,z^-1],[z,2]]
  RationalMatrix A(2), B(2);
  A.at(0, 0) = RationalFn(cd(1.0));
  A.at(1, 0) = RationalFn(Poly{cd(0.0), cd(1.0)});
  A.at(1, 1) = RationalFn(cd(1.0));
  B.at(0, 0) = RationalFn(cd(1.0));
  B.at(0, 1) = RationalFn(Poly::one(), Poly{cd(0.0), cd(1.0)});
  B.at(1, 1) = RationalFn(cd(1.0));
  RationalMatrix C = A * B;
  CHECK(std::abs(C.at(1, 1)(cd(0.5)) - cd(2.0)) < 1e-12);
  CHECK(std::abs(C.at(0, 1)(cd(0.5)) - cd(2.0)) < 1e-12);
  CHECK(std::abs(C.at(1, 0)(cd(0.5)) - cd(0.5)) < 1e-12);

  // identity multiplication
  RationalMatrix I2 = RationalMatrix::identity(2);
  RationalMatrix D = I2 * C;
  cd z(0.3, -0.4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(std::abs(D.at(i, j).evalUnsafe(z) - C.at(i, j).evalUnsafe(z)) < 1e-12);

  // triangular inverse: A * A^{-1} = I
  RationalMatrix Ainv(2);
  Ainv.at(0, 0) = RationalFn(cd(1.0));
  Ainv.at(1, 0) = RationalFn(Poly{cd(0.0), cd(-1.0)});
  Ainv.at(1, 1) = RationalFn(cd(1.0));
  RationalMatrix P = A * Ainv;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cd want = (i == j) ? cd(1.0) : cd(0.0);
      CHECK(std::abs(P.at(i, j).evalUnsafe(z) - want) < 1e-12);
    }

  // det examples
  CHECK(std::abs(RationalMatrix::identity(3).det()(z) - cd(1.0)) < 1e-12);
  CHECK(std::abs(C.det()(cd(0.7, 0.1)) - cd(1.0)) < 1e-10);
  RationalMatrix diag(2);
  Poly u{cd(3.0), cd(1.0)};
  diag.at(0, 0) = RationalFn(u);
  diag.at(1, 1) = RationalFn(cd(1.0));
  CHECK((diag.det().num() - u).maxAbs() < 1e-12);

  CHECK_THROWS_AS(A * RationalMatrix::identity(3), DimensionMismatch);
}

TEST_CASE("product degree additivity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Poly a = randomPoly(rng, 1 + int(rng() % 6));
    Poly b = randomPoly(rng, 1 + int(rng() % 6));
    CHECK((a * b).deg() == a.deg() + b.deg());
  }
}
