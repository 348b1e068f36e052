#include <doctest.h>

#include <cmath>
#include <random>

#include "specfact/generate.hpp"
#include "specfact/pipeline.hpp"
#include "specfact/verify.hpp"
#include "test_util.hpp"

using namespace specfact;

namespace {

Eigen::MatrixXcd m1(cd a) {
  Eigen::MatrixXcd M(1, 1);
  M(0, 0) = a;
  return M;
}

MatrixLaurentPoly scalar(int lo, std::vector<cd> c) {
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(c.size());
  for (cd x : c) C.push_back(m1(x));
  return MatrixLaurentPoly(1, lo, std::move(C));
}

SpectralFactor wrap(MatrixLaurentPoly P) {
  SpectralFactor F;
  F.plus = std::move(P);
  return F;
}

}  // namespace

TEST_CASE("verifyFactorization worked examples") {
  MatrixLaurentPoly S = scalar(-1, {cd(1.0), cd(2.0), cd(1.0)});

  // the correct factor 1 + z passes
  VerificationReport ok = verifyFactorization(S, wrap(scalar(0, {cd(1.0), cd(1.0)})),
                                              Domain::disc);
  CHECK(ok.pass);
  CHECK(ok.reconResidual < 1e-12);
  CHECK(ok.failures.empty());

  // 1 + z^-1 reconstructs but is malformed (negative power)
  VerificationReport neg = verifyFactorization(S, wrap(scalar(-1, {cd(1.0), cd(1.0)})),
                                               Domain::disc);
  CHECK(!neg.pass);
  CHECK(!neg.failures.empty());

  // 1 + 2z reconstructs 5 + 2z + 2z^-1 but has its root at -1/2 inside
  VerificationReport wrong = verifyFactorization(
      scalar(-1, {cd(2.0), cd(5.0), cd(2.0)}), wrap(scalar(0, {cd(1.0), cd(2.0)})),
      Domain::disc);
  CHECK(!wrong.pass);
  CHECK(wrong.reconResidual < 1e-12);
  CHECK(wrong.maxRootViolation > 0.4);  // 1 - |−1/2|
}

TEST_CASE("verifyFactorization never trusts the certificate") {
  GenerateOptions opt;
  opt.m = 2;
  opt.degree = 2;
  opt.seed = 31;
  GeneratedInstance inst = generateInstance(opt);
  SpectralFactor F = factorize(inst.S, Domain::disc);
  REQUIRE(verifyFactorization(inst.S, F, Domain::disc).pass);

  // poison every certificate field; the verdict must not change
  F.certificate.reconResidual = 1e9;
  F.certificate.detRoots.assign(4, cd(0.0));
  F.certificate.degreeCertified = false;
  CHECK(verifyFactorization(inst.S, F, Domain::disc).pass);
}

TEST_CASE("verifyFactorization detects single-coefficient mutations") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    GenerateOptions opt;
    opt.m = 1 + trial % 3;
    opt.degree = 1 + trial % 3;
    opt.seed = 500 + trial;
    opt.domain = trial % 2 ? Domain::line : Domain::disc;
    GeneratedInstance inst = generateInstance(opt);
    SpectralFactor F = factorize(inst.S, opt.domain);
    REQUIRE(verifyFactorization(inst.S, F, opt.domain).pass);

    std::vector<Eigen::MatrixXcd> C = F.plus.storage();
    int k = static_cast<int>(rng() % C.size());
    int i = static_cast<int>(rng() % opt.m), j = static_cast<int>(rng() % opt.m);
    C[k](i, j) += cd(1e-3);
    SpectralFactor bad = F;
    bad.plus = MatrixLaurentPoly(opt.m, F.plus.lo(), std::move(C));
    CHECK(!verifyFactorization(inst.S, bad, opt.domain).pass);
  }
}

TEST_CASE("compareUpToUnitary") {
  GenerateOptions opt;
  opt.m = 2;
  opt.degree = 2;
  opt.seed = 61;
  GeneratedInstance inst = generateInstance(opt);
  SpectralFactor F = factorize(inst.S, Domain::disc);

  VerificationReport same = compareUpToUnitary(F, F, Domain::disc);
  CHECK(same.pass);
  CHECK(same.unitaryQuotientResidual < 1e-12);

  // F times a random constant unitary still matches
  std::mt19937_64 rng(62);
  Eigen::MatrixXcd M(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) M(i, j) = testutil::randomComplex(rng);
  Eigen::MatrixXcd V = Eigen::HouseholderQR<Eigen::MatrixXcd>(M).householderQ();
  SpectralFactor FV = F;
  FV.plus = F.plus.mulConst(V);
  CHECK(compareUpToUnitary(FV, F, Domain::disc).pass);

  // (1+z) vs (2+z): the quotient is not constant
  VerificationReport bad = compareUpToUnitary(wrap(scalar(0, {cd(1.0), cd(1.0)})),
                                              wrap(scalar(0, {cd(2.0), cd(1.0)})),
                                              Domain::disc);
  CHECK(!bad.pass);
}

TEST_CASE("mobiusCrossCheck") {
  // z^2 + 1 with factor z + i passes
  CHECK(mobiusCrossCheck(scalar(0, {cd(1.0), cd(0.0), cd(1.0)}),
                         wrap(scalar(0, {cd(0.0, 1.0), cd(1.0)})))
            .pass);
  // constants
  CHECK(mobiusCrossCheck(scalar(0, {cd(1.0)}), wrap(scalar(0, {cd(1.0)}))).pass);
  // z - i has its root in the upper half plane
  CHECK(!mobiusCrossCheck(scalar(0, {cd(1.0), cd(0.0), cd(1.0)}),
                          wrap(scalar(0, {cd(0.0, -1.0), cd(1.0)})))
             .pass);

  // holds on generated line instances
  for (int trial = 0; trial < 4; ++trial) {
    GenerateOptions opt;
    opt.m = 1 + trial % 3;
    opt.degree = 1 + trial;
    opt.seed = 910 + trial;
    opt.domain = Domain::line;
    GeneratedInstance inst = generateInstance(opt);
    SpectralFactor F = factorize(inst.S, Domain::line);
    CHECK(mobiusCrossCheck(inst.S, F).pass);
  }
}

TEST_CASE("positivityScreen") {
  VerificationReport id = positivityScreen(MatrixLaurentPoly::identity(2), Domain::disc);
  CHECK(id.pass);
  CHECK(id.minBoundaryEigenvalue == doctest::Approx(1.0));

  // 2 + z + z^-1 touches zero at z = -1 but is a.e. positive
  VerificationReport touch =
      positivityScreen(scalar(-1, {cd(1.0), cd(2.0), cd(1.0)}), Domain::disc);
  CHECK(touch.pass);
  CHECK(touch.minBoundaryEigenvalue >= -1e-12);
  CHECK(touch.minBoundaryEigenvalue < 1e-3);

  CHECK(!positivityScreen(scalar(0, {cd(-1.0)}), Domain::disc).pass);

  CHECK_THROWS_AS(positivityScreen(scalar(0, {cd(1.0), cd(1.0)}), Domain::disc),
                  NotSelfAdjoint);
}

TEST_CASE("replaySweeps") {
  for (int trial = 0; trial < 6; ++trial) {
    GenerateOptions opt;
    opt.m = 1 + trial % 3;
    opt.degree = 1 + trial % 4;
    opt.seed = 1200 + trial;
    opt.domain = trial % 2 ? Domain::line : Domain::disc;
    GeneratedInstance inst = generateInstance(opt);
    SpectralFactor F = factorize(inst.S, opt.domain);
    ReplayReport r = replaySweeps(inst.S, F, opt.domain);
    CHECK(r.pass);
    CHECK(r.maxStepDrift < 1e-9);
    CHECK(r.zeroCountMonotone);
  }
}

TEST_CASE("boundary-degenerate profile") {
  GenerateOptions opt;
  opt.m = 2;
  opt.degree = 1;
  opt.seed = 1500;
  opt.boundaryZero = true;
  GeneratedInstance inst = generateInstance(opt);
  SpectralFactor F = factorize(inst.S, Domain::disc);
  CHECK(F.certificate.boundaryDegenerate);
  VerificationReport r =
      verifyFactorization(inst.S, F, Domain::disc, ToleranceProfile::boundaryDegenerate());
  CHECK(r.pass);
  CHECK(r.reconResidual < 1e-5);
}
