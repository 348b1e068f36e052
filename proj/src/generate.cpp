#include "specfact/generate.hpp"

#include <cmath>
#include <random>

namespace specfact {

namespace {

// Platform-stable uniform in [-1, 1).
double uniformSigned(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

MatrixLaurentPoly samplePolynomialMatrix(int m, int degree, std::mt19937_64& rng) {
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(static_cast<size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) {
    Eigen::MatrixXcd M(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        M(i, j) = cd(uniformSigned(rng), uniformSigned(rng));
    C.push_back(M);
  }
  return MatrixLaurentPoly(m, 0, std::move(C));
}

// Multiply column 0 by (1 + z): plants a boundary zero of the determinant
// at z = -1 (real axis for the line case).
MatrixLaurentPoly plantBoundaryZero(const MatrixLaurentPoly& G) {
  const int m = G.dim();
  std::vector<Eigen::MatrixXcd> C(static_cast<size_t>(G.hi() - G.lo() + 2),
                                  Eigen::MatrixXcd::Zero(m, m));
  for (int k = G.lo(); k <= G.hi() + 1; ++k) {
    Eigen::MatrixXcd M = G.coeff(k);
    M.col(0) = G.coeff(k).col(0) + G.coeff(k - 1).col(0);
    C[static_cast<size_t>(k - G.lo())] = M;
  }
  return MatrixLaurentPoly(m, G.lo(), std::move(C));
}

bool healthy(const MatrixLaurentPoly& G, Domain d, bool boundaryZero) {
  RationalFn det = G.toRational().det();
  if (det.isZero()) return false;
  if (det.num().deg() < 1) return true;
  for (const cd& r : roots(det.num())) {
    double dist = (d == Domain::disc) ? std::abs(std::abs(r) - 1.0)
                                      : std::abs(std::imag(r));
    if (dist < 1e-3 && !(boundaryZero && std::abs(r - cd(-1.0)) < 1e-6))
      return false;  // accidental near-boundary determinant zero
  }
  return true;
}

void symmetrize(MatrixLaurentPoly& S, Domain d) {
  std::vector<Eigen::MatrixXcd> C;
  C.reserve(static_cast<size_t>(S.hi() - S.lo() + 1));
  for (int k = S.lo(); k <= S.hi(); ++k) {
    Eigen::MatrixXcd want =
        (d == Domain::disc) ? S.coeff(-k).adjoint().eval() : S.coeff(k).adjoint().eval();
    C.push_back(0.5 * (S.coeff(k) + want));
  }
  S = MatrixLaurentPoly(S.dim(), S.lo(), std::move(C));
}

}  // namespace

GeneratedInstance generateInstance(const GenerateOptions& opts) {
  if (opts.m < 1 || opts.degree < 0)
    throw SpecfactError("generateInstance: need m >= 1 and degree >= 0");
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);

  for (int attempt = 0; attempt < 64; ++attempt) {
    MatrixLaurentPoly G = samplePolynomialMatrix(opts.m, opts.degree, rng);
    if (opts.boundaryZero) G = plantBoundaryZero(G);
    if (!healthy(G, opts.domain, opts.boundaryZero)) continue;

    auto [swept, steps] = sweepDetZeros(G.toRational(), opts.domain);
    (void)steps;

    // S built from the swept factor, so the planted ground truth matches it.
    MatrixLaurentPoly plusRaw(G.dim(), 0, {});
    {
      std::vector<Eigen::MatrixXcd> C;
      int maxDeg = 0;
      for (int i = 0; i < G.dim(); ++i)
        for (int j = 0; j < G.dim(); ++j) {
          if (!swept.at(i, j).isPolynomial()) throw ResidualDenominator("generate: sweep residue");
          maxDeg = std::max(maxDeg, swept.at(i, j).num().deg());
        }
      C.assign(static_cast<size_t>(maxDeg) + 1, Eigen::MatrixXcd::Zero(G.dim(), G.dim()));
      for (int i = 0; i < G.dim(); ++i)
        for (int j = 0; j < G.dim(); ++j)
          for (int k = 0; k <= swept.at(i, j).num().deg(); ++k)
            C[static_cast<size_t>(k)](i, j) = swept.at(i, j).num().coeff(k);
      plusRaw = MatrixLaurentPoly(G.dim(), 0, std::move(C));
    }

    MatrixLaurentPoly S = plusRaw * plusRaw.adjoint(opts.domain);
    symmetrize(S, opts.domain);

    SpectralFactor reference = extractPolynomial(plusRaw.toRational(), S, opts.domain);
    reference = canonicalize(std::move(reference), opts.domain);
    reference.certificate.boundaryDegenerate = opts.boundaryZero;

    GeneratedInstance out;
    out.S = std::move(S);
    out.reference = std::move(reference);
    return out;
  }
  throw SpecfactError("generateInstance: failed to sample a healthy instance");
}

}  // namespace specfact
