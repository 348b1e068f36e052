#include "specfact/scalar_factor.hpp"

#include <algorithm>
#include <cmath>

namespace specfact {

int defaultGridSize(Domain d) { return d == Domain::disc ? 512 : 257; }

namespace {

Poly polyFromRoots(const std::vector<cd>& rs) {
  Poly q = Poly::one();
  for (const cd& r : rs) q = q * Poly{-r, cd(1.0)};
  return q;
}

// Global greedy nearest-pair assignment of equal-sized point sets: closest
// unmatched pair first. A self-adjoint spectrum forces a full matching, but
// split multiple roots can sit far from their mirror images, so no distance
// threshold -- a genuinely wrong pairing surfaces in the gain and residual
// checks downstream. Returns pool index per target; throws if a pair is
// implausibly far apart.
std::vector<int> matchNearest(const std::vector<cd>& targets, const std::vector<cd>& pool) {
  const size_t n = targets.size();
  std::vector<int> match(n, -1);
  std::vector<bool> used(n, false);
  for (size_t round = 0; round < n; ++round) {
    double best = 1e300;
    size_t bi = 0, bk = 0;
    for (size_t i = 0; i < n; ++i) {
      if (match[i] >= 0) continue;
      for (size_t k = 0; k < n; ++k) {
        if (used[k]) continue;
        double dist = std::abs(pool[k] - targets[i]);
        if (dist < best) {
          best = dist;
          bi = i;
          bk = k;
        }
      }
    }
    if (best > 0.05 * (1.0 + std::abs(targets[bi])))
      throw UnpairedRoot("root pair separated beyond plausibility");
    match[bi] = static_cast<int>(bk);
    used[bk] = true;
  }
  return match;
}

void checkNonnegativeOnGrid(const LaurentPoly& s, Domain d) {
  const double slack = tol::psd_rel * (1.0 + s.maxAbs());
  for (const cd& z : boundaryGrid(d, defaultGridSize(d))) {
    cd v = s(z);
    if (std::real(v) < -slack)
      throw NegativeOnBoundary("scalar spectrum negative on boundary grid");
  }
}

// Greedy clustering of boundary roots; each cluster must have even size.
// Returns one representative per halved pair.
std::vector<cd> halveBoundaryClusters(std::vector<cd> pts, bool projectToCircle) {
  std::vector<cd> halves;
  std::vector<bool> used(pts.size(), false);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (used[i]) continue;
    std::vector<size_t> cluster{i};
    used[i] = true;
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(pts[j] - pts[i]) <= tol::pair * (1.0 + std::abs(pts[i]))) {
        cluster.push_back(j);
        used[j] = true;
      }
    }
    if (cluster.size() % 2 != 0)
      throw UnpairedRoot("boundary root with odd multiplicity");
    cd center(0.0);
    for (size_t j : cluster) center += pts[j];
    center /= double(cluster.size());
    if (projectToCircle && std::abs(center) > 0.0) center /= std::abs(center);
    if (!projectToCircle) center = cd(std::real(center), 0.0);
    halves.insert(halves.end(), cluster.size() / 2, center);
  }
  return halves;
}

ScalarFactorResult discFejerRiesz(const LaurentPoly& s) {
  const int N = std::max(s.hi(), -s.lo());
  if (N == 0) {
    double c = std::real(s.coeff(0));
    ScalarFactorResult r;
    r.gain = std::sqrt(std::max(c, 0.0));
    r.factor = Poly{cd(r.gain)};
    return r;
  }

  std::vector<cd> pc(static_cast<size_t>(2 * N + 1));
  for (int k = -N; k <= N; ++k) pc[static_cast<size_t>(k + N)] = s.coeff(k);
  std::vector<cd> rs = roots(Poly(std::move(pc)));

  std::vector<cd> inside, outside, boundary;
  for (const cd& r : rs) {
    double dist = std::abs(r) - 1.0;
    if (std::abs(dist) <= tol::boundary)
      boundary.push_back(r);
    else if (dist > 0.0)
      outside.push_back(r);
    else
      inside.push_back(r);
  }

  // Each outside root pairs with its reflection 1/conj(r) inside; the factor
  // keeps the averaged outside representative.
  if (outside.size() != inside.size())
    throw UnpairedRoot("no reflected partner for root outside the circle");
  std::vector<cd> targets;
  targets.reserve(outside.size());
  for (const cd& r : outside) targets.push_back(cd(1.0) / std::conj(r));
  std::vector<int> match = matchNearest(targets, inside);
  std::vector<cd> factorRoots;
  for (size_t i = 0; i < outside.size(); ++i)
    factorRoots.push_back(
        0.5 * (outside[i] + cd(1.0) / std::conj(inside[static_cast<size_t>(match[i])])));

  ScalarFactorResult res;
  std::vector<cd> halves = halveBoundaryClusters(boundary, /*projectToCircle=*/true);
  res.boundaryRootFlags = halves;
  factorRoots.insert(factorRoots.end(), halves.begin(), halves.end());

  Poly q = polyFromRoots(factorRoots);
  cd g2 = s.coeff(N) / std::conj(q.coeff(0));
  if (std::real(g2) <= 0.0)
    throw UnpairedRoot("inconsistent gain from root assignment");
  res.gain = std::sqrt(std::real(g2));
  Poly f = q * cd(res.gain);
  cd f0 = f.coeff(0);
  if (std::abs(f0) > 0.0) f = f * (std::conj(f0) / std::abs(f0));
  res.factor = f;
  return res;
}

ScalarFactorResult lineFejerRiesz(const LaurentPoly& s) {
  if (s.lo() < 0)
    throw NotSelfAdjoint("line spectrum must be an ordinary polynomial");
  if (s.hi() == 0 && s.lo() == 0) {
    double c = std::real(s.coeff(0));
    ScalarFactorResult r;
    r.gain = std::sqrt(std::max(c, 0.0));
    r.factor = Poly{cd(r.gain)};
    return r;
  }
  // A zero at the origin is a boundary (real-axis) root.
  std::vector<cd> factorRoots;
  ScalarFactorResult res;
  if (s.lo() > 0) {
    if (s.lo() % 2 != 0) throw UnpairedRoot("odd-order root at the origin");
    factorRoots.insert(factorRoots.end(), static_cast<size_t>(s.lo() / 2), cd(0.0));
    res.boundaryRootFlags.insert(res.boundaryRootFlags.end(),
                                 static_cast<size_t>(s.lo() / 2), cd(0.0));
  }
  std::vector<cd> rs = roots(s.numeratorPoly());

  std::vector<cd> lower, upper, real;
  for (const cd& r : rs) {
    if (std::abs(std::imag(r)) <= tol::boundary * (1.0 + std::abs(r)))
      real.push_back(r);
    else if (std::imag(r) < 0.0)
      lower.push_back(r);
    else
      upper.push_back(r);
  }

  if (upper.size() != lower.size())
    throw UnpairedRoot("no conjugate partner for upper half-plane root");
  std::vector<cd> targets;
  targets.reserve(upper.size());
  for (const cd& r : upper) targets.push_back(std::conj(r));
  std::vector<int> match = matchNearest(targets, lower);
  for (size_t i = 0; i < upper.size(); ++i)
    factorRoots.push_back(0.5 * (targets[i] + lower[static_cast<size_t>(match[i])]));

  std::vector<cd> halves = halveBoundaryClusters(real, /*projectToCircle=*/false);
  res.boundaryRootFlags.insert(res.boundaryRootFlags.end(), halves.begin(), halves.end());
  factorRoots.insert(factorRoots.end(), halves.begin(), halves.end());

  cd lead = s.coeff(s.hi());
  if (std::real(lead) <= 0.0)
    throw NegativeOnBoundary("nonpositive leading coefficient");
  res.gain = std::sqrt(std::real(lead));
  res.factor = polyFromRoots(factorRoots) * cd(res.gain);
  return res;
}

}  // namespace

namespace {

// Drop end coefficients below rel * maxAbs. Cancellation noise at the extremes
// (coefficients that should vanish exactly) otherwise turns into spurious root
// pairs near zero and infinity that derail the reflection pairing.
LaurentPoly trimEnds(const LaurentPoly& s, double rel) {
  if (s.isZero()) return s;
  double thr = rel * s.maxAbs();
  int lo = s.lo(), hi = s.hi();
  while (lo < hi && std::abs(s.coeff(lo)) <= thr) ++lo;
  while (hi > lo && std::abs(s.coeff(hi)) <= thr) --hi;
  std::vector<cd> c(static_cast<size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) c[static_cast<size_t>(k - lo)] = s.coeff(k);
  return LaurentPoly(lo, std::move(c));
}

}  // namespace

ScalarFactorResult fejerRiesz(const LaurentPoly& sIn, Domain d) {
  if (sIn.isZero()) throw SpecfactError("fejerRiesz: zero input");
  LaurentPoly s = trimEnds(sIn, 1e-9);
  if (!s.isSelfAdjoint(d, 1e-5))
    throw NotSelfAdjoint("fejerRiesz: input is not self-adjoint");
  // Rational arithmetic upstream leaves a small symmetry defect; the true
  // input is self-adjoint, so project back onto the symmetric part.
  s = (s + s.adjoint(d)) * cd(0.5);
  checkNonnegativeOnGrid(s, d);
  return d == Domain::disc ? discFejerRiesz(s) : lineFejerRiesz(s);
}

namespace {

// A factor with |q| = |den| on the boundary, taken directly from den's roots
// and with every root pushed to the analytic side. On |z|=1 the identity
// |z-r| = |r|*|z-1/conj(r)| makes the disc flip exact; on the real line
// |x-r| = |x-conj(r)| does the same. Reflection pairs get an averaged common
// representative (double the accuracy of either root alone); unpaired roots
// are flipped solo. Near-origin clusters that multiply out to z^k + noise are
// cancellation artifacts of the rational arithmetic and are dropped (on the
// circle a factor z^k has modulus one). Factoring den*adjoint(den) instead
// would double every multiplicity and lose half the digits.
Poly denominatorFactor(const Poly& den, Domain d) {
  if (den.deg() < 1) return den;
  std::vector<cd> rs = roots(den);
  std::vector<cd> factorRoots;
  double gain = 1.0;
  if (d == Domain::disc) {
    std::vector<cd> inside, outside, tiny;
    for (const cd& r : rs) {
      double a = std::abs(r);
      if (a <= 1e-6) {
        tiny.push_back(r);
      } else if (std::abs(a - 1.0) <= tol::boundary) {
        factorRoots.push_back(r / a);
      } else if (a > 1.0) {
        outside.push_back(r);
      } else {
        inside.push_back(r);
      }
    }
    if (!tiny.empty()) {
      Poly tp = Poly::one();
      for (const cd& r : tiny) tp = tp * Poly{-r, cd(1.0)};
      bool balanced = true;
      for (int k = 0; k < tp.deg(); ++k)
        if (std::abs(tp.coeff(k)) > 1e-8) balanced = false;
      if (!balanced)
        for (const cd& r : tiny) inside.push_back(r);
      // balanced: the cluster is z^k up to noise, unit modulus on the circle
    }
    std::vector<bool> used(outside.size(), false);
    for (const cd& r : inside) {
      cd target = cd(1.0) / std::conj(r);
      int best = -1;
      double bestDist = tol::pair * (1.0 + std::abs(target));
      for (size_t k = 0; k < outside.size(); ++k) {
        if (used[k]) continue;
        double dist = std::abs(outside[k] - target);
        if (dist <= bestDist) {
          bestDist = dist;
          best = static_cast<int>(k);
        }
      }
      cd rep = target;
      if (best >= 0) {
        used[static_cast<size_t>(best)] = true;
        rep = 0.5 * (outside[static_cast<size_t>(best)] + target);
        factorRoots.push_back(rep);
      }
      factorRoots.push_back(rep);
      gain *= std::abs(r);
    }
    for (size_t k = 0; k < outside.size(); ++k)
      if (!used[k]) factorRoots.push_back(outside[k]);
  } else {
    std::vector<cd> lower, upper;
    for (const cd& r : rs) {
      if (std::abs(std::imag(r)) <= tol::boundary * (1.0 + std::abs(r)))
        factorRoots.push_back(cd(std::real(r), 0.0));
      else if (std::imag(r) < 0.0)
        lower.push_back(r);
      else
        upper.push_back(r);
    }
    std::vector<bool> used(lower.size(), false);
    for (const cd& r : upper) {
      cd target = std::conj(r);
      int best = -1;
      double bestDist = tol::pair * (1.0 + std::abs(target));
      for (size_t k = 0; k < lower.size(); ++k) {
        if (used[k]) continue;
        double dist = std::abs(lower[k] - target);
        if (dist <= bestDist) {
          bestDist = dist;
          best = static_cast<int>(k);
        }
      }
      cd rep = target;
      if (best >= 0) {
        used[static_cast<size_t>(best)] = true;
        rep = 0.5 * (target + lower[static_cast<size_t>(best)]);
        factorRoots.push_back(rep);
      }
      factorRoots.push_back(rep);
    }
    for (size_t k = 0; k < lower.size(); ++k)
      if (!used[k]) factorRoots.push_back(lower[k]);
  }
  Poly q = Poly::one();
  for (const cd& r : factorRoots) q = q * Poly{-r, cd(1.0)};
  return q * cd(gain);
}

}  // namespace

RationalFn rationalSqrt(const RationalFn& a, Domain d) {
  if (a.isZero()) throw SpecfactError("rationalSqrt: zero input");
  // num/den rewritten as the self-adjoint pair (num * adjoint(den)) over
  // |den|^2; the denominator factor comes straight from den's roots.
  RationalFn n(a.num());
  RationalFn dd(a.den());
  LaurentPoly sNum = (n * dd.adjoint(d)).toLaurent();
  ScalarFactorResult fn = fejerRiesz(sNum, d);
  return RationalFn(fn.factor, denominatorFactor(a.den(), d));
}

}  // namespace specfact
