#pragma once

#include <cstdint>

#include "specfact/pipeline.hpp"

namespace specfact {

struct GenerateOptions {
  int m = 1;
  int degree = 1;
  std::uint64_t seed = 0;
  Domain domain = Domain::disc;
  bool boundaryZero = false;
};

struct GeneratedInstance {
  MatrixLaurentPoly S;
  SpectralFactor reference;  // canonical planted factor
};

/// Deterministic plant-and-recover instance: samples a random polynomial
/// matrix, pushes its determinant zeros to the admissible region,
/// canonicalizes, and emits S together with the canonical planted factor.
GeneratedInstance generateInstance(const GenerateOptions& opts);

}  // namespace specfact
