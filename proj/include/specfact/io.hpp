#pragma once

#include <string>

#include <json.hpp>

#include "specfact/pipeline.hpp"
#include "specfact/verify.hpp"

namespace specfact {

struct Instance {
  Domain domain = Domain::disc;
  MatrixLaurentPoly S;
};

nlohmann::json instanceToJson(const MatrixLaurentPoly& S, Domain d);
Instance instanceFromJson(const nlohmann::json& j);

nlohmann::json factorToJson(const SpectralFactor& F, Domain d);
SpectralFactor factorFromJson(const nlohmann::json& j, Domain* domainOut = nullptr);

nlohmann::json reportToJson(const VerificationReport& r);

/// Canonical text form: sorted keys, floats with 17 significant digits.
std::string canonicalDump(const nlohmann::json& j);

nlohmann::json readJsonFile(const std::string& path);  // throws ParseError
void writeJsonFile(const std::string& path, const nlohmann::json& j);

}  // namespace specfact
