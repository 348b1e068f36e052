#include "specfact/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace specfact {

using nlohmann::json;

namespace {

json complexToJson(cd v) { return json::array({std::real(v), std::imag(v)}); }

cd complexFromJson(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("expected [re, im] pair");
  return cd(j[0].get<double>(), j[1].get<double>());
}

json matrixToJson(const Eigen::MatrixXcd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(complexToJson(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrixFromJson(const json& j, int m) {
  if (!j.is_array() || static_cast<int>(j.size()) != m)
    throw ParseError("coefficient matrix has wrong row count");
  Eigen::MatrixXcd M(m, m);
  for (int i = 0; i < m; ++i) {
    if (!j[static_cast<size_t>(i)].is_array() ||
        static_cast<int>(j[static_cast<size_t>(i)].size()) != m)
      throw ParseError("coefficient matrix has wrong column count");
    for (int k = 0; k < m; ++k)
      M(i, k) = complexFromJson(j[static_cast<size_t>(i)][static_cast<size_t>(k)]);
  }
  return M;
}

Domain domainFromString(const std::string& s) {
  if (s == "disc") return Domain::disc;
  if (s == "line") return Domain::line;
  throw ParseError("unknown domain: " + s);
}

json coeffsToJson(const MatrixLaurentPoly& S) {
  json coeffs = json::object();
  for (int k = S.lo(); k <= S.hi(); ++k)
    coeffs[std::to_string(k)] = matrixToJson(S.coeff(k));
  return coeffs;
}

MatrixLaurentPoly coeffsFromJson(const json& j, int m) {
  if (!j.is_object() || j.empty()) throw ParseError("coeffs must be a non-empty object");
  int lo = 0, hi = 0;
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    int k;
    try {
      k = std::stoi(it.key());
    } catch (const std::exception&) {
      throw ParseError("non-integer power key: " + it.key());
    }
    lo = first ? k : std::min(lo, k);
    hi = first ? k : std::max(hi, k);
    first = false;
  }
  std::vector<Eigen::MatrixXcd> C(static_cast<size_t>(hi - lo + 1),
                                  Eigen::MatrixXcd::Zero(m, m));
  for (auto it = j.begin(); it != j.end(); ++it) {
    int k = std::stoi(it.key());
    C[static_cast<size_t>(k - lo)] = matrixFromJson(it.value(), m);
  }
  return MatrixLaurentPoly(m, lo, std::move(C));
}

}  // namespace

json instanceToJson(const MatrixLaurentPoly& S, Domain d) {
  json j;
  j["schemaVersion"] = 1;
  j["domain"] = domainName(d);
  j["m"] = S.dim();
  j["lo"] = S.lo();
  j["coeffs"] = coeffsToJson(S);
  return j;
}

Instance instanceFromJson(const json& j) {
  if (!j.is_object()) throw ParseError("instance is not an object");
  for (const char* key : {"schemaVersion", "domain", "m", "coeffs"})
    if (!j.contains(key)) throw ParseError(std::string("missing field: ") + key);
  if (j["schemaVersion"].get<int>() != 1) throw ParseError("unsupported schemaVersion");
  Instance inst;
  inst.domain = domainFromString(j["domain"].get<std::string>());
  int m = j["m"].get<int>();
  if (m < 1) throw ParseError("m must be >= 1");
  inst.S = coeffsFromJson(j["coeffs"], m);
  if (!inst.S.isSelfAdjoint(inst.domain))
    throw NotSelfAdjoint("instance coefficients violate the self-adjoint symmetry");
  return inst;
}

json factorToJson(const SpectralFactor& F, Domain d) {
  json j = instanceToJson(F.plus, d);
  json cert;
  cert["reconResidual"] = F.certificate.reconResidual;
  json detRoots = json::array();
  for (const cd& r : F.certificate.detRoots) detRoots.push_back(complexToJson(r));
  cert["detRoots"] = detRoots;
  json transcript = json::array();
  for (const SweepStep& s : F.certificate.transcript) {
    json step;
    step["kind"] = s.isZeroStep ? "zeroClear" : "poleClear";
    step["a"] = complexToJson(s.blaschke.a);
    step["column"] = s.blaschke.column;
    step["productDrift"] = s.productDrift;
    if (s.isZeroStep) {
      step["unitary"] = matrixToJson(s.unitary);
      step["zerosBefore"] = s.zerosBefore;
      step["zerosAfter"] = s.zerosAfter;
    }
    transcript.push_back(step);
  }
  cert["sweepTranscript"] = transcript;
  if (F.certificate.unitaryFix.size() > 0)
    cert["unitaryFix"] = matrixToJson(F.certificate.unitaryFix);
  cert["degreeCertified"] = F.certificate.degreeCertified;
  cert["boundaryDegenerate"] = F.certificate.boundaryDegenerate;
  cert["minBoundaryEigenvalue"] = F.certificate.minBoundaryEigenvalue;
  j["certificate"] = cert;
  return j;
}

SpectralFactor factorFromJson(const json& j, Domain* domainOut) {
  if (!j.is_object()) throw ParseError("factor is not an object");
  for (const char* key : {"domain", "m", "coeffs"})
    if (!j.contains(key)) throw ParseError(std::string("missing field: ") + key);
  Domain d = domainFromString(j["domain"].get<std::string>());
  if (domainOut) *domainOut = d;
  int m = j["m"].get<int>();
  SpectralFactor F;
  F.plus = coeffsFromJson(j["coeffs"], m);
  if (j.contains("certificate")) {
    const json& cert = j["certificate"];
    F.certificate.reconResidual = cert.value("reconResidual", 0.0);
    F.certificate.degreeCertified = cert.value("degreeCertified", false);
    F.certificate.boundaryDegenerate = cert.value("boundaryDegenerate", false);
    F.certificate.minBoundaryEigenvalue = cert.value("minBoundaryEigenvalue", 0.0);
    if (cert.contains("detRoots"))
      for (const json& r : cert["detRoots"])
        F.certificate.detRoots.push_back(complexFromJson(r));
    if (cert.contains("unitaryFix"))
      F.certificate.unitaryFix = matrixFromJson(cert["unitaryFix"], m);
    if (cert.contains("sweepTranscript")) {
      for (const json& js : cert["sweepTranscript"]) {
        SweepStep s;
        s.isZeroStep = js.value("kind", "poleClear") == std::string("zeroClear");
        s.blaschke.a = complexFromJson(js["a"]);
        s.blaschke.d = d;
        s.blaschke.kind =
            s.isZeroStep ? BlaschkeFactor::zeroClear : BlaschkeFactor::poleClear;
        s.blaschke.column = js.value("column", 0);
        s.productDrift = js.value("productDrift", 0.0);
        if (s.isZeroStep && js.contains("unitary"))
          s.unitary = matrixFromJson(js["unitary"], m);
        s.zerosBefore = js.value("zerosBefore", -1);
        s.zerosAfter = js.value("zerosAfter", -1);
        F.certificate.transcript.push_back(s);
      }
    }
  }
  return F;
}

json reportToJson(const VerificationReport& r) {
  json j;
  j["reconResidual"] = r.reconResidual;
  j["maxRootViolation"] = r.maxRootViolation;
  j["paraunitaryResidual"] = r.paraunitaryResidual;
  j["unitaryQuotientResidual"] = r.unitaryQuotientResidual;
  j["minBoundaryEigenvalue"] = r.minBoundaryEigenvalue;
  j["pass"] = r.pass;
  j["failures"] = r.failures;
  return j;
}

namespace {

void dumpValue(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dumpValue(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dumpValue(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string canonicalDump(const json& j) {
  std::string out;
  dumpValue(j, out);
  out += '\n';
  return out;
}

json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

void writeJsonFile(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw SpecfactError("cannot write file: " + path);
  out << canonicalDump(j);
}

}  // namespace specfact
