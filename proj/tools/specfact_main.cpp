#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "specfact/generate.hpp"
#include "specfact/io.hpp"
#include "specfact/pipeline.hpp"
#include "specfact/verify.hpp"

namespace {

using namespace specfact;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitVerifyFailed = 2;

void emit(const nlohmann::json& j, const std::string& outPath) {
  if (outPath.empty())
    std::cout << canonicalDump(j);
  else
    writeJsonFile(outPath, j);
}

std::string refPathFor(const std::string& outPath) {
  auto dot = outPath.rfind('.');
  auto slash = outPath.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return outPath + ".ref.json";
  return outPath.substr(0, dot) + ".ref" + outPath.substr(dot);
}

int runFactorize(const std::string& input, const std::string& outPath, double tolAccept,
                 int grid, bool canonical) {
  Instance inst;
  try {
    inst = instanceFromJson(readJsonFile(input));
    VerificationReport screen = positivityScreen(inst.S, inst.domain);
    if (!screen.pass) {
      std::cerr << "specfact: input: NegativeOnBoundary: min boundary eigenvalue "
                << screen.minBoundaryEigenvalue << "\n";
      return kExitInputError;
    }
  } catch (const SpecfactError& e) {
    std::cerr << "specfact: input: " << e.what() << "\n";
    return kExitInputError;
  }

  PipelineOptions opts;
  opts.accept = tolAccept;
  opts.grid = grid;
  opts.canonical = canonical;
  SpectralFactor F;
  try {
    F = factorize(inst.S, inst.domain, opts);
  } catch (const SpecfactError& e) {
    std::cerr << "specfact: " << e.what() << "\n";
    return kExitInputError;
  }

  emit(factorToJson(F, inst.domain), outPath);

  ToleranceProfile profile = F.certificate.boundaryDegenerate
                                 ? ToleranceProfile::boundaryDegenerate()
                                 : ToleranceProfile::standard();
  profile.recon = std::max(profile.recon, tolAccept);
  VerificationReport rep = verifyFactorization(inst.S, F, inst.domain, profile);
  if (!rep.pass) {
    for (const std::string& f : rep.failures)
      std::cerr << "specfact: verification: " << f << "\n";
    return kExitVerifyFailed;
  }
  return kExitOk;
}

int runVerify(const std::string& spectrumPath, const std::string& factorPath,
              const std::string& profileName) {
  Instance inst;
  SpectralFactor F;
  try {
    inst = instanceFromJson(readJsonFile(spectrumPath));
    Domain fd;
    F = factorFromJson(readJsonFile(factorPath), &fd);
    if (fd != inst.domain) {
      std::cerr << "specfact: input: domain mismatch between spectrum and factor\n";
      return kExitInputError;
    }
    if (F.plus.dim() != inst.S.dim()) {
      std::cerr << "specfact: input: dimension mismatch between spectrum and factor\n";
      return kExitInputError;
    }
  } catch (const SpecfactError& e) {
    std::cerr << "specfact: input: " << e.what() << "\n";
    return kExitInputError;
  }

  ToleranceProfile profile = profileName == "degenerate"
                                 ? ToleranceProfile::boundaryDegenerate()
                                 : ToleranceProfile::standard();
  VerificationReport rep = verifyFactorization(inst.S, F, inst.domain, profile);
  std::cout << canonicalDump(reportToJson(rep));
  return rep.pass ? kExitOk : kExitVerifyFailed;
}

int runGenerate(int m, int degree, std::uint64_t seed, const std::string& domainStr,
                bool boundaryZero, const std::string& outPath) {
  GenerateOptions opts;
  opts.m = m;
  opts.degree = degree;
  opts.seed = seed;
  opts.domain = domainStr == "line" ? Domain::line : Domain::disc;
  opts.boundaryZero = boundaryZero;

  GeneratedInstance gen;
  try {
    gen = generateInstance(opts);
  } catch (const SpecfactError& e) {
    std::cerr << "specfact: generate: " << e.what() << "\n";
    return kExitInputError;
  }

  nlohmann::json inst = instanceToJson(gen.S, opts.domain);
  nlohmann::json ref = factorToJson(gen.reference, opts.domain);
  if (outPath.empty()) {
    nlohmann::json both;
    both["instance"] = inst;
    both["reference"] = ref;
    std::cout << canonicalDump(both);
  } else {
    writeJsonFile(outPath, inst);
    writeJsonFile(refPathFor(outPath), ref);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral factorization of matrix Laurent polynomials"};
  app.require_subcommand(1);

  std::string input, factorPath, outPath, domainStr = "disc", format = "json";
  std::string profileName = "standard";
  double tolAccept = 1e-8;
  int grid = 512;
  std::string canonicalStr = "on";
  int m = 1, degree = 1;
  std::uint64_t seed = 0;
  bool boundaryZero = false;

  CLI::App* fac = app.add_subcommand("factorize", "Factor a spectrum file");
  fac->add_option("input", input, "instance JSON file")->required();
  fac->add_option("--out", outPath, "output path (default: stdout)");
  fac->add_option("--tol", tolAccept, "acceptance residual")->capture_default_str();
  fac->add_option("--grid", grid, "boundary grid size")->capture_default_str();
  fac->add_option("--canonical", canonicalStr, "canonicalize the factor (on|off)")->capture_default_str()
      ->check(CLI::IsMember({"on", "off"}));
  fac->add_option("--format", format, "output format")->capture_default_str()->check(CLI::IsMember({"json"}));

  CLI::App* ver = app.add_subcommand("verify", "Verify a factor against a spectrum");
  ver->add_option("spectrum", input, "spectrum JSON file")->required();
  ver->add_option("factor", factorPath, "factor JSON file")->required();
  ver->add_option("--profile", profileName, "tolerance profile")->capture_default_str()
      ->check(CLI::IsMember({"standard", "degenerate"}));
  ver->add_option("--format", format, "output format")->capture_default_str()->check(CLI::IsMember({"json"}));

  CLI::App* gen = app.add_subcommand("generate", "Generate a planted instance");
  gen->add_option("--m", m, "matrix dimension")->capture_default_str();
  gen->add_option("--degree", degree, "planted factor degree")->capture_default_str();
  gen->add_option("--seed", seed, "random seed")->capture_default_str();
  gen->add_option("--domain", domainStr, "disc or line")->capture_default_str()
      ->check(CLI::IsMember({"disc", "line"}));
  gen->add_flag("--boundary-zero", boundaryZero, "plant a determinant zero on the boundary");
  gen->add_option("--out", outPath, "instance output path (reference written alongside)");
  gen->add_option("--format", format, "output format")->capture_default_str()->check(CLI::IsMember({"json"}));

  CLI11_PARSE(app, argc, argv);

  if (fac->parsed()) return runFactorize(input, outPath, tolAccept, grid, canonicalStr == "on");
  if (ver->parsed()) return runVerify(input, factorPath, profileName);
  return runGenerate(m, degree, seed, domainStr, boundaryZero, outPath);
}
