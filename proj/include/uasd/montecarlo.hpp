#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uasd/types.hpp"

namespace uasd {

struct MeanWithError {
  double mean = 0.0;
  double stderror = 0.0;
};

/// Empirical ergodic rates and transmit power of UA-SD under a fixed
/// allocation; per-trial seeding makes results order-independent.
struct EmpiricalReport {
  MeanWithError r1;
  MeanWithError r2;
  MeanWithError transmitPower;
  int trials = 0;
};

EmpiricalReport mcUasdRates(const SystemConfig& cfg,
                            const PowerAllocation& alloc, int trials,
                            std::uint64_t seed);

/// Monte-Carlo E[tr(Z diag(p) Z^H)] for the UA-SD precoder.
MeanWithError mcTransmitPowerUasd(const SystemConfig& cfg,
                                  const PowerAllocation& alloc, int trials,
                                  std::uint64_t seed);

/// Pooled squared GSVs (shared-stream eigenvalues) of seeded decompositions.
std::vector<double> mcSharedEigenvalues(const SystemConfig& cfg, int trials,
                                        std::uint64_t seed);

/// Monte-Carlo average transmit power of GSVD precoding at symbol power p.
MeanWithError mcTransmitPowerGsvd(const SystemConfig& cfg, double p,
                                  int trials, std::uint64_t seed);

/// Ergodic single-user MIMO rate of one user at budget Pmax
/// (eigenmode waterfilling by default, equal power otherwise).
double suMimoErgodicRate(const SystemConfig& cfg, int user, int trials,
                         std::uint64_t seed, bool waterfilling = true);

/// Shared/private effective gains of sampled GSVD decompositions, cached so
/// a power sweep reuses one set of draws.
struct GsvdGainSamples {
  std::vector<VectorXd> c1sq;  ///< per draw: squared cosines, size M
  std::vector<VectorXd> s1sq;  ///< per draw: squared sines, size M
  DerivedDims dims;
};

GsvdGainSamples sampleGsvdGains(const SystemConfig& cfg, int trials,
                                std::uint64_t seed);

/// Ergodic GSVD-NOMA rates under EPA with per-stream SIC side selection.
std::pair<double, double> gsvdRatesFromGains(const SystemConfig& cfg,
                                             const GsvdGainSamples& gains,
                                             double p1, double p2);

/// One named invariant check of the verification suite.
struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool allPassed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Runs the module invariant suites on one configuration: decomposition
/// residuals, GSV oracle agreement, power-formula Monte Carlo, density
/// normalization, and rate cross-validation at reduced trial counts.
VerifyReport runVerification(const SystemConfig& cfg, std::uint64_t seed,
                             int trials);

}  // namespace uasd
