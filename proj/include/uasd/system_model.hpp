#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "uasd/types.hpp"

namespace uasd {

DerivedDims deriveDims(const SystemConfig& cfg);
DerivedDims deriveDims(int m1, int m2, int n);

/// Draws H1, H2 with i.i.d. CN(0,1) entries; deterministic per (seed, trial).
/// Samples below the rank guard (smallest singular value < 1e-12 * largest)
/// are resampled.
ChannelPair sampleChannel(const SystemConfig& cfg, std::uint64_t seed,
                          std::uint64_t trial = 0);

/// Average transmit power of GSVD precoding with per-symbol power P.
/// Throws InfinitePowerError when M1+M2 == N.
double transmitPowerGsvd(double p, const SystemConfig& cfg);

/// Average transmit power of UA-SD precoding under EPA.
double transmitPowerEpa(double p, const SystemConfig& cfg);

/// Average transmit power of UA-SD precoding under UPA; linear in all powers.
double transmitPowerUpa(const PowerAllocation& alloc, const SystemConfig& cfg);

/// Per-symbol EPA power that exhausts the budget, P_T(P) = Pmax.
double epaSymbolPower(const SystemConfig& cfg);

/// Scenario file: one `key = value` per line, '#' comments.
/// Keys: N, M1, M2, d1_m, d2_m, sigma2_dbm, pmax_dbm, seed, trials.
struct Scenario {
  SystemConfig config;
  std::uint64_t seed = 1;
  int trials = 10000;
};

Scenario parseScenario(std::istream& in);
Scenario loadScenario(const std::string& path);

double dbmToWatt(double dbm);
double wattToDbm(double watt);

/// FNV-1a hash of the canonical scenario serialization; identifies outputs.
std::uint64_t configHash(const SystemConfig& cfg);

}  // namespace uasd
