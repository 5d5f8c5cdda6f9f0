#pragma once

#include <utility>

#include "uasd/densities.hpp"
#include "uasd/diagonalize.hpp"
#include "uasd/types.hpp"

namespace uasd {

/// Per-realization achievable rates in bits per channel use.
struct RateBreakdown {
  VectorXd r1Shared;   ///< min-rate shared rates of user 1, size M
  VectorXd r1AtUser2;  ///< user-1 shared rates decodable at user 2, size M
  VectorXd r1Private;  ///< size Mbar1
  VectorXd r2Shared;   ///< size M
  VectorXd r2Private;  ///< size Mbar2
  double r1 = 0.0;
  double r2 = 0.0;
};

RateBreakdown instantaneousRates(const UasdDecomposition& dec,
                                 const PowerAllocation& alloc,
                                 const SystemConfig& cfg);

/// Ergodic rates under EPA with per-symbol power p split as p1 + p2 = p on
/// the shared streams (quadrature against the finite-size densities).
std::pair<double, double> ergodicRatesEpa(const SystemConfig& cfg, double p,
                                          double p1, double p2);

/// Ergodic rates under UPA (ordered-eigenvalue densities per shared stream).
std::pair<double, double> ergodicRatesUpa(const SystemConfig& cfg,
                                          const PowerAllocation& alloc);

/// Upper bound on the rate gain user 1 could get from flexible SIC:
/// M * K_U * Pr{lambda < Pi^-1}.
double sicGainBound(const SystemConfig& cfg, double p1, double p2);

/// Pr{lambda < 1/pi} for the matrix-F marginal eigenvalue.
double probInferiorSic(const FParams& fp, double pi);

/// Shared, memoized density lookups (construction is expensive, evaluation
/// cheap); thread-safe one-time initialization per parameter set.
const Density& cachedFMarginal(int m1, int m2, int q);
const Density& cachedFOrdered(int l, int m1, int m2, int q);
const Density& cachedWishartMarginal(int p, int q);

}  // namespace uasd
