#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "uasd/types.hpp"

namespace uasd {

struct RegionPoint {
  double r1 = 0.0;
  double r2 = 0.0;
  bool onHull = false;
};

/// Achievable rate pairs of one scheme plus the upper-right convex frontier
/// (time sharing with the axis projections included).
struct RateRegion {
  std::string scheme;
  std::vector<RegionPoint> points;
  std::vector<std::pair<double, double>> hull;  ///< sorted by r1, concave
};

/// Upper-right frontier of the convex hull of pts together with the origin
/// and both axis projections of every point.
std::vector<std::pair<double, double>> upperRightHull(
    std::vector<std::pair<double, double>> pts);

/// Frontier height at r1 (linear interpolation; zero beyond the last vertex).
double hullValueAt(const RateRegion& region, double r1);

/// UA-SD with EPA: sweep the shared-power split at budget-exhausting P.
RateRegion epaRegion(const SystemConfig& cfg, int npoints = 41);

/// UA-SD with UPA: one CCP solve per weight in etaGrid.
RateRegion upaRegion(const SystemConfig& cfg,
                     const std::vector<double>& etaGrid);
RateRegion upaRegion(const SystemConfig& cfg, int netas = 21);

/// TDMA MIMO-OMA: time sharing of the single-user ergodic rates.
RateRegion omaTdmaRegion(const SystemConfig& cfg, int trials = 10000,
                         std::uint64_t seed = 1, bool waterfilling = true,
                         int npoints = 41);

/// GSVD-based MIMO-NOMA under EPA (Monte-Carlo gains); degenerates to the
/// origin when M1+M2 == N.
RateRegion gsvdRegion(const SystemConfig& cfg, int npoints = 41,
                      int trials = 10000, std::uint64_t seed = 1);

/// Time sharing between two schemes: hull of the union of their points.
RateRegion hybridRegion(const RateRegion& a, const RateRegion& b);

/// CSV (scheme, R1, R2, on_hull) per region plus a JSON manifest with the
/// configuration hash; returns the manifest path.
std::string writeRegionArtifacts(const std::string& outDir,
                                 const std::vector<RateRegion>& regions,
                                 const SystemConfig& cfg);

}  // namespace uasd
