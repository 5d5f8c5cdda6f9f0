#include "uasd/region.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "uasd/io.hpp"
#include "uasd/montecarlo.hpp"
#include "uasd/power_allocation.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/system_model.hpp"

namespace uasd {

namespace {

double cross(const std::pair<double, double>& o,
             const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

void markHull(RateRegion& region) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(region.points.size());
  for (const auto& p : region.points) pts.emplace_back(p.r1, p.r2);
  region.hull = upperRightHull(std::move(pts));
  for (auto& p : region.points) {
    p.onHull = false;
    for (const auto& v : region.hull) {
      double tol = 1e-9 * std::max({1.0, std::abs(v.first), std::abs(v.second)});
      if (std::abs(p.r1 - v.first) < tol && std::abs(p.r2 - v.second) < tol) {
        p.onHull = true;
        break;
      }
    }
  }
}

}  // namespace

std::vector<std::pair<double, double>> upperRightHull(
    std::vector<std::pair<double, double>> pts) {
  std::vector<std::pair<double, double>> all;
  all.emplace_back(0.0, 0.0);
  for (const auto& p : pts) {
    all.push_back(p);
    all.emplace_back(p.first, 0.0);
    all.emplace_back(0.0, p.second);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());

  // Andrew's upper hull, left to right
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : all) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), p) >= -1e-15)
      hull.pop_back();
    hull.push_back(p);
  }
  // keep the frontier single-valued in r1 (drops the final descent to the
  // axis; the first point at each x already carries the largest r2)
  std::vector<std::pair<double, double>> frontier;
  for (const auto& v : hull)
    if (frontier.empty() || v.first > frontier.back().first)
      frontier.push_back(v);
  return frontier;
}

double hullValueAt(const RateRegion& region, double r1) {
  const auto& h = region.hull;
  if (h.empty()) return 0.0;
  if (r1 <= h.front().first) return h.front().second;
  if (r1 >= h.back().first) {
    return r1 > h.back().first ? 0.0 : h.back().second;
  }
  for (size_t i = 1; i < h.size(); ++i) {
    if (r1 <= h[i].first) {
      double t = (r1 - h[i - 1].first) / (h[i].first - h[i - 1].first);
      return h[i - 1].second + t * (h[i].second - h[i - 1].second);
    }
  }
  return h.back().second;
}

RateRegion epaRegion(const SystemConfig& cfg, int npoints) {
  cfg.validate();
  if (npoints < 2) throw DomainError("need at least two sweep points");
  RateRegion region;
  region.scheme = "uasd-epa";
  const double p = epaSymbolPower(cfg);
  for (int i = 0; i < npoints; ++i) {
    double t = static_cast<double>(i) / (npoints - 1);
    auto [r1, r2] = ergodicRatesEpa(cfg, p, t * p, (1.0 - t) * p);
    region.points.push_back({r1, r2, false});
  }
  markHull(region);
  return region;
}

RateRegion upaRegion(const SystemConfig& cfg,
                     const std::vector<double>& etaGrid) {
  cfg.validate();
  RateRegion region;
  region.scheme = "uasd-upa";
  for (double eta : etaGrid) {
    CcpResult res = ccpAllocate(cfg, eta);
    auto [r1, r2] = ergodicRatesUpa(cfg, res.alloc);
    region.points.push_back({r1, r2, false});
  }
  markHull(region);
  return region;
}

RateRegion upaRegion(const SystemConfig& cfg, int netas) {
  if (netas < 2) throw DomainError("need at least two weights");
  std::vector<double> grid(netas);
  for (int i = 0; i < netas; ++i)
    grid[i] = static_cast<double>(i) / (netas - 1);
  return upaRegion(cfg, grid);
}

RateRegion omaTdmaRegion(const SystemConfig& cfg, int trials,
                         std::uint64_t seed, bool waterfilling, int npoints) {
  cfg.validate();
  RateRegion region;
  region.scheme = "oma-tdma";
  double c1 = suMimoErgodicRate(cfg, 1, trials, seed, waterfilling);
  double c2 = suMimoErgodicRate(cfg, 2, trials, seed, waterfilling);
  for (int i = 0; i < npoints; ++i) {
    double t = static_cast<double>(i) / (npoints - 1);
    region.points.push_back({t * c1, (1.0 - t) * c2, false});
  }
  markHull(region);
  return region;
}

RateRegion gsvdRegion(const SystemConfig& cfg, int npoints, int trials,
                      std::uint64_t seed) {
  cfg.validate();
  RateRegion region;
  region.scheme = "gsvd-noma";
  if (cfg.m1 + cfg.m2 == cfg.n) {
    region.points.push_back({0.0, 0.0, true});
    region.hull = {{0.0, 0.0}};
    return region;
  }
  DerivedDims d = deriveDims(cfg);
  const double p =
      cfg.pmax * std::abs(static_cast<double>(cfg.m1 + cfg.m2 - cfg.n)) / d.l;
  GsvdGainSamples gains = sampleGsvdGains(cfg, trials, seed);
  for (int i = 0; i < npoints; ++i) {
    double t = static_cast<double>(i) / (npoints - 1);
    auto [r1, r2] = gsvdRatesFromGains(cfg, gains, t * p, (1.0 - t) * p);
    region.points.push_back({r1, r2, false});
  }
  markHull(region);
  return region;
}

RateRegion hybridRegion(const RateRegion& a, const RateRegion& b) {
  RateRegion region;
  region.scheme = "hybrid(" + a.scheme + "+" + b.scheme + ")";
  region.points = a.points;
  region.points.insert(region.points.end(), b.points.begin(), b.points.end());
  markHull(region);
  return region;
}

std::string writeRegionArtifacts(const std::string& outDir,
                                 const std::vector<RateRegion>& regions,
                                 const SystemConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(outDir);
  nlohmann::json manifest;
  manifest["config_hash"] = configHash(cfg);
  manifest["config"] = {{"N", cfg.n},         {"M1", cfg.m1},
                        {"M2", cfg.m2},       {"Pi1", cfg.pi1},
                        {"Pi2", cfg.pi2},     {"sigma2_watt", cfg.sigma2},
                        {"pmax_watt", cfg.pmax}};
  manifest["regions"] = nlohmann::json::array();
  for (const RateRegion& region : regions) {
    std::string fname = region.scheme;
    for (char& c : fname)
      if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    fname += ".csv";
    fs::path path = fs::path(outDir) / fname;
    std::ofstream out(path);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(region.points.size());
    for (const auto& pt : region.points)
      rows.push_back({region.scheme, formatDouble(pt.r1), formatDouble(pt.r2),
                      pt.onHull ? "1" : "0"});
    writeCsv(out, {"scheme", "R1", "R2", "on_hull"}, rows);
    manifest["regions"].push_back(
        {{"scheme", region.scheme}, {"file", fname},
         {"points", region.points.size()}, {"hull_vertices", region.hull.size()}});
  }
  fs::path mpath = fs::path(outDir) / "manifest.json";
  std::ofstream m(mpath);
  m << manifest.dump(2) << '\n';
  return mpath.string();
}

}  // namespace uasd
