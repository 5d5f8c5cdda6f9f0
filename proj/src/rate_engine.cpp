#include "uasd/rate_engine.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "uasd/quadrature.hpp"

namespace uasd {

namespace {

double log2p1(double x) { return std::log2(1.0 + x); }

std::mutex gCacheMutex;

}  // namespace

const Density& cachedFMarginal(int m1, int m2, int q) {
  static std::map<std::tuple<int, int, int>, Density> cache;
  std::lock_guard<std::mutex> lock(gCacheMutex);
  auto key = std::make_tuple(m1, m2, q);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, fMarginalPdf(m1, m2, q)).first;
  return it->second;
}

const Density& cachedFOrdered(int l, int m1, int m2, int q) {
  static std::map<std::tuple<int, int, int, int>, Density> cache;
  std::lock_guard<std::mutex> lock(gCacheMutex);
  auto key = std::make_tuple(l, m1, m2, q);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, fOrderedPdf(l, m1, m2, q)).first;
  return it->second;
}

const Density& cachedWishartMarginal(int p, int q) {
  static std::map<std::tuple<int, int>, Density> cache;
  std::lock_guard<std::mutex> lock(gCacheMutex);
  auto key = std::make_tuple(p, q);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, wishartMarginalPdf(p, q)).first;
  return it->second;
}

RateBreakdown instantaneousRates(const UasdDecomposition& dec,
                                 const PowerAllocation& alloc,
                                 const SystemConfig& cfg) {
  cfg.validate();
  const DerivedDims& d = dec.dims;
  {
    DerivedDims want = deriveDims(cfg);
    if (want.l != d.l || want.m != d.m || want.mbar1 != d.mbar1 ||
        want.mbar2 != d.mbar2)
      throw DimensionError("decomposition does not match the configuration");
  }
  VectorXd q1, q2;
  alloc.perStream(d, q1, q2);

  RateBreakdown rb;
  rb.r1Shared = VectorXd::Zero(d.m);
  rb.r1AtUser2 = VectorXd::Zero(d.m);
  rb.r2Shared = VectorXd::Zero(d.m);
  rb.r1Private = VectorXd::Zero(d.mbar1);
  rb.r2Private = VectorXd::Zero(d.mbar2);

  const double s2 = cfg.sigma2;
  for (int l = 0; l < d.m; ++l) {
    double g1 = dec.sigma1(l) * dec.sigma1(l) / cfg.pi1;
    double g2 = dec.sigma2(l) * dec.sigma2(l) / cfg.pi2;
    double rAt1 = log2p1(q1(l) * g1 / (s2 + q2(l) * g1));
    double rAt2 = log2p1(q1(l) * g2 / (s2 + q2(l) * g2));
    rb.r1AtUser2(l) = rAt2;
    rb.r1Shared(l) = std::min(rAt1, rAt2);
    rb.r2Shared(l) = log2p1(q2(l) * g2 / s2);
  }
  for (int i = 0; i < d.mbar1; ++i)
    rb.r1Private(i) =
        log2p1(q1(d.m + i) * dec.d1(i) * dec.d1(i) / (cfg.pi1 * s2));
  for (int i = 0; i < d.mbar2; ++i)
    rb.r2Private(i) = log2p1(q2(d.m + d.mbar1 + i) * dec.d2(i) * dec.d2(i) /
                             (cfg.pi2 * s2));
  rb.r1 = rb.r1Shared.sum() + rb.r1Private.sum();
  rb.r2 = rb.r2Shared.sum() + rb.r2Private.sum();
  return rb;
}

std::pair<double, double> ergodicRatesEpa(const SystemConfig& cfg, double p,
                                          double p1, double p2) {
  cfg.validate();
  if (p1 < 0 || p2 < 0 || std::abs(p1 + p2 - p) > 1e-9 * std::max(1.0, p))
    throw DomainError("EPA needs P1, P2 >= 0 with P1 + P2 = P");
  if (p == 0.0) return {0.0, 0.0};
  DerivedDims d = deriveDims(cfg);
  const double s2 = cfg.sigma2;

  if (cfg.m1 + cfg.m2 <= cfg.n) {
    const Density& w1 = cachedWishartMarginal(cfg.m1, d.mbar1);
    const Density& w2 = cachedWishartMarginal(cfg.m2, d.mbar2);
    double r1 = d.mbar1 * w1.expect([&](double lam) {
      return log2p1(p * lam / (cfg.pi1 * s2));
    });
    double r2 = d.mbar2 * w2.expect([&](double lam) {
      return log2p1(p * lam / (cfg.pi2 * s2));
    });
    return {r1, r2};
  }

  FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
  const Density& f = cachedFMarginal(fp.mu1, fp.mu2, fp.nu);
  const double piRatio = cfg.pathLossRatio();
  const double split = 1.0 / piRatio;

  double r1 = d.m * f.expect(
                  [&](double lam) {
                    double gain = lam / (1.0 + lam) / cfg.pi2;
                    return log2p1(p1 * gain / (s2 + p2 * gain));
                  },
                  0.0, split);
  r1 += d.m * f.expect(
            [&](double lam) {
              double gain = 1.0 / (1.0 + lam) / cfg.pi1;
              return log2p1(p1 * gain / (s2 + p2 * gain));
            },
            split, f.supportHi());
  r1 += d.mbar1 * log2p1(p / (cfg.pi1 * s2));

  double r2 = d.m * f.expect([&](double lam) {
    return log2p1(p2 * lam / ((1.0 + lam) * cfg.pi2 * s2));
  });
  if (d.mbar2 > 0) {
    const Density& w2 = cachedWishartMarginal(cfg.m2, d.mbar2);
    r2 += d.mbar2 * w2.expect([&](double lam) {
      return log2p1(p * lam / (cfg.pi2 * s2));
    });
  }
  return {r1, r2};
}

std::pair<double, double> ergodicRatesUpa(const SystemConfig& cfg,
                                          const PowerAllocation& alloc) {
  cfg.validate();
  if (alloc.mode != PowerMode::Upa)
    throw DomainError("ergodicRatesUpa needs a UPA allocation");
  DerivedDims d = deriveDims(cfg);
  const double s2 = cfg.sigma2;

  if (cfg.m1 + cfg.m2 <= cfg.n) {
    const Density& w1 = cachedWishartMarginal(cfg.m1, d.mbar1);
    const Density& w2 = cachedWishartMarginal(cfg.m2, d.mbar2);
    double r1 = d.mbar1 * w1.expect([&](double lam) {
      return log2p1(alloc.p1 * lam / (cfg.pi1 * s2));
    });
    double r2 = d.mbar2 * w2.expect([&](double lam) {
      return log2p1(alloc.p2 * lam / (cfg.pi2 * s2));
    });
    return {r1, r2};
  }

  if (static_cast<int>(alloc.p1l.size()) != d.m)
    throw DimensionError("UPA shared powers must have length M");
  FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
  const double split = 1.0 / cfg.pathLossRatio();

  double r1 = 0.0, r2 = 0.0;
  for (int l = 0; l < d.m; ++l) {
    const Density& pl = cachedFOrdered(l + 1, fp.mu1, fp.mu2, fp.nu);
    const double a1 = alloc.p1l[l], a2 = alloc.p2l[l];
    if (a1 > 0.0) {
      r1 += pl.expect(
          [&](double lam) {
            double gain = lam / (1.0 + lam) / cfg.pi2;
            return log2p1(a1 * gain / (s2 + a2 * gain));
          },
          0.0, split);
      r1 += pl.expect(
          [&](double lam) {
            double gain = 1.0 / (1.0 + lam) / cfg.pi1;
            return log2p1(a1 * gain / (s2 + a2 * gain));
          },
          split, pl.supportHi());
    }
    if (a2 > 0.0)
      r2 += pl.expect([&](double lam) {
        return log2p1(a2 * lam / ((1.0 + lam) * cfg.pi2 * s2));
      });
  }
  r1 += d.mbar1 * log2p1(alloc.p1 / (cfg.pi1 * s2));
  if (d.mbar2 > 0 && alloc.p2 > 0.0) {
    const Density& w2 = cachedWishartMarginal(cfg.m2, d.mbar2);
    r2 += d.mbar2 * w2.expect([&](double lam) {
      return log2p1(alloc.p2 * lam / (cfg.pi2 * s2));
    });
  }
  return {r1, r2};
}

double sicGainBound(const SystemConfig& cfg, double p1, double p2) {
  cfg.validate();
  if (cfg.m1 + cfg.m2 <= cfg.n)
    throw DimensionError("SIC gain bound applies only when M1+M2 > N");
  DerivedDims d = deriveDims(cfg);
  FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
  const Density& f = cachedFMarginal(fp.mu1, fp.mu2, fp.nu);
  const double split = 1.0 / cfg.pathLossRatio();
  auto ru = [&](double lam) {
    double gain = 1.0 / (1.0 + lam) / cfg.pi1;
    return log2p1(p1 * gain / (cfg.sigma2 + p2 * gain));
  };
  double lamStar = goldenSectionMax(ru, 0.0, split, 1e-9 * split);
  double ku = std::max({ru(lamStar), ru(0.0), ru(split)});
  return d.m * ku * f.probBelow(split);
}

double probInferiorSic(const FParams& fp, double pi) {
  if (!(pi > 0.0)) throw DomainError("path-loss ratio must be positive");
  const Density& f = cachedFMarginal(fp.mu1, fp.mu2, fp.nu);
  return f.probBelow(1.0 / pi);
}

}  // namespace uasd
