#include "uasd/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "uasd/densities.hpp"
#include "uasd/diagonalize.hpp"
#include "uasd/power_allocation.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/rng.hpp"
#include "uasd/system_model.hpp"

namespace uasd {

namespace {

// compensated (Kahan) accumulator so reduction order cannot leak into results
struct Accumulator {
  double sum = 0.0, c = 0.0, sumSq = 0.0, cSq = 0.0;
  int n = 0;
  void add(double v) {
    double y = v - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
    double y2 = v * v - cSq;
    double t2 = sumSq + y2;
    cSq = (t2 - sumSq) - y2;
    sumSq = t2;
    ++n;
  }
  MeanWithError stats() const {
    MeanWithError m;
    m.mean = sum / n;
    double var = std::max(0.0, sumSq / n - m.mean * m.mean);
    m.stderror = std::sqrt(var / n);
    return m;
  }
};

double trPowerOfPrecoder(const MatrixXcd& z, const VectorXd& q1,
                         const VectorXd& q2) {
  double s = 0.0;
  for (Eigen::Index l = 0; l < z.cols(); ++l)
    s += (q1(l) + q2(l)) * z.col(l).squaredNorm();
  return s;
}

}  // namespace

EmpiricalReport mcUasdRates(const SystemConfig& cfg,
                            const PowerAllocation& alloc, int trials,
                            std::uint64_t seed) {
  cfg.validate();
  DerivedDims d = deriveDims(cfg);
  VectorXd q1, q2;
  alloc.perStream(d, q1, q2);
  Accumulator a1, a2, at;
  for (int t = 0; t < trials; ++t) {
    try {
      ChannelPair ch = sampleChannel(cfg, seed, t);
      UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
      RateBreakdown rb = instantaneousRates(dec, alloc, cfg);
      a1.add(rb.r1);
      a2.add(rb.r2);
      at.add(trPowerOfPrecoder(dec.z, q1, q2));
    } catch (const std::exception& e) {
      throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
    }
  }
  EmpiricalReport rep;
  rep.r1 = a1.stats();
  rep.r2 = a2.stats();
  rep.transmitPower = at.stats();
  rep.trials = trials;
  return rep;
}

MeanWithError mcTransmitPowerUasd(const SystemConfig& cfg,
                                  const PowerAllocation& alloc, int trials,
                                  std::uint64_t seed) {
  cfg.validate();
  DerivedDims d = deriveDims(cfg);
  VectorXd q1, q2;
  alloc.perStream(d, q1, q2);
  Accumulator acc;
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, seed, t);
    UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
    acc.add(trPowerOfPrecoder(dec.z, q1, q2));
  }
  return acc.stats();
}

std::vector<double> mcSharedEigenvalues(const SystemConfig& cfg, int trials,
                                        std::uint64_t seed) {
  cfg.validate();
  DerivedDims d = deriveDims(cfg);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(trials) * d.m);
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, seed, t);
    UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
    for (int l = 0; l < d.m; ++l) {
      double mu = dec.sigma2(l) / dec.sigma1(l);
      out.push_back(mu * mu);
    }
  }
  return out;
}

MeanWithError mcTransmitPowerGsvd(const SystemConfig& cfg, double p,
                                  int trials, std::uint64_t seed) {
  cfg.validate();
  DerivedDims d = deriveDims(cfg);
  VectorXd q = VectorXd::Constant(d.l, p);
  VectorXd zero = VectorXd::Zero(d.l);
  Accumulator acc;
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, seed, t);
    GsvdDecomposition dec = gsvdDecompose<Complex>(ch.h1, ch.h2);
    acc.add(trPowerOfPrecoder(dec.z, q, zero));
  }
  return acc.stats();
}

double suMimoErgodicRate(const SystemConfig& cfg, int user, int trials,
                         std::uint64_t seed, bool waterfilling) {
  cfg.validate();
  if (user != 1 && user != 2) throw DomainError("user must be 1 or 2");
  const int mk = user == 1 ? cfg.m1 : cfg.m2;
  const double pi = user == 1 ? cfg.pi1 : cfg.pi2;
  Accumulator acc;
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, seed, t);
    const MatrixXcd& h = user == 1 ? ch.h1 : ch.h2;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h * h.adjoint());
    VectorXd g = es.eigenvalues().reverse() / (pi * cfg.sigma2);
    const int r = std::min(mk, cfg.n);
    double rate = 0.0;
    if (waterfilling) {
      // water level over the strongest k modes
      double level = 0.0;
      int active = 0;
      double invSum = 0.0;
      for (int k = 1; k <= r; ++k) {
        invSum += 1.0 / g(k - 1);
        double nu = (cfg.pmax + invSum) / k;
        if (nu > 1.0 / g(k - 1)) {
          level = nu;
          active = k;
        }
      }
      for (int i = 0; i < active; ++i) rate += std::log2(level * g(i));
    } else {
      for (int i = 0; i < r; ++i)
        rate += std::log2(1.0 + cfg.pmax / r * g(i));
    }
    acc.add(rate);
  }
  return acc.stats().mean;
}

GsvdGainSamples sampleGsvdGains(const SystemConfig& cfg, int trials,
                                std::uint64_t seed) {
  cfg.validate();
  GsvdGainSamples out;
  out.dims = deriveDims(cfg);
  out.c1sq.reserve(trials);
  out.s1sq.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, seed, t);
    GsvdDecomposition dec = gsvdDecompose<Complex>(ch.h1, ch.h2);
    out.c1sq.push_back(dec.c1.array().square());
    out.s1sq.push_back(dec.s1.array().square());
  }
  return out;
}

std::pair<double, double> gsvdRatesFromGains(const SystemConfig& cfg,
                                             const GsvdGainSamples& gains,
                                             double p1, double p2) {
  const DerivedDims& d = gains.dims;
  const double p = p1 + p2;
  const double s2 = cfg.sigma2;
  // private streams ride identity channels (the forced blocks of C and S)
  double r1 = d.mbar1 * std::log2(1.0 + p / (cfg.pi1 * s2));
  double r2 = d.mbar2 * std::log2(1.0 + p / (cfg.pi2 * s2));
  if (d.m > 0 && !gains.c1sq.empty()) {
    Accumulator a1, a2;
    for (size_t t = 0; t < gains.c1sq.size(); ++t) {
      double v1 = 0.0, v2 = 0.0;
      for (int l = 0; l < d.m; ++l) {
        double g1 = gains.c1sq[t](l) / (cfg.pi1 * s2);
        double g2 = gains.s1sq[t](l) / (cfg.pi2 * s2);
        if (g1 > g2) {
          // user 1 decodes both; user 2 is interference limited
          v1 += std::log2(1.0 + p1 * g1);
          v2 += std::log2(1.0 + p2 * g2 / (1.0 + p1 * g2));
        } else {
          v1 += std::log2(1.0 + p1 * g1 / (1.0 + p2 * g1));
          v2 += std::log2(1.0 + p2 * g2);
        }
      }
      a1.add(v1);
      a2.add(v2);
    }
    r1 += a1.stats().mean;
    r2 += a2.stats().mean;
  }
  return {r1, r2};
}

VerifyReport runVerification(const SystemConfig& cfg, std::uint64_t seed,
                             int trials) {
  cfg.validate();
  VerifyReport rep;
  DerivedDims d = deriveDims(cfg);
  auto push = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  // decomposition structure on sampled channels
  {
    double worstU = 0.0, worstG = 0.0, worstGsv = 0.0, worstRec = 0.0;
    int draws = std::min(trials, 200);
    for (int t = 0; t < draws; ++t) {
      ChannelPair ch = sampleChannel(cfg, seed, t);
      UasdDecomposition u = uasdDecompose<Complex>(ch.h1, ch.h2);
      worstU = std::max(worstU, uasdResidual(ch.h1, ch.h2, u));
      GsvdDecomposition g = gsvdDecompose<Complex>(ch.h1, ch.h2);
      worstG = std::max(worstG, gsvdResidual(ch.h1, ch.h2, g));
      // reciprocal GSV consistency between the two factorizations
      for (int l = 0; l < d.m; ++l) {
        double mu = u.sigma2(l) / u.sigma1(l);
        double muG = g.c1(d.m - 1 - l) / g.s1(d.m - 1 - l);
        worstRec = std::max(worstRec, std::abs(mu * muG - 1.0));
      }
      if (d.m > 0) {
        VectorXd lam = squaredGsvsFromPencil(ch.h1, ch.h2);
        for (int l = 0; l < d.m; ++l) {
          double mine = u.sigma2(l) * u.sigma2(l) /
                        (u.sigma1(l) * u.sigma1(l));
          worstGsv = std::max(worstGsv, std::abs(mine - lam(l)) /
                                            std::max(1.0, lam(l)));
        }
      }
    }
    push("uasd block structure and unitarity < 1e-10", worstU < 1e-10,
         "max residual " + std::to_string(worstU));
    push("gsvd structure and CS identity < 1e-10", worstG < 1e-10,
         "max residual " + std::to_string(worstG));
    push("GSVs match the generalized eigenproblem < 1e-8", worstGsv < 1e-8,
         "max relative error " + std::to_string(worstGsv));
    push("UA-SD and GSVD singular value pairing reciprocal", worstRec < 1e-8,
         "max |mu * mu' - 1| " + std::to_string(worstRec));
  }

  // transmit power formulas against Monte Carlo
  {
    double p = epaSymbolPower(cfg);
    PowerAllocation alloc =
        PowerAllocation::epa(p, 0.5 * p, 0.5 * p);
    MeanWithError mc = mcTransmitPowerUasd(cfg, alloc, trials, seed);
    double analytic = transmitPowerEpa(p, cfg);
    double err = std::abs(mc.mean - analytic);
    bool ok = err <= 3.0 * mc.stderror + 1e-12;
    push("EPA transmit power formula within 3 standard errors", ok,
         "analytic " + std::to_string(analytic) + ", mc " +
             std::to_string(mc.mean) + " +- " + std::to_string(mc.stderror));
    if (cfg.m1 + cfg.m2 != cfg.n) {
      MeanWithError mg = mcTransmitPowerGsvd(cfg, p, trials, seed);
      double ag = transmitPowerGsvd(p, cfg);
      bool okg = std::abs(mg.mean - ag) <= 3.0 * mg.stderror + 1e-12;
      push("GSVD transmit power formula within 3 standard errors", okg,
           "analytic " + std::to_string(ag) + ", mc " +
               std::to_string(mg.mean) + " +- " + std::to_string(mg.stderror));
    } else {
      bool threw = false;
      try {
        transmitPowerGsvd(p, cfg);
      } catch (const InfinitePowerError&) {
        threw = true;
      }
      push("GSVD transmit power reports InfinitePower at M1+M2 == N", threw,
           threw ? "expected condition raised" : "missing InfinitePower");
    }
  }

  // density normalization for the configured shape
  {
    double worst = 0.0;
    if (cfg.m1 + cfg.m2 > cfg.n) {
      FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
      const Density& f = cachedFMarginal(fp.mu1, fp.mu2, fp.nu);
      worst = std::max(worst,
                       std::abs(f.expect([](double) { return 1.0; }) - 1.0));
    }
    if (d.mbar2 > 0) {
      const Density& w = cachedWishartMarginal(cfg.m2, d.mbar2);
      worst = std::max(worst,
                       std::abs(w.expect([](double) { return 1.0; }) - 1.0));
    }
    if (cfg.m1 + cfg.m2 <= cfg.n) {
      const Density& w = cachedWishartMarginal(cfg.m1, d.mbar1);
      worst = std::max(worst,
                       std::abs(w.expect([](double) { return 1.0; }) - 1.0));
    }
    push("densities normalize within 1e-6", worst < 1e-6,
         "max deviation " + std::to_string(worst));
  }

  // analytic vs empirical ergodic rates
  {
    double p = epaSymbolPower(cfg);
    PowerAllocation alloc = PowerAllocation::epa(p, 0.5 * p, 0.5 * p);
    auto [r1, r2] = ergodicRatesEpa(cfg, p, 0.5 * p, 0.5 * p);
    EmpiricalReport mc = mcUasdRates(cfg, alloc, trials, seed);
    double e1 = std::abs(mc.r1.mean - r1) / std::max(1e-9, r1);
    double e2 = std::abs(mc.r2.mean - r2) / std::max(1e-9, r2);
    bool ok = std::abs(mc.r1.mean - r1) <= 4.0 * mc.r1.stderror + 1e-6 &&
              std::abs(mc.r2.mean - r2) <= 4.0 * mc.r2.stderror + 1e-6;
    push("ergodic EPA rates match Monte Carlo", ok,
         "relative errors " + std::to_string(e1) + ", " + std::to_string(e2));
  }

  // power allocation invariants
  {
    CcpResult res = ccpAllocate(cfg, 0.5);
    bool monotone = true, feasible = true;
    for (size_t i = 1; i < res.trace.size(); ++i)
      monotone = monotone &&
                 res.trace[i].objective >= res.trace[i - 1].objective - 1e-9;
    for (const auto& row : res.trace)
      feasible = feasible && row.budgetUsed <= cfg.pmax + 1e-9;
    feasible = feasible && transmitPowerUpa(res.alloc, cfg) <= cfg.pmax + 1e-9;
    push("power allocation converges with a monotone feasible trace",
         res.converged && monotone && feasible,
         std::to_string(res.iterations) + " iterations, objective " +
             std::to_string(res.objective));
  }

  return rep;
}

}  // namespace uasd
