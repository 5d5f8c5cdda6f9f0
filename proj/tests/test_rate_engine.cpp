#include <doctest.h>

#include <cmath>

#include "uasd/montecarlo.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/rng.hpp"
#include "uasd/system_model.hpp"

using namespace uasd;

namespace {

SystemConfig makeConfig(int m1, int m2, int n, double pmaxDbm = 20.0) {
  SystemConfig cfg;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.n = n;
  cfg.pi1 = 1e4;
  cfg.pi2 = 1e2;
  cfg.sigma2 = dbmToWatt(-35.0);
  cfg.pmax = dbmToWatt(pmaxDbm);
  return cfg;
}

}  // namespace

TEST_CASE("parameter mapping to the matrix-F ensemble") {
  FParams a = mapWishartParams(3, 3, 3);
  CHECK((a.mu1 == 3 && a.mu2 == 3 && a.nu == 3));
  FParams b = mapWishartParams(3, 3, 5);
  CHECK((b.mu1 == 3 && b.mu2 == 3 && b.nu == 1));
  FParams c = mapWishartParams(4, 2, 3);
  CHECK((c.mu1 == 3 && c.mu2 == 3 && c.nu == 2));
  FParams d = mapWishartParams(2, 4, 3);
  CHECK((d.mu1 == 3 && d.mu2 == 3 && d.nu == 2));
  CHECK_THROWS_AS(mapWishartParams(2, 2, 4), DimensionError);
}

TEST_CASE("instantaneous rates on the identity channel") {
  // equidistant users up to the strict far/near ordering of the config
  SystemConfig cfg;
  cfg.m1 = cfg.m2 = cfg.n = 3;
  cfg.pi1 = 1.0 + 1e-9;
  cfg.pi2 = 1.0;
  cfg.sigma2 = 1.0;
  cfg.pmax = 1.0;
  MatrixXcd h = MatrixXcd::Identity(3, 3);
  UasdDecomposition dec = uasdDecompose<Complex>(h, h);
  PowerAllocation alloc =
      PowerAllocation::upa(0.0, 0.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
  RateBreakdown rb = instantaneousRates(dec, alloc, cfg);
  for (int l = 0; l < 3; ++l) {
    CHECK(rb.r1Shared(l) ==
          doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-6));
    CHECK(rb.r1AtUser2(l) ==
          doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-6));
    CHECK(rb.r2Shared(l) == doctest::Approx(std::log2(1.5)).epsilon(1e-6));
  }
  CHECK(rb.r1 == doctest::Approx(3 * std::log2(4.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("zero power means zero rate") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  ChannelPair ch = sampleChannel(cfg, 5, 0);
  UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
  PowerAllocation alloc = PowerAllocation::upa(0.0, 0.0, {0.0}, {0.0});
  RateBreakdown rb = instantaneousRates(dec, alloc, cfg);
  CHECK(rb.r1 == 0.0);
  CHECK(rb.r2 == 0.0);
  auto [r1, r2] = ergodicRatesEpa(cfg, 0.0, 0.0, 0.0);
  CHECK(r1 == 0.0);
  CHECK(r2 == 0.0);
}

TEST_CASE("interference-free shared rates when the partner power vanishes") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  ChannelPair ch = sampleChannel(cfg, 6, 0);
  UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
  PowerAllocation alloc = PowerAllocation::epa(1.0, 1.0, 0.0);
  RateBreakdown rb = instantaneousRates(dec, alloc, cfg);
  for (int l = 0; l < dec.dims.m; ++l) {
    double g1 = dec.sigma1(l) * dec.sigma1(l) / (cfg.pi1 * cfg.sigma2);
    double g2 = dec.sigma2(l) * dec.sigma2(l) / (cfg.pi2 * cfg.sigma2);
    double want = std::min(std::log2(1 + g1), std::log2(1 + g2));
    CHECK(rb.r1Shared(l) == doctest::Approx(want).epsilon(1e-12));
    CHECK(rb.r2Shared(l) == 0.0);
  }
}

TEST_CASE("min-rate rule holds on random draws") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  for (int t = 0; t < 25; ++t) {
    ChannelPair ch = sampleChannel(cfg, 7, t);
    UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
    CounterRng rng(8, t);
    std::vector<double> p1l(3), p2l(3);
    for (int l = 0; l < 3; ++l) {
      p1l[l] = rng.nextUniform();
      p2l[l] = rng.nextUniform();
    }
    PowerAllocation alloc = PowerAllocation::upa(0.0, 0.0, p1l, p2l);
    RateBreakdown rb = instantaneousRates(dec, alloc, cfg);
    for (int l = 0; l < 3; ++l) {
      CHECK(rb.r1Shared(l) <= rb.r1AtUser2(l) + 1e-12);
      // recompute the user-1-side rate and check the min against it
      double g1 = dec.sigma1(l) * dec.sigma1(l) / cfg.pi1;
      double at1 = std::log2(1 + p1l[l] * g1 / (cfg.sigma2 + p2l[l] * g1));
      CHECK(rb.r1Shared(l) <= at1 + 1e-12);
      CHECK(rb.r1Shared(l) ==
            doctest::Approx(std::min(at1, rb.r1AtUser2(l))).epsilon(1e-12));
    }
  }
}

TEST_CASE("ergodic EPA rates match Monte Carlo across shapes") {
  for (auto [m1, m2, n] :
       {std::array<int, 3>{3, 3, 5}, {2, 2, 4}, {3, 3, 3}, {1, 4, 4}}) {
    CAPTURE(m1);
    CAPTURE(m2);
    CAPTURE(n);
    SystemConfig cfg = makeConfig(m1, m2, n);
    double p = epaSymbolPower(cfg);
    auto [r1, r2] = ergodicRatesEpa(cfg, p, 0.5 * p, 0.5 * p);
    PowerAllocation alloc = PowerAllocation::epa(p, 0.5 * p, 0.5 * p);
    EmpiricalReport mc = mcUasdRates(cfg, alloc, 4000, 21);
    CHECK(std::abs(mc.r1.mean - r1) <=
          std::max(4.0 * mc.r1.stderror, 0.01 * r1));
    CHECK(std::abs(mc.r2.mean - r2) <=
          std::max(4.0 * mc.r2.stderror, 0.01 * r2));
  }
}

TEST_CASE("UPA with equal shared powers collapses to EPA") {
  SystemConfig cfg = makeConfig(3, 3, 3, 10.0);
  double p = epaSymbolPower(cfg);
  auto [e1, e2] = ergodicRatesEpa(cfg, p, 0.3 * p, 0.7 * p);
  PowerAllocation upa = PowerAllocation::upa(
      p, p, std::vector<double>(3, 0.3 * p), std::vector<double>(3, 0.7 * p));
  auto [u1, u2] = ergodicRatesUpa(cfg, upa);
  CHECK(u1 == doctest::Approx(e1).epsilon(1e-6));
  CHECK(u2 == doctest::Approx(e2).epsilon(1e-6));
}

TEST_CASE("UPA respects the eigenvalue ordering of the streams") {
  SystemConfig cfg = makeConfig(3, 3, 3, 10.0);
  double p = 0.01;
  // user 2 rides lambda/(1+lambda): the largest-eigenvalue stream wins;
  // user 1 rides 1/(1+lambda): the smallest-eigenvalue stream wins when the
  // users are far apart (min-rate switch point 1/Pi below the bulk)
  PowerAllocation top2 = PowerAllocation::upa(0, 0, {0, 0, 0}, {p, 0, 0});
  PowerAllocation bot2 = PowerAllocation::upa(0, 0, {0, 0, 0}, {0, 0, p});
  CHECK(ergodicRatesUpa(cfg, top2).second > ergodicRatesUpa(cfg, bot2).second);

  PowerAllocation top1 = PowerAllocation::upa(0, 0, {p, 0, 0}, {0, 0, 0});
  PowerAllocation bot1 = PowerAllocation::upa(0, 0, {0, 0, p}, {0, 0, 0});
  double t1 = ergodicRatesUpa(cfg, top1).first;
  double b1 = ergodicRatesUpa(cfg, bot1).first;
  CHECK(b1 > t1);
  CHECK(ergodicRatesUpa(cfg, top1).second == 0.0);

  // Monte-Carlo oracle for both orderings on sorted eigenvalues
  double mcT1 = 0, mcB1 = 0, mcT2 = 0, mcB2 = 0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    ChannelPair ch = sampleChannel(cfg, 71, t);
    UasdDecomposition dec = uasdDecompose<Complex>(ch.h1, ch.h2);
    mcT1 += instantaneousRates(dec, top1, cfg).r1;
    mcB1 += instantaneousRates(dec, bot1, cfg).r1;
    mcT2 += instantaneousRates(dec, top2, cfg).r2;
    mcB2 += instantaneousRates(dec, bot2, cfg).r2;
  }
  CHECK(mcB1 > mcT1);
  CHECK(mcT2 > mcB2);
  CHECK(mcB1 / trials == doctest::Approx(b1).epsilon(0.02));
  CHECK(mcT2 / trials ==
        doctest::Approx(ergodicRatesUpa(cfg, top2).second).epsilon(0.02));

  PowerAllocation noUser2 = PowerAllocation::upa(0.0, 0.0, {p, p, p}, {0, 0, 0});
  auto [r1, r2] = ergodicRatesUpa(cfg, noUser2);
  CHECK(r2 == 0.0);
  CHECK(r1 > 0.0);
}

TEST_CASE("rates are monotone in the own powers") {
  SystemConfig cfg = makeConfig(3, 3, 3, 10.0);
  double p = 0.002;
  auto rate2 = [&](double p2first) {
    PowerAllocation a =
        PowerAllocation::upa(0, 0, {p, p, p}, {p2first, p, p});
    return ergodicRatesUpa(cfg, a).second;
  };
  CHECK(rate2(0.5 * p) < rate2(p));
  CHECK(rate2(p) < rate2(2 * p));
  auto rate1 = [&](double p1first) {
    PowerAllocation a =
        PowerAllocation::upa(0, 0, {p1first, p, p}, {p, p, p});
    return ergodicRatesUpa(cfg, a).first;
  };
  CHECK(rate1(0.5 * p) < rate1(p));
  CHECK(rate1(p) < rate1(2 * p));
}

TEST_CASE("probability of the inferior SIC branch") {
  FParams fp{3, 3, 3};
  // symmetry of the F ensemble puts half the mass below one
  CHECK(probInferiorSic(fp, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(probInferiorSic(fp, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  FParams q1{3, 3, 1};
  CHECK(probInferiorSic(q1, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  // strictly decreasing in the path-loss ratio
  double prev = 1.0;
  for (double pi : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    double pr = probInferiorSic(fp, pi);
    CHECK(pr < prev);
    prev = pr;
  }
}

TEST_CASE("SIC flexibility bound") {
  SystemConfig cfg = makeConfig(3, 3, 3, 30.0);
  double p = epaSymbolPower(cfg);

  SUBCASE("vanishes as the users separate") {
    double prev = 1e9;
    for (double pi1 : {1e3, 1e5, 1e7}) {
      SystemConfig c = cfg;
      c.pi1 = pi1;
      double bound = sicGainBound(c, 0.5 * p, 0.5 * p);
      CHECK(bound < prev);
      prev = bound;
    }
    SystemConfig far = cfg;
    far.pi1 = 1e10;
    CHECK(sicGainBound(far, 0.5 * p, 0.5 * p) < 1e-4);
  }

  SUBCASE("equal path loss bound uses half the mass") {
    SystemConfig c = cfg;
    c.pi1 = c.pi2 * (1.0 + 1e-12);
    double bound = sicGainBound(c, 0.5 * p, 0.5 * p);
    // K_U at lambda = 0 with Pr = 1/2
    double ku = std::log2(1.0 + 0.5 * p / (c.pi1 * c.sigma2 + 0.5 * p));
    CHECK(bound == doctest::Approx(3 * ku * 0.5).epsilon(1e-6));
  }
}
