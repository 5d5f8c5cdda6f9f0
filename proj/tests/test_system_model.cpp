#include <doctest.h>

#include <cmath>

#include "uasd/diagonalize.hpp"
#include "uasd/montecarlo.hpp"
#include "uasd/rng.hpp"
#include "uasd/system_model.hpp"

using namespace uasd;

namespace {

SystemConfig makeConfig(int m1, int m2, int n) {
  SystemConfig cfg;
  cfg.m1 = m1;
  cfg.m2 = m2;
  cfg.n = n;
  cfg.pi1 = 1e4;
  cfg.pi2 = 1e2;
  cfg.sigma2 = dbmToWatt(-35.0);
  cfg.pmax = dbmToWatt(20.0);
  return cfg;
}

}  // namespace

TEST_CASE("derived dimensions") {
  auto check = [](int m1, int m2, int n, int l, int mb1, int mb2, int m) {
    DerivedDims d = deriveDims(m1, m2, n);
    CHECK(d.l == l);
    CHECK(d.mbar1 == mb1);
    CHECK(d.mbar2 == mb2);
    CHECK(d.m == m);
  };
  check(3, 3, 5, 5, 2, 2, 1);
  check(2, 2, 4, 4, 2, 2, 0);
  check(3, 3, 3, 3, 0, 0, 3);
  check(1, 4, 4, 4, 0, 3, 1);
}

TEST_CASE("partition identity over all small shapes") {
  for (int m1 = 1; m1 <= 16; ++m1)
    for (int m2 = 1; m2 <= 16; ++m2)
      for (int n = 1; n <= 16; ++n) {
        DerivedDims d = deriveDims(m1, m2, n);
        REQUIRE(d.mbar1 + d.mbar2 + d.m == d.l);
        REQUIRE(d.l == std::min(m1 + m2, n));
        REQUIRE(d.m >= 0);
      }
}

TEST_CASE("channel sampling is deterministic per seed") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  ChannelPair a = sampleChannel(cfg, 42, 7);
  ChannelPair b = sampleChannel(cfg, 42, 7);
  CHECK((a.h1 - b.h1).norm() == 0.0);
  CHECK((a.h2 - b.h2).norm() == 0.0);
  ChannelPair c = sampleChannel(cfg, 42, 8);
  CHECK((a.h1 - c.h1).norm() > 0.0);
}

TEST_CASE("generator produces unit-variance complex gaussians") {
  const int n = 1000000;
  CounterRng rng(2024, 0);
  Complex sum = 0.0;
  double sumSq = 0.0;
  for (int i = 0; i < n; ++i) {
    Complex z = rng.nextCn();
    sum += z;
    sumSq += std::norm(z);
  }
  double meanAbs = std::abs(sum) / n;
  double var = sumSq / n;
  CHECK(meanAbs < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("channel entries keep the generator statistics") {
  SystemConfig cfg = makeConfig(2, 2, 4);
  Complex sum = 0.0;
  double sumSq = 0.0;
  int count = 0;
  for (int t = 0; t < 12500; ++t) {
    ChannelPair ch = sampleChannel(cfg, 99, t);
    for (const auto& h : {ch.h1, ch.h2})
      for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
          sum += h(i, j);
          sumSq += std::norm(h(i, j));
          ++count;
        }
  }
  CHECK(count == 200000);
  CHECK(std::abs(sum) / count < 4.0 / std::sqrt(static_cast<double>(count)));
  CHECK(sumSq / count == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("GSVD transmit power formula") {
  CHECK(transmitPowerGsvd(1.0, makeConfig(3, 3, 5)) == doctest::Approx(5.0));
  CHECK(transmitPowerGsvd(1.0, makeConfig(1, 4, 4)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(transmitPowerGsvd(1.0, makeConfig(2, 2, 4)),
                  InfinitePowerError);
}

TEST_CASE("GSVD transmit power matches Monte Carlo") {
  for (auto [m1, m2, n] : {std::array<int, 3>{3, 3, 5}, {1, 4, 4}}) {
    SystemConfig cfg = makeConfig(m1, m2, n);
    MeanWithError mc = mcTransmitPowerGsvd(cfg, 1.0, 4000, 5);
    double analytic = transmitPowerGsvd(1.0, cfg);
    CHECK(std::abs(mc.mean - analytic) <= 3.0 * mc.stderror);
  }
}

TEST_CASE("EPA transmit power formula") {
  CHECK(transmitPowerEpa(1.0, makeConfig(2, 2, 4)) == doctest::Approx(2.0));
  CHECK(transmitPowerEpa(1.0, makeConfig(3, 3, 5)) == doctest::Approx(3.6));
  // second case: P * N / (M1 + M2 - N); the Monte-Carlo oracle below
  // confirms the value P for (3,3,3)
  CHECK(transmitPowerEpa(1.0, makeConfig(3, 3, 3)) == doctest::Approx(1.0));
}

TEST_CASE("EPA transmit power matches Monte Carlo") {
  for (auto [m1, m2, n] :
       {std::array<int, 3>{3, 3, 5}, {3, 3, 3}, {2, 2, 4}, {4, 2, 3}}) {
    SystemConfig cfg = makeConfig(m1, m2, n);
    PowerAllocation alloc = PowerAllocation::epa(1.0, 0.5, 0.5);
    MeanWithError mc = mcTransmitPowerUasd(cfg, alloc, 4000, 11);
    double analytic = transmitPowerEpa(1.0, cfg);
    // the BD power is deterministic, so allow for a zero standard error
    CHECK(std::abs(mc.mean - analytic) <= 3.0 * mc.stderror + 1e-12);
  }
}

TEST_CASE("UPA transmit power") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  DerivedDims d = deriveDims(cfg);

  SUBCASE("all powers zero") {
    PowerAllocation a = PowerAllocation::upa(0, 0, {0.0}, {0.0});
    CHECK(transmitPowerUpa(a, cfg) == 0.0);
  }
  SUBCASE("collapses to the EPA formula") {
    double p = 0.7, p1 = 0.3, p2 = 0.4;
    PowerAllocation a = PowerAllocation::upa(
        p, p, std::vector<double>(d.m, p1), std::vector<double>(d.m, p2));
    CHECK(transmitPowerUpa(a, cfg) ==
          doctest::Approx(transmitPowerEpa(p, cfg)).epsilon(1e-12));
  }
  SUBCASE("third-case arithmetic") {
    // (3/5)*1 + 2*1 + 1 with the shared pair summing to one
    PowerAllocation a = PowerAllocation::upa(1.0, 1.0, {0.25}, {0.75});
    CHECK(transmitPowerUpa(a, cfg) == doctest::Approx(3.6).epsilon(1e-12));
  }
  SUBCASE("linearity") {
    CounterRng rng(7, 0);
    auto randomAlloc = [&](double scale) {
      std::vector<double> p1l(d.m), p2l(d.m);
      for (int l = 0; l < d.m; ++l) {
        p1l[l] = scale * rng.nextUniform();
        p2l[l] = scale * rng.nextUniform();
      }
      return PowerAllocation::upa(scale * rng.nextUniform(),
                                  scale * rng.nextUniform(), p1l, p2l);
    };
    PowerAllocation x = randomAlloc(1.0), y = randomAlloc(2.0);
    double a = 0.3, b = 1.7;
    std::vector<double> p1l(d.m), p2l(d.m);
    for (int l = 0; l < d.m; ++l) {
      p1l[l] = a * x.p1l[l] + b * y.p1l[l];
      p2l[l] = a * x.p2l[l] + b * y.p2l[l];
    }
    PowerAllocation z = PowerAllocation::upa(a * x.p1 + b * y.p1,
                                             a * x.p2 + b * y.p2, p1l, p2l);
    CHECK(transmitPowerUpa(z, cfg) ==
          doctest::Approx(a * transmitPowerUpa(x, cfg) +
                          b * transmitPowerUpa(y, cfg)).epsilon(1e-12));
  }
}

TEST_CASE("UPA transmit power matches Monte Carlo with uneven powers") {
  for (auto [m1, m2, n] : {std::array<int, 3>{3, 3, 3}, {4, 2, 3}}) {
    SystemConfig cfg = makeConfig(m1, m2, n);
    DerivedDims d = deriveDims(cfg);
    std::vector<double> p1l(d.m), p2l(d.m);
    for (int l = 0; l < d.m; ++l) {
      p1l[l] = 0.1 + 0.3 * l;
      p2l[l] = 0.5 - 0.1 * l;
    }
    PowerAllocation alloc = PowerAllocation::upa(0.2, 0.9, p1l, p2l);
    double analytic = transmitPowerUpa(alloc, cfg);
    VectorXd q1, q2;
    alloc.perStream(d, q1, q2);
    // direct E[tr(Z diag Z^H)] oracle
    double sum = 0.0, sumSq = 0.0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
      ChannelPair ch = sampleChannel(cfg, 13, t);
      auto dec = uasdDecompose<Complex>(ch.h1, ch.h2);
      double v = 0.0;
      for (int l = 0; l < d.l; ++l)
        v += (q1(l) + q2(l)) * dec.z.col(l).squaredNorm();
      sum += v;
      sumSq += v * v;
    }
    double mean = sum / trials;
    double se = std::sqrt((sumSq / trials - mean * mean) / trials);
    CHECK(std::abs(mean - analytic) <= 3.0 * se);
  }
}

TEST_CASE("scenario parsing") {
  std::istringstream in(
      "# comment\nN = 5\nM1 = 3\nM2 = 3\nd1_m = 100\nd2_m = 10\n"
      "sigma2_dbm = -35\npmax_dbm = 20\nseed = 7\ntrials = 500\n");
  Scenario sc = parseScenario(in);
  CHECK(sc.config.n == 5);
  CHECK(sc.config.pi1 == doctest::Approx(1e4));
  CHECK(sc.config.pi2 == doctest::Approx(1e2));
  CHECK(sc.config.sigma2 == doctest::Approx(dbmToWatt(-35)));
  CHECK(sc.seed == 7);
  CHECK(sc.trials == 500);

  std::istringstream bad("N = 5\n");
  CHECK_THROWS_AS(parseScenario(bad), ConfigError);
  std::istringstream badKey(
      "N = 5\nM1 = 3\nM2 = 3\nd1_m = 100\nd2_m = 10\nsigma2_dbm = -35\n"
      "pmax_dbm = 20\nbogus = 1\n");
  CHECK_THROWS_AS(parseScenario(badKey), ConfigError);
}

TEST_CASE("config validation") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  CHECK_NOTHROW(cfg.validate());
  SystemConfig swapped = cfg;
  std::swap(swapped.pi1, swapped.pi2);  // near user farther than far user
  CHECK_THROWS_AS(swapped.validate(), ConfigError);
}
