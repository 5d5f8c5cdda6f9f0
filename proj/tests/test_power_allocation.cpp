#include <doctest.h>

#include <cmath>

#include "uasd/power_allocation.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/rng.hpp"
#include "uasd/system_model.hpp"

using namespace uasd;

namespace {

SystemConfig makeConfig(int m1, int m2, int n, double pmaxDbm = 10.0) {
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

TEST_CASE("eta = 0 concentrates everything on user 2") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  CcpResult res = ccpAllocate(cfg, 0.0);
  CHECK(res.converged);
  CHECK(res.alloc.p1 == 0.0);
  for (double v : res.alloc.p1l) CHECK(v == 0.0);
  auto [r1, r2] = ergodicRatesUpa(cfg, res.alloc);
  CHECK(r1 == 0.0);
  CHECK(r2 > 0.0);
}

TEST_CASE("eta = 1 with zero linearization spends nothing on user 2") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  SolveP2Result res = solveP2(cfg, 1.0, {0.0, 0.0, 0.0});
  CHECK(res.kktResidual < 1e-6);
  CHECK(res.alloc.p2 == 0.0);
  for (double v : res.alloc.p2l) CHECK(v <= 1e-12);
}

TEST_CASE("inner solution dominates the equal split under the surrogate") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  std::vector<double> q(3, 0.0);
  SolveP2Result res = solveP2(cfg, 0.5, q);
  double p = epaSymbolPower(cfg);
  PowerAllocation epa = PowerAllocation::upa(
      p, p, std::vector<double>(3, 0.5 * p), std::vector<double>(3, 0.5 * p));
  CHECK(res.surrogateObjective >=
        surrogateObjective(cfg, 0.5, epa, q) - 1e-9);
}

TEST_CASE("solve_p2 guards its preconditions") {
  CHECK_THROWS_AS(solveP2(makeConfig(2, 2, 4), 0.5, {}), DimensionError);
  CHECK_THROWS_AS(solveP2(makeConfig(3, 3, 3), 0.5, {-1.0, 0.0, 0.0}),
                  DomainError);
  CHECK_THROWS_AS(solveP2(makeConfig(3, 3, 3), 1.5, {0.0, 0.0, 0.0}),
                  DomainError);
}

TEST_CASE("ccp trace is monotone and feasible") {
  for (auto [m1, m2, n] : {std::array<int, 3>{3, 3, 3}, {3, 3, 5}, {4, 2, 3}}) {
    SystemConfig cfg = makeConfig(m1, m2, n);
    for (double eta : {0.2, 0.5, 0.8}) {
      CAPTURE(m1);
      CAPTURE(eta);
      CcpResult res = ccpAllocate(cfg, eta);
      CHECK(res.converged);
      for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].objective >= res.trace[i - 1].objective - 1e-9);
      for (const auto& row : res.trace)
        CHECK(row.budgetUsed <= cfg.pmax + 1e-9);
      CHECK(transmitPowerUpa(res.alloc, cfg) <= cfg.pmax + 1e-9);
    }
  }
}

TEST_CASE("surrogate minorizes the true objective and touches at q") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  CounterRng rng(404, 0);
  double scale = cfg.pmax;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> q(3), p1l(3), p2l(3);
    for (int l = 0; l < 3; ++l) {
      q[l] = scale * rng.nextUniform();
      p1l[l] = scale * rng.nextUniform();
      p2l[l] = scale * rng.nextUniform();
    }
    PowerAllocation point =
        PowerAllocation::upa(scale * rng.nextUniform(),
                             scale * rng.nextUniform(), p1l, p2l);
    double truth = weightedObjective(cfg, 1.0, point);
    double sur = surrogateObjective(cfg, 1.0, point, q);
    CHECK(sur <= truth + 1e-9);
    // equality at the linearization point
    PowerAllocation at =
        PowerAllocation::upa(point.p1, point.p2, point.p1l, q);
    CHECK(surrogateObjective(cfg, 1.0, at, q) ==
          doctest::Approx(weightedObjective(cfg, 1.0, at)).epsilon(1e-10));
  }
}

TEST_CASE("converged allocation is a fixed point of the inner solver") {
  SystemConfig cfg = makeConfig(3, 3, 5);
  CcpResult res = ccpAllocate(cfg, 0.5, 1e-7);
  std::vector<double> q = res.alloc.p2l;
  SolveP2Result again = solveP2(cfg, 0.5, q);
  CHECK(std::abs(again.alloc.p1 - res.alloc.p1) < 1e-6);
  CHECK(std::abs(again.alloc.p2 - res.alloc.p2) < 1e-6);
  for (size_t l = 0; l < q.size(); ++l) {
    CHECK(std::abs(again.alloc.p1l[l] - res.alloc.p1l[l]) < 1e-6);
    CHECK(std::abs(again.alloc.p2l[l] - res.alloc.p2l[l]) < 1e-6);
  }
}

TEST_CASE("a vanishing budget forces the zero allocation") {
  SystemConfig cfg = makeConfig(3, 3, 3);
  cfg.pmax = 1e-12;
  CcpResult res = ccpAllocate(cfg, 0.5);
  CHECK(res.alloc.p1 <= 1e-11);
  CHECK(res.alloc.p2 <= 1e-11);
  for (double v : res.alloc.p1l) CHECK(v <= 1e-11);
  for (double v : res.alloc.p2l) CHECK(v <= 1e-11);
}

TEST_CASE("UPA weighted sums dominate the EPA sweep") {
  for (auto [m1, m2, n] : {std::array<int, 3>{3, 3, 3}, {3, 3, 5}}) {
    SystemConfig cfg = makeConfig(m1, m2, n);
    for (double eta : {0.1, 0.5, 0.9}) {
      CAPTURE(m1);
      CAPTURE(n);
      CAPTURE(eta);
      CcpResult res = ccpAllocate(cfg, eta);
      auto [r1, r2] = ergodicRatesUpa(cfg, res.alloc);
      double upaObjective = eta * r1 + (1.0 - eta) * r2;
      CHECK(upaObjective >= bestEpaObjective(cfg, eta) - 1e-4);
    }
  }
}

TEST_CASE("convex branch solves directly") {
  SystemConfig cfg = makeConfig(2, 2, 4);
  CcpResult res = ccpAllocate(cfg, 0.5);
  CHECK(res.converged);
  CHECK(res.iterations == 1);
  CHECK(res.alloc.p1 + res.alloc.p2 <= cfg.pmax + 1e-9);
  // the budget is exhausted at any optimum with positive weight on both
  CHECK(res.alloc.p1 + res.alloc.p2 >= cfg.pmax - 1e-6);
  auto [r1, r2] = ergodicRatesUpa(cfg, res.alloc);
  CHECK(r1 > 0.0);
  CHECK(r2 > 0.0);
}
