#pragma once

#include <vector>

#include "uasd/types.hpp"

namespace uasd {

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CcpTraceRow {
  int iteration = 0;
  double objective = 0.0;  ///< true weighted sum eta*R1 + (1-eta)*R2
  double maxDelta = 0.0;   ///< largest variable change vs previous iterate
  double budgetUsed = 0.0;  ///< P_T of the iterate
};

struct CcpResult {
  PowerAllocation alloc;
  std::vector<CcpTraceRow> trace;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;  ///< false means the iteration cap was hit
};

struct SolveP2Result {
  PowerAllocation alloc;
  double surrogateObjective = 0.0;
  double kktResidual = 0.0;
  int iterations = 0;
};

/// One inner CCP step: maximize eta * R1~(.; q) + (1-eta) * R2 over the
/// budget polytope, to first-order stationarity 1e-7. Needs M1+M2 > N.
SolveP2Result solveP2(const SystemConfig& cfg, double eta,
                      const std::vector<double>& q);

/// Statistical power allocation: CCP outer loop for M1+M2 > N, direct
/// concave maximization otherwise. epsilon is the per-variable convergence
/// tolerance of the outer loop.
CcpResult ccpAllocate(const SystemConfig& cfg, double eta,
                      double epsilon = 1e-5, int maxIterations = 100);

/// True weighted objective of an allocation (quadrature-rule evaluation,
/// consistent with the optimizer's integrals).
double weightedObjective(const SystemConfig& cfg, double eta,
                         const PowerAllocation& alloc);

/// Surrogate value eta * R1~(x; q) + (1-eta) * R2(x), exposed for the
/// minorant property tests: R1~(x; q) <= R1(x) with equality at p2l = q.
double surrogateObjective(const SystemConfig& cfg, double eta,
                          const PowerAllocation& alloc,
                          const std::vector<double>& q);

/// Best EPA split objective max_t eta*R1 + (1-eta)*R2 with P from the
/// budget-exhausting EPA power; the EPA sweep is a feasible-point oracle.
double bestEpaObjective(const SystemConfig& cfg, double eta, int gridPoints = 41);

}  // namespace uasd
