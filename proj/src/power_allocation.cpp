#include "uasd/power_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "uasd/quadrature.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/system_model.hpp"

namespace uasd {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Frozen quadrature rules and budget geometry for one configuration.
// Variable layout: x = [p1l (M) | p2l (M) | p1 | p2].
struct Workspace {
  SystemConfig cfg;
  DerivedDims d;
  double split = 0.0;
  std::vector<QuadratureRule> low;   // per shared stream, [0, split]
  std::vector<QuadratureRule> high;  // per shared stream, [split, inf)
  QuadratureRule wishPriv1;          // user-1 private density (M1+M2 <= N)
  QuadratureRule wishPriv2;          // user-2 private density
  std::vector<double> budgetW;
  int dim = 0;

  int idxP1l(int l) const { return l; }
  int idxP2l(int l) const { return d.m + l; }
  int idxP1() const { return 2 * d.m; }
  int idxP2() const { return 2 * d.m + 1; }
};

const Workspace& workspaceFor(const SystemConfig& cfg) {
  static std::map<std::uint64_t, Workspace> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  std::uint64_t key = configHash(cfg);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  Workspace ws;
  ws.cfg = cfg;
  ws.d = deriveDims(cfg);
  ws.dim = 2 * ws.d.m + 2;
  ws.split = cfg.pi2 / cfg.pi1;
  QuadratureOptions opt;
  opt.absTol = 1e-11;
  opt.relTol = 1e-10;

  if (cfg.m1 + cfg.m2 > cfg.n) {
    FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
    for (int l = 1; l <= ws.d.m; ++l) {
      const Density& pl = cachedFOrdered(l, fp.mu1, fp.mu2, fp.nu);
      ws.low.push_back(pl.rule(0.0, ws.split, opt));
      ws.high.push_back(pl.rule(ws.split, pl.supportHi(), opt));
    }
  } else {
    const Density& w1 = cachedWishartMarginal(cfg.m1, ws.d.mbar1);
    ws.wishPriv1 = w1.rule(0.0, w1.supportHi(), opt);
  }
  if (ws.d.mbar2 > 0) {
    const Density& w2 = cachedWishartMarginal(cfg.m2, ws.d.mbar2);
    ws.wishPriv2 = w2.rule(0.0, w2.supportHi(), opt);
  }

  // budget weights from the average-transmit-power formula (linear in x)
  ws.budgetW.assign(ws.dim, 0.0);
  const int m1 = cfg.m1, m2 = cfg.m2, n = cfg.n;
  if (m1 + m2 <= n) {
    ws.budgetW[ws.idxP1()] = 1.0;
    ws.budgetW[ws.idxP2()] = 1.0;
  } else if (m1 >= n) {
    const double den = m1 + m2 - n;
    for (int l = 0; l < ws.d.m; ++l) {
      ws.budgetW[ws.idxP1l(l)] = 1.0 / den;
      ws.budgetW[ws.idxP2l(l)] = 1.0 / den;
    }
    ws.budgetW[ws.idxP1()] = ws.d.mbar1 / den;
    ws.budgetW[ws.idxP2()] = ws.d.mbar2 / den;
  } else {
    for (int l = 0; l < ws.d.m; ++l) {
      ws.budgetW[ws.idxP1l(l)] = static_cast<double>(m1) / (n * ws.d.m);
      ws.budgetW[ws.idxP2l(l)] = static_cast<double>(m1) / (n * ws.d.m);
    }
    ws.budgetW[ws.idxP1()] = static_cast<double>(ws.d.mbar1) / ws.d.m;
    ws.budgetW[ws.idxP2()] = 1.0;
  }
  return cache.emplace(key, std::move(ws)).first->second;
}

// per-unit-power SNR gains of the shared streams at the two receivers
double gainAtUser2(double lam, const SystemConfig& cfg) {
  return lam / ((1.0 + lam) * cfg.pi2 * cfg.sigma2);
}
double gainAtUser1(double lam, const SystemConfig& cfg) {
  return 1.0 / ((1.0 + lam) * cfg.pi1 * cfg.sigma2);
}

// true weighted objective and the surrogate share everything except the
// user-1 shared term, so both are driven off this struct
struct Eval {
  double value = 0.0;
  std::vector<double> grad;
};

// true R1 shared contribution of stream l (min-rate rule folded into the
// region split), no gradient (used for traces and objectives only)
double trueR1SharedStream(const Workspace& ws, int l, double a1, double a2) {
  if (a1 <= 0.0) return 0.0;
  const SystemConfig& cfg = ws.cfg;
  double v = 0.0;
  for (size_t i = 0; i < ws.low[l].nodes.size(); ++i) {
    double g = gainAtUser2(ws.low[l].nodes[i], cfg);
    v += ws.low[l].weights[i] * std::log2(1.0 + a1 * g / (1.0 + a2 * g));
  }
  for (size_t i = 0; i < ws.high[l].nodes.size(); ++i) {
    double g = gainAtUser1(ws.high[l].nodes[i], cfg);
    v += ws.high[l].weights[i] * std::log2(1.0 + a1 * g / (1.0 + a2 * g));
  }
  return v;
}

double trueR2SharedStream(const Workspace& ws, int l, double a2) {
  if (a2 <= 0.0) return 0.0;
  const SystemConfig& cfg = ws.cfg;
  double v = 0.0;
  for (size_t i = 0; i < ws.low[l].nodes.size(); ++i)
    v += ws.low[l].weights[i] *
         std::log2(1.0 + a2 * gainAtUser2(ws.low[l].nodes[i], cfg));
  for (size_t i = 0; i < ws.high[l].nodes.size(); ++i)
    v += ws.high[l].weights[i] *
         std::log2(1.0 + a2 * gainAtUser2(ws.high[l].nodes[i], cfg));
  return v;
}

// For M1+M2 > N the user-1 private gains are forced to one, so the term is
// deterministic; otherwise it integrates against the Wishart marginal.
double privateRate1(const Workspace& ws, double p1) {
  if (ws.cfg.m1 + ws.cfg.m2 > ws.cfg.n)
    return ws.d.mbar1 * std::log2(1.0 + p1 / (ws.cfg.pi1 * ws.cfg.sigma2));
  if (p1 <= 0.0) return 0.0;
  double v = 0.0;
  for (size_t i = 0; i < ws.wishPriv1.nodes.size(); ++i)
    v += ws.wishPriv1.weights[i] *
         std::log2(1.0 + p1 * ws.wishPriv1.nodes[i] /
                             (ws.cfg.pi1 * ws.cfg.sigma2));
  return ws.d.mbar1 * v;
}

double privateRate1Grad(const Workspace& ws, double p1) {
  if (ws.cfg.m1 + ws.cfg.m2 > ws.cfg.n)
    return ws.d.mbar1 / (kLn2 * (ws.cfg.pi1 * ws.cfg.sigma2 + p1));
  double g = 0.0;
  for (size_t i = 0; i < ws.wishPriv1.nodes.size(); ++i) {
    double lam = ws.wishPriv1.nodes[i];
    g += ws.wishPriv1.weights[i] * lam /
         (ws.cfg.pi1 * ws.cfg.sigma2 + p1 * lam);
  }
  return ws.d.mbar1 * g / kLn2;
}

double privateRate2(const Workspace& ws, double p2) {
  if (ws.d.mbar2 == 0 || p2 <= 0.0) return 0.0;
  double v = 0.0;
  for (size_t i = 0; i < ws.wishPriv2.nodes.size(); ++i)
    v += ws.wishPriv2.weights[i] *
         std::log2(1.0 + p2 * ws.wishPriv2.nodes[i] /
                             (ws.cfg.pi2 * ws.cfg.sigma2));
  return ws.d.mbar2 * v;
}

double trueObjective(const Workspace& ws, double eta,
                     const std::vector<double>& x) {
  double r1 = privateRate1(ws, x[ws.idxP1()]);
  double r2 = privateRate2(ws, x[ws.idxP2()]);
  for (int l = 0; l < ws.d.m; ++l) {
    r1 += trueR1SharedStream(ws, l, x[ws.idxP1l(l)], x[ws.idxP2l(l)]);
    r2 += trueR2SharedStream(ws, l, x[ws.idxP2l(l)]);
  }
  return eta * r1 + (1.0 - eta) * r2;
}

// surrogate objective and gradient: the coupled user-1 log is kept jointly
// concave in (p1l, p2l) and the interfering denominator is linearized at q
Eval surrogate(const Workspace& ws, double eta, const std::vector<double>& q,
               const std::vector<double>& x, bool wantGrad) {
  const SystemConfig& cfg = ws.cfg;
  Eval ev;
  ev.grad.assign(wantGrad ? ws.dim : 0, 0.0);
  double r1 = privateRate1(ws, x[ws.idxP1()]);
  double r2 = privateRate2(ws, x[ws.idxP2()]);
  if (wantGrad) {
    ev.grad[ws.idxP1()] = eta * privateRate1Grad(ws, x[ws.idxP1()]);
    if (ws.d.mbar2 > 0) {
      double gp2 = 0.0;
      for (size_t i = 0; i < ws.wishPriv2.nodes.size(); ++i) {
        double lam = ws.wishPriv2.nodes[i];
        gp2 += ws.wishPriv2.weights[i] * lam /
               (cfg.pi2 * cfg.sigma2 + x[ws.idxP2()] * lam);
      }
      ev.grad[ws.idxP2()] = (1.0 - eta) * ws.d.mbar2 * gp2 / kLn2;
    }
  }

  for (int l = 0; l < ws.d.m; ++l) {
    const double a1 = x[ws.idxP1l(l)], a2 = x[ws.idxP2l(l)], ql = q[l];
    double v1 = 0.0, vR2 = 0.0;
    double g1 = 0.0, g2 = 0.0, gR2 = 0.0;
    auto accumulate = [&](const QuadratureRule& rule, bool lowRegion) {
      for (size_t i = 0; i < rule.nodes.size(); ++i) {
        double lam = rule.nodes[i];
        double w = rule.weights[i];
        double g = lowRegion ? gainAtUser2(lam, cfg) : gainAtUser1(lam, cfg);
        // joint concave term log2(1 + g*(p1 + p2)) and the tangent of
        // -log2(1 + g*p2) at q
        v1 += w * (std::log2(1.0 + g * (a1 + a2)) -
                   std::log2(1.0 + g * ql) -
                   g * (a2 - ql) / (kLn2 * (1.0 + g * ql)));
        if (wantGrad) {
          double joint = w * g / (kLn2 * (1.0 + g * (a1 + a2)));
          g1 += joint;
          g2 += joint - w * g / (kLn2 * (1.0 + g * ql));
        }
      }
    };
    accumulate(ws.low[l], true);
    accumulate(ws.high[l], false);

    // user-2 shared term over the full axis
    for (size_t i = 0; i < ws.low[l].nodes.size(); ++i) {
      double g = gainAtUser2(ws.low[l].nodes[i], cfg);
      double w = ws.low[l].weights[i];
      vR2 += w * std::log2(1.0 + a2 * g);
      if (wantGrad) gR2 += w * g / (kLn2 * (1.0 + a2 * g));
    }
    for (size_t i = 0; i < ws.high[l].nodes.size(); ++i) {
      double g = gainAtUser2(ws.high[l].nodes[i], cfg);
      double w = ws.high[l].weights[i];
      vR2 += w * std::log2(1.0 + a2 * g);
      if (wantGrad) gR2 += w * g / (kLn2 * (1.0 + a2 * g));
    }

    r1 += v1;
    r2 += vR2;
    if (wantGrad) {
      ev.grad[ws.idxP1l(l)] = eta * g1;
      ev.grad[ws.idxP2l(l)] = eta * g2 + (1.0 - eta) * gR2;
    }
  }
  ev.value = eta * r1 + (1.0 - eta) * r2;
  return ev;
}

// Euclidean projection onto {x >= 0, w^T x <= budget}
std::vector<double> project(const Workspace& ws, std::vector<double> x) {
  for (double& v : x) v = std::max(v, 0.0);
  double used = 0.0;
  for (int i = 0; i < ws.dim; ++i) used += ws.budgetW[i] * x[i];
  if (used <= ws.cfg.pmax) return x;
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < ws.dim; ++i)
    if (ws.budgetW[i] > 0.0) hi = std::max(hi, x[i] / ws.budgetW[i]);
  for (int iter = 0; iter < 200; ++iter) {
    double mu = 0.5 * (lo + hi);
    double s = 0.0;
    for (int i = 0; i < ws.dim; ++i)
      s += ws.budgetW[i] * std::max(0.0, x[i] - mu * ws.budgetW[i]);
    if (s > ws.cfg.pmax)
      lo = mu;
    else
      hi = mu;
  }
  double mu = 0.5 * (lo + hi);
  for (int i = 0; i < ws.dim; ++i)
    x[i] = std::max(0.0, x[i] - mu * ws.budgetW[i]);
  return x;
}

struct InnerResult {
  std::vector<double> x;
  double value = 0.0;
  double kktResidual = 0.0;
  int iterations = 0;
};

// projected gradient ascent with backtracking on the concave surrogate
InnerResult maximizeSurrogate(const Workspace& ws, double eta,
                              const std::vector<double>& q,
                              std::vector<double> x0) {
  const double tol = 1e-7;
  InnerResult res;
  res.x = project(ws, std::move(x0));
  Eval cur = surrogate(ws, eta, q, res.x, true);
  double step = ws.cfg.pmax;
  for (int it = 0; it < 5000; ++it) {
    // KKT residual: infinity norm of the unit-step gradient mapping
    std::vector<double> probe(ws.dim);
    for (int i = 0; i < ws.dim; ++i) probe[i] = res.x[i] + cur.grad[i];
    probe = project(ws, probe);
    double resid = 0.0;
    for (int i = 0; i < ws.dim; ++i)
      resid = std::max(resid, std::abs(probe[i] - res.x[i]));
    res.kktResidual = resid / std::max(1.0, ws.cfg.pmax);
    res.iterations = it;
    if (res.kktResidual < tol) break;

    bool advanced = false;
    for (int bt = 0; bt < 60; ++bt) {
      std::vector<double> cand(ws.dim);
      for (int i = 0; i < ws.dim; ++i)
        cand[i] = res.x[i] + step * cur.grad[i];
      cand = project(ws, cand);
      double inner = 0.0;
      for (int i = 0; i < ws.dim; ++i)
        inner += cur.grad[i] * (cand[i] - res.x[i]);
      if (inner <= 0.0) {
        step *= 0.5;
        continue;
      }
      Eval next = surrogate(ws, eta, q, cand, false);
      if (next.value >= cur.value + 1e-4 * inner) {
        res.x = std::move(cand);
        cur = surrogate(ws, eta, q, res.x, true);
        step *= 2.0;
        advanced = true;
        break;
      }
      step *= 0.5;
    }
    if (!advanced) {
      if (res.kktResidual > 1e3 * tol)
        throw SolverFailure("line search stalled at KKT residual " +
                            std::to_string(res.kktResidual));
      break;
    }
  }
  res.value = cur.value;
  return res;
}

PowerAllocation vectorToAlloc(const Workspace& ws,
                              const std::vector<double>& x) {
  std::vector<double> p1l(ws.d.m), p2l(ws.d.m);
  for (int l = 0; l < ws.d.m; ++l) {
    p1l[l] = x[ws.idxP1l(l)];
    p2l[l] = x[ws.idxP2l(l)];
  }
  return PowerAllocation::upa(x[ws.idxP1()], x[ws.idxP2()], std::move(p1l),
                              std::move(p2l));
}

std::vector<double> allocToVector(const Workspace& ws,
                                  const PowerAllocation& a) {
  std::vector<double> x(ws.dim, 0.0);
  for (int l = 0; l < ws.d.m; ++l) {
    x[ws.idxP1l(l)] = a.p1l[l];
    x[ws.idxP2l(l)] = a.p2l[l];
  }
  x[ws.idxP1()] = a.p1;
  x[ws.idxP2()] = a.p2;
  return x;
}

CcpResult runCcpLoop(const Workspace& ws, double eta, double epsilon,
                     int maxIterations, std::vector<double> q,
                     std::vector<double> x) {
  CcpResult out;
  for (int n = 1; n <= maxIterations; ++n) {
    InnerResult inner = maximizeSurrogate(ws, eta, q, x);
    double maxDelta = 0.0;
    for (int i = 0; i < ws.dim; ++i)
      maxDelta = std::max(maxDelta, std::abs(inner.x[i] - x[i]));
    x = inner.x;
    for (int l = 0; l < ws.d.m; ++l) q[l] = x[ws.idxP2l(l)];
    double objective = trueObjective(ws, eta, x);
    double used = 0.0;
    for (int i = 0; i < ws.dim; ++i) used += ws.budgetW[i] * x[i];
    out.trace.push_back({n, objective, maxDelta, used});
    out.iterations = n;
    if (maxDelta < epsilon) {
      out.converged = true;
      break;
    }
  }
  out.alloc = vectorToAlloc(ws, x);
  out.objective = trueObjective(ws, eta, x);
  return out;
}

}  // namespace

SolveP2Result solveP2(const SystemConfig& cfg, double eta,
                      const std::vector<double>& q) {
  cfg.validate();
  if (eta < 0.0 || eta > 1.0) throw DomainError("eta must lie in [0, 1]");
  if (cfg.m1 + cfg.m2 <= cfg.n)
    throw DimensionError("P2 is the nonconvex-case subproblem (M1+M2 > N)");
  const Workspace& ws = workspaceFor(cfg);
  if (static_cast<int>(q.size()) != ws.d.m)
    throw DimensionError("q must hold M linearization points");
  for (double v : q)
    if (v < 0.0) throw DomainError("linearization points must be >= 0");
  InnerResult inner =
      maximizeSurrogate(ws, eta, q, std::vector<double>(ws.dim, 0.0));
  SolveP2Result res;
  res.alloc = vectorToAlloc(ws, inner.x);
  res.surrogateObjective = inner.value;
  res.kktResidual = inner.kktResidual;
  res.iterations = inner.iterations;
  return res;
}

CcpResult ccpAllocate(const SystemConfig& cfg, double eta, double epsilon,
                      int maxIterations) {
  cfg.validate();
  if (eta < 0.0 || eta > 1.0) throw DomainError("eta must lie in [0, 1]");
  const Workspace& ws = workspaceFor(cfg);

  if (cfg.m1 + cfg.m2 <= cfg.n) {
    // P1 is already concave; a single inner maximization solves it
    std::vector<double> q;
    InnerResult inner =
        maximizeSurrogate(ws, eta, q, std::vector<double>(ws.dim, 0.0));
    CcpResult out;
    out.alloc = vectorToAlloc(ws, inner.x);
    out.objective = trueObjective(ws, eta, inner.x);
    double used = 0.0;
    for (int i = 0; i < ws.dim; ++i) used += ws.budgetW[i] * inner.x[i];
    out.trace.push_back({1, out.objective, 0.0, used});
    out.iterations = 1;
    out.converged = true;
    return out;
  }

  CcpResult cold = runCcpLoop(ws, eta, epsilon, maxIterations,
                              std::vector<double>(ws.d.m, 0.0),
                              std::vector<double>(ws.dim, 0.0));

  // Multi-start safeguard: if the best EPA split beats the cold start,
  // restart the loop from that feasible point (CCP then keeps monotone
  // ascent from it). Keep whichever run ends higher.
  double p = epaSymbolPower(cfg);
  double bestEpa = -1.0, bestT = 0.5;
  for (int i = 0; i <= 40; ++i) {
    double t = i / 40.0;
    std::vector<double> x(ws.dim, 0.0);
    for (int l = 0; l < ws.d.m; ++l) {
      x[ws.idxP1l(l)] = t * p;
      x[ws.idxP2l(l)] = (1.0 - t) * p;
    }
    x[ws.idxP1()] = p;
    x[ws.idxP2()] = p;
    double v = trueObjective(ws, eta, x);
    if (v > bestEpa) {
      bestEpa = v;
      bestT = t;
    }
  }
  if (cold.objective >= bestEpa - 1e-9) return cold;
  std::vector<double> x(ws.dim, 0.0);
  std::vector<double> q(ws.d.m, 0.0);
  for (int l = 0; l < ws.d.m; ++l) {
    x[ws.idxP1l(l)] = bestT * p;
    x[ws.idxP2l(l)] = (1.0 - bestT) * p;
    q[l] = x[ws.idxP2l(l)];
  }
  x[ws.idxP1()] = p;
  x[ws.idxP2()] = p;
  CcpResult warm = runCcpLoop(ws, eta, epsilon, maxIterations, q, x);
  return warm.objective >= cold.objective ? warm : cold;
}

double weightedObjective(const SystemConfig& cfg, double eta,
                         const PowerAllocation& alloc) {
  const Workspace& ws = workspaceFor(cfg);
  return trueObjective(ws, eta, allocToVector(ws, alloc));
}

double surrogateObjective(const SystemConfig& cfg, double eta,
                          const PowerAllocation& alloc,
                          const std::vector<double>& q) {
  const Workspace& ws = workspaceFor(cfg);
  if (static_cast<int>(q.size()) != ws.d.m)
    throw DimensionError("q must hold M linearization points");
  return surrogate(ws, eta, q, allocToVector(ws, alloc), false).value;
}

double bestEpaObjective(const SystemConfig& cfg, double eta, int gridPoints) {
  const Workspace& ws = workspaceFor(cfg);
  double p = epaSymbolPower(cfg);
  double best = 0.0;
  for (int i = 0; i < gridPoints; ++i) {
    double t = gridPoints == 1 ? 0.5 : static_cast<double>(i) / (gridPoints - 1);
    std::vector<double> x(ws.dim, 0.0);
    for (int l = 0; l < ws.d.m; ++l) {
      x[ws.idxP1l(l)] = t * p;
      x[ws.idxP2l(l)] = (1.0 - t) * p;
    }
    x[ws.idxP1()] = p;
    x[ws.idxP2()] = p;
    best = std::max(best, trueObjective(ws, eta, x));
  }
  return best;
}

}  // namespace uasd
