#pragma once

#include <functional>
#include <vector>

namespace uasd {

struct QuadratureOptions {
  double absTol = 1e-10;
  double relTol = 1e-8;
  int maxIntervals = 4000;
};

/// Adaptive Gauss-Kronrod 15(7) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

/// Integral over [a, +inf) via x = a + t/(1-t).
double integrateToInfinity(const std::function<double(double)>& f, double a,
                           const QuadratureOptions& opt = {});

/// Integral of f over [a, b] when f has inverse-square-root integrable
/// endpoint behavior (semicircle-type supports); uses x = mid + half*sin(t).
double integrateSqrtEdges(const std::function<double(double)>& f, double a,
                          double b, const QuadratureOptions& opt = {});

/// Fixed quadrature rule: sum f(node_i) * weight_i reproduces the adaptive
/// integral of smooth f against the region that generated the rule.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  double apply(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Builds a reusable rule on [a, b] by adaptively subdividing against a
/// representative integrand (refinement driver), then freezing the panels.
QuadratureRule buildRule(const std::function<double(double)>& driver, double a,
                         double b, const QuadratureOptions& opt = {});

/// Same on [a, +inf) through the rational substitution.
QuadratureRule buildRuleToInfinity(const std::function<double(double)>& driver,
                                   double a, const QuadratureOptions& opt = {});

/// Golden-section maximization of a unimodal (or monotone) function on [a, b].
double goldenSectionMax(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-9);

}  // namespace uasd
