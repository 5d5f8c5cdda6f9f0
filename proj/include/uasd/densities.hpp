#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uasd/quadrature.hpp"
#include "uasd/types.hpp"

namespace uasd {

/// Wishart parameters (mu1, mu2, nu) of the matrix-F ensemble that governs
/// the shared-stream gains for a given antenna configuration.
struct FParams {
  int mu1 = 0;
  int mu2 = 0;
  int nu = 0;
};

/// Parameter mapping for M1+M2 > N; throws DimensionError otherwise.
FParams mapWishartParams(int m1, int m2, int n);

/// A normalized scalar pdf over lambda in [lo, hi] (hi may be +inf) with an
/// evaluable CDF. Construction is pure; evaluation is thread-safe.
class Density {
 public:
  double pdf(double lambda) const { return pdf_(lambda); }
  double cdf(double lambda) const { return cdf_(lambda); }
  double supportLo() const { return lo_; }
  double supportHi() const { return hi_; }
  /// normalization constant applied to the raw analytic form
  double normalizer() const { return normalizer_; }

  /// integral of g against the density over the support
  double expect(const std::function<double(double)>& g,
                const QuadratureOptions& opt = {}) const;
  /// integral of g * pdf over [a, b] (clipped to the support)
  double expect(const std::function<double(double)>& g, double a, double b,
                const QuadratureOptions& opt = {}) const;
  double probBelow(double x) const;

  /// frozen quadrature rule on [a, b] with the density folded into the
  /// weights; apply() then integrates smooth g against the density
  QuadratureRule rule(double a, double b,
                      const QuadratureOptions& opt = {}) const;

  static Density fromParts(std::function<double(double)> pdf,
                           std::function<double(double)> cdf, double lo,
                           double hi, double normalizer, bool sqrtEdges);

 private:
  std::function<double(double)> pdf_;
  std::function<double(double)> cdf_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double normalizer_ = 1.0;
  bool sqrtEdges_ = false;
};

/// Marginal eigenvalue pdf of F = Y^{1/2} X^{-1} Y^{1/2},
/// X ~ CW_q(m1, I), Y ~ CW_q(m2, I); exact polynomial construction.
Density fMarginalPdf(int m1, int m2, int q);

/// l-th ordered (descending) eigenvalue pdf of the same ensemble.
Density fOrderedPdf(int l, int m1, int m2, int q);

/// Marginal eigenvalue pdf of W ~ CW_q(p, (1/q) I_q).
Density wishartMarginalPdf(int p, int q);

/// Large-dimension approximation of the F marginal, rho1 = q/m1, rho2 = q/m2.
Density fMarginalAsymptotic(double rho1, double rho2);

/// Large-dimension approximation of the Wishart marginal, xi = q/p.
Density wishartMarginalAsymptotic(double xi, double p);

/// Sorted (descending) eigenvalue tuples of sampled F matrices;
/// deterministic per (seed, trial index).
std::vector<VectorXd> sampleFEigenvalues(int m1, int m2, int q, int trials,
                                         std::uint64_t seed);

/// Sorted (descending) eigenvalue tuples of sampled CW_q(p, (1/q) I).
std::vector<VectorXd> sampleWishartEigenvalues(int p, int q, int trials,
                                               std::uint64_t seed);

/// Kolmogorov-Smirnov distance between a density's CDF and samples.
double ksDistance(const Density& d, std::vector<double> samples);

}  // namespace uasd
