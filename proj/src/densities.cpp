#include "uasd/densities.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "uasd/polynomial.hpp"
#include "uasd/rng.hpp"

namespace uasd {

namespace {

// index map shared by the marginal-pdf determinant expansions; 1-based
int alphaIdx(int i, int j, int m, int n) {
  if (i < m && j < n) return i + j - 2;
  if (i >= m && j >= n) return i + j;
  return i + j - 1;
}

Rational detRational(std::vector<std::vector<Rational>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return Rational(1);
  // fraction-free is unnecessary at these sizes; plain elimination on rationals
  Rational det(1);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (!a[r][c].isZero()) {
        piv = r;
        break;
      }
    if (piv < 0) return Rational(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    Rational inv = Rational(1) / a[c][c];
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c].isZero()) continue;
      Rational f = a[r][c] * inv;
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// determinant of a polynomial matrix by first-column cofactor expansion with
// memoized minors over row subsets
class PolyDet {
 public:
  explicit PolyDet(std::vector<std::vector<Polynomial>> m)
      : m_(std::move(m)), n_(static_cast<int>(m_.size())) {}

  Polynomial value() {
    if (n_ == 0) return Polynomial(Rational(1));
    std::vector<int> rows(n_);
    for (int i = 0; i < n_; ++i) rows[i] = i;
    return minor(rows, 0);
  }

 private:
  Polynomial minor(const std::vector<int>& rows, int col) {
    if (rows.empty()) return Polynomial(Rational(1));
    std::uint32_t key = 0;
    for (int r : rows) key |= 1u << r;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Polynomial det;
    std::vector<int> rest;
    rest.reserve(rows.size() - 1);
    for (size_t k = 0; k < rows.size(); ++k) {
      rest.clear();
      for (size_t j = 0; j < rows.size(); ++j)
        if (j != k) rest.push_back(rows[j]);
      Polynomial sub = minor(rest, col + 1);
      Polynomial term = m_[rows[k]][col] * sub;
      if (k % 2 == 0)
        det += term;
      else
        det -= term;
    }
    memo_.emplace(key, det);
    return det;
  }

  std::vector<std::vector<Polynomial>> m_;
  int n_;
  std::map<std::uint32_t, Polynomial> memo_;
};

// reduce by common (1+x) factors, then scale so the integral over [0, inf)
// equals one; returns the normalizer actually applied
Rational reduceAndNormalize(Polynomial& num, int& expE) {
  const Rational minusOne(-1);
  while (!num.isZero() && num.evaluate(minusOne).isZero() && expE > 0) {
    num = num.dividedByOnePlusX();
    --expE;
  }
  // integral: expand in v = 1+x; int_1^inf v^{j-E} dv = 1/(E-1-j)
  Polynomial vb = num.inOnePlusXBasis();
  Rational integral(0);
  for (int j = 0; j <= vb.degree(); ++j) {
    if (vb.coeff(j).isZero()) continue;
    int denom = expE - 1 - j;
    if (denom <= 0) throw DomainError("density does not decay at infinity");
    integral += vb.coeff(j) / Rational(denom);
  }
  if (integral.isZero()) throw DomainError("degenerate density");
  Rational k = Rational(1) / integral;
  std::vector<Rational> scaled = num.coeffs();
  for (auto& c : scaled) c *= k;
  num = Polynomial(std::move(scaled));
  return k;
}

Density densityFromPolyFrac(Polynomial num, int expE) {
  Rational k = reduceAndNormalize(num, expE);

  std::vector<double> a = num.toDoubleCoeffs();
  const int d = num.degree();
  std::vector<double> arev(a.rbegin(), a.rend());

  // antiderivative in v = 1+x: sum_j b_j v^(j-E+1) / (j-E+1), evaluated
  // between 1 and 1+x; j-E+1 is negative throughout
  Polynomial vb = num.inOnePlusXBasis();
  std::vector<double> cdfCoeff(vb.degree() + 1, 0.0);
  for (int j = 0; j <= vb.degree(); ++j)
    cdfCoeff[j] = -(vb.coeff(j) / Rational(expE - 1 - j)).toDouble();

  const int e = expE;
  auto pdf = [a, arev, d, e](double lam) -> double {
    if (lam < 0) return 0.0;
    if (lam <= 1.0) {
      double num = 0.0;
      for (int k = d; k >= 0; --k) num = num * lam + a[k];
      return num / std::pow(1.0 + lam, e);
    }
    double inv = 1.0 / lam;
    double num = 0.0;
    for (int k = d; k >= 0; --k) num = num * inv + arev[k];
    return num * std::pow(lam / (1.0 + lam), d) * std::pow(1.0 + lam, d - e);
  };
  auto cdf = [cdfCoeff, e](double lam) -> double {
    if (lam <= 0) return 0.0;
    double u = 1.0 / (1.0 + lam);
    double s = 0.0;
    for (size_t j = 0; j < cdfCoeff.size(); ++j)
      s += cdfCoeff[j] * (std::pow(u, e - 1 - static_cast<int>(j)) - 1.0);
    return std::min(1.0, std::max(0.0, s));
  };
  return Density::fromParts(pdf, cdf, 0.0,
                            std::numeric_limits<double>::infinity(),
                            k.toDouble(), false);
}

// int_x^inf t^a (1+t)^(-T) dt as a PolyFrac over (1+x)^(T-1)
Polynomial upperTailNum(int a, int bigT) {
  Polynomial num;
  for (int k = 0; k <= a; ++k) {
    Rational c(BigInt::binomial(a, k), BigInt(bigT - 1 - k));
    if ((a - k) % 2 == 1) c = -c;
    num += c * Polynomial::onePlusXPow(k);
  }
  return num;
}

}  // namespace

FParams mapWishartParams(int m1, int m2, int n) {
  if (m1 < 1 || m2 < 1 || n < 1) throw DimensionError("bad antenna counts");
  if (m1 + m2 <= n)
    throw DimensionError("no shared streams when M1+M2 <= N");
  if (m1 >= n && m2 >= n) return {m1, m2, n};
  if (m1 >= n && m2 < n) return {m1 + m2 - n, n, m2};
  if (m1 < n && m2 >= n) return {n, m1 + m2 - n, m1};
  return {m1, m2, m1 + m2 - n};
}

Density Density::fromParts(std::function<double(double)> pdf,
                           std::function<double(double)> cdf, double lo,
                           double hi, double normalizer, bool sqrtEdges) {
  Density d;
  d.pdf_ = std::move(pdf);
  d.cdf_ = std::move(cdf);
  d.lo_ = lo;
  d.hi_ = hi;
  d.normalizer_ = normalizer;
  d.sqrtEdges_ = sqrtEdges;
  return d;
}

double Density::expect(const std::function<double(double)>& g,
                       const QuadratureOptions& opt) const {
  return expect(g, lo_, hi_, opt);
}

double Density::expect(const std::function<double(double)>& g, double a,
                       double b, const QuadratureOptions& opt) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  auto f = [&](double x) { return g(x) * pdf_(x); };
  if (sqrtEdges_) return integrateSqrtEdges(f, a, b, opt);
  if (std::isinf(b)) return integrateToInfinity(f, a, opt);
  return integrate(f, a, b, opt);
}

double Density::probBelow(double x) const { return cdf_(x); }

QuadratureRule Density::rule(double a, double b,
                             const QuadratureOptions& opt) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  QuadratureRule r;
  if (!(b > a)) return r;
  if (sqrtEdges_) {
    // build in the sin-substituted variable, then map nodes back
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto driver = [&](double t) {
      double x = mid + half * std::sin(t);
      return pdf_(x) * half * std::cos(t);
    };
    QuadratureRule tr = buildRule(driver, -0.5 * std::numbers::pi,
                                  0.5 * std::numbers::pi, opt);
    for (size_t i = 0; i < tr.nodes.size(); ++i) {
      double t = tr.nodes[i];
      double x = mid + half * std::sin(t);
      r.nodes.push_back(x);
      r.weights.push_back(tr.weights[i] * half * std::cos(t) * pdf_(x));
    }
    return r;
  }
  QuadratureRule base = std::isinf(b)
                            ? buildRuleToInfinity(pdf_, a, opt)
                            : buildRule(pdf_, a, b, opt);
  r.nodes = base.nodes;
  r.weights.resize(base.weights.size());
  for (size_t i = 0; i < base.nodes.size(); ++i)
    r.weights[i] = base.weights[i] * pdf_(base.nodes[i]);
  return r;
}

Density fMarginalPdf(int m1, int m2, int q) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (m1 < q || m2 < q) throw DomainError("need m1, m2 >= q");
  const int bigT = m1 + m2;
  Polynomial num;
  for (int m = 1; m <= q; ++m) {
    for (int n = 1; n <= q; ++n) {
      std::vector<std::vector<Rational>> xi(
          q - 1, std::vector<Rational>(q - 1, Rational(0)));
      for (int i = 1; i <= q - 1; ++i)
        for (int j = 1; j <= q - 1; ++j) {
          int al = alphaIdx(i, j, m, n);
          xi[i - 1][j - 1] = Rational::beta(m2 - q + al + 1, m1 + q - al - 1);
        }
      Rational det = detRational(std::move(xi));
      if (det.isZero()) continue;
      if ((m + n) % 2 == 1) det = -det;
      num += det * Polynomial::monomial(m + n - 2 + m2 - q);
    }
  }
  return densityFromPolyFrac(std::move(num), bigT);
}

Density fOrderedPdf(int l, int m1, int m2, int q) {
  if (q < 1 || l < 1 || l > q) throw DomainError("need 1 <= l <= q");
  if (m1 < q || m2 < q) throw DomainError("need m1, m2 >= q");
  if (q > 8 || m1 > 16 || m2 > 16)
    throw DomainError(
        "ordered pdf limited to q <= 8, m1, m2 <= 16 (cost grows factorially)");
  const int bigT = m1 + m2;

  // building blocks indexed by (v, w) in 1..q
  auto phiPower = [&](int v, int w) { return v + w - 2 + m2 - q; };
  std::vector<std::vector<Polynomial>> upper(q, std::vector<Polynomial>(q));
  for (int v = 1; v <= q; ++v)
    for (int w = 1; w <= q; ++w)
      upper[v - 1][w - 1] = upperTailNum(phiPower(v, w), bigT);

  // lower incomplete over the same denominator (1+x)^(T-1):
  // L(v, w) = B(c, T-c) * (1+x)^(T-1) - upper(c-1) with c = power + 1
  std::vector<std::vector<Polynomial>> lower(q, std::vector<Polynomial>(q));
  for (int v = 1; v <= q; ++v)
    for (int w = 1; w <= q; ++w) {
      int c = phiPower(v, w) + 1;
      lower[v - 1][w - 1] =
          Rational::beta(c, bigT - c) * Polynomial::onePlusXPow(bigT - 1) -
          upper[v - 1][w - 1];
    }

  // memoized determinant of the lower-entry matrix over complement index sets
  std::map<std::pair<std::uint32_t, std::uint32_t>, Polynomial> detMemo;
  auto restDet = [&](std::uint32_t vMask, std::uint32_t wMask) -> Polynomial {
    auto key = std::make_pair(vMask, wMask);
    auto it = detMemo.find(key);
    if (it != detMemo.end()) return it->second;
    std::vector<int> vs, ws;
    for (int i = 1; i <= q; ++i) {
      if (!(vMask & (1u << i))) vs.push_back(i);
      if (!(wMask & (1u << i))) ws.push_back(i);
    }
    std::vector<std::vector<Polynomial>> mat(vs.size(),
                                             std::vector<Polynomial>(ws.size()));
    for (size_t i = 0; i < vs.size(); ++i)
      for (size_t j = 0; j < ws.size(); ++j)
        mat[i][j] = lower[vs[i] - 1][ws[j] - 1];
    Polynomial det = PolyDet(std::move(mat)).value();
    detMemo.emplace(key, det);
    return det;
  };

  Polynomial total;

  // iterate over ascending value subsets V, injective w-sequences, and the
  // distinguished pdf slot; the positional sign matches the recurrence
  std::vector<int> vs(l), ws(l);
  std::vector<bool> wUsed(q + 1, false);

  std::function<void(int, int)> chooseV = [&](int start, int depth) {
    if (depth == l) {
      // enumerate w sequences
      std::function<void(int)> chooseW = [&](int d) {
        if (d == l) {
          // positional parity
          int parity = 0;
          for (int i = 0; i < l; ++i) parity += vs[i] - i;  // ascending picks
          std::vector<bool> seen(q + 1, false);
          for (int i = 0; i < l; ++i) {
            int pos = 0;
            for (int x = 1; x <= ws[i]; ++x)
              if (!seen[x]) ++pos;
            seen[ws[i]] = true;
            parity += pos;
          }
          std::uint32_t vMask = 0, wMask = 0;
          for (int i = 0; i < l; ++i) {
            vMask |= 1u << vs[i];
            wMask |= 1u << ws[i];
          }
          Polynomial rest = restDet(vMask, wMask);
          // prefix/suffix products of the upper-tail factors
          std::vector<Polynomial> pre(l + 1), suf(l + 1);
          pre[0] = Polynomial(Rational(1));
          for (int i = 0; i < l; ++i)
            pre[i + 1] = pre[i] * upper[vs[i] - 1][ws[i] - 1];
          suf[l] = Polynomial(Rational(1));
          for (int i = l - 1; i >= 0; --i)
            suf[i] = suf[i + 1] * upper[vs[i] - 1][ws[i] - 1];
          for (int t = 0; t < l; ++t) {
            Polynomial term = pre[t] * suf[t + 1] *
                              Polynomial::monomial(phiPower(vs[t], ws[t])) *
                              rest;
            if (parity % 2 == 0)
              total += term;
            else
              total -= term;
          }
          return;
        }
        for (int w = 1; w <= q; ++w) {
          if (wUsed[w]) continue;
          wUsed[w] = true;
          ws[d] = w;
          chooseW(d + 1);
          wUsed[w] = false;
        }
      };
      chooseW(0);
      return;
    }
    for (int v = start; v <= q; ++v) {
      vs[depth] = v;
      chooseV(v + 1, depth + 1);
    }
  };
  chooseV(1, 0);

  // common denominator: (l-1) uppers and (q-l) lower-det factors at T-1 each,
  // plus the pdf factor at T
  const int expE = (q - 1) * (bigT - 1) + bigT;
  return densityFromPolyFrac(std::move(total), expE);
}

Density wishartMarginalPdf(int p, int q) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (p < q) throw DomainError("need p >= q");
  const int maxPow = 2 * q - 2 + p - q;
  std::vector<Rational> coeff(maxPow + 1, Rational(0));
  for (int m = 1; m <= q; ++m) {
    for (int n = 1; n <= q; ++n) {
      std::vector<std::vector<Rational>> om(
          q - 1, std::vector<Rational>(q - 1, Rational(0)));
      for (int i = 1; i <= q - 1; ++i)
        for (int j = 1; j <= q - 1; ++j)
          om[i - 1][j - 1] =
              Rational(BigInt::factorial(alphaIdx(i, j, m, n) + p - q));
      Rational det = detRational(std::move(om));
      if (det.isZero()) continue;
      if ((m + n) % 2 == 1) det = -det;
      int a = n + m - 2 + p - q;
      // (q*lam)^a: fold the q^a factor into the coefficient
      Rational qa(1);
      for (int i = 0; i < a; ++i) qa *= Rational(q);
      coeff[a] += det * qa;
    }
  }
  // normalize: int lam^a exp(-q lam) = a! / q^(a+1)
  Rational integral(0);
  for (int a = 0; a <= maxPow; ++a) {
    if (coeff[a].isZero()) continue;
    Rational qa1(1);
    for (int i = 0; i < a + 1; ++i) qa1 *= Rational(q);
    integral += coeff[a] * Rational(BigInt::factorial(a)) / qa1;
  }
  if (integral.isZero()) throw DomainError("degenerate Wishart density");
  Rational k = Rational(1) / integral;
  std::vector<double> c(maxPow + 1);
  std::vector<double> mass(maxPow + 1);  // normalized mass of each term
  for (int a = 0; a <= maxPow; ++a) {
    coeff[a] *= k;
    c[a] = coeff[a].toDouble();
    Rational qa1(1);
    for (int i = 0; i < a + 1; ++i) qa1 *= Rational(q);
    mass[a] = (coeff[a] * Rational(BigInt::factorial(a)) / qa1).toDouble();
  }
  const int qq = q;
  auto pdf = [c, qq](double lam) -> double {
    if (lam < 0) return 0.0;
    double ql = qq * lam;
    if (ql > 740.0) return 0.0;
    double poly = 0.0;
    for (size_t a = c.size(); a-- > 0;) poly = poly * lam + c[a];
    return poly * std::exp(-ql);
  };
  auto cdf = [mass, qq](double lam) -> double {
    if (lam <= 0) return 0.0;
    double ql = qq * lam;
    double s = 0.0;
    double term = (ql > 740.0) ? 0.0 : std::exp(-ql);  // e^{-ql} (ql)^j / j!
    double tail = term;                                // sum_{j<=a} ...
    for (size_t a = 0; a < mass.size(); ++a) {
      if (a > 0) {
        term *= ql / static_cast<double>(a);
        tail += term;
      }
      s += mass[a] * (1.0 - tail);
    }
    return std::min(1.0, std::max(0.0, s));
  };
  return Density::fromParts(pdf, cdf, 0.0,
                            std::numeric_limits<double>::infinity(),
                            k.toDouble(), false);
}

Density fMarginalAsymptotic(double rho1, double rho2) {
  if (!(rho1 > 0.0) || rho1 >= 1.0)
    throw DomainError("asymptotic F density needs 0 < rho1 < 1");
  if (!(rho2 > 0.0) || rho2 > 1.0)
    throw DomainError("asymptotic F density needs 0 < rho2 <= 1");
  // support edges of the Wachter-type law; only the squared form (1 -+ h)^2
  // normalizes the density below and encloses sampled spectra
  const double disc = std::sqrt(1.0 - (1.0 - rho1) * (1.0 - rho2));
  const double base = rho1 / (rho2 * (1.0 - rho1) * (1.0 - rho1));
  const double lf = base * (1.0 - disc) * (1.0 - disc);
  const double uf = base * (1.0 + disc) * (1.0 + disc);
  const double scale = (1.0 - rho1) / (2.0 * std::numbers::pi * rho1);
  auto pdf = [lf, uf, scale](double lam) -> double {
    if (lam <= lf || lam >= uf) return 0.0;
    return scale * std::sqrt((lam - lf) * (uf - lam)) / (lam * (lam + 1.0));
  };
  auto cdf = [pdf, lf, uf](double x) -> double {
    if (x <= lf) return 0.0;
    if (x >= uf) return 1.0;
    return integrateSqrtEdges(pdf, lf, x);
  };
  return Density::fromParts(pdf, cdf, lf, uf, scale, true);
}

Density wishartMarginalAsymptotic(double xi, double p) {
  if (!(xi > 0.0) || xi > 1.0)
    throw DomainError("asymptotic Wishart density needs 0 < xi <= 1");
  if (!(p > 0.0)) throw DomainError("p must be positive");
  const double sq = std::sqrt(xi);
  const double lw = p * (1.0 - sq) * (1.0 - sq);
  const double uw = p * (1.0 + sq) * (1.0 + sq);
  const double scale = 1.0 / (2.0 * std::numbers::pi * xi * p);
  auto pdf = [lw, uw, scale](double lam) -> double {
    if (lam <= lw || lam >= uw || lam <= 0.0) return 0.0;
    return scale * std::sqrt((lam - lw) * (uw - lam)) / lam;
  };
  auto cdf = [pdf, lw, uw](double x) -> double {
    if (x <= lw) return 0.0;
    if (x >= uw) return 1.0;
    return integrateSqrtEdges(pdf, lw, x);
  };
  return Density::fromParts(pdf, cdf, lw, uw, scale, true);
}

std::vector<VectorXd> sampleFEigenvalues(int m1, int m2, int q, int trials,
                                         std::uint64_t seed) {
  if (m1 < q || m2 < q) throw DomainError("need m1, m2 >= q");
  std::vector<VectorXd> out;
  out.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    MatrixXcd g1 = rng.gaussianMatrix(q, m1);
    MatrixXcd g2 = rng.gaussianMatrix(q, m2);
    MatrixXcd w1 = g1 * g1.adjoint();
    MatrixXcd w2 = g2 * g2.adjoint();
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(w2, w1);
    out.push_back(es.eigenvalues().reverse());
  }
  return out;
}

std::vector<VectorXd> sampleWishartEigenvalues(int p, int q, int trials,
                                               std::uint64_t seed) {
  if (p < q) throw DomainError("need p >= q");
  std::vector<VectorXd> out;
  out.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    MatrixXcd g = rng.gaussianMatrix(q, p);
    MatrixXcd w = (g * g.adjoint()) / static_cast<double>(q);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(w);
    out.push_back(es.eigenvalues().reverse());
  }
  return out;
}

double ksDistance(const Density& d, std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = d.cdf(samples[i]);
    ks = std::max(ks, std::abs((i + 1) / n - f));
    ks = std::max(ks, std::abs(i / n - f));
  }
  return ks;
}

}  // namespace uasd
