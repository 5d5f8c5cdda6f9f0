#include "uasd/diagonalize.hpp"

namespace uasd {

double uasdResidual(const MatrixXcd& h1, const MatrixXcd& h2,
                    const UasdDecomposition& dec) {
  const DerivedDims& d = dec.dims;
  const int m1 = h1.rows(), m2 = h2.rows();
  MatrixXcd e1 = dec.q1 * h1 * dec.z;
  MatrixXcd e2 = dec.q2 * h2 * dec.z;
  MatrixXcd p1 = MatrixXcd::Zero(m1, d.l);
  MatrixXcd p2 = MatrixXcd::Zero(m2, d.l);
  for (int i = 0; i < d.m; ++i) p1(i, i) = dec.sigma1(i);
  for (int i = 0; i < d.mbar1; ++i) p1(d.m + i, d.m + i) = dec.d1(i);
  if (d.m > 0 && d.mbar2 > 0) p2.block(0, 0, d.mbar2, d.m) = dec.t;
  for (int i = 0; i < d.mbar2; ++i) p2(i, d.m + d.mbar1 + i) = dec.d2(i);
  for (int i = 0; i < d.m; ++i) p2(d.mbar2 + i, i) = dec.sigma2(i);
  double res = std::max((e1 - p1).cwiseAbs().maxCoeff(),
                        (e2 - p2).cwiseAbs().maxCoeff());
  res = std::max(res, (dec.q1.adjoint() * dec.q1 -
                       MatrixXcd::Identity(m1, m1)).cwiseAbs().maxCoeff());
  res = std::max(res, (dec.q2.adjoint() * dec.q2 -
                       MatrixXcd::Identity(m2, m2)).cwiseAbs().maxCoeff());
  for (int i = 0; i < d.m; ++i)
    res = std::max(res, std::abs(dec.sigma1(i) * dec.sigma1(i) +
                                 dec.sigma2(i) * dec.sigma2(i) - 1.0));
  return res;
}

double gsvdResidual(const MatrixXcd& h1, const MatrixXcd& h2,
                    const GsvdDecomposition& dec) {
  const DerivedDims& d = dec.dims;
  const int m1 = h1.rows(), m2 = h2.rows();
  double res = (dec.q1 * h1 * dec.z - dec.c).cwiseAbs().maxCoeff();
  res = std::max(res, (dec.q2 * h2 * dec.z - dec.s).cwiseAbs().maxCoeff());
  res = std::max(res,
                 (dec.c.adjoint() * dec.c + dec.s.adjoint() * dec.s -
                  MatrixXcd::Identity(d.l, d.l)).cwiseAbs().maxCoeff());
  res = std::max(res, (dec.q1.adjoint() * dec.q1 -
                       MatrixXcd::Identity(m1, m1)).cwiseAbs().maxCoeff());
  res = std::max(res, (dec.q2.adjoint() * dec.q2 -
                       MatrixXcd::Identity(m2, m2)).cwiseAbs().maxCoeff());
  // block pattern of C and S
  MatrixXcd cp = dec.c, sp = dec.s;
  for (int i = 0; i < d.m; ++i) cp(i, d.mbar2 + i) = 0.0;
  for (int i = 0; i < d.mbar1; ++i) cp(d.m + i, d.mbar2 + d.m + i) -= 1.0;
  for (int i = 0; i < d.mbar2; ++i) sp(i, i) -= 1.0;
  for (int i = 0; i < d.m; ++i) sp(d.mbar2 + i, d.mbar2 + i) = 0.0;
  res = std::max(res, cp.cwiseAbs().maxCoeff());
  res = std::max(res, sp.cwiseAbs().maxCoeff());
  return res;
}

VectorXd squaredGsvsFromPencil(const MatrixXcd& h1, const MatrixXcd& h2) {
  const int n = h1.cols();
  DerivedDims d = deriveDims(h1.rows(), h2.rows(), n);
  MatrixXcd x = h1.adjoint() * h1;
  MatrixXcd y = h2.adjoint() * h2;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> es(y, x + y);
  // ascending s in [0, 1]: mbar1 zeros, M interior values, mbar2 ones
  VectorXd s = es.eigenvalues();
  VectorXd lambda(d.m);
  for (int i = 0; i < d.m; ++i) {
    double v = s(d.mbar1 + d.m - 1 - i);
    lambda(i) = v / (1.0 - v);
  }
  return lambda;
}

}  // namespace uasd
