#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "uasd/system_model.hpp"
#include "uasd/types.hpp"

namespace uasd {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealVectorX =
    Eigen::Matrix<typename Eigen::NumTraits<Scalar>::Real, Eigen::Dynamic, 1>;

/// Factors of Q1 H1 Z = [Sigma1 0 0; 0 D1 0], Q2 H2 Z = [T 0 D2; Sigma2 0 0].
/// Columns of Z are ordered [shared | user-1 private | user-2 private];
/// diagonals are real nonnegative, shared gains sorted by descending GSV.
template <typename Scalar>
struct UasdDecompositionT {
  MatrixX<Scalar> q1;  ///< M1 x M1 unitary detection matrix
  MatrixX<Scalar> q2;  ///< M2 x M2 unitary detection matrix
  MatrixX<Scalar> z;   ///< N x L precoder
  MatrixX<Scalar> t;   ///< Mbar2 x M self-interference coupling
  RealVectorX<Scalar> sigma1;  ///< shared gains at user 1, 1/sqrt(1+lambda_l)
  RealVectorX<Scalar> sigma2;  ///< shared gains at user 2, mu_l/sqrt(1+lambda_l)
  RealVectorX<Scalar> d1;      ///< user-1 private gains
  RealVectorX<Scalar> d2;      ///< user-2 private gains
  DerivedDims dims;
};

/// Factors of Q1 H1 Z = C, Q2 H2 Z = S with C^H C + S^H S = I_L and the
/// column order [user-2 private | shared | user-1 private].
template <typename Scalar>
struct GsvdDecompositionT {
  MatrixX<Scalar> q1;
  MatrixX<Scalar> q2;
  MatrixX<Scalar> z;
  MatrixX<Scalar> c;  ///< M1 x L
  MatrixX<Scalar> s;  ///< M2 x L
  RealVectorX<Scalar> c1;  ///< shared-block cosines, descending GSV order
  RealVectorX<Scalar> s1;  ///< paired sines, c1^2 + s1^2 = 1
  DerivedDims dims;
};

template <typename Scalar>
struct BdDecompositionT {
  MatrixX<Scalar> q1;
  MatrixX<Scalar> q2;
  MatrixX<Scalar> p;  ///< N x L precoder, column blocks scaled orthonormal
  RealVectorX<Scalar> sigma1;  ///< user-1 diagonal, M1 values
  RealVectorX<Scalar> sigma2;  ///< user-2 diagonal, M2 values
};

namespace detail {

template <typename Scalar>
void requireWellPosed(const MatrixX<Scalar>& a, const char* what) {
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
  const auto& s = svd.singularValues();
  int r = static_cast<int>(std::min(a.rows(), a.cols()));
  if (s(r - 1) < 1e-10 * s(0))
    throw RankDeficientError(std::string(what) +
                             ": ill-conditioned beyond 1e-10");
}

/// Orthonormal basis of null(a), dimension cols - rank. Numerical rank uses
/// the 1e-12 relative singular-value threshold.
template <typename Scalar>
MatrixX<Scalar> nullBasis(const MatrixX<Scalar>& a, int want) {
  if (want <= 0) return MatrixX<Scalar>(a.cols(), 0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * s(0)) ++rank;
  if (static_cast<int>(a.cols()) - rank < want)
    throw RankDeficientError("null space smaller than expected");
  return svd.matrixV().rightCols(want);
}

}  // namespace detail

/// Joint zero forcing: P = pinv([H1; H2]); needs M1 + M2 <= N.
template <typename Scalar>
MatrixX<Scalar> jzfDecompose(const MatrixX<Scalar>& h1,
                             const MatrixX<Scalar>& h2) {
  const int m1 = h1.rows(), m2 = h2.rows(), n = h1.cols();
  if (h2.cols() != n) throw DimensionError("channel column mismatch");
  if (m1 + m2 > n) throw DimensionError("JZF needs M1 + M2 <= N");
  MatrixX<Scalar> h(m1 + m2, n);
  h << h1, h2;
  detail::requireWellPosed(h, "JZF stacked channel");
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(
      h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixV() *
         svd.singularValues().cwiseInverse().asDiagonal() *
         svd.matrixU().adjoint();
}

/// Block diagonalization; needs M1 + M2 <= N.
template <typename Scalar>
BdDecompositionT<Scalar> bdDecompose(const MatrixX<Scalar>& h1,
                                     const MatrixX<Scalar>& h2) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const int m1 = h1.rows(), m2 = h2.rows(), n = h1.cols();
  if (h2.cols() != n) throw DimensionError("channel column mismatch");
  if (m1 + m2 > n) throw DimensionError("BD needs M1 + M2 <= N");
  MatrixX<Scalar> hb1 = detail::nullBasis(h1, n - m1).leftCols(m2);  // N x M2
  MatrixX<Scalar> hb2 = detail::nullBasis(h2, n - m2).leftCols(m1);  // N x M1
  MatrixX<Scalar> a1 = h1 * hb2 / std::sqrt(Real(m1));
  MatrixX<Scalar> a2 = h2 * hb1 / std::sqrt(Real(m2));
  detail::requireWellPosed(a1, "BD user-1 block");
  detail::requireWellPosed(a2, "BD user-2 block");
  Eigen::JacobiSVD<MatrixX<Scalar>> s1(
      a1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::JacobiSVD<MatrixX<Scalar>> s2(
      a2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  BdDecompositionT<Scalar> bd;
  bd.q1 = s1.matrixU().adjoint();
  bd.q2 = s2.matrixU().adjoint();
  bd.p = MatrixX<Scalar>(n, m1 + m2);
  bd.p << hb2 * s1.matrixV() / std::sqrt(Real(m1)),
      hb1 * s2.matrixV() / std::sqrt(Real(m2));
  bd.sigma1 = s1.singularValues();
  bd.sigma2 = s2.singularValues();
  return bd;
}

/// The user-assisted simultaneous diagonalization.
/// For M1 + M2 <= N this degenerates to the BD factors (Sigma/T empty).
template <typename Scalar>
UasdDecompositionT<Scalar> uasdDecompose(const MatrixX<Scalar>& h1,
                                         const MatrixX<Scalar>& h2) {
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  const int m1 = h1.rows(), m2 = h2.rows(), n = h1.cols();
  if (h2.cols() != n) throw DimensionError("channel column mismatch");
  const DerivedDims dims = deriveDims(m1, m2, n);
  UasdDecompositionT<Scalar> u;
  u.dims = dims;

  if (m1 + m2 <= n) {
    BdDecompositionT<Scalar> bd = bdDecompose(h1, h2);
    u.q1 = std::move(bd.q1);
    u.q2 = std::move(bd.q2);
    u.z = std::move(bd.p);
    u.t = MatrixX<Scalar>(dims.mbar2, 0);
    u.sigma1.resize(0);
    u.sigma2.resize(0);
    u.d1 = std::move(bd.sigma1);
    u.d2 = std::move(bd.sigma2);
    return u;
  }

  const int mbar1 = dims.mbar1, mbar2 = dims.mbar2, m = dims.m;
  MatrixX<Scalar> hb1 = detail::nullBasis(h1, mbar2);  // N x Mbar2, null(H1)
  MatrixX<Scalar> hb2 = detail::nullBasis(h2, mbar1);  // N x Mbar1, null(H2)

  // K: orthonormal complement of span[Hb1 Hb2], the shared signal space
  MatrixX<Scalar> k;
  if (mbar1 + mbar2 == 0) {
    k = MatrixX<Scalar>::Identity(n, n);
  } else {
    MatrixX<Scalar> b(n, mbar1 + mbar2);
    if (mbar2 > 0) b.leftCols(mbar2) = hb1;
    if (mbar1 > 0) b.rightCols(mbar1) = hb2;
    Eigen::JacobiSVD<MatrixX<Scalar>> sb(b, Eigen::ComputeFullU);
    k = sb.matrixU().rightCols(m);
  }

  const int r = m + mbar1;
  MatrixX<Scalar> j(n, r);
  j.leftCols(m) = k;
  if (mbar1 > 0) j.rightCols(mbar1) = hb2;

  // force H1 [K Hb2] to the identity
  MatrixX<Scalar> ht1 = h1 * j;
  detail::requireWellPosed(ht1, "UA-SD user-1 aligned channel");
  Eigen::JacobiSVD<MatrixX<Scalar>> s1(
      ht1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  MatrixX<Scalar> u1 = s1.matrixU();
  MatrixX<Scalar> w1 = s1.matrixV().leftCols(r) *
                       s1.singularValues().head(r).cwiseInverse().asDiagonal();

  // user-2 private block
  MatrixX<Scalar> u2 = MatrixX<Scalar>::Identity(m2, m2);
  MatrixX<Scalar> v2;
  u.d2.resize(mbar2);
  if (mbar2 > 0) {
    MatrixX<Scalar> hh2 = h2 * hb1;
    Eigen::JacobiSVD<MatrixX<Scalar>> s2(
        hh2, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u2 = s2.matrixU();
    v2 = s2.matrixV();
    u.d2 = s2.singularValues().head(mbar2) / std::sqrt(Real(mbar2));
  }

  // zero out the user-1 private columns seen by user 2, then diagonalize
  MatrixX<Scalar> ht2 = u2.adjoint() * h2 * j * w1;
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(ht2.adjoint());
  MatrixX<Scalar> q = qr.householderQ();
  MatrixX<Scalar> g = ht2 * q;

  MatrixX<Scalar> a3 = g.topLeftCorner(mbar2, m);
  MatrixX<Scalar> b3 = g.block(mbar2, 0, m2 - mbar2, m);
  Eigen::JacobiSVD<MatrixX<Scalar>> s3(
      b3, Eigen::ComputeFullU | Eigen::ComputeFullV);
  MatrixX<Scalar> u3 = s3.matrixU();
  MatrixX<Scalar> v3 = s3.matrixV();
  RealVectorX<Scalar> mu = s3.singularValues().head(m);

  // the squared singular values of B3 are the squared GSVs lambda_l
  RealVectorX<Scalar> lambda = mu.array().square();
  u.sigma1 = (Real(1) + lambda.array()).rsqrt();
  u.sigma2 = mu.array() * u.sigma1.array();

  MatrixX<Scalar> blk = MatrixX<Scalar>::Identity(r, r);
  blk.topLeftCorner(m, m) = v3;
  MatrixX<Scalar> scale = MatrixX<Scalar>::Identity(r, r);
  scale.topLeftCorner(m, m) =
      u.sigma1.template cast<Scalar>().asDiagonal();

  u.z = MatrixX<Scalar>(n, dims.l);
  u.z.leftCols(r) = j * w1 * q * blk * scale;
  if (mbar2 > 0) u.z.rightCols(mbar2) = hb1 * v2 / std::sqrt(Real(mbar2));

  u.q1 = MatrixX<Scalar>::Zero(m1, m1);
  u.q1.topLeftCorner(r, r) = blk.adjoint() * q.adjoint();
  if (m1 > r)
    u.q1.bottomRightCorner(m1 - r, m1 - r).setIdentity();
  u.q1 = u.q1 * u1.adjoint();

  u.q2 = MatrixX<Scalar>::Identity(m2, m2);
  u.q2.bottomRightCorner(m2 - mbar2, m2 - mbar2) = u3.adjoint();
  u.q2 = u.q2 * u2.adjoint();

  u.t = a3 * v3 * u.sigma1.template cast<Scalar>().asDiagonal();
  u.d1 = RealVectorX<Scalar>::Ones(mbar1);
  return u;
}

/// GSVD via the stacked SVD and a CS decomposition of its upper block.
template <typename Scalar>
GsvdDecompositionT<Scalar> gsvdDecompose(const MatrixX<Scalar>& h1,
                                         const MatrixX<Scalar>& h2) {
  const int m1 = h1.rows(), m2 = h2.rows(), n = h1.cols();
  if (h2.cols() != n) throw DimensionError("channel column mismatch");
  const DerivedDims dims = deriveDims(m1, m2, n);
  const int l = dims.l, m = dims.m, mbar1 = dims.mbar1, mbar2 = dims.mbar2;

  MatrixX<Scalar> h(m1 + m2, n);
  h << h1, h2;
  detail::requireWellPosed(h, "GSVD stacked channel");
  Eigen::JacobiSVD<MatrixX<Scalar>> sh(
      h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  MatrixX<Scalar> uu = sh.matrixU().leftCols(l);
  MatrixX<Scalar> vv = sh.matrixV().leftCols(l);
  VectorX<Scalar> inv =
      sh.singularValues().head(l).cwiseInverse().template cast<Scalar>();
  MatrixX<Scalar> u1 = uu.topRows(m1);
  MatrixX<Scalar> u2 = uu.bottomRows(m2);

  // CS step: singular values of U1 split as Mbar1 ones, M cosines, the rest
  // of W spanning null(U1)
  Eigen::JacobiSVD<MatrixX<Scalar>> s1(
      u1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  MatrixX<Scalar> a1 = s1.matrixU();
  MatrixX<Scalar> b1 = s1.matrixV();

  GsvdDecompositionT<Scalar> dec;
  dec.dims = dims;
  MatrixX<Scalar> w(l, l);
  w.leftCols(mbar2) = b1.rightCols(mbar2);
  w.block(0, mbar2, l, m) = b1.block(0, mbar1, l, m);
  w.rightCols(mbar1) = b1.leftCols(mbar1);

  dec.c1 = s1.singularValues().segment(mbar1, m);
  dec.s1 = (1.0 - dec.c1.array().square()).max(0.0).sqrt();

  dec.q1 = MatrixX<Scalar>::Zero(m1, m1);
  for (int i = 0; i < m; ++i) dec.q1.row(i) = a1.col(mbar1 + i).adjoint();
  for (int i = 0; i < mbar1; ++i) dec.q1.row(m + i) = a1.col(i).adjoint();
  for (int i = m + mbar1; i < m1; ++i) dec.q1.row(i) = a1.col(i).adjoint();

  // user-2 side: U2 W has orthogonal columns with norms [1.. s1 .. 0];
  // orthonormalize the nonzero block by QR and fix phases
  MatrixX<Scalar> g = u2 * w;
  const int nz = mbar2 + m;
  MatrixX<Scalar> q2full;
  if (nz > 0) {
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(g.leftCols(nz));
    q2full = qr.householderQ();
    MatrixX<Scalar> rr =
        q2full.leftCols(nz).adjoint() * g.leftCols(nz);
    for (int i = 0; i < nz; ++i) {
      Scalar d = rr(i, i);
      auto mag = std::abs(d);
      if (mag > 1e-14) q2full.col(i) *= d / mag;
    }
  } else {
    q2full = MatrixX<Scalar>::Identity(m2, m2);
  }
  dec.q2 = q2full.adjoint();

  dec.z = vv * inv.asDiagonal() * w;
  dec.c = dec.q1 * h1 * dec.z;
  dec.s = dec.q2 * h2 * dec.z;
  return dec;
}

/// Subtracts the reconstructed self-interference T * shat from the first
/// Mbar2 entries of y2; shat holds the composite shared symbols.
template <typename Scalar>
VectorX<Scalar> cancelSelfInterference(const VectorX<Scalar>& y2,
                                       const UasdDecompositionT<Scalar>& dec,
                                       const VectorX<Scalar>& shat,
                                       double pi2) {
  const int mbar2 = dec.dims.mbar2, m = dec.dims.m;
  if (y2.size() != dec.q2.rows()) throw DimensionError("y2 length mismatch");
  if (shat.size() != m) throw DimensionError("shat must hold M symbols");
  VectorX<Scalar> out = y2;
  if (m > 0 && mbar2 > 0)
    out.head(mbar2) -= (dec.t * shat) / std::sqrt(pi2);
  return out;
}

using UasdDecomposition = UasdDecompositionT<Complex>;
using GsvdDecomposition = GsvdDecompositionT<Complex>;
using BdDecomposition = BdDecompositionT<Complex>;

/// Largest-magnitude deviation of Q1 H1 Z / Q2 H2 Z from the UA-SD block
/// pattern, including unitarity of the detection matrices.
double uasdResidual(const MatrixXcd& h1, const MatrixXcd& h2,
                    const UasdDecomposition& dec);

/// Same for the GSVD factors against the C/S block pattern.
double gsvdResidual(const MatrixXcd& h1, const MatrixXcd& h2,
                    const GsvdDecomposition& dec);

/// Squared GSVs of (H2, H1), descending: the implementation-independent
/// deflated pencil (Y, X + Y) restricted to eigenvalues inside (0, 1).
VectorXd squaredGsvsFromPencil(const MatrixXcd& h1, const MatrixXcd& h2);

}  // namespace uasd
