#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace uasd {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// GSVD precoding needs M1+M2 != N; at equality the average transmit power diverges.
struct InfinitePowerError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Downlink two-user scenario. Powers are linear watts; path losses are the
/// dimensionless Pi_k = d_k^2 with user 1 the far user (Pi1 > Pi2).
struct SystemConfig {
  int n = 0;         ///< BS antennas
  int m1 = 0;        ///< user-1 antennas
  int m2 = 0;        ///< user-2 antennas
  double pi1 = 0.0;  ///< user-1 path loss
  double pi2 = 0.0;  ///< user-2 path loss
  double sigma2 = 0.0;  ///< noise power [W]
  double pmax = 0.0;    ///< transmit power budget [W]

  void validate() const {
    if (n < 1 || m1 < 1 || m2 < 1) throw ConfigError("antenna counts must be >= 1");
    if (!(pi1 > pi2) || !(pi2 > 0.0)) throw ConfigError("need Pi1 > Pi2 > 0");
    if (!(sigma2 > 0.0)) throw ConfigError("need sigma2 > 0");
    if (!(pmax > 0.0)) throw ConfigError("need Pmax > 0");
  }

  double pathLossRatio() const { return pi1 / pi2; }
};

/// Stream partition induced by (M1, M2, N): L = M + Mbar1 + Mbar2 always.
struct DerivedDims {
  int l = 0;      ///< symbol vector length, min{M1+M2, N}
  int mbar1 = 0;  ///< user-1 private streams
  int mbar2 = 0;  ///< user-2 private streams
  int m = 0;      ///< shared SISO-NOMA streams
};

/// One small-scale fading draw; path loss is applied separately as 1/sqrt(Pi_k).
struct ChannelPair {
  MatrixXcd h1;  ///< M1 x N
  MatrixXcd h2;  ///< M2 x N
};

enum class PowerMode { Epa, Upa };

/// EPA: per-symbol power P split as P1+P2 = P on shared streams, full P on
/// private streams. UPA: per-stream shared powers plus scalar private powers.
struct PowerAllocation {
  PowerMode mode = PowerMode::Epa;

  // EPA
  double p = 0.0;
  double p1_share = 0.0;
  double p2_share = 0.0;

  // UPA
  double p1 = 0.0;  ///< power of each user-1 private stream
  double p2 = 0.0;  ///< power of each user-2 private stream
  std::vector<double> p1l;  ///< user-1 shared-stream powers, size M
  std::vector<double> p2l;  ///< user-2 shared-stream powers, size M

  static PowerAllocation epa(double p, double p1, double p2) {
    if (p1 < 0 || p2 < 0) throw DomainError("EPA powers must be nonnegative");
    if (std::abs(p1 + p2 - p) > 1e-12 * std::max(1.0, p))
      throw DomainError("EPA split must satisfy P1 + P2 = P");
    PowerAllocation a;
    a.mode = PowerMode::Epa;
    a.p = p;
    a.p1_share = p1;
    a.p2_share = p2;
    return a;
  }

  static PowerAllocation upa(double p1, double p2, std::vector<double> p1l,
                             std::vector<double> p2l) {
    if (p1l.size() != p2l.size()) throw DimensionError("p1l/p2l size mismatch");
    PowerAllocation a;
    a.mode = PowerMode::Upa;
    a.p1 = p1;
    a.p2 = p2;
    a.p1l = std::move(p1l);
    a.p2l = std::move(p2l);
    for (double v : a.p1l)
      if (v < 0) throw DomainError("negative stream power");
    for (double v : a.p2l)
      if (v < 0) throw DomainError("negative stream power");
    if (a.p1 < 0 || a.p2 < 0) throw DomainError("negative private power");
    return a;
  }

  /// Per-stream power vectors of length L in the column order
  /// [shared | user-1 private | user-2 private], with the zero-power
  /// constraints on the cross entries enforced.
  void perStream(const DerivedDims& d, VectorXd& q1, VectorXd& q2) const {
    q1 = VectorXd::Zero(d.l);
    q2 = VectorXd::Zero(d.l);
    if (mode == PowerMode::Epa) {
      for (int i = 0; i < d.m; ++i) {
        q1(i) = p1_share;
        q2(i) = p2_share;
      }
      for (int i = 0; i < d.mbar1; ++i) q1(d.m + i) = p;
      for (int i = 0; i < d.mbar2; ++i) q2(d.m + d.mbar1 + i) = p;
    } else {
      if (static_cast<int>(p1l.size()) != d.m)
        throw DimensionError("UPA shared powers must have length M");
      for (int i = 0; i < d.m; ++i) {
        q1(i) = p1l[i];
        q2(i) = p2l[i];
      }
      for (int i = 0; i < d.mbar1; ++i) q1(d.m + i) = p1;
      for (int i = 0; i < d.mbar2; ++i) q2(d.m + d.mbar1 + i) = p2;
    }
  }
};

}  // namespace uasd
