#include "uasd/system_model.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uasd/rng.hpp"

namespace uasd {

DerivedDims deriveDims(int m1, int m2, int n) {
  if (m1 < 1 || m2 < 1 || n < 1) throw ConfigError("antenna counts must be >= 1");
  DerivedDims d;
  d.l = std::min(m1 + m2, n);
  d.mbar1 = std::min(m1, std::max(0, n - m2));
  d.mbar2 = std::min(m2, std::max(0, n - m1));
  d.m = (m1 + m2 > n) ? n - d.mbar1 - d.mbar2 : 0;
  return d;
}

DerivedDims deriveDims(const SystemConfig& cfg) {
  cfg.validate();
  return deriveDims(cfg.m1, cfg.m2, cfg.n);
}

namespace {

bool wellConditioned(const MatrixXcd& h1, const MatrixXcd& h2) {
  auto ok = [](const MatrixXcd& h) {
    Eigen::JacobiSVD<MatrixXcd> svd(h);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) >= 1e-12 * s(0);
  };
  MatrixXcd stacked(h1.rows() + h2.rows(), h1.cols());
  stacked << h1, h2;
  return ok(h1) && ok(h2) && ok(stacked);
}

}  // namespace

ChannelPair sampleChannel(const SystemConfig& cfg, std::uint64_t seed,
                          std::uint64_t trial) {
  cfg.validate();
  CounterRng rng(seed, trial);
  ChannelPair ch;
  for (int attempt = 0; attempt < 64; ++attempt) {
    ch.h1 = rng.gaussianMatrix(cfg.m1, cfg.n);
    ch.h2 = rng.gaussianMatrix(cfg.m2, cfg.n);
    if (wellConditioned(ch.h1, ch.h2)) return ch;
  }
  throw RankDeficientError("channel sampling kept hitting the rank guard");
}

double transmitPowerGsvd(double p, const SystemConfig& cfg) {
  cfg.validate();
  if (cfg.m1 + cfg.m2 == cfg.n)
    throw InfinitePowerError(
        "GSVD transmit power is infinite when M1+M2 == N");
  DerivedDims d = deriveDims(cfg);
  return p * d.l / std::abs(static_cast<double>(cfg.m1 + cfg.m2 - cfg.n));
}

double transmitPowerEpa(double p, const SystemConfig& cfg) {
  cfg.validate();
  const int m1 = cfg.m1, m2 = cfg.m2, n = cfg.n;
  if (m1 + m2 <= n) return 2.0 * p;
  if (m1 >= n) return p * n / static_cast<double>(m1 + m2 - n);
  DerivedDims d = deriveDims(cfg);
  return p * (static_cast<double>(m1) / n +
              static_cast<double>(d.mbar1) / d.m + 1.0);
}

double transmitPowerUpa(const PowerAllocation& alloc, const SystemConfig& cfg) {
  cfg.validate();
  if (alloc.mode != PowerMode::Upa)
    throw DomainError("transmitPowerUpa needs a UPA allocation");
  const int m1 = cfg.m1, m2 = cfg.m2, n = cfg.n;
  DerivedDims d = deriveDims(cfg);
  if (m1 + m2 <= n) return alloc.p1 + alloc.p2;
  if (static_cast<int>(alloc.p1l.size()) != d.m)
    throw DimensionError("UPA shared powers must have length M");
  double shared = 0.0;
  for (int l = 0; l < d.m; ++l) shared += alloc.p1l[l] + alloc.p2l[l];
  if (m1 >= n) {
    const double den = m1 + m2 - n;
    return (shared + alloc.p1 * d.mbar1 + alloc.p2 * d.mbar2) / den;
  }
  return static_cast<double>(m1) / (n * d.m) * shared +
         alloc.p1 * d.mbar1 / d.m + alloc.p2;
}

double epaSymbolPower(const SystemConfig& cfg) {
  return cfg.pmax / transmitPowerEpa(1.0, cfg);
}

double dbmToWatt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double wattToDbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

Scenario parseScenario(std::istream& in) {
  Scenario sc;
  double d1 = 0, d2 = 0, sigma2Dbm = 0, pmaxDbm = 0;
  bool haveD1 = false, haveD2 = false, haveSigma = false, havePmax = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string key, eq, value;
    std::istringstream ls(line);
    if (!(ls >> key)) continue;
    ls >> eq;
    if (eq != "=") throw ConfigError("scenario line " + std::to_string(lineno) +
                                     ": expected `key = value`");
    if (!(ls >> value))
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": missing value");
    try {
      if (key == "N") sc.config.n = std::stoi(value);
      else if (key == "M1") sc.config.m1 = std::stoi(value);
      else if (key == "M2") sc.config.m2 = std::stoi(value);
      else if (key == "d1_m") { d1 = std::stod(value); haveD1 = true; }
      else if (key == "d2_m") { d2 = std::stod(value); haveD2 = true; }
      else if (key == "sigma2_dbm") { sigma2Dbm = std::stod(value); haveSigma = true; }
      else if (key == "pmax_dbm") { pmaxDbm = std::stod(value); havePmax = true; }
      else if (key == "seed") sc.seed = std::stoull(value);
      else if (key == "trials") sc.trials = std::stoi(value);
      else throw ConfigError("unknown scenario key `" + key + "`");
    } catch (const std::invalid_argument&) {
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": bad value for `" + key + "`");
    }
  }
  if (!haveD1 || !haveD2 || !haveSigma || !havePmax)
    throw ConfigError("scenario needs d1_m, d2_m, sigma2_dbm, pmax_dbm");
  sc.config.pi1 = d1 * d1;
  sc.config.pi2 = d2 * d2;
  sc.config.sigma2 = dbmToWatt(sigma2Dbm);
  sc.config.pmax = dbmToWatt(pmaxDbm);
  sc.config.validate();
  if (sc.trials < 1) throw ConfigError("trials must be >= 1");
  return sc;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file " + path);
  return parseScenario(f);
}

std::uint64_t configHash(const SystemConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.n << '|' << cfg.m1 << '|' << cfg.m2 << '|' << cfg.pi1 << '|'
     << cfg.pi2 << '|' << cfg.sigma2 << '|' << cfg.pmax;
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : os.str()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace uasd
