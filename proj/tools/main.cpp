#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "uasd/diagonalize.hpp"
#include "uasd/io.hpp"
#include "uasd/montecarlo.hpp"
#include "uasd/power_allocation.hpp"
#include "uasd/rate_engine.hpp"
#include "uasd/region.hpp"
#include "uasd/system_model.hpp"

namespace fs = std::filesystem;
using namespace uasd;

namespace {

struct CommonArgs {
  std::string configPath;
  std::string outDir = "out";
  std::uint64_t seed = 0;
  int trials = 0;
  bool haveSeed = false, haveTrials = false;
};

Scenario loadWithOverrides(const CommonArgs& args) {
  if (args.configPath.empty())
    throw ConfigError("--config <scenario file> is required");
  Scenario sc = loadScenario(args.configPath);
  if (args.haveSeed) sc.seed = args.seed;
  if (args.haveTrials) sc.trials = args.trials;
  return sc;
}

void addCommon(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.configPath, "scenario file");
  cmd->add_option("--out", args.outDir, "output directory");
  cmd->add_option("--seed", args.seed, "override the scenario seed")
      ->each([&](const std::string&) { args.haveSeed = true; });
  cmd->add_option("--trials", args.trials, "override the scenario trials")
      ->each([&](const std::string&) { args.haveTrials = true; });
}

void dumpMatrix(const fs::path& dir, const std::string& name,
                const MatrixXcd& m) {
  std::ofstream out(dir / (name + ".txt"));
  writeMatrix(out, m);
}

int cmdDims(const CommonArgs& args) {
  Scenario sc = loadWithOverrides(args);
  DerivedDims d = deriveDims(sc.config);
  std::cout << "N=" << sc.config.n << " M1=" << sc.config.m1
            << " M2=" << sc.config.m2 << "\n"
            << "L=" << d.l << " Mbar1=" << d.mbar1 << " Mbar2=" << d.mbar2
            << " M=" << d.m << "\n";
  return 0;
}

int cmdDecompose(const CommonArgs& args, const std::string& scheme) {
  Scenario sc = loadWithOverrides(args);
  ChannelPair ch = sampleChannel(sc.config, sc.seed, 0);
  fs::create_directories(args.outDir);
  fs::path dir(args.outDir);
  dumpMatrix(dir, "h1", ch.h1);
  dumpMatrix(dir, "h2", ch.h2);
  if (scheme == "uasd") {
    UasdDecomposition u = uasdDecompose<Complex>(ch.h1, ch.h2);
    dumpMatrix(dir, "q1", u.q1);
    dumpMatrix(dir, "q2", u.q2);
    dumpMatrix(dir, "z", u.z);
    dumpMatrix(dir, "t", u.t);
    dumpMatrix(dir, "sigma1", u.sigma1.cast<Complex>());
    dumpMatrix(dir, "sigma2", u.sigma2.cast<Complex>());
    dumpMatrix(dir, "d1", u.d1.cast<Complex>());
    dumpMatrix(dir, "d2", u.d2.cast<Complex>());
    std::cout << "uasd residual " << uasdResidual(ch.h1, ch.h2, u) << "\n";
  } else if (scheme == "gsvd") {
    GsvdDecomposition g = gsvdDecompose<Complex>(ch.h1, ch.h2);
    dumpMatrix(dir, "q1", g.q1);
    dumpMatrix(dir, "q2", g.q2);
    dumpMatrix(dir, "z", g.z);
    dumpMatrix(dir, "c", g.c);
    dumpMatrix(dir, "s", g.s);
    std::cout << "gsvd residual " << gsvdResidual(ch.h1, ch.h2, g) << "\n";
  } else if (scheme == "bd") {
    BdDecomposition b = bdDecompose<Complex>(ch.h1, ch.h2);
    dumpMatrix(dir, "q1", b.q1);
    dumpMatrix(dir, "q2", b.q2);
    dumpMatrix(dir, "p", b.p);
  } else if (scheme == "jzf") {
    MatrixXcd p = jzfDecompose<Complex>(ch.h1, ch.h2);
    dumpMatrix(dir, "p", p);
  } else {
    throw ConfigError("unknown scheme `" + scheme + "`");
  }
  std::cout << "matrices written to " << args.outDir << "\n";
  return 0;
}

int cmdPdf(const CommonArgs& args) {
  Scenario sc = loadWithOverrides(args);
  const SystemConfig& cfg = sc.config;
  if (cfg.m1 + cfg.m2 <= cfg.n)
    throw ConfigError("pdf tables need shared streams (M1+M2 > N)");
  FParams fp = mapWishartParams(cfg.m1, cfg.m2, cfg.n);
  fs::create_directories(args.outDir);

  auto emitTable = [&](const Density& den, const std::vector<VectorXd>& samples,
                       int pick, const std::string& fname) {
    // histogram of the picked eigenvalue (-1 pools all, the marginal)
    std::vector<double> values;
    for (const auto& tuple : samples) {
      if (pick < 0)
        for (int i = 0; i < tuple.size(); ++i) values.push_back(tuple(i));
      else
        values.push_back(tuple(pick));
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double hi = sorted[static_cast<size_t>(0.999 * (sorted.size() - 1))];
    const int nbins = 60;
    std::vector<double> counts(nbins, 0.0);
    for (double v : values)
      if (v < hi) counts[static_cast<int>(v / hi * nbins)] += 1.0;
    std::vector<std::vector<std::string>> rows;
    for (int b = 0; b < nbins; ++b) {
      double lam = (b + 0.5) * hi / nbins;
      double emp = counts[b] / values.size() / (hi / nbins);
      rows.push_back({formatDouble(lam), formatDouble(den.pdf(lam)),
                      formatDouble(emp)});
    }
    std::ofstream out(fs::path(args.outDir) / fname);
    writeCsv(out, {"lambda", "pdf_analytic", "pdf_empirical"}, rows);
  };

  std::vector<VectorXd> samples =
      sampleFEigenvalues(fp.mu1, fp.mu2, fp.nu, sc.trials, sc.seed);
  emitTable(cachedFMarginal(fp.mu1, fp.mu2, fp.nu), samples, -1,
            "f_marginal.csv");
  for (int l = 1; l <= fp.nu; ++l)
    emitTable(cachedFOrdered(l, fp.mu1, fp.mu2, fp.nu), samples, l - 1,
              "f_ordered_" + std::to_string(l) + ".csv");
  std::cout << "density tables written to " << args.outDir << "\n";
  return 0;
}

int cmdRates(const CommonArgs& args, const std::string& power, double split,
             double eta) {
  Scenario sc = loadWithOverrides(args);
  const SystemConfig& cfg = sc.config;
  if (power == "epa") {
    double p = epaSymbolPower(cfg);
    auto [r1, r2] = ergodicRatesEpa(cfg, p, split * p, (1.0 - split) * p);
    std::cout << "P=" << formatDouble(p) << " W (P_T=Pmax)\n"
              << "R1=" << formatDouble(r1) << " R2=" << formatDouble(r2)
              << " bits/channel use\n";
  } else if (power == "upa") {
    CcpResult res = ccpAllocate(cfg, eta);
    auto [r1, r2] = ergodicRatesUpa(cfg, res.alloc);
    std::cout << "eta=" << eta << " converged=" << res.converged
              << " iterations=" << res.iterations << "\n"
              << "R1=" << formatDouble(r1) << " R2=" << formatDouble(r2)
              << " bits/channel use\n";
  } else {
    throw ConfigError("unknown power mode `" + power + "`");
  }
  return 0;
}

int cmdRegion(const CommonArgs& args, int points, int etas) {
  Scenario sc = loadWithOverrides(args);
  const SystemConfig& cfg = sc.config;
  std::vector<RateRegion> regions;
  regions.push_back(epaRegion(cfg, points));
  regions.push_back(upaRegion(cfg, etas));
  regions.push_back(gsvdRegion(cfg, points, sc.trials, sc.seed));
  regions.push_back(omaTdmaRegion(cfg, sc.trials, sc.seed));
  regions.push_back(hybridRegion(regions[1], regions[3]));
  std::string manifest = writeRegionArtifacts(args.outDir, regions, cfg);
  std::cout << "regions written, manifest " << manifest << "\n";
  return 0;
}

int cmdAllocate(const CommonArgs& args, double eta) {
  Scenario sc = loadWithOverrides(args);
  CcpResult res = ccpAllocate(sc.config, eta);
  std::cout << "eta=" << eta << " objective=" << formatDouble(res.objective)
            << " iterations=" << res.iterations
            << " converged=" << res.converged << "\n";
  std::cout << "p1=" << formatDouble(res.alloc.p1)
            << " p2=" << formatDouble(res.alloc.p2) << "\n";
  for (size_t l = 0; l < res.alloc.p1l.size(); ++l)
    std::cout << "p1l[" << l + 1 << "]=" << formatDouble(res.alloc.p1l[l])
              << " p2l[" << l + 1 << "]=" << formatDouble(res.alloc.p2l[l])
              << "\n";
  if (!args.outDir.empty()) {
    fs::create_directories(args.outDir);
    std::ofstream out(fs::path(args.outDir) / "ccp_trace.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : res.trace)
      rows.push_back({std::to_string(row.iteration),
                      formatDouble(row.objective), formatDouble(row.maxDelta),
                      formatDouble(row.budgetUsed)});
    writeCsv(out, {"iteration", "objective", "max_delta", "budget_used"}, rows);
  }
  return 0;
}

int cmdMontecarlo(const CommonArgs& args, const std::string& power,
                  double split, double eta) {
  Scenario sc = loadWithOverrides(args);
  const SystemConfig& cfg = sc.config;
  PowerAllocation alloc;
  if (power == "epa") {
    double p = epaSymbolPower(cfg);
    alloc = PowerAllocation::epa(p, split * p, (1.0 - split) * p);
  } else if (power == "upa") {
    alloc = ccpAllocate(cfg, eta).alloc;
  } else {
    throw ConfigError("unknown power mode `" + power + "`");
  }
  EmpiricalReport rep = mcUasdRates(cfg, alloc, sc.trials, sc.seed);
  std::cout << "trials=" << rep.trials << "\n"
            << "R1=" << formatDouble(rep.r1.mean) << " +- "
            << formatDouble(rep.r1.stderror) << "\n"
            << "R2=" << formatDouble(rep.r2.mean) << " +- "
            << formatDouble(rep.r2.stderror) << "\n"
            << "P_T=" << formatDouble(rep.transmitPower.mean) << " +- "
            << formatDouble(rep.transmitPower.stderror) << " W\n";
  if (!args.outDir.empty() && deriveDims(cfg).m > 0) {
    std::vector<double> eigs = mcSharedEigenvalues(cfg, sc.trials, sc.seed);
    std::sort(eigs.begin(), eigs.end());
    double hi = eigs[static_cast<size_t>(0.999 * (eigs.size() - 1))];
    const int nbins = 60;
    std::vector<int> counts(nbins, 0);
    for (double v : eigs)
      if (v < hi) ++counts[static_cast<int>(v / hi * nbins)];
    fs::create_directories(args.outDir);
    std::ofstream out(fs::path(args.outDir) / "eig_histogram.csv");
    std::vector<std::vector<std::string>> rows;
    for (int b = 0; b < nbins; ++b) {
      double lam = (b + 0.5) * hi / nbins;
      double density = counts[b] / (eigs.size() * (hi / nbins));
      rows.push_back({formatDouble(lam), std::to_string(counts[b]),
                      formatDouble(density)});
    }
    writeCsv(out, {"lambda", "count", "density"}, rows);
    std::cout << "eigenvalue histogram written to " << args.outDir << "\n";
  }
  return 0;
}

int cmdVerify(const CommonArgs& args) {
  Scenario sc = loadWithOverrides(args);
  VerifyReport rep = runVerification(sc.config, sc.seed, sc.trials);
  for (const auto& check : rep.checks)
    std::cout << (check.passed ? "PASS" : "FAIL") << "  " << check.name
              << "  (" << check.detail << ")\n";
  std::cout << (rep.allPassed() ? "all checks passed" : "checks FAILED")
            << "\n";
  return rep.allPassed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UA-SD MIMO-NOMA precoding, finite-size RMT rates, and "
               "statistical power allocation"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string scheme = "uasd";
  std::string power = "epa";
  double split = 0.5;
  double eta = 0.5;
  int points = 41;
  int etas = 21;

  CLI::App* dims = app.add_subcommand("dims", "derived stream partition");
  addCommon(dims, args);

  CLI::App* dec = app.add_subcommand("decompose", "dump decomposition factors");
  addCommon(dec, args);
  dec->add_option("--scheme", scheme, "uasd|gsvd|bd|jzf");

  CLI::App* pdf =
      app.add_subcommand("pdf", "density tables (analytic vs empirical)");
  addCommon(pdf, args);

  CLI::App* rates = app.add_subcommand("rates", "analytic ergodic rates");
  addCommon(rates, args);
  rates->add_option("--power", power, "epa|upa");
  rates->add_option("--split", split, "EPA user-1 share of P");
  rates->add_option("--eta", eta, "UPA weight");

  CLI::App* region =
      app.add_subcommand("region", "rate regions (CSV + manifest)");
  addCommon(region, args);
  region->add_option("--points", points, "EPA sweep points");
  region->add_option("--etas", etas, "UPA weight grid size");

  CLI::App* alloc = app.add_subcommand("allocate", "CCP power allocation");
  addCommon(alloc, args);
  alloc->add_option("--eta", eta, "weight in [0,1]");

  CLI::App* mc = app.add_subcommand("montecarlo", "empirical campaign");
  addCommon(mc, args);
  mc->add_option("--power", power, "epa|upa");
  mc->add_option("--split", split, "EPA user-1 share of P");
  mc->add_option("--eta", eta, "UPA weight");

  CLI::App* verify =
      app.add_subcommand("verify", "invariant suite, exit 1 on failure");
  addCommon(verify, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (dims->parsed()) return cmdDims(args);
    if (dec->parsed()) return cmdDecompose(args, scheme);
    if (pdf->parsed()) return cmdPdf(args);
    if (rates->parsed()) return cmdRates(args, power, split, eta);
    if (region->parsed()) return cmdRegion(args, points, etas);
    if (alloc->parsed()) return cmdAllocate(args, eta);
    if (mc->parsed()) return cmdMontecarlo(args, power, split, eta);
    if (verify->parsed()) return cmdVerify(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
