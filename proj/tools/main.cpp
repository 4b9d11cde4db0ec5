// Command-line driver: kernel audits, the deterministic mass-only solver,
// the kinetic particle simulator, and the built-in verification suites.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cofra/audit.hpp"
#include "cofra/config.hpp"
#include "cofra/diagnostics.hpp"
#include "cofra/dsmc.hpp"
#include "cofra/sectional.hpp"
#include "cofra/verify.hpp"

namespace {

constexpr const char* kVersion = "cofra 0.1.0";
constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t budget = 0;
  int threads = 0;
  std::string suite_name = "all";
};

cofra::RunConfig load_with_overrides(const CommonArgs& args) {
  cofra::RunConfig cfg = cofra::load_config(args.config_path);
  if (args.seed_set) {
    cfg.seed = args.seed;
    cfg.audit.seed = args.seed;
  }
  if (args.threads > 0) cfg.threads = args.threads;
  return cfg;
}

cofra::RunManifest make_manifest(const cofra::RunConfig& cfg,
                                 const std::string& audit_ref = {}) {
  cofra::RunManifest m;
  m.config_hash = cofra::content_hash(cfg.canonical);
  m.seed = cfg.seed;
  m.version = kVersion;
  m.kernel_names = cfg.kernel_names;
  m.audit_report = audit_ref;
  m.extras.push_back({"config_canonical", cfg.canonical});
  return m;
}

int run_audit_cmd(const CommonArgs& args) {
  cofra::RunConfig cfg = load_with_overrides(args);
  if (args.budget > 0) {
    cfg.audit.samples = args.budget;
    cfg.audit.quadrature_samples = std::max<std::uint64_t>(args.budget / 10, 2);
  }
  const cofra::AuditReport report = cofra::run_audit(cfg.suite, cfg.audit);
  cofra::write_audit_report(report, args.out_path);
  for (const auto& e : report.entries)
    std::printf("%-28s %-12s%s\n", e.assumption.c_str(),
                cofra::to_string(e.status).c_str(),
                e.mandatory ? "" : "  (informational)");
  std::printf("audit: %s -> %s\n",
              report.mandatory_pass() ? "pass" : "FAIL", args.out_path.c_str());
  return report.mandatory_pass() ? kExitPass : kExitCheckFailure;
}

int run_homo_cmd(const CommonArgs& args) {
  cofra::RunConfig cfg = load_with_overrides(args);
  const cofra::HomogeneousConfig hcfg = cofra::homogeneous_config(cfg);
  const cofra::MassGrid grid =
      cofra::MassGrid::geometric(hcfg.m_min, hcfg.m_max, hcfg.bins);
  const cofra::SectionalState initial =
      cofra::monodisperse_state(grid, cfg.homo_m0, cfg.homo_N0);
  const cofra::HomoResult res = cofra::run_homogeneous(hcfg, initial);

  std::filesystem::create_directories(args.out_path);
  const auto dir = std::filesystem::path(args.out_path);
  cofra::write_homo_series_csv(res, (dir / "series.csv").string());

  cofra::RunManifest manifest = make_manifest(cfg);
  manifest.extras.push_back(
      {"steps_accepted", std::to_string(res.counters.accepted)});
  manifest.extras.push_back(
      {"steps_rejected", std::to_string(res.counters.rejected)});
  cofra::write_manifest(manifest, (dir / "run_manifest.json").string());

  // exit gate: exact discrete conservation, the particle-count bound, and
  // the s-norm dissipation inequality
  bool ok = true;
  const double M0 = res.rows.front().M;
  for (const auto& row : res.rows) {
    const double drift =
        std::abs(row.M + row.overflow_mass - M0) / std::max(M0, 1e-300);
    if (drift > 1e-10) ok = false;
  }
  const cofra::GronwallConstant C = cofra::gronwall_constant(
      cfg.suite.B, 200000, cofra::StreamKey(cfg.seed, cofra::Phase::gronwall));
  const double bound =
      cofra::gronwall_bound(res.rows.front().N, M0, 0.0, C.value, hcfg.T);
  bool bound_ok = true;
  for (const auto& row : res.rows)
    if (row.N > bound) bound_ok = false;
  const cofra::LsCheckReport ls = cofra::ls_dissipation_check(res);
  const bool ls_ok =
      ls.inequality_ok && (!ls.pure_coagulation || ls.nonincreasing);
  ok = ok && bound_ok && ls_ok;

  std::printf("homo: %zu rows, conservation %s, count bound %s, "
              "s-norm (mass-only analogue) %s\n",
              res.rows.size(), ok ? "pass" : "FAIL",
              bound_ok ? "pass" : "FAIL", ls_ok ? "pass" : "FAIL");
  return ok ? kExitPass : kExitCheckFailure;
}

int run_dsmc_cmd(const CommonArgs& args) {
  cofra::RunConfig cfg = load_with_overrides(args);
  if (args.budget > 0) cfg.particles = args.budget;
  const cofra::DsmcConfig dcfg = cofra::dsmc_config(cfg);
  const cofra::DsmcResult res = cofra::run_dsmc(dcfg, cfg.init);

  std::filesystem::create_directories(args.out_path);
  const auto dir = std::filesystem::path(args.out_path);
  cofra::write_moment_series_csv(res.series, (dir / "moments.csv").string());
  cofra::write_ledger_csv(res.ledger, (dir / "ledger.csv").string());

  cofra::RunManifest manifest = make_manifest(cfg);
  manifest.extras.push_back({"threads", std::to_string(dcfg.threads)});
  manifest.extras.push_back(
      {"population_doublings", std::to_string(res.population_doublings)});
  manifest.extras.push_back({"b1_cache_max_rel_error",
                             cofra::format_double(res.b1_cache_max_rel_error)});
  manifest.extras.push_back(
      {"b1_out_of_range_queries", std::to_string(res.b1_out_of_range)});
  cofra::write_manifest(manifest, (dir / "run_manifest.json").string());

  const cofra::GronwallConstant C = cofra::gronwall_constant(
      cfg.suite.B, 200000, cofra::StreamKey(cfg.seed, cofra::Phase::gronwall));
  cofra::EstimateCheckInputs in;
  in.N0 = res.initial.N;
  in.M0 = res.initial.M;
  in.E0 = res.initial.Etot();
  in.C = C.value;
  in.T = dcfg.T;
  in.dt = dcfg.dt;
  const cofra::EstimateCheckReport rep = cofra::check_estimates(res.series, in);
  bool ok = rep.all_pass();
  for (const auto& item : rep.items)
    std::printf("%-26s %s  (margin %g)\n", item.name.c_str(),
                item.pass ? "pass" : "FAIL", item.worst_margin);
  for (const auto& row : res.ledger.rows) {
    if (row.max_mass_residual > 1e-12 || row.max_momentum_residual > 1e-12 ||
        row.max_energy_residual > 1e-12)
      ok = false;
    if (std::max({row.drift_M, row.drift_Px, row.drift_Py, row.drift_Pz,
                  row.drift_E}) > 1e-9)
      ok = false;
  }
  std::printf("dsmc: %llu steps, %s\n",
              static_cast<unsigned long long>(res.steps), ok ? "pass" : "FAIL");
  return ok ? kExitPass : kExitCheckFailure;
}

int run_verify_cmd(const CommonArgs& args) {
  std::vector<std::string> names;
  if (args.suite_name == "all")
    names = cofra::verify_suite_names();
  else
    names.push_back(args.suite_name);
  bool ok = true;
  for (const auto& name : names) {
    const cofra::SuiteResult suite = cofra::run_verify_suite(name, args.seed);
    for (const auto& c : suite.checks) {
      std::printf("[%s] %-34s %s  %s\n", suite.suite.c_str(), c.name.c_str(),
                  c.pass ? "PASS" : "FAIL", c.detail.c_str());
      ok = ok && c.pass;
    }
  }
  return ok ? kExitPass : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinetic coagulation-fragmentation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  CommonArgs args;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    if (needs_out)
      cmd->add_option("--out", args.out_path, "output file or directory")
          ->required();
    cmd->add_option("--seed", args.seed, "random seed override")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--budget", args.budget, "sample/particle budget override");
    cmd->add_option("--threads", args.threads, "worker thread override");
  };

  CLI::App* audit = app.add_subcommand("audit", "audit kernel hypotheses");
  add_common(audit, true);
  CLI::App* homo = app.add_subcommand("homo", "deterministic mass-only solver");
  add_common(homo, true);
  CLI::App* dsmc = app.add_subcommand("dsmc", "stochastic kinetic simulator");
  add_common(dsmc, true);
  CLI::App* verify = app.add_subcommand("verify", "built-in property suites");
  verify->add_option("--suite", args.suite_name,
                     "kinematics | samplers | moments | all");
  verify->add_option("--seed", args.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (audit->parsed()) return run_audit_cmd(args);
    if (homo->parsed()) return run_homo_cmd(args);
    if (dsmc->parsed()) return run_dsmc_cmd(args);
    if (verify->parsed()) return run_verify_cmd(args);
  } catch (const cofra::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
