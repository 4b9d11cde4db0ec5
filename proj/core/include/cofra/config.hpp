#pragma once

// JSON run configuration shared by the CLI subcommands. Field errors are
// reported with their path.

#include <stdexcept>
#include <string>

#include "cofra/audit.hpp"
#include "cofra/dsmc.hpp"
#include "cofra/sectional.hpp"

namespace cofra {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  KernelSuite suite;
  std::vector<std::string> kernel_names;

  // domain{}
  Domain domain;

  // grid{}
  double m_min = 1e-3;
  double m_max = 1e3;
  int bins = 128;

  // time{}
  double dt = 0.01;
  double T = 1.0;
  double cadence = 0.1;

  // audit{}
  AuditOptions audit;

  // dsmc{}
  std::uint64_t particles = 10000;
  int threads = 1;
  InitSpec init{"monodisperse", {}, 1.0};

  // initial{} for the homogeneous solver
  std::string homo_init_name = "monodisperse";
  double homo_m0 = 1.0;
  double homo_N0 = 1.0;

  std::uint64_t seed = 0;
  std::string canonical;  // sorted-key serialization, hashed into manifests
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

DsmcConfig dsmc_config(const RunConfig& cfg);
HomogeneousConfig homogeneous_config(const RunConfig& cfg);

}  // namespace cofra
