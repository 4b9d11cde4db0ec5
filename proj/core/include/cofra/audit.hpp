#pragma once

// Numerical certification of the kernel hypotheses the model relies on:
// symmetries, the structure inequality, growth at infinity, truncation,
// local boundedness, the comparison integral, and integrability of the
// weight E(x,y). Failures always carry a concrete witness with both sides
// evaluated, so they can be replayed in isolation.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cofra/kernels.hpp"
#include "cofra/particle.hpp"
#include "cofra/stream.hpp"

namespace cofra {

enum class AuditStatus { pass, fail, inconclusive };

std::string to_string(AuditStatus s);

struct AuditWitness {
  std::optional<ParticleState> y;
  std::optional<ParticleState> y_star;
  std::optional<ParticleState> y_prime;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string relation;  // e.g. "lhs <= rhs expected"
};

struct AuditEntry {
  std::string assumption;  // stable identifier, e.g. "coag_symmetry"
  AuditStatus status = AuditStatus::inconclusive;
  bool mandatory = true;
  std::uint64_t samples = 0;
  std::vector<AuditWitness> witnesses;
  std::vector<McEstimate> estimates;
  std::map<std::string, double> params;
  std::string note;
};

struct AuditReport {
  std::vector<AuditEntry> entries;

  bool mandatory_pass() const;
  const AuditEntry* find(const std::string& assumption) const;
};

struct AuditOptions {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;            // per pointwise check
  std::uint64_t quadrature_samples = 10000;  // per quadrature node
  double state_radius = 0.0;                 // 0 => 2 * C0
  double integration_radius = 1.0;           // the R of the growth integrals
  std::vector<double> growth_radii = {8, 16, 32, 64, 128, 256};
  double growth_tol = 0.5;
  double gamma = 5.5;
  std::vector<double> weight_radii = {8, 16, 32, 64};
  int comparison_probes = 8;
  std::vector<ParticleState> comparison_states;  // extra probe parents
};

std::vector<AuditEntry> check_symmetries(const KernelSuite& suite,
                                         std::uint64_t n, double state_radius,
                                         StreamKey key);

std::vector<AuditEntry> check_structure_vs_galkin(const CoagKernel& A,
                                                  std::uint64_t n,
                                                  double state_radius,
                                                  StreamKey key);

std::vector<AuditEntry> check_growth(const KernelSuite& suite, double R,
                                     const std::vector<double>& radii,
                                     std::uint64_t n, double tol, StreamKey key);

std::vector<AuditEntry> check_truncation_and_local_bounds(
    const KernelSuite& suite, std::uint64_t n, double state_radius,
    StreamKey key);

AuditEntry check_comparison(const KernelSuite& suite,
                            const std::vector<ParticleState>& states,
                            std::uint64_t n, StreamKey key);

AuditEntry check_weight_integrability(double gamma,
                                      const std::vector<double>& radii,
                                      std::uint64_t n, StreamKey key);

/// Runs every check on its own stream lane. Deterministic given
/// (suite, options).
AuditReport run_audit(const KernelSuite& suite, const AuditOptions& opts);

/// Re-evaluates a fail witness against the suite; true if the violation
/// reproduces.
bool replay_witness(const KernelSuite& suite, const AuditEntry& entry,
                    const AuditWitness& witness);

std::string audit_report_json(const AuditReport& report);
void write_audit_report(const AuditReport& report, const std::string& path);

}  // namespace cofra
