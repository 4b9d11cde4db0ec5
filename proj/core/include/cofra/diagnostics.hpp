#pragma once

// Moment series, conservation ledger, the finite-time particle-count bound,
// estimate checking, and full-precision CSV/JSON round-trip IO.

#include <cstdint>
#include <string>
#include <vector>

#include "cofra/vec3.hpp"

namespace cofra {

struct MomentRow {
  double t = 0.0;
  double N = 0.0;
  double M = 0.0;
  Vec3 P{};
  double Ekin = 0.0;
  double Eint = 0.0;
  double Etot = 0.0;
  double Mx2 = 0.0;  // second space moment, unwrapped coordinates
};

struct MomentSeries {
  std::vector<MomentRow> rows;
};

struct LedgerRow {
  double t = 0.0;
  std::uint64_t coag_candidates = 0;
  std::uint64_t coag_events = 0;
  std::uint64_t frag_trials = 0;
  std::uint64_t frag_events = 0;
  std::uint64_t frag_skips = 0;
  double acceptance_rate = 0.0;
  double max_mass_residual = 0.0;
  double max_momentum_residual = 0.0;
  double max_energy_residual = 0.0;
  double drift_M = 0.0;
  double drift_Px = 0.0;
  double drift_Py = 0.0;
  double drift_Pz = 0.0;
  double drift_E = 0.0;
};

struct ConservationLedger {
  std::vector<LedgerRow> rows;
};

/// (N0 + C T (M0 + E0)) e^{CT} + M0 + E0.
double gronwall_bound(double N0, double M0, double E0, double C, double T);

struct EstimateCheckInputs {
  double N0 = 0.0, M0 = 0.0, E0 = 0.0;
  double C = 0.0;  // sup of the fragmentation frequency over the bound region
  double T = 0.0;
  double dt = 0.0;            // step used by the run, enters the slope slack
  double conservation_tol = 1e-9;
  double slope_abs_tol = 1e-9;
};

struct EstimateCheckItem {
  std::string name;
  bool pass = true;
  double worst_margin = 0.0;
  int worst_row = -1;
};

struct EstimateCheckReport {
  std::vector<EstimateCheckItem> items;
  bool all_pass() const;
  const EstimateCheckItem* find(const std::string& name) const;
};

/// Uniform-in-time checks on a moment series: conservation of mass, momentum
/// and total energy; the particle count against the finite-time bound; and
/// the second-space-moment slope against 2 sqrt(2 Mx2 Ekin) plus the O(dt)
/// slack of the discrete derivative.
EstimateCheckReport check_estimates(const MomentSeries& series,
                                    const EstimateCheckInputs& in);

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> kernel_names;
  std::string audit_report;  // path, empty if none
  std::vector<std::pair<std::string, std::string>> extras;
};

std::string manifest_json(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::string& path);

/// FNV-1a over the canonical serialized configuration.
std::uint64_t content_hash(const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_moment_series_csv(const MomentSeries& s, const std::string& path);
MomentSeries read_moment_series_csv(const std::string& path);

void write_ledger_csv(const ConservationLedger& l, const std::string& path);
ConservationLedger read_ledger_csv(const std::string& path);

struct HomoResult;  // sectional.hpp
void write_homo_series_csv(const HomoResult& r, const std::string& path);

/// Histogram-based empirical s-norm of a weighted particle cloud on an
/// (m,e) marginal grid. Estimator-dependent: the value depends on the grid,
/// unlike the grid quadratures of the deterministic solver.
struct SimParticle;  // dsmc.hpp
double empirical_ls(const std::vector<SimParticle>& particles, double s,
                    int bins_m, int bins_e);

}  // namespace cofra
