#pragma once

// Coagulation / fragmentation kernel abstractions and the builtin catalog.
// Kernels carry explicit local sup bounds because the admissibility audit
// and the DSMC majorant both need finite bounds that a black-box evaluator
// cannot supply.

#include <functional>
#include <map>
#include <string>

#include "cofra/mc.hpp"
#include "cofra/particle.hpp"
#include "cofra/stream.hpp"

namespace cofra {

struct CoagKernel {
  std::string name;
  // rate(y, y*) >= 0, symmetric in its arguments
  std::function<double(const ParticleState&, const ParticleState&)> rate;
  // declared bound of sup over Y_R x Y_R
  std::function<double(double)> local_sup;
  bool mass_only = false;

  double operator()(const ParticleState& y, const ParticleState& y_star) const {
    return rate(y, y_star);
  }
};

struct FragKernel {
  std::string name;
  // rate(y', y) >= 0 on admissible pairs y < y'
  std::function<double(const ParticleState&, const ParticleState&)> rate;
  double C0 = 2.0;        // truncation constant, > 1
  bool truncated = true;  // whether the support obeys the C0 truncation
  // declared bound of B(y', .) over the admissible daughters of y'
  std::function<double(const ParticleState&)> sup_on_daughters;
  // optional closed-form total fragmentation frequency B1(y')
  std::function<double(const ParticleState&)> closed_form_b1;
  bool mass_only = false;

  double operator()(const ParticleState& y_prime, const ParticleState& y) const {
    return rate(y_prime, y);
  }
};

struct KernelSuite {
  CoagKernel A;
  FragKernel B;
  double s = 1.5;     // > 1
  double delta = 0.2;  // in (0, 1/(6s-5))

  bool exponents_valid() const {
    return s > 1.0 && delta > 0.0 && delta < 1.0 / (6.0 * s - 5.0);
  }
};

using ParamMap = std::map<std::string, double>;

/// Builtin coagulation kernels by name:
///   constant(a0), additive_power(a0, alpha), smoluchowski (mass-only,
///   audit-only), droplet(alpha), stellar(alpha, gamma), zero.
CoagKernel make_coag_kernel(const std::string& name, const ParamMap& params = {});

/// Builtin fragmentation kernels by name:
///   constant_truncated(b0; C0), constant(b0) [untruncated, closed-form B1],
///   mass_only_truncated(b0; C0), zero.
FragKernel make_frag_kernel(const std::string& name, const ParamMap& params = {},
                            double C0 = 2.0);

std::vector<std::string> builtin_coag_names();
std::vector<std::string> builtin_frag_names();

/// Total fragmentation frequency B1(y'). Uses the kernel's closed form when
/// present; for mass-only kernels integrates B(m',.) over (0,m') by
/// composite Simpson quadrature; otherwise Monte-Carlo over the admissible
/// envelope. Counts each unordered daughter pair twice.
McEstimate b1(const FragKernel& B, const ParticleState& y_prime,
              std::uint64_t budget, StreamKey key);

/// Always the Monte-Carlo route, regardless of any closed form. Used to
/// cross-check closed forms.
McEstimate b1_monte_carlo(const FragKernel& B, const ParticleState& y_prime,
                          std::uint64_t budget, StreamKey key);

struct GronwallConstant {
  double value = 0.0;        // grid/sample maximum of B1 over the region
  double std_error = 0.0;    // worst standard error among grid nodes
  double envelope_bound = 0.0;  // sup_B x envelope volume, a hard upper bound
  double region_radius = 0.0;
  int grid_points_per_axis = 0;
};

/// Upper estimate of sup of B1 over Y_R, R defaulting to 2*C0 (the region
/// entering the finite-time particle-count bound). B1 is rotation invariant
/// in p', so the maximization runs on a (m',|p'|,e') grid.
GronwallConstant gronwall_constant(const FragKernel& B, std::uint64_t budget,
                                   StreamKey key, double region_radius = 0.0,
                                   int grid_points_per_axis = 12);

}  // namespace cofra
