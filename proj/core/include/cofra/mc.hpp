#pragma once

// Monte-Carlo integration over state boxes and sampling of the admissible
// fragmentation region via its rejection envelope.

#include <functional>
#include <optional>

#include "cofra/particle.hpp"
#include "cofra/stream.hpp"

namespace cofra {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Unbiased Monte-Carlo estimate of the integral of g over Y_R. A positive
/// strata count stratifies the mass coordinate into equal slabs.
McEstimate integrate_box(const std::function<double(const ParticleState&)>& g,
                         double R, std::uint64_t n, StreamKey key,
                         int mass_strata = 0);

/// Same over Y_R x Y_R.
McEstimate integrate_box2(
    const std::function<double(const ParticleState&, const ParticleState&)>& g,
    double R, std::uint64_t n, StreamKey key);

/// Uniform point of Y_R.
ParticleState sample_state_box(double R, StreamKey& key);

/// Uniform point of the envelope of {y : y < y_prime}.
ParticleState sample_envelope(const ParticleState& y_prime, StreamKey& key);

struct AcceptanceStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;

  double rate() const {
    return attempts == 0 ? 0.0
                         : static_cast<double>(accepted) /
                               static_cast<double>(attempts);
  }
};

struct RejectionControl {
  double acceptance_floor = 1e-6;
  std::uint64_t attempt_cap = 1'000'000;
};

/// y uniform on {y : y < y_prime} by rejection from the envelope. Returns
/// nullopt when the region looks degenerate (acceptance below the floor at
/// the attempt cap).
std::optional<ParticleState> sample_admissible(
    const ParticleState& y_prime, StreamKey& key, AcceptanceStats* stats = nullptr,
    const RejectionControl& ctl = {});

struct FragKernel;  // kernels.hpp

struct DensitySampleError {
  enum class Kind { degenerate_region, sup_bound_violated } kind;
  ParticleState witness{};  // only meaningful for sup_bound_violated
  double kernel_value = 0.0;
  double declared_sup = 0.0;
};

/// y distributed with density B(y',.)/B1(y') on the admissible region, by
/// rejection with ratio B/sup_B from uniform-on-admissible proposals.
std::optional<ParticleState> sample_density_on_admissible(
    const ParticleState& y_prime, const FragKernel& B, StreamKey& key,
    AcceptanceStats* stats = nullptr, DensitySampleError* err = nullptr,
    const RejectionControl& ctl = {});

}  // namespace cofra
