#pragma once

// Microscopic kinematics of coalescence and binary fragmentation on the
// state space Y = ]0,inf[ x R^3 x ]0,inf[ (mass, momentum, internal energy).
// Mergers convert relative kinetic energy into internal energy; break-ups
// pay it back, so total (kinetic + internal) energy is conserved exactly
// per event.

#include <algorithm>
#include <stdexcept>

#include "cofra/vec3.hpp"

namespace cofra {

struct ParticleState {
  double m = 1.0;  // mass, > 0
  Vec3 p{};        // momentum
  double e = 1.0;  // internal energy, > 0

  friend constexpr bool operator==(const ParticleState&,
                                   const ParticleState&) = default;
};

inline bool is_valid(const ParticleState& y) {
  return y.m > 0.0 && y.e > 0.0 && std::isfinite(y.m) && std::isfinite(y.e) &&
         std::isfinite(norm2(y.p));
}

inline double kinetic_energy(const ParticleState& y) {
  return norm2(y.p) / (2.0 * y.m);
}

/// Total (kinetic + internal) energy of one particle.
inline double total_energy(const ParticleState& y) {
  return kinetic_energy(y) + y.e;
}

inline Vec3 velocity(const ParticleState& y) { return y.p / y.m; }

/// Kinetic energy lost when (m,p) and (m*,p*) merge; zero iff the
/// velocities coincide.
inline double energy_loss(double m, double m_star, const Vec3& p,
                          const Vec3& p_star) {
  const Vec3 r = m_star * p - m * p_star;
  return norm2(r) / (2.0 * m * m_star * (m + m_star));
}

/// Kinetic energy gained when (m',p') splits off a daughter (m,p); requires
/// 0 < m < m'.
inline double energy_gain(double m_prime, double m, const Vec3& p_prime,
                          const Vec3& p) {
  if (!(m > 0.0 && m < m_prime))
    throw std::domain_error("energy_gain: daughter mass must satisfy 0 < m < m'");
  const Vec3 r = m_prime * p - m * p_prime;
  return norm2(r) / (2.0 * m * m_prime * (m_prime - m));
}

/// y' = y + y*: masses and momenta add, internal energies add plus the
/// kinetic energy lost in the merger.
inline ParticleState coalesce(const ParticleState& y, const ParticleState& y_star) {
  return {y.m + y_star.m, y.p + y_star.p,
          y.e + y_star.e + energy_loss(y.m, y_star.m, y.p, y_star.p)};
}

/// The relation y < y': the split of y' into y and y' - y leaves both
/// daughters with positive mass and positive internal energy. Boundary and
/// degenerate cases return false rather than erroring, so samplers can
/// probe freely.
inline bool admissible(const ParticleState& y, const ParticleState& y_prime) {
  if (!(y.m > 0.0 && y.m < y_prime.m)) return false;
  const double gain = energy_gain(y_prime.m, y.m, y_prime.p, y.p);
  return y.e > 0.0 && y.e < y_prime.e - gain;
}

/// y* = y' - y: complementary daughter of the split of y'. Requires
/// admissible(y, y').
inline ParticleState split(const ParticleState& y_prime, const ParticleState& y) {
  if (!admissible(y, y_prime))
    throw std::domain_error("split: pair is not admissible");
  return {y_prime.m - y.m, y_prime.p - y.p,
          y_prime.e - y.e - energy_gain(y_prime.m, y.m, y_prime.p, y.p)};
}

/// Axis-aligned envelope of the admissible region {y : y < y'}:
/// m in (0,m'), |p| <= sqrt(2 m' e' + |p'|^2), e in (0,e').
struct AdmissibleBounds {
  double mass_max = 0.0;
  double momentum_radius = 0.0;
  double energy_max = 0.0;

  double volume() const {
    constexpr double four_thirds_pi = 4.1887902047863909846;
    return mass_max * energy_max * four_thirds_pi * momentum_radius *
           momentum_radius * momentum_radius;
  }
};

inline AdmissibleBounds admissible_bounds(const ParticleState& y_prime) {
  return {y_prime.m,
          std::sqrt(2.0 * y_prime.m * y_prime.e + norm2(y_prime.p)),
          y_prime.e};
}

/// Y_R = ]0,R[ x B_R x ]0,R[.
struct StateBox {
  double R = 1.0;

  bool contains(const ParticleState& y) const {
    return y.m > 0.0 && y.m < R && y.e > 0.0 && y.e < R && norm2(y.p) < R * R;
  }
};

/// Max-norm on Y used wherever a single size of a state is needed.
inline double max_norm(const ParticleState& y) {
  return std::max({y.m, norm(y.p), y.e});
}

struct PhasePoint {
  Vec3 x{};
  ParticleState state{};
};

/// Free transport along the characteristic: x <- x + dt p/m, state unchanged.
inline PhasePoint advect(const PhasePoint& pt, double dt) {
  return {pt.x + (dt / pt.state.m) * pt.state.p, pt.state};
}

}  // namespace cofra
