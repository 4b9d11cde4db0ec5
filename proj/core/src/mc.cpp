#include "cofra/mc.hpp"

#include <cmath>
#include <stdexcept>

#include "cofra/kernels.hpp"

namespace cofra {

namespace {

constexpr double kFourThirdsPi = 4.1887902047863909846;

double box_volume(double R) { return R * R * kFourThirdsPi * R * R * R; }

McEstimate reduce_mean(double sum, double sum_sq, std::uint64_t n, double volume) {
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  const double var = std::max(0.0, sum_sq / nd - mean * mean);
  return {volume * mean, volume * std::sqrt(var / nd), n};
}

}  // namespace

ParticleState sample_state_box(double R, StreamKey& key) {
  // open intervals in m and e keep the states strictly inside Y
  return {key.uniform_open() * R, key.uniform_ball(R), key.uniform_open() * R};
}

McEstimate integrate_box(const std::function<double(const ParticleState&)>& g,
                         double R, std::uint64_t n, StreamKey key,
                         int mass_strata) {
  if (n < 2) throw std::invalid_argument("integrate_box: need n >= 2 samples");
  if (mass_strata <= 1) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = g(sample_state_box(R, key));
      sum += v;
      sum_sq += v * v;
    }
    return reduce_mean(sum, sum_sq, n, box_volume(R));
  }
  // equal mass slabs, equal budgets; per-stratum variances add
  const std::uint64_t per = std::max<std::uint64_t>(n / mass_strata, 2);
  double value = 0.0, var = 0.0;
  std::uint64_t used = 0;
  for (int s = 0; s < mass_strata; ++s) {
    const double m_lo = R * s / mass_strata;
    const double slab = R / mass_strata;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < per; ++i) {
      ParticleState y{m_lo + key.uniform_open() * slab, key.uniform_ball(R),
                      key.uniform_open() * R};
      const double v = g(y);
      sum += v;
      sum_sq += v * v;
    }
    const McEstimate part =
        reduce_mean(sum, sum_sq, per, box_volume(R) / mass_strata);
    value += part.value;
    var += part.std_error * part.std_error;
    used += per;
  }
  return {value, std::sqrt(var), used};
}

McEstimate integrate_box2(
    const std::function<double(const ParticleState&, const ParticleState&)>& g,
    double R, std::uint64_t n, StreamKey key) {
  if (n < 2) throw std::invalid_argument("integrate_box2: need n >= 2 samples");
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const ParticleState a = sample_state_box(R, key);
    const ParticleState b = sample_state_box(R, key);
    const double v = g(a, b);
    sum += v;
    sum_sq += v * v;
  }
  const double vol = box_volume(R);
  return reduce_mean(sum, sum_sq, n, vol * vol);
}

ParticleState sample_envelope(const ParticleState& y_prime, StreamKey& key) {
  const AdmissibleBounds box = admissible_bounds(y_prime);
  return {key.uniform_open() * box.mass_max, key.uniform_ball(box.momentum_radius),
          key.uniform_open() * box.energy_max};
}

std::optional<ParticleState> sample_admissible(const ParticleState& y_prime,
                                               StreamKey& key,
                                               AcceptanceStats* stats,
                                               const RejectionControl& ctl) {
  AcceptanceStats local;
  AcceptanceStats& st = stats ? *stats : local;
  for (std::uint64_t i = 0; i < ctl.attempt_cap; ++i) {
    ++st.attempts;
    const ParticleState y = sample_envelope(y_prime, key);
    if (admissible(y, y_prime)) {
      ++st.accepted;
      return y;
    }
    if (st.attempts >= ctl.attempt_cap && st.rate() < ctl.acceptance_floor) break;
  }
  return std::nullopt;
}

std::optional<ParticleState> sample_density_on_admissible(
    const ParticleState& y_prime, const FragKernel& B, StreamKey& key,
    AcceptanceStats* stats, DensitySampleError* err, const RejectionControl& ctl) {
  const double sup = B.sup_on_daughters(y_prime);
  if (!(sup > 0.0)) {
    if (err) err->kind = DensitySampleError::Kind::degenerate_region;
    return std::nullopt;
  }
  AcceptanceStats local;
  AcceptanceStats& st = stats ? *stats : local;
  while (st.attempts < ctl.attempt_cap) {
    ++st.attempts;
    const ParticleState y = sample_envelope(y_prime, key);
    if (!admissible(y, y_prime)) continue;
    const double value = B(y_prime, y);
    if (value > sup) {
      // kernel contract breach: declared daughter bound exceeded
      if (err) {
        err->kind = DensitySampleError::Kind::sup_bound_violated;
        err->witness = y;
        err->kernel_value = value;
        err->declared_sup = sup;
      }
      return std::nullopt;
    }
    if (key.uniform() * sup < value) {
      ++st.accepted;
      return y;
    }
  }
  if (err) err->kind = DensitySampleError::Kind::degenerate_region;
  return std::nullopt;
}

}  // namespace cofra
