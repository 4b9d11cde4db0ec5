#include "cofra/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace cofra {

namespace {

constexpr double kFourThirdsPi = 4.1887902047863909846;

double get_param(const ParamMap& params, const std::string& name, double dflt) {
  auto it = params.find(name);
  return it == params.end() ? dflt : it->second;
}

double envelope_volume(const ParticleState& y_prime) {
  return admissible_bounds(y_prime).volume();
}

// Both daughters keep at least a 1/C0 share of the parent's mass and of the
// parent's total energy. Implies the truncation hypothesis and is symmetric
// under y <-> y' - y.
bool within_truncation(const ParticleState& y_prime, const ParticleState& y,
                       double C0) {
  const ParticleState y_star = split(y_prime, y);
  const double Ep = total_energy(y_prime);
  return y_prime.m <= C0 * y.m && y_prime.m <= C0 * y_star.m &&
         Ep <= C0 * total_energy(y) && Ep <= C0 * total_energy(y_star);
}

}  // namespace

CoagKernel make_coag_kernel(const std::string& name, const ParamMap& params) {
  if (name == "constant") {
    const double a0 = get_param(params, "a0", 1.0);
    return {name, [a0](const ParticleState&, const ParticleState&) { return a0; },
            [a0](double) { return a0; }, true};
  }
  if (name == "additive_power") {
    const double a0 = get_param(params, "a0", 1.0);
    const double alpha = get_param(params, "alpha", 0.5);
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("additive_power: need 0 < alpha < 1");
    return {name,
            [a0, alpha](const ParticleState& y, const ParticleState& ys) {
              return a0 * (std::pow(y.m, alpha) + std::pow(ys.m, alpha));
            },
            [a0, alpha](double R) { return 2.0 * a0 * std::pow(R, alpha); },
            true};
  }
  if (name == "smoluchowski") {
    // Brownian coalescence rate in the mass variable. Unbounded as one mass
    // vanishes; the declared bound corresponds to a 64:1 mass ratio so the
    // boundedness audit can exhibit the breach.
    return {name,
            [](const ParticleState& y, const ParticleState& ys) {
              const double c = std::cbrt(y.m), cs = std::cbrt(ys.m);
              return (c + cs) * (1.0 / c + 1.0 / cs);
            },
            [](double) { return 6.25; }, true};
  }
  if (name == "droplet") {
    const double alpha = get_param(params, "alpha", 0.25);
    if (!(alpha >= 0.0 && alpha < 0.5))
      throw std::invalid_argument("droplet: need 0 <= alpha < 1/2");
    return {name,
            [alpha](const ParticleState& y, const ParticleState& ys) {
              const double s = std::pow(y.m, alpha) + std::pow(ys.m, alpha);
              return s * s * norm(velocity(y) - velocity(ys));
            },
            // true sup is infinite (velocities blow up as m -> 0); declared
            // value assumes velocities of size R
            [alpha](double R) {
              const double s = 2.0 * std::pow(R, alpha);
              return s * s * 2.0 * R;
            },
            false};
  }
  if (name == "stellar") {
    const double alpha = get_param(params, "alpha", 0.5);
    const double gamma = get_param(params, "gamma", -1.0);
    if (!(alpha >= 0.0 && alpha <= 1.0 && gamma > -3.0 && gamma <= 0.0))
      throw std::invalid_argument("stellar: need 0 <= alpha <= 1, -3 < gamma <= 0");
    return {name,
            [alpha, gamma](const ParticleState& y, const ParticleState& ys) {
              const double massfac =
                  std::pow((y.m + ys.m) / (y.m * ys.m), alpha);
              return massfac * std::pow(norm(velocity(y) - velocity(ys)), gamma);
            },
            // unbounded both as masses vanish and as velocities coincide
            [alpha, gamma](double R) {
              return std::pow(200.0 / R, alpha) * std::pow(R / 100.0, gamma);
            },
            false};
  }
  if (name == "zero") {
    return {name, [](const ParticleState&, const ParticleState&) { return 0.0; },
            [](double) { return 0.0; }, true};
  }
  throw std::invalid_argument("unknown coagulation kernel: " + name);
}

FragKernel make_frag_kernel(const std::string& name, const ParamMap& params,
                            double C0) {
  if (C0 <= 1.0) throw std::invalid_argument("fragmentation: need C0 > 1");
  if (name == "constant_truncated") {
    const double b0 = get_param(params, "b0", 1.0);
    FragKernel k;
    k.name = name;
    k.C0 = C0;
    k.truncated = true;
    k.rate = [b0, C0](const ParticleState& yp, const ParticleState& y) {
      if (!admissible(y, yp)) return 0.0;
      return within_truncation(yp, y, C0) ? b0 : 0.0;
    };
    k.sup_on_daughters = [b0](const ParticleState&) { return b0; };
    k.mass_only = false;
    return k;
  }
  if (name == "constant") {
    // untruncated reference kernel; its total frequency has the closed form
    // b0 * 2^{3/2} pi^2 / 80 * (m' e')^{5/2}, independent of p'
    const double b0 = get_param(params, "b0", 1.0);
    FragKernel k;
    k.name = name;
    k.C0 = C0;
    k.truncated = false;
    k.rate = [b0](const ParticleState& yp, const ParticleState& y) {
      return admissible(y, yp) ? b0 : 0.0;
    };
    k.sup_on_daughters = [b0](const ParticleState&) { return b0; };
    k.closed_form_b1 = [b0](const ParticleState& yp) {
      constexpr double c = 0.34894320998194395;  // 2^{3/2} pi^2 / 80
      return b0 * c * std::pow(yp.m * yp.e, 2.5);
    };
    k.mass_only = false;
    return k;
  }
  if (name == "mass_only_truncated") {
    // daughter keeps at least a 1/C0 mass share; not symmetric under
    // m <-> m' - m (the complementary daughter may be arbitrarily small)
    const double b0 = get_param(params, "b0", 1.0);
    FragKernel k;
    k.name = name;
    k.C0 = C0;
    k.truncated = true;
    k.rate = [b0, C0](const ParticleState& yp, const ParticleState& y) {
      return (y.m > 0.0 && y.m < yp.m && yp.m <= C0 * y.m) ? b0 : 0.0;
    };
    k.sup_on_daughters = [b0](const ParticleState&) { return b0; };
    k.closed_form_b1 = [b0, C0](const ParticleState& yp) {
      return b0 * yp.m * (1.0 - 1.0 / C0);
    };
    k.mass_only = true;
    return k;
  }
  if (name == "mass_only_symmetric") {
    // both daughters keep at least a 1/C0 mass share; nonempty for C0 > 2
    const double b0 = get_param(params, "b0", 1.0);
    FragKernel k;
    k.name = name;
    k.C0 = C0;
    k.truncated = true;
    k.rate = [b0, C0](const ParticleState& yp, const ParticleState& y) {
      if (!(y.m > 0.0 && y.m < yp.m)) return 0.0;
      const double share = std::min(y.m, yp.m - y.m);
      return yp.m <= C0 * share ? b0 : 0.0;
    };
    k.sup_on_daughters = [b0](const ParticleState&) { return b0; };
    k.closed_form_b1 = [b0, C0](const ParticleState& yp) {
      return b0 * std::max(0.0, yp.m * (1.0 - 2.0 / C0));
    };
    k.mass_only = true;
    return k;
  }
  if (name == "zero") {
    FragKernel k;
    k.name = name;
    k.C0 = C0;
    k.truncated = true;
    k.rate = [](const ParticleState&, const ParticleState&) { return 0.0; };
    k.sup_on_daughters = [](const ParticleState&) { return 0.0; };
    k.closed_form_b1 = [](const ParticleState&) { return 0.0; };
    k.mass_only = true;
    return k;
  }
  throw std::invalid_argument("unknown fragmentation kernel: " + name);
}

std::vector<std::string> builtin_coag_names() {
  return {"constant", "additive_power", "smoluchowski", "droplet", "stellar",
          "zero"};
}

std::vector<std::string> builtin_frag_names() {
  return {"constant_truncated", "constant", "mass_only_truncated",
          "mass_only_symmetric", "zero"};
}

McEstimate b1_monte_carlo(const FragKernel& B, const ParticleState& y_prime,
                          std::uint64_t budget, StreamKey key) {
  if (budget < 1) throw std::invalid_argument("b1: need budget >= 1");
  if (budget == 1) budget = 2;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < budget; ++i) {
    const ParticleState y = sample_envelope(y_prime, key);
    const double v = admissible(y, y_prime) ? B(y_prime, y) : 0.0;
    sum += v;
    sum_sq += v * v;
  }
  const double nd = static_cast<double>(budget);
  const double vol = envelope_volume(y_prime);
  const double mean = sum / nd;
  const double var = std::max(0.0, sum_sq / nd - mean * mean);
  return {vol * mean, vol * std::sqrt(var / nd), budget};
}

namespace {

// 1-D daughter-mass integral for mass-only kernels without a closed form.
McEstimate b1_mass_only_quadrature(const FragKernel& B,
                                   const ParticleState& y_prime,
                                   std::uint64_t budget) {
  std::uint64_t n = std::max<std::uint64_t>(budget, 64);
  if (n % 2 == 1) ++n;
  const double h = y_prime.m / static_cast<double>(n);
  auto eval = [&](double m) {
    return B(y_prime, ParticleState{m, Vec3{}, y_prime.e});
  };
  double sum = 0.0;
  for (std::uint64_t i = 1; i < n; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    sum += w * eval(h * static_cast<double>(i));
  }
  return {sum * h / 3.0, 0.0, n};
}

}  // namespace

McEstimate b1(const FragKernel& B, const ParticleState& y_prime,
              std::uint64_t budget, StreamKey key) {
  if (budget < 1) throw std::invalid_argument("b1: need budget >= 1");
  if (B.closed_form_b1) return {B.closed_form_b1(y_prime), 0.0, 0};
  if (B.mass_only) return b1_mass_only_quadrature(B, y_prime, budget);
  return b1_monte_carlo(B, y_prime, budget, key);
}

GronwallConstant gronwall_constant(const FragKernel& B, std::uint64_t budget,
                                   StreamKey key, double region_radius,
                                   int grid_points_per_axis) {
  const double R = region_radius > 0.0 ? region_radius : 2.0 * B.C0;
  const int n = std::max(2, grid_points_per_axis);
  GronwallConstant out;
  out.region_radius = R;
  out.grid_points_per_axis = n;

  if (B.mass_only) {
    // B1 depends on the parent mass alone
    for (int i = 1; i <= n; ++i) {
      const ParticleState yp{R * i / n, Vec3{}, R};
      const McEstimate est = b1(B, yp, std::max<std::uint64_t>(budget / n, 64), key);
      out.value = std::max(out.value, est.value);
      out.std_error = std::max(out.std_error, est.std_error);
    }
    out.envelope_bound = B.sup_on_daughters({R, Vec3{}, R}) * R;
    return out;
  }

  // rotation invariance in p': maximize over (m', |p'|, e')
  const std::uint64_t nodes = static_cast<std::uint64_t>(n) * n * (n + 1);
  const std::uint64_t per_node = std::max<std::uint64_t>(budget / nodes, 256);
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        const ParticleState yp{R * i / n, Vec3{R * j / n, 0.0, 0.0}, R * k / n};
        const McEstimate est = b1(B, yp, per_node, key);
        if (est.value > out.value) {
          out.value = est.value;
          out.std_error = est.std_error;
        }
      }
    }
  }
  const ParticleState corner{R, Vec3{R, 0.0, 0.0}, R};
  out.envelope_bound =
      B.sup_on_daughters(corner) * admissible_bounds(corner).volume();
  return out;
}

}  // namespace cofra
