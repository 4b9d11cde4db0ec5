#include "cofra/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "cofra/dsmc.hpp"
#include "cofra/kernels.hpp"
#include "cofra/mc.hpp"
#include "cofra/particle.hpp"
#include "cofra/sectional.hpp"
#include "cofra/stream.hpp"

namespace cofra {

bool SuiteResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

double abs_determinant(std::vector<double> a, int n) {
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col)
      for (int c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
    det *= a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return std::abs(det);
}

namespace {

ParticleState random_state(StreamKey& key) {
  const double m = std::exp(key.uniform(std::log(0.1), std::log(10.0)));
  const Vec3 p{key.uniform(-4.0, 4.0), key.uniform(-4.0, 4.0),
               key.uniform(-4.0, 4.0)};
  const double e = std::exp(key.uniform(std::log(0.1), std::log(10.0)));
  return {m, p, e};
}

CheckResult make_result(const std::string& name, bool pass, double worst,
                        double tol) {
  std::ostringstream os;
  os << "worst " << worst << " vs tol " << tol;
  return {name, pass, os.str()};
}

// Split map in flattened coordinates (m', m, p', p, e', e) -> images of the
// complementary-daughter change of variables.
std::array<double, 10> split_map(const std::array<double, 10>& v) {
  const double mp = v[0], m = v[1];
  const Vec3 pp{v[2], v[3], v[4]}, p{v[5], v[6], v[7]};
  const double ep = v[8], e = v[9];
  const double gain = energy_gain(mp, m, pp, p);
  return {mp,          mp - m,      pp.x, pp.y, pp.z,
          pp.x - p.x,  pp.y - p.y,  pp.z - p.z,
          ep,          ep - e - gain};
}

double jacobian_abs_det(const std::array<double, 10>& v) {
  std::vector<double> jac(100);
  for (int col = 0; col < 10; ++col) {
    const double h = 1e-6 * std::max(1.0, std::abs(v[col]));
    auto lo = v, hi = v;
    lo[col] -= h;
    hi[col] += h;
    const auto flo = split_map(lo), fhi = split_map(hi);
    for (int row = 0; row < 10; ++row)
      jac[row * 10 + col] = (fhi[row] - flo[row]) / (2.0 * h);
  }
  return abs_determinant(std::move(jac), 10);
}

constexpr double kTolExact = 1e-12;

// verification loops skip parents whose admissible region is too thin to
// hit quickly instead of exhausting the full rejection budget
RejectionControl capped_ctl() {
  RejectionControl ctl;
  ctl.attempt_cap = 20000;
  ctl.acceptance_floor = 0.0;
  return ctl;
}

}  // namespace

SuiteResult verify_kinematics(std::uint64_t seed) {
  SuiteResult suite{"kinematics", {}};
  StreamKey key(seed, Phase::verify, 1);

  {  // merge conservation over random pairs
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const ParticleState y = random_state(key), ys = random_state(key);
      const ParticleState yp = coalesce(y, ys);
      const double m_sum = y.m + ys.m;
      const double e_sum = total_energy(y) + total_energy(ys);
      worst = std::max(worst, std::abs(yp.m - m_sum) / m_sum);
      worst = std::max(worst, norm(yp.p - (y.p + ys.p)) /
                                  std::max(norm(y.p) + norm(ys.p), 1e-300));
      worst = std::max(worst, std::abs(total_energy(yp) - e_sum) / e_sum);
    }
    suite.checks.push_back(
        make_result("merge_conservation", worst <= kTolExact, worst, kTolExact));
  }

  {  // sign and vanishing of the merger energy transfer
    bool ok = true;
    for (int i = 0; i < 20000 && ok; ++i) {
      const ParticleState y = random_state(key), ys = random_state(key);
      const double loss = energy_loss(y.m, ys.m, y.p, ys.p);
      if (loss < 0.0) ok = false;
      if (velocity(y) == velocity(ys) && loss != 0.0) ok = false;
    }
    // representable equal velocities: power-of-two mass ratio
    for (int i = 0; i < 1000 && ok; ++i) {
      const Vec3 p{key.uniform(-4, 4), key.uniform(-4, 4), key.uniform(-4, 4)};
      if (energy_loss(1.0, 2.0, p, 2.0 * p) != 0.0) ok = false;
      if (!(energy_loss(1.0, 2.0, p, 2.0 * p + Vec3{1e-3, 0, 0}) > 0.0))
        ok = false;
    }
    suite.checks.push_back({"energy_loss_sign", ok,
                            "E- >= 0, zero exactly at equal velocities"});
  }

  {  // symmetry and reciprocity of the energy transfers
    double worst = 0.0;
    bool exact_swap = true;
    for (int i = 0; i < 100000; ++i) {
      const ParticleState y = random_state(key), ys = random_state(key);
      if (energy_loss(y.m, ys.m, y.p, ys.p) !=
          energy_loss(ys.m, y.m, ys.p, y.p))
        exact_swap = false;
      const ParticleState yp = coalesce(y, ys);
      const double gain = energy_gain(yp.m, y.m, yp.p, y.p);
      const double gain_mirror = energy_gain(yp.m, yp.m - y.m, yp.p, yp.p - y.p);
      const double loss = energy_loss(y.m, ys.m, y.p, ys.p);
      const double scale = std::max({gain, loss, 1e-300});
      worst = std::max(worst, std::abs(gain - gain_mirror) / scale);
      worst = std::max(worst, std::abs(gain - loss) / scale);
    }
    suite.checks.push_back(make_result("transfer_symmetry_reciprocity",
                                       exact_swap && worst <= kTolExact, worst,
                                       kTolExact));
  }

  {  // split inverts coalesce and vice versa
    double worst = 0.0;
    StreamKey dkey(seed, Phase::verify, 2);
    for (int i = 0; i < 100000; ++i) {
      const ParticleState y = random_state(key), ys = random_state(key);
      const ParticleState yp = coalesce(y, ys);
      const ParticleState back = split(yp, y);
      worst = std::max(worst, std::abs(back.m - ys.m) / ys.m);
      worst = std::max(worst, norm(back.p - ys.p) /
                                  std::max(norm(ys.p), 1e-300));
      // the energy component is reconstructed by subtracting the transferred
      // kinetic energy, so that transfer sets its error scale
      const double e_scale = ys.e + energy_loss(y.m, ys.m, y.p, ys.p);
      worst = std::max(worst, std::abs(back.e - ys.e) / e_scale);
    }
    for (int i = 0; i < 5000; ++i) {
      const ParticleState yp = random_state(dkey);
      const auto y = sample_admissible(yp, dkey, nullptr, capped_ctl());
      if (!y) continue;
      // boundary daughters (vanishing complementary mass or energy) lose
      // digits to cancellation; the identity is tested in the interior
      if (y->m < 0.05 * yp.m || y->m > 0.95 * yp.m) continue;
      if (energy_gain(yp.m, y->m, yp.p, y->p) > 0.9 * yp.e) continue;
      const ParticleState again = coalesce(*y, split(yp, *y));
      worst = std::max(worst, std::abs(again.m - yp.m) / yp.m);
      worst = std::max(worst, std::abs(again.e - yp.e) / yp.e);
    }
    suite.checks.push_back(
        make_result("split_round_trip", worst <= kTolExact, worst, kTolExact));
  }

  {  // the complementary-daughter map preserves volume
    StreamKey vkey(seed, Phase::verify, 3);
    double worst = 0.0;
    int tested = 0;
    while (tested < 1000) {
      const ParticleState yp = random_state(vkey);
      const auto y = sample_admissible(yp, vkey, nullptr, capped_ctl());
      if (!y) continue;
      // keep clear of the admissibility boundary so central differences stay
      // inside the domain
      const double gain = energy_gain(yp.m, y->m, yp.p, y->p);
      if (y->m < 0.05 * yp.m || y->m > 0.95 * yp.m) continue;
      if (y->e > 0.9 * (yp.e - gain)) continue;
      ++tested;
      const std::array<double, 10> v{yp.m,   y->m,   yp.p.x, yp.p.y, yp.p.z,
                                     y->p.x, y->p.y, y->p.z, yp.e,   y->e};
      worst = std::max(worst, std::abs(jacobian_abs_det(v) - 1.0));
    }
    suite.checks.push_back(
        make_result("volume_preservation", worst <= 1e-6, worst, 1e-6));
  }

  {  // envelope containment and the scaled-box inclusion
    StreamKey ekey(seed, Phase::verify, 4);
    bool ok = true;
    for (int i = 0; i < 20000 && ok; ++i) {
      const ParticleState yp = random_state(ekey);
      const AdmissibleBounds box = admissible_bounds(yp);
      const auto y = sample_admissible(yp, ekey, nullptr, capped_ctl());
      if (y) {
        if (!(y->m > 0.0 && y->m < box.mass_max)) ok = false;
        if (!(norm(y->p) <= box.momentum_radius)) ok = false;
        if (!(y->e > 0.0 && y->e < box.energy_max)) ok = false;
      }
      const double R = max_norm(yp) * (1.0 + 1e-12);
      if (box.momentum_radius > std::sqrt(3.0) * R * (1.0 + 1e-12)) ok = false;
    }
    suite.checks.push_back({"admissible_envelope", ok,
                            "admissible set inside its declared envelope"});
  }

  {  // transport identities
    StreamKey tkey(seed, Phase::verify, 5);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const ParticleState y = random_state(tkey);
      const PhasePoint pt{{tkey.uniform(-2, 2), tkey.uniform(-2, 2),
                           tkey.uniform(-2, 2)},
                          y};
      const double a = tkey.uniform(-1, 1), b = tkey.uniform(-1, 1);
      const PhasePoint two = advect(advect(pt, a), b);
      const PhasePoint one = advect(pt, a + b);
      worst = std::max(worst, norm(two.x - one.x) /
                                  std::max(1.0, norm(one.x)));
      const PhasePoint still = advect(pt, 0.0);
      worst = std::max(worst, norm(still.x - pt.x));
      // central difference of m|x(t)|^2 equals 2 x.p
      const double dt = 0.25;
      const PhasePoint fwd = advect(pt, dt), bwd = advect(pt, -dt);
      const double cd = (fwd.state.m * norm2(fwd.x) - bwd.state.m * norm2(bwd.x)) /
                        (2.0 * dt);
      const double expected = 2.0 * dot(pt.x, y.p);
      worst = std::max(worst, std::abs(cd - expected) /
                                  std::max({std::abs(expected), norm2(y.p) / y.m,
                                            1.0}));
    }
    suite.checks.push_back(
        make_result("transport_identities", worst <= 1e-9, worst, 1e-9));
  }

  return suite;
}

namespace {

// cumulative distribution of a density tabulated on [lo,hi]
struct TabulatedCdf {
  double lo, hi;
  std::vector<double> cum;  // cum[0] = 0 ... cum[n] = 1

  static TabulatedCdf build(double lo, double hi, int n,
                            const std::function<double(double)>& density) {
    TabulatedCdf c{lo, hi, std::vector<double>(n + 1, 0.0)};
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      const double a = lo + h * i, b = a + h;
      c.cum[i + 1] = c.cum[i] + 0.5 * h * (density(a) + density(b));
    }
    for (auto& v : c.cum) v /= c.cum.back();
    return c;
  }

  double operator()(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double u = (x - lo) / (hi - lo) * (cum.size() - 1);
    const int i = std::min(static_cast<int>(u),
                           static_cast<int>(cum.size()) - 2);
    return cum[i] + (u - i) * (cum[i + 1] - cum[i]);
  }
};

double ks_statistic(std::vector<double> samples, const TabulatedCdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace

SuiteResult verify_samplers(std::uint64_t seed) {
  SuiteResult suite{"samplers", {}};
  const ParticleState reference{2.0, Vec3{}, 3.0};
  constexpr double kAdmissibleVolume = 30.7703812919259;  // 9 sqrt(3) pi^2 / 5

  {  // identical keys replay identical streams, distinct lanes differ
    StreamKey a(seed, Phase::verify, 7), b(seed, Phase::verify, 7);
    StreamKey other(seed, Phase::verify, 8);
    bool same = true, differs = false;
    for (int i = 0; i < 256; ++i) {
      const auto va = a.next_u64();
      if (va != b.next_u64()) same = false;
      if (va != other.next_u64()) differs = true;
    }
    suite.checks.push_back({"stream_determinism", same && differs,
                            "replayable lanes, distinct across lane ids"});
  }

  {  // box integrals with known values
    const double V = 4.1887902047863909846;
    const auto one = integrate_box([](const ParticleState&) { return 1.0; }, 1.0,
                                   20000, StreamKey(seed, Phase::verify, 9));
    const auto zero = integrate_box([](const ParticleState&) { return 0.0; }, 1.0,
                                    1000, StreamKey(seed, Phase::verify, 10));
    const auto mass = integrate_box([](const ParticleState& y) { return y.m; },
                                    1.0, 200000, StreamKey(seed, Phase::verify, 11));
    const bool ok = std::abs(one.value - V) < 1e-9 && one.std_error < 1e-9 &&
                    zero.value == 0.0 &&
                    std::abs(mass.value - 0.5 * V) < 4.0 * mass.std_error;
    suite.checks.push_back({"box_integrals", ok, "volume, zero and mean-mass"});
  }

  {  // rejection sampling of the admissible region
    StreamKey key(seed, Phase::verify, 12);
    AcceptanceStats stats;
    double mass_sum = 0.0, mass_sq = 0.0;
    bool all_admissible = true;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto y = sample_admissible(reference, key, &stats);
      if (!y || !admissible(*y, reference)) {
        all_admissible = false;
        break;
      }
      mass_sum += y->m;
      mass_sq += y->m * y->m;
    }
    const double expected_rate = kAdmissibleVolume / 1044.7484337989094;
    const double rate = stats.rate();
    const double rate_se =
        std::sqrt(expected_rate * (1.0 - expected_rate) /
                  static_cast<double>(stats.attempts));
    const double mean = mass_sum / n;
    const double mean_se = std::sqrt(
        std::max(0.0, mass_sq / n - mean * mean) / static_cast<double>(n));
    const bool ok = all_admissible &&
                    std::abs(rate - expected_rate) < 4.0 * rate_se &&
                    std::abs(mean - 1.0) < 4.0 * mean_se;
    std::ostringstream os;
    os << "acceptance " << rate << " (expected " << expected_rate
       << "), mean daughter mass " << mean;
    suite.checks.push_back({"admissible_rejection", ok, os.str()});
  }

  {  // uniform-on-admissible mass marginal against its exact law
    StreamKey key(seed, Phase::verify, 13);
    std::vector<double> masses;
    masses.reserve(20000);
    for (int i = 0; i < 20000; ++i) {
      const auto y = sample_admissible(reference, key);
      if (y) masses.push_back(y->m);
    }
    const auto cdf = TabulatedCdf::build(0.0, 2.0, 4096, [](double m) {
      return std::pow(std::max(m * (2.0 - m), 0.0), 1.5);
    });
    const double d = ks_statistic(masses, cdf);
    const double crit = 1.628 / std::sqrt(static_cast<double>(masses.size()));
    suite.checks.push_back(make_result("admissible_mass_marginal", d < crit, d,
                                       crit));
  }

  {  // kernel-weighted daughter sampling respects the support and the law
    StreamKey key(seed, Phase::verify, 14);
    FragKernel half = make_frag_kernel("constant", {{"b0", 1.0}});
    half.name = "half_support";
    half.rate = [](const ParticleState& yp, const ParticleState& y) {
      return (admissible(y, yp) && y.m < 0.5 * yp.m) ? 1.0 : 0.0;
    };
    half.closed_form_b1 = nullptr;
    bool support_ok = true;
    for (int i = 0; i < 2000; ++i) {
      const auto y = sample_density_on_admissible(reference, half, key);
      if (!y || y->m >= 0.5 * reference.m) {
        support_ok = false;
        break;
      }
    }

    const FragKernel mass_only =
        make_frag_kernel("mass_only_truncated", {{"b0", 1.0}}, 2.0);
    std::vector<double> masses;
    for (int i = 0; i < 20000; ++i) {
      const auto y = sample_density_on_admissible(reference, mass_only, key);
      if (y) masses.push_back(y->m);
    }
    // marginal on [1,2): (m(2-m))^{3/2}, ten-bin counts within three standard
    // errors each
    const auto cdf = TabulatedCdf::build(1.0, 2.0, 4096, [](double m) {
      return std::pow(std::max(m * (2.0 - m), 0.0), 1.5);
    });
    bool bins_ok = true;
    const int bins = 10;
    const double n = static_cast<double>(masses.size());
    for (int b = 0; b < bins && bins_ok; ++b) {
      const double lo = 1.0 + b / static_cast<double>(bins);
      const double hi = 1.0 + (b + 1) / static_cast<double>(bins);
      const double p = cdf(hi) - cdf(lo);
      const double expected = n * p;
      const double observed = static_cast<double>(
          std::count_if(masses.begin(), masses.end(), [&](double m) {
            return m >= lo && m < hi;
          }));
      if (std::abs(observed - expected) > 3.0 * std::sqrt(n * p * (1.0 - p)))
        bins_ok = false;
    }
    suite.checks.push_back({"density_sampler", support_ok && bins_ok,
                            "support respected, ten-bin marginal within 3 se"});
  }

  {  // doubling the budget contracts the reported error like 1/sqrt(2)
    const FragKernel constant = make_frag_kernel("constant", {{"b0", 1.0}});
    double ratio_sum = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const auto small = b1_monte_carlo(constant, reference, 20000,
                                        StreamKey(seed, Phase::verify, 100 + rep));
      const auto large = b1_monte_carlo(constant, reference, 40000,
                                        StreamKey(seed, Phase::verify, 200 + rep));
      ratio_sum += small.std_error / large.std_error;
    }
    const double mean_ratio = ratio_sum / 10.0;
    suite.checks.push_back(make_result(
        "mc_error_scaling", mean_ratio > 1.2 && mean_ratio < 1.8, mean_ratio,
        std::sqrt(2.0)));
  }

  return suite;
}

SuiteResult verify_moments(std::uint64_t seed) {
  SuiteResult suite{"moments", {}};

  {  // constant-kernel benchmark of the sectional solver
    HomogeneousConfig cfg;
    cfg.suite.A = make_coag_kernel("constant", {{"a0", 1.0}});
    cfg.suite.B = make_frag_kernel("zero");
    cfg.m_min = 1.0 / 256.0;
    cfg.m_max = 256.0;
    cfg.bins = 128;
    cfg.dt = 0.02;
    cfg.T = 2.0;
    cfg.cadence = 0.5;
    const MassGrid grid = MassGrid::geometric(cfg.m_min, cfg.m_max, cfg.bins);
    const HomoResult res = run_homogeneous(cfg, monodisperse_state(grid, 1.0, 1.0));
    const double n_final = res.rows.back().N;
    const double expected = 1.0 / (1.0 + 0.5 * cfg.T);
    const double err = std::abs(n_final - expected) / expected;
    suite.checks.push_back(
        make_result("sectional_constant_kernel", err < 0.01, err, 0.01));
  }

  {  // moment balance residuals
    HomogeneousConfig cfg;
    cfg.suite.A = make_coag_kernel("constant", {{"a0", 1.0}});
    cfg.suite.B = make_frag_kernel("mass_only_symmetric", {{"b0", 0.5}}, 4.0);
    cfg.m_min = 1e-3;
    cfg.m_max = 64.0;
    cfg.bins = 96;
    cfg.dt = 0.01;
    const MassGrid grid = MassGrid::geometric(cfg.m_min, cfg.m_max, cfg.bins);
    SectionalState s = monodisperse_state(grid, 1.0, 1.0);
    StepCounters counters;
    SectionalState before = s;
    step(grid, s, cfg, cfg.dt, counters);
    auto phi_m = [](double m) { return m; };
    auto phi_1 = [](double) { return 1.0; };
    const double res_m =
        moment_balance_residual(grid, before, s, phi_m, cfg.suite.A, cfg.suite.B);
    const double res_1 =
        moment_balance_residual(grid, before, s, phi_1, cfg.suite.A, cfg.suite.B);
    const double mass_scale = before.total_mass(grid) / cfg.dt;
    const bool ok = res_m <= 1e-12 * mass_scale && res_1 < 1e-3;
    std::ostringstream os;
    os << "phi=m residual " << res_m << ", phi=1 residual " << res_1;
    suite.checks.push_back({"sectional_moment_balance", ok, os.str()});
  }

  {  // free flight keeps every total and obeys the space-moment identity
    DsmcConfig cfg;
    cfg.suite.A = make_coag_kernel("zero");
    cfg.suite.B = make_frag_kernel("zero");
    cfg.domain = {1.0, 2};
    cfg.particles = 4000;
    cfg.dt = 0.05;
    cfg.T = 0.5;
    cfg.cadence = 0.05;
    cfg.seed = seed;
    const InitSpec spec{"product", {{"sigma_p", 0.7}}, 1.0};
    const Ensemble initial = init_ensemble(cfg, spec);
    double xdotp = 0.0;
    for (const auto& sp : initial.particles)
      xdotp += sp.w * dot(sp.x_free, sp.y.p);
    const DsmcResult res = run_dsmc(cfg, spec);
    const MomentRow& r0 = res.series.rows.front();
    const MomentRow& r1 = res.series.rows[1];
    const MomentRow& rT = res.series.rows.back();
    const bool constants =
        std::abs(rT.N - r0.N) <= 1e-12 * r0.N &&
        std::abs(rT.M - r0.M) <= 1e-12 * r0.M &&
        std::abs(rT.Etot - r0.Etot) <= 1e-12 * r0.Etot &&
        norm(rT.P - r0.P) <= 1e-12 * std::sqrt(2.0 * r0.M * r0.Etot);
    const double slope = (r1.Mx2 - r0.Mx2) / cfg.dt;
    const double identity_gap =
        std::abs(slope - 2.0 * xdotp - 2.0 * r0.Ekin * cfg.dt);
    const bool slope_ok =
        identity_gap <= 1e-9 * std::max(1.0, std::abs(slope));
    std::ostringstream os;
    os << "totals constant: " << constants << ", slope gap " << identity_gap;
    suite.checks.push_back({"dsmc_free_flight", constants && slope_ok, os.str()});
  }

  {  // reacting run: exact per-event conservation, bounded drift
    DsmcConfig cfg;
    cfg.suite.A = make_coag_kernel("constant", {{"a0", 1.0}});
    cfg.suite.B = make_frag_kernel("constant_truncated", {{"b0", 0.02}}, 4.0);
    cfg.domain = {1.0, 2};
    cfg.particles = 4000;
    cfg.dt = 0.02;
    cfg.T = 0.5;
    cfg.cadence = 0.1;
    cfg.seed = seed;
    cfg.b1_grid = 8;
    cfg.b1_node_samples = 1000;
    const DsmcResult res = run_dsmc(cfg, {"product", {}, 1.0});
    double worst_res = 0.0, worst_drift = 0.0;
    std::uint64_t events = 0;
    for (const auto& row : res.ledger.rows) {
      worst_res = std::max({worst_res, row.max_mass_residual,
                            row.max_momentum_residual, row.max_energy_residual});
      worst_drift = std::max({worst_drift, row.drift_M, row.drift_Px,
                              row.drift_Py, row.drift_Pz, row.drift_E});
      events += row.coag_events + row.frag_events;
    }
    const bool ok = worst_res <= 1e-12 && worst_drift <= 1e-9 && events > 0;
    std::ostringstream os;
    os << events << " events, worst residual " << worst_res << ", worst drift "
       << worst_drift;
    suite.checks.push_back({"dsmc_conservation", ok, os.str()});
  }

  return suite;
}

std::vector<std::string> verify_suite_names() {
  return {"kinematics", "samplers", "moments"};
}

SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed) {
  if (name == "kinematics") return verify_kinematics(seed);
  if (name == "samplers") return verify_samplers(seed);
  if (name == "moments") return verify_moments(seed);
  throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace cofra
