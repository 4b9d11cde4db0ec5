#include <cmath>

#include "cofra/dsmc.hpp"
#include "doctest.h"

using namespace cofra;

namespace {

DsmcConfig base_config(std::uint64_t seed = 0) {
  DsmcConfig cfg;
  cfg.suite.A = make_coag_kernel("constant");
  cfg.suite.B = make_frag_kernel("zero");
  cfg.domain = {1.0, 2};
  cfg.particles = 2000;
  cfg.dt = 0.02;
  cfg.T = 0.2;
  cfg.cadence = 0.1;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("domain wrap and cell binning") {
  const Domain d{2.0, 4};
  CHECK(d.cell_count() == 64);
  CHECK(d.cell_volume() == doctest::Approx(0.125));
  const Vec3 w = d.wrap({2.5, -0.5, 4.0});
  CHECK(w.x == doctest::Approx(0.5));
  CHECK(w.y == doctest::Approx(1.5));
  CHECK(w.z == doctest::Approx(0.0));
  CHECK(d.cell_index({0.1, 0.1, 0.1}) == 0);
  CHECK(d.cell_index({1.99, 1.99, 1.99}) == 63);
}

TEST_CASE("ensemble initialisation reports the drawn moments") {
  DsmcConfig cfg = base_config();
  cfg.particles = 5000;

  // cold monodisperse gas carries only internal energy
  const Ensemble cold =
      init_ensemble(cfg, {"monodisperse", {{"m", 1.0}, {"e", 2.0}}, 1.0});
  const Moments mc = moments(cold);
  CHECK(mc.Ekin == 0.0);
  CHECK(mc.Eint == doctest::Approx(mc.N * 2.0));
  CHECK(mc.N == doctest::Approx(1.0));  // concentration 1 in a unit box

  // two opposed beams cancel in momentum, kinetic energy N w p^2 / 2m
  const Ensemble beams =
      init_ensemble(cfg, {"two_beam", {{"m", 1.0}, {"e", 1.0}, {"p", 1.0}}, 1.0});
  const Moments mb = moments(beams);
  CHECK(std::abs(mb.P.x) <= 1e-12 * mb.N);
  CHECK(mb.Ekin == doctest::Approx(0.5 * mb.N));

  // product sampler: empirical moments near the analytic ones
  const Ensemble prod = init_ensemble(
      cfg, {"product",
            {{"m_lo", 0.5}, {"m_hi", 1.5}, {"sigma_p", 0.8}, {"e_lo", 1.0},
             {"e_hi", 3.0}},
            2.0});
  const Moments mp = moments(prod);
  CHECK(mp.N == doctest::Approx(2.0));
  CHECK(mp.M == doctest::Approx(2.0 * 1.0).epsilon(0.03));
  CHECK(mp.Eint == doctest::Approx(2.0 * 2.0).epsilon(0.03));
  // E|p|^2/2m for independent p and m: 3 sigma^2 E[1/m] / 2
  const double inv_mean = std::log(3.0);  // E[1/m], m ~ U(0.5, 1.5)
  CHECK(mp.Ekin ==
        doctest::Approx(2.0 * 1.5 * 0.64 * inv_mean).epsilon(0.05));

  CHECK_THROWS_AS(init_ensemble(cfg, {"no_such_sampler", {}, 1.0}),
                  std::invalid_argument);
  DsmcConfig empty = cfg;
  empty.particles = 0;
  CHECK_THROWS_AS(init_ensemble(empty, {"monodisperse", {}, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("transport advects and wraps, leaving states untouched") {
  DsmcConfig cfg = base_config();
  Ensemble e = init_ensemble(cfg, {"two_beam", {{"p", 2.0}}, 1.0});
  const Moments before = moments(e);
  const SimParticle first = e.particles.front();
  transport_step(e, 0.0);
  CHECK(e.particles.front().x == first.x);
  transport_step(e, 0.7);
  const Moments after = moments(e);
  CHECK(after.N == before.N);
  CHECK(after.Etot() == before.Etot());
  for (const auto& sp : e.particles) {
    CHECK(sp.x.x >= 0.0);
    CHECK(sp.x.x < cfg.domain.L);
  }
  CHECK(e.particles.front().x_free.x ==
        doctest::Approx(first.x_free.x + 0.7 * 2.0));
}

TEST_CASE("coagulation: no kernel, no events; constant kernel conserves") {
  DsmcConfig cfg = base_config(3);
  Ensemble e = init_ensemble(cfg, {"product", {}, 1.0});
  const Moments before = moments(e);

  const CoagKernel none = make_coag_kernel("zero");
  StepStats stats = coag_step(e, none, cfg.dt, cfg.seed, 1, 1, 0.1);
  CHECK(stats.coag_candidates == 0);
  CHECK(e.particles.size() == cfg.particles);

  const CoagKernel constant = make_coag_kernel("constant");
  stats = coag_step(e, constant, cfg.dt, cfg.seed, 2, 1, 0.1);
  CHECK(stats.coag_events > 0);
  CHECK(stats.coag_candidates >= stats.coag_events);
  CHECK(stats.max_mass_residual <= 1e-12);
  CHECK(stats.max_momentum_residual <= 1e-12);
  CHECK(stats.max_energy_residual <= 1e-12);
  const Moments after = moments(e);
  CHECK(after.M == doctest::Approx(before.M).epsilon(1e-12));
  CHECK(after.Etot() == doctest::Approx(before.Etot()).epsilon(1e-12));
  CHECK(e.particles.size() == cfg.particles - stats.coag_events);
}

TEST_CASE("coagulation aborts when the candidate rate cap is exceeded") {
  DsmcConfig cfg = base_config(4);
  cfg.particles = 4000;
  cfg.domain = {1.0, 1};
  Ensemble e = init_ensemble(cfg, {"monodisperse", {}, 4.0});
  const CoagKernel constant = make_coag_kernel("constant");
  CHECK_THROWS_AS(coag_step(e, constant, 0.5, cfg.seed, 1, 1, 0.1),
                  std::runtime_error);
}

TEST_CASE("majorant breach carries a witness pair") {
  DsmcConfig cfg = base_config(5);
  Ensemble e = init_ensemble(cfg, {"product", {}, 1.0});
  CoagKernel liar = make_coag_kernel("constant", {{"a0", 5.0}});
  liar.local_sup = [](double) { return 1.0; };  // below the actual rate
  try {
    coag_step(e, liar, cfg.dt, cfg.seed, 1, 1, 0.1);
    FAIL("expected a majorant breach");
  } catch (const MajorantBreach& b) {
    CHECK(b.value == doctest::Approx(5.0));
    CHECK(b.majorant == doctest::Approx(1.0));
    CHECK(b.y.m > 0.0);
  }
}

TEST_CASE("fragmentation: event counts, exact kinematics, admissible daughters") {
  DsmcConfig cfg = base_config(6);
  cfg.particles = 20000;
  cfg.dt = 0.05;
  Ensemble e = init_ensemble(cfg, {"monodisperse", {{"m", 1.0}, {"e", 1.9}}, 1.0});
  const Moments before = moments(e);

  const FragKernel none = make_frag_kernel("zero");
  B1Table none_table(none, 0, 0, 0, 0, 0, 0);
  StepStats stats = frag_step(e, none, none_table, cfg.dt, cfg.seed, 1, 1);
  CHECK(stats.frag_events == 0);

  const FragKernel B = make_frag_kernel("constant", {{"b0", 1.0}});
  B1Table table(B, 0, 0, 0, 0, 0, 0);  // closed form
  stats = frag_step(e, B, table, cfg.dt, cfg.seed, 2, 1);
  // every parent carries the same event probability
  const double b1v = B.closed_form_b1({1.0, {}, 1.9});
  const double q = 1.0 - std::exp(-0.5 * b1v * cfg.dt);
  const double expect = cfg.particles * q;
  const double se = std::sqrt(cfg.particles * q * (1.0 - q));
  CHECK(std::abs(double(stats.frag_events) - expect) < 3.0 * se);
  CHECK(stats.max_mass_residual <= 1e-12);
  CHECK(stats.max_energy_residual <= 1e-12);
  CHECK(e.particles.size() == cfg.particles + stats.frag_events);
  for (const auto& sp : e.particles) {
    CHECK(sp.y.m > 0.0);
    CHECK(sp.y.e > 0.0);
  }
  const Moments after = moments(e);
  CHECK(after.M == doctest::Approx(before.M).epsilon(1e-12));
  CHECK(after.Etot() == doctest::Approx(before.Etot()).epsilon(1e-12));

  // daughters of parents inside Y_R stay inside ]0,R[ x B_{sqrt3 R} x ]0,R[
  const double R = 2.0;  // parents are (1, 0, 1.9), inside Y_2
  for (const auto& sp : e.particles) {
    CHECK(sp.y.m < R);
    CHECK(sp.y.e < R);
    CHECK(norm(sp.y.p) <= std::sqrt(3.0) * R);
  }
}

TEST_CASE("b1 table interpolates the tabulated frequency") {
  const FragKernel B = make_frag_kernel("constant_truncated", {{"b0", 1.0}}, 4.0);
  B1Table table(B, 4.0, 4.0, 4.0, 12, 4000, 77);
  CHECK(table.tabulated());
  CHECK(table.max_node_rel_error() < 0.2);
  const ParticleState probe{2.0, {1.0, 0, 0}, 3.0};
  const double direct =
      b1_monte_carlo(B, probe, 200000, StreamKey(1, Phase::b1_cache)).value;
  CHECK(table(probe) == doctest::Approx(direct).epsilon(0.1));
  // out-of-range queries fall back to direct quadrature
  const ParticleState far{8.0, {}, 8.0};
  const double fallback = table(far);
  CHECK(table.out_of_range_queries() == 1);
  const double direct_far =
      b1_monte_carlo(B, far, 200000, StreamKey(2, Phase::b1_cache)).value;
  CHECK(fallback == doctest::Approx(direct_far).epsilon(0.12));
}

TEST_CASE("runs are reproducible for any worker count") {
  DsmcConfig cfg = base_config(8);
  cfg.suite.A = make_coag_kernel("constant");
  cfg.suite.B = make_frag_kernel("constant_truncated", {{"b0", 0.05}}, 4.0);
  cfg.particles = 2000;
  cfg.T = 0.2;
  cfg.b1_grid = 6;
  cfg.b1_node_samples = 500;
  const InitSpec spec{"product", {}, 1.0};

  cfg.threads = 1;
  const DsmcResult r1 = run_dsmc(cfg, spec);
  cfg.threads = 2;
  const DsmcResult r2 = run_dsmc(cfg, spec);
  cfg.threads = 8;
  const DsmcResult r8 = run_dsmc(cfg, spec);

  REQUIRE(r1.series.rows.size() == r2.series.rows.size());
  for (std::size_t i = 0; i < r1.series.rows.size(); ++i) {
    CHECK(r1.series.rows[i].N == r2.series.rows[i].N);
    CHECK(r1.series.rows[i].Mx2 == r2.series.rows[i].Mx2);
    CHECK(r1.series.rows[i].N == r8.series.rows[i].N);
    CHECK(r1.series.rows[i].Etot == r8.series.rows[i].Etot);
  }
  for (std::size_t i = 0; i < r1.ledger.rows.size(); ++i) {
    CHECK(r1.ledger.rows[i].coag_events == r8.ledger.rows[i].coag_events);
    CHECK(r1.ledger.rows[i].frag_events == r8.ledger.rows[i].frag_events);
  }
}

TEST_CASE("population control doubles the ensemble when the count halves") {
  DsmcConfig cfg = base_config(9);
  cfg.suite.A = make_coag_kernel("constant", {{"a0", 4.0}});
  cfg.particles = 2000;
  cfg.dt = 0.02;
  cfg.T = 1.0;
  cfg.cadence = 0.2;
  const DsmcResult res = run_dsmc(cfg, {"monodisperse", {}, 1.0});
  CHECK(res.population_doublings > 0);
  CHECK(res.final_ensemble.particles.size() > cfg.particles / 2);
  // physical totals unaffected by the weight rescale
  const double M0 = res.series.rows.front().M;
  CHECK(res.series.rows.back().M == doctest::Approx(M0).epsilon(1e-9));
}

TEST_CASE("dsmc refuses a mass-only fragmentation kernel") {
  DsmcConfig cfg = base_config(10);
  cfg.suite.B = make_frag_kernel("mass_only_truncated", {{"b0", 1.0}}, 2.0);
  CHECK_THROWS_AS(run_dsmc(cfg, {"monodisperse", {}, 1.0}),
                  std::invalid_argument);
  // mismatched cadence is a configuration error
  DsmcConfig bad = base_config(10);
  bad.cadence = 0.03;
  CHECK_THROWS_AS(run_dsmc(bad, {"monodisperse", {}, 1.0}),
                  std::invalid_argument);
}
