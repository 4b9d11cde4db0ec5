#include <cmath>

#include "cofra/mc.hpp"
#include "cofra/kernels.hpp"
#include "cofra/stream.hpp"
#include "doctest.h"

using namespace cofra;

TEST_CASE("streams replay bit-identically and lanes are independent") {
  StreamKey a(42, Phase::mc_integrate, 3, 17);
  StreamKey b(42, Phase::mc_integrate, 3, 17);
  StreamKey c(42, Phase::mc_integrate, 3, 18);
  bool equal = true, distinct = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) equal = false;
    if (va != c.next_u64()) distinct = true;
  }
  CHECK(equal);
  CHECK(distinct);
}

TEST_CASE("uniforms land in the half-open unit interval") {
  StreamKey key(9, Phase::generic);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = key.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
}

TEST_CASE("integrate_box examples") {
  const double V = 4.0 * 3.14159265358979323846 / 3.0;
  const McEstimate one =
      integrate_box([](const ParticleState&) { return 1.0; }, 1.0, 1000,
                    StreamKey(1, Phase::mc_integrate));
  CHECK(one.value == doctest::Approx(V).epsilon(1e-12));
  CHECK(one.std_error == doctest::Approx(0.0));

  const McEstimate zero =
      integrate_box([](const ParticleState&) { return 0.0; }, 1.0, 100,
                    StreamKey(1, Phase::mc_integrate));
  CHECK(zero.value == 0.0);

  const McEstimate mass =
      integrate_box([](const ParticleState& y) { return y.m; }, 1.0, 100000,
                    StreamKey(2, Phase::mc_integrate));
  CHECK(std::abs(mass.value - 0.5 * V) < 4.0 * mass.std_error);

  CHECK_THROWS_AS(integrate_box([](const ParticleState&) { return 1.0; }, 1.0,
                                1, StreamKey(1, Phase::mc_integrate)),
                  std::invalid_argument);
}

TEST_CASE("mass stratification stays unbiased and reduces mass-driven variance") {
  const double V = 4.0 * 3.14159265358979323846 / 3.0;
  auto g = [](const ParticleState& y) { return y.m * y.m; };
  const McEstimate plain =
      integrate_box(g, 1.0, 40000, StreamKey(4, Phase::mc_integrate));
  const McEstimate strat =
      integrate_box(g, 1.0, 40000, StreamKey(4, Phase::mc_integrate), 16);
  const double expected = V / 3.0;
  CHECK(std::abs(plain.value - expected) < 4.0 * plain.std_error);
  CHECK(std::abs(strat.value - expected) < 4.0 * strat.std_error);
  CHECK(strat.std_error < plain.std_error);
}

TEST_CASE("integrate_box2 covers product integrands") {
  const double V = 4.0 * 3.14159265358979323846 / 3.0;
  const McEstimate mm = integrate_box2(
      [](const ParticleState& a, const ParticleState& b) { return a.m * b.m; },
      1.0, 200000, StreamKey(3, Phase::mc_integrate));
  CHECK(std::abs(mm.value - 0.25 * V * V) < 4.0 * mm.std_error);
}

TEST_CASE("sample_admissible: rejection from the envelope") {
  const ParticleState parent{2, {0, 0, 0}, 3};
  StreamKey key(5, Phase::admissible_sampling);
  AcceptanceStats stats;
  double mass_mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto y = sample_admissible(parent, key, &stats);
    REQUIRE(y.has_value());
    CHECK(admissible(*y, parent));
    mass_mean += y->m / n;
  }
  // acceptance = admissible volume / envelope volume
  const double expected = 30.7703812919259 / 1044.7484337989094;
  const double se = std::sqrt(expected * (1 - expected) / double(stats.attempts));
  CHECK(std::abs(stats.rate() - expected) < 4.0 * se);
  // the region is symmetric under y <-> y' - y, so the mean mass is m'/2
  CHECK(mass_mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sample_admissible flags a degenerate region") {
  // nearly all envelope volume is inadmissible for a heavy-momentum parent
  const ParticleState parent{1e-3, {50, 0, 0}, 1e-3};
  StreamKey key(6, Phase::admissible_sampling);
  RejectionControl ctl;
  ctl.attempt_cap = 2000;
  ctl.acceptance_floor = 0.5;  // unreachable
  AcceptanceStats stats;
  const auto y = sample_admissible(parent, key, &stats, ctl);
  CHECK_FALSE(y.has_value());
  CHECK(stats.attempts >= ctl.attempt_cap);
}

TEST_CASE("sample_density_on_admissible respects support and detects breaches") {
  const ParticleState parent{2, {0, 0, 0}, 3};

  FragKernel half = make_frag_kernel("constant", {{"b0", 2.0}});
  half.rate = [](const ParticleState& yp, const ParticleState& y) {
    return (admissible(y, yp) && y.m < 0.5 * yp.m) ? 2.0 : 0.0;
  };
  half.closed_form_b1 = nullptr;
  StreamKey key(7, Phase::density_sampling);
  for (int i = 0; i < 500; ++i) {
    const auto y = sample_density_on_admissible(parent, half, key);
    REQUIRE(y.has_value());
    CHECK(y->m < 1.0);
  }

  FragKernel liar = half;
  liar.sup_on_daughters = [](const ParticleState&) { return 0.5; };  // < values
  DensitySampleError err{};
  const auto y = sample_density_on_admissible(parent, liar, key, nullptr, &err);
  CHECK_FALSE(y.has_value());
  CHECK(err.kind == DensitySampleError::Kind::sup_bound_violated);
  CHECK(err.kernel_value > err.declared_sup);

  FragKernel nothing = half;
  nothing.sup_on_daughters = [](const ParticleState&) { return 0.0; };
  DensitySampleError err2{};
  CHECK_FALSE(
      sample_density_on_admissible(parent, nothing, key, nullptr, &err2)
          .has_value());
  CHECK(err2.kind == DensitySampleError::Kind::degenerate_region);
}
