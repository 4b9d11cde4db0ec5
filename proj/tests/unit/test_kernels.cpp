#include <cmath>

#include "cofra/kernels.hpp"
#include "doctest.h"

using namespace cofra;

namespace {
const ParticleState kReference{2, {0, 0, 0}, 3};
constexpr double kReferenceB1 = 30.7703812919259;  // 9 sqrt(3) pi^2 / 5
}  // namespace

TEST_CASE("builtin coagulation kernels") {
  const CoagKernel smol = make_coag_kernel("smoluchowski");
  CHECK(smol({1, {}, 1}, {1, {}, 1}) == doctest::Approx(4.0));

  const CoagKernel add = make_coag_kernel("additive_power", {{"alpha", 0.5}});
  CHECK(add({1, {}, 1}, {4, {}, 1}) == doctest::Approx(3.0));

  const CoagKernel one = make_coag_kernel("constant");
  CHECK(one({0.3, {1, 2, 3}, 9}, {7, {}, 0.1}) == 1.0);

  CHECK_THROWS_AS(make_coag_kernel("no_such_kernel"), std::invalid_argument);
  CHECK_THROWS_AS(make_coag_kernel("additive_power", {{"alpha", 1.5}}),
                  std::invalid_argument);
}

TEST_CASE("coagulation symmetry on random pairs") {
  StreamKey key(10, Phase::verify);
  for (const auto& name : builtin_coag_names()) {
    const CoagKernel A = make_coag_kernel(name);
    for (int i = 0; i < 20000; ++i) {
      const ParticleState y = sample_state_box(4.0, key);
      const ParticleState ys = sample_state_box(4.0, key);
      CHECK(A(y, ys) == A(ys, y));
    }
  }
}

TEST_CASE("fragmentation symmetry and truncation of the builtins") {
  StreamKey key(11, Phase::verify);
  for (const auto& name : {"constant_truncated", "constant", "mass_only_symmetric"}) {
    const FragKernel B = make_frag_kernel(name, {{"b0", 1.0}}, 4.0);
    int tested = 0;
    for (int i = 0; i < 4000 && tested < 500; ++i) {
      const ParticleState yp = sample_state_box(4.0, key);
      RejectionControl ctl;
      ctl.attempt_cap = 200;
      const auto y = sample_admissible(yp, key, nullptr, ctl);
      if (!y) continue;
      ++tested;
      CHECK(B(yp, *y) == doctest::Approx(B(yp, split(yp, *y))).epsilon(1e-12));
      if (B.truncated) {
        // mass-only kernels enforce the mass half of the truncation only
        const bool outside =
            B.mass_only ? yp.m > B.C0 * y->m
                        : yp.m > B.C0 * y->m ||
                              total_energy(yp) > B.C0 * total_energy(*y);
        if (outside) CHECK(B(yp, *y) == 0.0);
      }
    }
    CHECK(tested >= 500);
  }
}

TEST_CASE("total fragmentation frequency") {
  StreamKey key(12, Phase::verify);

  const FragKernel zero = make_frag_kernel("zero");
  CHECK(b1(zero, kReference, 100, key).value == 0.0);

  // constant untruncated kernel: closed form matches the quadrature
  const FragKernel constant = make_frag_kernel("constant", {{"b0", 2.0}});
  CHECK(b1(constant, kReference, 100, key).value ==
        doctest::Approx(2.0 * kReferenceB1).epsilon(1e-9));
  const McEstimate mc = b1_monte_carlo(constant, kReference, 200000, key);
  CHECK(std::abs(mc.value - 2.0 * kReferenceB1) < 4.0 * mc.std_error);
  // the closed form is independent of the parent momentum
  const ParticleState boosted{2, {5, -1, 2}, 3};
  const McEstimate mc2 = b1_monte_carlo(constant, boosted, 200000, key);
  CHECK(std::abs(mc2.value - 2.0 * kReferenceB1) < 4.0 * mc2.std_error);

  const FragKernel mass_only =
      make_frag_kernel("mass_only_truncated", {{"b0", 3.0}}, 2.0);
  CHECK(b1(mass_only, {1, {}, 1}, 100, key).value == doctest::Approx(1.5));

  const FragKernel sym = make_frag_kernel("mass_only_symmetric", {{"b0", 3.0}}, 4.0);
  CHECK(b1(sym, {1, {}, 1}, 100, key).value == doctest::Approx(1.5));

  CHECK_THROWS_AS(b1(zero, kReference, 0, key), std::invalid_argument);
}

TEST_CASE("monte-carlo error halves when the budget quadruples") {
  const FragKernel constant = make_frag_kernel("constant", {{"b0", 1.0}});
  double ratio = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const auto small =
        b1_monte_carlo(constant, kReference, 10000, StreamKey(rep, Phase::verify));
    const auto large = b1_monte_carlo(constant, kReference, 20000,
                                      StreamKey(100 + rep, Phase::verify));
    ratio += small.std_error / large.std_error / 10.0;
  }
  CHECK(ratio > 1.2);
  CHECK(ratio < 1.8);
}

TEST_CASE("finite-time frequency bound constant") {
  StreamKey key(13, Phase::gronwall);

  const FragKernel zero = make_frag_kernel("zero");
  CHECK(gronwall_constant(zero, 1000, key).value == 0.0);

  // closed form b0 m' (1 - 1/C0), maximised at the region edge m' = 2 C0
  const FragKernel mass_only =
      make_frag_kernel("mass_only_truncated", {{"b0", 1.5}}, 2.0);
  const GronwallConstant g = gronwall_constant(mass_only, 1000, key);
  CHECK(g.value == doctest::Approx(3.0));
  CHECK(g.region_radius == doctest::Approx(4.0));

  const FragKernel trunc =
      make_frag_kernel("constant_truncated", {{"b0", 0.1}}, 2.5);
  const GronwallConstant gk = gronwall_constant(trunc, 200000, key, 0.0, 8);
  CHECK(gk.value > 0.0);
  CHECK(gk.value <= gk.envelope_bound);
  CHECK(gk.grid_points_per_axis == 8);
}

TEST_CASE("kernel catalog rejects bad parameters") {
  CHECK_THROWS_AS(make_frag_kernel("constant_truncated", {}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_frag_kernel("no_such_kernel", {}, 2.0),
                  std::invalid_argument);
  const KernelSuite good{make_coag_kernel("constant"), make_frag_kernel("zero"),
                         1.5, 0.2};
  CHECK(good.exponents_valid());
  const KernelSuite bad{make_coag_kernel("constant"), make_frag_kernel("zero"),
                        1.5, 0.3};
  CHECK_FALSE(bad.exponents_valid());
}
