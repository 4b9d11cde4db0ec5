#include "cofra/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cofra {

namespace {

constexpr double kSymmetryTol = 1e-9;

double rel_gap(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// admissible daughter of y_prime with a small attempt cap; audits skip the
// parent when the region is too thin to hit quickly
std::optional<ParticleState> quick_daughter(const ParticleState& y_prime,
                                            StreamKey& key) {
  RejectionControl ctl;
  ctl.attempt_cap = 64;
  ctl.acceptance_floor = 0.0;
  return sample_admissible(y_prime, key, nullptr, ctl);
}

}  // namespace

std::string to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::pass: return "pass";
    case AuditStatus::fail: return "fail";
    default: return "inconclusive";
  }
}

bool AuditReport::mandatory_pass() const {
  return std::none_of(entries.begin(), entries.end(), [](const AuditEntry& e) {
    return e.mandatory && e.status == AuditStatus::fail;
  });
}

const AuditEntry* AuditReport::find(const std::string& assumption) const {
  for (const auto& e : entries)
    if (e.assumption == assumption) return &e;
  return nullptr;
}

std::vector<AuditEntry> check_symmetries(const KernelSuite& suite,
                                         std::uint64_t n, double state_radius,
                                         StreamKey key) {
  const double R = state_radius;
  AuditEntry coag;
  coag.assumption = "coag_symmetry";
  coag.params["state_radius"] = R;
  coag.status = AuditStatus::pass;
  for (std::uint64_t i = 0; i < n; ++i) {
    const ParticleState y = sample_state_box(R, key);
    const ParticleState ys = sample_state_box(R, key);
    const double ab = suite.A(y, ys), ba = suite.A(ys, y);
    ++coag.samples;
    if (rel_gap(ab, ba) > kSymmetryTol) {
      coag.status = AuditStatus::fail;
      coag.witnesses.push_back({y, ys, std::nullopt, ab, ba, "A(y,y*) == A(y*,y)"});
      break;
    }
  }

  AuditEntry frag;
  frag.assumption = "frag_symmetry";
  frag.params["state_radius"] = R;
  frag.status = AuditStatus::pass;
  std::uint64_t tested = 0;
  for (std::uint64_t i = 0; i < 10 * n && tested < n; ++i) {
    const ParticleState yp = sample_state_box(R, key);
    const auto y = quick_daughter(yp, key);
    if (!y) continue;
    ++tested;
    const double direct = suite.B(yp, *y);
    const double mirrored = suite.B(yp, split(yp, *y));
    if (rel_gap(direct, mirrored) > kSymmetryTol) {
      frag.status = AuditStatus::fail;
      frag.witnesses.push_back(
          {*y, split(yp, *y), yp, direct, mirrored, "B(y',y) == B(y',y'-y)"});
      break;
    }
  }
  frag.samples = tested;
  if (tested < n / 8) frag.status = AuditStatus::inconclusive;
  return {coag, frag};
}

std::vector<AuditEntry> check_structure_vs_galkin(const CoagKernel& A,
                                                  std::uint64_t n,
                                                  double state_radius,
                                                  StreamKey key) {
  const double R = state_radius;
  AuditEntry structure;
  structure.assumption = "coag_structure";
  structure.params["state_radius"] = R;
  structure.status = AuditStatus::pass;
  for (std::uint64_t i = 0; i < n; ++i) {
    const ParticleState y = sample_state_box(R, key);
    const ParticleState ys = sample_state_box(R, key);
    const ParticleState yp = coalesce(y, ys);
    const double lhs = A(y, ys);
    const double rhs = A(y, yp) + A(ys, yp);
    ++structure.samples;
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) {
      structure.status = AuditStatus::fail;
      structure.witnesses.push_back(
          {y, ys, yp, lhs, rhs, "A(y,y*) <= A(y,y') + A(y*,y')"});
      break;
    }
  }

  AuditEntry galkin;
  galkin.assumption = "galkin_monotonicity";
  galkin.mandatory = false;  // the structure inequality is the requirement
  galkin.params["state_radius"] = R;
  galkin.status = AuditStatus::pass;
  // canonical probe first, then random admissible pairs
  std::vector<std::pair<ParticleState, ParticleState>> probes;
  probes.push_back({{1.0, Vec3{}, 1.0}, {1.1, Vec3{}, 3.0}});
  std::uint64_t tested = 0;
  auto test_pair = [&](const ParticleState& y, const ParticleState& parent) {
    if (!admissible(y, parent)) return true;
    ++tested;
    const double lhs = A(y, split(parent, y));
    const double rhs = A(y, parent);
    if (lhs > rhs * (1.0 + 1e-12) + 1e-300) {
      galkin.status = AuditStatus::fail;
      galkin.witnesses.push_back(
          {y, split(parent, y), parent, lhs, rhs, "A(y,y*-y) <= A(y,y*)"});
      return false;
    }
    return true;
  };
  for (const auto& [y, parent] : probes)
    if (!test_pair(y, parent)) break;
  for (std::uint64_t i = 0; galkin.status == AuditStatus::pass && i < 10 * n &&
                            tested < n;
       ++i) {
    const ParticleState parent = sample_state_box(R, key);
    const auto y = quick_daughter(parent, key);
    if (!y) continue;
    if (!test_pair(*y, parent)) break;
  }
  galkin.samples = tested;
  return {structure, galkin};
}

std::vector<AuditEntry> check_growth(const KernelSuite& suite, double R,
                                     const std::vector<double>& radii,
                                     std::uint64_t n, double tol,
                                     StreamKey key) {
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw std::invalid_argument("check_growth: radii must be increasing");

  auto evaluate = [&](AuditEntry& entry, auto&& integrand_at) {
    entry.params["R"] = R;
    entry.params["tol"] = tol;
    for (double rho : radii) {
      const ParticleState far{rho, Vec3{rho, 0.0, 0.0}, rho};
      McEstimate est = integrate_box(
          [&](const ParticleState& y) { return integrand_at(y, far) / rho; }, R,
          n, key);
      est.std_error = est.std_error;
      entry.estimates.push_back(est);
      entry.samples += n;
    }
    bool decreasing = true;
    for (std::size_t k = 0; k + 1 < entry.estimates.size(); ++k) {
      const auto& a = entry.estimates[k];
      const auto& b = entry.estimates[k + 1];
      if (b.value > a.value + 2.0 * (a.std_error + b.std_error)) decreasing = false;
    }
    const bool small_tail = entry.estimates.back().value <= tol;
    entry.status = (decreasing && small_tail) ? AuditStatus::pass : AuditStatus::fail;
    entry.note = "finite evidence: decreasing trend below tolerance";
  };

  AuditEntry coag;
  coag.assumption = "coag_growth";
  evaluate(coag, [&](const ParticleState& y, const ParticleState& far) {
    return suite.A(y, far);
  });
  AuditEntry frag;
  frag.assumption = "frag_growth";
  evaluate(frag, [&](const ParticleState& y, const ParticleState& far) {
    return admissible(y, far) ? suite.B(far, y) : 0.0;
  });
  return {coag, frag};
}

std::vector<AuditEntry> check_truncation_and_local_bounds(
    const KernelSuite& suite, std::uint64_t n, double state_radius,
    StreamKey key) {
  const double R = state_radius;
  const double C0 = suite.B.C0;

  AuditEntry trunc;
  trunc.assumption = "frag_truncation";
  trunc.params["C0"] = C0;
  trunc.status = AuditStatus::pass;
  std::uint64_t outside = 0;
  for (std::uint64_t i = 0; i < 10 * n && outside < n; ++i) {
    const ParticleState yp = sample_state_box(R, key);
    const auto y = quick_daughter(yp, key);
    if (!y) continue;
    const bool violates_mass = yp.m > C0 * y->m;
    const bool violates_energy = total_energy(yp) > C0 * total_energy(*y);
    if (!violates_mass && !violates_energy) continue;
    ++outside;
    const double value = suite.B(yp, *y);
    if (value != 0.0) {
      trunc.status = AuditStatus::fail;
      trunc.witnesses.push_back(
          {*y, std::nullopt, yp, value, 0.0, "B == 0 outside the truncation support"});
      break;
    }
  }
  trunc.samples = outside;
  if (outside == 0) trunc.status = AuditStatus::inconclusive;

  AuditEntry coag_bound;
  coag_bound.assumption = "coag_local_bound";
  coag_bound.params["state_radius"] = R;
  const double declared_A = suite.A.local_sup(R);
  coag_bound.params["declared_sup"] = declared_A;
  coag_bound.status = AuditStatus::pass;
  for (std::uint64_t i = 0; i < n; ++i) {
    const ParticleState y = sample_state_box(R, key);
    const ParticleState ys = sample_state_box(R, key);
    const double value = suite.A(y, ys);
    ++coag_bound.samples;
    if (value > declared_A * (1.0 + 1e-12)) {
      coag_bound.status = AuditStatus::fail;
      coag_bound.witnesses.push_back(
          {y, ys, std::nullopt, value, declared_A, "A <= declared local sup"});
      break;
    }
  }

  AuditEntry frag_bound;
  frag_bound.assumption = "frag_local_bound";
  frag_bound.params["state_radius"] = R;
  frag_bound.status = AuditStatus::pass;
  std::uint64_t tested = 0;
  for (std::uint64_t i = 0; i < 10 * n && tested < n; ++i) {
    const ParticleState yp = sample_state_box(R, key);
    const auto y = quick_daughter(yp, key);
    if (!y) continue;
    ++tested;
    const double value = suite.B(yp, *y);
    const double declared = suite.B.sup_on_daughters(yp);
    if (value > declared * (1.0 + 1e-12)) {
      frag_bound.status = AuditStatus::fail;
      frag_bound.witnesses.push_back(
          {*y, std::nullopt, yp, value, declared, "B <= declared daughter sup"});
      break;
    }
  }
  frag_bound.samples = tested;
  // the declared daughter bound also caps the total frequency over the
  // admissible envelope; report it at the region corner
  const ParticleState corner{R, Vec3{R, 0.0, 0.0}, R};
  frag_bound.params["b1_envelope_bound"] =
      suite.B.sup_on_daughters(corner) * admissible_bounds(corner).volume();

  return {trunc, coag_bound, frag_bound};
}

AuditEntry check_comparison(const KernelSuite& suite,
                            const std::vector<ParticleState>& states,
                            std::uint64_t n, StreamKey key) {
  AuditEntry entry;
  entry.assumption = "kernel_comparison";
  entry.params["s"] = suite.s;
  entry.params["delta"] = suite.delta;
  entry.status = AuditStatus::pass;
  const double s = suite.s;
  std::uint64_t probe_index = 0;
  for (const ParticleState& yp : states) {
    ++probe_index;
    double sum = 0.0, sum_sq = 0.0;
    bool ill_defined = false;
    for (std::uint64_t i = 0; i < n; ++i) {
      const ParticleState y = sample_envelope(yp, key);
      double v = 0.0;
      if (admissible(y, yp)) {
        const double b = suite.B(yp, y);
        if (b > 0.0) {
          const double a = suite.A(y, yp);
          if (a <= 0.0) {
            entry.status = AuditStatus::fail;
            entry.witnesses.push_back(
                {y, std::nullopt, yp, b, a, "A(y,y') > 0 wherever B(y',y) > 0"});
            ill_defined = true;
            break;
          }
          v = std::pow(b, s) / std::pow(a, s - 1.0);
        }
      }
      sum += v;
      sum_sq += v * v;
    }
    if (ill_defined) break;
    const double nd = static_cast<double>(n);
    const double vol = admissible_bounds(yp).volume();
    const double mean = sum / nd;
    const double var = std::max(0.0, sum_sq / nd - mean * mean);
    const McEstimate lhs{vol * mean, vol * std::sqrt(var / nd), n};
    entry.estimates.push_back(lhs);
    entry.samples += n;

    const McEstimate b1_est =
        b1(suite.B, yp, n, StreamKey(key.next_u64(), Phase::audit_comparison,
                                     probe_index));
    const double rhs = 1.0 + yp.m + kinetic_energy(yp) + yp.e +
                       0.5 * std::pow(b1_est.value, suite.delta);
    if (lhs.value + 3.0 * lhs.std_error > rhs) {
      entry.status = AuditStatus::fail;
      entry.witnesses.push_back({std::nullopt, std::nullopt, yp,
                                 lhs.value + 3.0 * lhs.std_error, rhs,
                                 "comparison integral within moment bound"});
      break;
    }
  }
  entry.note = "probe states only; 3 standard error margin";
  return entry;
}

namespace {

// Importance sampler for the weight integral. In reduced coordinates
// u = |p|^2/2m and v = m|x|^2 the weight is E = 1 + m + e + u + v; every
// proposal matches the corresponding marginal tail of E^{-gamma}, which
// keeps the relative error radius-independent. Jacobians of the reduction
// are restored in the sample weight.
double weight_integral_sample(double gamma, double rho, StreamKey& key) {
  constexpr double kTailExp = 2.5;

  // truncated (1+x)^{-3/2} proposal on (0,rho)
  auto draw_poly = [&] {
    const double z = 1.0 - std::pow(1.0 + rho, -0.5);
    const double t = key.uniform() * z;
    const double value = std::min(std::pow(1.0 - t, -2.0) - 1.0, rho);
    const double inv_density = 2.0 * z * std::pow(1.0 + value, 1.5);
    return std::pair{value, inv_density};
  };
  const auto [m, inv_qm] = draw_poly();
  const auto [e, inv_qe] = draw_poly();
  const double c = 1.0 + m + e;

  auto draw_tail = [&](double cap) {
    const double t_max = 1.0 - std::pow(1.0 + cap / c, -kTailExp);
    const double t = key.uniform() * t_max;
    const double value =
        std::min(c * (std::pow(1.0 - t, -1.0 / kTailExp) - 1.0), cap);
    const double density =
        (kTailExp / c) * std::pow(1.0 + value / c, -kTailExp - 1.0) / t_max;
    return std::pair{value, density};
  };
  const auto [u, qu] = draw_tail(rho * rho / (2.0 * m));
  const auto [v, qv] = draw_tail(m * rho * rho);
  const double p_norm = std::sqrt(2.0 * m * u);
  const double x_norm = std::sqrt(v / m);

  const double energy = 1.0 + m + u + e + v;
  const double inv_qp = 4.0 * 3.14159265358979323846 * m * p_norm / qu;
  const double inv_qx = 2.0 * 3.14159265358979323846 * x_norm / (m * qv);
  return std::pow(energy, -gamma) * inv_qm * inv_qe * inv_qp * inv_qx;
}

}  // namespace

AuditEntry check_weight_integrability(double gamma,
                                      const std::vector<double>& radii,
                                      std::uint64_t n, StreamKey key) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("weight check: gamma >= 0");
  AuditEntry entry;
  entry.assumption = "weight_integrability";
  entry.mandatory = false;
  entry.params["gamma"] = gamma;
  for (double rho : radii) {
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double w = weight_integral_sample(gamma, rho, key);
      sum += w;
      sum_sq += w * w;
    }
    const double nd = static_cast<double>(n);
    const double mean = sum / nd;
    const double var = std::max(0.0, sum_sq / nd - mean * mean);
    entry.estimates.push_back({mean, std::sqrt(var / nd), n});
    entry.samples += n;
  }
  const auto& last = entry.estimates.back();
  const auto& prev = entry.estimates[entry.estimates.size() - 2];
  const double change = rel_gap(last.value, prev.value);
  entry.params["last_relative_change"] = change;
  const double noise =
      (last.std_error + prev.std_error) / std::max(last.value, 1e-300);
  const bool grew =
      last.value > 3.0 * prev.value &&
      last.value - prev.value > last.std_error + prev.std_error;
  if (change < 0.02 && noise < 0.02) {
    entry.status = AuditStatus::pass;
  } else if (grew) {
    entry.status = AuditStatus::fail;  // still growing, no plateau
  } else {
    entry.status = AuditStatus::inconclusive;
  }
  entry.note = "saturation of nested truncations; finite evidence only";
  return entry;
}

AuditReport run_audit(const KernelSuite& suite, const AuditOptions& opts) {
  const double R =
      opts.state_radius > 0.0 ? opts.state_radius : 2.0 * suite.B.C0;
  AuditReport report;
  auto lane = [&](Phase phase, std::uint64_t step = 0) {
    return StreamKey(opts.seed, phase, step);
  };

  auto sym = check_symmetries(suite, opts.samples, R, lane(Phase::audit_symmetry));
  report.entries.insert(report.entries.end(), sym.begin(), sym.end());

  auto structure = check_structure_vs_galkin(suite.A, opts.samples, R,
                                             lane(Phase::audit_structure));
  report.entries.insert(report.entries.end(), structure.begin(), structure.end());

  auto growth =
      check_growth(suite, opts.integration_radius, opts.growth_radii,
                   opts.quadrature_samples, opts.growth_tol, lane(Phase::audit_growth));
  report.entries.insert(report.entries.end(), growth.begin(), growth.end());

  auto bounds = check_truncation_and_local_bounds(suite, opts.samples, R,
                                                  lane(Phase::audit_bounds));
  report.entries.insert(report.entries.end(), bounds.begin(), bounds.end());

  std::vector<ParticleState> probes = opts.comparison_states;
  {
    StreamKey k = lane(Phase::audit_comparison, 999);
    for (int i = 0; i < opts.comparison_probes; ++i)
      probes.push_back(sample_state_box(2.0 * suite.B.C0, k));
  }
  report.entries.push_back(check_comparison(suite, probes,
                                            opts.quadrature_samples,
                                            lane(Phase::audit_comparison)));

  report.entries.push_back(check_weight_integrability(
      opts.gamma, opts.weight_radii, opts.quadrature_samples,
      lane(Phase::audit_weight)));
  return report;
}

bool replay_witness(const KernelSuite& suite, const AuditEntry& entry,
                    const AuditWitness& w) {
  const auto& id = entry.assumption;
  if (id == "coag_symmetry")
    return rel_gap(suite.A(*w.y, *w.y_star), suite.A(*w.y_star, *w.y)) >
           kSymmetryTol;
  if (id == "frag_symmetry")
    return rel_gap(suite.B(*w.y_prime, *w.y),
                   suite.B(*w.y_prime, split(*w.y_prime, *w.y))) > kSymmetryTol;
  if (id == "coag_structure")
    return suite.A(*w.y, *w.y_star) >
           suite.A(*w.y, *w.y_prime) + suite.A(*w.y_star, *w.y_prime);
  if (id == "galkin_monotonicity")
    return suite.A(*w.y, split(*w.y_prime, *w.y)) > suite.A(*w.y, *w.y_prime);
  if (id == "frag_truncation") return suite.B(*w.y_prime, *w.y) != 0.0;
  if (id == "coag_local_bound")
    return suite.A(*w.y, *w.y_star) > w.rhs * (1.0 + 1e-12);
  if (id == "frag_local_bound")
    return suite.B(*w.y_prime, *w.y) > w.rhs * (1.0 + 1e-12);
  if (id == "kernel_comparison") {
    if (w.y.has_value())  // ill-defined integrand witness
      return suite.A(*w.y, *w.y_prime) <= 0.0 && suite.B(*w.y_prime, *w.y) > 0.0;
    return w.lhs > w.rhs;  // re-assert the recorded quadrature margin
  }
  return false;
}

namespace {

using nlohmann::json;

json state_to_json(const ParticleState& y) {
  return json{{"m", y.m}, {"p", {y.p.x, y.p.y, y.p.z}}, {"e", y.e}};
}

json witness_to_json(const AuditWitness& w) {
  json j{{"lhs", w.lhs}, {"rhs", w.rhs}, {"relation", w.relation}};
  if (w.y) j["y"] = state_to_json(*w.y);
  if (w.y_star) j["y_star"] = state_to_json(*w.y_star);
  if (w.y_prime) j["y_prime"] = state_to_json(*w.y_prime);
  return j;
}

}  // namespace

std::string audit_report_json(const AuditReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je{{"assumption", e.assumption},
            {"status", to_string(e.status)},
            {"mandatory", e.mandatory},
            {"samples", e.samples},
            {"note", e.note}};
    je["params"] = e.params;
    json wit = json::array();
    for (const auto& w : e.witnesses) wit.push_back(witness_to_json(w));
    je["witnesses"] = wit;
    json est = json::array();
    for (const auto& m : e.estimates)
      est.push_back({{"value", m.value},
                     {"std_error", m.std_error},
                     {"samples", m.samples}});
    je["estimates"] = est;
    entries.push_back(je);
  }
  json root{{"entries", entries},
            {"mandatory_pass", report.mandatory_pass()}};
  return root.dump(2);
}

void write_audit_report(const AuditReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open audit report path: " + path);
  out << audit_report_json(report) << '\n';
}

}  // namespace cofra
