#include "cofra/sectional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cofra {

namespace {

ParticleState mass_state(double m) { return {m, Vec3{}, 1.0}; }

// two-point deposition between bracketing representative masses; conserves
// number and mass simultaneously
struct Deposit {
  int lo = -1;
  double w_lo = 0.0;  // remainder goes to lo+1
  bool overflow = false;
  bool underflow = false;
};

Deposit locate_deposit(const MassGrid& g, double m) {
  Deposit d;
  const auto& c = g.centers;
  if (m < c.front()) {
    d.underflow = true;
    return d;
  }
  if (m > c.back()) {
    d.overflow = true;
    return d;
  }
  const auto it = std::upper_bound(c.begin(), c.end(), m);
  const int hi = std::min<int>(static_cast<int>(it - c.begin()),
                               static_cast<int>(c.size()) - 1);
  const int lo = std::max(hi - 1, 0);
  d.lo = lo;
  d.w_lo = (lo == hi) ? 1.0 : (c[hi] - m) / (c[hi] - c[lo]);
  return d;
}

void deposit(const MassGrid& g, double m, double rate,
             std::vector<double>& number_rate, SectionalRates& out) {
  const Deposit d = locate_deposit(g, m);
  if (d.overflow) {
    out.overflow_rate.number += rate;
    out.overflow_rate.mass += rate * m;
    return;
  }
  if (d.underflow) {
    out.underflow_rate.number += rate;
    out.underflow_rate.mass += rate * m;
    return;
  }
  number_rate[d.lo] += d.w_lo * rate;
  if (d.w_lo != 1.0) number_rate[d.lo + 1] += (1.0 - d.w_lo) * rate;
}

}  // namespace

MassGrid MassGrid::geometric(double m_min, double m_max, int bins) {
  if (!(m_min > 0.0 && m_max > m_min && bins >= 2))
    throw std::invalid_argument("MassGrid: need 0 < m_min < m_max, bins >= 2");
  MassGrid g;
  g.edges.resize(bins + 1);
  const double ratio = std::log(m_max / m_min) / bins;
  for (int i = 0; i <= bins; ++i) g.edges[i] = m_min * std::exp(ratio * i);
  g.edges.back() = m_max;
  g.centers.resize(bins);
  g.widths.resize(bins);
  for (int i = 0; i < bins; ++i) {
    g.centers[i] = std::sqrt(g.edges[i] * g.edges[i + 1]);
    g.widths[i] = g.edges[i + 1] - g.edges[i];
  }
  return g;
}

int MassGrid::locate(double m) const {
  if (m < edges.front() || m >= edges.back()) return -1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), m);
  return static_cast<int>(it - edges.begin()) - 1;
}

double SectionalState::number(const MassGrid& g) const {
  double n = 0.0;
  for (int k = 0; k < g.bins(); ++k) n += density[k] * g.widths[k];
  return n;
}

double SectionalState::mass(const MassGrid& g) const {
  double m = 0.0;
  for (int k = 0; k < g.bins(); ++k) m += g.centers[k] * density[k] * g.widths[k];
  return m;
}

SectionalState monodisperse_state(const MassGrid& g, double m0, double N0) {
  const int k = g.locate(m0);
  if (k < 0) throw std::invalid_argument("monodisperse_state: m0 outside grid");
  SectionalState s;
  s.density.assign(g.bins(), 0.0);
  s.density[k] = N0 / g.widths[k];
  return s;
}

SectionalRates coag_rhs(const MassGrid& g, const SectionalState& state,
                        const CoagKernel& A) {
  const int K = g.bins();
  SectionalRates out;
  out.density_rate.assign(K, 0.0);
  std::vector<double> number_rate(K, 0.0);
  std::vector<double> N(K);
  for (int k = 0; k < K; ++k) N[k] = state.density[k] * g.widths[k];

  for (int i = 0; i < K; ++i) {
    if (N[i] == 0.0) continue;
    for (int j = i; j < K; ++j) {
      if (N[j] == 0.0) continue;
      const double a = A(mass_state(g.centers[i]), mass_state(g.centers[j]));
      if (a == 0.0) continue;
      const double rate = (i == j) ? 0.5 * a * N[i] * N[i] : a * N[i] * N[j];
      number_rate[i] -= rate;
      number_rate[j] -= rate;
      deposit(g, g.centers[i] + g.centers[j], rate, number_rate, out);
    }
  }
  for (int k = 0; k < K; ++k) out.density_rate[k] = number_rate[k] / g.widths[k];
  return out;
}

SectionalRates frag_rhs(const MassGrid& g, const SectionalState& state,
                        const FragKernel& B) {
  if (!B.mass_only)
    throw std::invalid_argument("frag_rhs: requires a mass-only kernel");
  const int K = g.bins();
  SectionalRates out;
  out.density_rate.assign(K, 0.0);
  std::vector<double> number_rate(K, 0.0);

  for (int k = 0; k < K; ++k) {
    const double Nk = state.density[k] * g.widths[k];
    if (Nk == 0.0) continue;
    const ParticleState parent = mass_state(g.centers[k]);
    for (int j = 0; j < k; ++j) {
      const double b = B(parent, mass_state(g.centers[j]));
      if (b == 0.0) continue;
      // ordered daughter slot: the event produces this daughter and its
      // complement, at half the slot frequency
      const double rate = 0.5 * Nk * b * g.widths[j];
      number_rate[k] -= rate;
      number_rate[j] += rate;
      deposit(g, g.centers[k] - g.centers[j], rate, number_rate, out);
    }
  }
  for (int k = 0; k < K; ++k) out.density_rate[k] = number_rate[k] / g.widths[k];
  return out;
}

namespace {

SectionalRates total_rhs(const MassGrid& g, const SectionalState& state,
                         const KernelSuite& suite) {
  SectionalRates rc = coag_rhs(g, state, suite.A);
  const SectionalRates rf = frag_rhs(g, state, suite.B);
  for (std::size_t k = 0; k < rc.density_rate.size(); ++k)
    rc.density_rate[k] += rf.density_rate[k];
  rc.overflow_rate.number += rf.overflow_rate.number;
  rc.overflow_rate.mass += rf.overflow_rate.mass;
  rc.underflow_rate.number += rf.underflow_rate.number;
  rc.underflow_rate.mass += rf.underflow_rate.mass;
  return rc;
}

SectionalState advance(const MassGrid& g, const SectionalState& s,
                       const SectionalRates& k1, const SectionalRates& k2,
                       double w1, double w2, double dt) {
  SectionalState out = s;
  for (int k = 0; k < g.bins(); ++k)
    out.density[k] =
        s.density[k] + dt * (w1 * k1.density_rate[k] + w2 * k2.density_rate[k]);
  out.overflow.number += dt * (w1 * k1.overflow_rate.number + w2 * k2.overflow_rate.number);
  out.overflow.mass += dt * (w1 * k1.overflow_rate.mass + w2 * k2.overflow_rate.mass);
  out.underflow.number += dt * (w1 * k1.underflow_rate.number + w2 * k2.underflow_rate.number);
  out.underflow.mass += dt * (w1 * k1.underflow_rate.mass + w2 * k2.underflow_rate.mass);
  out.t = s.t + dt;
  return out;
}

bool nonnegative(const SectionalState& s) {
  return std::all_of(s.density.begin(), s.density.end(),
                     [](double f) { return f >= 0.0; });
}

}  // namespace

double step(const MassGrid& g, SectionalState& state,
            const HomogeneousConfig& cfg, double dt, StepCounters& counters) {
  const double dt_floor = cfg.dt * cfg.dt_floor_factor;
  const SectionalRates k1 = total_rhs(g, state, cfg.suite);
  while (dt >= dt_floor) {
    const SectionalState mid = advance(g, state, k1, k1, 1.0, 0.0, dt);
    if (nonnegative(mid)) {
      const SectionalRates k2 = total_rhs(g, mid, cfg.suite);
      const SectionalState next = advance(g, state, k1, k2, 0.5, 0.5, dt);
      if (nonnegative(next)) {
        state = next;
        ++counters.accepted;
        return dt;
      }
    }
    ++counters.rejected;
    dt *= 0.5;
  }
  throw std::runtime_error("sectional step: dt underflow, system too stiff");
}

double functional(const MassGrid& g, const SectionalState& state,
                  const std::function<double(double)>& phi,
                  const std::function<double(double)>& H) {
  double sum = 0.0;
  for (int k = 0; k < g.bins(); ++k)
    sum += phi(g.centers[k]) * H(state.density[k]) * g.widths[k];
  return sum;
}

namespace {

// reaction-side quadrature of the moment identity for weight phi
double moment_rhs(const MassGrid& g, const SectionalState& state,
                  const std::function<double(double)>& phi, const CoagKernel& A,
                  const FragKernel& B) {
  const int K = g.bins();
  std::vector<double> N(K);
  for (int k = 0; k < K; ++k) N[k] = state.density[k] * g.widths[k];
  double total = 0.0;
  for (int i = 0; i < K; ++i) {
    if (N[i] == 0.0) continue;
    for (int j = i; j < K; ++j) {
      if (N[j] == 0.0) continue;
      const double a = A(mass_state(g.centers[i]), mass_state(g.centers[j]));
      if (a == 0.0) continue;
      const double rate = (i == j) ? 0.5 * a * N[i] * N[i] : a * N[i] * N[j];
      total += rate * (phi(g.centers[i] + g.centers[j]) - phi(g.centers[i]) -
                       phi(g.centers[j]));
    }
  }
  for (int k = 0; k < K; ++k) {
    if (N[k] == 0.0) continue;
    const ParticleState parent = mass_state(g.centers[k]);
    for (int j = 0; j < k; ++j) {
      const double b = B(parent, mass_state(g.centers[j]));
      if (b == 0.0) continue;
      const double rate = 0.5 * N[k] * b * g.widths[j];
      total += rate * (phi(g.centers[j]) + phi(g.centers[k] - g.centers[j]) -
                       phi(g.centers[k]));
    }
  }
  return total;
}

// phi-weighted content of the out-of-grid accounts; exact for phi affine in
// the mass (the accounts track number and mass)
double account_moment(const OutOfGridAccount& acc,
                      const std::function<double(double)>& phi) {
  if (acc.number == 0.0) return 0.0;
  return acc.number * phi(acc.mass / acc.number);
}

}  // namespace

double moment_balance_residual(const MassGrid& g, const SectionalState& before,
                               const SectionalState& after,
                               const std::function<double(double)>& phi,
                               const CoagKernel& A, const FragKernel& B) {
  const double dt = after.t - before.t;
  if (!(dt > 0.0))
    throw std::invalid_argument("moment_balance_residual: need after.t > before.t");
  auto id = [](double u) { return u; };
  const double f_before = functional(g, before, phi, id) +
                          account_moment(before.overflow, phi) +
                          account_moment(before.underflow, phi);
  const double f_after = functional(g, after, phi, id) +
                         account_moment(after.overflow, phi) +
                         account_moment(after.underflow, phi);
  const double lhs = (f_after - f_before) / dt;
  const double rhs =
      0.5 * (moment_rhs(g, before, phi, A, B) + moment_rhs(g, after, phi, A, B));
  return std::abs(lhs - rhs);
}

std::pair<double, double> dissipation_functionals(const MassGrid& g,
                                                  const SectionalState& state,
                                                  const KernelSuite& suite) {
  const int K = g.bins();
  const double s = suite.s;
  double d1 = 0.0;
  for (int i = 0; i < K; ++i) {
    const double fi = state.density[i];
    for (int j = 0; j < K; ++j) {
      const double fj = state.density[j];
      if (fi == 0.0 && fj == 0.0) continue;
      const double a = suite.A(mass_state(g.centers[i]), mass_state(g.centers[j]));
      if (a == 0.0) continue;
      d1 += a * std::max(fi, fj) * std::pow(std::min(fi, fj), s) * g.widths[i] *
            g.widths[j];
    }
  }
  d1 *= 0.5;

  double d2 = 0.0;
  for (int k = 0; k < K; ++k) {
    const double fk = state.density[k];
    if (fk == 0.0) continue;
    const ParticleState parent = mass_state(g.centers[k]);
    double b1_disc = 0.0;
    for (int j = 0; j < k; ++j)
      b1_disc += suite.B(parent, mass_state(g.centers[j])) * g.widths[j];
    d2 += b1_disc * std::pow(fk, s) * g.widths[k];
  }
  d2 *= 0.5 * (s - suite.delta);
  return {d1, d2};
}

namespace {

// per-state integrands of the dissipation inequality with H(u) = u^s
struct LsTerms {
  double d1 = 0.0;         // 1/2 sum A sup inf^s
  double frag_gain = 0.0;  // sum A(y,y') H(B/A') f'
  double frag_diss = 0.0;  // 1/2 sum B f' H'(f')
};

LsTerms ls_terms(const MassGrid& g, const SectionalState& state,
                 const KernelSuite& suite) {
  LsTerms out;
  const int K = g.bins();
  const double s = suite.s;
  auto [d1, d2] = dissipation_functionals(g, state, suite);
  out.d1 = d1;
  for (int k = 0; k < K; ++k) {
    const double fk = state.density[k];
    if (fk == 0.0) continue;
    const ParticleState parent = mass_state(g.centers[k]);
    for (int j = 0; j < k; ++j) {
      const double b = suite.B(parent, mass_state(g.centers[j]));
      if (b == 0.0) continue;
      const double a_prime = suite.A(mass_state(g.centers[j]), parent);
      const double cell = g.widths[j] * g.widths[k];
      if (a_prime > 0.0)
        out.frag_gain += std::pow(b, s) / std::pow(a_prime, s - 1.0) * fk * cell;
      else
        out.frag_gain += std::numeric_limits<double>::infinity();
    }
    double b1_disc = 0.0;
    for (int j = 0; j < k; ++j)
      b1_disc += suite.B(parent, mass_state(g.centers[j])) * g.widths[j];
    out.frag_diss += 0.5 * s * std::pow(fk, s) * b1_disc * g.widths[k];
  }
  return out;
}

}  // namespace

HomoResult run_homogeneous(const HomogeneousConfig& cfg,
                           const SectionalState& initial) {
  const MassGrid g = MassGrid::geometric(cfg.m_min, cfg.m_max, cfg.bins);
  if (initial.density.size() != static_cast<std::size_t>(g.bins()))
    throw std::invalid_argument("run_homogeneous: initial state does not match grid");
  HomoResult res;
  SectionalState state = initial;

  double int_d1 = 0.0, int_gain = 0.0, int_diss = 0.0;
  LsTerms prev_terms = ls_terms(g, state, cfg.suite);
  auto push_row = [&](const SectionalState& s) {
    auto [d1, d2] = dissipation_functionals(g, s, cfg.suite);
    HomoRow row;
    row.t = s.t;
    row.N = s.number(g);
    row.M = s.mass(g);
    row.Ls = functional(g, s, [](double) { return 1.0; },
                        [&](double u) { return std::pow(u, cfg.suite.s); });
    row.D1 = d1;
    row.D2 = d2;
    row.overflow_mass = s.overflow.mass + s.underflow.mass;
    row.int_D1 = int_d1;
    row.int_frag_gain = int_gain;
    row.int_frag_diss = int_diss;
    res.rows.push_back(row);
  };

  push_row(state);
  const int n_cadence = static_cast<int>(std::round(cfg.T / cfg.cadence));
  for (int c = 1; c <= n_cadence; ++c) {
    const double t_target = std::min(cfg.T, c * cfg.cadence);
    while (state.t < t_target - 1e-12 * cfg.T) {
      const double dt_req = std::min(cfg.dt, t_target - state.t);
      const double t_before = state.t;
      (void)t_before;
      const SectionalState before = state;
      const double dt_done = step(g, state, cfg, dt_req, res.counters);
      (void)dt_done;
      const LsTerms now = ls_terms(g, state, cfg.suite);
      const double h = state.t - before.t;
      int_d1 += 0.5 * h * (prev_terms.d1 + now.d1);
      int_gain += 0.5 * h * (prev_terms.frag_gain + now.frag_gain);
      int_diss += 0.5 * h * (prev_terms.frag_diss + now.frag_diss);
      prev_terms = now;
    }
    push_row(state);
  }
  res.final_state = state;
  return res;
}

LsCheckReport ls_dissipation_check(const HomoResult& traj,
                                   double rel_tol) {
  LsCheckReport rep;
  if (traj.rows.empty()) return rep;
  const double ls0 = traj.rows.front().Ls;
  const double scale = std::max(ls0, 1e-300);
  bool frag_active = false;
  for (const auto& row : traj.rows)
    if (row.int_frag_gain != 0.0 || row.int_frag_diss != 0.0 || row.D2 != 0.0)
      frag_active = true;
  rep.pure_coagulation = !frag_active;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.rows.size(); ++i) {
    const auto& row = traj.rows[i];
    if (rep.pure_coagulation && i > 0 &&
        row.Ls > traj.rows[i - 1].Ls * (1.0 + rel_tol))
      rep.nonincreasing = false;
    const double rhs = ls0 - row.int_D1 + row.int_frag_gain - row.int_frag_diss;
    const double margin = rhs - row.Ls;
    rep.rows.push_back({row.t, row.Ls, margin});
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -rel_tol * scale) rep.inequality_ok = false;
  }
  return rep;
}

}  // namespace cofra
