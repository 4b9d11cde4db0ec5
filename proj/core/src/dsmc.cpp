#include "cofra/dsmc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "cofra/parallel.hpp"

namespace cofra {

Vec3 Domain::wrap(const Vec3& v) const {
  auto w = [this](double c) {
    double r = std::fmod(c, L);
    if (r < 0.0) r += L;
    return r == L ? 0.0 : r;
  };
  return {w(v.x), w(v.y), w(v.z)};
}

int Domain::cell_index(const Vec3& wrapped) const {
  const int n = cells_per_axis;
  auto axis = [&](double c) {
    return std::min(static_cast<int>(c / L * n), n - 1);
  };
  return (axis(wrapped.x) * n + axis(wrapped.y)) * n + axis(wrapped.z);
}

Moments moments(const Ensemble& e) {
  Moments m;
  for (const auto& sp : e.particles) {
    m.N += sp.w;
    m.M += sp.w * sp.y.m;
    m.P += sp.w * sp.y.p;
    m.Ekin += sp.w * kinetic_energy(sp.y);
    m.Eint += sp.w * sp.y.e;
    m.Mx2 += sp.w * sp.y.m * norm2(sp.x_free);
  }
  return m;
}

MomentRow moment_row(double t, const Ensemble& e) {
  const Moments m = moments(e);
  return {t, m.N, m.M, m.P, m.Ekin, m.Eint, m.Etot(), m.Mx2};
}

void StepStats::merge(const StepStats& o) {
  coag_candidates += o.coag_candidates;
  coag_events += o.coag_events;
  frag_trials += o.frag_trials;
  frag_events += o.frag_events;
  frag_skips += o.frag_skips;
  max_mass_residual = std::max(max_mass_residual, o.max_mass_residual);
  max_momentum_residual = std::max(max_momentum_residual, o.max_momentum_residual);
  max_energy_residual = std::max(max_energy_residual, o.max_energy_residual);
}

MajorantBreach::MajorantBreach(const ParticleState& a, const ParticleState& b,
                               double v, double maj)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "coagulation majorant breached: A = " << v << " > " << maj
           << " at masses " << a.m << ", " << b.m;
        return os.str();
      }()),
      y(a),
      y_star(b),
      value(v),
      majorant(maj) {}

Ensemble init_ensemble(const DsmcConfig& cfg, const InitSpec& spec) {
  if (cfg.particles == 0)
    throw std::invalid_argument("init_ensemble: empty ensemble");
  auto param = [&](const std::string& k, double dflt) {
    auto it = spec.params.find(k);
    return it == spec.params.end() ? dflt : it->second;
  };

  Ensemble e;
  e.domain = cfg.domain;
  e.weight =
      spec.number_density * cfg.domain.volume() / static_cast<double>(cfg.particles);
  e.particles.reserve(cfg.particles);

  StreamKey key(cfg.seed, Phase::dsmc_init);
  for (std::uint64_t i = 0; i < cfg.particles; ++i) {
    SimParticle sp;
    sp.w = e.weight;
    sp.x = {key.uniform() * cfg.domain.L, key.uniform() * cfg.domain.L,
            key.uniform() * cfg.domain.L};
    sp.x_free = sp.x;
    if (spec.name == "monodisperse") {
      sp.y = {param("m", 1.0),
              Vec3{param("px", 0.0), param("py", 0.0), param("pz", 0.0)},
              param("e", 1.0)};
    } else if (spec.name == "two_beam") {
      const double pm = param("p", 1.0);
      sp.y = {param("m", 1.0), Vec3{(i % 2 == 0) ? pm : -pm, 0.0, 0.0},
              param("e", 1.0)};
    } else if (spec.name == "product") {
      const double m = key.uniform(param("m_lo", 0.5), param("m_hi", 1.5));
      const double sigma = param("sigma_p", 1.0);
      const Vec3 p{sigma * key.normal(), sigma * key.normal(),
                   sigma * key.normal()};
      const double en = key.uniform(param("e_lo", 0.5), param("e_hi", 1.5));
      sp.y = {m, p, en};
    } else {
      throw std::invalid_argument("init_ensemble: unknown sampler " + spec.name);
    }
    if (!is_valid(sp.y))
      throw std::invalid_argument("init_ensemble: sampler left the state space");
    e.particles.push_back(sp);
  }
  return e;
}

namespace {

std::uint64_t state_hash(const ParticleState& y) {
  auto h = [](double d) { return detail::mix64(std::bit_cast<std::uint64_t>(d)); };
  return h(y.m) ^ (h(y.p.x) * 3) ^ (h(y.p.y) * 5) ^ (h(y.p.z) * 7) ^
         (h(y.e) * 11);
}

}  // namespace

B1Table::B1Table(const FragKernel& B, double m_max, double p_max, double e_max,
                 int grid, std::uint64_t node_samples, std::uint64_t seed)
    : kernel_(&B), seed_(seed) {
  if (B.closed_form_b1) return;
  if (grid < 2 || !(m_max > 0.0) || !(e_max > 0.0) || node_samples < 2)
    return;  // fallback-only mode
  grid_ = grid;
  m_max_ = m_max;
  p_max_ = std::max(p_max, 0.0);
  e_max_ = e_max;
  values_.assign(static_cast<std::size_t>(grid) * grid * grid, 0.0);
  const int g = grid_;
  std::vector<double> errors(values_.size(), 0.0);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      for (int k = 0; k < g; ++k) {
        const double m = m_max_ * i / (g - 1);
        const double q = p_max_ * j / (g - 1);
        const double en = e_max_ * k / (g - 1);
        const std::size_t idx =
            (static_cast<std::size_t>(i) * g + j) * g + k;
        if (m <= 0.0 || en <= 0.0) continue;  // no admissible daughters
        const McEstimate est =
            b1_monte_carlo(B, {m, Vec3{q, 0.0, 0.0}, en}, node_samples,
                           StreamKey(seed_, Phase::b1_cache, idx));
        values_[idx] = est.value;
        errors[idx] = est.std_error;
      }
    }
  }
  // error budget relative to the table scale; nearly-empty support nodes
  // would otherwise dominate with a meaningless per-node ratio
  const double scale = *std::max_element(values_.begin(), values_.end());
  if (scale > 0.0)
    max_rel_se_ = *std::max_element(errors.begin(), errors.end()) / scale;
}

double B1Table::operator()(const ParticleState& yp) const {
  if (kernel_->closed_form_b1) return kernel_->closed_form_b1(yp);
  const double q = norm(yp.p);
  if (grid_ == 0 || yp.m > m_max_ || q > p_max_ || yp.e > e_max_) {
    oob_.fetch_add(1, std::memory_order_relaxed);
    return b1_monte_carlo(*kernel_, yp, 4096,
                          StreamKey(seed_ ^ state_hash(yp), Phase::b1_cache,
                                    0xb1fa11bacull))
        .value;
  }
  const int g = grid_;
  auto locate = [g](double v, double vmax) {
    const double u = vmax > 0.0 ? v / vmax * (g - 1) : 0.0;
    int lo = std::min(static_cast<int>(u), g - 2);
    return std::pair{lo, u - lo};
  };
  const auto [im, fm] = locate(yp.m, m_max_);
  const auto [ip, fp] = locate(q, p_max_);
  const auto [ie, fe] = locate(yp.e, e_max_);
  auto at = [&](int i, int j, int k) {
    return values_[(static_cast<std::size_t>(i) * g + j) * g + k];
  };
  double v = 0.0;
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk)
        v += (di ? fm : 1.0 - fm) * (dj ? fp : 1.0 - fp) * (dk ? fe : 1.0 - fe) *
             at(im + di, ip + dj, ie + dk);
  return std::max(v, 0.0);
}

void transport_step(Ensemble& e, double dt, int threads) {
  const std::size_t n = e.particles.size();
  const std::size_t chunks = threads > 1 ? static_cast<std::size_t>(threads) * 4 : 1;
  const std::size_t span = (n + chunks - 1) / std::max<std::size_t>(chunks, 1);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t lo = c * span, hi = std::min(n, lo + span);
    for (std::size_t i = lo; i < hi; ++i) {
      SimParticle& sp = e.particles[i];
      const Vec3 v = velocity(sp.y);
      sp.x_free += dt * v;
      sp.x = e.domain.wrap(sp.x + dt * v);
    }
  });
}

namespace {

struct CellError {
  enum class Kind { none, majorant_breach, rate_limit, sup_violation } kind =
      Kind::none;
  ParticleState a{}, b{};
  double value = 0.0, bound = 0.0;
};

void event_residuals(double m_sum, const Vec3& p_sum, double e_sum,
                     const ParticleState& out_a, const ParticleState* out_b,
                     StepStats& stats) {
  double m = out_a.m, E = total_energy(out_a);
  Vec3 p = out_a.p;
  if (out_b) {
    m += out_b->m;
    p += out_b->p;
    E += total_energy(*out_b);
  }
  const double p_scale = std::max(norm(p_sum), std::sqrt(2.0 * m_sum * e_sum));
  stats.max_mass_residual =
      std::max(stats.max_mass_residual, std::abs(m - m_sum) / m_sum);
  stats.max_momentum_residual = std::max(
      stats.max_momentum_residual, norm(p - p_sum) / std::max(p_scale, 1e-300));
  stats.max_energy_residual =
      std::max(stats.max_energy_residual, std::abs(E - e_sum) / e_sum);
}

void process_cell_coag(std::vector<SimParticle>& parts, const CoagKernel& A,
                       double dt, double v_cell, double weight, double L,
                       StreamKey key, double rate_dt_limit, StepStats& stats,
                       CellError& err) {
  if (parts.size() < 2) return;
  double sum_m = 0.0, sum_p = 0.0, sum_e = 0.0;
  for (const auto& sp : parts) {
    sum_m += sp.y.m;
    sum_p += norm(sp.y.p);
    sum_e += total_energy(sp.y);
  }
  const double reach = std::max({sum_m, sum_p, sum_e});
  const double majorant = A.local_sup(reach);
  if (!(majorant > 0.0)) return;

  const double per_particle =
      majorant * weight * (static_cast<double>(parts.size()) - 1.0) / v_cell;
  if (dt * per_particle > rate_dt_limit) {
    err.kind = CellError::Kind::rate_limit;
    err.value = dt * per_particle;
    err.bound = rate_dt_limit;
    return;
  }

  double t = 0.0;
  while (parts.size() >= 2) {
    const double n_live = static_cast<double>(parts.size());
    const double cand_rate =
        majorant * weight * n_live * (n_live - 1.0) / (2.0 * v_cell);
    t += -std::log(key.uniform_open()) / cand_rate;
    if (t >= dt) break;
    ++stats.coag_candidates;
    const std::size_t n = parts.size();
    std::size_t i = std::min<std::size_t>(
        static_cast<std::size_t>(key.uniform() * n), n - 1);
    std::size_t j = std::min<std::size_t>(
        static_cast<std::size_t>(key.uniform() * (n - 1)), n - 2);
    if (j >= i) ++j;
    const double a = A(parts[i].y, parts[j].y);
    if (a > majorant * (1.0 + 1e-12)) {
      err.kind = CellError::Kind::majorant_breach;
      err.a = parts[i].y;
      err.b = parts[j].y;
      err.value = a;
      err.bound = majorant;
      return;
    }
    if (key.uniform() * majorant >= a) continue;

    const SimParticle& pi = parts[i];
    const SimParticle& pj = parts[j];
    const double m_sum = pi.y.m + pj.y.m;
    const Vec3 p_sum = pi.y.p + pj.y.p;
    const double e_sum = total_energy(pi.y) + total_energy(pj.y);
    SimParticle child;
    child.w = weight;
    child.y = coalesce(pi.y, pj.y);
    // mass-weighted centroid, minimum image for the wrapped coordinate;
    // concentrating at the centroid can only lower the second space moment
    Vec3 d = pj.x - pi.x;
    d.x -= L * std::round(d.x / L);
    d.y -= L * std::round(d.y / L);
    d.z -= L * std::round(d.z / L);
    child.x = pi.x + (pj.y.m / m_sum) * d;
    auto rewrap = [L](double c) {
      double r = std::fmod(c, L);
      if (r < 0.0) r += L;
      return r == L ? 0.0 : r;
    };
    child.x = {rewrap(child.x.x), rewrap(child.x.y), rewrap(child.x.z)};
    child.x_free = (pi.y.m * pi.x_free + pj.y.m * pj.x_free) / m_sum;
    event_residuals(m_sum, p_sum, e_sum, child.y, nullptr, stats);
    ++stats.coag_events;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    parts[lo] = child;
    parts[hi] = parts.back();
    parts.pop_back();
  }
}

void process_cell_frag(std::vector<SimParticle>& parts, const FragKernel& B,
                       const B1Table& b1_of, double dt, double weight,
                       StreamKey key, StepStats& stats, CellError& err) {
  // the event probability 1 - exp(-B1 dt / 2) is exact for any rate; large
  // rates only coarsen the in-step cascade (daughters fragment next step)
  RejectionControl ctl;
  ctl.attempt_cap = 50'000;
  const std::size_t n0 = parts.size();
  for (std::size_t idx = 0; idx < n0; ++idx) {
    const double b1v = b1_of(parts[idx].y);
    if (!(b1v > 0.0)) continue;
    ++stats.frag_trials;
    const double q = 1.0 - std::exp(-0.5 * b1v * dt);
    if (key.uniform() >= q) continue;

    const ParticleState parent = parts[idx].y;
    DensitySampleError derr;
    const auto daughter = sample_density_on_admissible(parent, B, key, nullptr,
                                                       &derr, ctl);
    if (!daughter) {
      if (derr.kind == DensitySampleError::Kind::sup_bound_violated) {
        err.kind = CellError::Kind::sup_violation;
        err.a = parent;
        err.b = derr.witness;
        err.value = derr.kernel_value;
        err.bound = derr.declared_sup;
        return;
      }
      ++stats.frag_skips;
      continue;
    }
    const ParticleState rest = split(parent, *daughter);
    event_residuals(parent.m, parent.p, total_energy(parent), *daughter, &rest,
                    stats);
    const Vec3 x = parts[idx].x;
    const Vec3 xf = parts[idx].x_free;
    parts[idx].y = *daughter;
    parts.push_back({weight, x, xf, rest});
    ++stats.frag_events;
  }
}

std::vector<std::vector<SimParticle>> split_by_cell(const Ensemble& e) {
  std::vector<std::vector<SimParticle>> cells(e.domain.cell_count());
  for (const auto& sp : e.particles)
    cells[e.domain.cell_index(sp.x)].push_back(sp);
  return cells;
}

void gather_cells(Ensemble& e, std::vector<std::vector<SimParticle>>& cells) {
  e.particles.clear();
  for (auto& c : cells)
    e.particles.insert(e.particles.end(), c.begin(), c.end());
}

void raise_cell_error(const CellError& err) {
  switch (err.kind) {
    case CellError::Kind::majorant_breach:
      throw MajorantBreach(err.a, err.b, err.value, err.bound);
    case CellError::Kind::rate_limit: {
      std::ostringstream os;
      os << "dsmc: dt x per-particle event rate " << err.value
         << " exceeds the limit " << err.bound << "; reduce dt";
      throw std::runtime_error(os.str());
    }
    case CellError::Kind::sup_violation: {
      std::ostringstream os;
      os << "fragmentation kernel exceeded its declared daughter bound: B = "
         << err.value << " > " << err.bound << " at parent mass " << err.a.m;
      throw std::runtime_error(os.str());
    }
    default:
      break;
  }
}

}  // namespace

StepStats coag_step(Ensemble& e, const CoagKernel& A, double dt,
                    std::uint64_t seed, std::uint64_t step_index, int threads,
                    double rate_dt_limit) {
  auto cells = split_by_cell(e);
  std::vector<StepStats> stats(cells.size());
  std::vector<CellError> errors(cells.size());
  const double v_cell = e.domain.cell_volume();
  const double w = e.weight;
  const double L = e.domain.L;
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    StreamKey key(seed, Phase::dsmc_coag, step_index, c);
    process_cell_coag(cells[c], A, dt, v_cell, w, L, key, rate_dt_limit,
                      stats[c], errors[c]);
  });
  for (const auto& err : errors) raise_cell_error(err);
  gather_cells(e, cells);
  StepStats total;
  for (const auto& s : stats) total.merge(s);
  return total;
}

StepStats frag_step(Ensemble& e, const FragKernel& B, const B1Table& b1_table,
                    double dt, std::uint64_t seed, std::uint64_t step_index,
                    int threads) {
  auto cells = split_by_cell(e);
  std::vector<StepStats> stats(cells.size());
  std::vector<CellError> errors(cells.size());
  const double w = e.weight;
  parallel_for(cells.size(), threads, [&](std::size_t c) {
    StreamKey key(seed, Phase::dsmc_frag, step_index, c);
    process_cell_frag(cells[c], B, b1_table, dt, w, key, stats[c], errors[c]);
  });
  for (const auto& err : errors) raise_cell_error(err);
  gather_cells(e, cells);
  StepStats total;
  for (const auto& s : stats) total.merge(s);
  return total;
}

DsmcResult run_dsmc(const DsmcConfig& cfg, const InitSpec& spec) {
  if (cfg.suite.B.mass_only && cfg.suite.B.name != "zero")
    throw std::invalid_argument(
        "dsmc: fragmentation kernel must be symmetric in the two daughters; "
        "mass-only kernels belong to the homogeneous solver");
  const auto steps_per_cadence =
      static_cast<std::uint64_t>(std::llround(cfg.cadence / cfg.dt));
  const auto n_cadences =
      static_cast<std::uint64_t>(std::llround(cfg.T / cfg.cadence));
  if (steps_per_cadence == 0 || n_cadences == 0 ||
      std::abs(steps_per_cadence * cfg.dt - cfg.cadence) > 1e-9 * cfg.cadence ||
      std::abs(n_cadences * cfg.cadence - cfg.T) > 1e-9 * cfg.T)
    throw std::invalid_argument(
        "dsmc: cadence must be a multiple of dt and T a multiple of cadence");

  DsmcResult res;
  Ensemble e = init_ensemble(cfg, spec);
  res.initial = moments(e);

  double max_m = 0.0, max_p = 0.0, max_E = 0.0;
  for (const auto& sp : e.particles) {
    max_m = std::max(max_m, sp.y.m);
    max_p = std::max(max_p, norm(sp.y.p));
    max_E = std::max(max_E, total_energy(sp.y));
  }
  const double span = 16.0;
  B1Table b1_table(cfg.suite.B, span * max_m,
                   span * std::max(max_p, std::sqrt(2.0 * max_m * max_E)),
                   span * max_E, cfg.b1_grid, cfg.b1_node_samples, cfg.seed);

  res.series.rows.push_back(moment_row(0.0, e));
  res.ledger.rows.push_back({});  // initial row

  const double p_scale = std::max(
      {1e-300, std::abs(res.initial.P.x) + std::abs(res.initial.P.y) +
                   std::abs(res.initial.P.z),
       std::sqrt(2.0 * res.initial.M * res.initial.Etot())});

  std::uint64_t step_index = 0;
  for (std::uint64_t c = 1; c <= n_cadences; ++c) {
    StepStats batch;
    for (std::uint64_t s = 0; s < steps_per_cadence; ++s) {
      ++step_index;
      transport_step(e, cfg.dt, cfg.threads);
      batch.merge(coag_step(e, cfg.suite.A, cfg.dt, cfg.seed, step_index,
                            cfg.threads, cfg.rate_dt_limit));
      batch.merge(frag_step(e, cfg.suite.B, b1_table, cfg.dt, cfg.seed,
                            step_index, cfg.threads));
      if (e.particles.size() <=
          static_cast<std::size_t>(cfg.population_low_factor * cfg.particles)) {
        const std::size_t n = e.particles.size();
        e.weight *= 0.5;
        e.particles.reserve(2 * n);
        for (std::size_t i = 0; i < n; ++i)
          e.particles.push_back(e.particles[i]);
        for (auto& sp : e.particles) sp.w = e.weight;
        ++res.population_doublings;
      }
    }
    const double t = c * cfg.cadence;
    res.series.rows.push_back(moment_row(t, e));
    const MomentRow& row = res.series.rows.back();
    LedgerRow lr;
    lr.t = t;
    lr.coag_candidates = batch.coag_candidates;
    lr.coag_events = batch.coag_events;
    lr.frag_trials = batch.frag_trials;
    lr.frag_events = batch.frag_events;
    lr.frag_skips = batch.frag_skips;
    lr.acceptance_rate =
        batch.coag_candidates == 0
            ? 0.0
            : static_cast<double>(batch.coag_events) / batch.coag_candidates;
    lr.max_mass_residual = batch.max_mass_residual;
    lr.max_momentum_residual = batch.max_momentum_residual;
    lr.max_energy_residual = batch.max_energy_residual;
    lr.drift_M = std::abs(row.M - res.initial.M) / std::max(res.initial.M, 1e-300);
    lr.drift_Px = std::abs(row.P.x - res.initial.P.x) / p_scale;
    lr.drift_Py = std::abs(row.P.y - res.initial.P.y) / p_scale;
    lr.drift_Pz = std::abs(row.P.z - res.initial.P.z) / p_scale;
    lr.drift_E =
        std::abs(row.Etot - res.initial.Etot()) / std::max(res.initial.Etot(), 1e-300);
    res.ledger.rows.push_back(lr);
  }
  res.steps = step_index;
  res.b1_cache_max_rel_error = b1_table.max_node_rel_error();
  res.b1_out_of_range = b1_table.out_of_range_queries();
  res.final_ensemble = std::move(e);
  return res;
}

}  // namespace cofra
