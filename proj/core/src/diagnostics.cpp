#include "cofra/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cofra/dsmc.hpp"
#include "cofra/sectional.hpp"
#include "json.hpp"

namespace cofra {

double gronwall_bound(double N0, double M0, double E0, double C, double T) {
  return (N0 + C * T * (M0 + E0)) * std::exp(C * T) + M0 + E0;
}

bool EstimateCheckReport::all_pass() const {
  return std::all_of(items.begin(), items.end(),
                     [](const EstimateCheckItem& i) { return i.pass; });
}

const EstimateCheckItem* EstimateCheckReport::find(const std::string& name) const {
  for (const auto& i : items)
    if (i.name == name) return &i;
  return nullptr;
}

EstimateCheckReport check_estimates(const MomentSeries& series,
                                    const EstimateCheckInputs& in) {
  if (series.rows.empty())
    throw std::invalid_argument("check_estimates: empty series");
  EstimateCheckReport rep;
  const MomentRow& first = series.rows.front();
  const double p_scale =
      std::max({1e-300,
                std::abs(first.P.x) + std::abs(first.P.y) + std::abs(first.P.z),
                std::sqrt(2.0 * first.M * first.Etot)});

  auto drift_item = [&](const std::string& name, auto&& value_of, double scale) {
    EstimateCheckItem item{name, true, in.conservation_tol, -1};
    for (std::size_t r = 0; r < series.rows.size(); ++r) {
      const double drift =
          std::abs(value_of(series.rows[r]) - value_of(first)) / scale;
      const double margin = in.conservation_tol - drift;
      if (margin < item.worst_margin) {
        item.worst_margin = margin;
        item.worst_row = static_cast<int>(r);
      }
    }
    item.pass = item.worst_margin >= 0.0;
    rep.items.push_back(item);
  };

  drift_item("mass_conservation", [](const MomentRow& r) { return r.M; },
             std::max(first.M, 1e-300));
  drift_item("momentum_conservation_x", [](const MomentRow& r) { return r.P.x; },
             p_scale);
  drift_item("momentum_conservation_y", [](const MomentRow& r) { return r.P.y; },
             p_scale);
  drift_item("momentum_conservation_z", [](const MomentRow& r) { return r.P.z; },
             p_scale);
  drift_item("energy_conservation", [](const MomentRow& r) { return r.Etot; },
             std::max(first.Etot, 1e-300));

  {
    EstimateCheckItem item{"particle_count_bound", true, 0.0, -1};
    const double bound = gronwall_bound(in.N0, in.M0, in.E0, in.C, in.T);
    item.worst_margin = bound;
    for (std::size_t r = 0; r < series.rows.size(); ++r) {
      const double margin = bound - series.rows[r].N;
      if (margin < item.worst_margin) {
        item.worst_margin = margin;
        item.worst_row = static_cast<int>(r);
      }
    }
    item.pass = item.worst_margin >= 0.0;
    rep.items.push_back(item);
  }

  {
    // discrete slope of the second space moment against the
    // Cauchy-Schwarz rate, with the O(dt) slack of free flight
    EstimateCheckItem item{"space_moment_slope", true, 0.0, -1};
    item.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r + 1 < series.rows.size(); ++r) {
      const MomentRow& a = series.rows[r];
      const MomentRow& b = series.rows[r + 1];
      const double h = b.t - a.t;
      if (!(h > 0.0)) continue;
      const double slope = (b.Mx2 - a.Mx2) / h;
      const double mx2 = std::max(a.Mx2, b.Mx2);
      const double ekin = std::max(a.Ekin, b.Ekin);
      const double bound = 2.0 * std::sqrt(2.0 * mx2 * ekin) +
                           2.0 * ekin * in.dt + in.slope_abs_tol;
      const double margin = bound - slope;
      if (margin < item.worst_margin) {
        item.worst_margin = margin;
        item.worst_row = static_cast<int>(r + 1);
      }
    }
    if (!std::isfinite(item.worst_margin)) item.worst_margin = 0.0;
    item.pass = item.worst_margin >= 0.0;
    rep.items.push_back(item);
  }
  return rep;
}

std::uint64_t content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{})
    throw std::runtime_error("csv: bad number: " + std::string(s));
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{})
    throw std::runtime_error("csv: bad integer: " + std::string(s));
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

}  // namespace

void write_moment_series_csv(const MomentSeries& s, const std::string& path) {
  auto f = open_out(path);
  f << "t,N,M,Px,Py,Pz,Ekin,Eint,Etot,Mx2\n";
  for (const auto& r : s.rows) {
    f << format_double(r.t) << ',' << format_double(r.N) << ','
      << format_double(r.M) << ',' << format_double(r.P.x) << ','
      << format_double(r.P.y) << ',' << format_double(r.P.z) << ','
      << format_double(r.Ekin) << ',' << format_double(r.Eint) << ','
      << format_double(r.Etot) << ',' << format_double(r.Mx2) << '\n';
  }
}

MomentSeries read_moment_series_csv(const std::string& path) {
  auto f = open_in(path);
  MomentSeries s;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 10) throw std::runtime_error("csv: bad moment row");
    MomentRow r;
    r.t = parse_double(c[0]);
    r.N = parse_double(c[1]);
    r.M = parse_double(c[2]);
    r.P = {parse_double(c[3]), parse_double(c[4]), parse_double(c[5])};
    r.Ekin = parse_double(c[6]);
    r.Eint = parse_double(c[7]);
    r.Etot = parse_double(c[8]);
    r.Mx2 = parse_double(c[9]);
    s.rows.push_back(r);
  }
  return s;
}

void write_ledger_csv(const ConservationLedger& l, const std::string& path) {
  auto f = open_out(path);
  f << "t,coag_candidates,coag_events,frag_trials,frag_events,frag_skips,"
       "acceptance_rate,max_mass_residual,max_momentum_residual,"
       "max_energy_residual,drift_M,drift_Px,drift_Py,drift_Pz,drift_E\n";
  for (const auto& r : l.rows) {
    f << format_double(r.t) << ',' << r.coag_candidates << ',' << r.coag_events
      << ',' << r.frag_trials << ',' << r.frag_events << ',' << r.frag_skips
      << ',' << format_double(r.acceptance_rate) << ','
      << format_double(r.max_mass_residual) << ','
      << format_double(r.max_momentum_residual) << ','
      << format_double(r.max_energy_residual) << ','
      << format_double(r.drift_M) << ',' << format_double(r.drift_Px) << ','
      << format_double(r.drift_Py) << ',' << format_double(r.drift_Pz) << ','
      << format_double(r.drift_E) << '\n';
  }
}

ConservationLedger read_ledger_csv(const std::string& path) {
  auto f = open_in(path);
  ConservationLedger l;
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 15) throw std::runtime_error("csv: bad ledger row");
    LedgerRow r;
    r.t = parse_double(c[0]);
    r.coag_candidates = parse_u64(c[1]);
    r.coag_events = parse_u64(c[2]);
    r.frag_trials = parse_u64(c[3]);
    r.frag_events = parse_u64(c[4]);
    r.frag_skips = parse_u64(c[5]);
    r.acceptance_rate = parse_double(c[6]);
    r.max_mass_residual = parse_double(c[7]);
    r.max_momentum_residual = parse_double(c[8]);
    r.max_energy_residual = parse_double(c[9]);
    r.drift_M = parse_double(c[10]);
    r.drift_Px = parse_double(c[11]);
    r.drift_Py = parse_double(c[12]);
    r.drift_Pz = parse_double(c[13]);
    r.drift_E = parse_double(c[14]);
    l.rows.push_back(r);
  }
  return l;
}

void write_homo_series_csv(const HomoResult& r, const std::string& path) {
  auto f = open_out(path);
  f << "t,N,M,Ls,D1,D2,overflow_mass\n";
  for (const auto& row : r.rows) {
    f << format_double(row.t) << ',' << format_double(row.N) << ','
      << format_double(row.M) << ',' << format_double(row.Ls) << ','
      << format_double(row.D1) << ',' << format_double(row.D2) << ','
      << format_double(row.overflow_mass) << '\n';
  }
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["kernels"] = m.kernel_names;
  j["audit_report"] = m.audit_report;
  nlohmann::json extras = nlohmann::json::object();
  for (const auto& [k, v] : m.extras) extras[k] = v;
  j["extras"] = extras;
  return j.dump(2);
}

void write_manifest(const RunManifest& m, const std::string& path) {
  auto f = open_out(path);
  f << manifest_json(m) << '\n';
}

double empirical_ls(const std::vector<SimParticle>& particles, double s,
                    int bins_m, int bins_e) {
  if (particles.empty() || bins_m < 1 || bins_e < 1) return 0.0;
  double m_lo = particles[0].y.m, m_hi = m_lo;
  double e_lo = particles[0].y.e, e_hi = e_lo;
  for (const auto& sp : particles) {
    m_lo = std::min(m_lo, sp.y.m);
    m_hi = std::max(m_hi, sp.y.m);
    e_lo = std::min(e_lo, sp.y.e);
    e_hi = std::max(e_hi, sp.y.e);
  }
  const double dm = std::max(m_hi - m_lo, 1e-300) / bins_m;
  const double de = std::max(e_hi - e_lo, 1e-300) / bins_e;
  std::vector<double> hist(static_cast<std::size_t>(bins_m) * bins_e, 0.0);
  for (const auto& sp : particles) {
    const int im = std::min(static_cast<int>((sp.y.m - m_lo) / dm), bins_m - 1);
    const int ie = std::min(static_cast<int>((sp.y.e - e_lo) / de), bins_e - 1);
    hist[static_cast<std::size_t>(im) * bins_e + ie] += sp.w;
  }
  double ls = 0.0;
  for (double h : hist) {
    if (h > 0.0) ls += std::pow(h / (dm * de), s) * dm * de;
  }
  return ls;
}

}  // namespace cofra
