#include "cofra/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cofra {

namespace {

using nlohmann::json;

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number_at(const json& j, const std::string& path, double dflt) {
  const json* v = find(j, path.substr(path.rfind('.') + 1));
  if (!v) return dflt;
  if (!v->is_number()) throw ConfigError("config: " + path + " must be a number");
  return v->get<double>();
}

ParamMap params_of(const json& j, const std::string& path) {
  ParamMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "name") continue;
    if (!it.value().is_number())
      throw ConfigError("config: " + path + "." + it.key() + " must be a number");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

std::string name_of(const json& j, const std::string& path) {
  const json* v = find(j, "name");
  if (!v || !v->is_string())
    throw ConfigError("config: " + path + ".name must be a string");
  return v->get<std::string>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  RunConfig cfg;
  cfg.canonical = root.dump();

  // suite{s, delta, C0}
  double C0 = 2.0;
  if (const json* suite = find(root, "suite")) {
    cfg.suite.s = number_at(*suite, "suite.s", cfg.suite.s);
    cfg.suite.delta = number_at(*suite, "suite.delta", cfg.suite.delta);
    C0 = number_at(*suite, "suite.C0", C0);
  }
  if (!(cfg.suite.s > 1.0))
    throw ConfigError("config: suite.s must exceed 1");
  if (!(cfg.suite.delta > 0.0 &&
        cfg.suite.delta < 1.0 / (6.0 * cfg.suite.s - 5.0)))
    throw ConfigError("config: suite.delta must lie in (0, 1/(6s-5))");
  if (!(C0 > 1.0)) throw ConfigError("config: suite.C0 must exceed 1");

  // kernels{A{}, B{}}
  std::string a_name = "constant", b_name = "zero";
  ParamMap a_params, b_params;
  if (const json* kernels = find(root, "kernels")) {
    if (const json* a = find(*kernels, "A")) {
      a_name = name_of(*a, "kernels.A");
      a_params = params_of(*a, "kernels.A");
    }
    if (const json* b = find(*kernels, "B")) {
      b_name = name_of(*b, "kernels.B");
      b_params = params_of(*b, "kernels.B");
    }
  }
  try {
    cfg.suite.A = make_coag_kernel(a_name, a_params);
    cfg.suite.B = make_frag_kernel(b_name, b_params, C0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: kernels: ") + e.what());
  }
  cfg.kernel_names = {a_name, b_name};

  if (const json* domain = find(root, "domain")) {
    cfg.domain.L = number_at(*domain, "domain.L", cfg.domain.L);
    cfg.domain.cells_per_axis = static_cast<int>(
        number_at(*domain, "domain.cells", cfg.domain.cells_per_axis));
    if (!(cfg.domain.L > 0.0) || cfg.domain.cells_per_axis < 1)
      throw ConfigError("config: domain.L must be positive, domain.cells >= 1");
  }

  if (const json* grid = find(root, "grid")) {
    cfg.m_min = number_at(*grid, "grid.m_min", cfg.m_min);
    cfg.m_max = number_at(*grid, "grid.m_max", cfg.m_max);
    cfg.bins = static_cast<int>(number_at(*grid, "grid.bins", cfg.bins));
    if (!(cfg.m_min > 0.0 && cfg.m_max > cfg.m_min && cfg.bins >= 2))
      throw ConfigError("config: grid needs 0 < m_min < m_max and bins >= 2");
  }

  if (const json* time = find(root, "time")) {
    cfg.dt = number_at(*time, "time.dt", cfg.dt);
    cfg.T = number_at(*time, "time.T", cfg.T);
    cfg.cadence = number_at(*time, "time.cadence", cfg.cadence);
    if (!(cfg.dt > 0.0 && cfg.T > 0.0 && cfg.cadence > 0.0))
      throw ConfigError("config: time.dt, time.T, time.cadence must be positive");
  }

  if (const json* audit = find(root, "audit")) {
    cfg.audit.samples = static_cast<std::uint64_t>(
        number_at(*audit, "audit.samples", static_cast<double>(cfg.audit.samples)));
    cfg.audit.quadrature_samples = static_cast<std::uint64_t>(
        number_at(*audit, "audit.quadrature_samples",
                  static_cast<double>(cfg.audit.quadrature_samples)));
    cfg.audit.gamma = number_at(*audit, "audit.gamma", cfg.audit.gamma);
    cfg.audit.growth_tol = number_at(*audit, "audit.growth_tol", cfg.audit.growth_tol);
    cfg.audit.integration_radius =
        number_at(*audit, "audit.R", cfg.audit.integration_radius);
    cfg.audit.state_radius =
        number_at(*audit, "audit.state_radius", cfg.audit.state_radius);
    if (const json* radii = find(*audit, "radii")) {
      if (!radii->is_array()) throw ConfigError("config: audit.radii must be an array");
      cfg.audit.growth_radii.clear();
      for (const auto& r : *radii) cfg.audit.growth_radii.push_back(r.get<double>());
    }
    if (const json* radii = find(*audit, "weight_radii")) {
      if (!radii->is_array())
        throw ConfigError("config: audit.weight_radii must be an array");
      cfg.audit.weight_radii.clear();
      for (const auto& r : *radii) cfg.audit.weight_radii.push_back(r.get<double>());
    }
  }

  if (const json* dsmc = find(root, "dsmc")) {
    cfg.particles = static_cast<std::uint64_t>(
        number_at(*dsmc, "dsmc.particles", static_cast<double>(cfg.particles)));
    cfg.threads =
        static_cast<int>(number_at(*dsmc, "dsmc.threads", cfg.threads));
    if (const json* init = find(*dsmc, "init")) {
      cfg.init.name = name_of(*init, "dsmc.init");
      cfg.init.params = params_of(*init, "dsmc.init");
      if (const auto it = cfg.init.params.find("number_density");
          it != cfg.init.params.end()) {
        cfg.init.number_density = it->second;
        cfg.init.params.erase(it);
      }
    }
    if (cfg.particles == 0)
      throw ConfigError("config: dsmc.particles must be positive");
  }

  if (const json* initial = find(root, "initial")) {
    cfg.homo_init_name = name_of(*initial, "initial");
    cfg.homo_m0 = number_at(*initial, "initial.m0", cfg.homo_m0);
    cfg.homo_N0 = number_at(*initial, "initial.N0", cfg.homo_N0);
    if (cfg.homo_init_name != "monodisperse")
      throw ConfigError("config: initial.name must be monodisperse");
  }

  if (const json* seed = find(root, "seed")) {
    if (!seed->is_number_unsigned())
      throw ConfigError("config: seed must be an unsigned integer");
    cfg.seed = seed->get<std::uint64_t>();
  }
  cfg.audit.seed = cfg.seed;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

DsmcConfig dsmc_config(const RunConfig& cfg) {
  DsmcConfig d;
  d.suite = cfg.suite;
  d.domain = cfg.domain;
  d.particles = cfg.particles;
  d.dt = cfg.dt;
  d.T = cfg.T;
  d.cadence = cfg.cadence;
  d.seed = cfg.seed;
  d.threads = cfg.threads;
  return d;
}

HomogeneousConfig homogeneous_config(const RunConfig& cfg) {
  HomogeneousConfig h;
  h.suite = cfg.suite;
  h.m_min = cfg.m_min;
  h.m_max = cfg.m_max;
  h.bins = cfg.bins;
  h.dt = cfg.dt;
  h.T = cfg.T;
  h.cadence = cfg.cadence;
  return h;
}

}  // namespace cofra
