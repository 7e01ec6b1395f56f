#include "chj/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace chj {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : j.items())
    require(allowed.count(key) > 0, Errc::ConfigError,
            "unknown key '" + key + "' in " + where);
}

ModelSpec parse_model(const json& j) {
  reject_unknown(j, {"name", "params"}, "hamiltonian");
  ModelSpec spec;
  require(j.contains("name") && j["name"].is_string(), Errc::ConfigError,
          "hamiltonian.name must be a string");
  spec.name = j["name"].get<std::string>();
  if (j.contains("params")) {
    require(j["params"].is_object(), Errc::ConfigError, "hamiltonian.params must be an object");
    for (const auto& [key, val] : j["params"].items()) {
      if (val.is_number())
        spec.params[key] = val.get<double>();
      else if (val.is_string())
        spec.params[key] = val.get<std::string>();
      else if (val.is_array())
        spec.params[key] = val.get<std::vector<double>>();
      else
        fail(Errc::ConfigError, "hamiltonian.params." + key + " must be number, string or array");
    }
  }
  return spec;
}

Scheme parse_scheme(const std::string& s) {
  if (s == "semi_lagrangian") return Scheme::SemiLagrangian;
  if (s == "lax_friedrichs") return Scheme::LaxFriedrichs;
  fail(Errc::ConfigError, "semigroup.scheme must be semi_lagrangian or lax_friedrichs");
}

UCoupling parse_coupling(const std::string& s) {
  if (s == "explicit") return UCoupling::Explicit;
  if (s == "implicit") return UCoupling::Implicit;
  fail(Errc::ConfigError, "semigroup.u_coupling must be explicit or implicit");
}

}  // namespace

TorusGrid RunConfig::make_grid() const {
  int n = n_per_dim > 0 ? n_per_dim : (grid_dim == 1 ? 128 : 64);
  return TorusGrid(grid_dim, n);
}

std::vector<GridFunction> RunConfig::make_probes(const TorusGrid& grid) const {
  if (probe_names.empty()) return default_probes(grid);
  std::vector<GridFunction> probes;
  for (const std::string& name : probe_names) {
    if (name == "sin") {
      probes.push_back(GridFunction::sample(
          grid, [](const Vec& x) { return std::sin(2.0 * std::numbers::pi * x[0]); }));
    } else if (name.rfind("const:", 0) == 0) {
      probes.push_back(GridFunction::constant(grid, std::stod(name.substr(6))));
    } else {
      fail(Errc::ConfigError, "unknown probe '" + name + "' (const:<v> | sin)");
    }
  }
  return probes;
}

RunCfg RunConfig::make_run_cfg(const HamiltonianModel& model, const TorusGrid& grid) const {
  RunCfg rc;
  rc.sg = resolve_config(model, grid, semigroup);
  rc.t_max = t_max;
  return rc;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Errc::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"hamiltonian", "grid", "semigroup", "ergodic", "ode", "output"}, "config");
  require(j.contains("hamiltonian"), Errc::ConfigError, "config needs a hamiltonian table");

  RunConfig cfg;
  cfg.hamiltonian = parse_model(j["hamiltonian"]);

  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, {"dim", "n_per_dim"}, "grid");
    if (g.contains("dim")) cfg.grid_dim = g["dim"].get<int>();
    if (g.contains("n_per_dim")) cfg.n_per_dim = g["n_per_dim"].get<int>();
  }
  cfg.hamiltonian.dim = cfg.grid_dim;

  if (j.contains("semigroup")) {
    const json& s = j["semigroup"];
    reject_unknown(s, {"dt", "v_max", "scheme", "u_coupling", "dv", "lf_viscosity", "lf_p_range"},
                   "semigroup");
    if (s.contains("dt")) cfg.semigroup.dt = s["dt"].get<double>();
    if (s.contains("v_max")) cfg.semigroup.v_max = s["v_max"].get<double>();
    if (s.contains("scheme")) cfg.semigroup.scheme = parse_scheme(s["scheme"].get<std::string>());
    if (s.contains("u_coupling"))
      cfg.semigroup.u_coupling = parse_coupling(s["u_coupling"].get<std::string>());
    if (s.contains("dv")) cfg.semigroup.dv = s["dv"].get<double>();
    if (s.contains("lf_viscosity")) cfg.semigroup.lf_viscosity = s["lf_viscosity"].get<double>();
    if (s.contains("lf_p_range")) cfg.semigroup.lf_p_range = s["lf_p_range"].get<double>();
  }

  if (j.contains("ergodic")) {
    const json& e = j["ergodic"];
    reject_unknown(e, {"c_search", "tol_c", "u_box", "probes", "t_max", "opt_iters"}, "ergodic");
    if (e.contains("c_search")) {
      auto v = e["c_search"].get<std::vector<double>>();
      require(v.size() == 2 && v[0] < v[1], Errc::ConfigError,
              "ergodic.c_search must be [lo, hi] with lo < hi");
      cfg.c_search = {v[0], v[1]};
    }
    if (e.contains("tol_c")) cfg.tol_c = e["tol_c"].get<double>();
    if (e.contains("u_box")) cfg.u_box = e["u_box"].get<double>();
    if (e.contains("probes")) cfg.probe_names = e["probes"].get<std::vector<std::string>>();
    if (e.contains("t_max")) cfg.t_max = e["t_max"].get<double>();
    if (e.contains("opt_iters")) cfg.opt_iters = e["opt_iters"].get<int>();
  }

  if (j.contains("ode")) {
    reject_unknown(j["ode"], {"dt_ode"}, "ode");
    if (j["ode"].contains("dt_ode")) cfg.dt_ode = j["ode"]["dt_ode"].get<double>();
    require(cfg.dt_ode > 0.0, Errc::ConfigError, "ode.dt_ode must be positive");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, {"directory", "snapshot_stride", "seed"}, "output");
    if (o.contains("directory")) cfg.out_dir = o["directory"].get<std::string>();
    if (o.contains("snapshot_stride")) cfg.snapshot_stride = o["snapshot_stride"].get<int>();
    if (o.contains("seed")) cfg.seed = o["seed"].get<unsigned long long>();
  }

  require(cfg.tol_c > 0.0, Errc::ConfigError, "ergodic.tol_c must be positive");
  require(cfg.u_box > 0.0, Errc::ConfigError, "ergodic.u_box must be positive");
  require(cfg.t_max > 0.0, Errc::ConfigError, "ergodic.t_max must be positive");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.is_open(), Errc::ConfigError, "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  json params = json::object();
  for (const auto& [key, val] : cfg.hamiltonian.params) {
    if (const double* d = std::get_if<double>(&val))
      params[key] = *d;
    else if (const std::string* s = std::get_if<std::string>(&val))
      params[key] = *s;
    else if (const std::vector<double>* v = std::get_if<std::vector<double>>(&val))
      params[key] = *v;
  }
  j["hamiltonian"] = {{"name", cfg.hamiltonian.name}, {"params", params}};
  j["grid"] = {{"dim", cfg.grid_dim}, {"n_per_dim", cfg.make_grid().n}};
  j["semigroup"] = {
      {"dt", cfg.semigroup.dt},
      {"v_max", cfg.semigroup.v_max},
      {"scheme", cfg.semigroup.scheme == Scheme::SemiLagrangian ? "semi_lagrangian"
                                                                : "lax_friedrichs"},
      {"u_coupling", cfg.semigroup.u_coupling == UCoupling::Explicit ? "explicit" : "implicit"},
      {"dv", cfg.semigroup.dv}};
  j["ergodic"] = {{"c_search", {cfg.c_search.first, cfg.c_search.second}},
                  {"tol_c", cfg.tol_c},
                  {"u_box", cfg.u_box},
                  {"t_max", cfg.t_max},
                  {"opt_iters", cfg.opt_iters}};
  j["ode"] = {{"dt_ode", cfg.dt_ode}};
  j["output"] = {{"directory", cfg.out_dir.string()},
                 {"snapshot_stride", cfg.snapshot_stride},
                 {"seed", cfg.seed}};
  return j.dump(2);
}

}  // namespace chj
