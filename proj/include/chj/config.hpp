#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chj/ergodic.hpp"
#include "chj/hamiltonian.hpp"
#include "chj/semigroup.hpp"

namespace chj {

/// Fully resolved run configuration. Loading re-checks every module
/// precondition and rejects unknown keys.
struct RunConfig {
  ModelSpec hamiltonian;
  int grid_dim = 1;
  int n_per_dim = 0;  // 0 -> 128 (1-D) / 64 (2-D)
  SemigroupConfig semigroup;
  // ergodic
  std::pair<double, double> c_search{-2.0, 2.0};
  double tol_c = 0.05;
  double u_box = 10.0;
  std::vector<std::string> probe_names;  // "const:<v>" | "sin"; empty -> defaults
  double t_max = 300.0;
  int opt_iters = 250;
  // ode
  double dt_ode = 1e-3;
  // output
  std::filesystem::path out_dir = "out";
  int snapshot_stride = 0;
  unsigned long long seed = 1;

  TorusGrid make_grid() const;
  std::vector<GridFunction> make_probes(const TorusGrid& grid) const;
  RunCfg make_run_cfg(const HamiltonianModel& model, const TorusGrid& grid) const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text);

/// Serialized echo of the resolved config, written as run.json next to artifacts.
std::string config_to_json(const RunConfig& cfg);

}  // namespace chj
