#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "chj/config.hpp"
#include "chj/io.hpp"
#include "test_support.hpp"

using namespace chj;
using namespace chj::test;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("config_io");

namespace {

const char* kConfig = R"({
  "hamiltonian": {"name": "quadratic_plus_f", "params": {"f": "tanh", "a": 1.0}},
  "grid": {"dim": 1, "n_per_dim": 64},
  "semigroup": {"dt": 0.004, "u_coupling": "explicit"},
  "ergodic": {"c_search": [-2, 2], "tol_c": 0.1, "u_box": 8, "probes": ["const:-1", "sin"], "t_max": 50},
  "ode": {"dt_ode": 0.002},
  "output": {"directory": "/tmp/chj_cfg_test", "seed": 42}
})";

fs::path temp_file(const std::string& name, const std::string& text) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig cfg = parse_config(kConfig);
  CHECK(cfg.hamiltonian.name == "quadratic_plus_f");
  CHECK(cfg.grid_dim == 1);
  CHECK(cfg.n_per_dim == 64);
  CHECK(cfg.semigroup.dt == doctest::Approx(0.004));
  CHECK(cfg.tol_c == doctest::Approx(0.1));
  CHECK(cfg.u_box == doctest::Approx(8.0));
  CHECK(cfg.t_max == doctest::Approx(50.0));
  CHECK(cfg.dt_ode == doctest::Approx(0.002));
  CHECK(cfg.seed == 42);

  TorusGrid g = cfg.make_grid();
  CHECK(g.n == 64);
  std::vector<GridFunction> probes = cfg.make_probes(g);
  REQUIRE(probes.size() == 2);
  CHECK(probes[0].max() == -1.0);

  HamiltonianModel m = build_model(cfg.hamiltonian);
  RunCfg rc = cfg.make_run_cfg(m, g);
  CHECK(rc.sg.dt == doctest::Approx(0.004));

  // the echo parses back to the same resolved values
  RunConfig echo = parse_config(config_to_json(cfg));
  CHECK(echo.semigroup.dt == cfg.semigroup.dt);
  CHECK(echo.seed == cfg.seed);
  CHECK(echo.hamiltonian.name == cfg.hamiltonian.name);
}

TEST_CASE("config rejects unknown keys and bad values") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"hamiltonian": {"name": "quadratic"}, "grids": {}})"),
                       doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"hamiltonian": {"name": "quadratic", "typo": 1}})"),
      doctest::Contains("unknown key"), Error);
  CHECK_THROWS_AS(parse_config(R"({"hamiltonian": {"name": "quadratic"}, "ergodic": {"c_search": [2, -2]}})"),
                  Error);
  CHECK_THROWS_AS(parse_config("not json"), Error);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"dim": 1}})"), Error);  // hamiltonian missing
  CHECK_THROWS_AS(load_config("/nonexistent/path.json"), Error);
}

TEST_CASE("grid defaults depend on the dimension") {
  RunConfig c1 = parse_config(R"({"hamiltonian": {"name": "quadratic"}})");
  CHECK(c1.make_grid().n == 128);
  RunConfig c2 = parse_config(R"({"hamiltonian": {"name": "quadratic"}, "grid": {"dim": 2}})");
  CHECK(c2.make_grid().n == 64);
}

TEST_CASE("csv export uses 17 significant digits and reimports exactly") {
  TorusGrid g(1, 16);
  std::mt19937_64 rng(7);
  GridFunction f = random_profile(g, rng);
  fs::path p = fs::temp_directory_path() / "chj_grid_io.csv";
  write_grid_csv(p, f);

  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,value");
  for (int i = 0; i < f.size(); ++i) {
    std::string line;
    REQUIRE(std::getline(in, line));
    auto comma = line.find(',');
    double v = std::stod(line.substr(comma + 1));
    CHECK(v == f[i]);  // %.17g round-trips doubles exactly
  }
  fs::remove(p);
}

TEST_CASE("trace and summary serialization") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  SemigroupConfig cfg = resolve_config(m, g, SemigroupConfig{});
  cfg.c = 0.25;
  EvolutionTrace tr = evolve(m, cfg, GridFunction::constant(g, 0.0), 80.0);
  fs::path p = fs::temp_directory_path() / "chj_trace_io.csv";
  write_trace_csv(p, tr);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,min,max,sup_increment");
  size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == tr.times.size());
  fs::remove(p);

  std::string summary = trace_summary_json(tr, Outcome::DivergesUp);
  CHECK(summary.find("\"diverged_up\"") != std::string::npos);
  CHECK(summary.find("measured_rate") != std::string::npos);
}

TEST_CASE("classification and interval reports") {
  Classification cls;
  cls.outcome = Outcome::Bounded;
  cls.evidence.stop = StopReason::Converged;
  cls.evidence.probe = "min_envelope";
  cls.residual = 1.5e-3;
  std::string j = classification_to_json(cls);
  CHECK(j.find("\"bounded\"") != std::string::npos);
  CHECK(j.find("min_envelope") != std::string::npos);

  IntervalEstimate est;
  est.tol_c = 0.05;
  est.c_l = {-1.05, -1.0, false, false};
  est.c_r = {1.0, 1.05, false, false};
  est.samples = {{-1.02, Outcome::DivergesDown}, {0.0, Outcome::Bounded},
                 {1.02, Outcome::DivergesUp}};
  OptimizerResult cl{-0.99, GridFunction(TorusGrid(1, 8)), false};
  OptimizerResult cr{0.99, GridFunction(TorusGrid(1, 8)), false};
  std::string ij = interval_to_json(est, cl, cr, 10.0);
  CHECK(ij.find("c_l_bracket") != std::string::npos);
  CHECK(ij.find("membership_samples") != std::string::npos);
  // samples near the brackets carry the marginal flag
  CHECK(ij.find("\"marginal\": true") != std::string::npos);
}

TEST_SUITE_END();
