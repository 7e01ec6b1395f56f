#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chj/errors.hpp"

namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli");

namespace {

struct RunResult {
  int exit_code = -1;
  std::string dir;
};

std::string cli_path() { return CHJ_CLI_PATH; }

fs::path work_dir() {
  fs::path p = fs::temp_directory_path() / "chj_cli_tests";
  fs::create_directories(p);
  return p;
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

int run_cli(const std::string& args) {
  std::string cmd = cli_path() + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kQuadConfig = R"({
  "hamiltonian": {"name": "quadratic"},
  "grid": {"dim": 1, "n_per_dim": 128},
  "ergodic": {"c_search": [-0.5, 0.5], "tol_c": 0.05, "t_max": 200},
  "output": {"directory": "OUTDIR", "seed": 7}
})";

}  // namespace

TEST_CASE("evolve: converged run exits 0 and writes artifacts") {
  fs::path out = work_dir() / "evolve_ok";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  int rc = run_cli("evolve --config " + cfg.string() + " -c 0 --initial const:0 -t 25 --out " +
                   out.string());
  CHECK(rc == 0);
  CHECK(fs::exists(out / "run.json"));
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "final.csv"));
  std::string summary = slurp(out / "summary.json");
  CHECK(summary.find("\"converged\"") != std::string::npos);
}

TEST_CASE("evolve: drift reports the measured rate") {
  fs::path out = work_dir() / "evolve_drift";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  int rc = run_cli("evolve --config " + cfg.string() + " -c 0.3 --initial const:0 -t 100 --out " +
                   out.string());
  CHECK(rc == 0);
  std::string summary = slurp(out / "summary.json");
  CHECK(summary.find("diverged_up") != std::string::npos);
  auto pos = summary.find("\"measured_rate\": ");
  REQUIRE(pos != std::string::npos);
  double rate = std::stod(summary.substr(pos + 18));
  CHECK(rate == doctest::Approx(0.3).epsilon(0.07));
}

TEST_CASE("missing and malformed configs exit 2") {
  CHECK(run_cli("evolve --config /nonexistent.json -c 0") == 2);
  fs::path bad = write_config("bad.json", R"({"hamiltonian": {"name": "quadratic"}, "oops": 1})");
  CHECK(run_cli("evolve --config " + bad.string() + " -c 0") == 2);
  CHECK(run_cli("bogus-subcommand") == 2);
}

TEST_CASE("classify writes a classification and exits by outcome") {
  fs::path out = work_dir() / "classify0";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  CHECK(run_cli("classify --config " + cfg.string() + " -c 0 --out " + out.string()) == 0);
  std::string j = slurp(out / "classification.json");
  CHECK(j.find("\"bounded\"") != std::string::npos);
  CHECK(fs::exists(out / "limit.csv"));
}

TEST_CASE("classify sweep fans out and aggregates the exit status") {
  fs::path out = work_dir() / "sweep";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  CHECK(run_cli("classify --config " + cfg.string() + " --sweep -0.3:0.3:3 --out " +
                out.string()) == 0);
  CHECK(fs::exists(out / "classification_0.json"));
  CHECK(fs::exists(out / "classification_1.json"));
  CHECK(fs::exists(out / "classification_2.json"));
  CHECK(slurp(out / "classification_0.json").find("diverges_down") != std::string::npos);
  CHECK(slurp(out / "classification_2.json").find("diverges_up") != std::string::npos);
}

TEST_CASE("characteristics stays on the level set") {
  fs::path out = work_dir() / "chars";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  // H = p^2 = 0.25 at p0 = 0.5, matching c = 0.25
  CHECK(run_cli("characteristics --config " + cfg.string() +
                " --x0 0.1 --u0 0 --p0 0.5 -c 0.25 -t 1 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "orbit.csv"));
  std::string inv = slurp(out / "invariants.json");
  auto pos = inv.find("\"max_level_deviation\": ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(inv.substr(pos + 24)) < 1e-8);
}

TEST_CASE("action: stay-put value and the wash-time guard") {
  fs::path out = work_dir() / "action";
  fs::remove_all(out);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  CHECK(run_cli("action --config " + cfg.string() +
                " --x0 0.5 --u0 0 -c 0.7 -t 1 --query 0.5 --curve 0.5 --out " + out.string()) ==
        0);
  std::string csv = slurp(out / "action_values.csv");
  auto last_comma = csv.find_last_of(',');
  CHECK(std::stod(csv.substr(last_comma + 1)) == doctest::Approx(0.7).epsilon(0.1));
  CHECK(fs::exists(out / "curve.csv"));

  // horizon below the wash-out time: guarded, exit 3
  CHECK(run_cli("action --config " + cfg.string() + " --x0 0.5 --u0 0 -t 0.01 --query 0.5 --out " +
                out.string()) == 3);
}

TEST_CASE("identical config and seed give byte-identical reports") {
  fs::path out1 = work_dir() / "det1";
  fs::path out2 = work_dir() / "det2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::path cfg = write_config("quad.json", kQuadConfig);
  REQUIRE(run_cli("classify --config " + cfg.string() + " -c 0.2 --out " + out1.string()) == 0);
  REQUIRE(run_cli("classify --config " + cfg.string() + " -c 0.2 --out " + out2.string()) == 0);
  CHECK(slurp(out1 / "classification.json") == slurp(out2 / "classification.json"));
  // the echo differs only in the overridden output directory
  auto strip_dir = [](std::string text) {
    auto pos = text.find("\"directory\"");
    if (pos != std::string::npos) {
      auto end = text.find('\n', pos);
      text.erase(pos, end - pos);
    }
    return text;
  };
  CHECK(strip_dir(slurp(out1 / "run.json")) == strip_dir(slurp(out2 / "run.json")));
}

TEST_SUITE_END();
