#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chj/config.hpp"
#include "chj/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chj;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.is_open(), Errc::ConfigError, "cannot write '" + path.string() + "'");
  out << text << '\n';
}

void emit_run_echo(const RunConfig& cfg, const fs::path& dir) {
  write_text(dir / "run.json", config_to_json(cfg));
}

GridFunction parse_initial(const std::string& text, const TorusGrid& grid) {
  if (text == "sin")
    return GridFunction::sample(
        grid, [](const Vec& x) { return std::sin(2.0 * std::numbers::pi * x[0]); });
  if (text.rfind("const:", 0) == 0)
    return GridFunction::constant(grid, std::stod(text.substr(6)));
  // otherwise a CSV file as written by write_grid_csv
  std::ifstream in(text);
  require(in.is_open(), Errc::ConfigError, "cannot open initial-data file '" + text + "'");
  std::string line;
  std::getline(in, line);  // header
  GridFunction f(grid);
  int i = 0;
  while (std::getline(in, line) && i < f.size()) {
    auto pos = line.find_last_of(',');
    require(pos != std::string::npos, Errc::ConfigError, "malformed CSV row in '" + text + "'");
    f[i++] = std::stod(line.substr(pos + 1));
  }
  require(i == f.size(), Errc::ConfigError,
          "initial-data file has " + std::to_string(i) + " rows, grid needs " +
              std::to_string(f.size()));
  return f;
}

Vec parse_vec(const std::string& text, int dim) {
  Vec v{0.0, 0.0};
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',') && k < 2) v[k++] = std::stod(item);
  require(k == dim, Errc::ConfigError, "expected " + std::to_string(dim) + " components");
  return v;
}

Outcome trace_outcome(const EvolutionTrace& tr) {
  switch (tr.stop) {
    case StopReason::Converged: return Outcome::Bounded;
    case StopReason::DivergedUp: return Outcome::DivergesUp;
    case StopReason::DivergedDown: return Outcome::DivergesDown;
    case StopReason::Periodic: return Outcome::Periodic;
    case StopReason::ReachedTFinal: return Outcome::Inconclusive;
  }
  return Outcome::Inconclusive;
}

int cmd_evolve(const RunConfig& cfg, double c, const std::string& initial, double t_final,
               bool forward) {
  TorusGrid grid = cfg.make_grid();
  HamiltonianModel model = build_model(cfg.hamiltonian);
  SemigroupConfig sg = cfg.semigroup;
  sg.c = c;
  sg.direction = forward ? Direction::Forward : Direction::Backward;
  sg = resolve_config(model, grid, sg);
  GridFunction w0 = parse_initial(initial, grid);
  if (t_final <= 0.0) t_final = cfg.t_max;
  int steps = std::max(1, static_cast<int>(std::llround(t_final / sg.dt)));
  EvolutionTrace tr = evolve(model, sg, w0, steps * sg.dt, StopRule{}, cfg.snapshot_stride);

  emit_run_echo(cfg, cfg.out_dir);
  write_trace_csv(cfg.out_dir / "trace.csv", tr);
  write_grid_csv(cfg.out_dir / "final.csv", tr.final_w);
  if (cfg.snapshot_stride > 0) write_snapshots(cfg.out_dir / "snapshots", tr);
  Outcome outcome = trace_outcome(tr);
  write_text(cfg.out_dir / "summary.json", trace_summary_json(tr, outcome));
  std::cout << "evolve: " << stop_reason_name(tr.stop) << " at t=" << tr.t_end << " (rate "
            << tr.measured_rate << ")\n";
  return outcome == Outcome::Inconclusive ? kExitInconclusive : kExitOk;
}

int classify_once(const RunConfig& cfg, const HamiltonianModel& model, const TorusGrid& grid,
                  double c, const fs::path& json_path, const fs::path& limit_path) {
  RunCfg rc = cfg.make_run_cfg(model, grid);
  Classification cls = classify(model, c, cfg.make_probes(grid), rc);
  write_text(json_path, classification_to_json(cls));
  if (cls.limit) write_grid_csv(limit_path, *cls.limit);
  std::cout << "classify c=" << c << ": " << outcome_name(cls.outcome) << "\n";
  return cls.outcome == Outcome::Inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_classify(const RunConfig& cfg, double c, const std::string& sweep) {
  TorusGrid grid = cfg.make_grid();
  HamiltonianModel model = build_model(cfg.hamiltonian);
  emit_run_echo(cfg, cfg.out_dir);
  if (sweep.empty())
    return classify_once(cfg, model, grid, c, cfg.out_dir / "classification.json",
                         cfg.out_dir / "limit.csv");

  // --sweep lo:hi:n fans out classifications at evenly spaced levels
  double lo = 0, hi = 0;
  int n = 0;
  {
    std::stringstream ss(sweep);
    std::string a, b, k;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, k, ':');
    require(!a.empty() && !b.empty() && !k.empty(), Errc::ConfigError,
            "--sweep wants c_lo:c_hi:n");
    lo = std::stod(a);
    hi = std::stod(b);
    n = std::stoi(k);
    require(n >= 2 && lo < hi, Errc::ConfigError, "--sweep wants c_lo < c_hi and n >= 2");
  }
  std::vector<std::future<int>> futs;
  for (int k = 0; k < n; ++k) {
    double c_k = lo + (hi - lo) * k / (n - 1);
    fs::path jp = cfg.out_dir / ("classification_" + std::to_string(k) + ".json");
    fs::path lp = cfg.out_dir / ("limit_" + std::to_string(k) + ".csv");
    futs.push_back(std::async(std::launch::async, [=, &cfg, &model, &grid] {
      return classify_once(cfg, model, grid, c_k, jp, lp);
    }));
  }
  int status = kExitOk;
  for (auto& f : futs)
    if (f.get() == kExitInconclusive) status = kExitInconclusive;
  return status;
}

int cmd_interval(const RunConfig& cfg) {
  TorusGrid grid = cfg.make_grid();
  HamiltonianModel model = build_model(cfg.hamiltonian);
  emit_run_echo(cfg, cfg.out_dir);
  RunCfg rc = cfg.make_run_cfg(model, grid);
  OptConfig oc;
  oc.u_box = cfg.u_box;
  oc.iters = cfg.opt_iters;
  oc.seed = cfg.seed;
  OptimizerResult cl = minmax_cl(model, grid, oc);
  OptimizerResult cr = maxmin_cr(model, grid, oc);
  write_grid_csv(cfg.out_dir / "minmax_arg.csv", cl.arg);
  write_grid_csv(cfg.out_dir / "maxmin_arg.csv", cr.arg);
  try {
    IntervalEstimate est =
        estimate_interval(model, cfg.c_search, cfg.tol_c, cfg.make_probes(grid), rc);
    write_text(cfg.out_dir / "interval.json", interval_to_json(est, cl, cr, cfg.u_box));
    std::cout << "interval: c_l in [" << est.c_l.lo << ", " << est.c_l.hi << "]"
              << (est.c_l.open_ended ? " (open-ended)" : "") << ", c_r in [" << est.c_r.lo
              << ", " << est.c_r.hi << "]" << (est.c_r.open_ended ? " (open-ended)" : "") << "\n";
    return kExitOk;
  } catch (const Error& e) {
    if (e.code() != Errc::NoBoundedSample) throw;
    json j;
    j["error"] = "NoBoundedSample";
    j["detail"] = e.what();
    j["minmax_cl"] = {{"estimate", cl.estimate}, {"u_box", cfg.u_box}};
    j["maxmin_cr"] = {{"estimate", cr.estimate}, {"u_box", cfg.u_box}};
    write_text(cfg.out_dir / "interval.json", j.dump(2));
    std::cout << "interval: no bounded sample found (degenerate candidate)\n";
    return kExitInconclusive;
  }
}

int cmd_characteristics(const RunConfig& cfg, const std::string& x0s, double u0,
                        const std::string& p0s, double t_span, double c) {
  HamiltonianModel model = build_model(cfg.hamiltonian);
  emit_run_echo(cfg, cfg.out_dir);
  CharacteristicState s0;
  s0.x = wrap(parse_vec(x0s, model.dim), model.dim);
  s0.u = u0;
  s0.p = parse_vec(p0s, model.dim);
  FlowResult orbit = flow(model, s0, t_span, cfg.dt_ode, c);
  double decay_dev = h_decay_check(model, s0, t_span, cfg.dt_ode, c);
  double max_h_dev = 0.0;
  double h0 = model.eval_H(s0.x, s0.u, s0.p) - c;
  for (const CharacteristicState& s : orbit.states)
    max_h_dev = std::max(max_h_dev, std::abs(model.eval_H(s.x, s.u, s.p) - c - h0));
  write_orbit_csv(cfg.out_dir / "orbit.csv", model, orbit.states, c);
  json j;
  j["blow_up"] = orbit.blow_up;
  j["samples"] = orbit.states.size();
  j["max_level_deviation"] = max_h_dev;
  j["h_decay_deviation"] = decay_dev;
  write_text(cfg.out_dir / "invariants.json", j.dump(2));
  std::cout << "characteristics: " << orbit.states.size() << " samples"
            << (orbit.blow_up ? " (blow-up, partial orbit)" : "") << "\n";
  return kExitOk;
}

int cmd_action(const RunConfig& cfg, const std::string& x0s, double u0, double c, double t,
               const std::string& query, bool backward, const std::string& curve_from) {
  TorusGrid grid = cfg.make_grid();
  HamiltonianModel model = build_model(cfg.hamiltonian);
  emit_run_echo(cfg, cfg.out_dir);
  SemigroupConfig sg = resolve_config(model, grid, cfg.semigroup);
  int n_steps = std::max(1, static_cast<int>(std::llround(t / sg.dt)));
  Vec x0 = wrap(parse_vec(x0s, model.dim), model.dim);
  ActionField field = backward
                          ? backward_action(model, grid, x0, u0, c, sg.dt, n_steps, sg.v_max)
                          : forward_action(model, grid, x0, u0, c, sg.dt, n_steps, sg.v_max);

  fs::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "action_values.csv");
  out << (model.dim == 1 ? "x,t,value\n" : "x1,x2,t,value\n");
  std::stringstream qs(query);
  std::string item;
  while (std::getline(qs, item, ';')) {
    if (item.empty()) continue;
    Vec q = wrap(parse_vec(item, model.dim), model.dim);
    double val = field.value_at(field.n_steps(), q);
    out << format_double(q[0]);
    if (model.dim == 2) out << ',' << format_double(q[1]);
    out << ',' << format_double(field.time()) << ',' << format_double(val) << '\n';
  }
  if (!curve_from.empty()) {
    Vec q = wrap(parse_vec(curve_from, model.dim), model.dim);
    write_curve_csv(cfg.out_dir / "curve.csv", model, backtrack_minimizer(field, q));
  }
  std::cout << "action: field horizon t=" << field.time() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact-hj: ergodic-problem toolkit for contact Hamilton-Jacobi equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_override, "override output directory");
  };

  auto* ev = app.add_subcommand("evolve", "run the long-time semigroup driver");
  double ev_c = 0.0, ev_t = 0.0;
  std::string ev_initial = "const:0";
  bool ev_forward = false;
  add_common(ev);
  ev->add_option("-c,--c", ev_c, "level c");
  ev->add_option("--initial", ev_initial, "const:<v> | sin | csv file");
  ev->add_option("-t,--t-final", ev_t, "horizon (default: ergodic.t_max)");
  ev->add_flag("--forward", ev_forward, "evolve the forward semigroup");

  auto* cl = app.add_subcommand("classify", "decide membership evidence for one level");
  double cl_c = 0.0;
  std::string cl_sweep;
  add_common(cl);
  cl->add_option("-c,--c", cl_c, "level c");
  cl->add_option("--sweep", cl_sweep, "c_lo:c_hi:n concurrent classifications");

  auto* iv = app.add_subcommand("interval", "bracket the admissible interval endpoints");
  add_common(iv);

  auto* ch = app.add_subcommand("characteristics", "integrate the contact system");
  std::string ch_x0 = "0", ch_p0 = "0";
  double ch_u0 = 0.0, ch_t = 1.0, ch_c = 0.0;
  add_common(ch);
  ch->add_option("--x0", ch_x0, "initial position (comma separated in 2-D)");
  ch->add_option("--u0", ch_u0, "initial value");
  ch->add_option("--p0", ch_p0, "initial momentum");
  ch->add_option("-t,--t-span", ch_t, "time span (may be negative)");
  ch->add_option("-c,--c", ch_c, "level c");

  auto* ac = app.add_subcommand("action", "build an implicit action field");
  std::string ac_x0 = "0", ac_query = "0", ac_curve;
  double ac_u0 = 0.0, ac_c = 0.0, ac_t = 1.0;
  bool ac_backward = false;
  add_common(ac);
  ac->add_option("--x0", ac_x0, "seed position");
  ac->add_option("--u0", ac_u0, "seed value");
  ac->add_option("-c,--c", ac_c, "level c");
  ac->add_option("-t,--t-final", ac_t, "field horizon");
  ac->add_option("--query", ac_query, "query points, ';' separated");
  ac->add_flag("--backward", ac_backward, "build the backward action h^");
  ac->add_option("--curve", ac_curve, "backtrack the minimizer through this point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    fs::create_directories(cfg.out_dir);
    if (ev->parsed()) return cmd_evolve(cfg, ev_c, ev_initial, ev_t, ev_forward);
    if (cl->parsed()) return cmd_classify(cfg, cl_c, cl_sweep);
    if (iv->parsed()) return cmd_interval(cfg);
    if (ch->parsed()) return cmd_characteristics(cfg, ch_x0, ch_u0, ch_p0, ch_t, ch_c);
    if (ac->parsed())
      return cmd_action(cfg, ac_x0, ac_u0, ac_c, ac_t, ac_query, ac_backward, ac_curve);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::PenaltyDominates ? kExitInconclusive : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
