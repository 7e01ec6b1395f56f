#include "chj/io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace chj {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.is_open(), Errc::ConfigError, "cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream out = open_out(path);
  out << (f.grid.dim == 1 ? "x,value\n" : "x,y,value\n");
  for (int i = 0; i < f.size(); ++i) {
    Vec x = f.grid.node(i);
    out << format_double(x[0]);
    if (f.grid.dim == 2) out << ',' << format_double(x[1]);
    out << ',' << format_double(f[i]) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace) {
  std::ofstream out = open_out(path);
  out << "t,min,max,sup_increment\n";
  for (size_t k = 0; k < trace.times.size(); ++k)
    out << format_double(trace.times[k]) << ',' << format_double(trace.mins[k]) << ','
        << format_double(trace.maxs[k]) << ',' << format_double(trace.sup_incs[k]) << '\n';
}

void write_orbit_csv(const std::filesystem::path& path, const HamiltonianModel& model,
                     const std::vector<CharacteristicState>& orbit, double c_level) {
  std::ofstream out = open_out(path);
  if (model.dim == 1)
    out << "t,x,u,p,H_minus_c\n";
  else
    out << "t,x1,x2,u,p1,p2,H_minus_c\n";
  for (const CharacteristicState& s : orbit) {
    double h = model.eval_H(s.x, s.u, s.p) - c_level;
    out << format_double(s.t) << ',' << format_double(s.x[0]);
    if (model.dim == 2) out << ',' << format_double(s.x[1]);
    out << ',' << format_double(s.u) << ',' << format_double(s.p[0]);
    if (model.dim == 2) out << ',' << format_double(s.p[1]);
    out << ',' << format_double(h) << '\n';
  }
}

void write_curve_csv(const std::filesystem::path& path, const HamiltonianModel& model,
                     const std::vector<CurvePoint>& curve) {
  std::ofstream out = open_out(path);
  if (model.dim == 1)
    out << "t,x,u,p\n";
  else
    out << "t,x1,x2,u,p1,p2\n";
  for (size_t k = 0; k < curve.size(); ++k) {
    const CurvePoint& cp = curve[k];
    // momentum from the discrete velocity through the Legendre relation
    Vec v{0.0, 0.0};
    if (k + 1 < curve.size()) {
      double dt = curve[k + 1].t - cp.t;
      if (dt > 0) v = scale(displacement(curve[k + 1].x, cp.x, model.dim), 1.0 / dt, model.dim);
    } else if (k > 0) {
      double dt = cp.t - curve[k - 1].t;
      if (dt > 0) v = scale(displacement(cp.x, curve[k - 1].x, model.dim), 1.0 / dt, model.dim);
    }
    Vec p{0.0, 0.0};
    try {
      p = legendre(model, cp.x, cp.u, v, default_p_radius(model, v)).argmax_p;
    } catch (const Error&) {
      // leave p at zero when the transform cannot be refined at this sample
    }
    out << format_double(cp.t) << ',' << format_double(cp.x[0]);
    if (model.dim == 2) out << ',' << format_double(cp.x[1]);
    out << ',' << format_double(cp.u) << ',' << format_double(p[0]);
    if (model.dim == 2) out << ',' << format_double(p[1]);
    out << '\n';
  }
}

void write_snapshots(const std::filesystem::path& dir, const EvolutionTrace& trace) {
  std::filesystem::create_directories(dir);
  for (size_t k = 0; k < trace.snapshots.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_%05zu.csv", k);
    write_grid_csv(dir / name, trace.snapshots[k].second);
  }
}

namespace {

json summary_json(const TraceSummary& s) {
  json j;
  j["stop"] = stop_reason_name(s.stop);
  j["t_end"] = s.t_end;
  j["measured_rate"] = s.measured_rate;
  j["final_min"] = s.final_min;
  j["final_max"] = s.final_max;
  j["final_sup_increment"] = s.final_sup_increment;
  if (s.period > 0.0) j["period"] = s.period;
  j["probe"] = s.probe;
  return j;
}

json bracket_json(const Bracket& b) {
  json j;
  j["open_ended"] = b.open_ended;
  j["resolution_limited"] = b.resolution_limited;
  if (std::isfinite(b.lo)) j["lo"] = b.lo;
  if (std::isfinite(b.hi)) j["hi"] = b.hi;
  return j;
}

}  // namespace

std::string classification_to_json(const Classification& cls) {
  json j;
  j["outcome"] = outcome_name(cls.outcome);
  j["evidence"] = summary_json(cls.evidence);
  if (cls.residual) j["residual"] = *cls.residual;
  j["marginal"] = cls.marginal;
  return j.dump(2);
}

std::string interval_to_json(const IntervalEstimate& est, const OptimizerResult& cl,
                             const OptimizerResult& cr, double u_box) {
  json j;
  j["tol_c"] = est.tol_c;
  j["c_l_bracket"] = bracket_json(est.c_l);
  j["c_r_bracket"] = bracket_json(est.c_r);
  json samples = json::array();
  for (const auto& [c, o] : est.samples) {
    json row;
    row["c"] = c;
    row["outcome"] = outcome_name(o);
    bool marginal = false;
    if (!est.c_l.open_ended && std::abs(c - est.c_l.lo) <= 2.0 * est.tol_c) marginal = true;
    if (!est.c_l.open_ended && std::abs(c - est.c_l.hi) <= 2.0 * est.tol_c) marginal = true;
    if (!est.c_r.open_ended && std::abs(c - est.c_r.lo) <= 2.0 * est.tol_c) marginal = true;
    if (!est.c_r.open_ended && std::abs(c - est.c_r.hi) <= 2.0 * est.tol_c) marginal = true;
    row["marginal"] = marginal;
    samples.push_back(row);
  }
  j["membership_samples"] = samples;
  j["minmax_cl"] = {{"estimate", cl.estimate},
                    {"budget_exhausted", cl.budget_exhausted},
                    {"u_box", u_box}};
  j["maxmin_cr"] = {{"estimate", cr.estimate},
                    {"budget_exhausted", cr.budget_exhausted},
                    {"u_box", u_box}};
  return j.dump(2);
}

std::string trace_summary_json(const EvolutionTrace& trace, Outcome outcome) {
  json j;
  j["stop"] = stop_reason_name(trace.stop);
  j["outcome"] = outcome_name(outcome);
  j["t_end"] = trace.t_end;
  j["steps"] = trace.times.size() - 1;
  j["measured_rate"] = trace.measured_rate;
  j["final_min"] = trace.mins.back();
  j["final_max"] = trace.maxs.back();
  j["final_sup_increment"] = trace.sup_incs.back();
  if (trace.period > 0.0) j["period"] = trace.period;
  return j.dump(2);
}

}  // namespace chj
