#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <vector>

#include "chj/characteristics.hpp"
#include "chj/ergodic.hpp"

namespace py = pybind11;
using namespace chj;

namespace {

Vec to_vec(const std::vector<double>& v, int dim) {
  if (static_cast<int>(v.size()) != dim)
    throw py::value_error("expected " + std::to_string(dim) + " components");
  Vec out{0.0, 0.0};
  for (int k = 0; k < dim; ++k) out[k] = v[static_cast<size_t>(k)];
  return out;
}

std::vector<double> from_vec(const Vec& v, int dim) {
  return std::vector<double>(v.begin(), v.begin() + dim);
}

ModelSpec spec_from(const std::string& name, const py::dict& params, int dim) {
  ModelSpec spec;
  spec.name = name;
  spec.dim = dim;
  for (const auto& item : params) {
    std::string key = py::cast<std::string>(item.first);
    if (py::isinstance<py::str>(item.second))
      spec.params[key] = py::cast<std::string>(item.second);
    else if (py::isinstance<py::float_>(item.second) || py::isinstance<py::int_>(item.second))
      spec.params[key] = py::cast<double>(item.second);
    else
      spec.params[key] = py::cast<std::vector<double>>(item.second);
  }
  return spec;
}

py::dict summary_dict(const TraceSummary& s) {
  py::dict d;
  d["stop"] = stop_reason_name(s.stop);
  d["t_end"] = s.t_end;
  d["measured_rate"] = s.measured_rate;
  d["final_min"] = s.final_min;
  d["final_max"] = s.final_max;
  d["final_sup_increment"] = s.final_sup_increment;
  d["probe"] = s.probe;
  if (s.period > 0.0) d["period"] = s.period;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical toolkit for the generalized ergodic problem of contact "
            "Hamilton-Jacobi equations on flat tori";

  py::register_exception<Error>(m, "ChjError");

  py::class_<TorusGrid>(m, "TorusGrid")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("n_per_dim"))
      .def_readonly("dim", &TorusGrid::dim)
      .def_readonly("n", &TorusGrid::n)
      .def_readonly("h", &TorusGrid::h)
      .def("node_count", &TorusGrid::node_count);

  py::class_<GridFunction>(m, "GridFunction")
      .def(py::init([](const TorusGrid& g, double fill) { return GridFunction(g, fill); }),
           py::arg("grid"), py::arg("fill") = 0.0)
      .def_static("constant", &GridFunction::constant, py::arg("grid"), py::arg("value"))
      .def_static(
          "from_values",
          [](const TorusGrid& g, const std::vector<double>& vals) {
            GridFunction f(g);
            if (vals.size() != f.values.size()) throw py::value_error("value count mismatch");
            f.values = vals;
            return f;
          },
          py::arg("grid"), py::arg("values"))
      .def_readonly("values", &GridFunction::values)
      .def_property_readonly("grid", [](const GridFunction& f) { return f.grid; })
      .def("min", &GridFunction::min)
      .def("max", &GridFunction::max)
      .def("sup_norm", &GridFunction::sup_norm)
      .def("interpolate", [](const GridFunction& f, const std::vector<double>& x) {
        return interpolate(f, to_vec(x, f.grid.dim));
      });

  py::class_<HamiltonianModel>(m, "HamiltonianModel")
      .def_readonly("dim", &HamiltonianModel::dim)
      .def_readonly("name", &HamiltonianModel::name)
      .def_readonly("lambda_bound", &HamiltonianModel::lambda_bound)
      .def("H",
           [](const HamiltonianModel& mdl, const std::vector<double>& x, double u,
              const std::vector<double>& p) {
             return mdl.eval_H(to_vec(x, mdl.dim), u, to_vec(p, mdl.dim));
           })
      .def("L",
           [](const HamiltonianModel& mdl, const std::vector<double>& x, double u,
              const std::vector<double>& v) {
             return lagrangian_value(mdl, to_vec(x, mdl.dim), u, to_vec(v, mdl.dim));
           })
      .def("grad_H", [](const HamiltonianModel& mdl, const std::vector<double>& x, double u,
                        const std::vector<double>& p) {
        GradH g = mdl.grad_H(to_vec(x, mdl.dim), u, to_vec(p, mdl.dim));
        return py::make_tuple(from_vec(g.dx, mdl.dim), g.du, from_vec(g.dp, mdl.dim));
      });

  m.def(
      "build_model",
      [](const std::string& name, const py::dict& params, int dim) {
        return build_model(spec_from(name, params, dim));
      },
      py::arg("name"), py::arg("params") = py::dict(), py::arg("dim") = 1);

  m.def(
      "legendre",
      [](const HamiltonianModel& mdl, const std::vector<double>& x, double u,
         const std::vector<double>& v, double p_radius) {
        Vec vv = to_vec(v, mdl.dim);
        if (p_radius <= 0.0) p_radius = default_p_radius(mdl, vv);
        LegendreResult r = legendre(mdl, to_vec(x, mdl.dim), u, vv, p_radius);
        return py::make_tuple(r.value, from_vec(r.argmax_p, mdl.dim));
      },
      py::arg("model"), py::arg("x"), py::arg("u"), py::arg("v"), py::arg("p_radius") = 0.0);

  py::class_<SemigroupConfig>(m, "SemigroupConfig")
      .def(py::init<>())
      .def_readwrite("dt", &SemigroupConfig::dt)
      .def_readwrite("v_max", &SemigroupConfig::v_max)
      .def_readwrite("c", &SemigroupConfig::c)
      .def_readwrite("dv", &SemigroupConfig::dv);

  m.def(
      "step_backward",
      [](const HamiltonianModel& mdl, const SemigroupConfig& cfg, const GridFunction& w) {
        return step_backward(mdl, cfg, w);
      },
      py::arg("model"), py::arg("cfg"), py::arg("w"));
  m.def(
      "step_forward",
      [](const HamiltonianModel& mdl, const SemigroupConfig& cfg, const GridFunction& w) {
        return step_forward(mdl, cfg, w);
      },
      py::arg("model"), py::arg("cfg"), py::arg("w"));

  m.def(
      "evolve",
      [](const HamiltonianModel& mdl, SemigroupConfig cfg, const GridFunction& w0,
         double t_final) {
        cfg = resolve_config(mdl, w0.grid, cfg);
        int steps = std::max(1, static_cast<int>(std::llround(t_final / cfg.dt)));
        EvolutionTrace tr = evolve(mdl, cfg, w0, steps * cfg.dt, StopRule{});
        py::dict d;
        d["stop"] = stop_reason_name(tr.stop);
        d["t_end"] = tr.t_end;
        d["measured_rate"] = tr.measured_rate;
        d["final"] = tr.final_w;
        return d;
      },
      py::arg("model"), py::arg("cfg"), py::arg("w0"), py::arg("t_final"));

  m.def(
      "classify",
      [](const HamiltonianModel& mdl, double c, const TorusGrid& grid, double t_max) {
        RunCfg rc;
        rc.sg = resolve_config(mdl, grid, SemigroupConfig{});
        rc.t_max = t_max;
        Classification cls = classify(mdl, c, default_probes(grid), rc);
        py::dict d;
        d["outcome"] = outcome_name(cls.outcome);
        d["evidence"] = summary_dict(cls.evidence);
        if (cls.limit) d["limit"] = *cls.limit;
        if (cls.residual) d["residual"] = *cls.residual;
        return d;
      },
      py::arg("model"), py::arg("c"), py::arg("grid"), py::arg("t_max") = 300.0);

  m.def(
      "estimate_interval",
      [](const HamiltonianModel& mdl, const TorusGrid& grid, double lo, double hi, double tol_c,
         double t_max) {
        RunCfg rc;
        rc.sg = resolve_config(mdl, grid, SemigroupConfig{});
        rc.t_max = t_max;
        IntervalEstimate est = estimate_interval(mdl, {lo, hi}, tol_c, default_probes(grid), rc);
        auto bracket = [](const Bracket& b) {
          py::dict d;
          d["lo"] = b.lo;
          d["hi"] = b.hi;
          d["open_ended"] = b.open_ended;
          d["resolution_limited"] = b.resolution_limited;
          return d;
        };
        py::dict d;
        d["c_l"] = bracket(est.c_l);
        d["c_r"] = bracket(est.c_r);
        py::list samples;
        for (const auto& [c, o] : est.samples) samples.append(py::make_tuple(c, outcome_name(o)));
        d["samples"] = samples;
        return d;
      },
      py::arg("model"), py::arg("grid"), py::arg("lo"), py::arg("hi"), py::arg("tol_c") = 0.05,
      py::arg("t_max") = 300.0);

  m.def(
      "minmax_cl",
      [](const HamiltonianModel& mdl, const TorusGrid& grid, double u_box) {
        OptConfig oc;
        oc.u_box = u_box;
        OptimizerResult r = minmax_cl(mdl, grid, oc);
        return py::make_tuple(r.estimate, r.arg);
      },
      py::arg("model"), py::arg("grid"), py::arg("u_box") = 10.0);
  m.def(
      "maxmin_cr",
      [](const HamiltonianModel& mdl, const TorusGrid& grid, double u_box) {
        OptConfig oc;
        oc.u_box = u_box;
        OptimizerResult r = maxmin_cr(mdl, grid, oc);
        return py::make_tuple(r.estimate, r.arg);
      },
      py::arg("model"), py::arg("grid"), py::arg("u_box") = 10.0);

  py::class_<CharacteristicState>(m, "CharacteristicState")
      .def(py::init([](double t, const std::vector<double>& x, double u,
                       const std::vector<double>& p) {
             CharacteristicState s;
             s.t = t;
             for (size_t k = 0; k < x.size() && k < 2; ++k) s.x[k] = x[k];
             for (size_t k = 0; k < p.size() && k < 2; ++k) s.p[k] = p[k];
             s.u = u;
             return s;
           }),
           py::arg("t"), py::arg("x"), py::arg("u"), py::arg("p"))
      .def_readonly("t", &CharacteristicState::t)
      .def_readonly("u", &CharacteristicState::u)
      .def_property_readonly("x", [](const CharacteristicState& s) { return from_vec(s.x, 2); })
      .def_property_readonly("p", [](const CharacteristicState& s) { return from_vec(s.p, 2); });

  m.def(
      "flow",
      [](const HamiltonianModel& mdl, const CharacteristicState& s0, double t_span, double dt_ode,
         double c_level) {
        FlowResult r = flow(mdl, s0, t_span, dt_ode, c_level);
        py::dict d;
        d["blow_up"] = r.blow_up;
        d["states"] = r.states;
        return d;
      },
      py::arg("model"), py::arg("s0"), py::arg("t_span"), py::arg("dt_ode") = 1e-3,
      py::arg("c_level") = 0.0);

  m.def(
      "h_decay_check",
      [](const HamiltonianModel& mdl, const CharacteristicState& s0, double t_span, double dt_ode,
         double c_level) { return h_decay_check(mdl, s0, t_span, dt_ode, c_level); },
      py::arg("model"), py::arg("s0"), py::arg("t_span"), py::arg("dt_ode") = 1e-3,
      py::arg("c_level") = 0.0);

  m.def(
      "forward_action",
      [](const HamiltonianModel& mdl, const TorusGrid& grid, const std::vector<double>& x0,
         double u0, double c, double dt, int n_steps, double v_max) {
        ActionField f = forward_action(mdl, grid, to_vec(x0, grid.dim), u0, c, dt, n_steps, v_max);
        py::dict d;
        d["final_layer"] = f.layers.back();
        d["time"] = f.time();
        return d;
      },
      py::arg("model"), py::arg("grid"), py::arg("x0"), py::arg("u0"), py::arg("c"), py::arg("dt"),
      py::arg("n_steps"), py::arg("v_max"));
}
