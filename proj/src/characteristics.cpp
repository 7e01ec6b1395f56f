#include "chj/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chj {

namespace {

constexpr double kBlowUp = 1e6;

// State layout: x (dim), u, p (dim), optional accumulated exponent E.
struct OdeState {
  Vec x{0.0, 0.0};
  double u = 0.0;
  Vec p{0.0, 0.0};
  double e = 0.0;  // int H_u ds, used by the decay diagnostic
};

OdeState axpy(OdeState s, double a, const OdeState& d, int dim) {
  for (int k = 0; k < dim; ++k) {
    s.x[k] += a * d.x[k];
    s.p[k] += a * d.p[k];
  }
  s.u += a * d.u;
  s.e += a * d.e;
  return s;
}

// Right-hand side of the c-shifted contact system.
OdeState rhs(const HamiltonianModel& m, const OdeState& s, double c) {
  GradH g = m.grad_H(s.x, s.u, s.p);
  double h = m.eval_H(s.x, s.u, s.p);
  OdeState d;
  d.x = g.dp;
  for (int k = 0; k < m.dim; ++k) d.p[k] = -g.dx[k] - g.du * s.p[k];
  d.u = dot(s.p, g.dp, m.dim) - h + c;
  d.e = g.du;
  return d;
}

OdeState rk4_step(const HamiltonianModel& m, const OdeState& s, double dt, double c) {
  OdeState k1 = rhs(m, s, c);
  OdeState k2 = rhs(m, axpy(s, 0.5 * dt, k1, m.dim), c);
  OdeState k3 = rhs(m, axpy(s, 0.5 * dt, k2, m.dim), c);
  OdeState k4 = rhs(m, axpy(s, dt, k3, m.dim), c);
  OdeState out = s;
  for (int k = 0; k < m.dim; ++k) {
    out.x[k] += dt / 6.0 * (k1.x[k] + 2.0 * k2.x[k] + 2.0 * k3.x[k] + k4.x[k]);
    out.p[k] += dt / 6.0 * (k1.p[k] + 2.0 * k2.p[k] + 2.0 * k3.p[k] + k4.p[k]);
  }
  out.u += dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
  out.e += dt / 6.0 * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
  return out;
}

bool exploded(const OdeState& s, int dim) {
  if (!std::isfinite(s.u) || std::abs(s.u) > kBlowUp) return true;
  for (int k = 0; k < dim; ++k)
    if (!std::isfinite(s.p[k]) || std::abs(s.p[k]) > kBlowUp || !std::isfinite(s.x[k])) return true;
  return false;
}

struct RawFlow {
  std::vector<OdeState> states;
  std::vector<double> times;
  bool blow_up = false;
};

RawFlow integrate(const HamiltonianModel& m, const OdeState& s0, double t0, double t_span,
                  double dt_ode, double c) {
  require(dt_ode > 0.0, Errc::ConfigError, "dt_ode must be positive");
  int n = static_cast<int>(std::llround(std::abs(t_span) / dt_ode));
  if (n == 0) n = 1;
  double dt = t_span / n;
  RawFlow out;
  out.states.reserve(static_cast<size_t>(n) + 1);
  out.times.reserve(static_cast<size_t>(n) + 1);
  OdeState s = s0;
  out.states.push_back(s);
  out.times.push_back(t0);
  for (int k = 1; k <= n; ++k) {
    s = rk4_step(m, s, dt, c);
    if (exploded(s, m.dim)) {
      out.blow_up = true;
      break;
    }
    out.states.push_back(s);
    out.times.push_back(t0 + k * dt);
  }
  return out;
}

CharacteristicState to_state(const OdeState& s, double t, int dim) {
  CharacteristicState c;
  c.t = t;
  c.x = wrap(s.x, dim);
  c.u = s.u;
  c.p = s.p;
  return c;
}

}  // namespace

FlowResult flow(const HamiltonianModel& model, const CharacteristicState& s0, double t_span,
                double dt_ode, double c_level) {
  OdeState s;
  s.x = s0.x;
  s.u = s0.u;
  s.p = s0.p;
  RawFlow raw = integrate(model, s, s0.t, t_span, dt_ode, c_level);
  FlowResult out;
  out.blow_up = raw.blow_up;
  out.states.reserve(raw.states.size());
  for (size_t k = 0; k < raw.states.size(); ++k)
    out.states.push_back(to_state(raw.states[k], raw.times[k], model.dim));
  return out;
}

double h_decay_check(const HamiltonianModel& model, const CharacteristicState& s0, double t_span,
                     double dt_ode, double c_level) {
  OdeState s;
  s.x = s0.x;
  s.u = s0.u;
  s.p = s0.p;
  double h0 = model.eval_H(s.x, s.u, s.p) - c_level;
  RawFlow raw = integrate(model, s, s0.t, t_span, dt_ode, c_level);
  double worst = 0.0;
  for (const OdeState& st : raw.states) {
    double h = model.eval_H(st.x, st.u, st.p) - c_level;
    double predicted = h0 * std::exp(-(st.e - raw.states.front().e));
    worst = std::max(worst, std::abs(h - predicted));
  }
  return worst;
}

double calibrated_cross_check(const HamiltonianModel& model, const ActionField& field, const Vec& x,
                              double dt_ode) {
  double T = field.time();
  require(T >= 0.5, Errc::PenaltyDominates, "cross-check needs a curve of length >= 0.5");
  require(T >= wash_time(field.grid, field.v_max), Errc::PenaltyDominates,
          "field horizon below the seed wash-out time");

  std::vector<CurvePoint> curve = backtrack_minimizer(field, x);

  // Lift the terminal state: p from the action gradient (centered differences
  // of the final layer), v through the Legendre relation v = H_p(x,u,p).
  const CurvePoint& end = curve.back();
  DiffOps d = diff_ops(field.layer(field.n_steps()));
  int node = field.grid.nearest_node(end.x);
  Vec p_lift = d.ctr_vec(node);

  OdeState s;
  s.x = end.x;
  s.u = end.u;
  s.p = p_lift;
  RawFlow raw = integrate(model, s, end.t, -(0.8 * T), dt_ode, field.c);

  // Compare at the DP time stamps inside the overlap [0.2 T, T].
  double worst = 0.0;
  for (const CurvePoint& cp : curve) {
    if (cp.t < 0.2 * T - 1e-12) continue;
    // locate the ODE sample closest in time
    double best_dt = std::numeric_limits<double>::infinity();
    const OdeState* nearest = nullptr;
    double tn = 0.0;
    for (size_t k = 0; k < raw.states.size(); ++k) {
      double dtk = std::abs(raw.times[k] - cp.t);
      if (dtk < best_dt) {
        best_dt = dtk;
        nearest = &raw.states[k];
        tn = raw.times[k];
      }
    }
    if (!nearest || best_dt > dt_ode) continue;
    (void)tn;
    double dist = torus_dist(cp.x, wrap(nearest->x, model.dim), model.dim) +
                  std::abs(cp.u - nearest->u);
    worst = std::max(worst, dist);
  }
  if (raw.blow_up) worst = std::numeric_limits<double>::infinity();
  return worst;
}

}  // namespace chj
