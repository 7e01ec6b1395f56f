#include "chj/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "chj/parallel.hpp"

namespace chj {

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ReachedTFinal: return "reached_t_final";
    case StopReason::Converged: return "converged";
    case StopReason::DivergedUp: return "diverged_up";
    case StopReason::DivergedDown: return "diverged_down";
    case StopReason::Periodic: return "periodic";
  }
  return "unknown";
}

SemigroupConfig resolve_config(const HamiltonianModel& model, const TorusGrid& grid,
                               SemigroupConfig cfg) {
  double lambda = model.lambda_bound;
  if (cfg.dt <= 0.0) cfg.dt = std::min(5e-3, 0.25 / (lambda + 1.0));
  if (cfg.v_max <= 0.0) cfg.v_max = default_v_max(model);
  if (cfg.dv <= 0.0) cfg.dv = 2.0 * std::sqrt(grid.h);
  cfg.dv = std::min(cfg.dv, cfg.v_max / 4.0);
  require(cfg.dt * lambda < 0.5, Errc::CFLViolated, "dt*lambda must be below 1/2");
  if (cfg.scheme == Scheme::LaxFriedrichs) {
    require(cfg.direction == Direction::Backward, Errc::ConfigError,
            "lax_friedrichs is implemented for the backward semigroup only");
    if (cfg.lf_viscosity <= 0.0) {
      double sup_hp = 0.0;
      for (int i = 0; i < grid.node_count(); i += std::max(1, grid.node_count() / 64)) {
        Vec x = grid.node(i);
        for (double u : {-2.0, 0.0, 2.0})
          for (double p1 : {-cfg.lf_p_range, -1.0, 0.0, 1.0, cfg.lf_p_range}) {
            Vec p = grid.dim == 1 ? vec1(p1) : vec2(p1, 0.5 * p1);
            sup_hp = std::max(sup_hp, norm(model.grad_H(x, u, p).dp, grid.dim));
          }
      }
      cfg.lf_viscosity = sup_hp;
    }
    require(cfg.dt * (cfg.lf_viscosity / grid.h * grid.dim + lambda) <= 1.0, Errc::CFLViolated,
            "lax_friedrichs monotone CFL: dt*(viscosity/h + lambda) must be <= 1");
  }
  return cfg;
}

namespace {

// Semi-Lagrangian one-step operator. Candidate velocities live on a fixed
// symmetric grid (spacing dv, reach v_max); the source value is multilinear
// interpolation, which keeps the step exactly monotone.
class SLStepper {
 public:
  SLStepper(const HamiltonianModel& model, const SemigroupConfig& cfg, const TorusGrid& grid,
            Direction dir)
      : model_(model), cfg_(cfg), grid_(grid), dir_(dir) {
    build_candidates();
    build_tables();
  }

  void step(const GridFunction& in, GridFunction& out) const {
    if (grid_.dim == 1)
      step_1d(in, out);
    else
      step_2d(in, out);
  }

 private:
  struct Cand {
    Vec v{0.0, 0.0};
    // fractional node offset of the source point, split for interpolation
    int shift0 = 0, shift1 = 0;
    double th0 = 0.0, th1 = 0.0;
  };

  void build_candidates() {
    int jmax = static_cast<int>(std::floor(cfg_.v_max / cfg_.dv));
    auto frac_split = [this](double vcomp, int& shift, double& theta) {
      // Backward: source y = x - v dt; forward: source y = x + v dt. Either
      // way the interpolation offset along the grid is r = -/+ v dt / h.
      double r = (dir_ == Direction::Backward ? vcomp : -vcomp) * cfg_.dt / grid_.h;
      double a = -r;  // y sits at node index i + a
      double fl = std::floor(a);
      shift = static_cast<int>(fl);
      theta = a - fl;
    };
    if (grid_.dim == 1) {
      for (int j = -jmax; j <= jmax; ++j) {
        Cand c;
        c.v = vec1(j * cfg_.dv);
        frac_split(c.v[0], c.shift0, c.th0);
        cands_.push_back(c);
      }
      return;
    }
    for (int j0 = -jmax; j0 <= jmax; ++j0)
      for (int j1 = -jmax; j1 <= jmax; ++j1) {
        Vec v = vec2(j0 * cfg_.dv, j1 * cfg_.dv);
        if (norm(v, 2) > cfg_.v_max) continue;
        Cand c;
        c.v = v;
        frac_split(v[0], c.shift0, c.th0);
        frac_split(v[1], c.shift1, c.th1);
        cands_.push_back(c);
      }
  }

  // Positional Lagrangian tables: base[j][i] = dt*(lag_base + c) at the L
  // evaluation point of candidate j and node i, ucoef[j][i] alongside.
  void build_tables() {
    separable_ = static_cast<bool>(model_.lag_base);
    int nn = grid_.node_count();
    size_t total = cands_.size() * static_cast<size_t>(nn);
    if (separable_) {
      base_.resize(total);
      if (model_.lag_uterm && model_.lag_ucoef) ucoef_.resize(total);
    }
    for (size_t j = 0; j < cands_.size(); ++j) {
      const Cand& cd = cands_[j];
      for (int i = 0; i < nn; ++i) {
        Vec xi = grid_.node(i);
        Vec eval_pt = l_eval_point(xi, cd.v);
        if (separable_) {
          base_[j * nn + i] = cfg_.dt * (model_.lag_base(eval_pt, cd.v) + cfg_.c);
          if (!ucoef_.empty()) ucoef_[j * nn + i] = model_.lag_ucoef(eval_pt);
        }
      }
    }
  }

  // Backward evaluates L at the source point, forward at the target node;
  // both are the earlier-in-time end of the segment.
  Vec l_eval_point(const Vec& x, const Vec& v) const {
    if (dir_ == Direction::Forward) return x;
    Vec y = x;
    for (int d = 0; d < grid_.dim; ++d) y[d] = wrap_unit(y[d] - v[d] * cfg_.dt);
    return y;
  }

  double couple_u(double w_src, double diag, double ucoef, const Vec& eval_pt, const Vec& v) const {
    // diag = dt*(lag_base + c) when separable; full L recomputed otherwise.
    if (cfg_.u_coupling == UCoupling::Explicit) return w_src;
    // implicit: solve u = w_src +- dt*(L(.,u,.) + c) by contraction iteration
    double sign = (dir_ == Direction::Backward) ? 1.0 : -1.0;
    double u = w_src;
    for (int it = 0; it < 100; ++it) {
      double lu;
      if (separable_) {
        double ut = model_.lag_uterm ? (ucoef_.empty() ? model_.lag_uterm(u)
                                                       : ucoef * model_.lag_uterm(u))
                                     : 0.0;
        lu = diag + cfg_.dt * ut;
      } else {
        lu = cfg_.dt * (model_.lagrangian(eval_pt, u, v) + cfg_.c);
      }
      double next = w_src + sign * lu;
      if (std::abs(next - u) < 1e-12) return next;
      u = next;
    }
    fail(Errc::FixedPointStalled, "implicit u-coupling did not contract in 100 sweeps");
  }

  double candidate_value(double w_src, size_t j, int i, const Cand& cd) const {
    double sign = (dir_ == Direction::Backward) ? 1.0 : -1.0;
    if (cfg_.u_coupling == UCoupling::Explicit) {
      if (separable_) {
        double val = base_[j * static_cast<size_t>(grid_.node_count()) + i];
        if (model_.lag_uterm) {
          double coeff = ucoef_.empty() ? 1.0 : ucoef_[j * static_cast<size_t>(grid_.node_count()) + i];
          val += cfg_.dt * coeff * model_.lag_uterm(w_src);
        }
        return w_src + sign * val;
      }
      Vec eval_pt = l_eval_point(grid_.node(i), cd.v);
      return w_src + sign * cfg_.dt * (model_.lagrangian(eval_pt, w_src, cd.v) + cfg_.c);
    }
    size_t at = j * static_cast<size_t>(grid_.node_count()) + i;
    double diag = separable_ ? base_[at] : 0.0;
    double coeff = (!ucoef_.empty()) ? ucoef_[at] : 1.0;
    Vec eval_pt = l_eval_point(grid_.node(i), cd.v);
    double u = couple_u(w_src, diag, coeff, eval_pt, cd.v);
    if (separable_) {
      double ut = model_.lag_uterm ? coeff * model_.lag_uterm(u) : 0.0;
      return w_src + sign * (diag + cfg_.dt * ut);
    }
    return w_src + sign * cfg_.dt * (model_.lagrangian(eval_pt, u, cd.v) + cfg_.c);
  }

  void step_1d(const GridFunction& in, GridFunction& out) const {
    const int n = grid_.n;
    const bool minimize = (dir_ == Direction::Backward);
    const double sign = minimize ? 1.0 : -1.0;
    double init = minimize ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    std::fill(out.values.begin(), out.values.end(), init);
    const double* w = in.values.data();
    double* o = out.values.data();

    // Explicit coupling samples the u-term on the nodes and interpolates it
    // alongside w; the combination stays monotone since dt*lambda < 1/2.
    bool fast = separable_ && cfg_.u_coupling == UCoupling::Explicit;
    const double* ut = nullptr;
    if (fast && model_.lag_uterm) {
      uterm_nodes_.resize(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) uterm_nodes_[static_cast<size_t>(k)] = model_.lag_uterm(w[k]);
      ut = uterm_nodes_.data();
    }

    for (size_t j = 0; j < cands_.size(); ++j) {
      const Cand& cd = cands_[j];
      int s = ((cd.shift0 % n) + n) % n;
      double th = cd.th0;
      int k0 = s;  // source base index for node 0
      if (fast) {
        const double* tab = &base_[j * static_cast<size_t>(n)];
        const double* coef = ucoef_.empty() ? nullptr : &ucoef_[j * static_cast<size_t>(n)];
        for (int i = 0; i < n; ++i) {
          int k1 = k0 + 1 == n ? 0 : k0 + 1;
          double src = (1.0 - th) * w[k0] + th * w[k1];
          double val = src + sign * tab[i];
          if (ut) {
            double uval = (1.0 - th) * ut[k0] + th * ut[k1];
            val += sign * cfg_.dt * (coef ? coef[i] * uval : uval);
          }
          if (minimize ? (val < o[i]) : (val > o[i])) o[i] = val;
          ++k0;
          if (k0 == n) k0 = 0;
        }
        continue;
      }
      for (int i = 0; i < n; ++i) {
        int k1 = k0 + 1 == n ? 0 : k0 + 1;
        double src = (1.0 - th) * w[k0] + th * w[k1];
        double val = candidate_value(src, j, i, cd);
        if (minimize ? (val < o[i]) : (val > o[i])) o[i] = val;
        ++k0;
        if (k0 == n) k0 = 0;
      }
    }
  }

  void step_2d(const GridFunction& in, GridFunction& out) const {
    const int n = grid_.n;
    const bool minimize = (dir_ == Direction::Backward);
    const double sign = minimize ? 1.0 : -1.0;
    double init = minimize ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    std::fill(out.values.begin(), out.values.end(), init);

    bool fast = separable_ && cfg_.u_coupling == UCoupling::Explicit;
    const double* ut = nullptr;
    if (fast && model_.lag_uterm) {
      uterm_nodes_.resize(in.values.size());
      for (size_t k = 0; k < in.values.size(); ++k)
        uterm_nodes_[k] = model_.lag_uterm(in.values[k]);
      ut = uterm_nodes_.data();
    }

    parallel_for(
        n,
        [&](int i0) {
          for (size_t j = 0; j < cands_.size(); ++j) {
            const Cand& cd = cands_[j];
            int a0 = ((i0 + cd.shift0) % n + n) % n;
            int a1 = (a0 + 1) % n;
            for (int i1 = 0; i1 < n; ++i1) {
              int b0 = ((i1 + cd.shift1) % n + n) % n;
              int b1 = (b0 + 1) % n;
              double w00 = (1.0 - cd.th1), w01 = cd.th1;
              double src = (1.0 - cd.th0) * (w00 * in[a0 * n + b0] + w01 * in[a0 * n + b1]) +
                           cd.th0 * (w00 * in[a1 * n + b0] + w01 * in[a1 * n + b1]);
              int i = i0 * n + i1;
              double val;
              if (fast) {
                val = src + sign * base_[j * in.values.size() + i];
                if (ut) {
                  double uval =
                      (1.0 - cd.th0) * (w00 * ut[a0 * n + b0] + w01 * ut[a0 * n + b1]) +
                      cd.th0 * (w00 * ut[a1 * n + b0] + w01 * ut[a1 * n + b1]);
                  val += sign * cfg_.dt *
                         (ucoef_.empty() ? uval : ucoef_[j * in.values.size() + i] * uval);
                }
              } else {
                val = candidate_value(src, j, i, cd);
              }
              if (minimize ? (val < out[i]) : (val > out[i])) out[i] = val;
            }
          }
        },
        1);
  }

  const HamiltonianModel& model_;
  SemigroupConfig cfg_;
  TorusGrid grid_;
  Direction dir_;
  std::vector<Cand> cands_;
  bool separable_ = false;
  std::vector<double> base_;
  std::vector<double> ucoef_;
  mutable std::vector<double> uterm_nodes_;  // per-step scratch, filled before the node loop
};

// Monotone Lax-Friedrichs step for w_t + H(x,w,Dw) = c.
void lf_step(const HamiltonianModel& model, const SemigroupConfig& cfg, const GridFunction& in,
             GridFunction& out) {
  DiffOps d = diff_ops(in);
  const TorusGrid& g = in.grid;
  parallel_for(g.node_count(), [&](int i) {
    Vec x = g.node(i);
    Vec pc = d.ctr_vec(i);
    double hval = model.eval_H(x, in[i], pc);
    double visc = 0.0;
    for (int dd = 0; dd < g.dim; ++dd) visc += 0.5 * cfg.lf_viscosity * (d.fwd(i, dd) - d.bwd(i, dd));
    out[i] = in[i] + cfg.dt * (cfg.c - hval + visc);
  });
}

}  // namespace

GridFunction step_backward(const HamiltonianModel& model, const SemigroupConfig& cfg_in,
                           const GridFunction& w) {
  SemigroupConfig cfg = resolve_config(model, w.grid, cfg_in);
  GridFunction out(w.grid);
  if (cfg.scheme == Scheme::LaxFriedrichs) {
    lf_step(model, cfg, w, out);
    return out;
  }
  SLStepper stepper(model, cfg, w.grid, Direction::Backward);
  stepper.step(w, out);
  return out;
}

GridFunction step_forward(const HamiltonianModel& model, const SemigroupConfig& cfg_in,
                          const GridFunction& w) {
  SemigroupConfig cfg = resolve_config(model, w.grid, cfg_in);
  require(cfg.scheme == Scheme::SemiLagrangian, Errc::ConfigError,
          "step_forward supports the semi-Lagrangian scheme");
  SLStepper stepper(model, cfg, w.grid, Direction::Forward);
  GridFunction out(w.grid);
  stepper.step(w, out);
  return out;
}

namespace {

// Least-squares slope of series y over x (equispaced assumed not required).
double ls_slope(const std::vector<double>& x, const std::vector<double>& y, size_t lo, size_t hi) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = lo; k < hi; ++k) {
    n += 1.0;
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  double den = n * sxx - sx * sx;
  if (den <= 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

struct DriftCall {
  bool fired = false;
  bool up = false;
  double rate = 0.0;
};

// Steady-drift test on the per-step min/max series: the trailing fit window
// splits into quarters that must each make comparable signed progress, with
// enough total motion to rule out a slow transient.
DriftCall drift_test(const EvolutionTrace& tr, const StopRule& rule) {
  DriftCall out;
  size_t nsteps = tr.times.size();
  if (nsteps < 16) return out;
  double t_now = tr.times.back();
  double span = std::max(t_now * 0.5, rule.drift_min_evidence);
  if (t_now < 2.0 * rule.drift_min_evidence) return out;
  double t_lo = t_now - span;
  size_t lo = std::lower_bound(tr.times.begin(), tr.times.end(), t_lo) - tr.times.begin();
  if (nsteps - lo < 8) return out;

  auto series_ok = [&](const std::vector<double>& s, double sign) {
    size_t len = nsteps - lo;
    double q[4];
    for (int q4 = 0; q4 < 4; ++q4) {
      size_t a = lo + (len * q4) / 4;
      size_t b = lo + (len * (q4 + 1)) / 4;
      if (b >= nsteps) b = nsteps - 1;
      q[q4] = sign * (s[b] - s[a]);
    }
    double qmin = std::min({q[0], q[1], q[2], q[3]});
    double qmax = std::max({q[0], q[1], q[2], q[3]});
    if (qmin < rule.drift_quarter_progress) return false;
    if (qmax > rule.drift_quarter_ratio * qmin) return false;
    if (sign * (s.back() - s.front()) < rule.drift_total_progress) return false;
    double slope = sign * ls_slope(tr.times, s, lo, nsteps);
    return slope >= rule.drift_rate_min;
  };

  for (double sign : {+1.0, -1.0}) {
    if (series_ok(tr.mins, sign) && series_ok(tr.maxs, sign)) {
      out.fired = true;
      out.up = sign > 0.0;
      std::vector<double> mid(nsteps);
      for (size_t k = 0; k < nsteps; ++k) mid[k] = 0.5 * (tr.mins[k] + tr.maxs[k]);
      out.rate = ls_slope(tr.times, mid, lo, nsteps);
      return out;
    }
  }
  return out;
}

}  // namespace

EvolutionTrace evolve(const HamiltonianModel& model, const SemigroupConfig& cfg_in,
                      const GridFunction& w0, double t_final, const StopRule& rule_in,
                      int snapshot_stride) {
  SemigroupConfig cfg = resolve_config(model, w0.grid, cfg_in);
  require(w0.all_finite(), Errc::Internal, "initial data contains non-finite values");

  StopRule rule = rule_in;
  double w0_norm = w0.sup_norm();
  if (rule.tol_conv <= 0.0) rule.tol_conv = 1e-6 * (1.0 + w0_norm);
  if (rule.window <= 0.0)
    rule.window = std::min(20.0, std::max(1.0, 1.0 / std::max(model.lambda_bound, 0.05)));
  if (rule.u_cap <= 0.0) rule.u_cap = 1e3 * (1.0 + w0_norm);

  int total_steps = static_cast<int>(std::llround(t_final / cfg.dt));
  require(std::abs(total_steps * cfg.dt - t_final) < 1e-9 * (1.0 + std::abs(t_final)),
          Errc::ConfigError, "t_final must be a multiple of dt");

  EvolutionTrace tr;
  tr.times.reserve(static_cast<size_t>(total_steps) + 1);
  tr.mins.reserve(tr.times.capacity());
  tr.maxs.reserve(tr.times.capacity());
  tr.sup_incs.reserve(tr.times.capacity());

  GridFunction w = w0;
  GridFunction next(w0.grid);
  std::optional<SLStepper> stepper;
  if (cfg.scheme == Scheme::SemiLagrangian) stepper.emplace(model, cfg, w0.grid, cfg.direction);

  tr.times.push_back(0.0);
  tr.mins.push_back(w.min());
  tr.maxs.push_back(w.max());
  tr.sup_incs.push_back(0.0);
  if (snapshot_stride > 0) tr.snapshots.emplace_back(0.0, w);

  // Snapshot ring for the time-periodicity probe.
  std::deque<std::pair<double, GridFunction>> ring;
  double ring_dt = 0.25;
  double ring_keep = 2.0 * (rule.period_ladder.empty() ? 0.0 : rule.period_ladder.back()) + 1.0;
  if (rule.detect_periodic) ring.emplace_back(0.0, w);

  int check_every = std::max(1, static_cast<int>(std::llround(rule.check_interval / cfg.dt)));
  int ring_every = std::max(1, static_cast<int>(std::llround(ring_dt / cfg.dt)));
  int window_steps = std::max(1, static_cast<int>(std::llround(rule.window / cfg.dt)));

  auto finish = [&](StopReason reason, double t_end) {
    tr.stop = reason;
    tr.t_end = t_end;
    tr.final_w = std::move(w);
    size_t n = tr.times.size();
    size_t lo = n / 2;
    std::vector<double> mid(n);
    for (size_t k = 0; k < n; ++k) mid[k] = 0.5 * (tr.mins[k] + tr.maxs[k]);
    if (n - lo >= 4) tr.measured_rate = ls_slope(tr.times, mid, lo, n);
  };

  for (int k = 1; k <= total_steps; ++k) {
    if (cfg.scheme == Scheme::LaxFriedrichs)
      lf_step(model, cfg, w, next);
    else
      stepper->step(w, next);
    double t = k * cfg.dt;
    SupMetrics inc = sup_metrics(next, w);
    std::swap(w, next);
    require(w.all_finite(), Errc::Internal, "evolution produced non-finite values");
    tr.times.push_back(t);
    tr.mins.push_back(w.min());
    tr.maxs.push_back(w.max());
    tr.sup_incs.push_back(inc.sup_norm_diff);
    if (snapshot_stride > 0 && k % snapshot_stride == 0) tr.snapshots.emplace_back(t, w);

    if (rule.detect_periodic && k % ring_every == 0) {
      ring.emplace_back(t, w);
      while (!ring.empty() && ring.front().first < t - ring_keep) ring.pop_front();
    }

    // Hard amplitude abort keeps the values finite under genuine blow-up.
    if (tr.mins.back() > rule.hard_cap) {
      finish(StopReason::DivergedUp, t);
      return tr;
    }
    if (tr.maxs.back() < -rule.hard_cap) {
      finish(StopReason::DivergedDown, t);
      return tr;
    }

    if (k % check_every != 0 && k != total_steps) continue;

    // Converged: every increment inside the trailing window below tol_conv.
    if (k >= window_steps) {
      bool conv = true;
      for (size_t s = tr.sup_incs.size() - static_cast<size_t>(window_steps);
           s < tr.sup_incs.size(); ++s) {
        if (tr.sup_incs[s] >= rule.tol_conv) {
          conv = false;
          break;
        }
      }
      if (conv) {
        finish(StopReason::Converged, t);
        return tr;
      }
    }

    if (rule.detect_periodic && !ring.empty()) {
      for (double period : rule.period_ladder) {
        if (period > 0.5 * t) continue;
        // a genuine cycle moves within the period; quiescent traces belong to
        // the convergence detector
        int period_steps = static_cast<int>(std::llround(period / cfg.dt));
        double moved = 0.0;
        for (size_t s = tr.sup_incs.size() - static_cast<size_t>(period_steps);
             s < tr.sup_incs.size(); ++s)
          moved = std::max(moved, tr.sup_incs[s]);
        if (moved < rule.tol_conv) continue;
        const GridFunction* w1 = nullptr;
        const GridFunction* w2 = nullptr;
        for (const auto& [ts, snap] : ring) {
          if (std::abs(ts - (t - period)) < 0.5 * ring_dt) w1 = &snap;
          if (std::abs(ts - (t - 2.0 * period)) < 0.5 * ring_dt) w2 = &snap;
        }
        if (!w1 || !w2) continue;
        if (sup_metrics(w, *w1).sup_norm_diff < rule.tol_conv &&
            sup_metrics(*w1, *w2).sup_norm_diff < rule.tol_conv) {
          finish(StopReason::Periodic, t);
          tr.period = period;
          return tr;
        }
      }
    }

    if (rule.detect_drift) {
      DriftCall dc = drift_test(tr, rule);
      if (!dc.fired && tr.mins.back() > rule.u_cap) {
        // Amplitude already overwhelming; accept a shorter evidence window.
        StopRule relaxed = rule;
        relaxed.drift_min_evidence = std::max(4.0, rule.drift_min_evidence / 4.0);
        dc = drift_test(tr, relaxed);
        if (dc.fired && !dc.up) dc.fired = false;
      } else if (!dc.fired && tr.maxs.back() < -rule.u_cap) {
        StopRule relaxed = rule;
        relaxed.drift_min_evidence = std::max(4.0, rule.drift_min_evidence / 4.0);
        dc = drift_test(tr, relaxed);
        if (dc.fired && dc.up) dc.fired = false;
      }
      if (dc.fired) {
        finish(dc.up ? StopReason::DivergedUp : StopReason::DivergedDown, t);
        return tr;
      }
    }
  }
  finish(StopReason::ReachedTFinal, total_steps * cfg.dt);
  return tr;
}

SuiteReport semigroup_property_suite(const HamiltonianModel& model, const SemigroupConfig& cfg_in,
                                     const std::vector<std::pair<GridFunction, GridFunction>>& pairs,
                                     const std::vector<double>& times) {
  SemigroupConfig cfg = resolve_config(model, pairs.at(0).first.grid, cfg_in);
  SuiteReport rep;
  double lambda = model.lambda_bound;

  SLStepper bwd(model, cfg, pairs.at(0).first.grid, Direction::Backward);
  SLStepper fwd(model, cfg, pairs.at(0).first.grid, Direction::Forward);
  auto run = [&](const GridFunction& w, double t, Direction dir) {
    int steps = std::max(0, static_cast<int>(std::llround(t / cfg.dt)));
    GridFunction cur = w;
    GridFunction buf(w.grid);
    const SLStepper& st = dir == Direction::Backward ? bwd : fwd;
    for (int k = 0; k < steps; ++k) {
      st.step(cur, buf);
      std::swap(cur, buf);
    }
    return cur;
  };

  // (a) exact pointwise monotonicity of one step, both directions
  {
    int violations = 0;
    for (const auto& [phi, psi] : pairs) {
      GridFunction lo(phi.grid), hi(phi.grid);
      for (int i = 0; i < phi.size(); ++i) {
        lo[i] = std::min(phi[i], psi[i]);
        hi[i] = std::max(phi[i], psi[i]);
      }
      for (Direction dir : {Direction::Backward, Direction::Forward}) {
        SemigroupConfig c2 = cfg;
        c2.direction = dir;
        GridFunction slo =
            dir == Direction::Backward ? step_backward(model, c2, lo) : step_forward(model, c2, lo);
        GridFunction shi =
            dir == Direction::Backward ? step_backward(model, c2, hi) : step_forward(model, c2, hi);
        for (int i = 0; i < slo.size(); ++i)
          if (slo[i] > shi[i]) ++violations;
      }
    }
    rep.items.push_back({"monotonicity_exact", violations == 0, double(violations), 0.0});
  }

  // (b) e^{lambda t}-expansiveness with (1+10 dt) slack
  {
    double worst = 0.0;
    bool ok = true;
    for (const auto& [phi, psi] : pairs) {
      double d0 = sup_metrics(phi, psi).sup_norm_diff;
      if (d0 == 0.0) continue;
      for (double t : times) {
        double bound = std::exp(lambda * t) * (1.0 + 10.0 * cfg.dt) * d0;
        for (Direction dir : {Direction::Backward, Direction::Forward}) {
          double dt_norm = sup_metrics(run(phi, t, dir), run(psi, t, dir)).sup_norm_diff;
          worst = std::max(worst, dt_norm / bound);
          if (dt_norm > bound) ok = false;
        }
      }
    }
    rep.items.push_back({"expansiveness", ok, worst, 1.0});
  }

  // (c) semigroup composition, exact for step multiples
  {
    double worst = 0.0;
    const auto& phi = pairs.at(0).first;
    for (double t : times) {
      double s = times.front();
      GridFunction a = run(phi, t + s, Direction::Backward);
      GridFunction b = run(run(phi, s, Direction::Backward), t, Direction::Backward);
      worst = std::max(worst, sup_metrics(a, b).sup_norm_diff);
    }
    rep.items.push_back({"composition_exact", worst == 0.0, worst, 0.0});
  }

  // (d) T_0 = id exactly
  {
    const auto& phi = pairs.at(0).first;
    double d = sup_metrics(run(phi, 0.0, Direction::Backward), phi).sup_norm_diff;
    rep.items.push_back({"identity_at_zero", d == 0.0, d, 0.0});
  }

  // (e) ordering equivalence: psi <= T^- phi  =>  T^+ psi <= phi + slack
  {
    double slack = 20.0 * (pairs.at(0).first.grid.h + cfg.dt);
    double worst = 0.0;
    bool ok = true;
    for (const auto& [phi, psi_raw] : pairs) {
      (void)psi_raw;
      for (double t : times) {
        GridFunction tphi = run(phi, t, Direction::Backward);
        GridFunction psi = tphi;
        for (int i = 0; i < psi.size(); ++i) psi[i] -= 0.05;  // strictly below T^- phi
        GridFunction fpsi = run(psi, t, Direction::Forward);
        double viol = sup_metrics(fpsi, phi).max_diff;
        worst = std::max(worst, viol);
        if (viol > slack) ok = false;
      }
    }
    rep.items.push_back({"ordering_equivalence", ok, worst, slack});
  }

  return rep;
}

}  // namespace chj
