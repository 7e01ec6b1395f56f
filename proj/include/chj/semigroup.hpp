#pragma once

#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "chj/grid.hpp"
#include "chj/hamiltonian.hpp"

namespace chj {

enum class Scheme { SemiLagrangian, LaxFriedrichs };
enum class UCoupling { Explicit, Implicit };
enum class Direction { Backward, Forward };

struct SemigroupConfig {
  double dt = 0.0;     // 0 -> min(5e-3, 0.25/(lambda+1))
  double v_max = 0.0;  // 0 -> model hint, else sampled bound
  double c = 0.0;
  Scheme scheme = Scheme::SemiLagrangian;
  UCoupling u_coupling = UCoupling::Explicit;
  Direction direction = Direction::Backward;
  double dv = 0.0;            // velocity grid spacing, 0 -> 2*sqrt(h)
  double lf_viscosity = 0.0;  // 0 -> sampled sup ||dH/dp||
  double lf_p_range = 8.0;    // p sample range for the viscosity bound
};

/// Fills the auto fields and validates dt*lambda < 1/2 plus the monotone CFL
/// condition for Lax-Friedrichs. Throws CFLViolated.
SemigroupConfig resolve_config(const HamiltonianModel& model, const TorusGrid& grid,
                               SemigroupConfig cfg);

/// One step of the discrete backward solution semigroup at level c.
GridFunction step_backward(const HamiltonianModel& model, const SemigroupConfig& cfg,
                           const GridFunction& w);

/// One step of the discrete forward solution semigroup at level c.
GridFunction step_forward(const HamiltonianModel& model, const SemigroupConfig& cfg,
                          const GridFunction& w);

enum class StopReason { ReachedTFinal, Converged, DivergedUp, DivergedDown, Periodic };

const char* stop_reason_name(StopReason r);

struct StopRule {
  double tol_conv = 0.0;  // 0 -> 1e-6*(1+||w0||_inf)
  double window = 0.0;    // 0 -> max(1, 1/max(lambda,0.05)), capped at 20
  double u_cap = 0.0;     // 0 -> 1e3*(1+||w0||_inf)
  bool detect_drift = true;
  bool detect_periodic = true;
  // Steady-drift detector: fit window is the trailing half of the run, at
  // least min_evidence long; its four quarters must each progress by at least
  // quarter_progress, agree within quarter_ratio, and the run must have moved
  // by total_progress overall at rate at least rate_min.
  double drift_rate_min = 4e-3;
  double drift_quarter_progress = 0.25;
  double drift_quarter_ratio = 2.0;
  double drift_total_progress = 2.5;
  double drift_min_evidence = 32.0;
  std::vector<double> period_ladder = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  double check_interval = 1.0;  // detector cadence, in time units
  double hard_cap = 1e8;        // absolute value bound; beyond it the run stops
};

/// Diagnostics of a long run: per-step (t, min, max, sup increment), strided
/// snapshots, and the stop decision.
struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> mins;
  std::vector<double> maxs;
  std::vector<double> sup_incs;
  std::vector<std::pair<double, GridFunction>> snapshots;
  StopReason stop = StopReason::ReachedTFinal;
  double measured_rate = 0.0;  // least-squares slope of (min+max)/2 over the fit window
  double period = 0.0;         // set when stop == Periodic
  GridFunction final_w;
  double t_end = 0.0;
};

/// Iterates the one-step operator up to t_final, recording diagnostics; the
/// stop rule may end the run early on convergence, steady divergence, or a
/// time-periodic match. Inconclusive (ReachedTFinal) is a valid outcome.
EvolutionTrace evolve(const HamiltonianModel& model, const SemigroupConfig& cfg,
                      const GridFunction& w0, double t_final, const StopRule& rule = {},
                      int snapshot_stride = 0);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct SuiteReport {
  std::vector<PropertyCheck> items;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

/// Checks, on the given sample pairs and times: exact monotonicity, the
/// e^{lambda t} expansion bound, exact composition, identity at t=0, and the
/// backward/forward ordering equivalence.
SuiteReport semigroup_property_suite(const HamiltonianModel& model, const SemigroupConfig& cfg,
                                     const std::vector<std::pair<GridFunction, GridFunction>>& pairs,
                                     const std::vector<double>& times);

}  // namespace chj
