#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chj/grid.hpp"
#include "chj/hamiltonian.hpp"
#include "chj/semigroup.hpp"

namespace chj {

enum class Outcome { DivergesUp, DivergesDown, Bounded, Periodic, Inconclusive };

const char* outcome_name(Outcome o);

struct TraceSummary {
  StopReason stop = StopReason::ReachedTFinal;
  double t_end = 0.0;
  double measured_rate = 0.0;
  double final_min = 0.0;
  double final_max = 0.0;
  double final_sup_increment = 0.0;
  double period = 0.0;
  std::string probe;  // which initial profile decided the outcome
};

/// Tagged outcome of a long-time run. The limit is present exactly for
/// Bounded/Periodic, and then carries the residual sup |H(x,w,D0w) - c|.
struct Classification {
  Outcome outcome = Outcome::Inconclusive;
  TraceSummary evidence;
  std::optional<GridFunction> limit;
  std::optional<double> residual;
  bool marginal = false;  // set by estimate_interval near bracket boundaries
};

/// Driver knobs for membership runs.
struct RunCfg {
  SemigroupConfig sg;
  StopRule stop;
  double t_max = 300.0;
  int rho_bisections = 30;
};

/// Constants {-2, 0, 2} and sin(2 pi x1).
std::vector<GridFunction> default_probes(const TorusGrid& grid);

double residual_sup(const HamiltonianModel& model, const GridFunction& w, double c);

/// Membership evidence for c via long-time boundedness of T^{-,c}: evolves
/// probes (extremal ones first; a diverging extremal probe settles the rest by
/// monotonicity), falling back to the rho-interpolation bisection when probes
/// diverge both ways.
Classification classify(const HamiltonianModel& model, double c,
                        const std::vector<GridFunction>& probes, const RunCfg& cfg);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  bool open_ended = false;         // search expansion never found this divergence side
  bool resolution_limited = false; // bisection stalled on Inconclusive labels
};

struct IntervalEstimate {
  Bracket c_l;
  Bracket c_r;
  double tol_c = 0.05;
  std::vector<std::pair<double, Outcome>> samples;
};

/// Brackets the admissible interval endpoints by bisection between divergence
/// regimes and bounded evidence. Inconclusive labels shrink the trusted
/// bracket rather than being assigned.
IntervalEstimate estimate_interval(const HamiltonianModel& model,
                                   std::pair<double, double> c_search, double tol_c,
                                   const std::vector<GridFunction>& probes, const RunCfg& cfg);

struct OptConfig {
  double u_box = 10.0;
  int iters = 250;              // per beta stage
  std::vector<double> betas = {10.0, 100.0, 1000.0};
  int random_starts = 1;
  unsigned long long seed = 1;
};

struct OptimizerResult {
  double estimate = 0.0;
  GridFunction arg;
  bool budget_exhausted = false;
};

/// Min-max endpoint estimate: minimizes the soft maximum over nodes of
/// H(x_i, u_i, D0 u_i), values clamped to [-u_box, u_box]; reports the hard max.
OptimizerResult minmax_cl(const HamiltonianModel& model, const TorusGrid& grid,
                          const OptConfig& cfg);

/// Max-min mirror; per node the p-argument ranges over the segment (box)
/// spanned by the one-sided differences, a conservative surrogate for the
/// a.e. gradients of semiconvex functions.
OptimizerResult maxmin_cr(const HamiltonianModel& model, const TorusGrid& grid,
                          const OptConfig& cfg);

struct AuditItem {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct AuditReport {
  std::vector<AuditItem> items;
  bool all_pass() const;
};

/// Verifies the fixed-point inequalities behind the existence criteria on a
/// Bounded limit: backward near-invariance of the limit and forward
/// near-invariance of its forward image, each within 2*tol_conv.
/// Throws AuditFailed naming the violated inequality.
AuditReport theorem_a_audit(const HamiltonianModel& model, const RunCfg& cfg, double c,
                            const GridFunction& limit);

}  // namespace chj
