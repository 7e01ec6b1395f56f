#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chj/errors.hpp"
#include "chj/torus.hpp"

namespace chj {

struct GradH {
  Vec dx{0.0, 0.0};  // dH/dx
  double du = 0.0;   // dH/du
  Vec dp{0.0, 0.0};  // dH/dp
};

/// Evaluator bundle for a contact Hamiltonian H(x,u,p): analytic derivatives,
/// the Lipschitz-in-u bound, and (when the catalog knows it) a closed-form
/// Lagrangian. Immutable after construction; all evaluators are pure.
struct HamiltonianModel {
  int dim = 1;
  std::string name;
  std::function<double(const Vec&, double, const Vec&)> eval_H;
  std::function<GradH(const Vec&, double, const Vec&)> grad_H;
  double lambda_bound = 0.0;
  std::function<double(const Vec&, double, const Vec&)> lagrangian;  // empty if unknown
  std::optional<double> v_max_hint;

  // Separable split L(x,u,v) = lag_base(x,v) + lag_ucoef(x)*lag_uterm(u); the
  // stepping loops precompute lag_base/lag_ucoef tables. A null lag_ucoef
  // means the constant 1, a null lag_uterm means no u-term at all.
  std::function<double(const Vec&, const Vec&)> lag_base;
  std::function<double(double)> lag_uterm;
  std::function<double(const Vec&)> lag_ucoef;

  bool has_lagrangian() const { return static_cast<bool>(lagrangian); }
};

using Param = std::variant<double, std::string, std::vector<double>>;

/// Catalog identifier plus named parameters; deserialized from the run config.
struct ModelSpec {
  std::string name;  // quadratic | quadratic_plus_f | linear_in_u | mechanical
  std::map<std::string, Param> params;
  int dim = 1;
};

/// Instantiates a catalog entry and validates its assumptions on a standard
/// sample set (|dH/du| <= lambda, strict convexity in p, Fenchel inequality).
HamiltonianModel build_model(const ModelSpec& spec);

struct LegendreResult {
  double value = 0.0;  // L(x,u,v)
  Vec argmax_p{0.0, 0.0};
};

/// Numeric Legendre transform: max over |p| <= p_radius of p.v - H(x,u,p),
/// grid scan plus ascent refinement to gradient tolerance 1e-10. Signals
/// RadiusTooSmall when the maximizer sticks to the search boundary.
LegendreResult legendre(const HamiltonianModel& m, const Vec& x, double u, const Vec& v,
                        double p_radius);

/// Default search radius 2*(1+|v|), suitable for the quadratic-type catalog.
double default_p_radius(const HamiltonianModel& m, const Vec& v);

/// L(x,u,v): closed form when the catalog has it, numeric transform otherwise.
double lagrangian_value(const HamiltonianModel& m, const Vec& x, double u, const Vec& v);

/// Default stencil bound: the model hint, else 4*(1+sup ||dH/dp||) sampled
/// over nodes, |u| <= 2 and ||p|| <= 2.
double default_v_max(const HamiltonianModel& m);

}  // namespace chj
