#include "chj/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace chj {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double get_double(const ModelSpec& spec, const std::string& key, double dflt) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return dflt;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  fail(Errc::MissingParam, "param '" + key + "' of model '" + spec.name + "' must be a number");
}

std::string get_string(const ModelSpec& spec, const std::string& key, const std::string& dflt) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return dflt;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  fail(Errc::MissingParam, "param '" + key + "' of model '" + spec.name + "' must be a string");
}

std::vector<double> get_series(const ModelSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) return {};
  if (const std::vector<double>* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const double* d = std::get_if<double>(&it->second)) return {*d};
  fail(Errc::MissingParam, "param '" + key + "' of model '" + spec.name + "' must be an array");
}

void check_keys(const ModelSpec& spec, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : spec.params)
    require(allowed.count(key) > 0, Errc::ConfigError,
            "unknown param '" + key + "' for model '" + spec.name + "'");
}

// Truncated Fourier series c0 + sum_k (cos_k cos(2 pi k s) + sin_k sin(2 pi k s)).
struct Fourier {
  double c0 = 0.0;
  std::vector<double> cos_k;
  std::vector<double> sin_k;

  bool trivial() const { return c0 == 0.0 && cos_k.empty() && sin_k.empty(); }

  double eval(double s) const {
    double r = c0;
    for (size_t k = 0; k < cos_k.size(); ++k) r += cos_k[k] * std::cos(kTwoPi * (k + 1) * s);
    for (size_t k = 0; k < sin_k.size(); ++k) r += sin_k[k] * std::sin(kTwoPi * (k + 1) * s);
    return r;
  }

  double deriv(double s) const {
    double r = 0.0;
    for (size_t k = 0; k < cos_k.size(); ++k)
      r -= cos_k[k] * kTwoPi * (k + 1) * std::sin(kTwoPi * (k + 1) * s);
    for (size_t k = 0; k < sin_k.size(); ++k)
      r += sin_k[k] * kTwoPi * (k + 1) * std::cos(kTwoPi * (k + 1) * s);
    return r;
  }

  double sup_bound() const {
    double r = std::abs(c0);
    for (double a : cos_k) r += std::abs(a);
    for (double a : sin_k) r += std::abs(a);
    return r;
  }
};

// u-shape g with |g'| <= 1; f(u) = a*g(b*u).
struct UShape {
  std::function<double(double)> g;
  std::function<double(double)> dg;
  double slope_sup = 1.0;
};

UShape make_shape(const std::string& name) {
  if (name == "tanh" || name == "tanh_scaled")
    return {[](double u) { return std::tanh(u); },
            [](double u) {
              double c = std::cosh(u);
              return 1.0 / (c * c);
            },
            1.0};
  if (name == "sin")
    return {[](double u) { return std::sin(u); }, [](double u) { return std::cos(u); }, 1.0};
  if (name == "atan")
    return {[](double u) { return std::atan(u); }, [](double u) { return 1.0 / (1.0 + u * u); },
            1.0};
  if (name == "identity")
    return {[](double u) { return u; }, [](double) { return 1.0; }, 1.0};
  if (name == "zero" || name == "none")
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
  fail(Errc::MissingParam, "unknown u-shape '" + name + "' (tanh|sin|atan|identity|zero)");
}

struct UTerm {
  std::function<double(double)> f;   // f(u) = a*g(b*u)
  std::function<double(double)> df;  // f'(u)
  double lambda = 0.0;
  bool trivial = false;
};

UTerm make_uterm(const ModelSpec& spec) {
  std::string fname = get_string(spec, "f", "zero");
  double a = get_double(spec, "a", 1.0);
  double b = get_double(spec, "b", 1.0);
  UShape shape = make_shape(fname);
  UTerm t;
  t.lambda = std::abs(a * b) * shape.slope_sup;
  t.trivial = (t.lambda == 0.0);
  t.f = [a, b, g = shape.g](double u) { return a * g(b * u); };
  t.df = [a, b, dg = shape.dg](double u) { return a * b * dg(b * u); };
  return t;
}

void validate_model(const HamiltonianModel& m) {
  std::vector<double> us = {-2.0, -0.5, 0.0, 0.5, 2.0};
  std::vector<double> ps = {-2.0, -1.0, -0.25, 0.0, 0.25, 1.0, 2.0};
  const int nx = 16;
  const double dp = 0.25;
  for (int ix = 0; ix < nx; ++ix) {
    Vec x = m.dim == 1 ? vec1(ix / double(nx)) : vec2(ix / double(nx), ((ix * 7) % nx) / double(nx));
    for (double u : us) {
      for (double p1 : ps) {
        Vec p = m.dim == 1 ? vec1(p1) : vec2(p1, 0.5 * p1);
        double hu = m.grad_H(x, u, p).du;
        require(std::abs(hu) <= m.lambda_bound + 1e-12, Errc::LambdaBoundViolated,
                "sampled |dH/du| exceeds declared lambda for '" + m.name + "'");
        for (int d = 0; d < m.dim; ++d) {
          Vec pp = p, pm = p;
          pp[d] += dp;
          pm[d] -= dp;
          double second = m.eval_H(x, u, pp) - 2.0 * m.eval_H(x, u, p) + m.eval_H(x, u, pm);
          require(second > 0.0, Errc::ConfigError,
                  "model '" + m.name + "' is not strictly convex in p");
        }
        if (m.has_lagrangian()) {
          for (double v1 : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            Vec v = m.dim == 1 ? vec1(v1) : vec2(v1, -0.5 * v1);
            double lhs = m.lagrangian(x, u, v) + m.eval_H(x, u, p);
            require(lhs >= dot(p, v, m.dim) - 1e-9, Errc::ConfigError,
                    "Fenchel inequality fails for '" + m.name + "'");
          }
          Vec v_star = m.grad_H(x, u, p).dp;
          double gap = m.lagrangian(x, u, v_star) + m.eval_H(x, u, p) - dot(p, v_star, m.dim);
          require(std::abs(gap) <= 1e-8, Errc::ConfigError,
                  "Fenchel equality at v = dH/dp fails for '" + m.name + "'");
        }
      }
    }
  }
}

HamiltonianModel build_quadratic(const ModelSpec& spec) {
  check_keys(spec, {});
  HamiltonianModel m;
  m.dim = spec.dim;
  m.name = "quadratic";
  int dim = m.dim;
  m.eval_H = [dim](const Vec&, double, const Vec& p) { return norm2(p, dim); };
  m.grad_H = [dim](const Vec&, double, const Vec& p) {
    GradH g;
    g.dp = scale(p, 2.0, dim);
    return g;
  };
  m.lambda_bound = 0.0;
  m.lagrangian = [dim](const Vec&, double, const Vec& v) { return 0.25 * norm2(v, dim); };
  m.lag_base = [dim](const Vec&, const Vec& v) { return 0.25 * norm2(v, dim); };
  m.v_max_hint = 16.0;
  return m;
}

HamiltonianModel build_quadratic_plus_f(const ModelSpec& spec) {
  check_keys(spec, {"f", "a", "b"});
  UTerm t = make_uterm(spec);
  HamiltonianModel m;
  m.dim = spec.dim;
  m.name = "quadratic_plus_f";
  int dim = m.dim;
  m.eval_H = [dim, f = t.f](const Vec&, double u, const Vec& p) { return norm2(p, dim) + f(u); };
  m.grad_H = [dim, df = t.df](const Vec&, double u, const Vec& p) {
    GradH g;
    g.du = df(u);
    g.dp = scale(p, 2.0, dim);
    return g;
  };
  m.lambda_bound = t.lambda;
  m.lagrangian = [dim, f = t.f](const Vec&, double u, const Vec& v) {
    return 0.25 * norm2(v, dim) - f(u);
  };
  m.lag_base = [dim](const Vec&, const Vec& v) { return 0.25 * norm2(v, dim); };
  if (!t.trivial) m.lag_uterm = [f = t.f](double u) { return -f(u); };
  m.v_max_hint = 16.0;
  return m;
}

HamiltonianModel build_linear_in_u(const ModelSpec& spec) {
  check_keys(spec, {"f_const", "f_cos", "f_sin", "f2_cos", "f2_sin"});
  Fourier f1{get_double(spec, "f_const", 0.0), get_series(spec, "f_cos"), get_series(spec, "f_sin")};
  Fourier f2{0.0, get_series(spec, "f2_cos"), get_series(spec, "f2_sin")};
  require(!(f1.trivial() && f2.trivial()), Errc::MissingParam,
          "linear_in_u needs a nontrivial factor f(x)");
  HamiltonianModel m;
  m.dim = spec.dim;
  m.name = "linear_in_u";
  int dim = m.dim;
  auto fx = [f1, f2, dim](const Vec& x) {
    return f1.eval(x[0]) + (dim == 2 ? f2.eval(x[1]) : 0.0);
  };
  m.eval_H = [dim, fx](const Vec& x, double u, const Vec& p) { return fx(x) * u + norm2(p, dim); };
  m.grad_H = [dim, f1, f2, fx](const Vec& x, double u, const Vec& p) {
    GradH g;
    g.dx[0] = f1.deriv(x[0]) * u;
    if (dim == 2) g.dx[1] = f2.deriv(x[1]) * u;
    g.du = fx(x);
    g.dp = scale(p, 2.0, dim);
    return g;
  };
  m.lambda_bound = f1.sup_bound() + f2.sup_bound();
  m.lagrangian = [dim, fx](const Vec& x, double u, const Vec& v) {
    return 0.25 * norm2(v, dim) - fx(x) * u;
  };
  m.lag_base = [dim](const Vec&, const Vec& v) { return 0.25 * norm2(v, dim); };
  m.lag_uterm = [](double u) { return u; };
  m.lag_ucoef = [fx](const Vec& x) { return -fx(x); };
  m.v_max_hint = 16.0;
  return m;
}

HamiltonianModel build_mechanical(const ModelSpec& spec) {
  check_keys(spec, {"V_const", "V_cos", "V_sin", "V2_cos", "V2_sin", "f", "a", "b"});
  Fourier v1{get_double(spec, "V_const", 0.0), get_series(spec, "V_cos"), get_series(spec, "V_sin")};
  Fourier v2{0.0, get_series(spec, "V2_cos"), get_series(spec, "V2_sin")};
  UTerm t = make_uterm(spec);
  HamiltonianModel m;
  m.dim = spec.dim;
  m.name = "mechanical";
  int dim = m.dim;
  auto vx = [v1, v2, dim](const Vec& x) {
    return v1.eval(x[0]) + (dim == 2 ? v2.eval(x[1]) : 0.0);
  };
  m.eval_H = [dim, vx, f = t.f](const Vec& x, double u, const Vec& p) {
    return 0.5 * norm2(p, dim) + vx(x) + f(u);
  };
  m.grad_H = [dim, v1, v2, df = t.df](const Vec& x, double u, const Vec& p) {
    GradH g;
    g.dx[0] = v1.deriv(x[0]);
    if (dim == 2) g.dx[1] = v2.deriv(x[1]);
    g.du = df(u);
    g.dp = p;
    return g;
  };
  m.lambda_bound = t.lambda;
  m.lagrangian = [dim, vx, f = t.f](const Vec& x, double u, const Vec& v) {
    return 0.5 * norm2(v, dim) - vx(x) - f(u);
  };
  m.lag_base = [dim, vx](const Vec& x, const Vec& v) { return 0.5 * norm2(v, dim) - vx(x); };
  if (!t.trivial) m.lag_uterm = [f = t.f](double u) { return -f(u); };
  m.v_max_hint = 12.0;
  return m;
}

}  // namespace

HamiltonianModel build_model(const ModelSpec& spec) {
  require(spec.dim == 1 || spec.dim == 2, Errc::ConfigError, "model dim must be 1 or 2");
  HamiltonianModel m;
  if (spec.name == "quadratic")
    m = build_quadratic(spec);
  else if (spec.name == "quadratic_plus_f")
    m = build_quadratic_plus_f(spec);
  else if (spec.name == "linear_in_u")
    m = build_linear_in_u(spec);
  else if (spec.name == "mechanical")
    m = build_mechanical(spec);
  else
    fail(Errc::UnknownModel, "no catalog entry named '" + spec.name + "'");
  validate_model(m);
  return m;
}

double default_p_radius(const HamiltonianModel&, const Vec& v) {
  return 2.0 * (1.0 + std::sqrt(v[0] * v[0] + v[1] * v[1]));
}

namespace {

// Objective of the transform: g(p) = <p,v> - H(x,u,p), concave under (H1).
struct LegendreObjective {
  const HamiltonianModel& m;
  Vec x;
  double u;
  Vec v;

  double value(const Vec& p) const { return dot(p, v, m.dim) - m.eval_H(x, u, p); }
  Vec grad(const Vec& p) const {
    Vec hp = m.grad_H(x, u, p).dp;
    Vec g{0.0, 0.0};
    for (int d = 0; d < m.dim; ++d) g[d] = v[d] - hp[d];
    return g;
  }
};

}  // namespace

LegendreResult legendre(const HamiltonianModel& m, const Vec& x, double u, const Vec& v,
                        double p_radius) {
  require(p_radius > 0.0, Errc::RadiusTooSmall, "p_radius must be positive");
  LegendreObjective obj{m, x, u, v};
  const int dim = m.dim;

  // Coarse scan of the ball.
  const int npts = 33;
  Vec best_p{0.0, 0.0};
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < npts; ++i) {
    double p1 = -p_radius + 2.0 * p_radius * i / (npts - 1);
    if (dim == 1) {
      double val = obj.value(vec1(p1));
      if (val > best) {
        best = val;
        best_p = vec1(p1);
      }
    } else {
      for (int j = 0; j < npts; ++j) {
        double p2 = -p_radius + 2.0 * p_radius * j / (npts - 1);
        Vec p = vec2(p1, p2);
        if (norm(p, 2) > p_radius) continue;
        double val = obj.value(p);
        if (val > best) {
          best = val;
          best_p = p;
        }
      }
    }
  }

  // Damped Newton on v = H_p(p); Jacobian by finite differences on H_p.
  Vec p = best_p;
  const double fd = 1e-6;
  bool converged = false;
  for (int it = 0; it < 80; ++it) {
    Vec g = obj.grad(p);
    double gn = norm(g, dim);
    if (gn <= 1e-10 * (1.0 + norm(v, dim))) {
      converged = true;
      break;
    }
    // Hessian of H in p (positive definite under (H1)).
    double hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int d = 0; d < dim; ++d) {
      Vec pp = p, pm = p;
      pp[d] += fd;
      pm[d] -= fd;
      Vec hp_p = m.grad_H(x, u, pp).dp;
      Vec hp_m = m.grad_H(x, u, pm).dp;
      for (int e = 0; e < dim; ++e) hess[e][d] = (hp_p[e] - hp_m[e]) / (2.0 * fd);
    }
    Vec step{0.0, 0.0};
    if (dim == 1) {
      if (hess[0][0] <= 0.0) fail(Errc::NonConcaveDetected, "H not convex in p at sample point");
      step[0] = g[0] / hess[0][0];
    } else {
      double det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
      if (det <= 0.0 || hess[0][0] <= 0.0)
        fail(Errc::NonConcaveDetected, "H not convex in p at sample point");
      step[0] = (hess[1][1] * g[0] - hess[0][1] * g[1]) / det;
      step[1] = (-hess[1][0] * g[0] + hess[0][0] * g[1]) / det;
    }
    // Backtracking on the concave objective.
    double t = 1.0;
    double f0 = obj.value(p);
    bool moved = false;
    while (t >= 1e-14) {
      Vec cand = p;
      for (int d = 0; d < dim; ++d) cand[d] += t * step[d];
      if (norm(cand, dim) <= p_radius && obj.value(cand) >= f0) {
        p = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }

  if (!converged) {
    // Either the maximizer sits on the boundary or concavity failed.
    double center_curv = 0.0;
    for (int d = 0; d < dim; ++d) {
      Vec pp{0.0, 0.0}, pm{0.0, 0.0};
      pp[d] = 0.25;
      pm[d] = -0.25;
      center_curv += m.eval_H(x, u, pp) - 2.0 * m.eval_H(x, u, {0.0, 0.0}) + m.eval_H(x, u, pm);
    }
    if (center_curv <= 0.0)
      fail(Errc::NonConcaveDetected, "Legendre ascent did not converge; H looks non-convex in p");
    fail(Errc::RadiusTooSmall, "Legendre maximizer stuck at ||p|| = p_radius; enlarge the search");
  }
  if (norm(p, dim) >= p_radius * (1.0 - 1e-8))
    fail(Errc::RadiusTooSmall, "Legendre maximizer on the search boundary");
  return {obj.value(p), p};
}

double lagrangian_value(const HamiltonianModel& m, const Vec& x, double u, const Vec& v) {
  if (m.has_lagrangian()) return m.lagrangian(x, u, v);
  return legendre(m, x, u, v, default_p_radius(m, v)).value;
}

double default_v_max(const HamiltonianModel& m) {
  if (m.v_max_hint) return *m.v_max_hint;
  double sup_hp = 0.0;
  const int nx = 16;
  for (int ix = 0; ix < nx; ++ix) {
    Vec x = m.dim == 1 ? vec1(ix / double(nx)) : vec2(ix / double(nx), ((ix * 7) % nx) / double(nx));
    for (double u : {-2.0, 0.0, 2.0}) {
      for (double p1 : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        Vec p = m.dim == 1 ? vec1(p1) : vec2(p1, 0.5 * p1);
        sup_hp = std::max(sup_hp, norm(m.grad_H(x, u, p).dp, m.dim));
      }
    }
  }
  return 4.0 * (1.0 + sup_hp);
}

}  // namespace chj
