#include <doctest.h>

#include <cmath>

#include "chj/action.hpp"
#include "test_support.hpp"

using namespace chj;
using namespace chj::test;

TEST_SUITE_BEGIN("action");

namespace {

constexpr double kDt = 5e-3;
constexpr double kVmax = 16.0;

ActionField quad_field(const TorusGrid& g, double x0, double u0, double c, double t) {
  HamiltonianModel m = quadratic();
  int steps = static_cast<int>(std::llround(t / kDt));
  return forward_action(m, g, vec1(x0), u0, c, kDt, steps, kVmax);
}

}  // namespace

TEST_CASE("forward_action: stay-put value at the seed") {
  TorusGrid g(1, 64);
  ActionField f = quad_field(g, 0.5, 0.0, 0.0, 1.0);
  CHECK(std::abs(f.value_at(f.n_steps(), vec1(0.5))) < 5e-2);

  // action shifted by c*t along the same optimal curve
  ActionField fc = quad_field(g, 0.5, 0.0, 0.7, 1.0);
  CHECK(fc.value_at(fc.n_steps(), vec1(0.5)) == doctest::Approx(0.7).epsilon(0.05));
}

TEST_CASE("forward_action: zero steps returns the seed exactly") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  ActionField f = forward_action(m, g, vec1(0.25), 1.25, 0.0, kDt, 0, kVmax);
  CHECK(f.layer(0)[g.nearest_node(vec1(0.25))] == 1.25);
}

TEST_CASE("backward_action: stay-put symmetry") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  ActionField f = backward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, 200, kVmax);
  CHECK(std::abs(f.value_at(f.n_steps(), vec1(0.5))) < 5e-2);
}

TEST_CASE("reversibility round trip, calibrated across resolutions") {
  HamiltonianModel m = quadratic();
  double errs[2];
  int idx = 0;
  for (auto [n, dt] : {std::pair{64, 5e-3}, std::pair{128, 2.5e-3}}) {
    TorusGrid g(1, n);
    double t = 0.5;
    int steps = static_cast<int>(std::llround(t / dt));
    ActionField fwd = forward_action(m, g, vec1(0.5), 0.3, 0.0, dt, steps, kVmax);
    int ynode = g.nearest_node(vec1(0.25));
    double u = fwd.layer(steps)[ynode];
    ActionField bwd = backward_action(m, g, g.node(ynode), u, 0.0, dt, steps, kVmax);
    errs[idx++] = std::abs(bwd.layer(steps)[g.nearest_node(vec1(0.5))] - 0.3);
  }
  // first-order decay, or both at the float floor (the quadratic round trip
  // cancels exactly)
  bool at_floor = errs[0] < 1e-10 && errs[1] < 1e-10;
  CHECK((at_floor || errs[1] <= errs[0] / 1.3 + 1e-12));
  double c_fit = std::max(errs[0] / (1.0 / 64.0 + 5e-3), errs[1] / (1.0 / 128.0 + 2.5e-3));
  CHECK(errs[0] <= std::max(c_fit, 1e-9) * (1.0 / 64.0 + 5e-3) + 1e-12);
}

TEST_CASE("reversibility round trip for a u-coupled model") {
  HamiltonianModel m = quadratic_tanh();
  TorusGrid g(1, 64);
  double t = 0.5;
  int steps = static_cast<int>(std::llround(t / kDt));
  ActionField fwd = forward_action(m, g, vec1(0.5), 0.3, 0.2, kDt, steps, kVmax);
  int ynode = g.nearest_node(vec1(0.25));
  double u = fwd.layer(steps)[ynode];
  ActionField bwd = backward_action(m, g, g.node(ynode), u, 0.2, kDt, steps, kVmax);
  double err = std::abs(bwd.layer(steps)[g.nearest_node(vec1(0.5))] - 0.3);
  CHECK(err < 40.0 * (g.h + kDt));
}

TEST_CASE("monotone in u0, strictly") {
  TorusGrid g(1, 64);
  int steps = 100;
  for (HamiltonianModel m : {quadratic(), quadratic_tanh()}) {
    ActionField f3 = forward_action(m, g, vec1(0.5), 3.0, 0.0, kDt, steps, kVmax);
    ActionField f5 = forward_action(m, g, vec1(0.5), 5.0, 0.0, kDt, steps, kVmax);
    for (int i = 0; i < g.node_count(); i += 5)
      CHECK(f5.layer(steps)[i] > f3.layer(steps)[i]);
  }
}

TEST_CASE("monotone in L: adding a constant raises the layers") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  int steps = 60;
  ActionField f0 = forward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, steps, kVmax);
  ActionField f1 = forward_action(m, g, vec1(0.5), 0.0, 0.2, kDt, steps, kVmax);
  for (int i = 0; i < g.node_count(); i += 5)
    CHECK(f1.layer(steps)[i] > f0.layer(steps)[i]);
}

TEST_CASE("Markov property is exact in the discrete scheme") {
  TorusGrid g(1, 64);
  for (HamiltonianModel m : {quadratic(), mechanical_cos(0.3)}) {
    double t = 0.5, s = 0.25;
    int kt = static_cast<int>(std::llround(t / kDt));
    int ks = static_cast<int>(std::llround(s / kDt));
    ActionField full = forward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, kt + ks, kVmax);
    ActionField base = forward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, kt, kVmax);
    ActionBuildOptions no_wash;
    no_wash.check_wash = false;
    for (int target : {0, 11, 32, 53}) {
      double direct = full.layer(kt + ks)[target];
      double via = std::numeric_limits<double>::infinity();
      for (int y = 0; y < g.node_count(); ++y) {
        ActionField reseed =
            forward_action(m, g, g.node(y), base.layer(kt)[y], 0.0, kDt, ks, kVmax, no_wash);
        via = std::min(via, reseed.layer(ks)[target]);
      }
      CHECK(std::abs(direct - via) < 1e-9);
    }
  }
}

TEST_CASE("backtrack: constant curve at the seed") {
  TorusGrid g(1, 64);
  ActionField f = quad_field(g, 0.5, 0.0, 0.0, 1.0);
  std::vector<CurvePoint> curve = backtrack_minimizer(f, vec1(0.5));
  REQUIRE(curve.size() == static_cast<size_t>(f.n_steps()) + 1);
  for (const CurvePoint& p : curve) CHECK(torus_dist(p.x, vec1(0.5), 1) <= 2.0 * g.h);
  CHECK(curve.front().u == doctest::Approx(0.0));  // seed value recovered
  CHECK(curve.front().t == 0.0);
  CHECK(curve.back().t == doctest::Approx(1.0));
}

TEST_CASE("backtrack: equilibrium of the potential stays put") {
  TorusGrid g(1, 64);
  HamiltonianModel m = mechanical_cos(0.5);
  int steps = 120;  // t = 0.6
  ActionField f = forward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, steps, 12.0);
  std::vector<CurvePoint> curve = backtrack_minimizer(f, vec1(0.5));
  for (const CurvePoint& p : curve) CHECK(torus_dist(p.x, vec1(0.5), 1) <= 3.0 * g.h);
}

TEST_CASE("penalty guards") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  // two steps at dt=5e-3 cover far less than the wash-out time 0.5/16
  CHECK_THROWS_WITH_AS(forward_action(m, g, vec1(0.5), 0.0, 0.0, kDt, 2, kVmax),
                       doctest::Contains("PenaltyDominates"), Error);
  // insufficient stencil reach
  CHECK_THROWS_WITH_AS(forward_action(m, g, vec1(0.5), 0.0, 0.0, 1e-4, 10, 16.0),
                       doctest::Contains("CFLViolated"), Error);
}

TEST_CASE("2-D stay-put value") {
  TorusGrid g(2, 16);
  HamiltonianModel m = quadratic(2);
  double dt = 0.02;
  int steps = 50;
  ActionField f = forward_action(m, g, vec2(0.5, 0.5), 0.0, 0.0, dt, steps, 8.0);
  CHECK(std::abs(f.value_at(steps, vec2(0.5, 0.5))) < 8e-2);
}

TEST_SUITE_END();
