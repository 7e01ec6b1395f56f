#include <doctest.h>

#include <cmath>

#include "chj/characteristics.hpp"
#include "test_support.hpp"

using namespace chj;
using namespace chj::test;

TEST_SUITE_BEGIN("characteristics");

TEST_CASE("stationary orbit of the quadratic model") {
  HamiltonianModel m = quadratic();
  CharacteristicState s0{0.0, vec1(0.3), 1.0, vec1(0.0)};
  FlowResult r = flow(m, s0, 2.0, 1e-3, 0.0);
  CHECK_FALSE(r.blow_up);
  for (const CharacteristicState& s : r.states) {
    CHECK(s.x[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.u == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.p[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("closed-form linear orbit on the level set") {
  HamiltonianModel m = quadratic();
  CharacteristicState s0{0.0, vec1(0.1), 0.0, vec1(0.5)};
  // c-shifted system on H = c: du/dt = p H_p = 2 p^2, dx/dt = 2p
  FlowResult r = flow(m, s0, 1.0, 1e-3, 0.25);
  const CharacteristicState& end = r.states.back();
  CHECK(end.t == doctest::Approx(1.0));
  CHECK(end.p[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(end.u == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(torus_dist(end.x, vec1(0.1 + 1.0), 1) < 1e-10);

  // the unshifted flow (c = 0) reproduces du/dt = p H_p - H = p^2
  FlowResult r0 = flow(m, s0, 1.0, 1e-3, 0.0);
  CHECK(r0.states.back().u == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("mechanical energy conservation over t = 10") {
  HamiltonianModel m = mechanical_cos(0.5);
  CharacteristicState s0{0.0, vec1(0.2), 0.0, vec1(0.7)};
  double h0 = m.eval_H(s0.x, s0.u, s0.p);
  FlowResult r = flow(m, s0, 10.0, 1e-3, 0.0);
  REQUIRE_FALSE(r.blow_up);
  double worst = 0.0;
  for (const CharacteristicState& s : r.states)
    worst = std::max(worst, std::abs(m.eval_H(s.x, s.u, s.p) - h0));
  CHECK(worst < 1e-8);
}

TEST_CASE("level-set invariance and decay diagnostic") {
  // seed exactly on H = c: deviation stays at the integrator floor
  HamiltonianModel mt = quadratic_tanh();
  double u0 = 0.4;
  double c = 1.0 + std::tanh(0.4);  // H(x, 0.4, p=1) = 1 + tanh(0.4)
  CharacteristicState on_level{0.0, vec1(0.0), u0, vec1(1.0)};
  CHECK(h_decay_check(mt, on_level, 10.0, 1e-3, c) < 1e-8);

  // off the level set: the deviation from the exponential identity stays small
  CharacteristicState off{0.0, vec1(0.0), u0, vec1(1.0)};
  double c_off = c - 0.1;  // H - c = 0.1
  CHECK(h_decay_check(mt, off, 2.0, 1e-3, c_off) < 1e-6);

  // lambda = 0: H - c does not decay at all
  HamiltonianModel mq = quadratic();
  CharacteristicState s{0.0, vec1(0.0), 0.0, vec1(0.5)};
  double dev = h_decay_check(mq, s, 2.0, 1e-3, 0.15);  // H - c = 0.1
  CHECK(dev < 1e-8);
  FlowResult r = flow(mq, s, 2.0, 1e-3, 0.15);
  CHECK(mq.eval_H(r.states.back().x, r.states.back().u, r.states.back().p) - 0.15 ==
        doctest::Approx(0.1).epsilon(1e-8));
}

TEST_CASE("fourth-order self-convergence") {
  HamiltonianModel m = quadratic_tanh();
  CharacteristicState s0{0.0, vec1(0.15), 0.3, vec1(0.8)};
  auto terminal = [&](double dt) {
    FlowResult r = flow(m, s0, 1.0, dt, 0.2);
    const CharacteristicState& e = r.states.back();
    return std::array<double, 3>{e.x[0], e.u, e.p[0]};
  };
  auto a = terminal(4e-3), b = terminal(2e-3), c = terminal(1e-3);
  double e1 = 0.0, e2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    e1 = std::max(e1, std::abs(a[k] - b[k]));
    e2 = std::max(e2, std::abs(b[k] - c[k]));
  }
  double factor = e1 / e2;
  CHECK(factor >= 10.0);
  CHECK(factor <= 24.0);
}

TEST_CASE("time reversal returns to the start") {
  HamiltonianModel m = mechanical_cos(0.5);
  CharacteristicState s0{0.0, vec1(0.2), 0.1, vec1(0.6)};
  FlowResult fwd = flow(m, s0, 2.0, 1e-3, 0.1);
  CharacteristicState mid = fwd.states.back();
  FlowResult bwd = flow(m, mid, -2.0, 1e-3, 0.1);
  const CharacteristicState& back = bwd.states.back();
  CHECK(torus_dist(back.x, s0.x, 1) < 1e-8);
  CHECK(std::abs(back.u - s0.u) < 1e-8);
  CHECK(std::abs(back.p[0] - s0.p[0]) < 1e-8);
}

TEST_CASE("blow-up reporting on runaway growth") {
  // H = f(x) u + p^2 with f > 0: u contracts forward in time at rate f, so
  // the backward orbit from a large u0 grows like e^{f t} past the cap
  HamiltonianModel m = linear_in_u();
  CharacteristicState s0{0.0, vec1(0.1), 2000.0, vec1(0.5)};
  FlowResult r = flow(m, s0, -12.0, 1e-3, 0.0);
  CHECK(r.blow_up);
  CHECK(r.states.size() >= 2);  // partial orbit is returned
}

TEST_CASE("cross-check: constant curves at the seed") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  ActionField f = forward_action(m, g, vec1(0.5), 0.0, 0.0, 5e-3, 200, 16.0);
  double dist = calibrated_cross_check(m, f, vec1(0.5));
  CHECK(dist < 3.0 * g.h);
}

TEST_CASE("cross-check: first-order decay on quadratic and mechanical models") {
  // refinement shrinks both the spatial step and the velocity quantum h/dt
  const std::pair<int, double> ladder[2] = {{64, 1.0 / 16}, {1024, 1.0 / 64}};
  struct Case {
    HamiltonianModel m;
    double xq;
    double vmax;
  };
  for (Case tc : {Case{quadratic(), 0.25, 16.0}, Case{mechanical_cos(0.3), 0.3, 12.0}}) {
    double dist[2];
    double scale[2];
    for (int lv = 0; lv < 2; ++lv) {
      TorusGrid g(1, ladder[lv].first);
      double dt = ladder[lv].second;
      int steps = static_cast<int>(std::llround(0.625 / dt));
      ActionField f = forward_action(tc.m, g, vec1(0.5), 0.0, 0.0, dt, steps, tc.vmax);
      dist[lv] = calibrated_cross_check(tc.m, f, vec1(tc.xq));
      scale[lv] = g.h + dt;
    }
    double c_fit = dist[0] / scale[0];
    CHECK(dist[0] <= c_fit * scale[0] * (1.0 + 1e-12));
    CHECK(dist[1] <= 1.5 * c_fit * scale[1]);   // stays within the fitted first-order band
    CHECK(dist[1] <= dist[0] / 2.5);            // genuine decay across the 4.7x refinement
  }
}

TEST_CASE("cross-check refuses horizons below the wash-out time") {
  TorusGrid g(1, 64);
  HamiltonianModel m = quadratic();
  ActionBuildOptions no_wash;
  no_wash.check_wash = false;
  ActionField f = forward_action(m, g, vec1(0.5), 0.0, 0.0, 5e-3, 40, 16.0, no_wash);
  CHECK_THROWS_WITH_AS(calibrated_cross_check(m, f, vec1(0.5)),
                       doctest::Contains("PenaltyDominates"), Error);
}

TEST_SUITE_END();
