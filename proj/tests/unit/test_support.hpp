#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "chj/grid.hpp"
#include "chj/hamiltonian.hpp"

namespace chj::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline HamiltonianModel quadratic(int dim = 1) { return build_model({"quadratic", {}, dim}); }

inline HamiltonianModel quadratic_tanh(int dim = 1) {
  return build_model({"quadratic_plus_f", {{"f", std::string("tanh")}}, dim});
}

inline HamiltonianModel quadratic_sin(int dim = 1) {
  return build_model({"quadratic_plus_f", {{"f", std::string("sin")}}, dim});
}

inline HamiltonianModel mechanical_cos(double amp = 0.5, int dim = 1) {
  return build_model({"mechanical", {{"V_cos", std::vector<double>{amp}}}, dim});
}

// H = p^2/2 + u: spatially constant data obeys w' = c - w exactly.
inline HamiltonianModel mechanical_linear_u(int dim = 1) {
  return build_model({"mechanical", {{"f", std::string("identity")}}, dim});
}

inline HamiltonianModel linear_in_u(int dim = 1) {
  return build_model(
      {"linear_in_u", {{"f_const", 1.5}, {"f_sin", std::vector<double>{0.5}}}, dim});
}

// Smooth periodic profile with seeded random low-mode coefficients.
inline GridFunction random_profile(const TorusGrid& grid, std::mt19937_64& rng,
                                   double amplitude = 1.0) {
  std::uniform_real_distribution<double> coef(-amplitude, amplitude);
  double a0 = coef(rng), a1 = coef(rng), b1 = coef(rng), a2 = coef(rng);
  return GridFunction::sample(grid, [=](const Vec& x) {
    double s = a0 + a1 * std::cos(kTwoPi * x[0]) + b1 * std::sin(kTwoPi * x[0]) +
               a2 * std::cos(2.0 * kTwoPi * x[0]);
    return s;
  });
}

}  // namespace chj::test
