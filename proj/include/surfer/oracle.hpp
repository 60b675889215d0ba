#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "surfer/graph.hpp"

namespace surfer {

// Dense intermediates (flow exponentials) refuse instances above this size.
inline constexpr std::size_t kDenseGuard = 2000;

struct FixedPoint {
    std::vector<double> z_star;  // unique solution of z = 1 + c P^T z
    double residual = 0.0;       // L1 residual of the equation at the solution
};

// Fixed-point sweeps z <- 1 + c P^T z. The map contracts in L1 at rate c, so
// convergence is certified; iteration-cap overrun signals a broken model.
FixedPoint solve_fixed_point(const TransitionModel& model, double c,
                             double tol = 1e-12);

// Stationary row vector of the damped surfer matrix by repeated implicit
// left-multiplication; the dense rank-one part is never materialized.
// Returns a probability vector (renormalized at the end). Proportional to
// the fixed point: pi = (1-c)/N * z_star.
std::vector<double> stationary_power_method(const GoogleMatrix& gm, double tol = 1e-12);

// Mean dynamics field 1 + c P^T z - z.
std::vector<double> ode_field(std::span<const double> z, const TransitionModel& model,
                              double c);

// Large-scale limit of the field: c P^T z - z (the affine term scales away).
std::vector<double> ode_field_scaled(std::span<const double> z,
                                     const TransitionModel& model, double c);

// Row-major dense exp(((c P^T - I)/N) * t) by scaling-and-squaring with a
// truncated series. Throws when n_nodes exceeds the dense guard.
std::vector<double> flow_exponential(const TransitionModel& model, double c, double t);

// Induced 1-norm (max absolute column sum) of the flow exponential. Strictly
// below 1 for every t > 0: the generator is a killed chain losing mass at
// rate (1-c)/N.
double matrix_exponential_1norm(const TransitionModel& model, double c, double t);

// Time-t solution of z' = (1 + c P^T z - z)/N started at z, via the closed
// form E (z - z_star) + z_star with E the flow exponential.
std::vector<double> flow_map(std::span<const double> z, const TransitionModel& model,
                             double c, double t);

}  // namespace surfer
