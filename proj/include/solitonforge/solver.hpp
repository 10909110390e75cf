#pragma once

#include "solitonforge/profile.hpp"

namespace solitonforge {

struct SolverConfig {
    double seed_radius = 1e-3;      // where the origin series hands over
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double stop_curvature = 1e-3;   // integrate until R drops below this
    double max_radius = 1e4;
    long max_steps = 500000;

    void validate() const; // throws ConfigError
};

// State produced by the origin series at r = seed_radius, together with an
// estimate of the series truncation error (obtained by integrating the ODE
// from the half-radius seed up to seed_radius and comparing).
struct SeedState {
    double r, phi, dphi, df;
    double remainder_estimate;
};

// Evaluates the origin series at config.seed_radius. Throws ConfigError if
// the estimated series remainder exceeds config.abs_tol.
SeedState series_seed(const SolverConfig& config);

// Integrates the rotationally symmetric steady soliton system
//   phi'' = (1 - phi'^2)/phi - f' phi',   f'' = -2 phi''/phi
// from the series seed until R < stop_curvature or r > max_radius, with an
// adaptive embedded Runge-Kutta pair. The returned profile stores every
// accepted step with the right-hand-side derivatives and satisfies
// |R + f'^2 - 1| <= 10 * rel_tol at every node (else AccuracyError).
SolitonProfile solve_bryant(const SolverConfig& config = {});

// Per-node conservation defect |R + f'^2 - 1| summarized against the
// profile's stored bound.
ResidualStats first_integral_defect(const SolitonProfile& p);

} // namespace solitonforge
