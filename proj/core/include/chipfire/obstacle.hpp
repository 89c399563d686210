#pragma once

// Discrete obstacle problem / linear complementarity solver.  The solution u
// is the divisible-sandpile odometer; the solver never forms the lattice
// Green's function.  Also hosts the exact harmonic solver used as an oracle.

#include "chipfire/grid.hpp"

namespace chipfire {

struct ObstacleSolution {
    ScalarField odometer;
    DomainSet domain;  // {odometer > tol}
    double residual = 0.0;
    std::int64_t sweeps = 0;
};

struct ObstacleOptions {
    double tol = 1e-12;
    // SOR factor; <= 0 picks 2/(1+sin(pi/L)) from the box extent L.
    double omega = -1.0;
    std::int64_t max_sweeps = 5'000'000;
};

/// Projected SOR on u(x) <- max(0, (1-w) u(x) + w (nbrAvg(u) + sigma(x) - 1)),
/// red-black ordering, u = 0 on the box boundary.  The box must leave a
/// 2-cell zero collar around the noncoincidence set or the call fails.
ObstacleSolution solve_obstacle(const ScalarField& sigma, const Box& box,
                                const ObstacleOptions& opts = {});

/// As above, but the box is grown automatically until the collar is clean.
ObstacleSolution solve_obstacle(const ScalarField& sigma,
                                const ObstacleOptions& opts = {});

/// Exact discrete Dirichlet solve: harmonic on `interior`, matching
/// `boundary_values` on the lattice boundary (non-members adjacent to a
/// member).  Dense factorization; intended for small oracle domains.
ScalarField harmonic_solve(const DomainSet& interior,
                           const ScalarField& boundary_values);

/// Mass m_factor spread on ball(r): the relaxed domain should be the
/// concentric ball of radius m_factor^{1/d} * r up to a 2-cell shell.
bool relax_ball_check(double m_factor, double r, int dim);

}  // namespace chipfire
