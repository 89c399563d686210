#pragma once

// Divisible sandpile: continuous mass toppling.  A full site keeps mass 1
// and splits its excess equally among its 2d neighbors; iteration stops when
// the largest excess falls below the tolerance.

#include "chipfire/grid.hpp"

namespace chipfire {

struct DivisibleState {
    ScalarField mass;
    ScalarField odometer;  // total mass emitted per site
};

struct StabilizationReport {
    std::int64_t sweeps = 0;
    double max_excess_at_exit = 0.0;
    // {odometer > 0} union {sigma >= 1} union {final mass >= 1 - tol}
    DomainSet domain;
    std::int64_t full_sites_strict = 0;  // final mass >= 1
    std::int64_t full_sites_tolerant = 0;  // final mass >= 1 - tol
};

enum class ToppleStrategy {
    SweepOrder,   // full-lattice sweeps, in index order
    ActiveQueue,  // FIFO queue of full sites
};

/// Topple a single site: requires mass(x) >= 1; distributes the excess.
void topple(DivisibleState& state, const Point& x);

struct DivisibleOptions {
    double tol = -1.0;  // < 0 means 1e-10 * total mass
    ToppleStrategy strategy = ToppleStrategy::SweepOrder;
    std::int64_t max_sweeps = 1'000'000'000;
};

std::pair<DivisibleState, StabilizationReport> stabilize(
    const ScalarField& sigma, const DivisibleOptions& opts = {});

/// Point source of mass m at the origin.
std::pair<DivisibleState, StabilizationReport> point_source(
    double m, int dim, const DivisibleOptions& opts = {});

}  // namespace chipfire
