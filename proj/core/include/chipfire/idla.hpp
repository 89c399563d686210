#pragma once

// Internal DLA: particles perform simple random walks and settle at the
// first unoccupied site.  Randomness is counter-based, keyed by
// (seed, particle index, step index), so trajectories never depend on
// execution interleaving.

#include "chipfire/grid.hpp"

namespace chipfire {

/// Uniform direction index in [0, 2d) for the given key.
int walk_direction(std::uint64_t seed, std::int64_t particle,
                   std::int64_t step, int dim);

struct IdlaResult {
    DomainSet occupied;
    std::vector<std::pair<std::int64_t, Point>> settle_order;
};

struct IdlaOptions {
    std::int64_t max_steps = 100'000'000;  // per particle, hard error beyond
    bool record_order = true;
};

/// Particles released in lexicographic site order, multiplicity per site
/// given by `sources`; initially occupied sites in `occupied0`.
IdlaResult idla_aggregate(const IntField& sources, const DomainSet& occupied0,
                          std::uint64_t seed, const IdlaOptions& opts = {});

/// Point source convenience wrapper.
IdlaResult idla_aggregate(std::int64_t n, int dim, std::uint64_t seed,
                          const IdlaOptions& opts = {});

/// Diaconis-Fulton smash sum by random walks: one particle per site of A
/// then of B (two on the overlap), starting from an empty cluster.
DomainSet df_smash(const DomainSet& A, const DomainSet& B, std::uint64_t seed,
                   const IdlaOptions& opts = {});

}  // namespace chipfire
