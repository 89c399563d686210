#pragma once

// Rotor-router walks and aggregation on Z^d, rotor smash sums, and the
// harnessed-walk bound check against an exact harmonic solve.

#include "chipfire/grid.hpp"

namespace chipfire {

enum class DirOrder {
    Canonical,         // +e1, -e1, +e2, -e2, ...
    PaperClockwise2D,  // N, E, S, W (d = 2 only)
};

/// Unit vector for direction index in [0, 2d).
Point dir_vector(int index, int dim, DirOrder order);

struct RotorConfig {
    Field<std::uint8_t> direction;  // background = direction of untouched sites
    DirOrder order = DirOrder::Canonical;

    int dim() const { return direction.dim(); }
};

/// All rotors at `start`, over a minimal growable field.
RotorConfig default_rotors(int dim, DirOrder order = DirOrder::Canonical,
                           int start = 0);

/// Rotate the rotor at p (increment before step), then return p + rotor.
Point rotor_step(RotorConfig& rotors, const Point& p);

struct RotorAggregate {
    DomainSet occupied;
    RotorConfig rotors;
    IntField exits;  // particle emissions per site
};

struct RotorRunOptions {
    // Batched routing fires all chips at a site at once; the abelian property
    // makes it exact.  Sequential walks one particle at a time (test oracle).
    bool sequential = false;
    // Point sources of at least this many particles (d = 2, batched only) are
    // prefired along an under-approximation of the odometer built from the
    // lattice potential kernel; the queue then finishes the run and the result
    // is verified, falling back to the plain queue on failure.  Exactness is
    // unaffected: emission directions depend only on the initial rotor and the
    // total emission count.
    std::int64_t accel_threshold = 65536;
};

/// n particles released at the origin, each settling at the first unoccupied
/// site of its rotor walk.
RotorAggregate aggregate(std::int64_t n, const RotorConfig& initial,
                         const RotorRunOptions& opts = {});

/// Aggregation from arbitrary sources into an initially occupied set.
RotorAggregate aggregate_sources(const IntField& sources,
                                 const DomainSet& occupied0,
                                 const RotorConfig& initial,
                                 const RotorRunOptions& opts = {});

/// Diaconis-Fulton smash sum driven by rotor walks: one particle per site of
/// A and of B (two on the overlap), empty initial cluster.
DomainSet rotor_smash(const DomainSet& A, const DomainSet& B,
                      const RotorConfig& initial);

/// Finite undirected multigraph for the harnessed-walk check.
struct SmallGraph {
    // adj[v] lists neighbors (repeats allowed = multi-edges)
    std::vector<std::vector<int>> adj;

    int size() const { return static_cast<int>(adj.size()); }
};

struct HarnessReport {
    double rotor_hits = 0.0;     // particles absorbed in Y
    double expected_hits = 0.0;  // n * P(walk from s absorbed in Y)
    double bound = 0.0;          // sum over free u, v~u of |H(u) - H(v)|
    bool holds = false;
};

/// Runs n rotor particles from `source` until absorbed in Z (absorbing set),
/// counts stops in Y (subset of Z), and checks the discrepancy bound using an
/// exact linear solve for the harmonic function H.
HarnessReport harnessed_walk_bound_check(const SmallGraph& g, int source,
                                         std::int64_t n,
                                         const std::vector<int>& absorbing,
                                         const std::vector<int>& targets,
                                         const std::vector<int>& initial_rotors);

}  // namespace chipfire
