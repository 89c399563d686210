#pragma once

// Classical abelian sandpile on Z^d with hole depth H.  Holes are stored as
// initial chip value -H and every site fires at threshold 2d; a site fires by
// sending one grain to each lattice neighbor.

#include "chipfire/grid.hpp"

namespace chipfire {

struct ChipState {
    IntField chips;     // final values (offset by -H where untouched)
    IntField firings;   // topple counts
    DomainSet visited;  // sites occupied at any time during the evolution
};

enum class FireStrategy {
    Batched,       // FIFO queue, all pending topplings of a site at once
    RandomSingle,  // seeded random unstable site, one topple at a time
};

struct SandpileOptions {
    FireStrategy strategy = FireStrategy::Batched;
    std::uint64_t seed = 0;  // RandomSingle only
};

/// Stabilize an absolute chip field.  The field background must be stable
/// (< 2d); sites listed in `sources` are always counted as visited.
ChipState stabilize_field(const IntField& initial,
                          const std::vector<Point>& sources = {},
                          const SandpileOptions& opts = {});

/// n grains at the origin over holes of depth H (background chip value -H).
/// Requires H >= 2 - 2d, else the aggregation is not well defined.
ChipState stabilize_chips(std::int64_t n, int H, int dim,
                          const SandpileOptions& opts = {});

/// Max violation of final = initial + received - 2d * firings over all sites;
/// zero for any correctly stabilized state.
std::int64_t fire_count_identity_check(const ChipState& state,
                                       const IntField& initial);

/// Fully-toppled axis-aligned box Q: remaining chips in Q must be at least
/// the number of lattice edges internal to Q.  Returns true when either the
/// premise fails (some site of Q did not fire) or the inequality holds.
bool internal_edges_check(const ChipState& state, const Box& Q);

/// d=2, H=-2: the toppled set (plus the origin) should be an exact cube
/// {max |x_i| <= k}.
bool cube_check(std::int64_t n);

}  // namespace chipfire
