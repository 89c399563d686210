#pragma once

// Exact sandpile-group algebra on sinked multigraphs: reduced Laplacians,
// Smith normal form over arbitrary-precision integers, burning and
// critical-vertex recurrence tests, identity elements, the rotor-router
// group action, and the closed-form decompositions for regular trees.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace chipfire {

/// Undirected multigraph with a distinguished sink; no self-loops.
/// adj[u][v] is the number of parallel edges between u and v.
struct SinkedGraph {
    int n = 0;     // vertex count including the sink
    int sink = 0;  // sink vertex id
    int root = -1; // distinguished root for tree graphs, -1 otherwise
    std::vector<std::vector<int>> adj;

    explicit SinkedGraph(int vertices = 1, int sink_id = 0)
        : n(vertices), sink(sink_id),
          adj(vertices, std::vector<int>(vertices, 0)) {}

    void add_edge(int u, int v, int multiplicity = 1);
    int degree(int v) const;
    /// Checks symmetry, absence of self-loops, and connectivity.
    void validate() const;
};

/// T_n: regular tree of degree d and height n (root at level 1, leaves at
/// level n collapsed to the sink, one extra edge from root to sink).  The
/// root and every internal vertex have d-1 children.  Vertex 0 is the root,
/// the sink is the last vertex.
SinkedGraph make_regular_tree(int d, int n);

/// B_n: ball of radius n in the d-regular tree (root with d children, then
/// d-1 children per vertex down to depth n); each depth-n vertex carries
/// d-1 parallel edges to the sink and there is no root-sink edge.
SinkedGraph make_tree_ball(int d, int n);

/// General sinked tree: parent[v] for each non-sink vertex (parent of the
/// root is -1), plus the number of parallel sink edges per vertex.  The
/// sink is appended as the last vertex.
SinkedGraph sinked_tree(const std::vector<int>& parent,
                        const std::vector<int>& sink_edges);

using IMat = std::vector<std::vector<mpz_class>>;

/// Reduced Laplacian: rows and columns over non-sink vertices in id order,
/// degree on the diagonal, minus the adjacency count off the diagonal.
IMat reduced_laplacian(const SinkedGraph& g);

mpz_class determinant(const IMat& m);

struct GroupDecomposition {
    std::vector<mpz_class> invariant_factors;  // nontrivial, d1 | d2 | ...
    mpz_class order = 1;

    /// Prime-power view (sorted); requires factoring the invariant factors.
    std::vector<mpz_class> elementary_divisors() const;
    /// Rank of the Sylow p-subgroup: invariant factors divisible by p.
    int p_rank(const mpz_class& p) const;

    bool operator==(const GroupDecomposition& o) const {
        return invariant_factors == o.invariant_factors;
    }
};

/// Smith normal form of a nonsingular square integer matrix; throws on a
/// singular input.
GroupDecomposition smith_normal_form(IMat m);

/// Decomposition of the direct sum of cyclic groups Z_q with the given
/// multiplicities, converted to invariant factors.
GroupDecomposition from_cyclic_orders(
    const std::vector<std::pair<mpz_class, std::int64_t>>& orders);

/// Number of oriented spanning trees of T_n rooted at the sink:
/// t_1 = 1, t_2 = d, t_n = t_{n-1}^{d-2} (d t_{n-1} - (d-1) t_{n-2}^{d-1}).
mpz_class tree_count(int n, int d);

/// q_k = 1 + a + ... + a^{k-1} with a = d-1.
mpz_class tree_q(int k, int d);

/// Closed-form decomposition of SP(T_n): Z_{q_n} plus Z_{q_k} with
/// multiplicity a^{n-1-k} (a-1) for 2 <= k <= n-1.
GroupDecomposition tree_group_decomposition(int n, int d);

/// Chips per vertex; the sink entry is ignored and kept at zero.
using ChipConfig = std::vector<std::int64_t>;

struct GraphStabilization {
    ChipConfig config;
    std::vector<std::int64_t> firings;
};

GraphStabilization stabilize_graph(const SinkedGraph& g, ChipConfig c);

bool is_stable(const SinkedGraph& g, const ChipConfig& c);

/// Burning test: add beta(x) = #edges(x, sink) chips and stabilize; c is
/// recurrent iff every non-sink vertex topples exactly once (returning c).
bool is_recurrent_burning(const SinkedGraph& g, const ChipConfig& c);

/// Critical-vertex test on sinked trees: x is critical iff
/// c(x) <= #critical children; c is recurrent iff equality holds at every
/// critical vertex.  Throws on non-tree input.
bool is_recurrent_critical(const SinkedGraph& g, const ChipConfig& c);

/// Group operation on recurrent representatives: stabilize(u + v).
ChipConfig add_configs(const SinkedGraph& g, const ChipConfig& u,
                       const ChipConfig& v);

/// The recurrent representative of 0: stabilize(m - stabilize(m)) with
/// m(x) = 2 (deg(x) - 1).
ChipConfig identity_element(const SinkedGraph& g);

/// Order of r_hat = e + delta_root in the sandpile group; for T_n this is
/// q_n = ((d-1)^n - 1) / (d-2).
std::int64_t group_order_of_root(const SinkedGraph& g);

/// Rotor state: for each non-sink vertex, an index into its out-edge list
/// (parallel edges listed separately, targets in vertex-id order).
using RotorTreeState = std::vector<int>;

/// Out-edge targets of v with multiplicity, in id order.
std::vector<int> out_edges(const SinkedGraph& g, int v);

/// True iff the rotors, viewed as out-pointers, contain no oriented cycle
/// (equivalently they form a spanning tree oriented toward the sink).
bool rotor_state_acyclic(const SinkedGraph& g, const RotorTreeState& state);

/// e_x: add a chip at x and route it to the sink by rotor-router walk.
/// Throws if the input state has an oriented cycle.
RotorTreeState rotor_group_action(const SinkedGraph& g,
                                  const RotorTreeState& state, int x);

/// All acyclic rotor states (use only when the spanning-tree count is
/// small; throws past `limit`).
std::vector<RotorTreeState> enumerate_recurrent_states(const SinkedGraph& g,
                                                       std::int64_t limit);

/// Order of e_root acting on rotor states of g (chips to the sink until the
/// start state recurs).
std::int64_t rotor_root_order(const SinkedGraph& g);

struct SylowCheck {
    int computed = 0;  // rank of the p-part of SP(B_n) from the SNF
    int formula = 0;   // closed-form rank
    std::int64_t t_p = 0;
    bool residual_branch = false;  // n == -1 (mod t_p)
};

/// Throws if p divides d(d-1).
SylowCheck sylow_rank_check(int n, int d, std::int64_t p);

}  // namespace chipfire
