#pragma once

// Rotor-router walks on regular trees: aggregation and the perfect-ball
// property, recurrence/transience on finite branches, escape sequences on
// the ternary tree, and the psi/phi calculus realizing them.
//
// Vertices are addressed by words over {1..d}: "" is the root (the origin
// for full-tree runs, the branch root otherwise); a non-root node's children
// are addressed by appending a digit in {1..d-1}.  Rotor letters run 1..d
// with letter d pointing to the parent; at the origin of a full tree all d
// letters point at the principal branches.

#include "chipfire/grid.hpp"

#include <map>
#include <string>

namespace chipfire {

/// Infinite descending path start, start+c, start+cc, ... all carrying
/// rotor letter c (the residue of a walk that escaped to infinity).
struct TreeRay {
    std::string start;
    int letter = 1;
};

struct TreeConfig {
    int d = 3;
    std::map<std::string, int> overrides;  // exact address -> letter
    std::vector<TreeRay> rays;
    // subtree default letters; the entry at "" is the global default and
    // must be present.  Deeper keys win by longest-prefix match.
    std::map<std::string, int> defaults{{"", 1}};

    int letter_at(const std::string& addr) const;
    /// Depth of the deepest explicitly configured address.
    int depth() const;
    void validate() const;
};

/// All rotors one letter (branch-style config).
TreeConfig uniform_config(int d, int letter);

/// The ternary configuration whose walks exactly alternate escaping and
/// returning: rotors on the repeated-child-2 path of branch 3 point in
/// direction 2, everything else direction 1, origin rotor at 1.
TreeConfig alternation_config();

/// True iff no two neighboring vertices point at each other, checked for
/// all vertices of depth <= depth (full-tree semantics at "").
bool is_acyclic(const TreeConfig& cfg, int depth);

/// Random rotor letters down to `depth`, constrained to be acyclic; deeper
/// nodes default to letter 1 (child), which preserves acyclicity.
TreeConfig random_acyclic_config(int d, int depth, std::uint64_t seed);

/// Rotor-router aggregation of n particles released at the origin of the
/// infinite d-regular tree; returns occupied addresses in settling order.
std::vector<std::string> tree_aggregate(std::int64_t n, const TreeConfig& cfg,
                                        int max_depth = 64);

/// b_r = 1 + d ((d-1)^r - 1) / (d-2), the number of vertices within
/// distance r of the origin.
std::int64_t tree_ball_size(int r, int d);

struct TreeBallReport {
    bool pass = true;
    int failed_r = 0;
    std::uint64_t failed_seed = 0;
    int configs_checked = 0;
};

/// For `configs` seeded random acyclic configurations, asserts that the
/// first b_r settled vertices are exactly the ball of radius r, for every
/// r <= r_max.
TreeBallReport tree_ball_theorem_suite(int d, int r_max, int configs,
                                       std::uint64_t seed);

struct BranchRun {
    std::string record;  // per chip: 'o' (returned) or 'b' (hit the leaves)
    std::map<std::string, std::int64_t> leaf_hits;  // leaf address -> count
    bool rotors_restored = false;
};

/// Finite branch Y_n of the d-regular tree of height n: internal nodes are
/// words of length <= n-2; stepping above the root absorbs at o, stepping
/// below height n-1 absorbs at b.  Runs `chips` chips from the root.
BranchRun finite_branch_run(int height, int d, const TreeConfig& cfg,
                            std::int64_t chips);

/// Escape sequence of `n` chips started at the root of an infinite ternary
/// branch: '0' = returned to the origin above the root, '1' = escaped.
/// cutoff < 0 means depth(cfg) + n + 2; exceeding it raises an error.
std::string escape_sequence_branch(const TreeConfig& cfg, int n,
                                   int cutoff = -1);

/// Same, for chips started at the origin of the full ternary tree.
std::string escape_sequence_tree(const TreeConfig& cfg, int n,
                                 int cutoff = -1);

/// (P_k): every subword of length 2^k - 1 has at most 2^{k-1} ones.
bool check_Pk(const std::string& word, int k);
/// P_k for every k with 2^k - 1 <= length.
bool check_all_Pk(const std::string& word);

/// Factor the word into blocks {0, 10, 110} (padding one trailing 0 if
/// needed) and split into the sub-branch pair; lone 10 blocks alternate
/// between (1,0) and (0,1).
std::pair<std::string, std::string> psi(const std::string& word);
/// Inverse direction: merge sub-branch words block by block.
std::string phi(const std::string& c, const std::string& d);

/// A finite-depth branch configuration whose escape sequence equals `word`;
/// throws if the word violates some P_k.
TreeConfig realize_escape_word(const std::string& word);

}  // namespace chipfire
