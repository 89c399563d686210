#include "chipfire/tree.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace chipfire {

namespace {

bool ray_contains(const TreeRay& ray, const std::string& addr) {
    if (addr.size() < ray.start.size()) return false;
    if (addr.compare(0, ray.start.size(), ray.start) != 0) return false;
    char c = static_cast<char>('0' + ray.letter);
    for (std::size_t i = ray.start.size(); i < addr.size(); ++i)
        if (addr[i] != c) return false;
    return true;
}

char digit(int letter) { return static_cast<char>('0' + letter); }

}  // namespace

int TreeConfig::letter_at(const std::string& addr) const {
    auto it = overrides.find(addr);
    if (it != overrides.end()) return it->second;
    for (const auto& ray : rays)
        if (ray_contains(ray, addr)) return ray.letter;
    std::string key = addr;
    while (true) {
        auto dit = defaults.find(key);
        if (dit != defaults.end()) return dit->second;
        if (key.empty())
            throw std::logic_error("TreeConfig: missing root default");
        key.pop_back();
    }
}

int TreeConfig::depth() const {
    std::size_t depth = 0;
    for (const auto& [k, v] : overrides) depth = std::max(depth, k.size());
    for (const auto& [k, v] : defaults) depth = std::max(depth, k.size());
    for (const auto& ray : rays) depth = std::max(depth, ray.start.size());
    return static_cast<int>(depth);
}

void TreeConfig::validate() const {
    if (d < 3) throw std::invalid_argument("TreeConfig: d must be >= 3");
    if (!defaults.count(""))
        throw std::invalid_argument("TreeConfig: missing root default");
    auto check = [&](int letter) {
        if (letter < 1 || letter > d)
            throw std::invalid_argument("TreeConfig: letter out of range");
    };
    for (const auto& [k, v] : overrides) check(v);
    for (const auto& [k, v] : defaults) check(v);
    for (const auto& ray : rays) check(ray.letter);
}

TreeConfig uniform_config(int d, int letter) {
    TreeConfig cfg;
    cfg.d = d;
    cfg.defaults = {{"", letter}};
    cfg.validate();
    return cfg;
}

TreeConfig alternation_config() {
    TreeConfig cfg;
    cfg.d = 3;
    cfg.overrides[""] = 1;  // first chip is routed to branch 2
    cfg.rays.push_back({"3", 2});
    cfg.defaults = {{"", 1}};
    return cfg;
}

bool is_acyclic(const TreeConfig& cfg, int depth) {
    cfg.validate();
    const int d = cfg.d;
    // origin: every letter points at a principal branch
    {
        int L = cfg.letter_at("");
        std::string child(1, digit(L));
        if (cfg.letter_at(child) == d) return false;
    }
    std::vector<std::string> frontier;
    for (int b = 1; b <= d; ++b) frontier.emplace_back(1, digit(b));
    while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const std::string& w : frontier) {
            int L = cfg.letter_at(w);
            if (L == d) {
                std::string parent = w.substr(0, w.size() - 1);
                int child_idx = w.back() - '0';
                if (cfg.letter_at(parent) == child_idx) return false;
            } else {
                std::string child = w + digit(L);
                if (cfg.letter_at(child) == d) return false;
            }
            if (static_cast<int>(w.size()) < depth)
                for (int c = 1; c <= d - 1; ++c) next.push_back(w + digit(c));
        }
        frontier = std::move(next);
    }
    return true;
}

TreeConfig random_acyclic_config(int d, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TreeConfig cfg;
    cfg.d = d;
    cfg.defaults = {{"", 1}};
    auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    cfg.overrides[""] = pick(1, d);
    std::vector<std::string> frontier;
    for (int b = 1; b <= d; ++b) frontier.emplace_back(1, digit(b));
    while (!frontier.empty() && static_cast<int>(frontier[0].size()) <= depth) {
        std::vector<std::string> next;
        for (const std::string& w : frontier) {
            std::string parent = w.substr(0, w.size() - 1);
            bool parent_points = cfg.overrides.at(parent) == w.back() - '0';
            // letter d (parent) is forbidden when the parent points here
            int letter = parent_points ? pick(1, d - 1) : pick(1, d);
            cfg.overrides[w] = letter;
            if (static_cast<int>(w.size()) < depth)
                for (int c = 1; c <= d - 1; ++c) next.push_back(w + digit(c));
        }
        frontier = std::move(next);
    }
    return cfg;
}

std::vector<std::string> tree_aggregate(std::int64_t n, const TreeConfig& cfg,
                                        int max_depth) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("tree_aggregate: n must be >= 1");
    const int d = cfg.d;
    std::unordered_map<std::string, int> rotor;
    std::unordered_set<std::string> occupied;
    std::vector<std::string> order;
    std::int64_t budget = 500'000'000;
    for (std::int64_t chip = 0; chip < n; ++chip) {
        std::string pos;
        while (occupied.count(pos)) {
            if (--budget < 0)
                throw std::runtime_error("tree_aggregate: step budget exhausted");
            auto it = rotor.find(pos);
            int L = it != rotor.end() ? it->second : cfg.letter_at(pos);
            int newL = L % d + 1;
            rotor[pos] = newL;
            if (pos.empty())
                pos.assign(1, digit(newL));  // origin: all letters are children
            else if (newL == d)
                pos.pop_back();
            else
                pos.push_back(digit(newL));
            if (static_cast<int>(pos.size()) > max_depth)
                throw std::runtime_error("tree_aggregate: depth overflow");
        }
        occupied.insert(pos);
        order.push_back(pos);
    }
    return order;
}

std::int64_t tree_ball_size(int r, int d) {
    std::int64_t pw = 1;
    for (int i = 0; i < r; ++i) pw *= d - 1;
    return 1 + static_cast<std::int64_t>(d) * (pw - 1) / (d - 2);
}

TreeBallReport tree_ball_theorem_suite(int d, int r_max, int configs,
                                       std::uint64_t seed) {
    TreeBallReport rep;
    for (int i = 0; i < configs; ++i) {
        std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        TreeConfig cfg = random_acyclic_config(d, r_max + 2, s);
        if (!is_acyclic(cfg, r_max + 3))
            throw std::logic_error("tree_ball_theorem_suite: config not acyclic");
        auto order = tree_aggregate(tree_ball_size(r_max, d), cfg, r_max + 4);
        std::size_t pos = 0;
        for (int r = 1; r <= r_max; ++r) {
            auto want = static_cast<std::size_t>(tree_ball_size(r, d));
            bool ok = true;
            for (; pos < want; ++pos)
                if (static_cast<int>(order[pos].size()) > r) ok = false;
            if (!ok) {
                rep.pass = false;
                rep.failed_r = r;
                rep.failed_seed = s;
                return rep;
            }
        }
        ++rep.configs_checked;
    }
    return rep;
}

BranchRun finite_branch_run(int height, int d, const TreeConfig& cfg,
                            std::int64_t chips) {
    cfg.validate();
    if (height < 2)
        throw std::invalid_argument("finite_branch_run: height must be >= 2");
    std::unordered_map<std::string, int> rotor;
    BranchRun run;
    std::int64_t budget = 500'000'000;
    for (std::int64_t chip = 0; chip < chips; ++chip) {
        std::string pos;
        while (true) {
            if (--budget < 0)
                throw std::runtime_error("finite_branch_run: budget exhausted");
            auto it = rotor.find(pos);
            int L = it != rotor.end() ? it->second : cfg.letter_at(pos);
            int newL = L % d + 1;
            rotor[pos] = newL;
            if (newL == d) {
                if (pos.empty()) {
                    run.record.push_back('o');
                    break;
                }
                pos.pop_back();
            } else {
                if (static_cast<int>(pos.size()) == height - 2) {
                    ++run.leaf_hits[pos + digit(newL)];
                    run.record.push_back('b');
                    break;
                }
                pos.push_back(digit(newL));
            }
        }
    }
    run.rotors_restored = true;
    for (const auto& [addr, letter] : rotor)
        if (letter != cfg.letter_at(addr)) run.rotors_restored = false;
    return run;
}

namespace {

// Shared walker for escape-sequence simulation on the infinite ternary tree
// (full tree or a single branch).  Nodes never touched by any chip fall into
// three states: on a ray (letter = ray letter), structured (some override,
// ray start, or region default lies strictly below), or homogeneous virgin.
// A chip arriving at a homogeneous virgin node whose default letter is not
// d-1 deterministically descends forever; the residue is a new ray.
struct EscapeWalker {
    const TreeConfig& cfg;
    bool full_tree;
    int cutoff;
    std::unordered_map<std::string, int> visited;
    std::vector<TreeRay> sim_rays;
    std::vector<std::string> structure;  // keys that break homogeneity
    std::int64_t budget = 200'000'000;

    EscapeWalker(const TreeConfig& c, bool full, int cut)
        : cfg(c), full_tree(full), cutoff(cut) {
        for (const auto& [k, v] : cfg.overrides) structure.push_back(k);
        for (const auto& [k, v] : cfg.defaults) structure.push_back(k);
        for (const auto& ray : cfg.rays) structure.push_back(ray.start);
    }

    bool structured_below(const std::string& pos) const {
        auto below = [&](const std::string& key) {
            return key.size() > pos.size() &&
                   key.compare(0, pos.size(), pos) == 0;
        };
        for (const auto& key : structure)
            if (below(key)) return true;
        for (const auto& ray : sim_rays)
            if (below(ray.start)) return true;
        return false;
    }

    char run_chip() {
        const int d = cfg.d;
        std::string pos;
        while (true) {
            if (--budget < 0)
                throw std::runtime_error("escape walk: step budget exhausted");
            int L;
            auto it = visited.find(pos);
            if (it != visited.end()) {
                L = it->second;
            } else {
                auto ov = cfg.overrides.find(pos);
                const TreeRay* ray = nullptr;
                for (const auto& r : sim_rays)
                    if (ray_contains(r, pos)) {
                        ray = &r;
                        break;
                    }
                if (!ray)
                    for (const auto& r : cfg.rays)
                        if (ray_contains(r, pos)) {
                            ray = &r;
                            break;
                        }
                if (ov != cfg.overrides.end()) {
                    L = ov->second;
                } else if (ray) {
                    L = ray->letter;
                } else {
                    L = cfg.letter_at(pos);
                    if (!structured_below(pos)) {
                        if (L != d - 1) {
                            // homogeneous virgin subtree: the chip descends
                            // the repeated child (L mod d) + 1 path forever
                            sim_rays.push_back({pos, L % d + 1});
                            return '1';
                        }
                        if (!full_tree || !pos.empty()) {
                            // all-(d-1) virgin subtree: every chip entering
                            // it returns to the parent; simulating the walk
                            // inside would take exponentially many steps and
                            // the internal state never becomes observable
                            if (pos.empty()) return '0';
                            pos.pop_back();
                            if (full_tree && pos.empty()) return '0';
                            continue;
                        }
                    }
                }
            }
            int newL = L % d + 1;
            visited[pos] = newL;
            if (full_tree && pos.empty()) {
                pos.assign(1, digit(newL));
            } else if (newL == d) {
                if (pos.empty()) return '0';
                pos.pop_back();
                if (full_tree && pos.empty()) return '0';
            } else {
                pos.push_back(digit(newL));
            }
            if (static_cast<int>(pos.size()) > cutoff)
                throw std::runtime_error(
                    "escape walk: cutoff depth exceeded (cutoff too small)");
        }
    }
};

std::string run_escape(const TreeConfig& cfg, int n, int cutoff, bool full) {
    cfg.validate();
    if (cfg.d != 3)
        throw std::invalid_argument("escape sequences require d = 3");
    if (cutoff < 0) cutoff = cfg.depth() + n + 2;
    EscapeWalker walker(cfg, full, cutoff);
    std::string word;
    for (int i = 0; i < n; ++i) word.push_back(walker.run_chip());
    return word;
}

}  // namespace

std::string escape_sequence_branch(const TreeConfig& cfg, int n, int cutoff) {
    return run_escape(cfg, n, cutoff, false);
}

std::string escape_sequence_tree(const TreeConfig& cfg, int n, int cutoff) {
    return run_escape(cfg, n, cutoff, true);
}

bool check_Pk(const std::string& word, int k) {
    if (k < 1) throw std::invalid_argument("check_Pk: k must be >= 1");
    for (char ch : word)
        if (ch != '0' && ch != '1')
            throw std::invalid_argument("check_Pk: word must be binary");
    const std::size_t window = (std::size_t{1} << k) - 1;
    const std::size_t cap = std::size_t{1} << (k - 1);
    if (word.size() < window) {
        std::size_t ones = std::count(word.begin(), word.end(), '1');
        return ones <= cap;
    }
    std::size_t ones = 0;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i] == '1') ++ones;
        if (i >= window && word[i - window] == '1') --ones;
        if (i + 1 >= window && ones > cap) return false;
    }
    return true;
}

bool check_all_Pk(const std::string& word) {
    for (int k = 1; (std::size_t{1} << k) - 1 <= word.size(); ++k)
        if (!check_Pk(word, k)) return false;
    return true;
}

std::pair<std::string, std::string> psi(const std::string& word) {
    for (char ch : word)
        if (ch != '0' && ch != '1')
            throw std::invalid_argument("psi: word must be binary");
    std::string a = word;
    std::string c, d;
    int lone = 0;  // count of earlier lone "10" blocks
    std::size_t i = 0;
    while (i < a.size()) {
        if (a[i] == '0') {
            c.push_back('0');
            d.push_back('0');
            i += 1;
        } else if (i + 1 < a.size() && a[i + 1] == '1') {
            if (i + 2 >= a.size()) a.push_back('0');
            if (a[i + 2] != '0')
                throw std::invalid_argument("psi: three consecutive ones");
            c.push_back('1');
            d.push_back('1');
            i += 3;
        } else {
            if (i + 1 >= a.size()) a.push_back('0');
            c.push_back(lone % 2 == 0 ? '1' : '0');
            d.push_back(lone % 2 == 0 ? '0' : '1');
            ++lone;
            i += 2;
        }
    }
    return {c, d};
}

std::string phi(const std::string& c, const std::string& d) {
    if (c.size() != d.size())
        throw std::invalid_argument("phi: words must have equal length");
    std::string a;
    for (std::size_t j = 0; j < c.size(); ++j) {
        bool cj = c[j] == '1', dj = d[j] == '1';
        if (c[j] != '0' && c[j] != '1')
            throw std::invalid_argument("phi: words must be binary");
        if (d[j] != '0' && d[j] != '1')
            throw std::invalid_argument("phi: words must be binary");
        if (cj && dj)
            a += "110";
        else if (cj || dj)
            a += "10";
        else
            a += "0";
    }
    return a;
}

namespace {

void merge_subtree(TreeConfig& dst, const TreeConfig& src, char branch) {
    for (const auto& [k, v] : src.overrides) dst.overrides[branch + k] = v;
    for (const auto& [k, v] : src.defaults) dst.defaults[branch + k] = v;
    for (const auto& ray : src.rays)
        dst.rays.push_back({branch + ray.start, ray.letter});
}

TreeConfig realize_impl(const std::string& a) {
    if (a.find('1') == std::string::npos) return uniform_config(3, 2);
    if (a == "1") return uniform_config(3, 1);
    auto [c, d] = psi(a);
    TreeConfig cfg;
    cfg.d = 3;
    cfg.defaults = {{"", 2}};
    if (c.size() < a.size()) {
        cfg.overrides[""] = 3;  // root rotor points up
        merge_subtree(cfg, realize_impl(c), '1');
        merge_subtree(cfg, realize_impl(d), '2');
    } else {
        // a = 0...01: root rotor points at the right sub-branch, which
        // shifts both sub-branch sequences by one leading zero
        cfg.overrides[""] = 2;
        merge_subtree(cfg, realize_impl(c.substr(1)), '1');
        merge_subtree(cfg, realize_impl(d.substr(1)), '2');
    }
    return cfg;
}

}  // namespace

TreeConfig realize_escape_word(const std::string& word) {
    if (word.empty())
        throw std::invalid_argument("realize_escape_word: empty word");
    if (!check_all_Pk(word))
        throw std::invalid_argument("realize_escape_word: word violates P_k");
    return realize_impl(word);
}

}  // namespace chipfire
