#include "chipfire/algebra.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>

namespace chipfire {

void SinkedGraph::add_edge(int u, int v, int multiplicity) {
    if (u == v) throw std::invalid_argument("graph: self-loop");
    if (u < 0 || u >= n || v < 0 || v >= n)
        throw std::invalid_argument("graph: vertex out of range");
    adj[u][v] += multiplicity;
    adj[v][u] += multiplicity;
}

int SinkedGraph::degree(int v) const {
    return std::accumulate(adj[v].begin(), adj[v].end(), 0);
}

void SinkedGraph::validate() const {
    if (n < 1 || sink < 0 || sink >= n)
        throw std::invalid_argument("graph: bad sink");
    for (int u = 0; u < n; ++u) {
        if (adj[u][u] != 0) throw std::invalid_argument("graph: self-loop");
        for (int v = 0; v < n; ++v)
            if (adj[u][v] != adj[v][u] || adj[u][v] < 0)
                throw std::invalid_argument("graph: adjacency not symmetric");
    }
    std::vector<char> seen(n, 0);
    std::deque<int> q{sink};
    seen[sink] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int v = 0; v < n; ++v)
            if (adj[u][v] > 0 && !seen[v]) {
                seen[v] = 1;
                q.push_back(v);
            }
    }
    for (int v = 0; v < n; ++v)
        if (!seen[v]) throw std::invalid_argument("graph: not connected");
}

SinkedGraph make_regular_tree(int d, int n) {
    if (d < 3 || n < 2)
        throw std::invalid_argument("make_regular_tree: need d >= 3, n >= 2");
    // non-sink vertices occupy levels 1..n-1; level-(n-1) vertices carry
    // d-1 edges to the sink (their collapsed leaves)
    std::int64_t count = 0, level = 1;
    for (int l = 1; l <= n - 1; ++l) {
        count += level;
        level *= d - 1;
    }
    SinkedGraph g(static_cast<int>(count) + 1);
    g.sink = static_cast<int>(count);
    g.root = 0;
    g.add_edge(0, g.sink, 1);
    int next = 1, depth_of_next = 2;
    std::deque<std::pair<int, int>> q{{0, 1}};  // vertex, level
    while (!q.empty()) {
        auto [v, l] = q.front();
        q.pop_front();
        if (l == n - 1) {
            g.add_edge(v, g.sink, d - 1);
        } else {
            for (int c = 0; c < d - 1; ++c) {
                g.add_edge(v, next, 1);
                q.emplace_back(next, l + 1);
                ++next;
            }
        }
    }
    (void)depth_of_next;
    g.validate();
    return g;
}

SinkedGraph make_tree_ball(int d, int n) {
    if (d < 3 || n < 1)
        throw std::invalid_argument("make_tree_ball: need d >= 3, n >= 1");
    std::int64_t count = 1, level = d;
    for (int l = 1; l <= n; ++l) {
        count += level;
        level *= d - 1;
    }
    SinkedGraph g(static_cast<int>(count) + 1);
    g.sink = static_cast<int>(count);
    g.root = 0;
    int next = 1;
    std::deque<std::pair<int, int>> q{{0, 0}};  // vertex, depth
    while (!q.empty()) {
        auto [v, l] = q.front();
        q.pop_front();
        if (l == n) {
            g.add_edge(v, g.sink, d - 1);
        } else {
            int kids = l == 0 ? d : d - 1;
            for (int c = 0; c < kids; ++c) {
                g.add_edge(v, next, 1);
                q.emplace_back(next, l + 1);
                ++next;
            }
        }
    }
    g.validate();
    return g;
}

SinkedGraph sinked_tree(const std::vector<int>& parent,
                        const std::vector<int>& sink_edges) {
    int m = static_cast<int>(parent.size());
    if (static_cast<int>(sink_edges.size()) != m)
        throw std::invalid_argument("sinked_tree: size mismatch");
    SinkedGraph g(m + 1);
    g.sink = m;
    for (int v = 0; v < m; ++v) {
        if (parent[v] < 0) {
            if (g.root >= 0)
                throw std::invalid_argument("sinked_tree: two roots");
            g.root = v;
        } else {
            g.add_edge(v, parent[v], 1);
        }
        if (sink_edges[v] > 0) g.add_edge(v, g.sink, sink_edges[v]);
    }
    if (g.root < 0) throw std::invalid_argument("sinked_tree: no root");
    g.validate();
    return g;
}

IMat reduced_laplacian(const SinkedGraph& g) {
    g.validate();
    std::vector<int> ids;
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink) ids.push_back(v);
    IMat m(ids.size(), std::vector<mpz_class>(ids.size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = 0; j < ids.size(); ++j)
            m[i][j] = i == j ? g.degree(ids[i]) : -g.adj[ids[i]][ids[j]];
    return m;
}

mpz_class determinant(const IMat& m) {
    const std::size_t n = m.size();
    IMat a = m;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a[piv][k] == 0) ++piv;
            if (piv == n) return 0;
            std::swap(a[k], a[piv]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return n == 0 ? mpz_class(1) : mpz_class(sign * a[n - 1][n - 1]);
}

std::vector<mpz_class> GroupDecomposition::elementary_divisors() const {
    std::vector<mpz_class> out;
    for (mpz_class f : invariant_factors) {
        for (mpz_class p = 2; p * p <= f; ++p) {
            if (f % p != 0) continue;
            mpz_class pw = 1;
            while (f % p == 0) {
                pw *= p;
                f /= p;
            }
            out.push_back(pw);
        }
        if (f > 1) out.push_back(f);
    }
    std::sort(out.begin(), out.end());
    return out;
}

int GroupDecomposition::p_rank(const mpz_class& p) const {
    int rank = 0;
    for (const mpz_class& f : invariant_factors)
        if (f % p == 0) ++rank;
    return rank;
}

GroupDecomposition smith_normal_form(IMat m) {
    const std::size_t n = m.size();
    for (const auto& row : m)
        if (row.size() != n)
            throw std::invalid_argument("smith_normal_form: not square");
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < n; ++i) std::swap(m[i][a], m[i][b]);
    };
    for (std::size_t t = 0; t < n; ++t) {
        // move a submatrix entry of minimal nonzero magnitude to the pivot
        auto choose_pivot = [&]() {
            std::size_t bi = n, bj = n;
            for (std::size_t i = t; i < n; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (m[i][j] != 0 &&
                        (bi == n || cmp(abs(m[i][j]), abs(m[bi][bj])) < 0)) {
                        bi = i;
                        bj = j;
                    }
            if (bi == n)
                throw std::invalid_argument("smith_normal_form: singular matrix");
            std::swap(m[t], m[bi]);
            swap_cols(t, bj);
        };
        choose_pivot();
        while (true) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < n; ++i)
                while (m[i][t] != 0) {
                    mpz_class q = m[i][t] / m[t][t];
                    for (std::size_t j = t; j < n; ++j) m[i][j] -= q * m[t][j];
                    if (m[i][t] != 0) {
                        std::swap(m[t], m[i]);
                        dirty = true;
                    }
                }
            for (std::size_t j = t + 1; j < n; ++j)
                while (m[t][j] != 0) {
                    mpz_class q = m[t][j] / m[t][t];
                    for (std::size_t i = t; i < n; ++i) m[i][j] -= q * m[i][t];
                    if (m[t][j] != 0) {
                        swap_cols(t, j);
                        dirty = true;
                    }
                }
            if (dirty) continue;
            // pivot must divide the rest of the submatrix
            bool fixed = true;
            for (std::size_t i = t + 1; i < n && fixed; ++i)
                for (std::size_t j = t + 1; j < n && fixed; ++j)
                    if (m[i][j] % m[t][t] != 0) {
                        for (std::size_t jj = t; jj < n; ++jj)
                            m[t][jj] += m[i][jj];
                        fixed = false;
                    }
            if (fixed) break;
        }
    }
    GroupDecomposition dec;
    for (std::size_t t = 0; t < n; ++t) {
        mpz_class f = abs(m[t][t]);
        dec.order *= f;
        if (f > 1) dec.invariant_factors.push_back(f);
    }
    return dec;
}

GroupDecomposition from_cyclic_orders(
    const std::vector<std::pair<mpz_class, std::int64_t>>& orders) {
    // prime -> descending exponent list across all cyclic summands
    std::map<mpz_class, std::vector<int>> primes;
    GroupDecomposition dec;
    for (const auto& [q0, mult] : orders) {
        if (q0 < 1 || mult < 0)
            throw std::invalid_argument("from_cyclic_orders: bad input");
        if (q0 == 1 || mult == 0) continue;
        mpz_class q = q0;
        for (std::int64_t k = 0; k < mult; ++k) dec.order *= q0;
        std::map<mpz_class, int> fac;
        for (mpz_class p = 2; p * p <= q; ++p)
            while (q % p == 0) {
                ++fac[p];
                q /= p;
            }
        if (q > 1) ++fac[q];
        for (const auto& [p, e] : fac)
            for (std::int64_t k = 0; k < mult; ++k) primes[p].push_back(e);
    }
    std::size_t chain = 0;
    for (auto& [p, exps] : primes) {
        std::sort(exps.begin(), exps.end(), std::greater<int>());
        chain = std::max(chain, exps.size());
    }
    std::vector<mpz_class> factors(chain, 1);
    for (const auto& [p, exps] : primes)
        for (std::size_t i = 0; i < exps.size(); ++i) {
            mpz_class pw;
            mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), exps[i]);
            factors[i] *= pw;
        }
    // factors[0] is the largest invariant factor; reverse into d1 | d2 | ...
    std::reverse(factors.begin(), factors.end());
    dec.invariant_factors = std::move(factors);
    return dec;
}

mpz_class tree_count(int n, int d) {
    if (n < 1 || d < 3) throw std::invalid_argument("tree_count: bad input");
    mpz_class prev = 1, cur = d;  // t_1, t_2
    if (n == 1) return prev;
    for (int k = 3; k <= n; ++k) {
        mpz_class pw_prev;  // t_{k-1}^{d-2}
        mpz_pow_ui(pw_prev.get_mpz_t(), cur.get_mpz_t(), d - 2);
        mpz_class pw_pprev;  // t_{k-2}^{d-1}
        mpz_pow_ui(pw_pprev.get_mpz_t(), prev.get_mpz_t(), d - 1);
        mpz_class next = pw_prev * (d * cur - (d - 1) * pw_pprev);
        prev = cur;
        cur = next;
    }
    return cur;
}

mpz_class tree_q(int k, int d) {
    mpz_class q = 0, pw = 1;
    for (int i = 0; i < k; ++i) {
        q += pw;
        pw *= d - 1;
    }
    return q;
}

GroupDecomposition tree_group_decomposition(int n, int d) {
    if (n < 2 || d < 3)
        throw std::invalid_argument("tree_group_decomposition: bad input");
    std::vector<std::pair<mpz_class, std::int64_t>> orders;
    orders.emplace_back(tree_q(n, d), 1);
    std::int64_t mult = d - 2;  // a^{n-1-k} (a-1) at k = n-1
    for (int k = n - 1; k >= 2; --k) {
        orders.emplace_back(tree_q(k, d), mult);
        mult *= d - 1;
    }
    return from_cyclic_orders(orders);
}

GraphStabilization stabilize_graph(const SinkedGraph& g, ChipConfig c) {
    if (static_cast<int>(c.size()) != g.n)
        throw std::invalid_argument("stabilize_graph: config size mismatch");
    GraphStabilization out;
    out.firings.assign(g.n, 0);
    std::deque<int> q;
    std::vector<char> queued(g.n, 0);
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink && c[v] >= g.degree(v)) {
            q.push_back(v);
            queued[v] = 1;
        }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        queued[v] = 0;
        int deg = g.degree(v);
        std::int64_t rounds = c[v] / deg;
        if (rounds == 0) continue;
        c[v] -= rounds * deg;
        out.firings[v] += rounds;
        for (int u = 0; u < g.n; ++u)
            if (g.adj[v][u] > 0 && u != g.sink) {
                c[u] += rounds * g.adj[v][u];
                if (!queued[u] && c[u] >= g.degree(u)) {
                    q.push_back(u);
                    queued[u] = 1;
                }
            }
    }
    c[g.sink] = 0;
    out.config = std::move(c);
    return out;
}

bool is_stable(const SinkedGraph& g, const ChipConfig& c) {
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink && (c[v] < 0 || c[v] >= g.degree(v))) return false;
    return true;
}

bool is_recurrent_burning(const SinkedGraph& g, const ChipConfig& c) {
    if (!is_stable(g, c))
        throw std::invalid_argument("is_recurrent_burning: unstable input");
    ChipConfig burn = c;
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink) burn[v] += g.adj[v][g.sink];
    auto res = stabilize_graph(g, burn);
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink && res.firings[v] != 1) return false;
    return res.config == c;
}

namespace {

struct TreeView {
    std::vector<std::vector<int>> children;
    std::vector<int> order;  // BFS order from the root
};

TreeView tree_view(const SinkedGraph& g) {
    if (g.root < 0 || g.root == g.sink)
        throw std::invalid_argument("tree test: graph has no root");
    TreeView tv;
    tv.children.resize(g.n);
    std::vector<char> seen(g.n, 0);
    seen[g.root] = 1;
    std::deque<int> q{g.root};
    int visited = 0, tree_edges = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        tv.order.push_back(v);
        ++visited;
        for (int u = 0; u < g.n; ++u) {
            if (u == g.sink || g.adj[v][u] == 0) continue;
            if (g.adj[v][u] != 1)
                throw std::invalid_argument("tree test: parallel tree edge");
            if (!seen[u]) {
                seen[u] = 1;
                tv.children[v].push_back(u);
                ++tree_edges;
                q.push_back(u);
            }
        }
    }
    int non_sink = g.n - 1;
    int total_internal = 0;
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink)
            for (int u = v + 1; u < g.n; ++u)
                if (u != g.sink) total_internal += g.adj[v][u];
    if (visited != non_sink || tree_edges != total_internal)
        throw std::invalid_argument("tree test: not a sinked tree");
    return tv;
}

}  // namespace

bool is_recurrent_critical(const SinkedGraph& g, const ChipConfig& c) {
    if (!is_stable(g, c))
        throw std::invalid_argument("is_recurrent_critical: unstable input");
    TreeView tv = tree_view(g);
    std::vector<char> critical(g.n, 0);
    bool equality = true;
    for (auto it = tv.order.rbegin(); it != tv.order.rend(); ++it) {
        int v = *it;
        int crit_children = 0;
        for (int u : tv.children[v]) crit_children += critical[u];
        if (c[v] <= crit_children) {
            critical[v] = 1;
            if (c[v] != crit_children) equality = false;
        }
    }
    return equality;
}

ChipConfig add_configs(const SinkedGraph& g, const ChipConfig& u,
                       const ChipConfig& v) {
    ChipConfig w(g.n, 0);
    for (int x = 0; x < g.n; ++x)
        if (x != g.sink) w[x] = u[x] + v[x];
    return stabilize_graph(g, w).config;
}

ChipConfig identity_element(const SinkedGraph& g) {
    ChipConfig m(g.n, 0);
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink) m[v] = 2 * (g.degree(v) - 1);
    ChipConfig sm = stabilize_graph(g, m).config;
    ChipConfig diff(g.n, 0);
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink) diff[v] = m[v] - sm[v];
    return stabilize_graph(g, diff).config;
}

std::int64_t group_order_of_root(const SinkedGraph& g) {
    if (g.root < 0) throw std::invalid_argument("group_order_of_root: no root");
    ChipConfig e = identity_element(g);
    ChipConfig delta(g.n, 0);
    delta[g.root] = 1;
    ChipConfig rhat = add_configs(g, e, delta);
    ChipConfig c = rhat;
    std::int64_t k = 1;
    while (c != e) {
        c = add_configs(g, c, rhat);
        if (++k > 100'000'000)
            throw std::runtime_error("group_order_of_root: runaway order");
    }
    return k;
}

std::vector<int> out_edges(const SinkedGraph& g, int v) {
    std::vector<int> out;
    for (int u = 0; u < g.n; ++u)
        for (int k = 0; k < g.adj[v][u]; ++k) out.push_back(u);
    return out;
}

bool rotor_state_acyclic(const SinkedGraph& g, const RotorTreeState& state) {
    if (static_cast<int>(state.size()) != g.n)
        throw std::invalid_argument("rotor state: size mismatch");
    std::vector<char> color(g.n, 0);  // 0 new, 1 on path, 2 resolved
    color[g.sink] = 2;
    for (int start = 0; start < g.n; ++start) {
        int v = start;
        std::vector<int> path;
        while (color[v] == 0) {
            color[v] = 1;
            path.push_back(v);
            auto out = out_edges(g, v);
            if (state[v] < 0 || state[v] >= static_cast<int>(out.size()))
                throw std::invalid_argument("rotor state: index out of range");
            v = out[state[v]];
        }
        bool ok = color[v] == 2;
        for (int u : path) color[u] = 2;
        if (!ok) return false;
    }
    return true;
}

RotorTreeState rotor_group_action(const SinkedGraph& g,
                                  const RotorTreeState& state, int x) {
    if (!rotor_state_acyclic(g, state))
        throw std::invalid_argument("rotor_group_action: cyclic input state");
    RotorTreeState s = state;
    std::int64_t guard = 0;
    int v = x;
    while (v != g.sink) {
        auto out = out_edges(g, v);
        s[v] = (s[v] + 1) % static_cast<int>(out.size());
        v = out[s[v]];
        if (++guard > 1'000'000'000)
            throw std::runtime_error("rotor_group_action: runaway walk");
    }
    return s;
}

std::vector<RotorTreeState> enumerate_recurrent_states(const SinkedGraph& g,
                                                       std::int64_t limit) {
    std::int64_t total = 1;
    std::vector<int> outdeg(g.n, 1);
    for (int v = 0; v < g.n; ++v)
        if (v != g.sink) {
            outdeg[v] = g.degree(v);
            total *= outdeg[v];
            if (total > limit)
                throw std::invalid_argument(
                    "enumerate_recurrent_states: state space too large");
        }
    std::vector<RotorTreeState> rec;
    RotorTreeState s(g.n, 0);
    while (true) {
        if (rotor_state_acyclic(g, s)) rec.push_back(s);
        int v = 0;
        while (v < g.n && (v == g.sink || s[v] == outdeg[v] - 1)) {
            if (v != g.sink) s[v] = 0;
            ++v;
        }
        if (v >= g.n) break;
        ++s[v];
    }
    return rec;
}

std::int64_t rotor_root_order(const SinkedGraph& g) {
    if (g.root < 0) throw std::invalid_argument("rotor_root_order: no root");
    // initial state: every rotor on its first edge toward the sink
    std::vector<int> dist(g.n, -1);
    dist[g.sink] = 0;
    std::deque<int> q{g.sink};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int u = 0; u < g.n; ++u)
            if (g.adj[v][u] > 0 && dist[u] < 0) {
                dist[u] = dist[v] + 1;
                q.push_back(u);
            }
    }
    RotorTreeState start(g.n, 0);
    for (int v = 0; v < g.n; ++v) {
        if (v == g.sink) continue;
        auto out = out_edges(g, v);
        for (std::size_t i = 0; i < out.size(); ++i)
            if (dist[out[i]] == dist[v] - 1) {
                start[v] = static_cast<int>(i);
                break;
            }
    }
    RotorTreeState s = rotor_group_action(g, start, g.root);
    std::int64_t k = 1;
    while (s != start) {
        s = rotor_group_action(g, s, g.root);
        if (++k > 100'000'000)
            throw std::runtime_error("rotor_root_order: runaway order");
    }
    return k;
}

SylowCheck sylow_rank_check(int n, int d, std::int64_t p) {
    if (p < 2) throw std::invalid_argument("sylow_rank_check: p must be prime");
    for (std::int64_t f = 2; f * f <= p; ++f)
        if (p % f == 0)
            throw std::invalid_argument("sylow_rank_check: p must be prime");
    if ((static_cast<std::int64_t>(d) * (d - 1)) % p == 0)
        throw std::invalid_argument("sylow_rank_check: p divides d(d-1)");
    SylowCheck chk;
    std::int64_t a = d - 1;
    if (a % p == 1) {
        chk.t_p = p;
    } else {
        std::int64_t pw = a % p, k = 1;
        while (pw != 1) {
            pw = (pw * a) % p;
            ++k;
        }
        chk.t_p = k;
    }
    chk.residual_branch = (n + 1) % chk.t_p == 0;
    std::int64_t formula = 0;
    for (int m = 0; m < n; ++m)
        if ((n - m) % chk.t_p == 0) {
            std::int64_t pw = 1;
            for (int i = 0; i < m; ++i) pw *= d - 1;
            formula += static_cast<std::int64_t>(d) * (d - 2) * pw;
        }
    if (chk.residual_branch) formula += d - 1;
    chk.formula = static_cast<int>(formula);
    auto dec = smith_normal_form(reduced_laplacian(make_tree_ball(d, n)));
    chk.computed = dec.p_rank(p);
    return chk;
}

}  // namespace chipfire
