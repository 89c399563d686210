// Acceptance gate: one pass/fail line per numbered criterion.  Run with no
// arguments to execute everything, or --only N to run a single criterion.
// Criterion 14 (CLI determinism) needs --cli <path-to-chipfire-binary>.

#include "chipfire/algebra.hpp"
#include "chipfire/divisible.hpp"
#include "chipfire/idla.hpp"
#include "chipfire/obstacle.hpp"
#include "chipfire/rotor.hpp"
#include "chipfire/sandpile.hpp"
#include "chipfire/smash.hpp"
#include "chipfire/tree.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace chipfire;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string cli_path;

DomainSet make_square(int size, int shift_x) {
    DomainSet dom(Box({shift_x, 0}, {shift_x + size - 1, size - 1}));
    Point p(2);
    for (int x = shift_x; x < shift_x + size; ++x)
        for (int y = 0; y < size; ++y) {
            p[0] = x;
            p[1] = y;
            dom.insert(p);
        }
    return dom;
}

DomainSet full_sites(const DivisibleState& state, double tol) {
    DomainSet dom(state.mass.box);
    Point p(state.mass.dim());
    for (std::int64_t i = 0; i < state.mass.box.size(); ++i) {
        p = state.mass.box.point_at(i);
        if (state.mass.at(p) >= 1.0 - tol) dom.insert(p);
    }
    return dom;
}

// 1. Divisible/obstacle oracle equivalence.
Outcome criterion1() {
    std::ostringstream det;
    bool ok = true;
    for (int d : {2, 3})
        for (double m : {50.0, 400.0, 2000.0}) {
            auto [state, report] = point_source(m, d);
            ScalarField sigma(Box::centered(d, 1), 0.0);
            sigma.ref(Point(d, 0)) = m;
            auto sol = solve_obstacle(sigma);
            double worst = 0.0;
            const Box& big = sol.odometer.box.size() > state.odometer.box.size()
                                 ? sol.odometer.box
                                 : state.odometer.box;
            Point p(d);
            for (std::int64_t i = 0; i < big.size(); ++i) {
                p = big.point_at(i);
                worst = std::max(
                    worst, std::abs(sol.odometer.at(p) - state.odometer.at(p)));
            }
            if (worst > 1e-6 * m) ok = false;
            det << "d=" << d << ",m=" << m << ":max|du|=" << worst << " ";
        }
    return {ok, det.str()};
}

// 2. Divisible ball theorem.
Outcome criterion2() {
    std::ostringstream det;
    bool ok = true;
    std::vector<double> in_def, out_def;
    for (double m : {1e3, 1e4, 1e5}) {
        auto [state, report] = point_source(m, 2);
        double tol = 1e-10 * m;
        auto metrics = shape_metrics(full_sites(state, tol));
        double r = std::sqrt(m / M_PI);
        in_def.push_back(r - metrics.inradius);
        out_def.push_back(metrics.outradius - r);
        if (in_def.back() > 2.0 || out_def.back() > 2.0) ok = false;
        det << "m=" << m << ":r-in=" << in_def.back()
            << ",out-r=" << out_def.back() << " ";
    }
    // stability: the largest mass must not exceed the smallest by > 0.5
    if (in_def.back() > in_def.front() + 0.5) ok = false;
    if (out_def.back() > out_def.front() + 0.5) ok = false;
    return {ok, det.str()};
}

// 3. Rotor ball sandwich.
Outcome criterion3() {
    std::ostringstream det;
    bool ok = true;
    for (std::int64_t n : {1000LL, 10000LL, 100000LL, 1000000LL}) {
        auto agg = aggregate(n, default_rotors(2));
        auto m = shape_metrics(agg.occupied);
        double r = std::sqrt(n / M_PI);
        double inner = (r - m.inradius) / std::log(r);
        double outer = (m.outradius - r) / (std::sqrt(r) * std::log(r));
        if (inner > 1.0 || outer > 1.0) ok = false;
        det << "n=" << n << ":in=" << inner << ",out=" << outer << " ";
    }
    return {ok, det.str()};
}

// 4. Abelian sandpile sandwich.
Outcome criterion4() {
    std::ostringstream det;
    bool ok = true;
    double prev_in = 0.0, prev_out = 0.0;
    for (std::int64_t n : {10000LL, 100000LL}) {
        auto st = stabilize_chips(n, 0, 2);
        auto m = shape_metrics(st.visited);
        double r = std::sqrt(n / M_PI);
        double in_ratio = m.inradius / r, out_ratio = m.outradius / r;
        det << "n=" << n << ":in/r=" << in_ratio << ",out/r=" << out_ratio
            << " ";
        if (n == 100000) {
            if (in_ratio < 0.55 || in_ratio > 0.72) ok = false;
            if (out_ratio < 0.60 || out_ratio > 0.80) ok = false;
            if (std::abs(in_ratio - prev_in) > 0.02) ok = false;
            if (std::abs(out_ratio - prev_out) > 0.02) ok = false;
        }
        prev_in = in_ratio;
        prev_out = out_ratio;
    }
    return {ok, det.str()};
}

// 5. Smash-sum cardinality additivity.
Outcome criterion5() {
    std::ostringstream det;
    bool ok = true;
    auto A = make_square(40, 0), B = make_square(40, 20);
    std::int64_t want = A.count + B.count;
    auto rotor = rotor_smash(A, B, default_rotors(2));
    if (rotor.count != want) ok = false;
    auto idla = df_smash(A, B, 7);
    if (idla.count != want) ok = false;
    auto div = divisible_smash(A, B);
    auto defect = std::abs(div.count - want);
    auto boundary = static_cast<std::int64_t>(div.boundary_cells().size());
    if (defect > boundary) ok = false;
    det << "rotor=" << rotor.count << ",idla=" << idla.count
        << ",want=" << want << ",div_defect=" << defect << "<=" << boundary;
    return {ok, det.str()};
}

// 6. Two-source quartic boundary.
Outcome criterion6() {
    std::ostringstream det;
    bool ok = true;
    double r = 2.0;
    auto coarse = quartic_residual(two_disk_domain(r, 1.0 / 32.0), r, 1.0 / 32.0);
    auto fine = quartic_residual(two_disk_domain(r, 1.0 / 64.0), r, 1.0 / 64.0);
    double crossing_err = std::abs(fine.on_axis_crossing - std::sqrt(10.0));
    if (crossing_err > 2.0 / 64.0) ok = false;
    if (fine.median_residual > coarse.median_residual / 1.5) ok = false;
    det << "crossing_err=" << crossing_err
        << ",median(1/32)=" << coarse.median_residual
        << ",median(1/64)=" << fine.median_residual;
    return {ok, det.str()};
}

// 7. Tree perfect ball.
Outcome criterion7() {
    auto rep3 = tree_ball_theorem_suite(3, 8, 20, 101);
    auto rep4 = tree_ball_theorem_suite(4, 6, 20, 202);
    std::ostringstream det;
    det << "d=3:r<=8:" << (rep3.pass ? "ok" : "fail") << " d=4:r<=6:"
        << (rep4.pass ? "ok" : "fail");
    return {rep3.pass && rep4.pass, det.str()};
}

// 8. Group decomposition closed form.
Outcome criterion8() {
    std::ostringstream det;
    bool ok = true;
    if (tree_count(3, 3) != 21 || tree_count(4, 3) != 945) ok = false;
    for (int d : {3, 4, 5})
        for (int n = 2; n <= 6; ++n) {
            auto snf = smith_normal_form(
                reduced_laplacian(make_regular_tree(d, n)));
            if (!(snf == tree_group_decomposition(n, d))) ok = false;
            if (snf.order != tree_count(n, d)) ok = false;
        }
    det << "t3=" << tree_count(3, 3).get_str()
        << ",t4=" << tree_count(4, 3).get_str() << ",d in {3,4,5},n<=6:"
        << (ok ? "match" : "mismatch");
    return {ok, det.str()};
}

// 9. Rotor-router / sandpile isomorphism evidence.
Outcome criterion9() {
    std::ostringstream det;
    bool ok = true;
    for (int n = 2; n <= 6; ++n) {
        auto g = make_regular_tree(3, n);
        std::int64_t order = rotor_root_order(g);
        std::int64_t want = tree_q(n, 3).get_si();
        if (order != want) ok = false;
        det << "n=" << n << ":" << order << "/" << want << " ";
    }
    auto T4 = make_regular_tree(3, 4);
    auto states = enumerate_recurrent_states(T4, 100000);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        const auto& s = states[rng() % states.size()];
        int x = static_cast<int>(rng() % (T4.n - 1));
        int y = static_cast<int>(rng() % (T4.n - 1));
        auto xy = rotor_group_action(T4, rotor_group_action(T4, s, x), y);
        auto yx = rotor_group_action(T4, rotor_group_action(T4, s, y), x);
        if (xy != yx) ok = false;
    }
    det << "commute:" << (ok ? "yes" : "no");
    return {ok, det.str()};
}

// 10. Escape-sequence characterization.
Outcome criterion10() {
    std::ostringstream det;
    bool ok = true;
    int realized = 0;
    for (int len = 1; len <= 8; ++len)
        for (int bits = 0; bits < (1 << len); ++bits) {
            std::string a;
            for (int i = len - 1; i >= 0; --i)
                a.push_back((bits >> i) & 1 ? '1' : '0');
            if (!check_all_Pk(a)) continue;
            ++realized;
            auto cfg = realize_escape_word(a);
            if (escape_sequence_branch(cfg, len) != a) ok = false;
        }
    det << "realized=" << realized << " ";

    if (escape_sequence_branch(uniform_config(3, 2), 40) !=
        std::string(40, '0'))
        ok = false;

    std::string alt = escape_sequence_tree(alternation_config(), 200);
    int returns = 0;
    for (int m = 1; m <= 200; ++m) {
        if (alt[m - 1] == '0') ++returns;
        if (returns != m / 2) ok = false;
    }

    std::mt19937_64 rng(55);
    for (int t = 0; t < 100; ++t) {
        TreeConfig cfg;
        cfg.d = 3;
        cfg.defaults = {{"", static_cast<int>(rng() % 3) + 1}};
        std::vector<std::string> frontier{""};
        for (int l = 0; l < 3; ++l) {
            std::vector<std::string> next;
            for (const auto& w : frontier)
                for (char c : {'1', '2'}) next.push_back(w + c);
            frontier = next;
            for (const auto& w : frontier)
                if (rng() % 2)
                    cfg.overrides[w] = static_cast<int>(rng() % 3) + 1;
        }
        if (!check_all_Pk(escape_sequence_branch(cfg, 25))) ok = false;
    }
    det << "alternation+0^n+100 random:" << (ok ? "ok" : "fail");
    return {ok, det.str()};
}

// 11. Harnessed-walk bound on random graphs.
Outcome criterion11() {
    std::mt19937_64 rng(23);
    bool ok = true;
    double worst_gap = 0.0;
    for (int t = 0; t < 30; ++t) {
        int n = 4 + static_cast<int>(rng() % 6);
        SmallGraph g;
        g.adj.resize(n);
        for (int v = 1; v < n; ++v) {
            int u = static_cast<int>(rng() % v);
            g.adj[u].push_back(v);
            g.adj[v].push_back(u);
        }
        int extra = static_cast<int>(rng() % 4);
        for (int e = 0; e < extra; ++e) {
            int u = static_cast<int>(rng() % n);
            int v = static_cast<int>(rng() % n);
            if (u == v) continue;
            g.adj[u].push_back(v);
            g.adj[v].push_back(u);
        }
        std::vector<int> rotors(n);
        for (int v = 0; v < n; ++v)
            if (!g.adj[v].empty())
                rotors[v] = static_cast<int>(rng() % g.adj[v].size());
        std::vector<int> absorbing = {n - 1, n - 2};
        auto rep = harnessed_walk_bound_check(
            g, 0, 200 + static_cast<std::int64_t>(rng() % 800), absorbing,
            {n - 1}, rotors);
        if (!rep.holds) ok = false;
        worst_gap = std::max(
            worst_gap,
            std::abs(rep.rotor_hits - rep.expected_hits) - rep.bound);
    }
    std::ostringstream det;
    det << "30 graphs, worst (|gap|-bound)=" << worst_gap;
    return {ok, det.str()};
}

// 12. Burning vs critical-vertex recurrence.
Outcome criterion12() {
    std::mt19937_64 rng(29);
    bool ok = true;
    std::int64_t configs = 0;
    for (int t = 0; t < 25; ++t) {
        int verts = 2 + static_cast<int>(rng() % 6);  // non-sink count, <= 7
        std::vector<int> parent(verts), sink_edges(verts, 0);
        parent[0] = -1;
        for (int v = 1; v < verts; ++v)
            parent[v] = static_cast<int>(rng() % v);
        sink_edges[0] = 1 + static_cast<int>(rng() % 2);
        for (int v = 1; v < verts; ++v)
            sink_edges[v] = static_cast<int>(rng() % 3);
        auto g = sinked_tree(parent, sink_edges);
        std::vector<int> degs;
        std::int64_t total = 1;
        for (int v = 0; v < g.n; ++v)
            if (v != g.sink) {
                degs.push_back(g.degree(v));
                total *= g.degree(v);
            }
        for (std::int64_t code = 0; code < total; ++code) {
            ChipConfig c(g.n, 0);
            std::int64_t x = code;
            for (std::size_t i = 0; i < degs.size(); ++i) {
                c[i] = x % degs[i];
                x /= degs[i];
            }
            if (is_recurrent_burning(g, c) != is_recurrent_critical(g, c))
                ok = false;
            ++configs;
        }
    }
    std::ostringstream det;
    det << "25 trees (<=8 vertices), " << configs << " stable configs";
    return {ok, det.str()};
}

// 13. Sylow rank formula.
Outcome criterion13() {
    bool ok = true;
    int checks = 0;
    for (int d : {3, 4})
        for (int n = 1; n <= 4; ++n)
            for (std::int64_t p : {5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
                                   43, 47}) {
                if (d * (d - 1) % p == 0) continue;
                auto s = sylow_rank_check(n, d, p);
                if (s.computed != s.formula) ok = false;
                ++checks;
            }
    std::ostringstream det;
    det << checks << " (d,n,p) cases";
    return {ok, det.str()};
}

std::string run_cli(const std::string& args, int* exit_code = nullptr) {
    std::string cmd = cli_path + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed: " + cmd);
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    int rc = pclose(pipe);
    if (exit_code) *exit_code = rc;
    return out;
}

// 14. CLI determinism.
Outcome criterion14() {
    if (cli_path.empty())
        return {false, "no --cli path given"};
    bool ok = true;
    std::ostringstream det;
    std::vector<std::string> cmds = {
        "divisible --mass 200",
        "rotor --n 2000",
        "rotor --n 500 --order clockwise --sequential",
        "sandpile --n 3000",
        "smash --model rotor --size 20 --shift 10",
        "smash --model divisible --size 20 --shift 10",
        "smash --quartic --r 2 --delta 0.0625",
        "obstacle --mass 2 --r 6",
        "tree --degree 3 --radius 5 --configs 5 --seed 3",
        "tree --escape-word 10110",
        "group --degree 3 --tree-height 4",
        "idla --n 800 --seed 5",
        "smash --model idla --size 15 --shift 8 --seed 9",
    };
    for (const auto& c : cmds) {
        int rc1 = 0, rc2 = 0;
        std::string a = run_cli(c, &rc1), b = run_cli(c, &rc2);
        if (a != b || a.empty() || rc1 != 0 || rc2 != 0) {
            ok = false;
            det << "[mismatch: " << c << "] ";
        }
    }
    // render byte-identity through a PPM file
    std::string p1 = "/tmp/chipfire_det_a.ppm", p2 = "/tmp/chipfire_det_b.ppm";
    run_cli("rotor --n 300 --render " + p1);
    run_cli("rotor --n 300 --render " + p2);
    auto slurp = [](const std::string& path) {
        FILE* f = fopen(path.c_str(), "rb");
        std::string s;
        if (!f) return s;
        char buf[4096];
        std::size_t got;
        while ((got = fread(buf, 1, sizeof(buf), f)) > 0) s.append(buf, got);
        fclose(f);
        return s;
    };
    std::string img1 = slurp(p1), img2 = slurp(p2);
    if (img1.empty() || img1 != img2) {
        ok = false;
        det << "[render mismatch] ";
    }
    det << cmds.size() << " commands + render, double-run byte comparison";
    return {ok, det.str()};
}

// 15. Scaling-limit proxy: inclusion margins shrink with the resolution.
Outcome criterion15() {
    DensitySpec spec;
    spec.add_disk({1.0, 0.0}, 2.0, 1.0);
    spec.add_disk({-1.0, 0.0}, 2.0, 1.0);
    auto rep = resolution_convergence(spec, {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0});
    bool ok = rep.eps.size() == 2 && rep.eps[1] < rep.eps[0];
    std::ostringstream det;
    det << "eps:";
    for (double e : rep.eps) det << " " << e;
    return {ok, det.str()};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--only" && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (a == "--cli" && i + 1 < argc)
            cli_path = argv[++i];
    }

    using Fn = Outcome (*)();
    struct Entry {
        int id;
        const char* name;
        Fn fn;
    };
    const std::vector<Entry> entries = {
        {1, "divisible/obstacle equivalence", criterion1},
        {2, "divisible ball theorem", criterion2},
        {3, "rotor ball sandwich", criterion3},
        {4, "sandpile sandwich", criterion4},
        {5, "smash cardinality additivity", criterion5},
        {6, "two-source quartic", criterion6},
        {7, "tree perfect ball", criterion7},
        {8, "group decomposition", criterion8},
        {9, "rotor/sandpile isomorphism evidence", criterion9},
        {10, "escape sequences", criterion10},
        {11, "harnessed walk bound", criterion11},
        {12, "burning vs critical recurrence", criterion12},
        {13, "sylow rank formula", criterion13},
        {14, "determinism", criterion14},
        {15, "resolution convergence", criterion15},
    };

    int failures = 0;
    for (const auto& e : entries) {
        if (only != 0 && e.id != only) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out = {false, std::string("exception: ") + ex.what()};
        }
        auto secs = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        std::printf("criterion %2d [%s]: %s (%.1fs) %s\n", e.id, e.name,
                    out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
