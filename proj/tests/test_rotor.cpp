#include "chipfire/rotor.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

using namespace chipfire;

TEST_SUITE_BEGIN("rotor");

TEST_CASE("rotor_step increments before stepping") {
    auto rotors = default_rotors(2, DirOrder::Canonical, 3);
    Point q = rotor_step(rotors, {0, 0});
    CHECK(rotors.direction.at({0, 0}) == 0);
    CHECK(q == Point{1, 0});  // +e1 after wrapping 3 -> 0

    // 2d consecutive steps visit each neighbor once and restore the rotor
    auto r2 = default_rotors(2, DirOrder::Canonical, 0);
    std::vector<Point> seen;
    for (int i = 0; i < 4; ++i) seen.push_back(rotor_step(r2, {0, 0}));
    CHECK(r2.direction.at({0, 0}) == 0);
    auto nb = neighbors(Point{0, 0});
    for (const Point& p : nb)
        CHECK(std::count(seen.begin(), seen.end(), p) == 1);
}

TEST_CASE("paper clockwise A3") {
    auto agg = aggregate(3, default_rotors(2, DirOrder::PaperClockwise2D, 0));
    CHECK(agg.occupied.count == 3);
    CHECK(agg.occupied.contains({0, 0}));
    CHECK(agg.occupied.contains({1, 0}));
    CHECK(agg.occupied.contains({0, -1}));
}

TEST_CASE("aggregate basics and batched/sequential agreement") {
    auto a1 = aggregate(1, default_rotors(2));
    CHECK(a1.occupied.count == 1);
    CHECK(a1.occupied.contains({0, 0}));

    RotorRunOptions seq;
    seq.sequential = true;
    for (std::int64_t n : {7, 64, 300}) {
        auto fast = aggregate(n, default_rotors(2));
        auto slow = aggregate(n, default_rotors(2), seq);
        CHECK(fast.occupied.symmetric_difference_count(slow.occupied) == 0);
        CHECK(fast.occupied.count == n);
    }
    auto d3 = aggregate(101, default_rotors(3));
    CHECK(d3.occupied.count == 101);
}

TEST_CASE("aggregate ball quality at n=1e4") {
    std::int64_t n = 10000;
    auto agg = aggregate(n, default_rotors(2));
    double r = std::sqrt(n / M_PI);
    auto m = shape_metrics(agg.occupied);
    CHECK(r - m.inradius <= 1.0 * std::log(r));
    CHECK(m.outradius - r <= std::sqrt(r) * std::log(r));
}

TEST_CASE("accelerated point source matches plain queue") {
    RotorRunOptions accel;
    accel.accel_threshold = 1;
    RotorRunOptions plain;
    plain.accel_threshold = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t n : {500, 4096, 20000}) {
        for (DirOrder order : {DirOrder::Canonical, DirOrder::PaperClockwise2D}) {
            auto f = aggregate(n, default_rotors(2, order, 1), accel);
            auto s = aggregate(n, default_rotors(2, order, 1), plain);
            CHECK(f.occupied.symmetric_difference_count(s.occupied) == 0);
            CHECK(f.exits.values == s.exits.values);
            CHECK(f.rotors.direction.values == s.rotors.direction.values);
            CHECK(f.exits.box.lo == s.exits.box.lo);
            CHECK(f.exits.box.hi == s.exits.box.hi);
        }
    }
}

TEST_CASE("rotor_smash") {
    DomainSet empty;
    auto A = ball_domain(3.0, 2);
    auto same = rotor_smash(A, empty, default_rotors(2));
    CHECK(same.symmetric_difference_count(A) == 0);

    DomainSet far(Box({100 - 2, -2}, {100 + 2, 2}));
    far.insert({100, 0});
    far.insert({101, 0});
    auto uni = rotor_smash(A, far, default_rotors(2));
    CHECK(uni.count == A.count + far.count);
    CHECK(uni.includes(A));
    for (const Point& p : far.points_sorted()) CHECK(uni.contains(p));

    // overlapping squares: cardinality exactly additive
    DomainSet s1(Box({0, 0}, {9, 9})), s2(Box({5, 0}, {14, 9}));
    for (int x = 0; x < 10; ++x)
        for (int y = 0; y < 10; ++y) {
            s1.insert({x, y});
            s2.insert({x + 5, y});
        }
    auto sum = rotor_smash(s1, s2, default_rotors(2));
    CHECK(sum.count == s1.count + s2.count);
    CHECK(sum.includes(s1));
}

TEST_CASE("harnessed walk bound") {
    // path 0-1-2-3, absorbing {0, 3}, target {3}
    SmallGraph path;
    path.adj = {{1}, {0, 2}, {1, 3}, {2}};
    auto rep = harnessed_walk_bound_check(path, 1, 4, {0, 3}, {3},
                                          {0, 0, 0, 0});
    CHECK(rep.holds);
    CHECK(std::abs(rep.rotor_hits - rep.expected_hits) <= rep.bound + 1e-9);

    // random multigraphs
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 5 + static_cast<int>(rng() % 5);
        SmallGraph g;
        g.adj.assign(n, {});
        for (int v = 1; v < n; ++v) {
            int u = static_cast<int>(rng() % v);
            g.adj[v].push_back(u);
            g.adj[u].push_back(v);
        }
        for (int extra = 0; extra < n; ++extra) {
            int u = static_cast<int>(rng() % n);
            int v = static_cast<int>(rng() % n);
            if (u == v) continue;
            g.adj[u].push_back(v);
            g.adj[v].push_back(u);
        }
        std::vector<int> rotors(n, 0);
        for (int v = 0; v < n; ++v)
            rotors[v] = static_cast<int>(rng() % g.adj[v].size());
        auto r = harnessed_walk_bound_check(g, 0, 20, {n - 1, n - 2}, {n - 1},
                                            rotors);
        CHECK(r.holds);
    }
}

TEST_SUITE_END();
