#include "chipfire/grid.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace chipfire;

TEST_SUITE_BEGIN("grid");

TEST_CASE("neighbors order and involution") {
    Point o{0, 0};
    auto nb = neighbors(o);
    REQUIRE(nb.size() == 4);
    CHECK(nb[0] == Point{1, 0});
    CHECK(nb[1] == Point{-1, 0});
    CHECK(nb[2] == Point{0, 1});
    CHECK(nb[3] == Point{0, -1});

    Point q{1, 2, 3};
    auto nb3 = neighbors(q);
    CHECK(nb3.size() == 6);
    for (const Point& p : nb3) {
        int diff = 0;
        for (int a = 0; a < 3; ++a) diff += std::abs(p[a] - q[a]);
        CHECK(diff == 1);
        auto back = neighbors(p);
        CHECK(std::count(back.begin(), back.end(), q) == 1);
    }

    Box b = Box::centered(2, 3);
    CHECK_THROWS_AS(neighbors(Point{3, 0}, b), out_of_box_error);
}

TEST_CASE("ball_domain counts") {
    CHECK(ball_domain(1.0, 2).count == 1);
    CHECK(ball_domain(1.5, 2).count == 9);
    CHECK(ball_domain(0.0, 2).count == 0);
    CHECK(ball_domain(0.0, 3).count == 0);
    // monotone in r
    auto small = ball_domain(4.0, 2);
    auto large = ball_domain(6.0, 2);
    CHECK(large.includes(small));
}

TEST_CASE("shape_metrics") {
    auto d9 = ball_domain(1.5, 2);
    auto m9 = shape_metrics(d9);
    CHECK(m9.volume == 9);
    CHECK(m9.outradius == doctest::Approx(std::sqrt(2.0)));

    DomainSet just_origin(Box::centered(2, 1));
    just_origin.insert({0, 0});
    auto m1 = shape_metrics(just_origin);
    CHECK(m1.inradius == doctest::Approx(1.0));
    CHECK(m1.outradius == doctest::Approx(0.0));
    CHECK(m1.outradius_defined);

    DomainSet empty(Box::centered(2, 1));
    auto m0 = shape_metrics(empty);
    CHECK(m0.volume == 0);
    CHECK_FALSE(m0.outradius_defined);

    // ball_domain(inradius) is contained in D
    auto d = ball_domain(5.3, 2);
    auto m = shape_metrics(d);
    CHECK(d.includes(ball_domain(m.inradius, 2)));
    CHECK(m.inradius <= m.outradius + 1.0);
}

TEST_CASE("discretize_density") {
    DensitySpec spec;
    spec.add_box({-0.5, -0.5}, {0.5, 0.5});
    ScalarField f = discretize_density(spec, 1.0);
    double total = 0.0;
    for (double v : f.values) total += v;
    CHECK(f.at({0, 0}) == doctest::Approx(1.0));
    CHECK(total == doctest::Approx(1.0));

    auto disk = DensitySpec::disk({0.0, 0.0}, 1.0);
    ScalarField g = discretize_density(disk, 1.0);
    CHECK(g.at({0, 0}) == doctest::Approx(1.0));
    CHECK(g.at({3, 3}) == doctest::Approx(0.0));

    // mass consistency: lattice mass times delta^d near the disk area
    double delta = 0.125;
    ScalarField h = discretize_density(disk, delta);
    double mass = 0.0;
    for (double v : h.values) mass += v;
    mass *= delta * delta;
    CHECK(std::abs(mass - M_PI) < 0.15);
}

TEST_CASE("domain json round trip") {
    auto d = ball_domain(2.5, 2);
    auto text = domain_to_json(d);
    auto back = domain_from_json(text);
    CHECK(back.count == d.count);
    CHECK(back.includes(d));
    CHECK(d.includes(back));
    CHECK(domain_to_json(back) == text);
}

TEST_SUITE_END();
