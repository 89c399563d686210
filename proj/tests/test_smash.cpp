#include "chipfire/smash.hpp"

#include <doctest.h>

#include <cmath>

using namespace chipfire;

namespace {

DomainSet square(int x0, int y0, int side) {
    DomainSet d(Box({x0, y0}, {x0 + side - 1, y0 + side - 1}));
    for (int x = 0; x < side; ++x)
        for (int y = 0; y < side; ++y) d.insert({x0 + x, y0 + y});
    return d;
}

}  // namespace

TEST_SUITE_BEGIN("smash");

TEST_CASE("multi source: single center is a ball") {
    MultiSourceSpec spec;
    spec.centers = {{0.0, 0.0}};
    spec.volumes = {400.0};
    spec.delta = 1.0;
    double r = std::sqrt(400.0 / M_PI);
    auto div = multi_source_domain(spec, SmashModel::Divisible);
    auto mdiv = shape_metrics(div);
    CHECK(std::abs(mdiv.inradius - r) < 2.5);
    CHECK(std::abs(mdiv.outradius - r) < 2.5);
    auto rot = multi_source_domain(spec, SmashModel::Rotor);
    CHECK(rot.count == 400);
}

TEST_CASE("multi source: distant centers stay disjoint balls") {
    MultiSourceSpec spec;
    spec.centers = {{0.0, 0.0}, {60.0, 0.0}};
    spec.volumes = {100.0, 100.0};
    spec.delta = 1.0;
    auto dom = multi_source_domain(spec, SmashModel::Rotor);
    CHECK(dom.count == 200);
    int near_a = 0, near_b = 0;
    for (const Point& p : dom.points_sorted())
        (p[0] < 30 ? near_a : near_b) += 1;
    CHECK(near_a == 100);
    CHECK(near_b == 100);
}

TEST_CASE("quadrature residuals") {
    MultiSourceSpec spec;
    spec.centers = {{2.0, 0.0}, {-2.0, 0.0}};
    spec.volumes = {60.0, 60.0};
    spec.delta = 0.25;
    auto dom = multi_source_domain(spec, SmashModel::Divisible);
    // h = 1: residual equals the volume-additivity defect
    double cell = spec.delta * spec.delta;
    double defect = std::abs(cell * dom.count - 120.0);
    CHECK(quadrature_residual(dom, spec, "1") == doctest::Approx(defect));
    double boundary_mass = cell * dom.boundary_cells().size();
    CHECK(defect <= boundary_mass + 1e-9);
    // odd symmetry: h = x1 vanishes on both sides
    CHECK(quadrature_residual(dom, spec, "x1") < boundary_mass * 4.5);
    CHECK_THROWS(quadrature_residual(dom, spec, "x1^2"));
}

TEST_CASE("divisible smash volume additivity") {
    auto A = square(0, 0, 12), B = square(6, 0, 12);
    auto sum = divisible_smash(A, B);
    auto defect = std::abs(sum.count - A.count - B.count);
    CHECK(defect <= static_cast<std::int64_t>(sum.boundary_cells().size()));
    CHECK(sum.includes(A));
    CHECK(sum.includes(B));
}

TEST_CASE("two disk quartic on axis") {
    double r = 2.0, delta = 1.0 / 16.0;
    auto dom = two_disk_domain(r, delta);
    auto stats = quartic_residual(dom, r, delta);
    CHECK(std::abs(stats.on_axis_crossing - std::sqrt(10.0)) < 2 * delta + 1e-12);
    // mirror symmetry in x1
    for (const Point& p : dom.boundary_cells())
        CHECK(dom.contains({-p[0], p[1]}));
}

TEST_CASE("associativity") {
    auto A = square(0, 0, 10), B = square(5, 0, 10), C = square(2, 4, 10);
    CHECK(associativity_check(A, B, C, SmashModel::Divisible));
    CHECK(associativity_check(A, B, C, SmashModel::Rotor));
    DomainSet empty;
    auto AB = divisible_smash(A, B);
    auto AB2 = divisible_smash(divisible_smash(A, empty), B);
    CHECK(AB.symmetric_difference_count(AB2) == 0);
}

TEST_CASE("resolution convergence on the doubled disk") {
    DensitySpec spec = DensitySpec::disk({0.0, 0.0}, 1.0, 2.0);
    auto rep = resolution_convergence(spec, {1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0});
    REQUIRE(rep.eps.size() == 2);
    CHECK(rep.eps[1] < rep.eps[0]);
    // each domain approximates the ball of doubled volume
    double R = std::sqrt(2.0);
    for (std::size_t i = 0; i < rep.domains.size(); ++i) {
        auto m = shape_metrics(rep.domains[i]);
        double delta = rep.deltas[i];
        CHECK(std::abs(m.outradius * delta - R) < 4 * delta);
        CHECK(std::abs(m.inradius * delta - R) < 4 * delta);
    }
}

TEST_SUITE_END();
