#include "chipfire/divisible.hpp"

#include "chipfire/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace chipfire {

void topple(DivisibleState& state, const Point& x) {
    double m = state.mass.at(x);
    if (m < 1.0)
        throw std::invalid_argument("topple: site is not full (mass < 1)");
    double excess = m - 1.0;
    if (excess == 0.0) return;
    state.mass.ref(x) = 1.0;
    state.odometer.ref(x) += excess;
    double share = excess / static_cast<double>(2 * x.size());
    for (const Point& q : neighbors(x, state.mass.box)) {
        if (!state.mass.box.contains(q)) throw box_overflow_error("topple at box edge");
        state.mass.ref(q) += share;
        if (state.odometer.at(q) == 0.0) state.odometer.ref(q) += 0.0;
    }
}

namespace {

struct Engine {
    int d;
    Box box;
    std::vector<double> mass, odo;
    std::vector<std::int64_t> stride;
    Point alo, ahi;  // active sub-box (sites that may hold mass)

    explicit Engine(const ScalarField& sigma, int pad) : d(sigma.dim()) {
        Point lo = sigma.box.lo, hi = sigma.box.hi;
        for (int a = 0; a < d; ++a) {
            lo[a] -= pad;
            hi[a] += pad;
        }
        box = Box(lo, hi);
        if (box.size() > max_cells())
            throw box_overflow_error("divisible: box exceeds CHIPFIRE_MAX_CELLS");
        mass.assign(static_cast<std::size_t>(box.size()), 0.0);
        odo.assign(mass.size(), 0.0);
        stride = box.strides();
        for (std::int64_t i = 0; i < sigma.box.size(); ++i) {
            double v = sigma.values[i];
            if (v != 0.0) mass[box.index(sigma.box.point_at(i))] = v;
        }
        alo = sigma.box.lo;
        ahi = sigma.box.hi;
    }

    void grow() {
        Point lo = box.lo, hi = box.hi;
        for (int a = 0; a < d; ++a) {
            int w = box.extent(a);
            lo[a] -= (w + 1) / 2;
            hi[a] += (w + 1) / 2;
        }
        Box nb(lo, hi);
        if (nb.size() > max_cells())
            throw box_overflow_error("divisible: box exceeds CHIPFIRE_MAX_CELLS");
        std::vector<double> nmass(static_cast<std::size_t>(nb.size()), 0.0);
        std::vector<double> nodo(nmass.size(), 0.0);
        Point p(d);
        for (std::int64_t i = 0; i < box.size(); ++i) {
            if (mass[i] == 0.0 && odo[i] == 0.0) continue;
            p = box.point_at(i);
            auto j = nb.index(p);
            nmass[j] = mass[i];
            nodo[j] = odo[i];
        }
        box = nb;
        mass = std::move(nmass);
        odo = std::move(nodo);
        stride = box.strides();
    }

    // Expand the active window by one cell on every axis; grow the backing
    // box when the window would touch its margin.
    void widen_active() {
        for (int a = 0; a < d; ++a) {
            alo[a] -= 1;
            ahi[a] += 1;
        }
        bool need = false;
        for (int a = 0; a < d; ++a)
            if (alo[a] <= box.lo[a] || ahi[a] >= box.hi[a]) need = true;
        if (need) grow();
    }

    // One in-place sweep over the active window; returns the largest excess
    // seen and whether any edge-of-window site toppled.
    std::pair<double, bool> sweep() {
        double max_excess = 0.0;
        bool edge_toppled = false;
        const double inv2d = 1.0 / (2 * d);
        Point p = alo;
        while (true) {
            std::int64_t idx = box.index(p);
            double m = mass[idx];
            if (m > 1.0) {
                double excess = m - 1.0;
                if (excess > max_excess) max_excess = excess;
                mass[idx] = 1.0;
                odo[idx] += excess;
                double share = excess * inv2d;
                for (int a = 0; a < d; ++a) {
                    mass[idx + stride[a]] += share;
                    mass[idx - stride[a]] += share;
                    if (p[a] == alo[a] || p[a] == ahi[a]) edge_toppled = true;
                }
            }
            // advance p within [alo, ahi]
            int a = d - 1;
            while (a >= 0 && p[a] == ahi[a]) {
                p[a] = alo[a];
                --a;
            }
            if (a < 0) break;
            ++p[a];
        }
        return {max_excess, edge_toppled};
    }
};

// For heavy runs plain toppling sweeps (projected Gauss-Seidel) need O(r^2)
// passes; the over-relaxed obstacle solve reaches the same limit odometer
// far faster, and the final mass is recovered from nu = sigma + lap(u).
std::pair<DivisibleState, StabilizationReport> stabilize_via_obstacle(
    const ScalarField& sigma, double tol) {
    const int d = sigma.dim();
    ObstacleOptions oopts;
    oopts.tol = 1e-14;
    auto sol = solve_obstacle(sigma, oopts);
    const Box& box = sol.odometer.box;
    const auto stride = box.strides();
    const double inv2d = 1.0 / (2 * d);

    DivisibleState st{ScalarField(box), sol.odometer};
    StabilizationReport rep;
    rep.sweeps = sol.sweeps;
    rep.domain = DomainSet(box);
    double max_excess = 0.0;
    for (std::int64_t i = 0; i < box.size(); ++i) {
        Point p = box.point_at(i);
        double lap = -sol.odometer.values[i];
        if (box.near_edge(p, 1)) {
            for (const Point& q : neighbors(p)) lap += inv2d * sol.odometer.at(q);
        } else {
            for (int a = 0; a < d; ++a)
                lap += inv2d * (sol.odometer.values[i + stride[a]] +
                                sol.odometer.values[i - stride[a]]);
        }
        double nu = sigma.at(p) + lap;
        if (nu < 0.0) nu = 0.0;
        st.mass.values[i] = nu;
        max_excess = std::max(max_excess, nu - 1.0);
        if (sol.odometer.values[i] > tol || sigma.at(p) >= 1.0 ||
            nu >= 1.0 - tol)
            rep.domain.insert(p);
        if (nu >= 1.0) ++rep.full_sites_strict;
        if (nu >= 1.0 - tol) ++rep.full_sites_tolerant;
    }
    rep.max_excess_at_exit = std::max(max_excess, 0.0);
    return {std::move(st), std::move(rep)};
}

}  // namespace

std::pair<DivisibleState, StabilizationReport> stabilize(
    const ScalarField& sigma, const DivisibleOptions& opts) {
    const int d = sigma.dim();
    double total = std::accumulate(sigma.values.begin(), sigma.values.end(), 0.0);
    for (double v : sigma.values)
        if (v < 0) throw std::invalid_argument("stabilize: negative mass");
    double tol = opts.tol >= 0 ? opts.tol : 1e-10 * std::max(total, 1.0);

    if (opts.strategy == ToppleStrategy::SweepOrder && total > 20000.0)
        return stabilize_via_obstacle(sigma, tol);

    Engine eng(sigma, 4);
    StabilizationReport rep;

    if (opts.strategy == ToppleStrategy::SweepOrder) {
        while (true) {
            auto [max_excess, edge] = eng.sweep();
            ++rep.sweeps;
            if (edge) eng.widen_active();
            if (max_excess < tol) break;
            if (rep.sweeps >= opts.max_sweeps)
                throw std::runtime_error("stabilize: sweep limit exceeded");
        }
    } else {
        std::deque<std::int64_t> queue;
        std::vector<std::uint8_t> queued(eng.mass.size(), 0);
        for (std::int64_t i = 0; i < eng.box.size(); ++i)
            if (eng.mass[i] > 1.0 + tol) {
                queue.push_back(i);
                queued[i] = 1;
            }
        const double inv2d = 1.0 / (2 * d);
        std::int64_t processed = 0;
        while (!queue.empty()) {
            std::int64_t idx = queue.front();
            queue.pop_front();
            queued[idx] = 0;
            double m = eng.mass[idx];
            if (m <= 1.0 + tol) continue;
            Point p = eng.box.point_at(idx);
            if (eng.box.near_edge(p, 1)) {
                // re-home everything; indices change, restart the queue
                eng.grow();
                queue.clear();
                queued.assign(eng.mass.size(), 0);
                for (std::int64_t i = 0; i < eng.box.size(); ++i)
                    if (eng.mass[i] > 1.0 + tol) {
                        queue.push_back(i);
                        queued[i] = 1;
                    }
                continue;
            }
            double excess = m - 1.0;
            eng.mass[idx] = 1.0;
            eng.odo[idx] += excess;
            double share = excess * inv2d;
            for (int a = 0; a < d; ++a) {
                for (std::int64_t j : {idx + eng.stride[a], idx - eng.stride[a]}) {
                    eng.mass[j] += share;
                    if (!queued[j] && eng.mass[j] > 1.0 + tol) {
                        queue.push_back(j);
                        queued[j] = 1;
                    }
                }
            }
            if (++processed % (1 << 20) == 0 && processed / 4 > opts.max_sweeps)
                throw std::runtime_error("stabilize: work limit exceeded");
        }
        rep.sweeps = processed;
    }

    // Assemble result fields trimmed to the touched region.
    Point tlo = eng.box.hi, thi = eng.box.lo;
    for (std::int64_t i = 0; i < eng.box.size(); ++i) {
        if (eng.mass[i] == 0.0 && eng.odo[i] == 0.0) continue;
        Point p = eng.box.point_at(i);
        for (int a = 0; a < d; ++a) {
            tlo[a] = std::min(tlo[a], p[a]);
            thi[a] = std::max(thi[a], p[a]);
        }
    }
    if (tlo > thi) {  // all-zero input
        tlo = Point(d, 0);
        thi = Point(d, 0);
    }
    Box out(tlo, thi);
    DivisibleState st{ScalarField(out), ScalarField(out)};
    rep.domain = DomainSet(out);
    double max_excess = 0.0;
    for (std::int64_t i = 0; i < out.size(); ++i) {
        Point p = out.point_at(i);
        std::int64_t j = eng.box.index(p);
        st.mass.values[i] = eng.mass[j];
        st.odometer.values[i] = eng.odo[j];
        max_excess = std::max(max_excess, eng.mass[j] - 1.0);
        if (eng.odo[j] > 0.0 || sigma.at(p) >= 1.0 ||
            eng.mass[j] >= 1.0 - tol)
            rep.domain.insert(p);
        if (eng.mass[j] >= 1.0) ++rep.full_sites_strict;
        if (eng.mass[j] >= 1.0 - tol) ++rep.full_sites_tolerant;
    }
    rep.max_excess_at_exit = std::max(max_excess, 0.0);
    return {std::move(st), std::move(rep)};
}

std::pair<DivisibleState, StabilizationReport> point_source(
    double m, int dim, const DivisibleOptions& opts) {
    if (m < 0) throw std::invalid_argument("point_source: negative mass");
    // Pre-size near the expected ball radius to avoid re-homing copies.
    double omega = dim == 2 ? M_PI : (dim == 3 ? 4.0 * M_PI / 3.0 : 2.0);
    int half = static_cast<int>(std::ceil(std::pow(std::max(m, 1.0) / omega,
                                                   1.0 / dim))) +
               3;
    ScalarField sigma(Box::centered(dim, half));
    sigma.ref(Point(dim, 0)) = m;
    return stabilize(sigma, opts);
}

}  // namespace chipfire
