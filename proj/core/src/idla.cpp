#include "chipfire/idla.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chipfire {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

int walk_direction(std::uint64_t seed, std::int64_t particle, std::int64_t step,
                   int dim) {
    std::uint64_t key = mix64(seed ^ mix64(static_cast<std::uint64_t>(particle)) ^
                              (mix64(static_cast<std::uint64_t>(step)) << 1));
    return static_cast<int>(key % static_cast<std::uint64_t>(2 * dim));
}

namespace {

struct IdlaEngine {
    int d;
    Box box;
    std::vector<std::uint8_t> occupied, edge;
    std::vector<std::int64_t> offset;  // per direction index (canonical order)

    IdlaEngine(const Box& b0, std::int64_t capacity) : d(b0.dim()) {
        double omega = d == 2 ? M_PI : (d == 3 ? 4.0 * M_PI / 3.0 : 2.0);
        int pad = static_cast<int>(std::ceil(std::pow(
                      std::max<double>(capacity, 1.0) / omega, 1.0 / d))) +
                  3;
        Point lo = b0.lo, hi = b0.hi;
        for (int a = 0; a < d; ++a) {
            lo[a] -= pad;
            hi[a] += pad;
        }
        rehome(Box(lo, hi));
    }

    void rehome(const Box& nb) {
        if (nb.size() > max_cells())
            throw box_overflow_error("idla: box exceeds CHIPFIRE_MAX_CELLS");
        std::vector<std::uint8_t> nocc(static_cast<std::size_t>(nb.size()), 0);
        if (!occupied.empty())
            for (std::int64_t i = 0; i < box.size(); ++i)
                if (occupied[i]) nocc[nb.index(box.point_at(i))] = 1;
        box = nb;
        occupied = std::move(nocc);
        auto s = box.strides();
        offset.assign(2 * d, 0);
        for (int j = 0; j < 2 * d; ++j)
            offset[j] = (j % 2 == 0 ? 1 : -1) * s[j / 2];
        edge.assign(occupied.size(), 0);
        for (std::int64_t i = 0; i < box.size(); ++i)
            if (box.near_edge(box.point_at(i), 1)) edge[i] = 1;
    }

    void grow() {
        Point lo = box.lo, hi = box.hi;
        for (int a = 0; a < d; ++a) {
            int w = box.extent(a);
            lo[a] -= (w + 1) / 2;
            hi[a] += (w + 1) / 2;
        }
        rehome(Box(lo, hi));
    }
};

}  // namespace

IdlaResult idla_aggregate(const IntField& sources, const DomainSet& occupied0,
                          std::uint64_t seed, const IdlaOptions& opts) {
    const int d = sources.dim();
    std::int64_t total = std::accumulate(sources.values.begin(),
                                         sources.values.end(), std::int64_t{0});
    if (total < 1) throw std::invalid_argument("idla: no particles");

    Point lo = sources.box.lo, hi = sources.box.hi;
    if (occupied0.count > 0)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], occupied0.box.lo[a]);
            hi[a] = std::max(hi[a], occupied0.box.hi[a]);
        }
    IdlaEngine eng(Box(lo, hi), total + occupied0.count);
    for (const Point& p : occupied0.points_sorted())
        eng.occupied[eng.box.index(p)] = 1;

    IdlaResult result;
    std::int64_t particle = 0;
    for (std::int64_t i = 0; i < sources.box.size(); ++i) {
        Point p0 = sources.box.point_at(i);
        for (std::int64_t k = 0; k < sources.values[i]; ++k) {
            std::int64_t pos = eng.box.index(p0);
            std::int64_t step = 0;
            while (eng.occupied[pos]) {
                if (eng.edge[pos]) {
                    Point p = eng.box.point_at(pos);
                    eng.grow();
                    pos = eng.box.index(p);
                }
                if (step >= opts.max_steps)
                    throw std::runtime_error("idla: particle exceeded max steps");
                pos += eng.offset[walk_direction(seed, particle, step, d)];
                ++step;
            }
            eng.occupied[pos] = 1;
            if (opts.record_order)
                result.settle_order.emplace_back(particle, eng.box.point_at(pos));
            ++particle;
        }
    }

    Point tlo = eng.box.hi, thi = eng.box.lo;
    for (std::int64_t i = 0; i < eng.box.size(); ++i)
        if (eng.occupied[i]) {
            Point p = eng.box.point_at(i);
            for (int a = 0; a < d; ++a) {
                tlo[a] = std::min(tlo[a], p[a]);
                thi[a] = std::max(thi[a], p[a]);
            }
        }
    result.occupied = DomainSet(Box(tlo, thi));
    for (std::int64_t i = 0; i < eng.box.size(); ++i)
        if (eng.occupied[i]) result.occupied.insert(eng.box.point_at(i));
    return result;
}

IdlaResult idla_aggregate(std::int64_t n, int dim, std::uint64_t seed,
                          const IdlaOptions& opts) {
    IntField sources(Box::centered(dim, 1));
    sources.ref(Point(dim, 0)) = n;
    return idla_aggregate(sources, DomainSet(Box::centered(dim, 1)), seed, opts);
}

DomainSet df_smash(const DomainSet& A, const DomainSet& B, std::uint64_t seed,
                   const IdlaOptions& opts) {
    int d = A.count > 0 ? A.dim() : B.dim();
    Point lo(d, 0), hi(d, 0);
    auto widen = [&](const Box& b) {
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], b.lo[a]);
            hi[a] = std::max(hi[a], b.hi[a]);
        }
    };
    if (A.count > 0) widen(A.box);
    if (B.count > 0) widen(B.box);
    // A's particles all settle in place on the empty cluster, so dropping
    // B's particles onto A realizes the "A first, then B" ordering.
    if (B.count == 0) return A;
    IntField sources(Box(lo, hi));
    for (const Point& p : B.points_sorted()) ++sources.ref(p);
    DomainSet start(Box(lo, hi));
    for (const Point& p : A.points_sorted()) start.insert(p);
    IdlaOptions o = opts;
    o.record_order = false;
    return idla_aggregate(sources, start, seed, o).occupied;
}

}  // namespace chipfire
