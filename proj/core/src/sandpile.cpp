#include "chipfire/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace chipfire {

namespace {

struct ChipEngine {
    int d;
    std::int64_t bg;
    Box box;
    std::vector<std::int64_t> chips, fires;
    std::vector<std::int64_t> stride;
    std::vector<std::uint8_t> edge;

    ChipEngine(const IntField& initial, int pad)
        : d(initial.dim()), bg(initial.background) {
        if (bg >= 2 * d)
            throw std::invalid_argument("sandpile: unstable background");
        Point lo = initial.box.lo, hi = initial.box.hi;
        for (int a = 0; a < d; ++a) {
            lo[a] -= pad;
            hi[a] += pad;
        }
        rehome(Box(lo, hi));
        for (std::int64_t i = 0; i < initial.box.size(); ++i)
            chips[box.index(initial.box.point_at(i))] = initial.values[i];
    }

    void rehome(const Box& nb) {
        if (nb.size() > max_cells())
            throw box_overflow_error("sandpile: box exceeds CHIPFIRE_MAX_CELLS");
        std::vector<std::int64_t> nchips(static_cast<std::size_t>(nb.size()), bg);
        std::vector<std::int64_t> nfires(nchips.size(), 0);
        if (!chips.empty())
            for (std::int64_t i = 0; i < box.size(); ++i) {
                Point p = box.point_at(i);
                auto j = nb.index(p);
                nchips[j] = chips[i];
                nfires[j] = fires[i];
            }
        box = nb;
        chips = std::move(nchips);
        fires = std::move(nfires);
        stride = box.strides();
        edge.assign(chips.size(), 0);
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

void run_batched(ChipEngine& eng) {
    const int twod = 2 * eng.d;
    std::deque<std::int64_t> queue;
    std::vector<std::uint8_t> queued;
    auto seed_queue = [&] {
        queue.clear();
        queued.assign(eng.chips.size(), 0);
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(eng.chips.size());
             ++i)
            if (eng.chips[i] >= twod) {
                queue.push_back(i);
                queued[i] = 1;
            }
    };
    seed_queue();
    while (!queue.empty()) {
        std::int64_t idx = queue.front();
        queue.pop_front();
        queued[idx] = 0;
        std::int64_t c = eng.chips[idx];
        if (c < twod) continue;
        if (eng.edge[idx]) {
            eng.grow();
            seed_queue();
            continue;
        }
        std::int64_t k = c / twod;
        eng.chips[idx] = c - twod * k;
        eng.fires[idx] += k;
        for (int a = 0; a < eng.d; ++a)
            for (std::int64_t nb : {idx + eng.stride[a], idx - eng.stride[a]}) {
                eng.chips[nb] += k;
                if (!queued[nb] && eng.chips[nb] >= twod) {
                    queue.push_back(nb);
                    queued[nb] = 1;
                }
            }
    }
}

void run_random_single(ChipEngine& eng, std::uint64_t seed) {
    const int twod = 2 * eng.d;
    std::mt19937_64 rng(seed);
    while (true) {
        std::vector<std::int64_t> unstable;
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(eng.chips.size());
             ++i)
            if (eng.chips[i] >= twod) unstable.push_back(i);
        if (unstable.empty()) break;
        std::shuffle(unstable.begin(), unstable.end(), rng);
        for (std::int64_t idx : unstable) {
            if (eng.chips[idx] < twod) continue;
            if (eng.edge[idx]) {
                eng.grow();
                break;  // indices stale; rebuild the unstable list
            }
            eng.chips[idx] -= twod;
            eng.fires[idx] += 1;
            for (int a = 0; a < eng.d; ++a) {
                eng.chips[idx + eng.stride[a]] += 1;
                eng.chips[idx - eng.stride[a]] += 1;
            }
        }
    }
}

}  // namespace

ChipState stabilize_field(const IntField& initial,
                          const std::vector<Point>& sources,
                          const SandpileOptions& opts) {
    const int d = initial.dim();
    std::int64_t extra = 0;
    for (auto v : initial.values) extra += v - initial.background;
    int pad = static_cast<int>(
                  std::ceil(std::pow(std::max<double>(extra, 1.0), 1.0 / d))) +
              3;
    ChipEngine eng(initial, pad);
    if (opts.strategy == FireStrategy::Batched)
        run_batched(eng);
    else
        run_random_single(eng, opts.seed);

    // Visited: fired, or received a grain and held >= 1 afterwards, or source.
    // Both conditions depend only on the (order-free) firing counts.
    Point tlo = eng.box.hi, thi = eng.box.lo;
    auto touch = [&](const Point& p) {
        for (int a = 0; a < d; ++a) {
            tlo[a] = std::min(tlo[a], p[a]);
            thi[a] = std::max(thi[a], p[a]);
        }
    };
    for (std::int64_t i = 0; i < eng.box.size(); ++i)
        if (eng.chips[i] != eng.bg || eng.fires[i] != 0)
            touch(eng.box.point_at(i));
    for (const Point& p : sources) touch(p);
    if (tlo > thi) {
        tlo = Point(d, 0);
        thi = Point(d, 0);
    }
    Box out(tlo, thi);

    ChipState st{IntField(out, initial.background), IntField(out),
                 DomainSet(out)};
    for (std::int64_t i = 0; i < out.size(); ++i) {
        Point p = out.point_at(i);
        std::int64_t j = eng.box.index(p);
        st.chips.values[i] = eng.chips[j];
        st.firings.values[i] = eng.fires[j];
        if (eng.fires[j] > 0) {
            st.visited.insert(p);
            continue;
        }
        std::int64_t received = 0;
        for (const Point& q : neighbors(p))
            if (eng.box.contains(q)) received += eng.fires[eng.box.index(q)];
        if (received > 0 && eng.chips[j] >= 1) st.visited.insert(p);
    }
    for (const Point& p : sources)
        if (!st.visited.contains(p)) st.visited.insert(p);
    return st;
}

ChipState stabilize_chips(std::int64_t n, int H, int dim,
                          const SandpileOptions& opts) {
    if (H < 2 - 2 * dim)
        throw std::invalid_argument("stabilize_chips: H below 2 - 2d");
    if (n < 1) throw std::invalid_argument("stabilize_chips: n must be >= 1");
    IntField initial(Box::centered(dim, 1), -H);
    Point o(dim, 0);
    initial.ref(o) = n - H;
    return stabilize_field(initial, {o}, opts);
}

std::int64_t fire_count_identity_check(const ChipState& state,
                                       const IntField& initial) {
    std::int64_t worst = 0;
    const Box& b = state.firings.box;
    for (std::int64_t i = 0; i < b.size(); ++i) {
        Point p = b.point_at(i);
        std::int64_t received = 0;
        for (const Point& q : neighbors(p)) received += state.firings.at(q);
        std::int64_t expect = initial.at(p) + received -
                              2 * b.dim() * state.firings.values[i];
        worst = std::max(worst, std::abs(expect - state.chips.values[i]));
    }
    return worst;
}

bool internal_edges_check(const ChipState& state, const Box& Q) {
    std::int64_t chips = 0, internal_edges = 0;
    for (std::int64_t i = 0; i < Q.size(); ++i) {
        Point p = Q.point_at(i);
        if (state.firings.at(p) == 0) return true;  // premise fails
        chips += state.chips.at(p);
        for (int a = 0; a < Q.dim(); ++a)
            if (p[a] + 1 <= Q.hi[a]) ++internal_edges;
    }
    return chips >= internal_edges;
}

bool cube_check(std::int64_t n) {
    ChipState st = stabilize_chips(n, -2, 2);
    // The exact-cube statement concerns the toppled region: sites that merely
    // receive a grain form a one-cell halo on the faces that skips the
    // corners, so only the fired set (plus the origin) can be an L-inf ball.
    DomainSet fired(st.firings.box);
    for (std::int64_t i = 0; i < st.firings.box.size(); ++i)
        if (st.firings.values[i] > 0)
            fired.insert(st.firings.box.point_at(i));
    fired.insert(Point(2, 0));
    int k = 0;
    for (const Point& p : fired.points_sorted())
        k = std::max({k, std::abs(p[0]), std::abs(p[1])});
    std::int64_t expect = (2 * static_cast<std::int64_t>(k) + 1) *
                          (2 * static_cast<std::int64_t>(k) + 1);
    if (fired.count != expect) return false;
    for (int x = -k; x <= k; ++x)
        for (int y = -k; y <= k; ++y)
            if (!fired.contains({x, y})) return false;
    return true;
}

}  // namespace chipfire
