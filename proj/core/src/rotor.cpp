#include "chipfire/rotor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace chipfire {

Point dir_vector(int index, int dim, DirOrder order) {
    if (index < 0 || index >= 2 * dim)
        throw std::invalid_argument("dir_vector: index out of range");
    Point v(dim, 0);
    if (order == DirOrder::Canonical) {
        v[index / 2] = index % 2 == 0 ? 1 : -1;
    } else {
        if (dim != 2)
            throw std::invalid_argument("PaperClockwise2D requires d = 2");
        constexpr int dx[4] = {0, 1, 0, -1};  // N, E, S, W
        constexpr int dy[4] = {1, 0, -1, 0};
        v[0] = dx[index];
        v[1] = dy[index];
    }
    return v;
}

RotorConfig default_rotors(int dim, DirOrder order, int start) {
    if (start < 0 || start >= 2 * dim)
        throw std::invalid_argument("default_rotors: bad start index");
    RotorConfig cfg;
    cfg.direction = Field<std::uint8_t>(Box::centered(dim, 1),
                                        static_cast<std::uint8_t>(start));
    cfg.order = order;
    return cfg;
}

Point rotor_step(RotorConfig& rotors, const Point& p) {
    const int d = rotors.dim();
    if (!rotors.direction.box.contains(p)) {
        Box nb = rotors.direction.box;
        for (int a = 0; a < d; ++a) {
            while (p[a] <= nb.lo[a]) nb.lo[a] = 2 * nb.lo[a] - 1;
            while (p[a] >= nb.hi[a]) nb.hi[a] = 2 * nb.hi[a] + 1;
        }
        rotors.direction.grow_to(nb);
    }
    auto& dir = rotors.direction.ref(p);
    dir = static_cast<std::uint8_t>((dir + 1) % (2 * d));
    Point q = p;
    Point v = dir_vector(dir, d, rotors.order);
    for (int a = 0; a < d; ++a) q[a] += v[a];
    return q;
}

namespace {

struct RotorEngine {
    int d;
    DirOrder order;
    std::uint8_t init_bg;
    Box box;
    std::vector<std::int64_t> chips, exits;
    std::vector<std::uint8_t> occupied, rotor, edge;
    std::vector<std::int64_t> offset;  // flat offset per direction index

    RotorEngine(const IntField& sources, const DomainSet& occupied0,
                const RotorConfig& initial, int pad)
        : d(sources.dim()), order(initial.order),
          init_bg(initial.direction.background) {
        Point lo = sources.box.lo, hi = sources.box.hi;
        auto widen = [&](const Box& b) {
            for (int a = 0; a < d; ++a) {
                lo[a] = std::min(lo[a], b.lo[a]);
                hi[a] = std::max(hi[a], b.hi[a]);
            }
        };
        if (occupied0.count > 0) widen(occupied0.box);
        widen(initial.direction.box);
        for (int a = 0; a < d; ++a) {
            lo[a] -= pad;
            hi[a] += pad;
        }
        rehome(Box(lo, hi));
        for (std::int64_t i = 0; i < sources.box.size(); ++i)
            if (sources.values[i] != 0) {
                if (sources.values[i] < 0)
                    throw std::invalid_argument("negative particle count");
                chips[box.index(sources.box.point_at(i))] = sources.values[i];
            }
        for (const Point& p : occupied0.points_sorted())
            occupied[box.index(p)] = 1;
        for (std::int64_t i = 0; i < initial.direction.box.size(); ++i)
            rotor[box.index(initial.direction.box.point_at(i))] =
                initial.direction.values[i];
    }

    void rehome(const Box& nb) {
        if (nb.size() > max_cells())
            throw box_overflow_error("rotor: box exceeds CHIPFIRE_MAX_CELLS");
        std::vector<std::int64_t> nchips(static_cast<std::size_t>(nb.size()), 0);
        std::vector<std::int64_t> nexits(nchips.size(), 0);
        std::vector<std::uint8_t> nocc(nchips.size(), 0);
        std::vector<std::uint8_t> nrot(nchips.size(), init_bg);
        if (!chips.empty()) {
            for (std::int64_t i = 0; i < box.size(); ++i) {
                Point p = box.point_at(i);
                auto j = nb.index(p);
                nchips[j] = chips[i];
                nexits[j] = exits[i];
                nocc[j] = occupied[i];
                nrot[j] = rotor[i];
            }
        }
        box = nb;
        chips = std::move(nchips);
        exits = std::move(nexits);
        occupied = std::move(nocc);
        rotor = std::move(nrot);
        auto s = box.strides();
        offset.assign(2 * d, 0);
        for (int j = 0; j < 2 * d; ++j) {
            Point v = dir_vector(j, d, order);
            for (int a = 0; a < d; ++a) offset[j] += v[a] * s[a];
        }
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

void run_batched(RotorEngine& eng) {
    std::deque<std::int64_t> queue;
    std::vector<std::uint8_t> queued;
    auto seed_queue = [&] {
        queue.clear();
        queued.assign(eng.chips.size(), 0);
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(eng.chips.size());
             ++i)
            if (eng.chips[i] > 0) {
                queue.push_back(i);
                queued[i] = 1;
            }
    };
    seed_queue();
    const int twod = 2 * eng.d;
    while (!queue.empty()) {
        std::int64_t idx = queue.front();
        queue.pop_front();
        queued[idx] = 0;
        std::int64_t c = eng.chips[idx];
        if (c <= 0) continue;
        if (eng.edge[idx]) {
            eng.grow();
            seed_queue();
            continue;
        }
        if (!eng.occupied[idx]) {
            eng.occupied[idx] = 1;
            if (--c == 0) {
                eng.chips[idx] = 0;
                continue;
            }
        }
        eng.chips[idx] = 0;
        eng.exits[idx] += c;
        std::int64_t full = c / twod;
        int rem = static_cast<int>(c % twod);
        int rot = eng.rotor[idx];
        for (int j = 0; j < twod; ++j) {
            // chips leave in rotor order starting one past the current index
            std::int64_t give = full + (((j - rot - 1 + 2 * twod) % twod) < rem);
            if (give == 0) continue;
            std::int64_t nb = idx + eng.offset[j];
            eng.chips[nb] += give;
            if (!queued[nb]) {
                queue.push_back(nb);
                queued[nb] = 1;
            }
        }
        eng.rotor[idx] = static_cast<std::uint8_t>((rot + c) % twod);
    }
}

void run_sequential(RotorEngine& eng) {
    // Walk particles one at a time from each source site, in index order.
    // Growing re-homes all flat indices, so sources are held as points.
    std::vector<std::pair<Point, std::int64_t>> sources;
    for (std::int64_t i = 0; i < eng.box.size(); ++i)
        if (eng.chips[i] > 0) {
            sources.emplace_back(eng.box.point_at(i), eng.chips[i]);
            eng.chips[i] = 0;
        }
    for (const auto& [p0, count] : sources) {
        for (std::int64_t k = 0; k < count; ++k) {
            std::int64_t pos = eng.box.index(p0);
            while (eng.occupied[pos]) {
                if (eng.edge[pos]) {
                    Point p = eng.box.point_at(pos);
                    eng.grow();
                    pos = eng.box.index(p);
                }
                int rot = (eng.rotor[pos] + 1) % (2 * eng.d);
                eng.rotor[pos] = static_cast<std::uint8_t>(rot);
                ++eng.exits[pos];
                pos += eng.offset[rot];
            }
            eng.occupied[pos] = 1;
        }
    }
}

// Discrete potential kernel a(x) of Z^2: a(0) = 0, a(e1) = 1, harmonic off
// the origin, with a(x) = (2/pi) ln|x| + kappa + O(|x|^-2).  Values near the
// origin come from a Dirichlet solve against the asymptotic boundary data;
// far values use the expansion directly.
struct PotentialKernel {
    static constexpr int R = 128;
    static constexpr double kKappa = 1.0293737192922960;  // (2 gamma + ln 8)/pi
    std::vector<double> patch;  // (2R+1)^2, row-major over x then y

    static double asymptotic(double x, double y) {
        return std::log(x * x + y * y) / M_PI + kKappa;
    }

    PotentialKernel() {
        const int L = 2 * R + 1;
        patch.assign(static_cast<std::size_t>(L) * L, 0.0);
        auto at = [&](int x, int y) -> double& {
            return patch[static_cast<std::size_t>(x + R) * L + (y + R)];
        };
        for (int x = -R; x <= R; ++x)
            for (int y = -R; y <= R; ++y)
                if (std::max(std::abs(x), std::abs(y)) == R)
                    at(x, y) = asymptotic(x, y);
        double omega = 2.0 / (1.0 + std::sin(M_PI / L));
        for (int it = 0; it < 8 * L; ++it) {
            double worst = 0.0;
            for (int x = -R + 1; x < R; ++x)
                for (int y = -R + 1; y < R; ++y) {
                    if (x == 0 && y == 0) continue;  // pinned at a(0) = 0
                    double avg = 0.25 * (at(x + 1, y) + at(x - 1, y) +
                                         at(x, y + 1) + at(x, y - 1));
                    double delta = avg - at(x, y);
                    at(x, y) += omega * delta;
                    worst = std::max(worst, std::abs(delta));
                }
            if (worst < 1e-14) break;
        }
    }

    double operator()(std::int64_t x, std::int64_t y) const {
        if (std::max(std::abs(x), std::abs(y)) <= R)
            return patch[static_cast<std::size_t>(x + R) * (2 * R + 1) +
                         (y + R)];
        return asymptotic(static_cast<double>(x), static_cast<double>(y));
    }
};

// Fire site idx by c chips at once: directions depend only on the current
// rotor and c, so this commutes with any other firing order.
void fire_bulk(RotorEngine& eng, std::int64_t idx, std::int64_t c) {
    const int twod = 2 * eng.d;
    eng.exits[idx] += c;
    eng.chips[idx] -= c;
    std::int64_t full = c / twod;
    int rem = static_cast<int>(c % twod);
    int rot = eng.rotor[idx];
    for (int j = 0; j < twod; ++j) {
        std::int64_t give = full + (((j - rot - 1 + 2 * twod) % twod) < rem);
        if (give != 0) eng.chips[idx + eng.offset[j]] += give;
    }
    eng.rotor[idx] = static_cast<std::uint8_t>((rot + c) % twod);
}

RotorAggregate collect(RotorEngine& eng);

// Point-source aggregation accelerated by prefiring an under-approximation of
// the odometer.  The exact lattice identity u(x) = |x|^2 - n a(x) + c holds
// up to an O(log n) boundary correction, so prefiring its floor minus a
// margin leaves only near-boundary work for the queue.  Sites may run a
// transient chip deficit; arrivals repay it, and the final state is checked
// (no residual chips, exactly n settled particles).  Returns false if the
// margin proved too small, in which case the caller retries or falls back.
bool aggregate_point_fast(std::int64_t n, const RotorConfig& initial,
                          double margin, RotorAggregate& out) {
    static const PotentialKernel kernel;
    const int d = 2;
    double r0 = std::sqrt(static_cast<double>(n) / M_PI);
    double shift = static_cast<double>(n) *
                       (2.0 / M_PI * std::log(r0) + PotentialKernel::kKappa) -
                   r0 * r0;

    IntField sources(Box::centered(d, 1));
    sources.ref(Point(d, 0)) = n;
    int pad = static_cast<int>(std::ceil(r0)) + 8;
    RotorEngine eng(sources, DomainSet(Box::centered(d, 1)), initial, pad);

    for (std::int64_t i = 0; i < eng.box.size(); ++i) {
        if (eng.edge[i]) continue;
        Point p = eng.box.point_at(i);
        double q = static_cast<double>(p[0]) * p[0] +
                   static_cast<double>(p[1]) * p[1];
        // the unconstrained formula has its minimum at r0 and rises again
        // outside the cluster, where the true odometer is zero
        if (q >= r0 * r0) continue;
        double a = p[0] == 0 && p[1] == 0 ? 0.0 : kernel(p[0], p[1]);
        double u = q - static_cast<double>(n) * a + shift - margin;
        if (u < 1.0) continue;
        if (!eng.occupied[i]) {
            eng.occupied[i] = 1;
            eng.chips[i] -= 1;
        }
        fire_bulk(eng, i, static_cast<std::int64_t>(u));
    }

    run_batched(eng);

    std::int64_t settled = 0;
    for (std::int64_t i = 0; i < eng.box.size(); ++i) {
        if (eng.chips[i] != 0) return false;
        settled += eng.occupied[i];
    }
    if (settled != n) return false;
    out = collect(eng);
    return true;
}

RotorAggregate collect(RotorEngine& eng) {
    Point tlo = eng.box.hi, thi = eng.box.lo;
    for (std::int64_t i = 0; i < eng.box.size(); ++i) {
        if (!eng.occupied[i] && eng.exits[i] == 0 &&
            eng.rotor[i] == eng.init_bg)
            continue;
        Point p = eng.box.point_at(i);
        for (int a = 0; a < eng.d; ++a) {
            tlo[a] = std::min(tlo[a], p[a]);
            thi[a] = std::max(thi[a], p[a]);
        }
    }
    if (tlo > thi) {
        tlo = Point(eng.d, 0);
        thi = Point(eng.d, 0);
    }
    Box out(tlo, thi);
    RotorAggregate agg;
    agg.occupied = DomainSet(out);
    agg.exits = IntField(out);
    agg.rotors.order = eng.order;
    agg.rotors.direction = Field<std::uint8_t>(out, eng.init_bg);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        Point p = out.point_at(i);
        std::int64_t j = eng.box.index(p);
        if (eng.occupied[j]) agg.occupied.insert(p);
        agg.exits.values[i] = eng.exits[j];
        agg.rotors.direction.values[i] = eng.rotor[j];
    }
    return agg;
}

}  // namespace

RotorAggregate aggregate_sources(const IntField& sources,
                                 const DomainSet& occupied0,
                                 const RotorConfig& initial,
                                 const RotorRunOptions& opts) {
    const int d = sources.dim();
    std::int64_t total =
        std::accumulate(sources.values.begin(), sources.values.end(),
                        std::int64_t{0}) +
        occupied0.count;
    double omega = d == 2 ? M_PI : (d == 3 ? 4.0 * M_PI / 3.0 : 2.0);
    int pad = static_cast<int>(std::ceil(
                  std::pow(std::max<double>(total, 1.0) / omega, 1.0 / d))) +
              3;
    RotorEngine eng(sources, occupied0, initial, pad);
    if (opts.sequential)
        run_sequential(eng);
    else
        run_batched(eng);
    return collect(eng);
}

RotorAggregate aggregate(std::int64_t n, const RotorConfig& initial,
                         const RotorRunOptions& opts) {
    if (n < 1) throw std::invalid_argument("aggregate: n must be >= 1");
    if (!opts.sequential && initial.dim() == 2 && n >= opts.accel_threshold) {
        RotorAggregate out;
        double margin = 48.0 + 4.0 * std::log(static_cast<double>(n));
        for (int attempt = 0; attempt < 3; ++attempt, margin *= 4.0)
            if (aggregate_point_fast(n, initial, margin, out)) return out;
    }
    IntField sources(Box::centered(initial.dim(), 1));
    sources.ref(Point(initial.dim(), 0)) = n;
    return aggregate_sources(sources, DomainSet(Box::centered(initial.dim(), 1)),
                             initial, opts);
}

DomainSet rotor_smash(const DomainSet& A, const DomainSet& B,
                      const RotorConfig& initial) {
    const int d = initial.dim();
    Point lo(d, 0), hi(d, 0);
    auto widen = [&](const Box& b) {
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], b.lo[a]);
            hi[a] = std::max(hi[a], b.hi[a]);
        }
    };
    if (A.count > 0) widen(A.box);
    if (B.count > 0) widen(B.box);
    IntField sources(Box(lo, hi));
    for (const Point& p : A.points_sorted()) ++sources.ref(p);
    for (const Point& p : B.points_sorted()) ++sources.ref(p);
    return aggregate_sources(sources, DomainSet(Box(lo, hi)), initial).occupied;
}

HarnessReport harnessed_walk_bound_check(
    const SmallGraph& g, int source, std::int64_t n,
    const std::vector<int>& absorbing, const std::vector<int>& targets,
    const std::vector<int>& initial_rotors) {
    const int V = g.size();
    if (source < 0 || source >= V)
        throw std::invalid_argument("harnessed: bad source");
    std::vector<char> in_z(V, 0), in_y(V, 0);
    for (int v : absorbing) in_z[v] = 1;
    for (int v : targets) {
        if (!in_z[v]) throw std::invalid_argument("harnessed: Y not in Z");
        in_y[v] = 1;
    }

    // H(v) = P(walk from v is absorbed in Y); exact dense solve.
    std::vector<int> free_id(V, -1);
    std::vector<int> free_list;
    for (int v = 0; v < V; ++v)
        if (!in_z[v]) {
            free_id[v] = static_cast<int>(free_list.size());
            free_list.push_back(v);
        }
    const auto m = static_cast<Eigen::Index>(free_list.size());
    Eigen::VectorXd H = Eigen::VectorXd::Zero(V);
    for (int v = 0; v < V; ++v) H(v) = in_y[v] ? 1.0 : 0.0;
    if (m > 0) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            int v = free_list[i];
            if (g.adj[v].empty())
                throw std::invalid_argument("harnessed: isolated free vertex");
            double w = 1.0 / g.adj[v].size();
            A(i, i) = 1.0;
            for (int u : g.adj[v]) {
                if (in_z[u])
                    b(i) += w * (in_y[u] ? 1.0 : 0.0);
                else
                    A(i, free_id[u]) -= w;
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible())
            throw std::runtime_error("harnessed: singular system (disconnected)");
        Eigen::VectorXd x = lu.solve(b);
        for (Eigen::Index i = 0; i < m; ++i) H(free_list[i]) = x(i);
    }

    std::vector<int> rotor(initial_rotors);
    rotor.resize(V, 0);
    std::int64_t hits = 0;
    const std::int64_t step_cap = 2'000'000'000;
    std::int64_t steps = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        int pos = source;
        while (!in_z[pos]) {
            int deg = static_cast<int>(g.adj[pos].size());
            rotor[pos] = (rotor[pos] + 1) % deg;
            pos = g.adj[pos][rotor[pos]];
            if (++steps > step_cap)
                throw std::runtime_error("harnessed: step cap exceeded");
        }
        if (in_y[pos]) ++hits;
    }

    HarnessReport rep;
    rep.rotor_hits = static_cast<double>(hits);
    rep.expected_hits = static_cast<double>(n) * H(source);
    double bound = 0.0;
    for (int v : free_list)
        for (int u : g.adj[v]) bound += std::abs(H(v) - H(u));
    rep.bound = bound;
    rep.holds = std::abs(rep.rotor_hits - rep.expected_hits) <= bound + 1e-9;
    return rep;
}

}  // namespace chipfire
