#include "chipfire/smash.hpp"

#include "chipfire/divisible.hpp"
#include "chipfire/idla.hpp"
#include "chipfire/rotor.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <numeric>

namespace chipfire {

int MultiSourceSpec::dim() const {
    if (centers.empty()) throw std::invalid_argument("spec: no centers");
    return static_cast<int>(centers[0].size());
}

void MultiSourceSpec::validate() const {
    if (centers.size() != volumes.size())
        throw std::invalid_argument("spec: centers/volumes length mismatch");
    if (delta <= 0) throw std::invalid_argument("spec: delta must be positive");
    const int d = dim();
    for (const auto& c : centers)
        if (static_cast<int>(c.size()) != d)
            throw std::invalid_argument("spec: center dimension mismatch");
    for (size_t i = 0; i < centers.size(); ++i) {
        if (volumes[i] <= 0)
            throw std::invalid_argument("spec: volumes must be positive");
        for (size_t j = i + 1; j < centers.size(); ++j)
            if (centers[i] == centers[j])
                throw std::invalid_argument("spec: duplicate centers");
    }
}

namespace {

Point nearest_cell(const std::vector<double>& x, double delta) {
    Point p(x.size());
    int prev = std::fegetround();
    std::fesetround(FE_TONEAREST);
    for (size_t a = 0; a < x.size(); ++a)
        p[a] = static_cast<int>(std::nearbyint(x[a] / delta));
    std::fesetround(prev);
    return p;
}

Box covering_box(const std::vector<Point>& pts) {
    Point lo = pts[0], hi = pts[0];
    for (const Point& p : pts)
        for (size_t a = 0; a < p.size(); ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    for (size_t a = 0; a < lo.size(); ++a) {
        --lo[a];
        ++hi[a];
    }
    return Box(lo, hi);
}

}  // namespace

DomainSet multi_source_domain(const MultiSourceSpec& spec, SmashModel model,
                              std::uint64_t seed) {
    spec.validate();
    const int d = spec.dim();
    std::vector<Point> cells;
    std::vector<std::int64_t> counts;
    for (size_t i = 0; i < spec.centers.size(); ++i) {
        cells.push_back(nearest_cell(spec.centers[i], spec.delta));
        counts.push_back(static_cast<std::int64_t>(
            std::floor(spec.volumes[i] / std::pow(spec.delta, d))));
        if (counts.back() < 1)
            throw std::invalid_argument("spec: volume below one lattice cell");
    }
    Box b = covering_box(cells);

    if (model == SmashModel::Divisible) {
        ScalarField sigma(b);
        for (size_t i = 0; i < cells.size(); ++i)
            sigma.ref(cells[i]) += static_cast<double>(counts[i]);
        return stabilize(sigma).second.domain;
    }
    IntField sources(b);
    for (size_t i = 0; i < cells.size(); ++i) sources.ref(cells[i]) += counts[i];
    if (model == SmashModel::Rotor)
        return aggregate_sources(sources, DomainSet(b), default_rotors(d))
            .occupied;
    return idla_aggregate(sources, DomainSet(b), seed).occupied;
}

namespace {

// h must be discrete harmonic; the allowed ids are "1", "x<i>",
// "x<i>x<j>" with i != j, and "x1^2-x2^2".
double eval_harmonic(const std::string& id, const std::vector<double>& x) {
    const int d = static_cast<int>(x.size());
    if (id == "1") return 1.0;
    if (id == "x1^2-x2^2") {
        if (d < 2) throw std::invalid_argument("harmonic id needs d >= 2");
        return x[0] * x[0] - x[1] * x[1];
    }
    auto parse_axis = [&](size_t& pos) {
        if (pos >= id.size() || id[pos] != 'x')
            throw std::invalid_argument("unknown harmonic id: " + id);
        ++pos;
        size_t start = pos;
        while (pos < id.size() && std::isdigit(static_cast<unsigned char>(id[pos])))
            ++pos;
        int axis = std::stoi(id.substr(start, pos - start));
        if (axis < 1 || axis > d)
            throw std::invalid_argument("harmonic axis out of range: " + id);
        return axis - 1;
    };
    size_t pos = 0;
    int i = parse_axis(pos);
    if (pos == id.size()) return x[i];
    int j = parse_axis(pos);
    if (pos != id.size() || i == j)
        throw std::invalid_argument("unknown harmonic id: " + id);
    return x[i] * x[j];
}

}  // namespace

double quadrature_residual(const DomainSet& domain, const MultiSourceSpec& spec,
                           const std::string& h) {
    spec.validate();
    const int d = spec.dim();
    const double cell = std::pow(spec.delta, d);
    double lattice_sum = 0.0;
    std::vector<double> x(d);
    for (const Point& p : domain.points_sorted()) {
        for (int a = 0; a < d; ++a) x[a] = spec.delta * p[a];
        lattice_sum += eval_harmonic(h, x);
    }
    double source_sum = 0.0;
    for (size_t i = 0; i < spec.centers.size(); ++i)
        source_sum += spec.volumes[i] * eval_harmonic(h, spec.centers[i]);
    return std::abs(cell * lattice_sum - source_sum);
}

DomainSet divisible_smash(const DomainSet& A, const DomainSet& B) {
    const int d = A.count > 0 ? A.dim() : B.dim();
    Point lo(d, 0), hi(d, 0);
    auto widen = [&](const Box& b) {
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], b.lo[a]);
            hi[a] = std::max(hi[a], b.hi[a]);
        }
    };
    if (A.count > 0) widen(A.box);
    if (B.count > 0) widen(B.box);
    ScalarField sigma(Box(lo, hi));
    for (const Point& p : A.points_sorted()) sigma.ref(p) += 1.0;
    for (const Point& p : B.points_sorted()) sigma.ref(p) += 1.0;
    return stabilize(sigma).second.domain;
}

DomainSet two_disk_domain(double r, double delta) {
    DensitySpec spec = DensitySpec::disk({1.0, 0.0}, r);
    spec.add_disk({-1.0, 0.0}, r);
    ScalarField sigma = discretize_density(spec, delta);
    return stabilize(sigma).second.domain;
}

QuarticStats quartic_residual(const DomainSet& domain, double r, double delta) {
    auto boundary = domain.boundary_cells();
    if (boundary.empty())
        throw std::invalid_argument("quartic_residual: empty boundary");
    QuarticStats stats;
    std::vector<double> residuals;
    residuals.reserve(boundary.size());
    for (const Point& p : boundary) {
        double c1 = delta * p[0], c2 = delta * p[1];
        double s = c1 * c1 + c2 * c2;
        double P = s * s - 2.0 * r * r * s - 2.0 * (c1 * c1 - c2 * c2);
        double gx = 4.0 * c1 * s - 4.0 * r * r * c1 - 4.0 * c1;
        double gy = 4.0 * c2 * s - 4.0 * r * r * c2 + 4.0 * c2;
        double g = std::hypot(gx, gy);
        if (g < 1e-12) continue;  // near-critical point of P, skip
        residuals.push_back(std::abs(P) / g);
        if (p[1] == 0)
            stats.on_axis_crossing =
                std::max(stats.on_axis_crossing, std::abs(c1));
    }
    if (residuals.empty())
        throw std::runtime_error("quartic_residual: no usable boundary cells");
    stats.max_residual = *std::max_element(residuals.begin(), residuals.end());
    auto mid = residuals.begin() + residuals.size() / 2;
    std::nth_element(residuals.begin(), mid, residuals.end());
    stats.median_residual = *mid;
    return stats;
}

bool associativity_check(const DomainSet& A, const DomainSet& B,
                         const DomainSet& C, SmashModel model) {
    if (model == SmashModel::Divisible) {
        DomainSet left = divisible_smash(divisible_smash(A, B), C);
        DomainSet right = divisible_smash(A, divisible_smash(B, C));
        auto defect = left.symmetric_difference_count(right);
        auto budget =
            static_cast<std::int64_t>(left.boundary_cells().size()) +
            static_cast<std::int64_t>(right.boundary_cells().size());
        return defect <= budget;
    }
    if (model == SmashModel::Rotor) {
        const int d = A.dim();
        auto cfg = default_rotors(d);
        DomainSet left = rotor_smash(rotor_smash(A, B, cfg), C, cfg);
        DomainSet right = rotor_smash(A, rotor_smash(B, C, cfg), cfg);
        std::int64_t want = A.count + B.count + C.count;
        return left.count == want && right.count == want;
    }
    throw std::invalid_argument("associativity_check: unsupported model");
}

namespace {

// Exact distance (real units) from point x to the nearest member of the
// domain at spacing delta, by expanding Chebyshev ring search.
double nearest_member_distance(const std::vector<double>& x,
                               const DomainSet& dom, double delta) {
    const int d = static_cast<int>(x.size());
    Point c(d);
    for (int a = 0; a < d; ++a)
        c[a] = static_cast<int>(std::llround(x[a] / delta));
    double best = -1.0;
    int max_ring = 0;
    for (int a = 0; a < d; ++a)
        max_ring = std::max(max_ring,
                            dom.box.extent(a) + std::abs(c[a] - dom.box.lo[a]) +
                                std::abs(c[a] - dom.box.hi[a]));
    for (int k = 0; k <= max_ring + 1; ++k) {
        if (best >= 0.0 && delta * (k - 1) > best) break;
        // scan the Chebyshev ring |q - c|_inf = k
        Point q(d);
        std::vector<int> idx(d, -k);
        while (true) {
            bool on_ring = false;
            for (int a = 0; a < d; ++a)
                if (std::abs(idx[a]) == k) on_ring = true;
            if (on_ring) {
                for (int a = 0; a < d; ++a) q[a] = c[a] + idx[a];
                if (dom.contains(q)) {
                    double s = 0.0;
                    for (int a = 0; a < d; ++a) {
                        double diff = x[a] - delta * q[a];
                        s += diff * diff;
                    }
                    s = std::sqrt(s);
                    if (best < 0.0 || s < best) best = s;
                }
            }
            int a = d - 1;
            while (a >= 0 && idx[a] == k) {
                idx[a] = -k;
                --a;
            }
            if (a < 0) break;
            ++idx[a];
        }
    }
    if (best < 0.0) throw std::runtime_error("nearest_member_distance: empty");
    return best;
}

double directed_margin(const DomainSet& from, double delta_from,
                       const DomainSet& to, double delta_to) {
    double worst = 0.0;
    std::vector<double> x(from.dim());
    for (const Point& p : from.points_sorted()) {
        for (int a = 0; a < from.dim(); ++a) x[a] = delta_from * p[a];
        worst = std::max(worst, nearest_member_distance(x, to, delta_to));
    }
    return worst;
}

}  // namespace

ConvergenceReport resolution_convergence(const DensitySpec& spec,
                                         const std::vector<double>& deltas) {
    if (deltas.size() < 2)
        throw std::invalid_argument("resolution_convergence: need >= 2 deltas");
    ConvergenceReport rep;
    rep.deltas = deltas;
    for (double delta : deltas) {
        ScalarField sigma = discretize_density(spec, delta);
        rep.domains.push_back(stabilize(sigma).second.domain);
    }
    for (size_t i = 0; i + 1 < deltas.size(); ++i) {
        double a = directed_margin(rep.domains[i], deltas[i], rep.domains[i + 1],
                                   deltas[i + 1]);
        double b = directed_margin(rep.domains[i + 1], deltas[i + 1],
                                   rep.domains[i], deltas[i]);
        rep.eps.push_back(std::max(a, b));
    }
    return rep;
}

}  // namespace chipfire
