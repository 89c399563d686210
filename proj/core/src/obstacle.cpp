#include "chipfire/obstacle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chipfire {

namespace {

double sum_field(const ScalarField& f) {
    return std::accumulate(f.values.begin(), f.values.end(), 0.0);
}

int max_extent(const Box& b) {
    int L = 1;
    for (int a = 0; a < b.dim(); ++a) L = std::max(L, b.extent(a));
    return L;
}

}  // namespace

ObstacleSolution solve_obstacle(const ScalarField& sigma, const Box& box,
                                const ObstacleOptions& opts) {
    const int d = sigma.dim();
    if (box.dim() != d) throw std::invalid_argument("solve_obstacle: dim mismatch");
    if (box.size() > max_cells())
        throw box_overflow_error("solve_obstacle: box exceeds CHIPFIRE_MAX_CELLS");
    for (double v : sigma.values)
        if (v < 0) throw std::invalid_argument("solve_obstacle: negative density");

    const double total = sum_field(sigma);
    const double stop = opts.tol * (1.0 + total);
    double omega = opts.omega;
    if (omega <= 0.0) omega = 2.0 / (1.0 + std::sin(M_PI / max_extent(box)));

    const auto stride = box.strides();
    const std::int64_t N = box.size();
    std::vector<double> u(static_cast<std::size_t>(N), 0.0);
    std::vector<double> sig(u.size(), 0.0);
    for (std::int64_t i = 0; i < sigma.box.size(); ++i) {
        Point p = sigma.box.point_at(i);
        if (box.contains(p)) sig[box.index(p)] = sigma.values[i];
    }

    const double inv2d = 1.0 / (2 * d);
    std::int64_t sweeps = 0;
    int quiet = 0;
    while (quiet < 3) {
        double max_update = 0.0;
        for (int color = 0; color < 2; ++color) {
            Point p = box.lo;
            for (int a = 0; a < d; ++a) ++p[a];  // interior only
            while (true) {
                int parity = 0;
                for (int a = 0; a < d; ++a) parity += p[a];
                if ((parity & 1) == color) {
                    std::int64_t idx = box.index(p);
                    double avg = 0.0;
                    for (int a = 0; a < d; ++a)
                        avg += u[idx + stride[a]] + u[idx - stride[a]];
                    avg *= inv2d;
                    double cand = (1.0 - omega) * u[idx] +
                                  omega * (avg + sig[idx] - 1.0);
                    if (cand < 0.0) cand = 0.0;
                    double upd = std::abs(cand - u[idx]);
                    if (upd > max_update) max_update = upd;
                    u[idx] = cand;
                }
                int a = d - 1;
                while (a >= 0 && p[a] == box.hi[a] - 1) {
                    p[a] = box.lo[a] + 1;
                    --a;
                }
                if (a < 0) break;
                ++p[a];
            }
        }
        ++sweeps;
        quiet = max_update < stop ? quiet + 1 : 0;
        if (sweeps >= opts.max_sweeps)
            throw std::runtime_error(
                "solve_obstacle: no convergence, last update " +
                std::to_string(max_update));
    }

    // Collar check: the solution must vanish within 2 cells of the boundary.
    for (std::int64_t i = 0; i < N; ++i) {
        if (u[i] <= stop) continue;
        if (box.near_edge(box.point_at(i), 2))
            throw box_overflow_error("solve_obstacle: box too small (collar)");
    }

    ObstacleSolution sol;
    sol.sweeps = sweeps;
    sol.odometer = ScalarField(box);
    sol.odometer.values.assign(u.begin(), u.end());
    sol.domain = DomainSet(box);
    double residual = 0.0;
    Point p = box.lo;
    for (int a = 0; a < d; ++a) ++p[a];
    while (true) {
        std::int64_t idx = box.index(p);
        double avg = 0.0;
        for (int a = 0; a < d; ++a) avg += u[idx + stride[a]] + u[idx - stride[a]];
        double lap = avg * inv2d - u[idx];
        residual = std::max(residual,
                            std::abs(std::min(u[idx], (1.0 - sig[idx]) - lap)));
        if (u[idx] > opts.tol) sol.domain.insert(p);
        int a = d - 1;
        while (a >= 0 && p[a] == box.hi[a] - 1) {
            p[a] = box.lo[a] + 1;
            --a;
        }
        if (a < 0) break;
        ++p[a];
    }
    sol.residual = residual;
    return sol;
}

ObstacleSolution solve_obstacle(const ScalarField& sigma,
                                const ObstacleOptions& opts) {
    const int d = sigma.dim();
    double total = sum_field(sigma);
    double omega_d = d == 2 ? M_PI : (d == 3 ? 4.0 * M_PI / 3.0 : 2.0);
    int pad = static_cast<int>(
                  std::ceil(std::pow(std::max(total, 1.0) / omega_d, 1.0 / d))) +
              4;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Point lo = sigma.box.lo, hi = sigma.box.hi;
        for (int a = 0; a < d; ++a) {
            lo[a] -= pad;
            hi[a] += pad;
        }
        try {
            return solve_obstacle(sigma, Box(lo, hi), opts);
        } catch (const box_overflow_error&) {
            pad += pad / 2 + 2;
        }
    }
    throw box_overflow_error("solve_obstacle: collar never satisfied");
}

ScalarField harmonic_solve(const DomainSet& interior,
                           const ScalarField& boundary_values) {
    if (interior.count == 0) throw std::invalid_argument("harmonic_solve: empty");
    const int d = interior.dim();
    auto sites = interior.points_sorted();
    const auto n = static_cast<Eigen::Index>(sites.size());

    Point lo = interior.box.lo, hi = interior.box.hi;
    for (int a = 0; a < d; ++a) {
        --lo[a];
        ++hi[a];
    }
    Box out(lo, hi);
    Field<std::int64_t> id(out, -1);
    for (Eigen::Index i = 0; i < n; ++i) id.ref(sites[i]) = i;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, i) = 2.0 * d;
        for (const Point& q : neighbors(sites[i])) {
            std::int64_t j = id.at(q);
            if (j >= 0)
                A(i, j) -= 1.0;
            else
                b(i) += boundary_values.at(q);
        }
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);

    ScalarField result(out);
    for (Eigen::Index i = 0; i < n; ++i) result.ref(sites[i]) = x(i);
    for (Eigen::Index i = 0; i < n; ++i)
        for (const Point& q : neighbors(sites[i]))
            if (id.at(q) < 0) result.ref(q) = boundary_values.at(q);
    return result;
}

bool relax_ball_check(double m_factor, double r, int dim) {
    if (m_factor <= 1.0)
        throw std::invalid_argument("relax_ball_check: m_factor must exceed 1");
    DomainSet support = ball_domain(r, dim);
    ScalarField sigma(support.box);
    for (const Point& p : support.points_sorted()) sigma.ref(p) = m_factor;
    ObstacleOptions opts;
    auto sol = solve_obstacle(sigma, opts);

    double R = std::pow(m_factor, 1.0 / dim) * r;
    DomainSet result = sol.domain;
    for (const Point& p : support.points_sorted())
        if (!result.contains(p)) result.insert(p);
    DomainSet inner = ball_domain(std::max(R - 2.0, 0.0), dim);
    for (const Point& p : inner.points_sorted())
        if (!result.contains(p)) return false;
    for (const Point& p : result.points_sorted())
        if (euclidean_norm(p) >= R + 2.0) return false;
    return true;
}

}  // namespace chipfire
