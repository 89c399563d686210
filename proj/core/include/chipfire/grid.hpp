#pragma once

// Lattice geometry shared by all Z^d models: bounded boxes, dense scalar
// fields, domain sets (site bitmaps) and their shape metrics.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chipfire {

using Point = std::vector<int>;

struct box_overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct out_of_box_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Maximum number of cells a single field/domain may allocate.  Overridable
/// through the CHIPFIRE_MAX_CELLS environment variable.
std::int64_t max_cells();

/// Axis-aligned integer box, bounds inclusive.
struct Box {
    Point lo, hi;

    Box() = default;
    Box(Point lo_, Point hi_);

    /// Origin-centered cube [-half, half]^d.
    static Box centered(int dim, int half);

    int dim() const { return static_cast<int>(lo.size()); }
    std::int64_t size() const;
    int extent(int axis) const { return hi[axis] - lo[axis] + 1; }

    bool contains(const Point& p) const;
    /// True if p is in the box but within `margin` cells of a face.
    bool near_edge(const Point& p, int margin) const;

    std::int64_t index(const Point& p) const;
    Point point_at(std::int64_t idx) const;

    /// Strides for flat indexing (row-major, axis 0 slowest).
    std::vector<std::int64_t> strides() const;
};

/// Dense per-site values over a box; lookups outside return the background.
template <typename T>
struct Field {
    Box box;
    T background{};
    std::vector<T> values;

    Field() = default;
    explicit Field(Box b, T bg = T{}) : box(std::move(b)), background(bg) {
        auto n = box.size();
        if (n > max_cells())
            throw box_overflow_error("field exceeds CHIPFIRE_MAX_CELLS");
        values.assign(static_cast<std::size_t>(n), bg);
    }

    int dim() const { return box.dim(); }

    T at(const Point& p) const {
        return box.contains(p) ? values[box.index(p)] : background;
    }
    T& ref(const Point& p) {
        if (!box.contains(p)) throw out_of_box_error("point outside field box");
        return values[box.index(p)];
    }

    /// Re-home the field on a larger box, preserving contents.
    void grow_to(const Box& nb) {
        if (nb.dim() != box.dim()) throw std::invalid_argument("dim mismatch");
        Field<T> bigger(nb, background);
        Point p(box.dim());
        for (std::int64_t i = 0; i < box.size(); ++i) {
            p = box.point_at(i);
            bigger.values[nb.index(p)] = values[i];
        }
        *this = std::move(bigger);
    }
};

using ScalarField = Field<double>;
using IntField = Field<std::int64_t>;

/// Finite site set stored as a membership bitmap over a box.
struct DomainSet {
    Box box;
    std::vector<std::uint8_t> bits;
    std::int64_t count = 0;

    DomainSet() = default;
    explicit DomainSet(Box b);

    int dim() const { return box.dim(); }

    bool contains(const Point& p) const {
        return box.contains(p) && bits[box.index(p)] != 0;
    }
    void insert(const Point& p);
    void erase(const Point& p);

    std::vector<Point> points_sorted() const;  // lexicographic

    bool includes(const DomainSet& other) const;
    std::int64_t symmetric_difference_count(const DomainSet& other) const;

    /// Member sites adjacent to a non-member.
    std::vector<Point> boundary_cells() const;
};

struct ShapeMetrics {
    double inradius = 0.0;           // min |x| over complement sites
    double outradius = 0.0;          // max |x| over member sites
    bool outradius_defined = false;  // false for the empty set
    std::int64_t volume = 0;
    std::vector<double> centroid;
};

/// The 2d lattice neighbors of p in the fixed order (+e1, -e1, +e2, -e2, ...).
/// Requires p to sit at least one cell inside `box`.
std::vector<Point> neighbors(const Point& p, const Box& box);

/// Unrestricted neighbor list (no box check).
std::vector<Point> neighbors(const Point& p);

/// B_r = { x in Z^d : |x| < r } with |.| the Euclidean norm.
DomainSet ball_domain(double r, int dim);

ShapeMetrics shape_metrics(const DomainSet& D);

double euclidean_norm(const Point& p);

/// Continuous density: a finite union of balls/boxes with constant weights.
/// The value at a point is the sum of the weights of the shapes containing it.
struct DensitySpec {
    struct Shape {
        enum Kind { Ball, Cuboid } kind = Ball;
        std::vector<double> center;  // Ball
        double radius = 0.0;         // Ball
        std::vector<double> lo, hi;  // Cuboid
        double weight = 1.0;
    };
    std::vector<Shape> shapes;

    int dim() const;
    double value_at(const std::vector<double>& x) const;
    /// Real-space bounding box of the support; throws if empty/unbounded.
    void support_bounds(std::vector<double>& lo, std::vector<double>& hi) const;

    static DensitySpec disk(std::vector<double> center, double radius,
                            double weight = 1.0);
    DensitySpec& add_disk(std::vector<double> center, double radius,
                          double weight = 1.0);
    DensitySpec& add_box(std::vector<double> lo, std::vector<double> hi,
                         double weight = 1.0);
};

/// sigma_n(x) = round( delta^-d * integral of sigma over the cell x^box ),
/// ties to even.  Lattice point x represents the real point delta*x.
ScalarField discretize_density(const DensitySpec& spec, double delta);

/// Canonical JSON domain dump: {"dim": d, "points": [[...], ...]} with the
/// point list sorted lexicographically.
std::string domain_to_json(const DomainSet& D);
DomainSet domain_from_json(const std::string& text);

}  // namespace chipfire
