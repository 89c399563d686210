#pragma once

// Cross-model smash-sum experiments: multiple point sources, quadrature
// identities, the two-disk quartic boundary, associativity, and
// multi-resolution convergence.

#include "chipfire/grid.hpp"

namespace chipfire {

enum class SmashModel { Divisible, Rotor, Idla };

struct MultiSourceSpec {
    std::vector<std::vector<double>> centers;  // real coordinates x_i
    std::vector<double> volumes;               // lambda_i > 0
    double delta = 1.0;

    int dim() const;
    void validate() const;
};

/// Domain grown from floor(delta^-d * lambda_i) units of mass/particles at
/// the lattice point nearest x_i / delta, under the chosen dynamics.
DomainSet multi_source_domain(const MultiSourceSpec& spec, SmashModel model,
                              std::uint64_t seed = 0);

/// |delta^d * sum_{x in domain} h(delta x) - sum_i lambda_i h(x_i)| for a
/// discrete harmonic polynomial h named "1", "x<i>", "x<i>x<j>" (i != j), or
/// "x1^2-x2^2".
double quadrature_residual(const DomainSet& domain, const MultiSourceSpec& spec,
                           const std::string& h);

/// Divisible smash sum of two domains (sigma = 1_A + 1_B stabilized).
DomainSet divisible_smash(const DomainSet& A, const DomainSet& B);

/// Two unit-weight disks of radius r centered at (+-1, 0), spacing delta,
/// divisible dynamics.
DomainSet two_disk_domain(double r, double delta);

struct QuarticStats {
    double max_residual = 0.0;     // max |P| / |grad P| over boundary cells
    double median_residual = 0.0;  // median of the same
    double on_axis_crossing = 0.0;  // largest boundary |x1| on the x1-axis,
                                    // in real units
};

/// P(x) = (x1^2+x2^2)^2 - 2 r^2 (x1^2+x2^2) - 2 (x1^2-x2^2) evaluated at the
/// boundary cells of a two-disk smash domain at spacing delta.
QuarticStats quartic_residual(const DomainSet& domain, double r, double delta);

/// Divisible model: symmetric difference of the two parenthesizations is at
/// most the boundary-cell count.  Rotor model: cardinalities agree exactly.
bool associativity_check(const DomainSet& A, const DomainSet& B,
                         const DomainSet& C, SmashModel model);

struct ConvergenceReport {
    std::vector<double> deltas;
    std::vector<DomainSet> domains;
    // eps[i]: smallest two-sided inclusion margin (real units) between the
    // domains at deltas[i] and deltas[i+1]
    std::vector<double> eps;
};

ConvergenceReport resolution_convergence(const DensitySpec& spec,
                                         const std::vector<double>& deltas);

}  // namespace chipfire
