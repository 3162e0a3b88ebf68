#pragma once

// Heat-kernel-regularized vacuum energy on the finite cylinder: a sum of
// mult * omega * exp(-eps * omega) over transverse roots k and circumference
// modes n, with certified truncation tails.  The divergence structure in eps
// is probed by a least-squares fit; extracting the eps-independent part that
// way is a heuristic, and results carry that label.

#include <optional>
#include <span>
#include <vector>

#include "cylcas/roots.hpp"

namespace cylcas {

struct EnergyParams {
    double L = 1.0;            // plate separation; must match the context it is used with
    double a = 1.0;            // cylinder circumference
    double mass = 0.0;
    double heat_epsilon = 0.5; // regulator, > 0
    double tail_tol = 1e-10;   // certified bound on the dropped tail
    bool include_n0 = true;    // count the n = 0 circumference sector
    bool include_k0 = false;   // count the k = 0 transverse mode (half the origin winding)
};

struct InconsistentBoundaryCondition : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TailBoundUnachievable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditionedFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double omega(double k, int n, const EnergyParams& p);

struct EnergyResult {
    double value = 0.0;
    double tail_bound = 0.0;   // truncation bound actually achieved (<= tail_tol)
    long modes_used = 0;       // (root, n) pairs summed, multiplicity-weighted
    int n_max_used = 0;
    int k_count_used = 0;      // distinct transverse roots summed
    double k_max_used = 0.0;
    RootScanReport roots;
    std::vector<std::string> notes;
};

// Truncated double sum with tail bounds from the root-spacing majorant
// (spacing pi/(2L), multiplicity at most 2 per station, omega >= (k+c)/sqrt(2))
// in the monotone regime of x exp(-eps x).  Throws InconsistentBoundaryCondition
// for an inadmissible boundary condition and TailBoundUnachievable when no
// cutoff within the caps certifies tail_tol.
EnergyResult regularized_energy(const SpectralContext& ctx, const EnergyParams& p);

struct CurvePoint {
    double L = 0.0;
    std::optional<EnergyResult> result;
    std::string error;  // set when this point failed
};
std::vector<CurvePoint> energy_curve(const BoundaryCondition& bc, const EnergyParams& p,
                                     std::span<const double> L_grid);

// Central difference -(E(L+dL) - E(L-dL)) / (2 dL) at fixed regulator.
double force(const BoundaryCondition& bc, const EnergyParams& p, double L, double dL);

// Least-squares divergence-structure fit on {eps^-3, eps^-2, eps^-1, 1, eps}.
// The constant term is only a heuristic reading of the finite part.
struct FinitePartReport {
    double eps3 = 0.0;       // coefficient of eps^-3
    double eps2 = 0.0;       // coefficient of eps^-2
    double eps1 = 0.0;       // coefficient of eps^-1
    double finite = 0.0;     // constant term
    double linear = 0.0;     // coefficient of eps
    double residual_rms = 0.0;
    bool residual_flagged = false;  // rms above 1e-8 * max(1, |E|): basis likely incomplete
    double condition = 0.0;         // pivot-ratio estimate of the normal equations
    bool heuristic = true;
};

// Fit core, exposed so synthetic data can exercise it directly.
FinitePartReport fit_finite_part(std::span<const double> eps, std::span<const double> values);

// Evaluate the energy on eps_grid (>= 6 strictly decreasing positive nodes)
// and fit the divergence structure.
FinitePartReport finite_part(const BoundaryCondition& bc, const EnergyParams& p, double L,
                             std::span<const double> eps_grid);

}  // namespace cylcas
