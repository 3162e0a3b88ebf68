#pragma once

// Real-axis root scan and argument-principle counting for the spectral
// function.  h is generically a perfect square along the real axis, so real
// roots are located as local minima of |h| rather than sign changes; winding
// integrals of h'/h supply the multiplicities and the cross-check count.

#include <string>
#include <utility>
#include <vector>

#include "cylcas/spectral.hpp"

namespace cylcas {

struct Root {
    double k = 0.0;
    int multiplicity = 0;
    double residual = 0.0;     // |h(k)| after the final polish
    std::string method;        // "newton", "muller", or "unpolished"
};

struct RootScanReport {
    std::vector<Root> roots;   // ascending in k
    double k_min = 0.0;
    double k_max = 0.0;
    int grid_points = 0;
    int winding_total = 0;     // argument-principle count over the scan strip
    std::array<double, 4> strip{};  // rectangle actually integrated: re_lo, re_hi, im_lo, im_hi
    bool consistent = false;   // winding_total equals the multiplicity sum in the strip
};

struct ScanOptions {
    double k_min = 1e-6;             // k = 0 is a root for every U; keep off the origin
    int samples_per_interval = 40;   // grid points per pi/L
    double candidate_rel_threshold = 1e-2;  // |h| below this times the local scale
    double mult_radius_cap = 0.05;   // times 1/L
    int muller_budget = 80;
    int newton_budget = 40;
};

struct ContourTooCloseToZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonIntegerWinding : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the argument-principle count disagrees with the located roots;
// carries the full report for inspection.
struct CountMismatch : std::runtime_error {
    RootScanReport report;
    CountMismatch(std::string msg, RootScanReport r)
        : std::runtime_error(std::move(msg)), report(std::move(r)) {}
};

// Scan (k_min, k_max] for real roots, polish them to full precision with a
// multiplicity-aware final iteration, and cross-check the total against a
// winding integral over the strip |Im k| <= 0.5/L.  Throws CountMismatch when
// the cross-check fails.
RootScanReport scan_roots(const SpectralContext& ctx, double k_max, const ScanOptions& opt = {});

// Number of zeros (with multiplicity) of h inside a rectangle, by the argument
// principle with adaptive trapezoid refinement of h'/h along the edges.  Edges
// that pass too close to a zero are nudged by up to 1e-3; the rectangle
// actually used is reported.
struct RectCount {
    int count = 0;
    std::array<double, 4> rect_used{};  // re_lo, re_hi, im_lo, im_hi
};
RectCount count_in_rect(const SpectralContext& ctx, std::pair<double, double> re_range,
                        std::pair<double, double> im_range);

// Winding of h around a circle |z - k| = radius; center must be the in-disc
// minimum of |h| (checked post hoc).
int multiplicity_at(const SpectralContext& ctx, double k, double radius);

}  // namespace cylcas
