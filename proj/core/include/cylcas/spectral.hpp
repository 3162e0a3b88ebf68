#pragma once

// The holomorphic spectral function h_U(k; L) = det[M-(k) - U M+(k)] whose
// real nonnegative zeros (with multiplicity) are the allowed transverse
// momenta between the plates.  h is entire in k, even in k, and vanishes at
// k = 0 for every boundary condition (M± drop to rank 2 there).

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cylcas/boundary.hpp"
#include "cylcas/mat4.hpp"

namespace cylcas {

// Boundary condition plus plate separation; the immutable input to every
// spectral-side computation.
struct SpectralContext {
    BoundaryCondition bc;
    double L;

    SpectralContext(BoundaryCondition b, double length);
};

struct MPair {
    CMat4 m_minus, m_plus;
};

// Boundary-data matrices of the plane-wave solutions at momentum k.
MPair m_matrices(Complex k, double L);

// det M- and det M+: D± = -4 [2k cos(kL) ∓ (k^2-1) sin(kL)]^2.
struct DPair {
    Complex d_minus, d_plus;
};
DPair d_pm(Complex k, double L);

// Square roots of D± on the fixed branch sqrt(D±) = 2i [2k cos(kL) ∓ (k^2-1) sin(kL)];
// the diagonal-family factorization is exact on this branch.
DPair sqrt_d_pm(Complex k, double L);

// h evaluated as one 4x4 determinant.
Complex h_direct(const SpectralContext& ctx, Complex k);
Complex h_direct_matrix(const CMat4& u, Complex k, double L);

// det[M- - eps U M+]: polynomial of degree 4 in eps; equals h_direct at eps = 1
// by construction (same expression, eps multiplied in).
Complex h_eps(const SpectralContext& ctx, Complex k, double eps);
Complex h_eps_matrix(const CMat4& u, Complex k, double L, double eps);

// Coefficients c_j of h(eps) = sum_j c_j eps^j.
struct CoeffValues {
    std::array<Complex, 5> c{};
};

// Exact-degree fit through h_eps at the five nodes {0.5, 0.75, 1.0, 1.25, 1.5}
// (Newton divided differences expanded to the monomial basis).  Reference
// values: the closed-form expressions below are checked against these.
CoeffValues coeffs_interp(const SpectralContext& ctx, Complex k);
CoeffValues coeffs_interp_matrix(const CMat4& u, Complex k, double L);

// Closed-form coefficient expressions in the matrix entries of U.  c2 is known
// to disagree with the interpolated reference in three terms; see
// coeff_diagnostics for the term-level report.
CoeffValues coeffs_closed_form(const SpectralContext& ctx, Complex k);
CoeffValues coeffs_closed_form_matrix(const CMat4& u, Complex k, double L);

// minors(u)[i][j] = det of u with row 3-i and column 3-j deleted (0-based),
// i.e. reversed-index deletion, no cofactor sign.
CMat4 minors_matrix(const CMat4& u);

// Closed-form spectral function for a named family at the given parameters.
Complex closed_form(const std::string& family, const std::map<std::string, double>& params,
                    Complex k, double L);

// d h / d k by Richardson-extrapolated central differences,
// step h = max(1e-5, 1e-5 |k|); error O(step^4).
Complex dh_dk(const SpectralContext& ctx, Complex k);

// Term-level comparison of one closed-form coefficient against the
// interpolated reference, probed on single-entry, pair and triple matrices so
// a mismatch is localized to a monomial in the entries of U.
struct CoeffDiagnostic {
    int coeff_index = 0;          // j in c_j
    bool matches = true;          // all probed terms within tolerance
    std::string first_failing_term;   // e.g. "U11*U44"; empty when matches
    std::vector<std::string> failing_terms;
    double max_rel_deviation = 0.0;
};

// Diagnostics for c0..c4 at the probe point (k, L).  Probe matrices are not
// unitary; both coefficient paths are polynomial in the entries of U, so
// term-level agreement on probes implies agreement for all U.
std::array<CoeffDiagnostic, 5> coeff_diagnostics(Complex k, double L);

struct NotARoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Boundary-data coefficients of the mode at a real root k: unit-norm kernel
// vector of N(k) = M-(k) - U M+(k), from the dominant adjugate column with an
// inverse-iteration fallback.  residual = |N phi|.
struct ModeCoefficients {
    Vec4 phi{};
    double residual = 0.0;
};
ModeCoefficients mode_vector(const SpectralContext& ctx, double k);

}  // namespace cylcas
