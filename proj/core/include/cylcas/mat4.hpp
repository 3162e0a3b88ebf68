#pragma once

// Fixed-size complex linear algebra for 4x4 problems: determinants, adjugates,
// characteristic polynomials, simultaneous quartic root iteration and
// Gram-Schmidt unitarization.  Self-contained; no external numerics library.

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace cylcas {

using Complex = std::complex<double>;
using Vec4 = std::array<Complex, 4>;

class CMat4 {
public:
    CMat4() = default;
    explicit CMat4(const std::array<Complex, 16>& entries) : e_(entries) {}

    Complex& operator()(int r, int c) { return e_[static_cast<std::size_t>(4 * r + c)]; }
    const Complex& operator()(int r, int c) const { return e_[static_cast<std::size_t>(4 * r + c)]; }

    static CMat4 identity();
    static CMat4 zero() { return CMat4{}; }
    static CMat4 diag(Complex a, Complex b, Complex c, Complex d);

    CMat4 adjoint() const;    // conjugate transpose
    CMat4 transpose() const;
    Complex trace() const;
    double max_abs() const;   // max entrywise modulus
    bool all_finite() const;

    CMat4 operator+(const CMat4& o) const;
    CMat4 operator-(const CMat4& o) const;
    CMat4 operator*(const CMat4& o) const;
    CMat4 operator*(Complex s) const;

private:
    std::array<Complex, 16> e_{};
};

inline CMat4 operator*(Complex s, const CMat4& m) { return m * s; }

Vec4 mat_vec(const CMat4& m, const Vec4& v);
Complex dot(const Vec4& a, const Vec4& b);   // conjugate-linear in a
double norm(const Vec4& v);

// max entry of |u^H u - I|
double unitarity_defect(const CMat4& u);

// Monic-normalizable quartic; coeffs[j] multiplies lambda^j, coeffs[4] != 0.
struct Quartic {
    std::array<Complex, 5> coeffs{};
    Complex eval(Complex z) const;
    Complex deriv(Complex z) const;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// LU with partial pivoting by modulus.
Complex det4(const CMat4& m);

// adj(m) with m * adj(m) = det4(m) * I.
CMat4 adjugate4(const CMat4& m);

// Unsigned 3x3 subdeterminant of m after deleting del_row and del_col (0-based).
Complex minor3(const CMat4& m, int del_row, int del_col);

// Coefficients of det(lambda I - m) via the Faddeev-LeVerrier recurrence.
Quartic charpoly(const CMat4& m);

// All four roots with multiplicity: Durand-Kerner sweeps from perturbed-circle
// starts, then Newton polish.  Throws NonConvergence past the iteration budget.
std::array<Complex, 4> quartic_roots(const Quartic& p, int max_iter = 200);

// Modified Gram-Schmidt orthonormalization of columns (one re-orthogonalization
// pass).  Throws RankDeficient when a column norm drops below 1e-8.
CMat4 unitarize(const CMat4& m);

// Solve m x = rhs via the same pivoted LU; throws RankDeficient on a
// numerically singular pivot.
Vec4 lu_solve(const CMat4& m, const Vec4& rhs);
CMat4 lu_solve(const CMat4& m, const CMat4& rhs);

}  // namespace cylcas
