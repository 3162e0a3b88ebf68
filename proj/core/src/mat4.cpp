#include "cylcas/mat4.hpp"

#include <algorithm>
#include <cmath>

namespace cylcas {

CMat4 CMat4::identity() {
    CMat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
}

CMat4 CMat4::diag(Complex a, Complex b, Complex c, Complex d) {
    CMat4 m;
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    m(3, 3) = d;
    return m;
}

CMat4 CMat4::adjoint() const {
    CMat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
}

CMat4 CMat4::transpose() const {
    CMat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = (*this)(c, r);
    return m;
}

Complex CMat4::trace() const {
    return e_[0] + e_[5] + e_[10] + e_[15];
}

double CMat4::max_abs() const {
    double m = 0.0;
    for (const auto& z : e_) m = std::max(m, std::abs(z));
    return m;
}

bool CMat4::all_finite() const {
    for (const auto& z : e_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

CMat4 CMat4::operator+(const CMat4& o) const {
    CMat4 m;
    for (std::size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] + o.e_[i];
    return m;
}

CMat4 CMat4::operator-(const CMat4& o) const {
    CMat4 m;
    for (std::size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] - o.e_[i];
    return m;
}

CMat4 CMat4::operator*(const CMat4& o) const {
    CMat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            Complex s = 0.0;
            for (int k = 0; k < 4; ++k) s += (*this)(r, k) * o(k, c);
            m(r, c) = s;
        }
    return m;
}

CMat4 CMat4::operator*(Complex s) const {
    CMat4 m;
    for (std::size_t i = 0; i < 16; ++i) m.e_[i] = e_[i] * s;
    return m;
}

Vec4 mat_vec(const CMat4& m, const Vec4& v) {
    Vec4 out{};
    for (int r = 0; r < 4; ++r) {
        Complex s = 0.0;
        for (int c = 0; c < 4; ++c) s += m(r, c) * v[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = s;
    }
    return out;
}

Complex dot(const Vec4& a, const Vec4& b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm(const Vec4& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

double unitarity_defect(const CMat4& u) {
    return (u.adjoint() * u - CMat4::identity()).max_abs();
}

Complex Quartic::eval(Complex z) const {
    Complex s = coeffs[4];
    for (int j = 3; j >= 0; --j) s = s * z + coeffs[static_cast<std::size_t>(j)];
    return s;
}

Complex Quartic::deriv(Complex z) const {
    Complex s = 4.0 * coeffs[4];
    for (int j = 3; j >= 1; --j) s = s * z + static_cast<double>(j) * coeffs[static_cast<std::size_t>(j)];
    return s;
}

namespace {

struct LU {
    std::array<Complex, 16> a;
    std::array<int, 4> piv;
    int swaps = 0;
    bool singular = false;
};

LU lu_factor(const CMat4& m) {
    LU f;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) f.a[static_cast<std::size_t>(4 * r + c)] = m(r, c);
    auto at = [&f](int r, int c) -> Complex& { return f.a[static_cast<std::size_t>(4 * r + c)]; };
    for (int col = 0; col < 4; ++col) {
        int p = col;
        double best = std::abs(at(col, col));
        for (int r = col + 1; r < 4; ++r) {
            double v = std::abs(at(r, col));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        f.piv[static_cast<std::size_t>(col)] = p;
        if (p != col) {
            for (int c = 0; c < 4; ++c) std::swap(at(col, c), at(p, c));
            ++f.swaps;
        }
        if (best == 0.0) {
            f.singular = true;
            continue;
        }
        for (int r = col + 1; r < 4; ++r) {
            Complex l = at(r, col) / at(col, col);
            at(r, col) = l;
            for (int c = col + 1; c < 4; ++c) at(r, c) -= l * at(col, c);
        }
    }
    return f;
}

Vec4 lu_backsub(const LU& f, Vec4 b) {
    auto at = [&f](int r, int c) { return f.a[static_cast<std::size_t>(4 * r + c)]; };
    for (int col = 0; col < 4; ++col)
        if (f.piv[static_cast<std::size_t>(col)] != col)
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(f.piv[static_cast<std::size_t>(col)])]);
    for (int r = 1; r < 4; ++r)
        for (int c = 0; c < r; ++c) b[static_cast<std::size_t>(r)] -= at(r, c) * b[static_cast<std::size_t>(c)];
    for (int r = 3; r >= 0; --r) {
        for (int c = r + 1; c < 4; ++c) b[static_cast<std::size_t>(r)] -= at(r, c) * b[static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(r)] /= at(r, r);
    }
    return b;
}

}  // namespace

Complex det4(const CMat4& m) {
    LU f = lu_factor(m);
    if (f.singular) return 0.0;
    Complex d = (f.swaps % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < 4; ++i) d *= f.a[static_cast<std::size_t>(5 * i)];
    return d;
}

Complex minor3(const CMat4& m, int del_row, int del_col) {
    std::array<Complex, 9> s;
    int idx = 0;
    for (int r = 0; r < 4; ++r) {
        if (r == del_row) continue;
        for (int c = 0; c < 4; ++c) {
            if (c == del_col) continue;
            s[static_cast<std::size_t>(idx++)] = m(r, c);
        }
    }
    return s[0] * (s[4] * s[8] - s[5] * s[7]) - s[1] * (s[3] * s[8] - s[5] * s[6]) +
           s[2] * (s[3] * s[7] - s[4] * s[6]);
}

CMat4 adjugate4(const CMat4& m) {
    CMat4 adj;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double sign = ((r + c) % 2 == 0) ? 1.0 : -1.0;
            adj(r, c) = sign * minor3(m, c, r);
        }
    return adj;
}

Quartic charpoly(const CMat4& m) {
    // det(lambda I - m) = lambda^4 + b1 lambda^3 + b2 lambda^2 + b3 lambda + b4
    CMat4 mk = m;
    Quartic p;
    p.coeffs[4] = 1.0;
    Complex b = -mk.trace();
    p.coeffs[3] = b;
    for (int j = 2; j <= 4; ++j) {
        mk = m * (mk + CMat4::identity() * b);
        b = -mk.trace() / static_cast<double>(j);
        p.coeffs[static_cast<std::size_t>(4 - j)] = b;
    }
    return p;
}

std::array<Complex, 4> quartic_roots(const Quartic& p, int max_iter) {
    if (std::abs(p.coeffs[4]) == 0.0)
        throw std::invalid_argument("quartic_roots: leading coefficient is zero");

    Quartic q;  // monic copy
    for (std::size_t j = 0; j < 5; ++j) q.coeffs[j] = p.coeffs[j] / p.coeffs[4];
    q.coeffs[4] = 1.0;

    double bound = 0.0;
    for (std::size_t j = 0; j < 4; ++j) bound = std::max(bound, std::abs(q.coeffs[j]));
    double radius = 0.9 * (1.0 + bound);

    std::array<Complex, 4> z;
    for (int i = 0; i < 4; ++i) {
        double ang = 0.35 + 1.5707963267948966 * i;  // offset breaks symmetric stalls
        z[static_cast<std::size_t>(i)] = radius * Complex(std::cos(ang), std::sin(ang));
    }

    for (int it = 0; it < max_iter; ++it) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            Complex denom = 1.0;
            for (std::size_t j = 0; j < 4; ++j) {
                if (j == i) continue;
                Complex d = z[i] - z[j];
                if (std::abs(d) < 1e-300) d = Complex(1e-12, 1e-12);
                denom *= d;
            }
            Complex step = q.eval(z[i]) / denom;
            z[i] -= step;
            max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[i])));
        }
        if (max_step < 1e-14) break;
    }

    // Newton polish; keep a step only if it reduces the residual.
    for (std::size_t i = 0; i < 4; ++i) {
        for (int it = 0; it < 5; ++it) {
            Complex f = q.eval(z[i]);
            Complex df = q.deriv(z[i]);
            if (std::abs(df) < 1e-300) break;
            Complex cand = z[i] - f / df;
            if (std::abs(q.eval(cand)) < std::abs(f))
                z[i] = cand;
            else
                break;
        }
    }

    double scale = 1.0;
    for (std::size_t j = 0; j < 4; ++j) scale += std::abs(q.coeffs[j]);
    for (std::size_t i = 0; i < 4; ++i)
        if (!(std::abs(q.eval(z[i])) <= 1e-10 * scale))
            throw NonConvergence("quartic_roots: residual above tolerance after iteration budget");
    return z;
}

CMat4 unitarize(const CMat4& m) {
    std::array<Vec4, 4> q;
    for (int j = 0; j < 4; ++j) {
        Vec4 v;
        for (int r = 0; r < 4; ++r) v[static_cast<std::size_t>(r)] = m(r, j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                Complex c = dot(q[static_cast<std::size_t>(i)], v);
                for (std::size_t r = 0; r < 4; ++r) v[r] -= c * q[static_cast<std::size_t>(i)][r];
            }
        }
        double n = norm(v);
        if (n <= 1e-8) throw RankDeficient("unitarize: column norm below 1e-8 after orthogonalization");
        for (auto& x : v) x /= n;
        q[static_cast<std::size_t>(j)] = v;
    }
    CMat4 u;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) u(r, c) = q[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    return u;
}

Vec4 lu_solve(const CMat4& m, const Vec4& rhs) {
    LU f = lu_factor(m);
    if (f.singular) throw RankDeficient("lu_solve: singular matrix");
    double dmin = 1e300, dmax = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = std::abs(f.a[static_cast<std::size_t>(5 * i)]);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    if (dmin <= 1e-300 * dmax) throw RankDeficient("lu_solve: singular matrix");
    return lu_backsub(f, rhs);
}

CMat4 lu_solve(const CMat4& m, const CMat4& rhs) {
    LU f = lu_factor(m);
    if (f.singular) throw RankDeficient("lu_solve: singular matrix");
    CMat4 x;
    for (int c = 0; c < 4; ++c) {
        Vec4 b;
        for (int r = 0; r < 4; ++r) b[static_cast<std::size_t>(r)] = rhs(r, c);
        Vec4 s = lu_backsub(f, b);
        for (int r = 0; r < 4; ++r) x(r, c) = s[static_cast<std::size_t>(r)];
    }
    return x;
}

}  // namespace cylcas
