#include "cylcas/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cylcas {

namespace {

const std::array<double, 5> kEpsNodes = {0.5, 0.75, 1.0, 1.25, 1.5};

Complex phase_of(double t) { return {std::cos(t), std::sin(t)}; }

}  // namespace

SpectralContext::SpectralContext(BoundaryCondition b, double length)
    : bc(std::move(b)), L(length) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("SpectralContext: plate separation must be positive and finite");
}

MPair m_matrices(Complex k, double L) {
    Complex u = 1.0 + Complex(0.0, 1.0) * k;  // 1 + ik
    Complex v = 1.0 - Complex(0.0, 1.0) * k;  // 1 - ik
    Complex e = std::exp(Complex(0.0, 1.0) * k * L);
    Complex ei = std::exp(-Complex(0.0, 1.0) * k * L);

    MPair m;
    m.m_plus(0, 0) = v;
    m.m_plus(0, 2) = u;
    m.m_plus(1, 1) = v;
    m.m_plus(1, 3) = u;
    m.m_plus(2, 0) = e * u;
    m.m_plus(2, 2) = ei * v;
    m.m_plus(3, 1) = e * u;
    m.m_plus(3, 3) = ei * v;

    m.m_minus(0, 0) = u;
    m.m_minus(0, 2) = v;
    m.m_minus(1, 1) = u;
    m.m_minus(1, 3) = v;
    m.m_minus(2, 0) = e * v;
    m.m_minus(2, 2) = ei * u;
    m.m_minus(3, 1) = e * v;
    m.m_minus(3, 3) = ei * u;
    return m;
}

DPair d_pm(Complex k, double L) {
    Complex s = std::sin(k * L), c = std::cos(k * L);
    Complex gm = 2.0 * k * c + (k * k - 1.0) * s;
    Complex gp = 2.0 * k * c - (k * k - 1.0) * s;
    return {-4.0 * gm * gm, -4.0 * gp * gp};
}

DPair sqrt_d_pm(Complex k, double L) {
    Complex s = std::sin(k * L), c = std::cos(k * L);
    Complex two_i(0.0, 2.0);
    return {two_i * (2.0 * k * c + (k * k - 1.0) * s), two_i * (2.0 * k * c - (k * k - 1.0) * s)};
}

Complex h_eps_matrix(const CMat4& u, Complex k, double L, double eps) {
    MPair m = m_matrices(k, L);
    return det4(m.m_minus - (u * m.m_plus) * Complex(eps));
}

Complex h_direct_matrix(const CMat4& u, Complex k, double L) {
    return h_eps_matrix(u, k, L, 1.0);
}

Complex h_direct(const SpectralContext& ctx, Complex k) {
    return h_direct_matrix(ctx.bc.matrix(), k, ctx.L);
}

Complex h_eps(const SpectralContext& ctx, Complex k, double eps) {
    return h_eps_matrix(ctx.bc.matrix(), k, ctx.L, eps);
}

CoeffValues coeffs_interp_matrix(const CMat4& u, Complex k, double L) {
    // Newton divided differences through the five nodes, expanded to monomials.
    std::array<Complex, 5> dd;
    for (std::size_t i = 0; i < 5; ++i) dd[i] = h_eps_matrix(u, k, L, kEpsNodes[i]);
    for (std::size_t lvl = 1; lvl < 5; ++lvl)
        for (std::size_t j = 4; j >= lvl; --j)
            dd[j] = (dd[j] - dd[j - 1]) / (kEpsNodes[j] - kEpsNodes[j - lvl]);

    CoeffValues out;
    std::array<Complex, 5> cur{};
    cur[0] = dd[4];
    int deg = 0;
    for (int j = 3; j >= 0; --j) {
        std::array<Complex, 5> next{};
        for (int t = 0; t <= deg; ++t) {
            next[static_cast<std::size_t>(t + 1)] += cur[static_cast<std::size_t>(t)];
            next[static_cast<std::size_t>(t)] -= kEpsNodes[static_cast<std::size_t>(j)] * cur[static_cast<std::size_t>(t)];
        }
        next[0] += dd[static_cast<std::size_t>(j)];
        cur = next;
        ++deg;
    }
    out.c = cur;
    return out;
}

CoeffValues coeffs_interp(const SpectralContext& ctx, Complex k) {
    return coeffs_interp_matrix(ctx.bc.matrix(), k, ctx.L);
}

CMat4 minors_matrix(const CMat4& u) {
    CMat4 a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = minor3(u, 3 - i, 3 - j);
    return a;
}

CoeffValues coeffs_closed_form_matrix(const CMat4& u, Complex k, double L) {
    Complex s = std::sin(k * L), c = std::cos(k * L);
    Complex k2 = k * k;
    Complex gm = 2.0 * k * c + (k2 - 1.0) * s;
    Complex gp = 2.0 * k * c - (k2 - 1.0) * s;

    CoeffValues out;
    out.c[0] = -4.0 * gm * gm;
    out.c[4] = det4(u) * (-4.0) * gp * gp;

    out.c[1] = gm * (-4.0 * (k2 + 1.0) * u.trace() * s +
                     8.0 * k * (u(0, 2) + u(2, 0) + u(1, 3) + u(3, 1)));

    CMat4 a = minors_matrix(u);
    out.c[3] = gp * (4.0 * (k2 + 1.0) * s * a.trace() +
                     8.0 * k * (a(0, 2) + a(2, 0) + a(1, 3) + a(3, 1)));

    // Second-order coefficient, kept exactly as the closed-form source states
    // it; coeff_diagnostics documents where it deviates from the interpolated
    // reference.
    auto U = [&u](int i, int j) { return u(i - 1, j - 1); };
    Complex s2 = s * s;
    Complex q = (k2 + 1.0) * (k2 + 1.0);
    out.c[2] =
        16.0 * k2 *
            (U(1, 4) * U(2, 3) - U(1, 3) * U(2, 4) - U(2, 4) * U(3, 1) + U(2, 1) * U(3, 4) +
             U(3, 2) * U(4, 1) + U(1, 3) * U(4, 2) - U(3, 1) * U(4, 2) + U(1, 2) * U(4, 3)) +
        4.0 * q * s2 *
            (U(1, 2) * U(2, 1) - U(1, 1) * U(2, 2) + U(2, 3) * U(3, 2) - U(2, 2) * U(3, 3) +
             U(1, 4) * U(4, 1) + U(3, 4) * U(4, 3) + U(1, 1) * U(4, 4) - U(3, 3) * U(4, 4)) +
        (16.0 * k2 - 4.0 * q * s2) *
            (U(1, 1) * U(3, 3) - U(1, 3) * U(3, 1) + U(2, 2) * U(4, 4) - U(2, 4) * U(4, 2)) -
        8.0 * k * (k2 + 1.0) * s *
            (U(1, 2) * U(2, 3) + U(3, 4) * U(2, 3) - U(1, 1) * U(2, 4) - U(2, 2) * U(3, 1) +
             U(2, 1) * U(3, 2) - U(2, 4) * U(3, 3) + U(1, 2) * U(4, 1) + U(3, 4) * U(4, 1) -
             U(1, 1) * U(4, 2) - U(3, 3) * U(4, 2) + U(3, 2) * U(4, 3) + U(1, 4) * U(2, 1) +
             U(1, 4) * U(4, 3) - U(3, 1) * U(4, 4) - U(1, 3) * U(2, 2) + U(1, 3) * U(4, 4));
    return out;
}

CoeffValues coeffs_closed_form(const SpectralContext& ctx, Complex k) {
    return coeffs_closed_form_matrix(ctx.bc.matrix(), k, ctx.L);
}

Complex closed_form(const std::string& family, const std::map<std::string, double>& params,
                    Complex k, double L) {
    const PresetInfo* info = nullptr;
    for (const auto& p : preset_catalogue())
        if (p.name == family) {
            info = &p;
            break;
        }
    if (!info) throw UnknownPreset("unknown closed-form family: " + family);
    for (const auto& req : info->params)
        if (!params.count(req))
            throw std::invalid_argument("closed_form " + family + ": missing parameter " + req);
    for (const auto& [key, val] : params)
        if (std::find(info->params.begin(), info->params.end(), key) == info->params.end())
            throw std::invalid_argument("closed_form " + family + ": unexpected parameter " + key);

    Complex s = std::sin(k * L), c = std::cos(k * L);
    Complex k2 = k * k;
    Complex s2 = s * s;
    auto get = [&params](const char* key) { return params.at(key); };

    if (family == "dirichlet") return -64.0 * s2;
    if (family == "neumann") return -64.0 * k2 * k2 * s2;
    if (family == "mixed_nd") return -64.0 * k2 * c * c;
    if (family == "diagonal") {
        DPair rd = sqrt_d_pm(k, L);
        auto p = [&](Complex x, Complex y) {
            return Complex(0.0, 2.0) * (k2 + 1.0) * s * (x + y) - rd.d_plus * x * y + rd.d_minus;
        };
        Complex l1 = phase_of(get("theta1")), l2 = phase_of(get("theta2"));
        Complex l3 = phase_of(get("theta3")), l4 = phase_of(get("theta4"));
        return p(l1, l3) * p(l2, l4);
    }
    if (family == "antidiagonal") {
        DPair d = d_pm(k, L);
        Complex l1 = phase_of(get("theta1")), l2 = phase_of(get("theta2"));
        Complex l3 = phase_of(get("theta3")), l4 = phase_of(get("theta4"));
        return d.d_minus + d.d_plus * l1 * l2 * l3 * l4 +
               4.0 * (k2 + 1.0) * (k2 + 1.0) * s2 * (l2 * l3 + l1 * l4) +
               16.0 * k2 * (l1 * l2 + l3 * l4);
    }
    if (family == "periodic" || family == "antiperiodic") return 64.0 * k2 * s2;
    if (family == "periodic_antiperiodic")
        return -16.0 * (k2 - 1.0) * (k2 - 1.0) * s2;

    double angle = 0.0;  // pseudo_periodic, two_flux, quasi_periodic
    if (family == "two_flux")
        angle = get("alpha") + get("beta");
    else
        angle = 2.0 * get("alpha");
    Complex q = (1.0 + k2) * (1.0 + k2);
    return 8.0 * (-1.0 + 6.0 * k2 - k2 * k2 + q * std::cos(angle)) * s2;
}

Complex dh_dk(const SpectralContext& ctx, Complex k) {
    double step = std::max(1e-5, 1e-5 * std::abs(k));
    auto central = [&](double hs) {
        return (h_direct(ctx, k + Complex(hs)) - h_direct(ctx, k - Complex(hs))) / (2.0 * hs);
    };
    Complex d1 = central(step);
    Complex d2 = central(step / 2.0);
    return (4.0 * d2 - d1) / 3.0;  // one Richardson step: O(step^4)
}

namespace {

std::string term_name(std::span<const std::pair<int, int>> entries) {
    std::string s;
    for (const auto& [i, j] : entries) {
        if (!s.empty()) s += "*";
        s += "U" + std::to_string(i + 1) + std::to_string(j + 1);
    }
    return s.empty() ? std::string("1") : s;
}

}  // namespace

std::array<CoeffDiagnostic, 5> coeff_diagnostics(Complex k, double L) {
    std::array<CoeffDiagnostic, 5> out;
    for (int j = 0; j < 5; ++j) out[static_cast<std::size_t>(j)].coeff_index = j;

    DPair d = d_pm(k, L);
    double floor_abs = 1e-9 * (1.0 + std::abs(d.d_minus) + std::abs(d.d_plus));

    // On a probe matrix with ones at `entries` (distinct rows and columns),
    // the eps^j coefficient of h(eps) is exactly the weight of the product of
    // those entries, so closed-vs-interp disagreement pins down one monomial.
    auto probe = [&](int coeff, std::span<const std::pair<int, int>> entries) {
        CMat4 u;
        for (const auto& [r, c] : entries) u(r, c) = 1.0;
        Complex a = coeffs_closed_form_matrix(u, k, L).c[static_cast<std::size_t>(coeff)];
        Complex b = coeffs_interp_matrix(u, k, L).c[static_cast<std::size_t>(coeff)];
        double dev = std::abs(a - b);
        CoeffDiagnostic& diag = out[static_cast<std::size_t>(coeff)];
        double rel = dev / std::max({std::abs(a), std::abs(b), floor_abs});
        diag.max_rel_deviation = std::max(diag.max_rel_deviation, rel);
        if (dev > floor_abs && rel > 1e-8) {
            diag.matches = false;
            std::string name = term_name(entries);
            if (diag.first_failing_term.empty()) diag.first_failing_term = name;
            diag.failing_terms.push_back(name);
        }
    };

    // c0: no matrix dependence.
    probe(0, {});

    // c1: one entry at a time.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::array<std::pair<int, int>, 1> e = {{{i, j}}};
            probe(1, e);
        }

    // c2: pairs with distinct rows and columns, lexicographic order.
    for (int i1 = 0; i1 < 4; ++i1)
        for (int j1 = 0; j1 < 4; ++j1)
            for (int i2 = i1 + 1; i2 < 4; ++i2)
                for (int j2 = 0; j2 < 4; ++j2) {
                    if (j2 == j1) continue;
                    std::array<std::pair<int, int>, 2> e = {{{i1, j1}, {i2, j2}}};
                    probe(2, e);
                }

    // c3: triples with pairwise-distinct rows and columns.
    for (int skip = 3; skip >= 0; --skip) {
        std::array<int, 3> rows{};
        int t = 0;
        for (int r = 0; r < 4; ++r)
            if (r != skip) rows[static_cast<std::size_t>(t++)] = r;
        for (int j1 = 0; j1 < 4; ++j1)
            for (int j2 = 0; j2 < 4; ++j2)
                for (int j3 = 0; j3 < 4; ++j3) {
                    if (j1 == j2 || j1 == j3 || j2 == j3) continue;
                    std::array<std::pair<int, int>, 3> e = {
                        {{rows[0], j1}, {rows[1], j2}, {rows[2], j3}}};
                    probe(3, e);
                }
    }

    // c4: permutation matrices.
    std::array<int, 4> perm = {0, 1, 2, 3};
    do {
        std::array<std::pair<int, int>, 4> e;
        for (int i = 0; i < 4; ++i) e[static_cast<std::size_t>(i)] = {i, perm[static_cast<std::size_t>(i)]};
        probe(4, e);
    } while (std::next_permutation(perm.begin(), perm.end()));

    return out;
}

ModeCoefficients mode_vector(const SpectralContext& ctx, double k) {
    MPair m = m_matrices(Complex(k), ctx.L);
    CMat4 n = m.m_minus - ctx.bc.matrix() * m.m_plus;

    DPair d = d_pm(Complex(k), ctx.L);
    double scale_h = 1.0 + std::abs(d.d_minus) + std::abs(d.d_plus);
    double hval = std::abs(det4(n));
    if (hval > 1e-6 * scale_h) {
        std::ostringstream os;
        os << "mode_vector: |h(" << k << ")| = " << hval << " is not near zero";
        throw NotARoot(os.str());
    }

    double entry_scale = std::max(1.0, n.max_abs());
    ModeCoefficients mc;

    // Rank 3 kernel: any nonzero adjugate column spans it.
    CMat4 adj = adjugate4(n);
    int best_col = 0;
    double best_norm = -1.0;
    for (int c = 0; c < 4; ++c) {
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += std::norm(adj(r, c));
        if (s > best_norm) {
            best_norm = s;
            best_col = c;
        }
    }
    best_norm = std::sqrt(best_norm);

    bool have = false;
    if (best_norm > 1e-10 * std::pow(entry_scale, 3)) {
        for (int r = 0; r < 4; ++r) mc.phi[static_cast<std::size_t>(r)] = adj(r, best_col);
        double nn = norm(mc.phi);
        for (auto& x : mc.phi) x /= nn;
        mc.residual = norm(mat_vec(n, mc.phi));
        have = mc.residual <= 1e-7 * entry_scale;
    }

    if (!have) {
        // Kernel dimension >= 2 (adjugate vanishes): shifted inverse iteration
        // on n^H n still converges to a kernel vector.
        CMat4 b = n.adjoint() * n;
        double shift = 1e-12 * entry_scale * entry_scale;
        for (int i = 0; i < 4; ++i) b(i, i) += shift;
        Vec4 x = {0.5, 0.5, 0.5, 0.5};
        for (int it = 0; it < 8; ++it) {
            x = lu_solve(b, x);
            double nn = norm(x);
            for (auto& z : x) z /= nn;
        }
        mc.phi = x;
        mc.residual = norm(mat_vec(n, mc.phi));
        if (mc.residual > 1e-7 * entry_scale)
            throw NotARoot("mode_vector: kernel-vector residual above tolerance");
    }
    return mc;
}

}  // namespace cylcas
