#include "cylcas/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cylcas {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.4142135623730950488016887242096981;

void validate_params(const EnergyParams& p) {
    if (!(p.heat_epsilon > 0.0) || !std::isfinite(p.heat_epsilon))
        throw std::invalid_argument("energy: heat_epsilon must be positive");
    if (!(p.a > 0.0) || !std::isfinite(p.a))
        throw std::invalid_argument("energy: circumference must be positive");
    if (!(p.mass >= 0.0) || !std::isfinite(p.mass))
        throw std::invalid_argument("energy: mass must be nonnegative");
    if (!(p.tail_tol > 0.0) || !std::isfinite(p.tail_tol))
        throw std::invalid_argument("energy: tail_tol must be positive");
    if (!(p.L > 0.0) || !std::isfinite(p.L))
        throw std::invalid_argument("energy: L must be positive");
}

// Geometric majorant for sum over roots >= K at transverse offset c:
//   2 sum_{j>=0} (s0 + j delta) exp(-eps (s0 + j delta) / sqrt(2)),  s0 = K + c.
// A bound on mult * omega * exp(-eps omega) summed over actual roots because
// omega <= k + c, omega >= (k + c)/sqrt(2), roots are at least delta apart
// (delta = pi/(2L), half the asymptotic spacing, absorbing multiplicity 2),
// and x exp(-eps x / sqrt(2)) decreases for x >= sqrt(2)/eps, which s0 must
// satisfy before the formula applies.
double tail_majorant(double K, double c, double eps, double delta) {
    double s0 = K + c;
    double rho = std::exp(-eps * delta / kSqrt2);
    double head = std::exp(-eps * s0 / kSqrt2);
    return 2.0 * head * (s0 / (1.0 - rho) + delta * rho / ((1.0 - rho) * (1.0 - rho)));
}

double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

double omega(double k, int n, const EnergyParams& p) {
    double q = 2.0 * kPi * n / p.a;
    return std::sqrt(k * k + q * q + p.mass * p.mass);
}

EnergyResult regularized_energy(const SpectralContext& ctx, const EnergyParams& p) {
    validate_params(p);
    if (p.L != ctx.L)
        throw std::invalid_argument("energy: params.L disagrees with the context separation");
    if (!ctx.bc.consistent())
        throw InconsistentBoundaryCondition(
            "energy: boundary condition has momenta outside the admissible cone");

    const double eps = p.heat_epsilon;
    const double delta = kPi / (2.0 * ctx.L);
    const double dq = 2.0 * kPi / p.a;
    const double tau_n = 0.5 * p.tail_tol;
    const double tau_k = 0.5 * p.tail_tol;
    auto c_of = [&](int n) { return std::sqrt(std::pow(dq * n, 2) + p.mass * p.mass); };

    // n cutoff: smallest N, within the majorant validity region, whose
    // remainder (monotone-ratio geometric closure) certifies tau_n.
    int n_max = 0;
    double n_tail = 0.0;
    {
        const int n_cap = 2000000;
        while (true) {
            if (n_max > n_cap)
                throw TailBoundUnachievable("energy: n cutoff exceeds cap before meeting tail_tol");
            double c1 = c_of(n_max + 1);
            if (c1 >= kSqrt2 / eps) {
                double t1 = tail_majorant(0.0, c1, eps, delta);
                if (t1 == 0.0) {  // exponent underflow: the tail is certified at zero
                    n_tail = 0.0;
                    break;
                }
                double t2 = tail_majorant(0.0, c_of(n_max + 2), eps, delta);
                if (t2 < t1) {
                    double bound = t1 / (1.0 - t2 / t1);
                    if (bound <= tau_n) {
                        n_tail = bound;
                        break;
                    }
                }
            }
            ++n_max;
        }
    }

    std::vector<int> n_set;
    for (int n = p.include_n0 ? 0 : 1; n <= n_max; ++n) n_set.push_back(n);

    // k cutoff: shared budget tau_k across every n kept.
    double k_max = std::max(kSqrt2 / eps + delta, kPi / ctx.L);
    double k_tail = 0.0;
    {
        const double k_cap = 10000.0;
        while (true) {
            k_tail = 0.0;
            for (int n : n_set) k_tail += tail_majorant(k_max, c_of(n), eps, delta);
            if (k_tail <= tau_k) break;
            k_max += kPi / ctx.L;
            if (k_max > k_cap)
                throw TailBoundUnachievable("energy: k cutoff exceeds cap before meeting tail_tol");
        }
    }

    EnergyResult res;
    res.roots = scan_roots(ctx, k_max);
    res.n_max_used = n_max;
    res.k_max_used = k_max;
    res.tail_bound = n_tail + k_tail;

    struct Station {
        double k;
        int mult;
    };
    std::vector<Station> stations;
    for (const auto& r : res.roots.roots) stations.push_back({r.k, r.multiplicity});

    if (p.include_k0) {
        // h is even in k, so the origin winding is even and double-counts the
        // zero mode; half of it is the physical multiplicity.
        double r0 = 0.1 / ctx.L;
        if (!stations.empty()) r0 = std::min(r0, 0.45 * stations.front().k);
        RectCount rc = count_in_rect(ctx, {-r0, r0}, {-r0, r0});
        if (rc.count % 2 != 0)
            throw NonIntegerWinding("energy: odd winding count around the origin");
        int m0 = rc.count / 2;
        if (m0 > 0) {
            stations.insert(stations.begin(), {0.0, m0});
            res.notes.push_back("zero mode included with multiplicity " + std::to_string(m0));
        }
    }

    std::vector<double> terms;
    terms.reserve(stations.size() * n_set.size());
    for (int n : n_set)
        for (const auto& st : stations) {
            double w = omega(st.k, n, p);
            terms.push_back(st.mult * w * std::exp(-eps * w));
        }
    res.value = pairwise_sum(terms);
    res.modes_used = static_cast<long>(terms.size());
    res.k_count_used = static_cast<int>(stations.size());
    return res;
}

std::vector<CurvePoint> energy_curve(const BoundaryCondition& bc, const EnergyParams& p,
                                     std::span<const double> L_grid) {
    std::vector<CurvePoint> out;
    out.reserve(L_grid.size());
    for (double Lg : L_grid) {
        CurvePoint pt;
        pt.L = Lg;
        try {
            SpectralContext ctx(bc, Lg);
            EnergyParams pl = p;
            pl.L = Lg;
            pt.result = regularized_energy(ctx, pl);
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

double force(const BoundaryCondition& bc, const EnergyParams& p, double L, double dL) {
    if (!(dL > 0.0) || !(L - dL > 0.0))
        throw std::invalid_argument("force: need 0 < dL < L");
    EnergyParams pp = p;
    pp.L = L + dL;
    double ep = regularized_energy(SpectralContext(bc, L + dL), pp).value;
    pp.L = L - dL;
    double em = regularized_energy(SpectralContext(bc, L - dL), pp).value;
    return -(ep - em) / (2.0 * dL);
}

FinitePartReport fit_finite_part(std::span<const double> eps, std::span<const double> values) {
    const std::size_t n = eps.size();
    if (n != values.size() || n < 6)
        throw std::invalid_argument("fit_finite_part: need >= 6 matching nodes");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(eps[i] > 0.0)) throw std::invalid_argument("fit_finite_part: eps nodes must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1]))
            throw std::invalid_argument("fit_finite_part: eps nodes must be strictly decreasing");
    }

    auto basis = [](double e, int j) {
        switch (j) {
            case 0: return 1.0 / (e * e * e);
            case 1: return 1.0 / (e * e);
            case 2: return 1.0 / e;
            case 3: return 1.0;
            default: return e;
        }
    };

    // Column-normalized normal equations, solved by Gaussian elimination with
    // partial pivoting; the pivot ratio stands in for the condition number.
    std::array<double, 5> colnorm{};
    for (int j = 0; j < 5; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::pow(basis(eps[i], j), 2);
        colnorm[static_cast<std::size_t>(j)] = std::sqrt(s);
    }

    double ata[5][5] = {};
    double atb[5] = {};
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, 5> row;
        for (int j = 0; j < 5; ++j)
            row[static_cast<std::size_t>(j)] = basis(eps[i], j) / colnorm[static_cast<std::size_t>(j)];
        for (int r = 0; r < 5; ++r) {
            for (int c = 0; c < 5; ++c) ata[r][c] += row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(c)];
            atb[r] += row[static_cast<std::size_t>(r)] * values[i];
        }
    }

    double piv_max = 0.0, piv_min = 1e300;
    for (int col = 0; col < 5; ++col) {
        int p = col;
        for (int r = col + 1; r < 5; ++r)
            if (std::abs(ata[r][col]) > std::abs(ata[p][col])) p = r;
        if (p != col) {
            for (int c = 0; c < 5; ++c) std::swap(ata[col][c], ata[p][c]);
            std::swap(atb[col], atb[p]);
        }
        double piv = std::abs(ata[col][col]);
        piv_max = std::max(piv_max, piv);
        piv_min = std::min(piv_min, piv);
        if (piv == 0.0) throw IllConditionedFit("fit_finite_part: singular normal equations");
        for (int r = col + 1; r < 5; ++r) {
            double l = ata[r][col] / ata[col][col];
            for (int c = col; c < 5; ++c) ata[r][c] -= l * ata[col][c];
            atb[r] -= l * atb[col];
        }
    }

    FinitePartReport rep;
    rep.condition = piv_max / piv_min;
    if (rep.condition > 1e12)
        throw IllConditionedFit("fit_finite_part: normal equations condition estimate above 1e12");

    std::array<double, 5> x{};
    for (int r = 4; r >= 0; --r) {
        double s = atb[r];
        for (int c = r + 1; c < 5; ++c) s -= ata[r][c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / ata[r][r];
    }
    for (int j = 0; j < 5; ++j) x[static_cast<std::size_t>(j)] /= colnorm[static_cast<std::size_t>(j)];

    rep.eps3 = x[0];
    rep.eps2 = x[1];
    rep.eps1 = x[2];
    rep.finite = x[3];
    rep.linear = x[4];

    double rss = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (int j = 0; j < 5; ++j) fit += x[static_cast<std::size_t>(j)] * basis(eps[i], j);
        rss += std::pow(values[i] - fit, 2);
        vmax = std::max(vmax, std::abs(values[i]));
    }
    rep.residual_rms = std::sqrt(rss / static_cast<double>(n));
    rep.residual_flagged = rep.residual_rms > 1e-8 * std::max(1.0, vmax);
    return rep;
}

FinitePartReport finite_part(const BoundaryCondition& bc, const EnergyParams& p, double L,
                             std::span<const double> eps_grid) {
    std::vector<double> vals;
    vals.reserve(eps_grid.size());
    SpectralContext ctx(bc, L);
    for (double e : eps_grid) {
        EnergyParams pe = p;
        pe.L = L;
        pe.heat_epsilon = e;
        vals.push_back(regularized_energy(ctx, pe).value);
    }
    return fit_finite_part(eps_grid, vals);
}

}  // namespace cylcas
