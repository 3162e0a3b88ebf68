#include "cylcas/roots.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace cylcas {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Parametric contour piece over t in [0, 1]: straight segment or circular arc.
struct Path {
    bool is_circle = false;
    Complex a, b;
    Complex center;
    double radius = 0.0, ang0 = 0.0, ang1 = 0.0;

    Complex point(double t) const {
        if (!is_circle) return a + t * (b - a);
        double ang = ang0 + t * (ang1 - ang0);
        return center + radius * Complex(std::cos(ang), std::sin(ang));
    }
    Complex deriv(double t) const {
        if (!is_circle) return b - a;
        double ang = ang0 + t * (ang1 - ang0);
        return Complex(0.0, 1.0) * (ang1 - ang0) * radius * Complex(std::cos(ang), std::sin(ang));
    }
};

struct WindingEngine {
    const SpectralContext& ctx;
    long evals = 0;
    static constexpr long kEvalCap = 500000;

    Complex integrand(const Path& p, double t) {
        if (++evals > kEvalCap)
            throw NonIntegerWinding("winding integral: evaluation budget exhausted");
        Complex z = p.point(t);
        Complex h = h_direct(ctx, z);
        if (h == Complex(0.0))
            throw ContourTooCloseToZero("winding integral: h vanishes on the contour");
        return dh_dk(ctx, z) / h * p.deriv(t);
    }

    Complex adaptive(const Path& p, double t0, double t1, Complex f0, Complex f1, double tol,
                     int depth) {
        double tm = 0.5 * (t0 + t1);
        Complex fm = integrand(p, tm);
        Complex whole = 0.5 * (f0 + f1) * (t1 - t0);
        Complex half = 0.25 * (f0 + fm) * (t1 - t0) + 0.25 * (fm + f1) * (t1 - t0);
        if (std::abs(half - whole) <= tol || depth >= 28)
            return half + (half - whole) / 3.0;
        return adaptive(p, t0, tm, f0, fm, 0.5 * tol, depth + 1) +
               adaptive(p, tm, t1, fm, f1, 0.5 * tol, depth + 1);
    }

    Complex integrate(const Path& p, double tol) {
        Complex f0 = integrand(p, 0.0);
        Complex f1 = integrand(p, 1.0);
        return adaptive(p, 0.0, 1.0, f0, f1, tol, 0);
    }
};

// min and max of |h| over equispaced samples of the piece.
std::pair<double, double> edge_extremes(const SpectralContext& ctx, const Path& p, int n = 33) {
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = std::abs(h_direct(ctx, p.point(static_cast<double>(i) / (n - 1))));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

bool edge_dips(const SpectralContext& ctx, const Path& p) {
    auto [lo, hi] = edge_extremes(ctx, p);
    if (hi == 0.0) return true;
    return lo < 1e-13 * hi;
}

// Winding number of the closed contour, with tolerance escalation until the
// value sits within 0.05 of an integer.
int winding_of(const SpectralContext& ctx, std::span<const Path> pieces) {
    double tol = 0.03;  // per piece, on the complex trapezoid estimate
    for (int attempt = 0; attempt < 4; ++attempt) {
        WindingEngine eng{ctx};
        Complex total = 0.0;
        for (const auto& p : pieces) total += eng.integrate(p, tol);
        Complex w = total / Complex(0.0, 2.0 * kPi);
        long m = std::lround(w.real());
        if (std::abs(w - Complex(static_cast<double>(m))) <= 0.05) return static_cast<int>(m);
        tol *= 0.25;
    }
    throw NonIntegerWinding("winding integral did not settle near an integer");
}

std::array<Path, 4> rect_paths(double re_lo, double re_hi, double im_lo, double im_hi) {
    Complex c0(re_lo, im_lo), c1(re_hi, im_lo), c2(re_hi, im_hi), c3(re_lo, im_hi);
    std::array<Path, 4> ps;
    ps[0].a = c0;
    ps[0].b = c1;
    ps[1].a = c1;
    ps[1].b = c2;
    ps[2].a = c2;
    ps[2].b = c3;
    ps[3].a = c3;
    ps[3].b = c0;
    return ps;
}

// Move one rectangle coordinate in 2.5e-4 steps (at most 1e-3 total) in the
// direction that lifts the minimum of |h| on that edge.
bool nudge_rect_edge(const SpectralContext& ctx, std::array<double, 4>& r, int edge) {
    auto path_for = [&r](int e) {
        auto ps = rect_paths(r[0], r[1], r[2], r[3]);
        return ps[static_cast<std::size_t>(e)];
    };
    // edge -> which coordinate moves: bottom=im_lo, right=re_hi, top=im_hi, left=re_lo
    static constexpr int coord_of[4] = {2, 1, 3, 0};
    int ci = coord_of[edge];
    for (int step = 0; step < 4; ++step) {
        if (!edge_dips(ctx, path_for(edge))) return true;
        double best_lo = -1.0;
        double best_val = r[static_cast<std::size_t>(ci)];
        for (double delta : {2.5e-4, -2.5e-4}) {
            std::array<double, 4> trial = r;
            trial[static_cast<std::size_t>(ci)] += delta;
            if (trial[0] >= trial[1] || trial[2] >= trial[3]) continue;
            auto ps = rect_paths(trial[0], trial[1], trial[2], trial[3]);
            auto [lo, hi] = edge_extremes(ctx, ps[static_cast<std::size_t>(edge)]);
            if (lo > best_lo) {
                best_lo = lo;
                best_val = trial[static_cast<std::size_t>(ci)];
            }
        }
        r[static_cast<std::size_t>(ci)] = best_val;
    }
    return !edge_dips(ctx, path_for(edge));
}

// Local Muller iteration for a complex root of h from three real starts.
std::optional<Complex> muller_polish(const SpectralContext& ctx, double x_lo, double x_mid,
                                     double x_hi, double k_cap, int budget) {
    Complex x0(x_lo), x1(x_mid), x2(x_hi);
    Complex f0 = h_direct(ctx, x0), f1 = h_direct(ctx, x1), f2 = h_direct(ctx, x2);
    for (int it = 0; it < budget; ++it) {
        Complex d01 = x1 - x0, d12 = x2 - x1;
        if (d12 == Complex(0.0)) return x2;
        Complex q = d12 / d01;
        Complex a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        Complex b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        Complex c = (1.0 + q) * f2;
        Complex disc = std::sqrt(b * b - 4.0 * a * c);
        Complex den1 = b + disc, den2 = b - disc;
        Complex den = (std::abs(den1) >= std::abs(den2)) ? den1 : den2;
        if (den == Complex(0.0)) return std::nullopt;
        Complex dx = -d12 * 2.0 * c / den;
        Complex x3 = x2 + dx;
        if (std::abs(x3.real()) > k_cap + 2.0 || std::abs(x3.imag()) > 1.0 / ctx.L)
            return std::nullopt;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = x3;
        f2 = h_direct(ctx, x2);
        if (std::abs(dx) <= 1e-11 * (1.0 + std::abs(x3))) return x2;
    }
    return std::nullopt;
}

int circle_multiplicity(const SpectralContext& ctx, double center, double radius) {
    double r = radius;
    for (int step = 0; step < 5; ++step) {
        Path probe;
        probe.is_circle = true;
        probe.center = Complex(center);
        probe.radius = r;
        probe.ang0 = 0.0;
        probe.ang1 = 2.0 * kPi;
        if (!edge_dips(ctx, probe)) break;
        double r_up = r + 2.5e-4, r_dn = r - 2.5e-4;
        Path pu = probe, pd = probe;
        pu.radius = r_up;
        pd.radius = r_dn;
        double lo_up = edge_extremes(ctx, pu).first;
        double lo_dn = (r_dn > 1e-5) ? edge_extremes(ctx, pd).first : -1.0;
        if (step == 4) throw ContourTooCloseToZero("multiplicity circle touches another zero");
        r = (lo_up >= lo_dn) ? r_up : r_dn;
    }
    std::array<Path, 4> arcs;
    for (int i = 0; i < 4; ++i) {
        arcs[static_cast<std::size_t>(i)].is_circle = true;
        arcs[static_cast<std::size_t>(i)].center = Complex(center);
        arcs[static_cast<std::size_t>(i)].radius = r;
        arcs[static_cast<std::size_t>(i)].ang0 = 0.5 * kPi * i;
        arcs[static_cast<std::size_t>(i)].ang1 = 0.5 * kPi * (i + 1);
    }
    return winding_of(ctx, arcs);
}

// Multiplicity-aware final polish; |h|-minimization alone stalls at the noise
// floor's square root for double roots, so even multiplicities iterate on the
// derivative instead.
double refine_root(const SpectralContext& ctx, double r, int mult, double radius, int budget,
                   bool& converged) {
    double x = r;
    converged = false;
    if (mult == 2) {
        // Simple zero of h' at the root: secant on dh_dk.
        double x0 = r, x1 = r + 1e-7 * (1.0 + std::abs(r));
        Complex g0 = dh_dk(ctx, Complex(x0)), g1 = dh_dk(ctx, Complex(x1));
        for (int it = 0; it < budget; ++it) {
            Complex den = g1 - g0;
            if (den == Complex(0.0)) break;
            double x2 = x1 - (g1 * Complex(x1 - x0) / den).real();
            if (std::abs(x2 - r) > radius) break;
            x0 = x1;
            g0 = g1;
            x1 = x2;
            g1 = dh_dk(ctx, Complex(x1));
            if (std::abs(x1 - x0) <= 1e-12 * (1.0 + std::abs(x1))) {
                converged = true;
                break;
            }
        }
        x = x1;
    } else {
        double m = static_cast<double>(std::max(1, mult));
        for (int it = 0; it < budget; ++it) {
            Complex h = h_direct(ctx, Complex(x));
            Complex dh = dh_dk(ctx, Complex(x));
            if (dh == Complex(0.0)) break;
            double dx = -(m * (h / dh)).real();
            if (std::abs(x + dx - r) > radius) break;
            x += dx;
            if (std::abs(dx) <= 1e-12 * (1.0 + std::abs(x))) {
                converged = true;
                break;
            }
        }
    }
    return converged ? x : r;
}

}  // namespace

RectCount count_in_rect(const SpectralContext& ctx, std::pair<double, double> re_range,
                        std::pair<double, double> im_range) {
    std::array<double, 4> r = {re_range.first, re_range.second, im_range.first, im_range.second};
    for (double v : r)
        if (!std::isfinite(v)) throw std::invalid_argument("count_in_rect: non-finite rectangle");
    if (!(r[0] < r[1]) || !(r[2] < r[3]))
        throw std::invalid_argument("count_in_rect: empty rectangle");

    for (int edge = 0; edge < 4; ++edge)
        if (!nudge_rect_edge(ctx, r, edge))
            throw ContourTooCloseToZero("count_in_rect: a zero sits on the contour after nudging");

    auto ps = rect_paths(r[0], r[1], r[2], r[3]);
    RectCount out;
    out.count = winding_of(ctx, ps);
    out.rect_used = r;
    return out;
}

int multiplicity_at(const SpectralContext& ctx, double k, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(k))
        throw std::invalid_argument("multiplicity_at: bad center or radius");
    // The disc is assumed to isolate one zero at its center; cheap post-hoc
    // check: |h| at the center must not exceed the circle minimum.
    Path probe;
    probe.is_circle = true;
    probe.center = Complex(k);
    probe.radius = radius;
    probe.ang0 = 0.0;
    probe.ang1 = 2.0 * kPi;
    double ring_min = edge_extremes(ctx, probe).first;
    if (std::abs(h_direct(ctx, Complex(k))) > ring_min)
        throw std::invalid_argument("multiplicity_at: center is not the minimum of |h| in the disc");
    return circle_multiplicity(ctx, k, radius);
}

RootScanReport scan_roots(const SpectralContext& ctx, double k_max, const ScanOptions& opt) {
    if (!(k_max > opt.k_min) || !std::isfinite(k_max))
        throw std::invalid_argument("scan_roots: k_max must exceed k_min");
    if (opt.samples_per_interval < 4)
        throw std::invalid_argument("scan_roots: samples_per_interval too small");

    const double L = ctx.L;
    const double step = kPi / L / opt.samples_per_interval;
    const int n = static_cast<int>(std::ceil((k_max - opt.k_min) / step)) + 1;

    std::vector<double> kk(static_cast<std::size_t>(n)), av(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        kk[static_cast<std::size_t>(i)] = std::min(opt.k_min + i * step, k_max);
        av[static_cast<std::size_t>(i)] =
            std::abs(h_direct(ctx, Complex(kk[static_cast<std::size_t>(i)])));
    }

    // Local |h| scale: running max over one pi/L interval on each side.
    const int w = opt.samples_per_interval;
    std::vector<double> scale(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = std::max(0, i - w); j <= std::min(n - 1, i + w); ++j)
            s = std::max(s, av[static_cast<std::size_t>(j)]);
        scale[static_cast<std::size_t>(i)] = std::max(s, 1e-300);
    }

    struct Candidate {
        double k;
        double h_abs;
        bool polished;
    };
    std::vector<Candidate> cands;
    for (int i = 0; i < n; ++i) {
        bool locmin = (i == 0 || av[static_cast<std::size_t>(i)] <= av[static_cast<std::size_t>(i - 1)]) &&
                      (i == n - 1 || av[static_cast<std::size_t>(i)] <= av[static_cast<std::size_t>(i + 1)]);
        if (!locmin) continue;
        if (av[static_cast<std::size_t>(i)] >= opt.candidate_rel_threshold * scale[static_cast<std::size_t>(i)])
            continue;
        double ki = kk[static_cast<std::size_t>(i)];
        auto res = muller_polish(ctx, ki - 0.5 * step, ki, ki + 0.5 * step, k_max, opt.muller_budget);
        if (res) {
            if (std::abs(res->imag()) > 1e-6 * (1.0 + std::abs(res->real())))
                continue;  // converged to a genuinely complex zero; not a real root
            double r = res->real();
            // Keep roots in the scan window; the polish may step just past
            // k_max, which the counting rectangle handles via its nudges.
            if (r > opt.k_min && r <= k_max + 2e-3)
                cands.push_back({r, std::abs(h_direct(ctx, Complex(r))), true});
        } else {
            // Muller failed outright; keep the grid point, flagged unpolished.
            cands.push_back({ki, av[static_cast<std::size_t>(i)], false});
        }
    }

    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.k < b.k; });
    std::vector<Candidate> reps;
    for (const auto& c : cands) {
        if (!reps.empty() && c.k - reps.back().k < 0.5 * step) {
            if (c.h_abs < reps.back().h_abs) reps.back() = c;
        } else {
            reps.push_back(c);
        }
    }

    RootScanReport rep;
    rep.k_min = opt.k_min;
    rep.k_max = k_max;
    rep.grid_points = n;

    for (std::size_t i = 0; i < reps.size(); ++i) {
        double gap = 1e300;
        if (i > 0) gap = std::min(gap, reps[i].k - reps[i - 1].k);
        if (i + 1 < reps.size()) gap = std::min(gap, reps[i + 1].k - reps[i].k);
        double radius = std::min({opt.mult_radius_cap / L, 0.45 * gap, 0.45 * reps[i].k});
        radius = std::max(radius, 2e-5);

        int mult = circle_multiplicity(ctx, reps[i].k, radius);
        if (mult <= 0) continue;  // spurious shallow minimum

        Root root;
        root.multiplicity = mult;
        if (reps[i].polished) {
            bool conv = false;
            double x = refine_root(ctx, reps[i].k, mult, radius, opt.newton_budget, conv);
            root.k = x;
            root.method = conv ? "newton" : "muller";
        } else {
            root.k = reps[i].k;
            root.method = "unpolished";
        }
        root.residual = std::abs(h_direct(ctx, Complex(root.k)));
        rep.roots.push_back(root);
    }

    RectCount rc = count_in_rect(ctx, {opt.k_min, k_max}, {-0.5 / L, 0.5 / L});
    rep.winding_total = rc.count;
    rep.strip = rc.rect_used;

    int mult_sum = 0;
    for (const auto& r : rep.roots)
        if (r.k > rc.rect_used[0] && r.k < rc.rect_used[1]) mult_sum += r.multiplicity;
    rep.consistent = (mult_sum == rc.count);
    if (!rep.consistent) {
        std::ostringstream os;
        os << "scan_roots: winding count " << rc.count << " != located multiplicity sum "
           << mult_sum << " over [" << rc.rect_used[0] << ", " << rc.rect_used[1] << "]";
        throw CountMismatch(os.str(), rep);
    }
    return rep;
}

}  // namespace cylcas
