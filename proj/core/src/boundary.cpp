#include "cylcas/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cylcas {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

std::string to_string(Classification c) {
    switch (c) {
        case Classification::NonUnitary: return "NonUnitary";
        case Classification::Inconsistent: return "Inconsistent";
        case Classification::BoundaryOfMr: return "BoundaryOfMr";
        case Classification::InteriorOfMrF: return "InteriorOfMrF";
    }
    return "?";
}

ClassifyResult classify(const CMat4& u, double tol, double unitary_tol) {
    ClassifyResult res;
    bool unitary = u.all_finite() && unitarity_defect(u) <= unitary_tol;

    bool have_phases = false;
    std::array<std::pair<double, double>, 4> ph{};  // (theta, residual)
    if (u.all_finite()) {
        try {
            auto roots = quartic_roots(charpoly(u));
            for (std::size_t i = 0; i < 4; ++i) {
                double th = std::arg(roots[i]);
                if (th < 0.0) th += kTwoPi;
                if (th >= kTwoPi) th = 0.0;
                Complex on_circle(std::cos(th), std::sin(th));
                ph[i] = {th, std::abs(on_circle - roots[i])};
            }
            std::sort(ph.begin(), ph.end());
            have_phases = true;
        } catch (const NonConvergence&) {
            // leave phases zeroed; only reachable for badly non-unitary input
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        res.phases.thetas[i] = ph[i].first;
        res.phases.residuals[i] = ph[i].second;
    }

    if (!unitary) {
        res.cls = Classification::NonUnitary;
        res.witness = have_phases ? ph[0].first : 0.0;
        return res;
    }

    // Inconsistent: any phase strictly inside (pi, 2pi); witness is the phase
    // deepest into the forbidden band.
    double worst_depth = -1.0;
    for (const auto& [th, r] : ph) {
        if (th > kPi + tol && th < kTwoPi - tol) {
            double depth = std::min(th - kPi, kTwoPi - th);
            if (depth > worst_depth) {
                worst_depth = depth;
                res.witness = th;
            }
        }
    }
    if (worst_depth >= 0.0) {
        res.cls = Classification::Inconsistent;
        return res;
    }

    // BoundaryOfMr: any phase within tol of 0 or pi (2pi counts as 0).
    double best_edge = 1e300;
    for (const auto& [th, r] : ph) {
        double edge = std::min({th, std::abs(th - kPi), kTwoPi - th});
        if (edge <= tol && edge < best_edge) {
            best_edge = edge;
            res.witness = th;
        }
    }
    if (best_edge <= tol) {
        res.cls = Classification::BoundaryOfMr;
        return res;
    }

    // InteriorOfMrF: witness is the phase closest to the admissibility edge.
    double best = 1e300;
    for (const auto& [th, r] : ph) {
        double edge = std::min(th, kPi - th);
        if (edge < best) {
            best = edge;
            res.witness = th;
        }
    }
    res.cls = Classification::InteriorOfMrF;
    return res;
}

CMat4 cayley(const CMat4& u) {
    auto roots = quartic_roots(charpoly(u));
    for (const auto& r : roots) {
        if (std::abs(r - 1.0) <= 1e-8 || std::abs(r + 1.0) <= 1e-8)
            throw SpectrumContainsPlusMinusOne("cayley: spectrum touches +1 or -1");
    }
    CMat4 id = CMat4::identity();
    return Complex(0.0, -1.0) * lu_solve(id + u, id - u);
}

CMat4 inverse_cayley(const CMat4& a) {
    if (!a.all_finite() || (a - a.adjoint()).max_abs() > 1e-9)
        throw NotHermitian("inverse_cayley: input is not Hermitian within 1e-9");
    CMat4 id = CMat4::identity();
    Complex i1(0.0, 1.0);
    return lu_solve(id + i1 * a, id - i1 * a);
}

FactorU1SU4 factor_u1_su4(const CMat4& u) {
    FactorU1SU4 f;
    f.phase = std::arg(det4(u)) / 4.0;  // principal branch, so phase in (-pi/4, pi/4]
    f.s = std::exp(Complex(0.0, -f.phase)) * u;
    return f;
}

BoundaryCondition::BoundaryCondition(const CMat4& u, std::string label,
                                     std::map<std::string, double> params, double unitary_tol)
    : u_(u), label_(std::move(label)), params_(std::move(params)) {
    if (!u.all_finite()) throw NonUnitaryResult("boundary condition: matrix has non-finite entries");
    double defect = unitarity_defect(u);
    if (defect > unitary_tol) {
        std::ostringstream os;
        os << "boundary condition: unitarity defect " << defect << " exceeds " << unitary_tol;
        throw NonUnitaryResult(os.str());
    }
    cls_ = classify(u, 1e-9, unitary_tol);
}

namespace {

CMat4 antidiag_matrix(Complex a, Complex b, Complex c, Complex d) {
    CMat4 u;
    u(0, 3) = a;
    u(1, 2) = b;
    u(2, 1) = c;
    u(3, 0) = d;
    return u;
}

Complex phase_of(double t) { return {std::cos(t), std::sin(t)}; }

const char* kSqrtNote =
    "sqrt(D-) = 2i(2k cos(kL) + (k^2-1) sin(kL)), sqrt(D+) = 2i(2k cos(kL) - (k^2-1) sin(kL))";

}  // namespace

const std::vector<PresetInfo>& preset_catalogue() {
    static const std::vector<PresetInfo> cat = {
        {"dirichlet", {}, "field vanishes at both plates", "-64 sin(kL)^2"},
        {"neumann", {}, "normal derivative vanishes at both plates", "-64 k^4 sin(kL)^2"},
        {"mixed_nd", {}, "Dirichlet pair at one plate, Neumann pair at the other",
         "-64 k^2 cos(kL)^2"},
        {"diagonal",
         {"theta1", "theta2", "theta3", "theta4"},
         "independent eigenphase per boundary component; spectral function factorizes",
         std::string("p(l1,l3) p(l2,l4) with p(x,y) = 2i(k^2+1) sin(kL)(x+y) - sqrt(D+) x y + "
                     "sqrt(D-), lj = exp(i thetaj); ") +
             kSqrtNote},
        {"antidiagonal",
         {"theta1", "theta2", "theta3", "theta4"},
         "pure plate-coupling phases on the anti-diagonal",
         "D- + D+ l1 l2 l3 l4 + 4(k^2+1)^2 sin(kL)^2 (l2 l3 + l1 l4) + 16 k^2 (l1 l2 + l3 l4)"},
        {"periodic", {}, "plates identified: value and derivative transported", "64 k^2 sin(kL)^2"},
        {"antiperiodic", {}, "plates identified with a sign flip", "64 k^2 sin(kL)^2"},
        {"periodic_antiperiodic", {}, "one component pair periodic, the other antiperiodic",
         "-16 (k^2-1)^2 sin(kL)^2"},
        {"pseudo_periodic", {"alpha"}, "periodic up to a U(1) phase",
         "8 (-1 + 6k^2 - k^4 + (1+k^2)^2 cos(2 alpha)) sin(kL)^2"},
        {"two_flux",
         {"alpha", "beta"},
         "independent U(1) phases for the two transport directions",
         "8 (-1 + 6k^2 - k^4 + (1+k^2)^2 cos(alpha + beta)) sin(kL)^2"},
        {"quasi_periodic", {"alpha"}, "real rotation mixing the two plates",
         "8 (-1 + 6k^2 - k^4 + (1+k^2)^2 cos(2 alpha)) sin(kL)^2"},
    };
    return cat;
}

BoundaryCondition preset(const std::string& name, const std::map<std::string, double>& params) {
    const PresetInfo* info = nullptr;
    for (const auto& p : preset_catalogue())
        if (p.name == name) {
            info = &p;
            break;
        }
    if (!info) throw UnknownPreset("unknown preset: " + name);

    for (const auto& req : info->params)
        if (!params.count(req))
            throw std::invalid_argument("preset " + name + ": missing parameter " + req);
    for (const auto& [key, val] : params)
        if (std::find(info->params.begin(), info->params.end(), key) == info->params.end())
            throw std::invalid_argument("preset " + name + ": unexpected parameter " + key);

    auto get = [&params](const char* key) { return params.at(key); };

    CMat4 u;
    if (name == "dirichlet") {
        u = CMat4::identity() * Complex(-1.0);
    } else if (name == "neumann") {
        u = CMat4::identity();
    } else if (name == "mixed_nd") {
        u = CMat4::diag(-1.0, -1.0, 1.0, 1.0);
    } else if (name == "diagonal") {
        u = CMat4::diag(phase_of(get("theta1")), phase_of(get("theta2")), phase_of(get("theta3")),
                        phase_of(get("theta4")));
    } else if (name == "antidiagonal") {
        u = antidiag_matrix(phase_of(get("theta1")), phase_of(get("theta2")),
                            phase_of(get("theta3")), phase_of(get("theta4")));
    } else if (name == "periodic") {
        u = antidiag_matrix(1.0, 1.0, 1.0, 1.0);
    } else if (name == "antiperiodic") {
        u = antidiag_matrix(-1.0, -1.0, -1.0, -1.0);
    } else if (name == "periodic_antiperiodic") {
        u = antidiag_matrix(1.0, 1.0, -1.0, -1.0);
    } else if (name == "pseudo_periodic") {
        double al = get("alpha");
        u = antidiag_matrix(phase_of(-al), phase_of(al), phase_of(al), phase_of(-al));
    } else if (name == "two_flux") {
        double al = get("alpha"), be = get("beta");
        u = antidiag_matrix(phase_of(-al), phase_of(al), phase_of(be), phase_of(-be));
    } else {  // quasi_periodic
        double ca = std::cos(get("alpha")), sa = std::sin(get("alpha"));
        u(0, 2) = ca;
        u(0, 3) = sa;
        u(1, 2) = sa;
        u(1, 3) = -ca;
        u(2, 0) = ca;
        u(2, 1) = -sa;
        u(3, 0) = -sa;
        u(3, 1) = -ca;
    }
    return BoundaryCondition(u, name, params);
}

BoundaryCondition haar_sample(std::uint64_t seed, std::optional<Classification> constraint) {
    std::mt19937_64 rng(seed);
    // Explicit uniform and Gaussian maps: std::uniform_real_distribution and
    // std::normal_distribution are implementation-defined sequences.
    auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    auto gauss_pair = [&uniform](double& g1, double& g2) {
        double r = std::sqrt(-2.0 * std::log(uniform()));
        double t = kTwoPi * uniform();
        g1 = r * std::cos(t);
        g2 = r * std::sin(t);
    };

    for (int attempt = 0; attempt < 10000; ++attempt) {
        CMat4 g;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                double re, im;
                gauss_pair(re, im);
                g(r, c) = Complex(re, im);
            }
        CMat4 u;
        try {
            u = unitarize(g);
        } catch (const RankDeficient&) {
            continue;  // measure-zero event; resample
        }
        BoundaryCondition bc(u, "haar", {{"seed", static_cast<double>(seed)}});
        if (!constraint || bc.classification().cls == *constraint) return bc;
    }
    throw SamplingBudgetExceeded("haar_sample: no sample met the constraint within 10000 draws");
}

}  // namespace cylcas
