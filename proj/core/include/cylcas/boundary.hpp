#pragma once

// Admissible boundary conditions for the scalar field on a finite cylinder.
// A boundary condition is a unitary 4x4 matrix acting on the boundary-data
// pairs (value, normal derivative) at the two plates.  Self-adjointness holds
// for any unitary; a nonnegative spectrum of transverse momenta additionally
// requires every eigenphase to lie in [0, pi] (equivalently, the Hermitian
// matrix i(I-U)(I+U)^{-1} must be positive semidefinite where it exists).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cylcas/mat4.hpp"

namespace cylcas {

enum class Classification {
    NonUnitary,      // input fails the unitarity check
    Inconsistent,    // some eigenphase strictly inside (pi, 2pi)
    BoundaryOfMr,    // some eigenphase at 0 or pi within tolerance
    InteriorOfMrF,   // all eigenphases strictly inside (0, pi)
};

std::string to_string(Classification c);

// Eigenphases of a unitary, sorted ascending in [0, 2pi).  residuals[j] is the
// distance from e^{i theta_j} to the matched characteristic root; at most
// 1e-8 for any matrix that passes the unitarity gate.
struct Eigenphases {
    std::array<double, 4> thetas{};
    std::array<double, 4> residuals{};
};

struct ClassifyResult {
    Eigenphases phases;
    Classification cls = Classification::NonUnitary;
    // Offending eigenphase for Inconsistent/BoundaryOfMr; for InteriorOfMrF the
    // phase closest to the admissibility boundary {0, pi}.
    double witness = 0.0;
};

struct NonUnitaryResult : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SpectrumContainsPlusMinusOne : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotHermitian : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SamplingBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownPreset : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Band test on the eigenphases.  tol separates the open interior bands from
// the boundary ring; unitary_tol gates the whole test.
ClassifyResult classify(const CMat4& u, double tol = 1e-9, double unitary_tol = 1e-10);

// A = -i (I - U)(I + U)^{-1}; Hermitian iff U unitary.  Defined only when
// neither +1 nor -1 is an eigenvalue of U (within 1e-8 on the unit circle).
CMat4 cayley(const CMat4& u);

// U = (I + iA)^{-1} (I - iA) for Hermitian A (defect <= 1e-9 enforced).
CMat4 inverse_cayley(const CMat4& a);

// u = e^{i phase} s with det s = 1; phase is the principal argument of det u
// divided by 4, so phase lies in (-pi/4, pi/4].
struct FactorU1SU4 {
    double phase = 0.0;
    CMat4 s;
};
FactorU1SU4 factor_u1_su4(const CMat4& u);

// Validated boundary condition: matrix unitary within unitary_tol, with the
// classification computed once at construction.
class BoundaryCondition {
public:
    explicit BoundaryCondition(const CMat4& u, std::string label = "custom",
                               std::map<std::string, double> params = {},
                               double unitary_tol = 1e-10);

    const CMat4& matrix() const { return u_; }
    const std::string& label() const { return label_; }
    const std::map<std::string, double>& params() const { return params_; }
    const ClassifyResult& classification() const { return cls_; }
    bool consistent() const { return cls_.cls != Classification::Inconsistent; }

private:
    CMat4 u_;
    std::string label_;
    std::map<std::string, double> params_;
    ClassifyResult cls_;
};

struct PresetInfo {
    std::string name;
    std::vector<std::string> params;  // required parameter names, in order
    std::string description;
    std::string form;  // closed-form spectral function as plain text
};

// The named boundary-condition families with closed-form spectral functions.
const std::vector<PresetInfo>& preset_catalogue();

// Build a named family member.  Throws UnknownPreset for an unknown name and
// std::invalid_argument on missing or superfluous parameters.
BoundaryCondition preset(const std::string& name, const std::map<std::string, double>& params = {});

// Haar-distributed unitary from a fixed-seed generator (Ginibre sample then
// unitarization).  With a constraint, rejection-samples until the classifier
// matches; throws SamplingBudgetExceeded after 10000 attempts.
BoundaryCondition haar_sample(std::uint64_t seed,
                              std::optional<Classification> constraint = std::nullopt);

}  // namespace cylcas
