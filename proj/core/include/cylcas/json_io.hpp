#pragma once

// JSON exchange format for boundary conditions.  Input objects carry exactly
// one source: {"preset": name, "params": {...}} or
// {"matrix": [[[re, im] x4] x4]}.  Matrix input is accepted up to a unitarity
// defect of 1e-8 (looser than internal construction); pass reunitarize to
// project onto the closest orthonormal frame instead of rejecting.

#include <string>

#include "cylcas/boundary.hpp"

namespace cylcas {

BoundaryCondition bc_from_json_text(const std::string& text, bool reunitarize = false);
BoundaryCondition bc_from_json_file(const std::string& path, bool reunitarize = false);

// {"label": ..., "params": {...}, "matrix": [[[re, im] x4] x4]}; the matrix
// field alone makes the output ingestible again.
std::string bc_to_json_text(const BoundaryCondition& bc);

}  // namespace cylcas
