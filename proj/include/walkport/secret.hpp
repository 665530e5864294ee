#pragma once

#include <cmath>

#include "walkport/common.hpp"

namespace walkport {

/// The logical qubit to be shared: |phi> = alpha |0> + beta |1>,
/// |alpha|^2 + |beta|^2 = 1. Degenerate secrets (alpha or beta zero) are
/// permitted.
struct SecretSpec {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};

    SecretSpec() = default;
    SecretSpec(cplx a, cplx b) : alpha(a), beta(b) {
        require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) <= norm_tol,
                "SecretSpec: |alpha|^2 + |beta|^2 must be 1");
    }
};

/// Which stage-two coin family drives the walk: a Hadamard on every
/// receiver coin, or the position-keyed identity/bit-flip table.
enum class Variant { homogeneous, position_dependent };

/// How the designated receiver undoes its share of the entanglement in the
/// homogeneous protocol: the Pauli product (default), or the diagonal
/// rotation alternative.
enum class CorrectionStyle { pauli, rz_alternative };

}  // namespace walkport
