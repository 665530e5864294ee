#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "walkport/slots.hpp"
#include "walkport/state.hpp"

namespace walkport {

/// Classical label of one projective outcome. Walker 1's position basis is
/// a union of two Fourier families, so its label is a (branch, index) pair:
/// branch 0 with index s, branch 1 with index t. Two-element bases put the
/// bit in `branch` and leave `index` at zero.
struct BasisLabel {
    int branch = 0;
    int index = 0;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

/// An orthonormal family of local vectors over a single slot, with one
/// outcome label per vector. The family spans the populated subspace of the
/// pre-measurement state; completeness is enforced on the support at
/// measurement time rather than on the full truncated line.
struct MeasurementBasis {
    Slot subsystem;
    std::vector<std::vector<cplx>> vectors;
    std::vector<BasisLabel> labels;

    /// Largest deviation of the Gram matrix from the identity.
    double gram_defect() const {
        double worst = 0.0;
        for (std::size_t a = 0; a < vectors.size(); ++a)
            for (std::size_t b = 0; b < vectors.size(); ++b) {
                cplx g{0.0, 0.0};
                for (std::size_t k = 0; k < vectors[a].size(); ++k) g += std::conj(vectors[a][k]) * vectors[b][k];
                if (a == b) g -= 1.0;
                worst = std::max(worst, std::abs(g));
            }
        return worst;
    }
};

namespace detail {
inline int floor_half(int x) { return x / 2; }
}  // namespace detail

/// m' = floor(m/2), m'' = floor((m-1)/2), m''' = m'' + 1: the index ranges
/// of the two Fourier families over walker 1's final positions.
struct LambdaRanges {
    int m_prime;
    int m_dprime;
    int m_tprime;

    explicit LambdaRanges(int receivers)
        : m_prime(detail::floor_half(receivers)),
          m_dprime(detail::floor_half(receivers - 1)),
          m_tprime(detail::floor_half(receivers - 1) + 1) {}

    int dotted_size() const { return m_tprime + 1; }
    int double_dotted_size() const { return m_prime + 1; }
    double dotted_angle(int s) const { return 2.0 * std::numbers::pi * s / (m_tprime + 1); }
    double double_dotted_angle(int t) const { return 2.0 * std::numbers::pi * t / (m_prime + 1); }
};

/// Walker-1 position basis for the homogeneous-coin protocol: the dotted
/// Fourier family over positions m+1-4l (labels (0, s)) united with the
/// double-dotted family over m-1-4l (labels (1, t)). Together they span
/// exactly the m+2 positions the second stage can populate.
inline MeasurementBasis build_lambda_h(const SystemShape& shape) {
    const int m = shape.receivers();
    const LambdaRanges r(m);
    const Slot slot = shape.position(1);
    const int dim = shape.slot_dim(slot);
    const int offset = (dim - 1) / 2;

    MeasurementBasis basis;
    basis.subsystem = slot;
    for (int s = 0; s <= r.m_tprime; ++s) {
        std::vector<cplx> v(static_cast<std::size_t>(dim), cplx{0.0, 0.0});
        const double norm = 1.0 / std::sqrt(static_cast<double>(r.m_tprime + 1));
        for (int l = 0; l <= r.m_tprime; ++l) {
            const int pos = m + 1 - 4 * l;
            const double phase = -2.0 * std::numbers::pi * l * s / (r.m_tprime + 1);
            v[static_cast<std::size_t>(pos + offset)] = std::polar(norm, phase);
        }
        basis.vectors.push_back(std::move(v));
        basis.labels.push_back({0, s});
    }
    for (int t = 0; t <= r.m_prime; ++t) {
        std::vector<cplx> v(static_cast<std::size_t>(dim), cplx{0.0, 0.0});
        const double norm = 1.0 / std::sqrt(static_cast<double>(r.m_prime + 1));
        for (int l = 0; l <= r.m_prime; ++l) {
            const int pos = m - 1 - 4 * l;
            const double phase = -2.0 * std::numbers::pi * l * t / (r.m_prime + 1);
            v[static_cast<std::size_t>(pos + offset)] = std::polar(norm, phase);
        }
        basis.vectors.push_back(std::move(v));
        basis.labels.push_back({1, t});
    }
    return basis;
}

/// Walker-1 position basis for the position-dependent protocol:
/// (|m+1> + |-(m+1)>)/sqrt(2) labelled 0 and (|m+1> - |-(m+1)>)/sqrt(2)
/// labelled 1.
inline MeasurementBasis build_lambda_p(const SystemShape& shape) {
    const int m = shape.receivers();
    const Slot slot = shape.position(1);
    const int dim = shape.slot_dim(slot);
    const int offset = (dim - 1) / 2;
    const double s = 1.0 / std::numbers::sqrt2;

    MeasurementBasis basis;
    basis.subsystem = slot;
    for (int sign = 0; sign < 2; ++sign) {
        std::vector<cplx> v(static_cast<std::size_t>(dim), cplx{0.0, 0.0});
        v[static_cast<std::size_t>(m + 1 + offset)] = cplx{s, 0.0};
        v[static_cast<std::size_t>(-(m + 1) + offset)] = cplx{sign == 0 ? s : -s, 0.0};
        basis.vectors.push_back(std::move(v));
        basis.labels.push_back({sign, 0});
    }
    return basis;
}

/// Secondary-walker position basis: (|1> +- |-1>)/sqrt(2), plus sign
/// labelled 0, minus sign labelled 1.
inline MeasurementBasis build_theta(const SystemShape& shape, int walker) {
    require(walker >= 2 && walker <= shape.walkers(), "build_theta: needs a secondary walker");
    const Slot slot = shape.position(walker);
    const int dim = shape.slot_dim(slot);
    const int offset = (dim - 1) / 2;
    const double s = 1.0 / std::numbers::sqrt2;

    MeasurementBasis basis;
    basis.subsystem = slot;
    for (int sign = 0; sign < 2; ++sign) {
        std::vector<cplx> v(static_cast<std::size_t>(dim), cplx{0.0, 0.0});
        v[static_cast<std::size_t>(1 + offset)] = cplx{s, 0.0};
        v[static_cast<std::size_t>(-1 + offset)] = cplx{sign == 0 ? s : -s, 0.0};
        basis.vectors.push_back(std::move(v));
        basis.labels.push_back({sign, 0});
    }
    return basis;
}

/// First-coin basis: |+> = (|1> + |0>)/sqrt(2) labelled 0 and
/// |-> = (|1> - |0>)/sqrt(2) labelled 1, with |1> written first exactly as
/// the protocol defines them. The sign convention only flips the meaning of
/// the coin label and is absorbed into the parity bit.
inline MeasurementBasis build_delta(const SystemShape& shape, int sender) {
    const Slot slot = shape.first_coin(sender);
    const double s = 1.0 / std::numbers::sqrt2;

    MeasurementBasis basis;
    basis.subsystem = slot;
    basis.vectors.push_back({cplx{s, 0.0}, cplx{s, 0.0}});    // |+>
    basis.labels.push_back({0, 0});
    basis.vectors.push_back({cplx{-s, 0.0}, cplx{s, 0.0}});   // |->
    basis.labels.push_back({1, 0});
    return basis;
}

}  // namespace walkport
