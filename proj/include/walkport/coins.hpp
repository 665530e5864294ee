#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "walkport/common.hpp"

namespace walkport {

/// 2x2 complex matrix, row-major. Coin operators and the receivers' local
/// correction unitaries are all of this form.
struct Mat2 {
    std::array<cplx, 4> u{};

    cplx operator()(int r, int c) const { return u[static_cast<std::size_t>(2 * r + c)]; }

    friend Mat2 operator*(const Mat2& a, const Mat2& b) {
        Mat2 out;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) out.u[static_cast<std::size_t>(2 * r + c)] = a(r, 0) * b(0, c) + a(r, 1) * b(1, c);
        return out;
    }

    double unitarity_defect() const {
        // max entry of U^dag U - I
        double worst = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                cplx e = std::conj((*this)(0, r)) * (*this)(0, c) + std::conj((*this)(1, r)) * (*this)(1, c);
                if (r == c) e -= 1.0;
                worst = std::max(worst, std::abs(e));
            }
        return worst;
    }
};

inline Mat2 mat2_identity() { return {{cplx{1, 0}, {0, 0}, {0, 0}, {1, 0}}}; }
inline Mat2 mat2_hadamard() {
    const double s = 1.0 / std::numbers::sqrt2;
    return {{cplx{s, 0}, {s, 0}, {s, 0}, {-s, 0}}};
}
inline Mat2 mat2_pauli_x() { return {{cplx{0, 0}, {1, 0}, {1, 0}, {0, 0}}}; }
inline Mat2 mat2_pauli_z() { return {{cplx{1, 0}, {0, 0}, {0, 0}, {-1, 0}}}; }
inline Mat2 mat2_rz(double theta) { return {{cplx{1, 0}, {0, 0}, {0, 0}, std::polar(1.0, theta)}}; }

/// A coin assignment: one of the named constant unitaries, or a table keyed
/// by the active walker's position (consulted before the conditional shift
/// of the same sub-step). Tables may declare a default; without one,
/// unlisted positions are an error.
class CoinRule {
  public:
    enum class Kind { identity, hadamard, pauli_x, pauli_z, position_dependent };

    static CoinRule identity() { return CoinRule(Kind::identity, mat2_identity()); }
    static CoinRule hadamard() { return CoinRule(Kind::hadamard, mat2_hadamard()); }
    static CoinRule pauli_x() { return CoinRule(Kind::pauli_x, mat2_pauli_x()); }
    static CoinRule pauli_z() { return CoinRule(Kind::pauli_z, mat2_pauli_z()); }

    static CoinRule constant(const Mat2& u) {
        check_unitary(u);
        return CoinRule(Kind::identity, u);  // kind tag unused for custom constants
    }

    static CoinRule position_dependent(std::map<int, Mat2> table, std::optional<Mat2> fallback = std::nullopt) {
        for (const auto& [pos, u] : table) {
            (void)pos;
            check_unitary(u);
        }
        if (fallback) check_unitary(*fallback);
        CoinRule rule(Kind::position_dependent, mat2_identity());
        rule.table_ = std::move(table);
        rule.fallback_ = fallback;
        return rule;
    }

    Kind kind() const { return kind_; }
    bool is_position_dependent() const { return kind_ == Kind::position_dependent; }

    const Mat2& matrix_at(std::optional<int> position) const {
        if (kind_ != Kind::position_dependent) return constant_;
        require(position.has_value(), "CoinRule: position-dependent rule needs the active walker position");
        auto it = table_.find(*position);
        if (it != table_.end()) return it->second;
        require(fallback_.has_value(),
                "CoinRule: no table entry for position " + std::to_string(*position) + " and no default");
        return *fallback_;
    }

  private:
    CoinRule(Kind kind, const Mat2& constant) : kind_(kind), constant_(constant) {}

    static void check_unitary(const Mat2& u) {
        require(u.unitarity_defect() <= norm_tol, "CoinRule: matrix is not unitary");
    }

    Kind kind_;
    Mat2 constant_;
    std::map<int, Mat2> table_;
    std::optional<Mat2> fallback_;
};

}  // namespace walkport
