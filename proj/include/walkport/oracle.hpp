#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

#include "walkport/coins.hpp"
#include "walkport/measure.hpp"
#include "walkport/secret.hpp"
#include "walkport/state.hpp"
#include "walkport/walk.hpp"

namespace walkport::oracle {

/// A register of `count` plain qubit slots (coin indices 0..count-1), used
/// for states that live outside any particular walk geometry.
inline SlotSpace qubit_register(int count) {
    std::vector<Slot> slots;
    for (int i = 0; i < count; ++i) slots.push_back(coin_slot(i));
    return SlotSpace(std::move(slots), std::vector<int>(static_cast<std::size_t>(count), 2));
}

/// Calls `fn` with every bit pattern of the given weight, as a digit vector
/// (most significant slot first).
inline void for_each_pattern(int qubits, int ones, const std::function<void(const std::vector<int>&)>& fn) {
    require(ones >= 0 && ones <= qubits, "for_each_pattern: weight out of range");
    std::vector<int> bits(static_cast<std::size_t>(qubits));
    for (std::uint32_t mask = 0; mask < (1u << qubits); ++mask) {
        if (std::popcount(mask) != ones) continue;
        for (int q = 0; q < qubits; ++q) bits[static_cast<std::size_t>(q)] = (mask >> (qubits - 1 - q)) & 1u;
        fn(bits);
    }
}

/// P[|1>^k |0>^(m-k)]: the unnormalized symmetric sum of all C(m,k)
/// placements of k ones among m qubits.
inline StateVector perm_sum(int ones, const SlotSpace& qubits) {
    StateVector out(qubits);
    for_each_pattern(qubits.count(), ones, [&](const std::vector<int>& bits) { out.add_term(bits, 1.0); });
    return out;
}

inline StateVector perm_sum(int ones, int total) { return perm_sum(ones, qubit_register(total)); }

/// alpha |0...0> + beta |1...1> over the given qubit register.
inline StateVector ghz_secret(const SecretSpec& secret, const SlotSpace& qubits) {
    StateVector out(qubits);
    std::vector<int> zeros(static_cast<std::size_t>(qubits.count()), 0);
    std::vector<int> ones(static_cast<std::size_t>(qubits.count()), 1);
    out.add_term(zeros, secret.alpha);
    out.add_term(ones, secret.beta);
    return out;
}

namespace detail {

/// Full-space basis term of the homogeneous/position-dependent closed
/// forms: walker 1 at `p1`, the other walkers all at `side`, sender coins
/// all `coin_bit`, receiver coins set to `pattern`.
inline std::vector<int> branch_digits(const SystemShape& shape, int p1, int side, int coin_bit,
                                      const std::vector<int>& pattern) {
    BasisState b;
    b.positions.push_back(p1);
    for (int i = 2; i <= shape.walkers(); ++i) b.positions.push_back(side);
    b.coins.assign(static_cast<std::size_t>(shape.walkers()), coin_bit);
    for (int bit : pattern) b.coins.push_back(bit);
    return shape.digits_of(b);
}

}  // namespace detail

/// The homogeneous-coin stage-two output in closed form, unnormalized as
/// printed: sum over k of (alpha at walker-1 position m+1-2k with senders
/// up, plus beta at m-1-2k with senders down) times the weight-k
/// permutation sum on the receiver coins.
inline StateVector closed_form_h_unnormalized(const SystemShape& shape, const SecretSpec& secret) {
    const int m = shape.receivers();
    StateVector out(shape.full_space());
    for (int k = 0; k <= m; ++k) {
        for_each_pattern(m, k, [&](const std::vector<int>& pattern) {
            out.add_term(detail::branch_digits(shape, m + 1 - 2 * k, 1, 0, pattern), secret.alpha);
            out.add_term(detail::branch_digits(shape, m - 1 - 2 * k, -1, 1, pattern), secret.beta);
        });
    }
    return out;
}

inline StateVector closed_form_h(const SystemShape& shape, const SecretSpec& secret) {
    return closed_form_h_unnormalized(shape, secret).normalized();
}

/// The same state regrouped by the last receiver coin's value (the
/// four-group appendix form). Built term-for-term from the regrouped sums;
/// must match closed_form_h as an exact term multiset.
inline StateVector closed_form_h_reordered_unnormalized(const SystemShape& shape, const SecretSpec& secret) {
    const int m = shape.receivers();
    const LambdaRanges r(m);
    StateVector out(shape.full_space());

    auto add_alpha = [&](int k, int helper_ones, int last_bit) {
        for_each_pattern(m - 1, helper_ones, [&](const std::vector<int>& helper) {
            std::vector<int> pattern = helper;
            pattern.push_back(last_bit);
            out.add_term(detail::branch_digits(shape, m + 1 - 2 * k, 1, 0, pattern), secret.alpha);
        });
    };
    auto add_beta = [&](int k, int helper_ones, int last_bit) {
        for_each_pattern(m - 1, helper_ones, [&](const std::vector<int>& helper) {
            std::vector<int> pattern = helper;
            pattern.push_back(last_bit);
            out.add_term(detail::branch_digits(shape, m + 1 - 2 * k, -1, 1, pattern), secret.beta);
        });
    };

    // group 1: alpha even-weight patterns ending in 0, beta even ending in 1
    for (int k = 0; k <= r.m_dprime; ++k) add_alpha(2 * k, 2 * k, 0);
    for (int k = 0; k <= r.m_dprime; ++k) add_beta(2 * k + 2, 2 * k, 1);
    // group 2: alpha even ending in 1, beta odd ending in 0
    for (int k = 1; k <= r.m_prime; ++k) add_alpha(2 * k, 2 * k - 1, 1);
    for (int k = 0; k <= r.m_prime - 1; ++k) add_beta(2 * k + 2, 2 * k + 1, 0);
    // group 3: alpha odd ending in 0, beta odd ending in 1
    for (int k = 0; k <= r.m_prime - 1; ++k) add_alpha(2 * k + 1, 2 * k + 1, 0);
    for (int k = 1; k <= r.m_prime; ++k) add_beta(2 * k + 1, 2 * k - 1, 1);
    // group 4: alpha odd ending in 1, beta odd ending in 0
    for (int k = 0; k <= r.m_dprime; ++k) add_alpha(2 * k + 1, 2 * k, 1);
    for (int k = 0; k <= r.m_dprime; ++k) add_beta(2 * k + 1, 2 * k, 0);

    return out;
}

/// The position-dependent stage-two output in closed form: two branches at
/// walker-1 positions +-(m+1) with aligned receiver coins.
inline StateVector closed_form_p_unnormalized(const SystemShape& shape, const SecretSpec& secret) {
    const int m = shape.receivers();
    StateVector out(shape.full_space());
    out.add_term(detail::branch_digits(shape, m + 1, 1, 0, std::vector<int>(static_cast<std::size_t>(m), 0)),
                 secret.alpha);
    out.add_term(detail::branch_digits(shape, -(m + 1), -1, 1, std::vector<int>(static_cast<std::size_t>(m), 1)),
                 secret.beta);
    return out;
}

inline StateVector closed_form_p(const SystemShape& shape, const SecretSpec& secret) {
    return closed_form_p_unnormalized(shape, secret).normalized();
}

/// The rewrite of the m-qubit shared secret as parity-split X-basis
/// patterns on the first m-1 qubits against |phi> / sigma_z |phi> on the
/// last, using |+-> = (|0> +- |1>)/sqrt(2). Equals the shared secret up to
/// the overall 2^((m-1)/2) the rewrite drops.
inline StateVector shared_secret_xbasis_expansion(const SecretSpec& secret, const SlotSpace& qubits) {
    const int m = qubits.count();
    require(m >= 1, "shared_secret_xbasis_expansion: need at least one qubit");
    StateVector out(qubits);
    const double s = 1.0 / std::numbers::sqrt2;
    std::vector<int> digits(static_cast<std::size_t>(m));
    for (std::uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
        const int weight = std::popcount(mask);
        const cplx last0 = secret.alpha;
        const cplx last1 = (weight % 2 == 0) ? secret.beta : -secret.beta;
        // expand the X-basis product state into computational terms
        for (std::uint32_t bits = 0; bits < (1u << (m - 1)); ++bits) {
            double coeff = 1.0;
            for (int q = 0; q < m - 1; ++q) {
                const bool minus = (mask >> (m - 2 - q)) & 1u;
                const bool one = (bits >> (m - 2 - q)) & 1u;
                coeff *= (minus && one) ? -s : s;
                digits[static_cast<std::size_t>(q)] = one ? 1 : 0;
            }
            digits[static_cast<std::size_t>(m - 1)] = 0;
            out.add_term(digits, coeff * last0);
            digits[static_cast<std::size_t>(m - 1)] = 1;
            out.add_term(digits, coeff * last1);
        }
    }
    return out;
}

namespace detail {

inline double branch_angle(const LambdaRanges& r, const BasisLabel& p1) {
    return p1.branch == 0 ? r.dotted_angle(p1.index) : r.double_dotted_angle(p1.index);
}

inline int omega_h(const OutcomeRecord& rec) {
    int w = 0;
    for (int b : rec.p_bits) w += b;
    for (int b : rec.c_bits) w += b;
    return w % 2;
}

inline int omega_p(const OutcomeRecord& rec) { return (omega_h(rec) + rec.p1.branch) % 2; }

/// Adds sum_j phase(j) P[|1>^j |0>^(m-1-j)] (x) (local qubit state) over
/// the m receiver qubits, summing j over one parity class.
inline void add_parity_split(StateVector& out, int helpers, bool odd_j, const std::function<cplx(int)>& phase,
                             const cplx last0, const cplx last1) {
    for (int j = odd_j ? 1 : 0; j <= helpers; j += 2) {
        const cplx f = phase(j);
        for_each_pattern(helpers, j, [&](const std::vector<int>& helper) {
            std::vector<int> digits = helper;
            digits.push_back(0);
            out.add_term(digits, f * last0);
            digits.back() = 1;
            out.add_term(digits, f * last1);
        });
    }
}

}  // namespace detail

/// The receivers' conditional state before corrections, in closed form.
///
/// Homogeneous variant, outcome (0, s): even-weight patterns carry
/// alpha e^{i l theta_s} (weight 2l), odd-weight patterns carry
/// (-1)^omega beta e^{i (l+1) theta_s} (weight 2l+1), with
/// theta_s = 2 pi s / (m'''+1). Outcome (1, t) swaps the parity roles and
/// both sectors carry e^{i l theta_t}, theta_t = 2 pi t / (m'+1). The
/// compact form this is usually quoted in omits the weight-dependent
/// phases; the projection of the stage-two output fixes them, and the m=2
/// case reduces to the familiar four-term states.
inline StateVector expected_receiver_state(Variant variant, const SystemShape& shape, const OutcomeRecord& outcome,
                                           const SecretSpec& secret) {
    const SlotSpace qubits = shape.receiver_space();
    const int m = shape.receivers();
    if (variant == Variant::position_dependent) {
        const double sign = detail::omega_p(outcome) ? -1.0 : 1.0;
        StateVector out(qubits);
        out.add_term(std::vector<int>(static_cast<std::size_t>(m), 0), secret.alpha);
        out.add_term(std::vector<int>(static_cast<std::size_t>(m), 1), sign * secret.beta);
        return out.normalized();
    }

    const LambdaRanges r(m);
    const double theta = detail::branch_angle(r, outcome.p1);
    const double omega_sign = detail::omega_h(outcome) ? -1.0 : 1.0;
    StateVector out(qubits);
    if (outcome.p1.branch == 0) {
        for (int l = 0; l <= r.m_prime; ++l) {
            const cplx f = secret.alpha * std::polar(1.0, l * theta);
            for_each_pattern(m, 2 * l, [&](const std::vector<int>& bits) { out.add_term(bits, f); });
        }
        for (int l = 0; l <= r.m_dprime; ++l) {
            const cplx f = omega_sign * secret.beta * std::polar(1.0, (l + 1) * theta);
            for_each_pattern(m, 2 * l + 1, [&](const std::vector<int>& bits) { out.add_term(bits, f); });
        }
    } else {
        for (int l = 0; l <= r.m_dprime; ++l) {
            const cplx f = secret.alpha * std::polar(1.0, l * theta);
            for_each_pattern(m, 2 * l + 1, [&](const std::vector<int>& bits) { out.add_term(bits, f); });
        }
        for (int l = 0; l <= r.m_prime; ++l) {
            const cplx f = omega_sign * secret.beta * std::polar(1.0, l * theta);
            for_each_pattern(m, 2 * l, [&](const std::vector<int>& bits) { out.add_term(bits, f); });
        }
    }
    return out.normalized();
}

/// The receivers' state after local corrections, in closed form, with the
/// designated (sigma_x-bearing or rotation-bearing) receiver at index
/// `corrected_receiver`. Built for the last receiver and then swapped into
/// place; the remaining m-1 qubits enter symmetrically.
inline StateVector expected_corrected_state(Variant variant, const SystemShape& shape, const OutcomeRecord& outcome,
                                            const SecretSpec& secret, int corrected_receiver,
                                            CorrectionStyle style = CorrectionStyle::pauli) {
    const SlotSpace qubits = shape.receiver_space();
    const int m = shape.receivers();
    require(corrected_receiver >= 1 && corrected_receiver <= m, "expected_corrected_state: bad receiver index");

    if (variant == Variant::position_dependent) {
        StateVector out(qubits);
        out.add_term(std::vector<int>(static_cast<std::size_t>(m), 0), secret.alpha);
        out.add_term(std::vector<int>(static_cast<std::size_t>(m), 1), secret.beta);
        return out.normalized();
    }

    const LambdaRanges r(m);
    const double theta = detail::branch_angle(r, outcome.p1);
    const cplx a = secret.alpha;
    const cplx b = secret.beta;
    const cplx eitheta = std::polar(1.0, theta);
    auto phase = [&](double half_steps) { return std::polar(1.0, half_steps * theta / 2.0); };

    StateVector out(qubits);
    const bool dotted = outcome.p1.branch == 0;
    if (style == CorrectionStyle::pauli) {
        if (dotted) {
            // even helper weight j: e^{i j theta/2} (x) sigma_x R_z(theta)|phi>
            detail::add_parity_split(out, m - 1, false, [&](int j) { return phase(j); }, eitheta * b, a);
            // odd j: e^{i (j+1) theta/2} (x) |phi>
            detail::add_parity_split(out, m - 1, true, [&](int j) { return phase(j + 1); }, a, b);
        } else {
            // even j: |phi>; odd j: e^{i (j-1) theta/2} (x) sigma_x R_z(theta)|phi>
            detail::add_parity_split(out, m - 1, false, [&](int j) { return phase(j); }, a, b);
            detail::add_parity_split(out, m - 1, true, [&](int j) { return phase(j - 1); }, eitheta * b, a);
        }
    } else {
        if (dotted) {
            detail::add_parity_split(out, m - 1, false, [&](int j) { return phase(j); }, a, b);
            detail::add_parity_split(out, m - 1, true, [&](int j) { return phase(j - 1); }, eitheta * b, a);
        } else {
            detail::add_parity_split(out, m - 1, true, [&](int j) { return phase(j - 1); }, a, b);
            detail::add_parity_split(out, m - 1, false, [&](int j) { return phase(j - 2); }, eitheta * b, a);
        }
    }
    StateVector placed = out.normalized();
    if (corrected_receiver != m) placed = swap_slots(placed, shape.receiver_coin(corrected_receiver), shape.receiver_coin(m));
    return placed;
}

// ---------------------------------------------------------------------------
// Dense reference evolution: full-array kernels over the complete composite
// space, used to cross-check the sparse walk path. Deliberately written
// against raw index arithmetic rather than the sparse containers.
// ---------------------------------------------------------------------------

using DenseState = std::vector<cplx>;

inline DenseState dense_from_sparse(const StateVector& psi) {
    DenseState v(psi.space().total_dim(), cplx{0.0, 0.0});
    for (const auto& [idx, a] : psi.amplitudes()) v[idx] = a;
    return v;
}

inline StateVector sparse_from_dense(const SlotSpace& space, const DenseState& v) {
    StateVector out(space);
    for (std::uint64_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) >= prune_eps) out.add_term(i, v[i]);
    return out;
}

inline DenseState dense_apply_coin(const SlotSpace& space, const DenseState& in, const Slot& coin, const CoinRule& rule,
                                   int key_position_slot_index = -1) {
    const int ci = space.find(coin);
    require(ci >= 0, "dense_apply_coin: slot missing");
    DenseState out(in.size(), cplx{0.0, 0.0});
    const int offset = key_position_slot_index >= 0 ? space.position_offset(key_position_slot_index) : 0;
    for (std::uint64_t idx = 0; idx < in.size(); ++idx) {
        if (std::abs(in[idx]) == 0.0) continue;
        const Mat2& u = rule.is_position_dependent()
                            ? rule.matrix_at(space.digit_at(idx, key_position_slot_index) - offset)
                            : rule.matrix_at(std::nullopt);
        const int bit = space.digit_at(idx, ci);
        for (int w = 0; w < 2; ++w) out[space.with_digit(idx, ci, w)] += u(w, bit) * in[idx];
    }
    return out;
}

inline DenseState dense_apply_shift(const SlotSpace& space, const DenseState& in, const Slot& walker_position,
                                    const Slot& coin) {
    const int pi = space.find(walker_position);
    const int ci = space.find(coin);
    require(pi >= 0 && ci >= 0, "dense_apply_shift: slot missing");
    const int dim = space.dim(pi);
    DenseState out(in.size(), cplx{0.0, 0.0});
    for (std::uint64_t idx = 0; idx < in.size(); ++idx) {
        if (std::abs(in[idx]) == 0.0) continue;
        const int digit = space.digit_at(idx, pi);
        const int next = digit + (space.digit_at(idx, ci) == 0 ? 1 : -1);
        require(next >= 0 && next < dim, "dense_apply_shift: position bound overflow");
        out[space.with_digit(idx, pi, next)] += in[idx];
    }
    return out;
}

inline DenseState dense_apply_step(const SlotSpace& space, const DenseState& in, const StepSpec& step,
                                   int key_position_slot_index = -1) {
    DenseState mid = dense_apply_coin(space, in, step.active_coin, step.coin_rule, key_position_slot_index);
    return dense_apply_shift(space, mid, position_slot(step.shifted_walker), step.active_coin);
}

/// One sub-step materialized as an explicit matrix, column by column. The
/// shift is undefined on basis states at the truncation edge; those columns
/// are marked invalid and may only multiply zero amplitudes.
struct DenseStepMatrix {
    std::vector<DenseState> columns;
    std::vector<bool> valid;
};

inline DenseStepMatrix dense_step_matrix(const SlotSpace& space, const StepSpec& step,
                                         int key_position_slot_index = -1) {
    const int pi = space.find(position_slot(step.shifted_walker));
    const int ci = space.find(step.active_coin);
    require(pi >= 0 && ci >= 0, "dense_step_matrix: slot missing");
    const int dim = space.dim(pi);
    DenseStepMatrix m;
    m.columns.reserve(space.total_dim());
    m.valid.reserve(space.total_dim());
    (void)ci;
    for (std::uint64_t c = 0; c < space.total_dim(); ++c) {
        const int digit = space.digit_at(c, pi);
        // the coin may steer either way, so both neighbours must exist
        const bool edge_ok = digit + 1 < dim && digit - 1 >= 0;
        m.valid.push_back(edge_ok);
        if (!edge_ok) {
            m.columns.emplace_back(space.total_dim(), cplx{0.0, 0.0});
            continue;
        }
        DenseState e(space.total_dim(), cplx{0.0, 0.0});
        e[c] = 1.0;
        m.columns.push_back(dense_apply_step(space, e, step, key_position_slot_index));
    }
    return m;
}

inline DenseState dense_matvec(const DenseStepMatrix& m, const DenseState& x) {
    DenseState y(x.size(), cplx{0.0, 0.0});
    for (std::uint64_t c = 0; c < x.size(); ++c) {
        if (std::abs(x[c]) == 0.0) continue;
        require(m.valid[c], "dense_matvec: amplitude on a truncation-edge column");
        for (std::uint64_t r = 0; r < x.size(); ++r) y[r] += m.columns[c][r] * x[c];
    }
    return y;
}

inline DenseState dense_stage_one(const SystemShape& shape, const DenseState& in, const std::vector<CoinRule>& rules) {
    const SlotSpace space = shape.full_space();
    DenseState v = in;
    for (const StepSpec& s : stage_one_steps(shape, rules)) v = dense_apply_coin(space, v, s.active_coin, s.coin_rule);
    for (const StepSpec& s : stage_one_steps(shape, rules))
        v = dense_apply_shift(space, v, position_slot(s.shifted_walker), s.active_coin);
    return v;
}

inline DenseState dense_stage_two(const SystemShape& shape, const DenseState& in, const std::vector<CoinRule>& rules) {
    const SlotSpace space = shape.full_space();
    const int p1 = space.find(shape.position(1));
    DenseState v = in;
    for (const StepSpec& s : stage_two_steps(shape, rules)) v = dense_apply_step(space, v, s, p1);
    return v;
}

}  // namespace walkport::oracle
