#pragma once

#include <optional>
#include <vector>

#include "walkport/coins.hpp"
#include "walkport/state.hpp"

namespace walkport {

/// One coin-then-shift sub-step: the active coin is transformed, then the
/// paired walker's position register moves under its control. In stage one
/// coin c_{i,1} pairs with walker i; in stage two every extra coin of
/// walker 1 pairs with walker 1.
struct StepSpec {
    Slot active_coin;
    int shifted_walker = 1;
    CoinRule coin_rule = CoinRule::identity();
};

/// Applies the 2x2 coin unitary to one coin slot. For position-dependent
/// rules the matrix is selected by the current position in
/// `key_position_slot`; each position branch of the superposition gets its
/// own matrix.
inline StateVector apply_coin(const StateVector& psi, const Slot& slot, const CoinRule& rule,
                              std::optional<Slot> key_position_slot = std::nullopt) {
    require(slot.kind == SlotKind::coin, "apply_coin: not a coin slot");
    if (!rule.is_position_dependent()) {
        const Mat2& u = rule.matrix_at(std::nullopt);
        return apply_local(psi, slot, std::span<const cplx>(u.u.data(), 4));
    }
    require(key_position_slot.has_value(), "apply_coin: position-dependent rule needs a key position slot");
    const int ci = psi.space().find(slot);
    const int pi = psi.space().find(*key_position_slot);
    require(ci >= 0 && pi >= 0, "apply_coin: slot not in state space");
    const int offset = psi.space().position_offset(pi);
    StateVector out(psi.space());
    for (const auto& [idx, a] : psi.amplitudes()) {
        const int pos = psi.space().digit_at(idx, pi) - offset;
        const Mat2& u = rule.matrix_at(pos);
        const int b = psi.space().digit_at(idx, ci);
        for (int w = 0; w < 2; ++w) {
            const cplx e = u(w, b);
            if (std::abs(e) < prune_eps) continue;
            out.add_term(psi.space().with_digit(idx, ci, w), e * a);
        }
    }
    return out;
}

/// Conditional shift: coin bit 0 moves the walker up one site, bit 1 moves
/// it down. Stepping outside the position register's range means the system
/// shape was sized wrong for the circuit and is reported as an error.
inline StateVector apply_conditional_shift(const StateVector& psi, const Slot& walker_position, const Slot& coin) {
    const int pi = psi.space().find(walker_position);
    const int ci = psi.space().find(coin);
    require(pi >= 0, "apply_conditional_shift: position slot not in state space");
    require(ci >= 0, "apply_conditional_shift: coin slot not in state space");
    require(walker_position.kind == SlotKind::position && coin.kind == SlotKind::coin,
            "apply_conditional_shift: slot kinds mixed up");
    const int dim = psi.space().dim(pi);
    StateVector out(psi.space());
    for (const auto& [idx, a] : psi.amplitudes()) {
        const int digit = psi.space().digit_at(idx, pi);
        const int next = digit + (psi.space().digit_at(idx, ci) == 0 ? 1 : -1);
        require(next >= 0 && next < dim, "apply_conditional_shift: position bound overflow");
        out.add_term(psi.space().with_digit(idx, pi, next), a);
    }
    return out;
}

inline StateVector apply_step(const StateVector& psi, const StepSpec& step,
                              std::optional<Slot> key_position_slot = std::nullopt) {
    StateVector out = apply_coin(psi, step.active_coin, step.coin_rule,
                                 step.coin_rule.is_position_dependent() ? key_position_slot : std::nullopt);
    return apply_conditional_shift(out, position_slot(step.shifted_walker), step.active_coin);
}

inline std::vector<StepSpec> stage_one_steps(const SystemShape& shape, const std::vector<CoinRule>& coin_rules) {
    require(static_cast<int>(coin_rules.size()) == shape.walkers(), "stage_one: need one coin rule per walker");
    std::vector<StepSpec> steps;
    for (int i = 1; i <= shape.walkers(); ++i)
        steps.push_back({shape.first_coin(i), i, coin_rules[static_cast<std::size_t>(i - 1)]});
    return steps;
}

inline std::vector<StepSpec> stage_two_steps(const SystemShape& shape, const std::vector<CoinRule>& coin_rules) {
    require(static_cast<int>(coin_rules.size()) == shape.receivers(), "stage_two: need one coin rule per receiver coin");
    std::vector<StepSpec> steps;
    for (int j = 1; j <= shape.receivers(); ++j)
        steps.push_back({shape.receiver_coin(j), 1, coin_rules[static_cast<std::size_t>(j - 1)]});
    return steps;
}

/// First evolution stage: each walker's first coin is flipped, then each
/// walker takes one conditional step. Coins are applied before any shift,
/// matching the operator product of a full coin layer followed by a full
/// shift layer; the two orderings agree because the sub-steps act on
/// disjoint registers.
inline StateVector stage_one(const StateVector& psi, const SystemShape& shape, const std::vector<CoinRule>& coin_rules) {
    for (const CoinRule& rule : coin_rules)
        require(!rule.is_position_dependent(), "stage_one: position-dependent first coins are not part of the protocol");
    StateVector out = psi;
    const auto steps = stage_one_steps(shape, coin_rules);
    for (const StepSpec& s : steps) out = apply_coin(out, s.active_coin, s.coin_rule);
    for (const StepSpec& s : steps) out = apply_conditional_shift(out, position_slot(s.shifted_walker), s.active_coin);
    return out;
}

/// Second evolution stage: for j = 1..m in ascending order, flip coin
/// c_{1,j+1} and conditionally shift walker 1. Position-dependent rules are
/// keyed on walker 1's position before this sub-step's shift.
inline StateVector stage_two(const StateVector& psi, const SystemShape& shape, const std::vector<CoinRule>& coin_rules) {
    StateVector out = psi;
    for (const StepSpec& s : stage_two_steps(shape, coin_rules)) out = apply_step(out, s, shape.position(1));
    return out;
}

inline std::vector<CoinRule> homogeneous_rules(int count, const CoinRule& rule) {
    return std::vector<CoinRule>(static_cast<std::size_t>(count), rule);
}

/// The stage-two coin table that routes the two branches apart: identity at
/// +j, a bit flip at -j, nothing else reachable. Unlisted positions are
/// rejected so a mis-sequenced step fails loudly.
inline std::vector<CoinRule> position_dependent_rules(int receivers) {
    std::vector<CoinRule> rules;
    for (int j = 1; j <= receivers; ++j)
        rules.push_back(CoinRule::position_dependent({{j, mat2_identity()}, {-j, mat2_pauli_x()}}));
    return rules;
}

}  // namespace walkport
