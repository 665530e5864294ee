#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walkport/measure.hpp"
#include "walkport/oracle.hpp"
#include "walkport/parallel.hpp"
#include "walkport/secret.hpp"
#include "walkport/walk.hpp"

namespace walkport {

struct ProtocolConfig {
    int n = 2;
    int m = 2;
    Variant variant = Variant::position_dependent;
    int corrected_receiver = 1;
    CorrectionStyle style = CorrectionStyle::pauli;

    void validate() const {
        require(n >= 1, "ProtocolConfig: n must be >= 1");
        require(m >= 2, "ProtocolConfig: m must be >= 2");
        require(corrected_receiver >= 1 && corrected_receiver <= m,
                "ProtocolConfig: corrected receiver out of range");
    }

    SystemShape shape() const { return SystemShape(n, m); }
};

/// The overall initial state: every walker at the origin, the secret
/// encoded across the first coins as alpha |0...0> + beta |1...1>, and all
/// receiver coins at |0>.
inline StateVector prepare_shared_secret(const SecretSpec& secret, const SystemShape& shape) {
    StateVector psi(shape.full_space());
    BasisState alpha_term;
    alpha_term.positions.assign(static_cast<std::size_t>(shape.walkers()), 0);
    alpha_term.coins.assign(static_cast<std::size_t>(shape.coin_count()), 0);
    BasisState beta_term = alpha_term;
    for (int i = 0; i < shape.walkers(); ++i) beta_term.coins[static_cast<std::size_t>(i)] = 1;
    psi.add_term(shape.digits_of(alpha_term), secret.alpha);
    psi.add_term(shape.digits_of(beta_term), secret.beta);
    return psi;
}

/// Parity of the broadcast results. The homogeneous variant sums the
/// secondary position bits and every coin bit; the position-dependent
/// variant also includes walker 1's single-bit label.
inline int compute_omega(Variant variant, const OutcomeRecord& outcome) {
    int w = 0;
    for (int b : outcome.p_bits) w += b;
    for (int b : outcome.c_bits) w += b;
    if (variant == Variant::position_dependent) w += outcome.p1.branch;
    return w % 2;
}

enum class PauliOp { identity, pauli_z, pauli_x, pauli_zx };

inline const char* pauli_op_name(PauliOp op) {
    switch (op) {
        case PauliOp::identity: return "I";
        case PauliOp::pauli_z: return "Z";
        case PauliOp::pauli_x: return "X";
        case PauliOp::pauli_zx: return "ZX";
    }
    return "?";
}

inline Mat2 pauli_op_matrix(PauliOp op) {
    switch (op) {
        case PauliOp::identity: return mat2_identity();
        case PauliOp::pauli_z: return mat2_pauli_z();
        case PauliOp::pauli_x: return mat2_pauli_x();
        case PauliOp::pauli_zx: return mat2_pauli_z() * mat2_pauli_x();  // sigma_x acts first
    }
    return mat2_identity();
}

/// Per-receiver local corrections. In the homogeneous variant exactly one
/// receiver carries the sigma_x factor (or, in the rotation style, a
/// diagonal R_z(-theta)), all others sigma_z^omega; in the
/// position-dependent variant one receiver carries sigma_z^omega and the
/// rest do nothing.
struct CorrectionPlan {
    std::vector<PauliOp> per_receiver;
    std::optional<double> rz_angle;    // applied after the Pauli on the corrected receiver
    int rz_receiver = 0;
};

inline CorrectionPlan correction_plan(Variant variant, const OutcomeRecord& outcome, int corrected_receiver, int m,
                                      CorrectionStyle style = CorrectionStyle::pauli) {
    require(corrected_receiver >= 1 && corrected_receiver <= m, "correction_plan: receiver index out of range");
    const int omega = compute_omega(variant, outcome);
    CorrectionPlan plan;
    plan.per_receiver.assign(static_cast<std::size_t>(m), PauliOp::identity);
    if (variant == Variant::position_dependent) {
        if (omega) plan.per_receiver[static_cast<std::size_t>(corrected_receiver - 1)] = PauliOp::pauli_z;
        return plan;
    }
    for (int j = 1; j <= m; ++j)
        plan.per_receiver[static_cast<std::size_t>(j - 1)] = omega ? PauliOp::pauli_z : PauliOp::identity;
    auto& designated = plan.per_receiver[static_cast<std::size_t>(corrected_receiver - 1)];
    if (style == CorrectionStyle::pauli) {
        designated = omega ? PauliOp::pauli_zx : PauliOp::pauli_x;
    } else {
        const LambdaRanges r(m);
        plan.rz_angle = -(outcome.p1.branch == 0 ? r.dotted_angle(outcome.p1.index)
                                                 : r.double_dotted_angle(outcome.p1.index));
        plan.rz_receiver = corrected_receiver;
    }
    return plan;
}

/// Applies a correction plan to a residual state over the receiver coins.
inline StateVector apply_correction(const StateVector& residual, const CorrectionPlan& plan, const SystemShape& shape) {
    require(static_cast<int>(plan.per_receiver.size()) == shape.receivers(), "apply_correction: plan size mismatch");
    StateVector out = residual;
    for (int j = 1; j <= shape.receivers(); ++j) {
        const PauliOp op = plan.per_receiver[static_cast<std::size_t>(j - 1)];
        if (op != PauliOp::identity) {
            const Mat2 u = pauli_op_matrix(op);
            out = apply_local(out, shape.receiver_coin(j), std::span<const cplx>(u.u.data(), 4));
        }
        if (plan.rz_angle && plan.rz_receiver == j) {
            const Mat2 u = mat2_rz(*plan.rz_angle);
            out = apply_local(out, shape.receiver_coin(j), std::span<const cplx>(u.u.data(), 4));
        }
    }
    return out;
}

inline std::vector<CoinRule> stage_two_rules(Variant variant, int m) {
    return variant == Variant::homogeneous ? homogeneous_rules(m, CoinRule::hadamard()) : position_dependent_rules(m);
}

/// The sender measurement bases in canonical slot order: walker 1's
/// position family, the secondary walkers' position pairs, and every first
/// coin's diagonal pair.
inline std::vector<MeasurementBasis> protocol_bases(Variant variant, const SystemShape& shape) {
    std::vector<MeasurementBasis> bases;
    bases.push_back(variant == Variant::homogeneous ? build_lambda_h(shape) : build_lambda_p(shape));
    for (int k = 2; k <= shape.walkers(); ++k) bases.push_back(build_theta(shape, k));
    for (int i = 1; i <= shape.walkers(); ++i) bases.push_back(build_delta(shape, i));
    return bases;
}

/// Runs both walk stages on the prepared initial state.
inline StateVector evolve(const ProtocolConfig& config, const SecretSpec& secret) {
    const SystemShape shape = config.shape();
    StateVector psi = prepare_shared_secret(secret, shape);
    psi = stage_one(psi, shape, homogeneous_rules(shape.walkers(), CoinRule::identity()));
    return stage_two(psi, shape, stage_two_rules(config.variant, config.m));
}

/// Full step list of the two-stage circuit, for inspection and dumps.
inline std::vector<StepSpec> circuit_steps(const ProtocolConfig& config) {
    const SystemShape shape = config.shape();
    auto steps = stage_one_steps(shape, homogeneous_rules(shape.walkers(), CoinRule::identity()));
    const auto second = stage_two_steps(shape, stage_two_rules(config.variant, config.m));
    steps.insert(steps.end(), second.begin(), second.end());
    return steps;
}

/// One verified outcome of a protocol run: the record, the corrected
/// receiver state, and its fidelity against the closed-form target.
struct OutcomeVerdict {
    OutcomeRecord outcome;
    int omega = 0;
    CorrectionPlan plan;
    StateVector corrected;
    double fidelity_vs_target = 0.0;
};

struct RunResult {
    std::vector<OutcomeVerdict> outcomes;
    double min_fidelity = 1.0;
    double probability_sum = 0.0;

    bool all_pass(double tol = compare_tol) const { return min_fidelity >= 1.0 - tol; }
};

/// End-to-end protocol execution: prepare, walk, measure every sender
/// slot, correct per outcome, and verify each corrected residual against
/// its closed-form target. A fidelity below threshold is reported in the
/// result rather than thrown.
inline RunResult run_protocol(const ProtocolConfig& config, const SecretSpec& secret,
                              MeasureMode mode = MeasureMode::enumerate_all, std::uint64_t seed = 0) {
    config.validate();
    const SystemShape shape = config.shape();
    const StateVector evolved = evolve(config, secret);
    const auto measured = measure_all(evolved, shape, protocol_bases(config.variant, shape), mode, seed);

    RunResult result;
    result.outcomes = parallel_map<OutcomeVerdict>(measured.size(), [&](std::size_t i) {
        const auto& [record, residual] = measured[i];
        OutcomeVerdict v;
        v.outcome = record;
        v.omega = compute_omega(config.variant, record);
        v.plan = correction_plan(config.variant, record, config.corrected_receiver, config.m, config.style);
        v.corrected = apply_correction(residual, v.plan, shape);
        const StateVector target = oracle::expected_corrected_state(config.variant, shape, record, secret,
                                                                    config.corrected_receiver, config.style);
        v.fidelity_vs_target = fidelity(v.corrected, target);
        return v;
    });
    for (const auto& v : result.outcomes) {
        result.min_fidelity = std::min(result.min_fidelity, v.fidelity_vs_target);
        result.probability_sum += v.outcome.probability;
    }
    return result;
}

/// Decodes the secret from a post-correction receiver state given the
/// helper outcomes. Position-dependent variant: helpers measure in
/// (|0> +- |1>)/sqrt(2) and the designated receiver applies sigma_z to the
/// helper parity. Homogeneous variant: helpers read their coins in the
/// computational basis and the designated receiver undoes sigma_x R_z by
/// helper-weight parity. Returns the designated receiver's single-qubit
/// state, normalized.
inline StateVector reconstruct_secret(const StateVector& corrected, Variant variant, const OutcomeRecord& outcome,
                                      int designated_receiver, std::span<const int> helper_bits,
                                      const SystemShape& shape) {
    const int m = shape.receivers();
    require(static_cast<int>(helper_bits.size()) == m - 1, "reconstruct_secret: need m-1 helper outcomes");
    require(designated_receiver >= 1 && designated_receiver <= m, "reconstruct_secret: bad receiver index");

    const double s = 1.0 / std::numbers::sqrt2;
    StateVector current = corrected;
    int bit_pos = 0;
    int weight = 0;
    for (int j = 1; j <= m; ++j) {
        if (j == designated_receiver) continue;
        const int bit = helper_bits[static_cast<std::size_t>(bit_pos++)];
        require(bit == 0 || bit == 1, "reconstruct_secret: helper bits must be 0/1");
        weight += bit;
        std::vector<cplx> vec;
        if (variant == Variant::position_dependent) {
            vec = {cplx{s, 0.0}, cplx{bit == 0 ? s : -s, 0.0}};    // (|0> +- |1>)/sqrt(2)
        } else {
            vec = {cplx{bit == 0 ? 1.0 : 0.0, 0.0}, cplx{bit == 1 ? 1.0 : 0.0, 0.0}};
        }
        current = project_slot(current, shape.receiver_coin(j), vec);
    }
    require(current.norm_sq() > detail::probability_floor, "reconstruct_secret: helper outcome has zero probability");

    const Slot target = shape.receiver_coin(designated_receiver);
    Mat2 fixup = mat2_identity();
    if (variant == Variant::position_dependent) {
        if (weight % 2) fixup = mat2_pauli_z();
    } else {
        const LambdaRanges r(m);
        const double theta = outcome.p1.branch == 0 ? r.dotted_angle(outcome.p1.index)
                                                    : r.double_dotted_angle(outcome.p1.index);
        // dotted outcomes leave |phi> on odd helper weights, double-dotted
        // on even ones; the other parity carries sigma_x R_z(theta)
        const bool flip = outcome.p1.branch == 0 ? (weight % 2 == 0) : (weight % 2 == 1);
        if (flip) fixup = mat2_rz(-theta) * mat2_pauli_x();
    }
    current = apply_local(current, target, std::span<const cplx>(fixup.u.data(), 4));
    return current.normalized();
}

}  // namespace walkport
