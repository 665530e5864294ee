#pragma once

#include <json.hpp>
#include <string>

#include "walkport/protocol.hpp"
#include "walkport/security.hpp"

namespace walkport {

using json = nlohmann::json;

/// Serializes a state as an array of terms. Positions and coin bits appear
/// in canonical order; states over a subspace list only the slots they
/// have, with the slot names recorded once at the top level of reports.
inline json to_json(const StateVector& psi) {
    json terms = json::array();
    psi.for_each_term([&](const std::vector<int>& digits, cplx a) {
        json positions = json::array();
        json coins = json::array();
        for (int i = 0; i < psi.space().count(); ++i) {
            const Slot slot = psi.space().slots()[static_cast<std::size_t>(i)];
            if (slot.kind == SlotKind::position)
                positions.push_back(digits[static_cast<std::size_t>(i)] - psi.space().position_offset(i));
            else
                coins.push_back(digits[static_cast<std::size_t>(i)]);
        }
        terms.push_back({{"positions", positions}, {"coins", coins}, {"re", a.real()}, {"im", a.imag()}});
    });
    return terms;
}

inline json to_json(const OutcomeRecord& rec) {
    return {{"p1", {{"branch", rec.p1.branch}, {"index", rec.p1.index}}},
            {"p", rec.p_bits},
            {"c", rec.c_bits},
            {"prob", rec.probability}};
}

inline json to_json(const CorrectionPlan& plan) {
    json ops = json::array();
    for (PauliOp op : plan.per_receiver) ops.push_back(pauli_op_name(op));
    json out = {{"ops", ops}};
    if (plan.rz_angle) {
        out["rz"] = {{"receiver", plan.rz_receiver}, {"angle", *plan.rz_angle}};
    }
    return out;
}

inline const char* variant_name(Variant v) {
    return v == Variant::homogeneous ? "homogeneous" : "position-dependent";
}

inline json to_json(const ProtocolConfig& config, const SecretSpec& secret) {
    return {{"n", config.n},
            {"m", config.m},
            {"variant", variant_name(config.variant)},
            {"corrected_receiver", config.corrected_receiver},
            {"alpha", {secret.alpha.real(), secret.alpha.imag()}},
            {"beta", {secret.beta.real(), secret.beta.imag()}}};
}

inline json to_json(const std::vector<StepSpec>& steps, const SystemShape& shape) {
    json out = json::array();
    for (const StepSpec& s : steps) {
        json rule;
        switch (s.coin_rule.kind()) {
            case CoinRule::Kind::identity: rule = "I"; break;
            case CoinRule::Kind::hadamard: rule = "H"; break;
            case CoinRule::Kind::pauli_x: rule = "X"; break;
            case CoinRule::Kind::pauli_z: rule = "Z"; break;
            case CoinRule::Kind::position_dependent: rule = "position-dependent"; break;
        }
        out.push_back({{"coin", shape.slot_name(s.active_coin)},
                       {"shifted_walker", s.shifted_walker},
                       {"rule", rule}});
    }
    return out;
}

inline json to_json(const security::SweepEntry& entry) {
    json probe = json::array();
    for (const auto& p : entry.probe) probe.push_back(security::party_name(p));
    return {{"measured", entry.measured},
            {"probe", probe},
            {"worst_deviation", entry.report.worst_unconditional},
            {"worst_deviation_given_records", entry.report.worst_conditional},
            {"sector_defect", entry.report.sector_decomposition_defect},
            {"sector_weights", {entry.report.sector_weight_alpha, entry.report.sector_weight_beta}},
            {"leaks_given_records", entry.report.leaks_given_records},
            {"pass", entry.report.pass}};
}

}  // namespace walkport
