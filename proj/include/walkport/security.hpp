#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "walkport/density.hpp"
#include "walkport/protocol.hpp"

namespace walkport::security {

/// A participant role: sender i owns walker i's position and first coin as
/// a unit; receiver j owns one coin. Probe subsets are formed over these
/// roles, not over raw slots.
struct Party {
    enum class Kind { sender, receiver };
    Kind kind = Kind::sender;
    int index = 1;

    friend constexpr auto operator<=>(const Party&, const Party&) = default;
};

inline Party sender(int i) { return {Party::Kind::sender, i}; }
inline Party receiver(int j) { return {Party::Kind::receiver, j}; }

inline std::string party_name(const Party& p) {
    return (p.kind == Party::Kind::sender ? "s" : "r") + std::to_string(p.index);
}

inline std::vector<Slot> party_slots(const SystemShape& shape, const Party& p) {
    if (p.kind == Party::Kind::sender) return {shape.position(p.index), shape.first_coin(p.index)};
    return {shape.receiver_coin(p.index)};
}

/// A partial-measurement probe scenario: the listed senders measure their
/// two slots with the protocol's own bases, and the probe is a coalition of
/// the remaining participants. The probe must be a nonempty strict subset
/// of whoever remains; the full remaining set jointly holds a pure state
/// that trivially retains the secret, so it is outside the claim.
struct SecurityScenario {
    ProtocolConfig config;
    SecretSpec secret;
    std::vector<int> measured_senders;
    std::vector<Party> probe;
};

inline std::vector<Party> remaining_parties(const ProtocolConfig& config, const std::vector<int>& measured) {
    std::vector<Party> out;
    for (int i = 1; i <= config.n; ++i)
        if (std::find(measured.begin(), measured.end(), i) == measured.end()) out.push_back(sender(i));
    for (int j = 1; j <= config.m; ++j) out.push_back(receiver(j));
    return out;
}

inline void validate_scenario(const SecurityScenario& sc) {
    sc.config.validate();
    for (int i : sc.measured_senders)
        require(i >= 1 && i <= sc.config.n, "SecurityScenario: measured sender out of range");
    const auto remaining = remaining_parties(sc.config, sc.measured_senders);
    require(!sc.probe.empty(), "SecurityScenario: probe subset must be nonempty");
    for (const Party& p : sc.probe) {
        require(std::find(remaining.begin(), remaining.end(), p) != remaining.end(),
                "SecurityScenario: probe party is not among the remaining participants");
    }
    require(sc.probe.size() < remaining.size(),
            "SecurityScenario: probe covers all remaining participants; the joint state is pure and trivially "
            "retains the secret, so only strict sub-parties are in scope");
}

inline std::vector<Slot> probe_slots(const SystemShape& shape, const std::vector<Party>& probe) {
    std::vector<Slot> slots;
    for (const Party& p : probe)
        for (const Slot& s : party_slots(shape, p)) slots.push_back(s);
    return slots;
}

inline std::vector<MeasurementBasis> scenario_bases(const SecurityScenario& sc, const SystemShape& shape) {
    std::vector<MeasurementBasis> bases;
    for (int i : sc.measured_senders) {
        if (i == 1)
            bases.push_back(sc.config.variant == Variant::homogeneous ? build_lambda_h(shape)
                                                                      : build_lambda_p(shape));
        else
            bases.push_back(build_theta(shape, i));
        bases.push_back(build_delta(shape, i));
    }
    return bases;
}

/// Conditional states of the remaining participants after the listed
/// senders measure, one per outcome. With nobody measured this is the
/// stage-two output itself.
inline std::vector<BranchResult> residual_after_partial_measurement(const SecurityScenario& sc) {
    sc.config.validate();
    const SystemShape shape = sc.config.shape();
    const StateVector evolved = evolve(sc.config, sc.secret);
    if (sc.measured_senders.empty()) return {{{}, 1.0, evolved}};
    return measure_slots(evolved, scenario_bases(sc, shape), MeasureMode::enumerate_all);
}

/// The probe's unconditional reduced state: measuring and discarding the
/// outcomes is the same as tracing the measured slots out, so this is the
/// partial trace of the evolved pure state down to the probe's slots.
inline DensityMatrix probe_state_unconditional(const SecurityScenario& sc) {
    const SystemShape shape = sc.config.shape();
    const StateVector evolved = evolve(sc.config, sc.secret);
    return partial_trace(evolved, probe_slots(shape, sc.probe)).normalized();
}

struct BlindnessReport {
    double worst_unconditional = 0.0;    // probe lacks the broadcast records
    double worst_conditional = 0.0;      // probe granted every record
    double sector_decomposition_defect = 0.0;
    double sector_weight_alpha = 0.0;
    double sector_weight_beta = 0.0;
    bool pass = false;
    bool leaks_given_records = false;
};

/// Phase-blindness finding for one scenario. The gated quantity is the
/// probe's unconditional reduced state: it must be entrywise invariant
/// under beta -> e^{i phi} beta and must decompose as
/// |alpha|^2 rho_0 + |beta|^2 rho_1 with secret-independent sectors.
/// Conditional (outcome-granted) deviations are also computed and reported:
/// probes whose traced-out complement lies entirely inside the receiver set
/// can see phase information once the records are public, and such
/// scenarios are flagged rather than failed.
inline BlindnessReport phase_blindness_check(const SecurityScenario& sc, const std::vector<double>& phases) {
    validate_scenario(sc);
    const SystemShape shape = sc.config.shape();
    const auto keep = probe_slots(shape, sc.probe);

    auto rotated = [&](double phi) {
        SecurityScenario copy = sc;
        copy.secret = SecretSpec(sc.secret.alpha, sc.secret.beta * std::polar(1.0, phi));
        return copy;
    };

    BlindnessReport report;
    const DensityMatrix base = probe_state_unconditional(sc);
    for (double phi : phases) {
        const DensityMatrix other = probe_state_unconditional(rotated(phi));
        report.worst_unconditional = std::max(report.worst_unconditional, base.max_abs_diff(other));
    }

    // conditional: match outcomes across the phase sweep by label sequence
    auto conditional_states = [&](const SecurityScenario& scenario) {
        std::vector<DensityMatrix> rhos;
        for (const BranchResult& branch : residual_after_partial_measurement(scenario))
            rhos.push_back(partial_trace(branch.residual, keep).normalized());
        return rhos;
    };
    const auto base_cond = conditional_states(sc);
    for (double phi : phases) {
        const auto other_cond = conditional_states(rotated(phi));
        require(other_cond.size() == base_cond.size(), "phase_blindness_check: outcome sets differ across phases");
        for (std::size_t i = 0; i < base_cond.size(); ++i)
            report.worst_conditional = std::max(report.worst_conditional, base_cond[i].max_abs_diff(other_cond[i]));
    }

    // sector structure: the unconditional state against its two pure-secret sectors
    SecurityScenario alpha_only = sc;
    alpha_only.secret = SecretSpec(cplx{1.0, 0.0}, cplx{0.0, 0.0});
    SecurityScenario beta_only = sc;
    beta_only.secret = SecretSpec(cplx{0.0, 0.0}, cplx{1.0, 0.0});
    DensityMatrix mix = probe_state_unconditional(alpha_only).scaled(std::norm(sc.secret.alpha));
    mix.accumulate(probe_state_unconditional(beta_only), std::norm(sc.secret.beta));
    report.sector_decomposition_defect = base.max_abs_diff(mix);
    report.sector_weight_alpha = std::norm(sc.secret.alpha);
    report.sector_weight_beta = std::norm(sc.secret.beta);

    report.leaks_given_records = report.worst_conditional > compare_tol;
    report.pass = report.worst_unconditional <= compare_tol && report.sector_decomposition_defect <= compare_tol;
    return report;
}

struct SweepEntry {
    std::vector<int> measured;
    std::vector<Party> probe;
    BlindnessReport report;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    double worst_unconditional = 0.0;
    double worst_sector_defect = 0.0;
    bool pass = true;
    int flagged_conditional = 0;
};

inline std::vector<std::vector<Party>> strict_subsets(const std::vector<Party>& parties, std::size_t max_size) {
    std::vector<std::vector<Party>> out;
    const std::size_t count = parties.size();
    for (std::uint32_t mask = 1; mask + 1 < (1u << count); ++mask) {
        std::vector<Party> subset;
        for (std::size_t i = 0; i < count; ++i)
            if (mask & (1u << i)) subset.push_back(parties[i]);
        if (!subset.empty() && subset.size() <= max_size) out.push_back(std::move(subset));
    }
    return out;
}

/// Exhaustive desk-scale sweep: every nonempty measured-sender subset and
/// every nonempty strict probe subset up to `max_subset_size`, checked for
/// phase blindness at a fixed set of probe angles.
inline SweepReport sweep_all_subsets(const ProtocolConfig& config, const SecretSpec& secret,
                                     std::size_t max_subset_size = 16,
                                     const std::vector<double>& phases = {0.0, std::numbers::pi / 4,
                                                                          std::numbers::pi / 2, std::numbers::pi,
                                                                          2.1}) {
    config.validate();
    SweepReport sweep;
    for (std::uint32_t mask = 1; mask < (1u << config.n); ++mask) {
        std::vector<int> measured;
        for (int i = 1; i <= config.n; ++i)
            if (mask & (1u << (i - 1))) measured.push_back(i);
        const auto remaining = remaining_parties(config, measured);
        for (auto& probe : strict_subsets(remaining, max_subset_size)) {
            SecurityScenario sc{config, secret, measured, probe};
            SweepEntry entry{measured, probe, phase_blindness_check(sc, phases)};
            sweep.worst_unconditional = std::max(sweep.worst_unconditional, entry.report.worst_unconditional);
            sweep.worst_sector_defect = std::max(sweep.worst_sector_defect, entry.report.sector_decomposition_defect);
            sweep.pass = sweep.pass && entry.report.pass;
            if (entry.report.leaks_given_records) ++sweep.flagged_conditional;
            sweep.entries.push_back(std::move(entry));
        }
    }
    return sweep;
}

}  // namespace walkport::security
