#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "walkport/bases.hpp"
#include "walkport/state.hpp"

namespace walkport {

enum class MeasureMode { enumerate_all, sample_one };

struct SlotOutcome {
    Slot slot;
    BasisLabel label;
};

/// One projective branch: the labels read off the measured slots, the joint
/// probability, and the normalized conditional state on the unmeasured
/// slots.
struct BranchResult {
    std::vector<SlotOutcome> outcomes;
    double probability = 0.0;
    StateVector residual;
};

namespace detail {

inline constexpr double probability_floor = 1e-20;

inline void measure_recurse(const StateVector& current, const std::vector<MeasurementBasis>& bases, std::size_t depth,
                            std::vector<SlotOutcome>& trail, std::vector<BranchResult>& out) {
    if (depth == bases.size()) {
        const double p = current.norm_sq();
        out.push_back({trail, p, current.normalized()});
        return;
    }
    const MeasurementBasis& basis = bases[depth];
    const double before = current.norm_sq();
    double covered = 0.0;
    for (std::size_t v = 0; v < basis.vectors.size(); ++v) {
        StateVector proj = project_slot(current, basis.subsystem, basis.vectors[v]);
        const double p = proj.norm_sq();
        covered += p;
        if (p < probability_floor) continue;
        trail.push_back({basis.subsystem, basis.labels[v]});
        measure_recurse(proj, bases, depth + 1, trail, out);
        trail.pop_back();
    }
    require(std::abs(covered - before) <= compare_tol * std::max(1.0, before),
            "measure: basis incomplete on the state's support");
}

}  // namespace detail

/// Projectively measures the listed slots. `enumerate_all` walks every
/// branch with nonzero probability; `sample_one` draws a single branch from
/// the joint distribution using the seed. Measured slots are removed from
/// the residual. The joint distribution does not depend on the order the
/// bases are listed in; the per-slot labels are keyed by slot identity.
inline std::vector<BranchResult> measure_slots(const StateVector& psi, const std::vector<MeasurementBasis>& bases,
                                               MeasureMode mode, std::uint64_t seed = 0) {
    for (const auto& b : bases) {
        require(psi.space().contains(b.subsystem), "measure: basis slot not in state space");
        require(b.gram_defect() <= norm_tol, "measure: basis family is not orthonormal");
    }
    for (std::size_t i = 0; i < bases.size(); ++i)
        for (std::size_t j = i + 1; j < bases.size(); ++j)
            require(!(bases[i].subsystem == bases[j].subsystem), "measure: duplicate basis slot");

    if (mode == MeasureMode::enumerate_all) {
        std::vector<BranchResult> out;
        std::vector<SlotOutcome> trail;
        detail::measure_recurse(psi, bases, 0, trail, out);
        return out;
    }

    std::mt19937_64 rng(seed);
    StateVector current = psi;
    std::vector<SlotOutcome> trail;
    double joint = 1.0;
    for (const MeasurementBasis& basis : bases) {
        std::vector<StateVector> projections;
        std::vector<double> weights;
        for (const auto& v : basis.vectors) {
            projections.push_back(project_slot(current, basis.subsystem, v));
            weights.push_back(projections.back().norm_sq());
        }
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        require(std::abs(total - current.norm_sq()) <= compare_tol * std::max(1.0, current.norm_sq()),
                "measure: basis incomplete on the state's support");
        std::uniform_real_distribution<double> dist(0.0, total);
        double draw = dist(rng);
        std::size_t pick = weights.size() - 1;
        for (std::size_t v = 0; v < weights.size(); ++v) {
            if (draw < weights[v]) {
                pick = v;
                break;
            }
            draw -= weights[v];
        }
        joint *= weights[pick] / current.norm_sq();
        trail.push_back({basis.subsystem, basis.labels[pick]});
        current = projections[pick];
    }
    return {{trail, joint, current.normalized()}};
}

/// The 2n classical results of a full sender measurement: walker 1's
/// two-part position label, the remaining walkers' position bits, and the
/// first-coin bits, plus the branch probability.
struct OutcomeRecord {
    BasisLabel p1;
    std::vector<int> p_bits;    // p_2 .. p_n
    std::vector<int> c_bits;    // c_1 .. c_n
    double probability = 0.0;
};

struct MeasurementResult {
    OutcomeRecord outcome;
    StateVector residual;
};

/// Rebuilds the protocol-level record from slot-keyed labels; requires
/// every sender slot (n positions and n first coins) to be present.
inline OutcomeRecord assemble_outcome_record(const SystemShape& shape, const BranchResult& branch) {
    OutcomeRecord rec;
    rec.p_bits.assign(static_cast<std::size_t>(std::max(0, shape.walkers() - 1)), -1);
    rec.c_bits.assign(static_cast<std::size_t>(shape.walkers()), -1);
    rec.probability = branch.probability;
    bool saw_p1 = false;
    for (const SlotOutcome& so : branch.outcomes) {
        if (so.slot.kind == SlotKind::position) {
            if (so.slot.index == 1) {
                rec.p1 = so.label;
                saw_p1 = true;
            } else {
                rec.p_bits[static_cast<std::size_t>(so.slot.index - 2)] = so.label.branch;
            }
        } else {
            require(so.slot.index < shape.walkers(), "assemble_outcome_record: receiver coin in sender record");
            rec.c_bits[static_cast<std::size_t>(so.slot.index)] = so.label.branch;
        }
    }
    require(saw_p1, "assemble_outcome_record: walker 1 position outcome missing");
    for (int b : rec.p_bits) require(b >= 0, "assemble_outcome_record: secondary position outcome missing");
    for (int b : rec.c_bits) require(b >= 0, "assemble_outcome_record: first-coin outcome missing");
    return rec;
}

/// Measures all 2n sender slots of a normalized state and returns every
/// outcome with its conditional residual on the receiver coins.
inline std::vector<MeasurementResult> measure_all(const StateVector& psi, const SystemShape& shape,
                                                  const std::vector<MeasurementBasis>& bases, MeasureMode mode,
                                                  std::uint64_t seed = 0) {
    require(static_cast<int>(bases.size()) == 2 * shape.walkers(), "measure_all: need one basis per sender slot");
    std::vector<MeasurementResult> out;
    for (BranchResult& branch : measure_slots(psi, bases, mode, seed))
        out.push_back({assemble_outcome_record(shape, branch), std::move(branch.residual)});
    return out;
}

}  // namespace walkport
