#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "walkport/slots.hpp"

namespace walkport {

/// Finite-support complex superposition over the basis states of a
/// SlotSpace. Amplitudes live in an ordered map keyed by the packed
/// mixed-radix index, so iteration and serialization are deterministic.
/// Entries below `prune_eps` in magnitude are dropped.
class StateVector {
  public:
    using Amplitudes = std::map<std::uint64_t, cplx>;

    StateVector() = default;
    explicit StateVector(SlotSpace space) : space_(std::move(space)) {}

    static StateVector basis_state(const SlotSpace& space, std::span<const int> digits) {
        StateVector psi(space);
        psi.add_term(space.pack(digits), 1.0);
        return psi;
    }

    static StateVector with_terms(const SlotSpace& space,
                                  std::initializer_list<std::pair<std::vector<int>, cplx>> terms) {
        StateVector psi(space);
        for (const auto& [digits, a] : terms) psi.add_term(space.pack(digits), a);
        return psi;
    }

    const SlotSpace& space() const { return space_; }
    const Amplitudes& amplitudes() const { return amps_; }
    std::size_t support_size() const { return amps_.size(); }
    bool empty() const { return amps_.empty(); }

    cplx amplitude(std::uint64_t idx) const {
        auto it = amps_.find(idx);
        return it == amps_.end() ? cplx{0.0, 0.0} : it->second;
    }

    cplx amplitude(std::span<const int> digits) const { return amplitude(space_.pack(digits)); }

    void add_term(std::uint64_t idx, cplx a) {
        auto [it, inserted] = amps_.try_emplace(idx, a);
        if (!inserted) it->second += a;
        if (std::abs(it->second) < prune_eps) amps_.erase(it);
    }

    void add_term(std::span<const int> digits, cplx a) { add_term(space_.pack(digits), a); }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [idx, a] : amps_) s += std::norm(a);
        return s;
    }

    double norm() const { return std::sqrt(norm_sq()); }

    StateVector normalized() const {
        const double n = norm();
        require(n > prune_eps, "normalized: zero state");
        return scaled(1.0 / n);
    }

    StateVector scaled(cplx factor) const {
        StateVector out(space_);
        for (const auto& [idx, a] : amps_) out.add_term(idx, factor * a);
        return out;
    }

    void for_each_term(const std::function<void(const std::vector<int>&, cplx)>& fn) const {
        for (const auto& [idx, a] : amps_) fn(space_.unpack(idx), a);
    }

    friend StateVector operator+(const StateVector& x, const StateVector& y) {
        require(x.space_ == y.space_, "operator+: shape mismatch");
        StateVector out = x;
        for (const auto& [idx, a] : y.amps_) out.add_term(idx, a);
        return out;
    }

    friend StateVector operator-(const StateVector& x, const StateVector& y) {
        return x + y.scaled(-1.0);
    }

  private:
    SlotSpace space_;
    Amplitudes amps_;
};

/// <a|b> with conjugation on a; both states must share one SlotSpace.
inline cplx inner_product(const StateVector& a, const StateVector& b) {
    require(a.space() == b.space(), "inner_product: shape mismatch");
    const auto& small = a.support_size() <= b.support_size() ? a : b;
    const auto& large = a.support_size() <= b.support_size() ? b : a;
    cplx s{0.0, 0.0};
    const bool small_is_a = &small == &a;
    for (const auto& [idx, amp] : small.amplitudes()) {
        const cplx other = large.amplitude(idx);
        s += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return s;
}

/// |<a|b>| on normalized inputs; global-phase insensitive.
inline double fidelity(const StateVector& a, const StateVector& b) {
    return std::abs(inner_product(a.normalized(), b.normalized()));
}

/// Largest per-basis-state amplitude difference; exact term-level identity
/// check (no phase freedom).
inline double max_term_distance(const StateVector& a, const StateVector& b) {
    require(a.space() == b.space(), "max_term_distance: shape mismatch");
    double worst = 0.0;
    for (const auto& [idx, amp] : a.amplitudes()) worst = std::max(worst, std::abs(amp - b.amplitude(idx)));
    for (const auto& [idx, amp] : b.amplitudes()) worst = std::max(worst, std::abs(amp - a.amplitude(idx)));
    return worst;
}

/// Kronecker product of states on disjoint slot sets; the result lives on
/// the canonical merge of the two spaces.
inline StateVector tensor_product(const StateVector& a, const StateVector& b) {
    const SlotSpace merged = SlotSpace::merged(a.space(), b.space());
    StateVector out(merged);
    std::vector<int> digits(static_cast<std::size_t>(merged.count()));
    std::vector<int> map_a(static_cast<std::size_t>(a.space().count()));
    std::vector<int> map_b(static_cast<std::size_t>(b.space().count()));
    for (int i = 0; i < a.space().count(); ++i) map_a[static_cast<std::size_t>(i)] = merged.find(a.space().slots()[static_cast<std::size_t>(i)]);
    for (int i = 0; i < b.space().count(); ++i) map_b[static_cast<std::size_t>(i)] = merged.find(b.space().slots()[static_cast<std::size_t>(i)]);
    for (const auto& [ia, va] : a.amplitudes()) {
        const auto da = a.space().unpack(ia);
        for (const auto& [ib, vb] : b.amplitudes()) {
            const auto db = b.space().unpack(ib);
            for (std::size_t k = 0; k < da.size(); ++k) digits[static_cast<std::size_t>(map_a[k])] = da[k];
            for (std::size_t k = 0; k < db.size(); ++k) digits[static_cast<std::size_t>(map_b[k])] = db[k];
            out.add_term(merged.pack(digits), va * vb);
        }
    }
    return out;
}

/// Applies a local d x d matrix (row-major) to one slot.
inline StateVector apply_local(const StateVector& psi, const Slot& slot, std::span<const cplx> matrix) {
    const int i = psi.space().find(slot);
    require(i >= 0, "apply_local: slot not in state space");
    const int d = psi.space().dim(i);
    require(static_cast<int>(matrix.size()) == d * d, "apply_local: matrix size mismatch");
    StateVector out(psi.space());
    for (const auto& [idx, a] : psi.amplitudes()) {
        const int v = psi.space().digit_at(idx, i);
        for (int w = 0; w < d; ++w) {
            const cplx u = matrix[static_cast<std::size_t>(w * d + v)];
            if (std::abs(u) < prune_eps) continue;
            out.add_term(psi.space().with_digit(idx, i, w), u * a);
        }
    }
    return out;
}

/// Projects one slot onto a local vector (conjugated) and removes the slot;
/// the result is the unnormalized conditional state on the remaining slots.
inline StateVector project_slot(const StateVector& psi, const Slot& slot, std::span<const cplx> local_vec) {
    const int i = psi.space().find(slot);
    require(i >= 0, "project_slot: slot not in state space");
    const int d = psi.space().dim(i);
    require(static_cast<int>(local_vec.size()) == d, "project_slot: vector dimension mismatch");
    const SlotSpace reduced = psi.space().without(slot);
    StateVector out(reduced);
    std::vector<int> rd(static_cast<std::size_t>(reduced.count()));
    for (const auto& [idx, a] : psi.amplitudes()) {
        const auto digits = psi.space().unpack(idx);
        const cplx w = std::conj(local_vec[static_cast<std::size_t>(digits[static_cast<std::size_t>(i)])]);
        if (std::abs(w) < prune_eps) continue;
        std::size_t k = 0;
        for (std::size_t j = 0; j < digits.size(); ++j)
            if (j != static_cast<std::size_t>(i)) rd[k++] = digits[j];
        out.add_term(reduced.pack(rd), w * a);
    }
    return out;
}

/// Exchanges the values of two same-dimension slots (a SWAP gate).
inline StateVector swap_slots(const StateVector& psi, const Slot& a, const Slot& b) {
    const int ia = psi.space().find(a);
    const int ib = psi.space().find(b);
    require(ia >= 0 && ib >= 0, "swap_slots: slot not in state space");
    require(psi.space().dim(ia) == psi.space().dim(ib), "swap_slots: dimension mismatch");
    StateVector out(psi.space());
    for (const auto& [idx, amp] : psi.amplitudes()) {
        const int va = psi.space().digit_at(idx, ia);
        const int vb = psi.space().digit_at(idx, ib);
        out.add_term(psi.space().with_digit(psi.space().with_digit(idx, ia, vb), ib, va), amp);
    }
    return out;
}

}  // namespace walkport
