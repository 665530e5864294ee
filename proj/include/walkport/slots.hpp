#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "walkport/common.hpp"

namespace walkport {

/// Identity of one register of the composite system.
///
/// Position slots carry a walker index (1-based). Coin slots carry the
/// canonical coin index: coins 0..n-1 are the first coins of walkers 1..n,
/// coins n..n+m-1 are the extra coins of walker 1 (held by receivers 1..m).
enum class SlotKind : std::uint8_t { position = 0, coin = 1 };

struct Slot {
    SlotKind kind{SlotKind::position};
    int index{0};

    friend constexpr auto operator<=>(const Slot&, const Slot&) = default;
};

inline Slot position_slot(int walker) { return {SlotKind::position, walker}; }
inline Slot coin_slot(int coin_index) { return {SlotKind::coin, coin_index}; }

/// One computational-basis configuration of the full system: walker
/// positions (lattice units) followed by coin bits in canonical order.
struct BasisState {
    std::vector<int> positions;
    std::vector<int> coins;

    friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// An ordered list of slots with local dimensions, fixing the mixed-radix
/// index convention for every state over those slots. Slots are kept in
/// canonical order (positions walker-major, then coins by index); the last
/// slot varies fastest. Position slots have odd local dimension 2b+1 and
/// store value v as digit v+b.
class SlotSpace {
  public:
    SlotSpace() = default;

    SlotSpace(std::vector<Slot> slots, std::vector<int> dims) : slots_(std::move(slots)), dims_(std::move(dims)) {
        require(slots_.size() == dims_.size(), "SlotSpace: slots/dims size mismatch");
        require(std::is_sorted(slots_.begin(), slots_.end()) &&
                    std::adjacent_find(slots_.begin(), slots_.end()) == slots_.end(),
                "SlotSpace: slots must be strictly increasing in canonical order");
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            require(dims_[i] >= 2, "SlotSpace: local dimension must be >= 2");
            if (slots_[i].kind == SlotKind::position)
                require(dims_[i] % 2 == 1, "SlotSpace: position slots need odd dimension");
            else
                require(dims_[i] == 2, "SlotSpace: coin slots are two-level");
        }
        strides_.assign(slots_.size(), 1);
        total_dim_ = 1;
        for (int i = static_cast<int>(slots_.size()) - 1; i >= 0; --i) {
            strides_[i] = total_dim_;
            const std::uint64_t d = static_cast<std::uint64_t>(dims_[i]);
            require(total_dim_ <= UINT64_MAX / d, "SlotSpace: composite dimension overflows 64 bits");
            total_dim_ *= d;
        }
    }

    int count() const { return static_cast<int>(slots_.size()); }
    const std::vector<Slot>& slots() const { return slots_; }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
    std::uint64_t total_dim() const { return total_dim_; }

    int find(const Slot& s) const {
        auto it = std::lower_bound(slots_.begin(), slots_.end(), s);
        if (it == slots_.end() || *it != s) return -1;
        return static_cast<int>(it - slots_.begin());
    }

    bool contains(const Slot& s) const { return find(s) >= 0; }

    /// Signed value range helper: position digit <-> lattice value.
    int position_offset(int i) const { return (dims_[static_cast<std::size_t>(i)] - 1) / 2; }

    std::uint64_t pack(std::span<const int> digits) const {
        require(digits.size() == slots_.size(), "pack: digit count mismatch");
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            require(digits[i] >= 0 && digits[i] < dims_[i], "pack: digit out of range");
            idx += static_cast<std::uint64_t>(digits[i]) * strides_[i];
        }
        return idx;
    }

    std::vector<int> unpack(std::uint64_t idx) const {
        std::vector<int> digits(slots_.size());
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            digits[i] = static_cast<int>((idx / strides_[i]) % static_cast<std::uint64_t>(dims_[i]));
        }
        return digits;
    }

    /// Digit of slot position i extracted straight from a packed index.
    int digit_at(std::uint64_t idx, int i) const {
        const auto si = static_cast<std::size_t>(i);
        return static_cast<int>((idx / strides_[si]) % static_cast<std::uint64_t>(dims_[si]));
    }

    std::uint64_t with_digit(std::uint64_t idx, int i, int digit) const {
        const auto si = static_cast<std::size_t>(i);
        const std::uint64_t old = (idx / strides_[si]) % static_cast<std::uint64_t>(dims_[si]);
        return idx + (static_cast<std::uint64_t>(digit) - old) * strides_[si];
    }

    SlotSpace without(const Slot& s) const {
        const int i = find(s);
        require(i >= 0, "SlotSpace::without: slot not present");
        auto slots = slots_;
        auto dims = dims_;
        slots.erase(slots.begin() + i);
        dims.erase(dims.begin() + i);
        return SlotSpace(std::move(slots), std::move(dims));
    }

    SlotSpace subset(std::vector<Slot> keep) const {
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        std::vector<int> dims;
        dims.reserve(keep.size());
        for (const Slot& s : keep) {
            const int i = find(s);
            require(i >= 0, "SlotSpace::subset: slot not present");
            dims.push_back(dims_[static_cast<std::size_t>(i)]);
        }
        return SlotSpace(std::move(keep), std::move(dims));
    }

    bool disjoint(const SlotSpace& other) const {
        for (const Slot& s : other.slots_)
            if (contains(s)) return false;
        return true;
    }

    static SlotSpace merged(const SlotSpace& a, const SlotSpace& b) {
        require(a.disjoint(b), "SlotSpace::merged: overlapping slots");
        std::vector<Slot> slots;
        std::vector<int> dims;
        slots.reserve(a.slots_.size() + b.slots_.size());
        dims.reserve(slots.capacity());
        std::size_t i = 0, j = 0;
        while (i < a.slots_.size() || j < b.slots_.size()) {
            const bool take_a = j == b.slots_.size() || (i < a.slots_.size() && a.slots_[i] < b.slots_[j]);
            if (take_a) {
                slots.push_back(a.slots_[i]);
                dims.push_back(a.dims_[i]);
                ++i;
            } else {
                slots.push_back(b.slots_[j]);
                dims.push_back(b.dims_[j]);
                ++j;
            }
        }
        return SlotSpace(std::move(slots), std::move(dims));
    }

    friend bool operator==(const SlotSpace& a, const SlotSpace& b) {
        return a.slots_ == b.slots_ && a.dims_ == b.dims_;
    }

  private:
    std::vector<Slot> slots_;
    std::vector<int> dims_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t total_dim_ = 1;
};

/// Static description of the (n, m) composite system: n walkers, each with
/// one first coin, walker 1 carrying m extra coins. Walker 1 can reach
/// positions in [-(m+1), m+1]; walkers 2..n take a single step, [-1, 1].
class SystemShape {
  public:
    SystemShape(int walkers, int receivers) : n_(walkers), m_(receivers) {
        require(n_ >= 1, "SystemShape: need at least one walker");
        require(m_ >= 2, "SystemShape: need at least two receivers");
    }

    int walkers() const { return n_; }
    int receivers() const { return m_; }
    int coin_count() const { return n_ + m_; }

    int position_bound(int walker) const {
        require(walker >= 1 && walker <= n_, "SystemShape: walker index out of range");
        return walker == 1 ? m_ + 1 : 1;
    }

    Slot position(int walker) const {
        require(walker >= 1 && walker <= n_, "SystemShape: walker index out of range");
        return position_slot(walker);
    }

    /// c_{i,1}: the first coin of walker i, held by sender i.
    Slot first_coin(int walker) const {
        require(walker >= 1 && walker <= n_, "SystemShape: walker index out of range");
        return coin_slot(walker - 1);
    }

    /// c_{1,j+1}: the (j+1)-th coin of walker 1, held by receiver j.
    Slot receiver_coin(int receiver) const {
        require(receiver >= 1 && receiver <= m_, "SystemShape: receiver index out of range");
        return coin_slot(n_ + receiver - 1);
    }

    int slot_dim(const Slot& s) const {
        if (s.kind == SlotKind::position) return 2 * position_bound(s.index) + 1;
        require(s.index >= 0 && s.index < coin_count(), "SystemShape: coin index out of range");
        return 2;
    }

    std::string slot_name(const Slot& s) const {
        if (s.kind == SlotKind::position) return "p" + std::to_string(s.index);
        if (s.index < n_) return "c" + std::to_string(s.index + 1) + ",1";
        return "c1," + std::to_string(s.index - n_ + 2);
    }

    SlotSpace full_space() const {
        std::vector<Slot> slots;
        std::vector<int> dims;
        for (int i = 1; i <= n_; ++i) {
            slots.push_back(position_slot(i));
            dims.push_back(slot_dim(slots.back()));
        }
        for (int c = 0; c < coin_count(); ++c) {
            slots.push_back(coin_slot(c));
            dims.push_back(2);
        }
        return SlotSpace(std::move(slots), std::move(dims));
    }

    /// The m receiver coins, in receiver order.
    SlotSpace receiver_space() const {
        std::vector<Slot> slots;
        for (int j = 1; j <= m_; ++j) slots.push_back(receiver_coin(j));
        return SlotSpace(std::move(slots), std::vector<int>(static_cast<std::size_t>(m_), 2));
    }

    /// Digits for the full space from a BasisState (positions + coin bits).
    std::vector<int> digits_of(const BasisState& b) const {
        require(static_cast<int>(b.positions.size()) == n_, "BasisState: wrong position count");
        require(static_cast<int>(b.coins.size()) == coin_count(), "BasisState: wrong coin count");
        std::vector<int> digits;
        digits.reserve(b.positions.size() + b.coins.size());
        for (int i = 1; i <= n_; ++i) {
            const int bound = position_bound(i);
            const int v = b.positions[static_cast<std::size_t>(i - 1)];
            require(v >= -bound && v <= bound, "BasisState: position out of range for walker");
            digits.push_back(v + bound);
        }
        for (int bit : b.coins) {
            require(bit == 0 || bit == 1, "BasisState: coin bits must be 0/1");
            digits.push_back(bit);
        }
        return digits;
    }

    BasisState basis_state_of(std::span<const int> digits) const {
        require(static_cast<int>(digits.size()) == n_ + coin_count(), "digits: wrong length");
        BasisState b;
        for (int i = 1; i <= n_; ++i) b.positions.push_back(digits[static_cast<std::size_t>(i - 1)] - position_bound(i));
        for (int c = 0; c < coin_count(); ++c) b.coins.push_back(digits[static_cast<std::size_t>(n_ + c)]);
        return b;
    }

    friend bool operator==(const SystemShape&, const SystemShape&) = default;

  private:
    int n_;
    int m_;
};

}  // namespace walkport
