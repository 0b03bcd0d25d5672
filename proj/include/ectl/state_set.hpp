#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace ectl {

using StateId = std::uint32_t;

/// Dense set of LTS states over a fixed universe size.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t universe, bool full = false) : bits_(universe, full) {}
    StateSet(std::size_t universe, std::initializer_list<StateId> members) : bits_(universe, false) {
        for (StateId s : members) bits_.at(s) = true;
    }

    static StateSet all(std::size_t universe) { return StateSet(universe, true); }

    std::size_t universe() const noexcept { return bits_.size(); }
    bool contains(StateId s) const { return bits_.at(s); }
    void insert(StateId s) { bits_.at(s) = true; }
    void erase(StateId s) { bits_.at(s) = false; }

    std::size_t size() const {
        std::size_t n = 0;
        for (bool b : bits_) n += b ? 1 : 0;
        return n;
    }
    bool empty() const { return size() == 0; }

    std::vector<StateId> members() const {
        std::vector<StateId> out;
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) out.push_back(static_cast<StateId>(i));
        return out;
    }

    StateSet complement() const {
        StateSet out(*this);
        out.bits_.flip();
        return out;
    }
    StateSet& operator|=(const StateSet& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] || o.bits_.at(i);
        return *this;
    }
    StateSet& operator&=(const StateSet& o) {
        for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] = bits_[i] && o.bits_.at(i);
        return *this;
    }
    friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
    friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }

    bool is_subset_of(const StateSet& o) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !o.bits_.at(i)) return false;
        return true;
    }

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<bool> bits_;
};

} // namespace ectl
