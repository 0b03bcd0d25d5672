#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ectl/error.hpp"
#include "ectl/state_set.hpp"

namespace ectl {

using ActionId = std::uint32_t;
using PropId = std::uint32_t;

/// Case-sensitive identifier tokens: [A-Za-z0-9_]+.
inline bool is_identifier(std::string_view token) {
    if (token.empty()) return false;
    return std::all_of(token.begin(), token.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

/// Bidirectional name <-> dense index table.
class SymbolTable {
public:
    std::optional<std::uint32_t> find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Returns the existing id when the name is already present.
    std::uint32_t intern(const std::string& name) {
        auto [it, inserted] = index_.emplace(name, static_cast<std::uint32_t>(names_.size()));
        if (inserted) names_.push_back(name);
        return it->second;
    }

    const std::string& name(std::uint32_t id) const { return names_.at(id); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

struct Successor {
    ActionId action;
    StateId target;

    friend auto operator<=>(const Successor&, const Successor&) = default;
};

struct Transition {
    StateId source;
    ActionId action;
    StateId target;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

/// Finite labeled transition system. Transitions form a set: adding a
/// duplicate is a no-op. Every state carries a (possibly empty) label set.
class Lts {
public:
    Lts() = default;
    explicit Lts(std::string name) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    StateId add_state(const std::string& name) {
        require_identifier(name, "state");
        auto before = states_.size();
        StateId id = states_.intern(name);
        if (states_.size() != before) {
            out_.emplace_back();
            labels_.emplace_back();
        }
        return id;
    }

    ActionId add_action(const std::string& name) {
        require_identifier(name, "action");
        return actions_.intern(name);
    }

    PropId add_prop(const std::string& name) {
        require_identifier(name, "proposition");
        return props_.intern(name);
    }

    void label(StateId s, PropId p) {
        check_state(s);
        if (p >= props_.size()) throw ValidationError("unknown proposition id " + std::to_string(p));
        auto& l = labels_[s];
        if (std::find(l.begin(), l.end(), p) == l.end()) {
            l.push_back(p);
            std::sort(l.begin(), l.end());
        }
    }

    void add_transition(StateId source, ActionId action, StateId target) {
        check_state(source);
        check_state(target);
        if (action >= actions_.size()) throw ValidationError("unknown action id " + std::to_string(action));
        auto& succ = out_[source];
        Successor e{action, target};
        auto it = std::lower_bound(succ.begin(), succ.end(), e);
        if (it == succ.end() || *it != e) succ.insert(it, e);
    }

    /// Name-based convenience; every token must already be declared.
    void add_transition(std::string_view source, std::string_view action, std::string_view target) {
        add_transition(state_id(source), action_id(action), state_id(target));
    }

    void add_designated(StateId s) {
        check_state(s);
        if (std::find(designated_.begin(), designated_.end(), s) == designated_.end()) designated_.push_back(s);
    }

    std::size_t num_states() const noexcept { return states_.size(); }
    std::size_t num_actions() const noexcept { return actions_.size(); }
    std::size_t num_transitions() const {
        std::size_t n = 0;
        for (const auto& o : out_) n += o.size();
        return n;
    }

    const SymbolTable& states() const noexcept { return states_; }
    const SymbolTable& actions() const noexcept { return actions_; }
    const SymbolTable& props() const noexcept { return props_; }
    const std::vector<StateId>& designated() const noexcept { return designated_; }

    StateId state_id(std::string_view name) const {
        auto id = states_.find(name);
        if (!id) throw ValidationError("unknown state '" + std::string(name) + "'");
        return *id;
    }
    ActionId action_id(std::string_view name) const {
        auto id = actions_.find(name);
        if (!id) throw ValidationError("unknown action '" + std::string(name) + "'");
        return *id;
    }
    std::optional<PropId> find_prop(std::string_view name) const { return props_.find(name); }

    const std::string& state_name(StateId s) const { return states_.name(s); }
    const std::string& action_name(ActionId a) const { return actions_.name(a); }

    /// Exactly the pairs (a, t) with s -a-> t, sorted by (action, target).
    const std::vector<Successor>& successors(StateId s) const {
        check_state(s);
        return out_[s];
    }
    const std::vector<Successor>& successors(std::string_view s) const { return successors(state_id(s)); }

    bool is_dead_end(StateId s) const { return successors(s).empty(); }
    bool is_dead_end(std::string_view s) const { return is_dead_end(state_id(s)); }

    const std::vector<PropId>& labels(StateId s) const {
        check_state(s);
        return labels_[s];
    }
    bool has_label(StateId s, PropId p) const {
        const auto& l = labels(s);
        return std::binary_search(l.begin(), l.end(), p);
    }

    /// States labeled with the named proposition; empty if it is undeclared.
    StateSet sat_prop(std::string_view prop) const {
        StateSet out(num_states());
        auto p = props_.find(prop);
        if (!p) return out;
        for (StateId s = 0; s < num_states(); ++s)
            if (has_label(s, *p)) out.insert(s);
        return out;
    }

    std::vector<Transition> transitions() const {
        std::vector<Transition> out;
        for (StateId s = 0; s < out_.size(); ++s)
            for (const auto& e : out_[s]) out.push_back({s, e.action, e.target});
        return out;
    }

    friend bool operator==(const Lts& a, const Lts& b) {
        return a.name_ == b.name_ && a.states_ == b.states_ && a.actions_ == b.actions_ && a.props_ == b.props_ &&
               a.out_ == b.out_ && a.labels_ == b.labels_ && a.designated_ == b.designated_;
    }

private:
    void check_state(StateId s) const {
        if (s >= states_.size()) throw ValidationError("unknown state id " + std::to_string(s));
    }

    static void require_identifier(const std::string& name, const char* what) {
        if (!is_identifier(name)) throw ValidationError(std::string("invalid ") + what + " identifier '" + name + "'");
    }

    std::string name_;
    SymbolTable states_;
    SymbolTable actions_;
    SymbolTable props_;
    std::vector<std::vector<Successor>> out_;
    std::vector<std::vector<PropId>> labels_;
    std::vector<StateId> designated_;
};

} // namespace ectl
