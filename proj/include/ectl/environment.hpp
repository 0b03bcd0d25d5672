#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/determinize.hpp"
#include "ectl/error.hpp"
#include "ectl/formula.hpp"
#include "ectl/regex.hpp"

namespace ectl {

/// Named automata plus a cache of derived ones (compiled regexes,
/// complements, determinizations, completions). Derived entries are keyed
/// by the source key and the transform chain, e.g. "complete(det(~NBU))".
///
/// Lookups may run concurrently; the derived cache is guarded and its
/// entries are never moved once inserted.
class Environment {
public:
    Environment() = default;
    explicit Environment(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {}
    Environment(const Environment& o) : alphabet_(o.alphabet_), named_(o.named_), cap_(o.cap_) {}
    Environment& operator=(const Environment& o) {
        if (this != &o) {
            std::scoped_lock lock(mutex_);
            alphabet_ = o.alphabet_;
            named_ = o.named_;
            cap_ = o.cap_;
            derived_.clear();
        }
        return *this;
    }

    /// Alphabet for regexes and the default Σ / Σ* languages.
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    void set_alphabet(std::vector<std::string> alphabet) {
        std::scoped_lock lock(mutex_);
        alphabet_ = std::move(alphabet);
        derived_.clear();
    }

    std::size_t cap() const noexcept { return cap_; }
    void set_cap(std::size_t cap) { cap_ = cap; }

    void add(Automaton a) {
        validate(a);
        const std::string n = name_of(a);
        if (!is_identifier(n)) throw ValidationError("invalid automaton name '" + n + "'");
        if (named_.count(n)) throw ValidationError("duplicate automaton name '" + n + "'");
        named_.emplace(n, std::move(a));
    }

    const Automaton* find(const std::string& name) const {
        auto it = named_.find(name);
        return it == named_.end() ? nullptr : &it->second;
    }
    const std::map<std::string, Automaton>& named() const noexcept { return named_; }

    /// The automaton denoted by a language reference.
    const Automaton& resolve(const LanguageRef& ref) const {
        switch (ref.kind) {
        case LanguageRef::Kind::named: {
            const Automaton* a = find(ref.text);
            if (!a) throw ValidationError("unknown automaton '" + ref.text + "'");
            if (ref.expected_kind && *ref.expected_kind != kind_of(*a))
                throw ValidationError("automaton '" + ref.text + "' is a " + std::string(to_string(kind_of(*a))) +
                                      ", not a " + std::string(to_string(*ref.expected_kind)));
            return *a;
        }
        case LanguageRef::Kind::complement: {
            const Automaton* a = find(ref.text);
            if (!a) throw ValidationError("unknown automaton '" + ref.text + "'");
            auto k = kind_of(*a);
            if (k == AutomatonKind::pda || k == AutomatonKind::dpda)
                throw ValidationError("complement of " + std::string(to_string(k)) + " '" + ref.text +
                                      "' is not supported");
            return derive(ref.key(), [&] { return complement_language(*a, cap_); });
        }
        case LanguageRef::Kind::regex:
            return derive(ref.key(), [&] { return Automaton(regex_to_nfa(ref.text, alphabet_)); });
        case LanguageRef::Kind::sigma:
            return derive(ref.key(), [&] { return Automaton(sigma_automaton(alphabet_)); });
        case LanguageRef::Kind::sigma_star:
            return derive(ref.key(), [&] { return Automaton(sigma_star_automaton(alphabet_)); });
        }
        throw ValidationError("unresolvable language reference");
    }

    /// Cached transform of an already-resolved automaton.
    template <class Fn>
    const Automaton& derive(const std::string& key, Fn&& make) const {
        {
            std::scoped_lock lock(mutex_);
            auto it = derived_.find(key);
            if (it != derived_.end()) return it->second;
        }
        Automaton a = make();
        std::scoped_lock lock(mutex_);
        return derived_.emplace(key, std::move(a)).first->second;
    }

private:
    std::vector<std::string> alphabet_;
    std::map<std::string, Automaton> named_;
    std::size_t cap_ = kDefaultStateCap;
    mutable std::map<std::string, Automaton> derived_;
    mutable std::mutex mutex_;
};

} // namespace ectl
