#pragma once

// Finite, visibly pushdown and pushdown word automata.
//
// All pushdown kinds are real-time (one input letter per move) and use a
// distinguished bottom symbol that is never pushed and never removed; a
// configuration starts with the stack [bottom]. Acceptance is by final
// state with an arbitrary stack.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "ectl/error.hpp"
#include "ectl/lts.hpp"

namespace ectl {

enum class AutomatonKind { dfa, nfa, dvpa, vpa, dpda, pda };

inline std::string_view to_string(AutomatonKind k) {
    switch (k) {
    case AutomatonKind::dfa: return "dfa";
    case AutomatonKind::nfa: return "nfa";
    case AutomatonKind::dvpa: return "dvpa";
    case AutomatonKind::vpa: return "vpa";
    case AutomatonKind::dpda: return "dpda";
    case AutomatonKind::pda: return "pda";
    }
    return "?";
}

inline AutomatonKind parse_kind(std::string_view s) {
    for (auto k : {AutomatonKind::dfa, AutomatonKind::nfa, AutomatonKind::dvpa, AutomatonKind::vpa,
                   AutomatonKind::dpda, AutomatonKind::pda})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown automaton kind '" + std::string(s) + "'");
}

inline bool is_deterministic_kind(AutomatonKind k) {
    return k == AutomatonKind::dfa || k == AutomatonKind::dvpa || k == AutomatonKind::dpda;
}

using LetterId = std::uint32_t;
using AutStateId = std::uint32_t;
using StackSymbol = std::uint32_t;
inline constexpr LetterId kEpsilon = std::numeric_limits<LetterId>::max();

using Word = std::vector<std::string>;

/// Splits "a b c" on whitespace, otherwise one letter per character.
inline Word word_of(std::string_view text) {
    Word w;
    if (text.find(' ') != std::string_view::npos) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && text[i] == ' ') ++i;
            std::size_t j = i;
            while (j < text.size() && text[j] != ' ') ++j;
            if (j > i) w.emplace_back(text.substr(i, j - i));
            i = j;
        }
    } else {
        for (char c : text) w.emplace_back(1, c);
    }
    return w;
}

namespace detail {
inline std::vector<LetterId> encode_word(const SymbolTable& alphabet, const Word& word) {
    std::vector<LetterId> out;
    out.reserve(word.size());
    for (const auto& l : word) {
        auto id = alphabet.find(l);
        if (!id) throw ValidationError("letter '" + l + "' is not in the alphabet");
        out.push_back(*id);
    }
    return out;
}

template <class Rule>
void sort_unique(std::vector<Rule>& rules) {
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
}
} // namespace detail

// ---------------------------------------------------------------------------
// DFA / NFA

struct FiniteAutomaton {
    struct Edge {
        AutStateId from;
        LetterId letter; ///< kEpsilon for an epsilon edge
        AutStateId to;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };

    AutomatonKind kind = AutomatonKind::nfa;
    std::string name;
    SymbolTable alphabet;
    SymbolTable states;
    AutStateId initial = 0;
    std::vector<bool> final;
    std::vector<Edge> edges; ///< sorted, no duplicates

    AutStateId add_state(const std::string& n, bool is_final = false) {
        auto before = states.size();
        AutStateId id = states.intern(n);
        if (states.size() != before) final.push_back(false);
        if (is_final) final[id] = true;
        return id;
    }
    LetterId add_letter(const std::string& l) { return alphabet.intern(l); }
    void add_edge(AutStateId from, LetterId letter, AutStateId to) {
        Edge e{from, letter, to};
        auto it = std::lower_bound(edges.begin(), edges.end(), e);
        if (it == edges.end() || *it != e) edges.insert(it, e);
    }
    void add_edge(std::string_view from, std::string_view letter, std::string_view to) {
        add_edge(state(from), letter == "eps" ? kEpsilon : letter_id(letter), state(to));
    }

    AutStateId state(std::string_view n) const {
        auto id = states.find(n);
        if (!id) throw ValidationError("unknown automaton state '" + std::string(n) + "'");
        return *id;
    }
    LetterId letter_id(std::string_view l) const {
        auto id = alphabet.find(l);
        if (!id) throw ValidationError("letter '" + std::string(l) + "' is not in the alphabet");
        return *id;
    }
    bool is_final(AutStateId q) const { return final.at(q); }
    std::size_t num_states() const { return states.size(); }
    std::size_t num_rules() const { return edges.size(); }

    bool has_epsilon() const {
        return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.letter == kEpsilon; });
    }

    /// No epsilon edges and at most one successor per (state, letter).
    bool is_deterministic() const {
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (edges[i].letter == kEpsilon) return false;
            if (i > 0 && edges[i - 1].from == edges[i].from && edges[i - 1].letter == edges[i].letter) return false;
        }
        return true;
    }

    /// Deterministic with exactly one successor per (state, letter).
    bool is_complete() const {
        return is_deterministic() && edges.size() == states.size() * alphabet.size();
    }

    friend bool operator==(const FiniteAutomaton&, const FiniteAutomaton&) = default;
};

// ---------------------------------------------------------------------------
// VPA / DVPA

enum class LetterClass { call, ret, internal };

struct VisiblyPushdownAutomaton {
    struct CallRule {
        AutStateId from;
        LetterId letter;
        AutStateId to;
        StackSymbol push;
        friend auto operator<=>(const CallRule&, const CallRule&) = default;
    };
    struct ReturnRule {
        AutStateId from;
        LetterId letter;
        StackSymbol top; ///< popped unless it is the bottom symbol
        AutStateId to;
        friend auto operator<=>(const ReturnRule&, const ReturnRule&) = default;
    };
    struct InternalRule {
        AutStateId from;
        LetterId letter;
        AutStateId to;
        friend auto operator<=>(const InternalRule&, const InternalRule&) = default;
    };

    AutomatonKind kind = AutomatonKind::vpa;
    std::string name;
    SymbolTable alphabet;
    std::vector<LetterClass> letter_class; ///< indexed by LetterId
    SymbolTable states;
    SymbolTable stack;
    StackSymbol bottom = 0;
    AutStateId initial = 0;
    std::vector<bool> final;
    std::vector<CallRule> calls;
    std::vector<ReturnRule> returns;
    std::vector<InternalRule> internals;

    AutStateId add_state(const std::string& n, bool is_final = false) {
        auto before = states.size();
        AutStateId id = states.intern(n);
        if (states.size() != before) final.push_back(false);
        if (is_final) final[id] = true;
        return id;
    }
    LetterId add_letter(const std::string& l, LetterClass c) {
        auto before = alphabet.size();
        LetterId id = alphabet.intern(l);
        if (alphabet.size() != before) letter_class.push_back(c);
        else if (letter_class[id] != c) throw ValidationError("letter '" + l + "' declared in two alphabet classes");
        return id;
    }
    StackSymbol add_stack_symbol(const std::string& s) { return stack.intern(s); }

    void add_call(AutStateId from, LetterId a, AutStateId to, StackSymbol push) {
        calls.push_back({from, a, to, push});
        detail::sort_unique(calls);
    }
    void add_return(AutStateId from, LetterId a, StackSymbol top, AutStateId to) {
        returns.push_back({from, a, top, to});
        detail::sort_unique(returns);
    }
    void add_internal(AutStateId from, LetterId a, AutStateId to) {
        internals.push_back({from, a, to});
        detail::sort_unique(internals);
    }

    bool is_final(AutStateId q) const { return final.at(q); }
    std::size_t num_states() const { return states.size(); }
    std::size_t num_rules() const { return calls.size() + returns.size() + internals.size(); }

    std::vector<LetterId> letters_of(LetterClass c) const {
        std::vector<LetterId> out;
        for (LetterId a = 0; a < letter_class.size(); ++a)
            if (letter_class[a] == c) out.push_back(a);
        return out;
    }

    bool is_deterministic() const {
        auto dup = [](const auto& rules, auto key) {
            for (std::size_t i = 1; i < rules.size(); ++i)
                if (key(rules[i - 1]) == key(rules[i])) return true;
            return false;
        };
        return !dup(calls, [](const CallRule& r) { return std::pair(r.from, r.letter); }) &&
               !dup(internals, [](const InternalRule& r) { return std::pair(r.from, r.letter); }) &&
               !dup(returns, [](const ReturnRule& r) { return std::tuple(r.from, r.letter, r.top); });
    }

    bool is_complete() const {
        std::size_t nq = states.size();
        return is_deterministic() && calls.size() == nq * letters_of(LetterClass::call).size() &&
               internals.size() == nq * letters_of(LetterClass::internal).size() &&
               returns.size() == nq * letters_of(LetterClass::ret).size() * stack.size();
    }

    friend bool operator==(const VisiblyPushdownAutomaton&, const VisiblyPushdownAutomaton&) = default;
};

// ---------------------------------------------------------------------------
// Real-time DPDA / PDA

struct PushdownAutomaton {
    struct Rule {
        AutStateId from;
        LetterId letter;
        StackSymbol top;
        AutStateId to;
        std::vector<StackSymbol> push; ///< replacement for top, top-first
        friend auto operator<=>(const Rule&, const Rule&) = default;
    };

    AutomatonKind kind = AutomatonKind::pda;
    std::string name;
    SymbolTable alphabet;
    SymbolTable states;
    SymbolTable stack;
    StackSymbol bottom = 0;
    AutStateId initial = 0;
    std::vector<bool> final;
    std::vector<Rule> rules;

    AutStateId add_state(const std::string& n, bool is_final = false) {
        auto before = states.size();
        AutStateId id = states.intern(n);
        if (states.size() != before) final.push_back(false);
        if (is_final) final[id] = true;
        return id;
    }
    LetterId add_letter(const std::string& l) { return alphabet.intern(l); }
    StackSymbol add_stack_symbol(const std::string& s) { return stack.intern(s); }
    void add_rule(AutStateId from, LetterId a, StackSymbol top, AutStateId to, std::vector<StackSymbol> push) {
        rules.push_back({from, a, top, to, std::move(push)});
        detail::sort_unique(rules);
    }

    bool is_final(AutStateId q) const { return final.at(q); }
    std::size_t num_states() const { return states.size(); }
    std::size_t num_rules() const { return rules.size(); }

    bool is_deterministic() const {
        for (std::size_t i = 1; i < rules.size(); ++i)
            if (std::tie(rules[i - 1].from, rules[i - 1].letter, rules[i - 1].top) ==
                std::tie(rules[i].from, rules[i].letter, rules[i].top))
                return false;
        return true;
    }
    bool is_complete() const {
        return is_deterministic() && rules.size() == states.size() * alphabet.size() * stack.size();
    }

    friend bool operator==(const PushdownAutomaton&, const PushdownAutomaton&) = default;
};

using Automaton = std::variant<FiniteAutomaton, VisiblyPushdownAutomaton, PushdownAutomaton>;

inline AutomatonKind kind_of(const Automaton& a) {
    return std::visit([](const auto& x) { return x.kind; }, a);
}
inline const std::string& name_of(const Automaton& a) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, a);
}
inline const SymbolTable& alphabet_of(const Automaton& a) {
    return std::visit([](const auto& x) -> const SymbolTable& { return x.alphabet; }, a);
}
/// |states| + |rules|.
inline std::size_t automaton_size(const Automaton& a) {
    return std::visit([](const auto& x) { return x.num_states() + x.num_rules(); }, a);
}
inline bool is_deterministic(const Automaton& a) {
    return std::visit([](const auto& x) { return x.is_deterministic(); }, a);
}
inline bool is_complete(const Automaton& a) {
    return std::visit([](const auto& x) { return x.is_complete(); }, a);
}

// ---------------------------------------------------------------------------
// Structural validation

namespace detail {
inline void check_states(std::size_t nstates, std::size_t nfinal, AutStateId initial, const std::string& name) {
    if (nstates == 0) throw ValidationError("automaton '" + name + "' has no states");
    if (initial >= nstates) throw ValidationError("automaton '" + name + "' has an undeclared initial state");
    if (nfinal != nstates) throw ValidationError("automaton '" + name + "' has an inconsistent final set");
}

inline void check_push_discipline(const std::vector<StackSymbol>& push, StackSymbol top, StackSymbol bottom,
                                  std::size_t nstack, const std::string& name) {
    for (std::size_t i = 0; i < push.size(); ++i) {
        if (push[i] >= nstack) throw ValidationError("automaton '" + name + "' uses an undeclared stack symbol");
        bool last = i + 1 == push.size();
        if (push[i] == bottom && !(top == bottom && last))
            throw ValidationError("automaton '" + name + "' pushes the bottom symbol");
    }
    if (top == bottom && (push.empty() || push.back() != bottom))
        throw ValidationError("automaton '" + name + "' removes the bottom symbol");
}
} // namespace detail

inline void validate(const FiniteAutomaton& a) {
    detail::check_states(a.states.size(), a.final.size(), a.initial, a.name);
    for (const auto& e : a.edges) {
        if (e.from >= a.states.size() || e.to >= a.states.size())
            throw ValidationError("automaton '" + a.name + "' has an edge on an undeclared state");
        if (e.letter != kEpsilon && e.letter >= a.alphabet.size())
            throw ValidationError("automaton '" + a.name + "' has an edge on an undeclared letter");
    }
    if (a.kind != AutomatonKind::dfa && a.kind != AutomatonKind::nfa)
        throw ValidationError("finite automaton '" + a.name + "' must be dfa or nfa");
    if (a.kind == AutomatonKind::dfa && !a.is_deterministic())
        throw ValidationError("automaton '" + a.name + "' is declared dfa but is not deterministic");
}

inline void validate(const VisiblyPushdownAutomaton& a) {
    detail::check_states(a.states.size(), a.final.size(), a.initial, a.name);
    if (a.kind != AutomatonKind::dvpa && a.kind != AutomatonKind::vpa)
        throw ValidationError("visibly pushdown automaton '" + a.name + "' must be vpa or dvpa");
    if (a.bottom >= a.stack.size()) throw ValidationError("automaton '" + a.name + "' has no bottom symbol");
    if (a.letter_class.size() != a.alphabet.size())
        throw ValidationError("automaton '" + a.name + "' has an unpartitioned letter");
    auto check = [&](AutStateId q, LetterId l, LetterClass c) {
        if (q >= a.states.size()) throw ValidationError("automaton '" + a.name + "' uses an undeclared state");
        if (l >= a.alphabet.size()) throw ValidationError("automaton '" + a.name + "' uses an undeclared letter");
        if (a.letter_class[l] != c)
            throw ValidationError("automaton '" + a.name + "' uses letter '" + a.alphabet.name(l) +
                                  "' outside its alphabet class");
    };
    for (const auto& r : a.calls) {
        check(r.from, r.letter, LetterClass::call);
        check(r.to, r.letter, LetterClass::call);
        if (r.push >= a.stack.size() || r.push == a.bottom)
            throw ValidationError("automaton '" + a.name + "' pushes the bottom or an undeclared symbol");
    }
    for (const auto& r : a.returns) {
        check(r.from, r.letter, LetterClass::ret);
        check(r.to, r.letter, LetterClass::ret);
        if (r.top >= a.stack.size()) throw ValidationError("automaton '" + a.name + "' pops an undeclared symbol");
    }
    for (const auto& r : a.internals) {
        check(r.from, r.letter, LetterClass::internal);
        check(r.to, r.letter, LetterClass::internal);
    }
    if (a.kind == AutomatonKind::dvpa && !a.is_deterministic())
        throw ValidationError("automaton '" + a.name + "' is declared dvpa but is not deterministic");
}

inline void validate(const PushdownAutomaton& a) {
    detail::check_states(a.states.size(), a.final.size(), a.initial, a.name);
    if (a.kind != AutomatonKind::dpda && a.kind != AutomatonKind::pda)
        throw ValidationError("pushdown automaton '" + a.name + "' must be pda or dpda");
    if (a.bottom >= a.stack.size()) throw ValidationError("automaton '" + a.name + "' has no bottom symbol");
    for (const auto& r : a.rules) {
        if (r.from >= a.states.size() || r.to >= a.states.size())
            throw ValidationError("automaton '" + a.name + "' uses an undeclared state");
        if (r.letter >= a.alphabet.size())
            throw ValidationError("automaton '" + a.name + "' uses an undeclared letter");
        if (r.top >= a.stack.size()) throw ValidationError("automaton '" + a.name + "' reads an undeclared symbol");
        detail::check_push_discipline(r.push, r.top, a.bottom, a.stack.size(), a.name);
    }
    if (a.kind == AutomatonKind::dpda && !a.is_deterministic())
        throw ValidationError("automaton '" + a.name + "' is declared dpda but is not deterministic");
}

inline void validate(const Automaton& a) {
    std::visit([](const auto& x) { validate(x); }, a);
}

// ---------------------------------------------------------------------------
// Runs

/// Epsilon closure of a state set, in place.
inline void epsilon_close(const FiniteAutomaton& a, std::set<AutStateId>& set) {
    std::vector<AutStateId> stack(set.begin(), set.end());
    while (!stack.empty()) {
        AutStateId q = stack.back();
        stack.pop_back();
        auto it = std::lower_bound(a.edges.begin(), a.edges.end(), FiniteAutomaton::Edge{q, kEpsilon, 0});
        for (; it != a.edges.end() && it->from == q && it->letter == kEpsilon; ++it)
            if (set.insert(it->to).second) stack.push_back(it->to);
    }
}

inline std::set<AutStateId> step(const FiniteAutomaton& a, const std::set<AutStateId>& from, LetterId letter) {
    std::set<AutStateId> out;
    for (AutStateId q : from) {
        auto it = std::lower_bound(a.edges.begin(), a.edges.end(), FiniteAutomaton::Edge{q, letter, 0});
        for (; it != a.edges.end() && it->from == q && it->letter == letter; ++it) out.insert(it->to);
    }
    epsilon_close(a, out);
    return out;
}

inline bool accepts(const FiniteAutomaton& a, const Word& word) {
    auto letters = detail::encode_word(a.alphabet, word);
    std::set<AutStateId> cur{a.initial};
    epsilon_close(a, cur);
    for (LetterId l : letters) cur = step(a, cur, l);
    return std::any_of(cur.begin(), cur.end(), [&](AutStateId q) { return a.is_final(q); });
}

/// Membership for the stack-based kinds with the rules indexed once by
/// (state, letter, top); reuse one instance to test many words.
class StackAcceptor {
public:
    explicit StackAcceptor(const VisiblyPushdownAutomaton& a)
        : alphabet_(a.alphabet), final_(a.final), initial_(a.initial), bottom_(a.bottom),
          nl_(a.alphabet.size()), ns_(a.stack.size()), moves_(a.num_states() * nl_ * (ns_ + 1)) {
        for (const auto& r : a.calls) moves_[slot(r.from, r.letter, ns_)].push_back({r.to, false, {r.push}});
        for (const auto& r : a.internals) moves_[slot(r.from, r.letter, ns_)].push_back({r.to, false, {}});
        for (const auto& r : a.returns) moves_[slot(r.from, r.letter, r.top)].push_back({r.to, r.top != a.bottom, {}});
    }
    explicit StackAcceptor(const PushdownAutomaton& a)
        : alphabet_(a.alphabet), final_(a.final), initial_(a.initial), bottom_(a.bottom),
          nl_(a.alphabet.size()), ns_(a.stack.size()), moves_(a.num_states() * nl_ * (ns_ + 1)) {
        for (const auto& r : a.rules) {
            // push lists are top-first; stacks here keep the top at the back
            std::vector<StackSymbol> push(r.push.rbegin(), r.push.rend());
            moves_[slot(r.from, r.letter, r.top)].push_back({r.to, true, std::move(push)});
        }
    }

    bool operator()(const Word& word) const {
        const auto letters = detail::encode_word(alphabet_, word);
        using Config = std::pair<AutStateId, std::vector<StackSymbol>>; // stack top at back
        std::set<Config> cur{{initial_, {bottom_}}};
        for (LetterId l : letters) {
            std::set<Config> next;
            for (const auto& [q, st] : cur)
                for (std::size_t top : {std::size_t(st.back()), ns_})
                    for (const auto& m : moves_[slot(q, l, top)]) {
                        auto s2 = st;
                        if (m.pop) s2.pop_back();
                        s2.insert(s2.end(), m.push.begin(), m.push.end());
                        next.emplace(m.to, std::move(s2));
                    }
            cur = std::move(next);
        }
        return std::any_of(cur.begin(), cur.end(), [&](const Config& c) { return final_[c.first]; });
    }

private:
    struct Move {
        AutStateId to;
        bool pop;
        std::vector<StackSymbol> push; ///< bottom-first
    };
    std::size_t slot(std::size_t q, std::size_t l, std::size_t top) const { return (q * nl_ + l) * (ns_ + 1) + top; }

    SymbolTable alphabet_;
    std::vector<bool> final_;
    AutStateId initial_;
    StackSymbol bottom_;
    std::size_t nl_, ns_;
    std::vector<std::vector<Move>> moves_; ///< slot ns_ holds moves that ignore the top
};

inline bool accepts(const VisiblyPushdownAutomaton& a, const Word& word) { return StackAcceptor(a)(word); }
inline bool accepts(const PushdownAutomaton& a, const Word& word) { return StackAcceptor(a)(word); }

inline bool accepts(const Automaton& a, const Word& word) {
    return std::visit([&](const auto& x) { return accepts(x, word); }, a);
}

/// Membership test for any kind, prepared once for many words.
class Acceptor {
public:
    explicit Acceptor(const Automaton& a) {
        if (const auto* f = std::get_if<FiniteAutomaton>(&a)) finite_ = f;
        else if (const auto* v = std::get_if<VisiblyPushdownAutomaton>(&a)) stack_.emplace(*v);
        else stack_.emplace(std::get<PushdownAutomaton>(a));
    }
    bool operator()(const Word& w) const { return finite_ ? accepts(*finite_, w) : (*stack_)(w); }

private:
    const FiniteAutomaton* finite_ = nullptr; ///< borrowed; the automaton must outlive the acceptor
    std::optional<StackAcceptor> stack_;
};

// ---------------------------------------------------------------------------
// Builders for the two languages every reasonable class contains

/// Accepts exactly the one-letter words.
inline FiniteAutomaton sigma_automaton(const std::vector<std::string>& alphabet, std::string name = "Sigma") {
    FiniteAutomaton a;
    a.kind = AutomatonKind::dfa;
    a.name = std::move(name);
    for (const auto& l : alphabet) a.add_letter(l);
    AutStateId q0 = a.add_state("q0");
    AutStateId q1 = a.add_state("q1", true);
    for (LetterId l = 0; l < a.alphabet.size(); ++l) a.add_edge(q0, l, q1);
    return a;
}

/// Accepts every word.
inline FiniteAutomaton sigma_star_automaton(const std::vector<std::string>& alphabet,
                                            std::string name = "SigmaStar") {
    FiniteAutomaton a;
    a.kind = AutomatonKind::dfa;
    a.name = std::move(name);
    for (const auto& l : alphabet) a.add_letter(l);
    AutStateId q0 = a.add_state("q0", true);
    for (LetterId l = 0; l < a.alphabet.size(); ++l) a.add_edge(q0, l, q0);
    return a;
}

} // namespace ectl
