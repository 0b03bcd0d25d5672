#pragma once

// Determinization (subset and summary-set constructions), completion and
// complement for the automaton kinds that admit them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"

namespace ectl {

inline constexpr std::size_t kDefaultStateCap = 65536;
inline constexpr const char* kSinkName = "__sink";

/// Language-preserving epsilon elimination; keeps the state set.
inline FiniteAutomaton remove_epsilon(const FiniteAutomaton& nfa) {
    if (!nfa.has_epsilon()) return nfa;
    FiniteAutomaton out;
    out.kind = AutomatonKind::nfa;
    out.name = nfa.name;
    out.alphabet = nfa.alphabet;
    for (AutStateId q = 0; q < nfa.num_states(); ++q) out.add_state(nfa.states.name(q));
    out.initial = nfa.initial;
    for (AutStateId q = 0; q < nfa.num_states(); ++q) {
        std::set<AutStateId> closure{q};
        epsilon_close(nfa, closure);
        for (AutStateId r : closure) {
            if (nfa.is_final(r)) out.final[q] = true;
            for (const auto& e : nfa.edges)
                if (e.from == r && e.letter != kEpsilon) out.edges.push_back({q, e.letter, e.to});
        }
    }
    detail::sort_unique(out.edges);
    return out;
}

namespace detail {
inline std::string subset_name(const SymbolTable& names, const std::set<AutStateId>& subset) {
    std::vector<std::string> parts;
    for (AutStateId q : subset) parts.push_back(names.name(q));
    std::sort(parts.begin(), parts.end());
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
    return out + "}";
}
} // namespace detail

/// Subset construction over epsilon-closed state sets. The result is a
/// complete DFA whose states are the reachable subsets (the empty subset
/// acts as the sink), named as sorted state-name lists.
inline FiniteAutomaton determinize_nfa(const FiniteAutomaton& nfa, std::size_t cap = kDefaultStateCap) {
    validate(nfa);
    FiniteAutomaton dfa;
    dfa.kind = AutomatonKind::dfa;
    dfa.name = "det(" + nfa.name + ")";
    dfa.alphabet = nfa.alphabet;

    std::map<std::set<AutStateId>, AutStateId> index;
    std::deque<std::set<AutStateId>> work;
    auto intern = [&](std::set<AutStateId> subset) {
        auto it = index.find(subset);
        if (it != index.end()) return it->second;
        if (index.size() >= cap) throw CapExceededError(nfa.name, cap);
        bool fin = std::any_of(subset.begin(), subset.end(), [&](AutStateId q) { return nfa.is_final(q); });
        AutStateId id = dfa.add_state(detail::subset_name(nfa.states, subset), fin);
        index.emplace(subset, id);
        work.push_back(std::move(subset));
        return id;
    };

    std::set<AutStateId> start{nfa.initial};
    epsilon_close(nfa, start);
    dfa.initial = intern(start);
    while (!work.empty()) {
        auto subset = std::move(work.front());
        work.pop_front();
        AutStateId from = index.at(subset);
        for (LetterId l = 0; l < nfa.alphabet.size(); ++l) {
            AutStateId to = intern(step(nfa, subset, l));
            dfa.edges.push_back({from, l, to});
        }
    }
    detail::sort_unique(dfa.edges);
    return dfa;
}

/// Summary-set determinization of a visibly pushdown automaton.
///
/// A control state is a set S of pairs (q, q'): q' is reachable now from q
/// at the position just after the last pending call (or from the initial
/// state at top level). A call on letter a pushes the call relation of S,
/// the triples (q, target, pushed symbol) of the a-rules leaving S; a
/// matched return joins that relation with the current summary through the
/// return rules popping the pushed symbol. A return on the bottom symbol
/// stays at top level.
///
/// Return rules are built only for (state, top symbol) pairs that some run
/// reaches; every other pair returns to the empty summary, which is the
/// sink, so the output is complete.
inline VisiblyPushdownAutomaton determinize_vpa(const VisiblyPushdownAutomaton& vpa,
                                                std::size_t cap = kDefaultStateCap) {
    validate(vpa);
    // A summary is a bit matrix: bit q*n + q1 stands for the pair (q, q1).
    using Bits = std::vector<std::uint64_t>;
    struct BitsHash {
        std::size_t operator()(const Bits& b) const noexcept {
            std::size_t h = b.size();
            for (auto w : b) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };
    using CallRel = std::vector<std::tuple<AutStateId, AutStateId, StackSymbol>>; // sorted, unique

    const std::size_t n = vpa.num_states();
    const std::size_t words = (n * n + 63) / 64;
    const std::size_t nl = vpa.alphabet.size(), ns = vpa.stack.size();
    auto test = [&](const Bits& b, std::size_t q, std::size_t q1) { return b[(q * n + q1) / 64] >> ((q * n + q1) % 64) & 1u; };
    auto set = [&](Bits& b, std::size_t q, std::size_t q1) { b[(q * n + q1) / 64] |= std::uint64_t{1} << ((q * n + q1) % 64); };

    std::vector<std::vector<AutStateId>> internal_to(n * nl), return_to(n * nl * ns);
    std::vector<std::vector<std::pair<AutStateId, StackSymbol>>> call_to(n * nl);
    for (const auto& r : vpa.internals) internal_to[r.from * nl + r.letter].push_back(r.to);
    for (const auto& r : vpa.calls) call_to[r.from * nl + r.letter].emplace_back(r.to, r.push);
    for (const auto& r : vpa.returns) return_to[(r.from * nl + r.letter) * ns + r.top].push_back(r.to);

    VisiblyPushdownAutomaton out;
    out.kind = AutomatonKind::dvpa;
    out.name = "det(" + vpa.name + ")";
    out.alphabet = vpa.alphabet;
    out.letter_class = vpa.letter_class;
    out.bottom = out.add_stack_symbol(vpa.stack.name(vpa.bottom));

    auto summary_name = [&](const Bits& b) {
        std::string name = "{";
        bool first = true;
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t q1 = 0; q1 < n; ++q1)
                if (test(b, q, q1)) {
                    name += (first ? "(" : ",(") + vpa.states.name(q) + "," + vpa.states.name(q1) + ")";
                    first = false;
                }
        return name + "}";
    };
    auto frame_name = [&](const CallRel& r) {
        std::string name = "<";
        bool first = true;
        for (const auto& [q, t, g] : r) {
            name += (first ? "(" : ",(") + vpa.states.name(q) + "," + vpa.states.name(t) + "," + vpa.stack.name(g) + ")";
            first = false;
        }
        return name + ">";
    };

    const auto call_letters = vpa.letters_of(LetterClass::call);
    const auto ret_letters = vpa.letters_of(LetterClass::ret);
    const auto int_letters = vpa.letters_of(LetterClass::internal);

    std::vector<Bits> summaries;
    std::unordered_map<Bits, AutStateId, BitsHash> state_index;
    std::vector<CallRel> frames; // stack symbol id - 1 -> call relation
    std::map<CallRel, StackSymbol> frame_index;
    std::vector<char> expanded;
    std::vector<std::vector<AutStateId>> internal_next;                     // per state
    std::vector<std::vector<std::pair<AutStateId, StackSymbol>>> call_next; // per state

    // Reachable (state, top symbol) pairs as one row of marks per state; per
    // frame, the tops it was pushed onto and the states entered by popping
    // it. Return targets per state, in order of (top, letter) discovery.
    std::vector<std::vector<char>> reached;
    std::vector<std::vector<std::tuple<StackSymbol, LetterId, AutStateId>>> return_next;
    std::vector<std::vector<StackSymbol>> pushed_onto;
    std::vector<std::set<AutStateId>> popped_into;
    std::deque<std::pair<AutStateId, StackSymbol>> work;

    auto intern_state = [&](Bits b) {
        auto it = state_index.find(b);
        if (it != state_index.end()) return it->second;
        if (state_index.size() >= cap) throw CapExceededError(vpa.name, cap);
        bool fin = false;
        for (std::size_t q = 0; q < n && !fin; ++q)
            for (std::size_t q1 = 0; q1 < n && !fin; ++q1) fin = test(b, q, q1) && vpa.is_final(q1);
        AutStateId id = out.add_state(summary_name(b), fin);
        state_index.emplace(b, id);
        summaries.push_back(std::move(b));
        expanded.push_back(0);
        internal_next.emplace_back();
        call_next.emplace_back();
        reached.emplace_back();
        return_next.emplace_back();
        return id;
    };
    auto intern_frame = [&](CallRel r) {
        auto it = frame_index.find(r);
        if (it != frame_index.end()) return it->second;
        StackSymbol g = out.add_stack_symbol(frame_name(r));
        frame_index.emplace(r, g);
        frames.push_back(std::move(r));
        pushed_onto.emplace_back();
        popped_into.emplace_back();
        return g;
    };
    auto reach = [&](AutStateId s, StackSymbol g) {
        auto& row = reached[s];
        if (row.size() <= g) row.resize(std::max<std::size_t>(g + 1, 2 * row.size()), 0);
        if (row[g]) return;
        row[g] = 1;
        work.emplace_back(s, g);
    };
    auto push_onto = [&](StackSymbol f, StackSymbol h) {
        auto& tops = pushed_onto[f - 1];
        if (std::find(tops.begin(), tops.end(), h) != tops.end()) return;
        tops.push_back(h);
        for (AutStateId t : popped_into[f - 1]) reach(t, h);
    };

    {
        Bits init(words, 0);
        set(init, vpa.initial, vpa.initial);
        out.initial = intern_state(std::move(init));
    }
    reach(out.initial, out.bottom);

    while (!work.empty()) {
        const auto [s, g] = work.front();
        work.pop_front();
        if (!expanded[s]) {
            expanded[s] = 1;
            for (LetterId a : int_letters) {
                Bits next(words, 0);
                for (std::size_t q = 0; q < n; ++q)
                    for (std::size_t q1 = 0; q1 < n; ++q1)
                        if (test(summaries[s], q, q1))
                            for (AutStateId t : internal_to[q1 * nl + a]) set(next, q, t);
                const AutStateId to = intern_state(std::move(next));
                out.internals.push_back({s, a, to});
                internal_next[s].push_back(to);
            }
            for (LetterId c : call_letters) {
                Bits next(words, 0);
                CallRel rel;
                for (std::size_t q = 0; q < n; ++q)
                    for (std::size_t q1 = 0; q1 < n; ++q1)
                        if (test(summaries[s], q, q1))
                            for (const auto& [t, push] : call_to[q1 * nl + c]) {
                                set(next, t, t);
                                rel.emplace_back(static_cast<AutStateId>(q), t, push);
                            }
                std::sort(rel.begin(), rel.end());
                rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
                const AutStateId to = intern_state(std::move(next));
                const StackSymbol f = intern_frame(std::move(rel));
                out.calls.push_back({s, c, to, f});
                call_next[s].emplace_back(to, f);
            }
        }
        for (AutStateId to : std::vector<AutStateId>(internal_next[s])) reach(to, g);
        for (const auto& [to, f] : std::vector<std::pair<AutStateId, StackSymbol>>(call_next[s])) {
            push_onto(f, g);
            reach(to, f);
        }
        for (LetterId r : ret_letters) {
            Bits next(words, 0);
            const Bits& cur = summaries[s];
            if (g == out.bottom) {
                for (std::size_t q = 0; q < n; ++q)
                    for (std::size_t q1 = 0; q1 < n; ++q1)
                        if (test(cur, q, q1))
                            for (AutStateId t : return_to[(q1 * nl + r) * ns + vpa.bottom]) set(next, q, t);
            } else {
                for (const auto& [q, t, push] : frames[g - 1])
                    for (std::size_t p2 = 0; p2 < n; ++p2)
                        if (test(cur, t, p2))
                            for (AutStateId u : return_to[(p2 * nl + r) * ns + push]) set(next, q, u);
            }
            const AutStateId to = intern_state(std::move(next));
            return_next[s].emplace_back(g, r, to);
            if (g == out.bottom) {
                reach(to, out.bottom);
            } else if (popped_into[g - 1].insert(to).second) {
                for (StackSymbol h : std::vector<StackSymbol>(pushed_onto[g - 1])) reach(to, h);
            }
        }
    }

    const AutStateId sink = intern_state(Bits(words, 0));
    const StackSymbol empty_frame = intern_frame(CallRel{});
    // Returns are emitted in (from, letter, top) order, which is already sorted.
    const std::size_t ntop = out.stack.size();
    std::vector<AutStateId> row(nl * ntop);
    for (AutStateId q = 0; q < out.num_states(); ++q) {
        if (!expanded[q]) {
            for (LetterId a : int_letters) out.internals.push_back({q, a, sink});
            for (LetterId c : call_letters) out.calls.push_back({q, c, sink, empty_frame});
        }
        std::fill(row.begin(), row.end(), sink);
        for (const auto& [g, r, to] : return_next[q]) row[r * ntop + g] = to;
        std::vector<LetterId> letters = ret_letters;
        std::sort(letters.begin(), letters.end());
        for (LetterId r : letters)
            for (StackSymbol g = 0; g < ntop; ++g) out.returns.push_back({q, r, g, row[r * ntop + g]});
    }

    detail::sort_unique(out.calls);
    detail::sort_unique(out.internals);
    return out;
}

// ---------------------------------------------------------------------------
// Completion

inline FiniteAutomaton complete(const FiniteAutomaton& a) {
    validate(a);
    if (!a.is_deterministic()) throw ValidationError("complete: automaton '" + a.name + "' is not deterministic");
    FiniteAutomaton out = a;
    out.kind = AutomatonKind::dfa;
    if (a.is_complete()) return out;
    if (out.states.find(kSinkName)) throw ValidationError("complete: state name '__sink' is already taken");
    AutStateId sink = out.add_state(kSinkName);
    std::vector<FiniteAutomaton::Edge> added;
    for (AutStateId q = 0; q < out.num_states(); ++q)
        for (LetterId l = 0; l < out.alphabet.size(); ++l) {
            auto it = std::lower_bound(out.edges.begin(), out.edges.end(), FiniteAutomaton::Edge{q, l, 0});
            if (it == out.edges.end() || it->from != q || it->letter != l) added.push_back({q, l, sink});
        }
    out.edges.insert(out.edges.end(), added.begin(), added.end());
    detail::sort_unique(out.edges);
    return out;
}

/// Missing call rules push an arbitrary non-bottom symbol: the sink is
/// absorbing, so the pushed content is never inspected.
inline VisiblyPushdownAutomaton complete(const VisiblyPushdownAutomaton& a) {
    validate(a);
    if (!a.is_deterministic()) throw ValidationError("complete: automaton '" + a.name + "' is not deterministic");
    VisiblyPushdownAutomaton out = a;
    out.kind = AutomatonKind::dvpa;
    if (a.is_complete()) return out;
    if (out.states.find(kSinkName)) throw ValidationError("complete: state name '__sink' is already taken");
    AutStateId sink = out.add_state(kSinkName);
    StackSymbol filler = out.bottom;
    for (StackSymbol g = 0; g < out.stack.size(); ++g)
        if (g != out.bottom) {
            filler = g;
            break;
        }
    if (filler == out.bottom) filler = out.add_stack_symbol(kSinkName);

    std::set<std::pair<AutStateId, LetterId>> has_call, has_internal;
    std::set<std::tuple<AutStateId, LetterId, StackSymbol>> has_return;
    for (const auto& r : out.calls) has_call.insert({r.from, r.letter});
    for (const auto& r : out.internals) has_internal.insert({r.from, r.letter});
    for (const auto& r : out.returns) has_return.insert({r.from, r.letter, r.top});

    for (AutStateId q = 0; q < out.num_states(); ++q) {
        for (LetterId a2 : out.letters_of(LetterClass::call))
            if (!has_call.count({q, a2})) out.calls.push_back({q, a2, sink, filler});
        for (LetterId a2 : out.letters_of(LetterClass::internal))
            if (!has_internal.count({q, a2})) out.internals.push_back({q, a2, sink});
        for (LetterId a2 : out.letters_of(LetterClass::ret))
            for (StackSymbol g = 0; g < out.stack.size(); ++g)
                if (!has_return.count({q, a2, g})) out.returns.push_back({q, a2, g, sink});
    }
    detail::sort_unique(out.calls);
    detail::sort_unique(out.internals);
    detail::sort_unique(out.returns);
    return out;
}

/// Missing (q, a, top) triggers move to the sink and rewrite top by itself.
inline PushdownAutomaton complete(const PushdownAutomaton& a) {
    validate(a);
    if (!a.is_deterministic()) throw ValidationError("complete: automaton '" + a.name + "' is not deterministic");
    PushdownAutomaton out = a;
    out.kind = AutomatonKind::dpda;
    if (a.is_complete()) return out;
    if (out.states.find(kSinkName)) throw ValidationError("complete: state name '__sink' is already taken");
    AutStateId sink = out.add_state(kSinkName);
    std::set<std::tuple<AutStateId, LetterId, StackSymbol>> have;
    for (const auto& r : out.rules) have.insert({r.from, r.letter, r.top});
    for (AutStateId q = 0; q < out.num_states(); ++q)
        for (LetterId l = 0; l < out.alphabet.size(); ++l)
            for (StackSymbol g = 0; g < out.stack.size(); ++g)
                if (!have.count({q, l, g})) out.rules.push_back({q, l, g, sink, {g}});
    detail::sort_unique(out.rules);
    return out;
}

inline Automaton complete(const Automaton& a) {
    return std::visit([](const auto& x) -> Automaton { return complete(x); }, a);
}

// ---------------------------------------------------------------------------
// Complement

inline FiniteAutomaton complement(const FiniteAutomaton& a) {
    validate(a);
    if (!a.is_complete())
        throw ValidationError("complement: automaton '" + a.name + "' must be deterministic and complete");
    FiniteAutomaton out = a;
    out.name = "~" + a.name;
    out.final.flip();
    return out;
}

inline VisiblyPushdownAutomaton complement(const VisiblyPushdownAutomaton& a) {
    validate(a);
    if (!a.is_complete())
        throw ValidationError("complement: automaton '" + a.name + "' must be deterministic and complete");
    VisiblyPushdownAutomaton out = a;
    out.name = "~" + a.name;
    out.final.flip();
    return out;
}

inline Automaton complement(const Automaton& a) {
    if (std::holds_alternative<PushdownAutomaton>(a))
        throw ValidationError("complement: pushdown automaton '" + name_of(a) + "' is not supported");
    return std::visit(
        [](const auto& x) -> Automaton {
            if constexpr (std::is_same_v<std::decay_t<decltype(x)>, PushdownAutomaton>) return x;
            else return complement(x);
        },
        a);
}

/// Determinizes when needed, completes, then flips the final set.
inline Automaton complement_language(const Automaton& a, std::size_t cap = kDefaultStateCap) {
    switch (kind_of(a)) {
    case AutomatonKind::nfa: {
        const auto& f = std::get<FiniteAutomaton>(a);
        return complement(f.is_deterministic() ? complete(f) : determinize_nfa(f, cap));
    }
    case AutomatonKind::dfa: return complement(complete(std::get<FiniteAutomaton>(a)));
    case AutomatonKind::vpa: {
        const auto& v = std::get<VisiblyPushdownAutomaton>(a);
        return complement(v.is_deterministic() ? complete(v) : determinize_vpa(v, cap));
    }
    case AutomatonKind::dvpa: return complement(complete(std::get<VisiblyPushdownAutomaton>(a)));
    default:
        throw ValidationError("complement of " + std::string(to_string(kind_of(a))) + " '" + name_of(a) +
                              "' is not supported");
    }
}

} // namespace ectl
