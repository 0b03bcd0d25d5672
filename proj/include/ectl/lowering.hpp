#pragma once

#include <vector>

#include "ectl/automata.hpp"
#include "ectl/determinize.hpp"

namespace ectl {

/// Uniform real-time pushdown form of any automaton kind.
///
/// Finite automata get the stack alphabet {⊥} and stack-neutral rules
/// (epsilon edges are eliminated first). Visibly pushdown rules are
/// expanded per stack top: calls push on top of whatever is there,
/// returns pop (or read ⊥ and keep it), internals rewrite top by itself.
/// The result is a dpda exactly when the input is deterministic.
inline PushdownAutomaton to_pushdown(const FiniteAutomaton& in) {
    const FiniteAutomaton a = remove_epsilon(in);
    PushdownAutomaton out;
    out.name = a.name;
    out.alphabet = a.alphabet;
    out.states = a.states;
    out.final = a.final;
    out.initial = a.initial;
    out.bottom = out.add_stack_symbol("BOT");
    for (const auto& e : a.edges) out.rules.push_back({e.from, e.letter, out.bottom, e.to, {out.bottom}});
    detail::sort_unique(out.rules);
    out.kind = out.is_deterministic() ? AutomatonKind::dpda : AutomatonKind::pda;
    return out;
}

inline PushdownAutomaton to_pushdown(const VisiblyPushdownAutomaton& a) {
    PushdownAutomaton out;
    out.name = a.name;
    out.alphabet = a.alphabet;
    out.states = a.states;
    out.final = a.final;
    out.initial = a.initial;
    out.stack = a.stack;
    out.bottom = a.bottom;
    const auto nstack = static_cast<StackSymbol>(a.stack.size());
    for (const auto& r : a.calls)
        for (StackSymbol g = 0; g < nstack; ++g) out.rules.push_back({r.from, r.letter, g, r.to, {r.push, g}});
    for (const auto& r : a.internals)
        for (StackSymbol g = 0; g < nstack; ++g) out.rules.push_back({r.from, r.letter, g, r.to, {g}});
    for (const auto& r : a.returns) {
        std::vector<StackSymbol> push;
        if (r.top == a.bottom) push.push_back(a.bottom);
        out.rules.push_back({r.from, r.letter, r.top, r.to, std::move(push)});
    }
    detail::sort_unique(out.rules);
    out.kind = out.is_deterministic() ? AutomatonKind::dpda : AutomatonKind::pda;
    return out;
}

inline PushdownAutomaton to_pushdown(const PushdownAutomaton& a) { return a; }

inline PushdownAutomaton to_pushdown(const Automaton& a) {
    return std::visit([](const auto& x) { return to_pushdown(x); }, a);
}

} // namespace ectl
