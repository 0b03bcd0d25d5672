#pragma once

// Formula size and the temporal/automata depth measures.

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/determinize.hpp"
#include "ectl/environment.hpp"
#include "ectl/formula.hpp"
#include "ectl/lowering.hpp"
#include "ectl/pds.hpp"

namespace ectl {

namespace detail {
inline void collect_subformulas(const Formula& f, std::set<std::string>& out) {
    out.insert(to_string(f));
    // F/G/X carry an implicit constant operand: tt for F and X, ff for G.
    switch (f.op()) {
    case Op::ef:
    case Op::af:
    case Op::ex:
    case Op::ax: out.insert("tt"); break;
    case Op::eg:
    case Op::ag: out.insert("ff"); break;
    default: break;
    }
    for (const auto& c : f.children()) collect_subformulas(*c, out);
}
} // namespace detail

/// Unique subformulas of the written formula (F/G/X read as their
/// two-operand forms) plus |states| + |rules| of every distinct automaton.
inline std::size_t formula_size(const FormulaPtr& f, const Environment& env) {
    std::set<std::string> subs;
    detail::collect_subformulas(*f, subs);
    std::vector<LanguageRef> langs;
    collect_languages(*f, langs);
    std::map<std::string, std::size_t> automata;
    for (const auto& l : langs) automata.emplace(l.key(), automaton_size(env.resolve(l)));
    std::size_t total = subs.size();
    for (const auto& [k, size] : automata) total += size;
    return total;
}

namespace detail {
/// Trimmed epsilon-free view: states both reachable and co-reachable.
inline std::vector<char> useful_states(const FiniteAutomaton& a) {
    const std::size_t n = a.num_states();
    std::vector<std::vector<AutStateId>> fwd(n), bwd(n);
    for (const auto& e : a.edges) {
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto sweep = [n](const std::vector<std::vector<AutStateId>>& g, std::vector<AutStateId> seeds) {
        std::vector<char> seen(n, 0);
        for (auto s : seeds) seen[s] = 1;
        while (!seeds.empty()) {
            auto q = seeds.back();
            seeds.pop_back();
            for (auto r : g[q])
                if (!seen[r]) seen[r] = 1, seeds.push_back(r);
        }
        return seen;
    };
    std::vector<AutStateId> finals;
    for (AutStateId q = 0; q < n; ++q)
        if (a.is_final(q)) finals.push_back(q);
    auto reach = sweep(fwd, {a.initial});
    auto coreach = sweep(bwd, finals);
    std::vector<char> out(n);
    for (std::size_t q = 0; q < n; ++q) out[q] = reach[q] && coreach[q];
    return out;
}
} // namespace detail

/// Longest accepted word of a finite language; nullopt when infinite.
/// Throws on the empty language.
inline std::optional<std::size_t> longest_word_length(const FiniteAutomaton& in) {
    const FiniteAutomaton a = remove_epsilon(in);
    const auto useful = detail::useful_states(a);
    if (!useful[a.initial]) throw ValidationError("automaton '" + a.name + "' accepts the empty language");
    const std::size_t n = a.num_states();
    std::vector<std::vector<AutStateId>> succ(n);
    for (const auto& e : a.edges)
        if (useful[e.from] && useful[e.to]) succ[e.from].push_back(e.to);
    // Longest path by DFS with cycle detection on the trimmed graph.
    std::vector<int> color(n, 0);
    std::vector<long> longest(n, -1);
    bool cyclic = false;
    std::function<long(AutStateId)> visit = [&](AutStateId q) -> long {
        if (color[q] == 2) return longest[q];
        if (color[q] == 1) {
            cyclic = true;
            return 0;
        }
        color[q] = 1;
        long best = a.is_final(q) ? 0 : -1;
        for (auto r : succ[q]) {
            long sub = visit(r);
            if (cyclic) return 0;
            if (sub >= 0) best = std::max(best, sub + 1);
        }
        color[q] = 2;
        longest[q] = best;
        return best;
    };
    long l = visit(a.initial);
    if (cyclic) return std::nullopt;
    return static_cast<std::size_t>(l);
}

/// Longest-word query on any kind. Finite-language detection is only
/// available for finite automata; pushdown kinds are rejected.
inline std::optional<std::size_t> longest_word_length(const Automaton& aut) {
    if (const auto* f = std::get_if<FiniteAutomaton>(&aut)) return longest_word_length(*f);
    throw ValidationError("finite-language detection is not supported for " + std::string(to_string(kind_of(aut))) +
                          " '" + name_of(aut) + "'");
}

/// Shortest accepted word length by breadth-first search over
/// configurations. Emptiness is decided first (by pre*), so the search
/// terminates. Works for every kind.
inline std::size_t shortest_word_length(const Automaton& aut) {
    const PushdownAutomaton a = to_pushdown(aut);
    const std::size_t nsym = a.stack.size();

    // Emptiness: forget the input and ask whether a final state is reachable.
    PushdownSystem pds(a.num_states(), nsym);
    for (const auto& r : a.rules) pds.add_rule(r.from, r.top, r.to, r.push);
    const PushdownSystem norm = normalize(pds);
    std::vector<std::pair<ControlId, StackSymbol>> heads;
    std::vector<ControlId> empties;
    for (AutStateId q = 0; q < a.num_states(); ++q)
        if (a.is_final(q)) {
            empties.push_back(q);
            for (StackSymbol g = 0; g < nsym; ++g) heads.emplace_back(q, g);
        }
    const auto pre = pre_star(norm, heads_target(norm.num_controls(), nsym, heads, empties));
    const StackSymbol bottom[] = {a.bottom};
    if (!pre.accepts(a.initial, bottom)) throw ValidationError("automaton '" + a.name + "' accepts the empty language");

    using Config = std::pair<AutStateId, std::vector<StackSymbol>>; // stack top at back
    std::set<Config> seen{{a.initial, {a.bottom}}};
    std::vector<Config> layer{{a.initial, {a.bottom}}};
    for (std::size_t depth = 0;; ++depth) {
        for (const auto& c : layer)
            if (a.is_final(c.first)) return depth;
        std::vector<Config> next;
        for (const auto& [q, st] : layer)
            for (const auto& r : a.rules) {
                if (r.from != q || r.top != st.back()) continue;
                auto s2 = st;
                s2.pop_back();
                for (auto it = r.push.rbegin(); it != r.push.rend(); ++it) s2.push_back(*it);
                Config c{r.to, std::move(s2)};
                if (seen.insert(c).second) next.push_back(std::move(c));
            }
        layer = std::move(next);
    }
}

/// ad(A): the longest word of a finite language, otherwise the shortest
/// word. Pushdown kinds always use the shortest word.
inline std::size_t automaton_depth(const Automaton& aut) {
    if (const auto* f = std::get_if<FiniteAutomaton>(&aut)) {
        if (auto longest = longest_word_length(*f)) return *longest;
    }
    return shortest_word_length(aut);
}

/// Maximum ad over every automaton referenced by the formula (0 if none).
inline std::size_t automata_depth(const FormulaPtr& f, const Environment& env) {
    std::vector<LanguageRef> langs;
    collect_languages(*f, langs);
    std::size_t d = 0;
    for (const auto& l : langs) d = std::max(d, automaton_depth(env.resolve(l)));
    return d;
}

} // namespace ectl
