#pragma once

// Exact reference for finite-automaton annotations: determinize with a
// separate subset construction, then search the product graph directly.

#include <map>
#include <set>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"
#include "ectl/lts.hpp"
#include "ectl/state_set.hpp"

namespace ectl::oracle {

enum class ProductMode { until, release };

/// A DFA over the system's actions. Subset 0 is the empty set (the sink).
struct SubsetDfa {
    std::vector<std::set<AutStateId>> subsets;
    std::vector<bool> accepting;
    std::vector<std::vector<std::size_t>> delta; ///< [subset][action]
    std::size_t initial = 0;
};

inline SubsetDfa subset_dfa(const FiniteAutomaton& a, const Lts& lts) {
    auto closure = [&](std::set<AutStateId> s) {
        std::vector<AutStateId> todo(s.begin(), s.end());
        while (!todo.empty()) {
            auto q = todo.back();
            todo.pop_back();
            for (const auto& e : a.edges)
                if (e.from == q && e.letter == kEpsilon && s.insert(e.to).second) todo.push_back(e.to);
        }
        return s;
    };
    // Map each system action to an automaton letter (or none).
    std::vector<std::optional<LetterId>> letter(lts.num_actions());
    for (ActionId x = 0; x < lts.num_actions(); ++x) letter[x] = a.alphabet.find(lts.action_name(x));

    SubsetDfa d;
    std::map<std::set<AutStateId>, std::size_t> index;
    auto intern = [&](std::set<AutStateId> s) {
        auto [it, fresh] = index.emplace(s, d.subsets.size());
        if (fresh) {
            bool acc = false;
            for (auto q : s) acc = acc || a.final[q];
            d.subsets.push_back(std::move(s));
            d.accepting.push_back(acc);
            d.delta.emplace_back();
        }
        return it->second;
    };
    intern({});
    d.initial = intern(closure({a.initial}));
    for (std::size_t i = 0; i < d.subsets.size(); ++i) {
        std::vector<std::size_t> row(lts.num_actions(), 0);
        for (ActionId x = 0; x < lts.num_actions(); ++x) {
            if (!letter[x]) continue;
            std::set<AutStateId> next;
            for (const auto& e : a.edges)
                if (e.letter == *letter[x] && d.subsets[i].count(e.from)) next.insert(e.to);
            row[x] = intern(closure(std::move(next)));
        }
        d.delta[i] = std::move(row);
    }
    return d;
}

/// until: states from which the product reaches (accepting, sat_y) moving
/// only out of sat_x states. release: states from which a maximal product
/// path avoids (accepting, not sat_y) until it is released at a sat_x
/// state satisfying the release condition.
inline StateSet finite_product_check(const Lts& lts, const StateSet& sat_x, const FiniteAutomaton& aut,
                                     const StateSet& sat_y, ProductMode mode) {
    if (aut.kind != AutomatonKind::dfa && aut.kind != AutomatonKind::nfa)
        throw ValidationError("finite_product_check expects a finite automaton");
    const SubsetDfa d = subset_dfa(aut, lts);
    const std::size_t ns = lts.num_states();
    const std::size_t nodes = d.subsets.size() * ns;
    auto node = [&](std::size_t q, StateId s) { return q * ns + s; };

    std::vector<std::vector<std::size_t>> succ(nodes);
    std::vector<char> good(nodes, 0), bad(nodes, 0);
    for (std::size_t q = 0; q < d.subsets.size(); ++q)
        for (StateId s = 0; s < ns; ++s) {
            const std::size_t v = node(q, s);
            const bool acc = d.accepting[q];
            if (mode == ProductMode::until) {
                good[v] = acc && sat_y.contains(s);
                if (sat_x.contains(s))
                    for (const auto& e : lts.successors(s)) succ[v].push_back(node(d.delta[q][e.action], e.target));
            } else {
                if (q == 0 || (sat_x.contains(s) && (!acc || sat_y.contains(s)))) {
                    good[v] = 1; // released, or no extension can be in L
                } else if (acc && !sat_y.contains(s)) {
                    bad[v] = 1;
                } else {
                    for (const auto& e : lts.successors(s)) succ[v].push_back(node(d.delta[q][e.action], e.target));
                    if (succ[v].empty()) good[v] = 1; // maximal path ends here
                }
            }
        }

    std::vector<char> win(nodes, 0);
    if (mode == ProductMode::until) {
        // Backward closure of good nodes.
        std::vector<std::vector<std::size_t>> pred(nodes);
        for (std::size_t v = 0; v < nodes; ++v)
            for (auto w : succ[v]) pred[w].push_back(v);
        std::vector<std::size_t> todo;
        for (std::size_t v = 0; v < nodes; ++v)
            if (good[v]) win[v] = 1, todo.push_back(v);
        while (!todo.empty()) {
            auto w = todo.back();
            todo.pop_back();
            for (auto v : pred[w])
                if (!win[v]) win[v] = 1, todo.push_back(v);
        }
    } else {
        // Winning: reach a good node or a cycle, never entering bad nodes.
        // Iteratively strip non-good nodes whose every successor is losing.
        std::vector<char> alive(nodes, 0);
        for (std::size_t v = 0; v < nodes; ++v) alive[v] = !bad[v];
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t v = 0; v < nodes; ++v) {
                if (!alive[v] || good[v]) continue;
                bool any = false;
                for (auto w : succ[v]) any = any || alive[w];
                if (!any) alive[v] = 0, changed = true;
            }
        }
        win = alive;
    }
    StateSet out(ns);
    for (StateId s = 0; s < ns; ++s)
        if (win[node(d.initial, s)]) out.insert(s);
    return out;
}

} // namespace ectl::oracle
