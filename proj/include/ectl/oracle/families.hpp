#pragma once

// Generated test families: the layered fairness systems and micro-scale
// corridor tilings, with a brute-force tiling search to judge the latter.

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"
#include "ectl/formula.hpp"
#include "ectl/lts.hpp"

namespace ectl::oracle {

inline std::string fairness_state(char prefix, std::size_t l, std::size_t m) {
    return std::string(1, prefix) + "_" + std::to_string(l) + "_" + std::to_string(m);
}

/// States x_l_m for 0 <= l <= n, 0 <= m <= k+1 over the single action "d":
/// self-loops for m > 0, forward edges x_l_m -> x_l_(m+1), descents
/// x_l_(k+1) -> x_(l-1)_0, and q on every x_l_0. The second system also has
/// s_n_(k+1) -> s_n_0. Designated states are the top layer x_n_0 ... x_n_(k+1).
inline std::pair<Lts, Lts> gen_fairness_family(std::size_t n, std::size_t k) {
    auto build = [&](char prefix, bool closing) {
        Lts lts(std::string("fairness_") + (prefix == 't' ? "T" : "S") + "_" + std::to_string(n) + "_" +
                std::to_string(k));
        const ActionId d = lts.add_action("d");
        const PropId q = lts.add_prop("q");
        auto id = [&](std::size_t l, std::size_t m) { return lts.state_id(fairness_state(prefix, l, m)); };
        for (std::size_t l = 0; l <= n; ++l)
            for (std::size_t m = 0; m <= k + 1; ++m) lts.add_state(fairness_state(prefix, l, m));
        for (std::size_t l = 0; l <= n; ++l) {
            lts.label(id(l, 0), q);
            for (std::size_t m = 0; m <= k + 1; ++m) {
                if (m > 0) lts.add_transition(id(l, m), d, id(l, m));
                if (m < k + 1) lts.add_transition(id(l, m), d, id(l, m + 1));
            }
            if (l >= 1) lts.add_transition(id(l, k + 1), d, id(l - 1, 0));
        }
        if (closing) lts.add_transition(id(n, k + 1), d, id(n, 0));
        for (std::size_t m = 0; m <= k + 1; ++m) lts.add_designated(id(n, m));
        return lts;
    };
    return {build('t', false), build('s', true)};
}

using TilePairs = std::vector<std::pair<std::string, std::string>>;

struct TilingInstance {
    Lts system;                  ///< one state "s" with a self-loop per tile
    FiniteAutomaton violations;  ///< nfa for the violation language
    FormulaPtr formula;          ///< EG[violations] ff
};

namespace detail {
inline bool contains_pair(const TilePairs& r, const std::string& a, const std::string& b) {
    for (const auto& [x, y] : r)
        if (x == a && y == b) return true;
    return false;
}
} // namespace detail

/// Rows have width n and are read row by row. A word is a violation when it
/// ends in a horizontally adjacent pair (columns i, i+1 of one row) outside
/// H, or in a vertically adjacent pair (positions i, i+n) outside V.
inline TilingInstance gen_micro_tiling(std::size_t n, const std::vector<std::string>& tiles, const TilePairs& h,
                                       const TilePairs& v) {
    if (n < 1 || n > 3) throw ValidationError("micro tiling needs 1 <= n <= 3");
    if (tiles.empty() || tiles.size() > 3) throw ValidationError("micro tiling needs 1 to 3 tiles");
    for (const auto& rel : {h, v})
        for (const auto& [a, b] : rel)
            if (std::find(tiles.begin(), tiles.end(), a) == tiles.end() ||
                std::find(tiles.begin(), tiles.end(), b) == tiles.end())
                throw ValidationError("tile relation mentions an unknown tile");

    TilingInstance out;
    Lts& sys = out.system;
    sys.set_name("tiling_" + std::to_string(n));
    const StateId s = sys.add_state("s");
    for (const auto& t : tiles) sys.add_transition(s, sys.add_action(t), s);
    sys.add_designated(s);

    FiniteAutomaton& a = out.violations;
    a.kind = AutomatonKind::nfa;
    a.name = "violations";
    for (const auto& t : tiles) a.alphabet.intern(t);
    const AutStateId init = a.add_state("init");
    a.initial = init;
    const AutStateId fin = a.add_state("bad", true);

    // Vertical: T* t T^(n-1) t'.
    const AutStateId vstart = a.add_state("v");
    a.add_edge(init, kEpsilon, vstart);
    for (LetterId x = 0; x < tiles.size(); ++x) a.add_edge(vstart, x, vstart);
    for (LetterId t = 0; t < tiles.size(); ++t) {
        AutStateId prev = a.add_state("v_" + tiles[t] + "_0");
        a.add_edge(vstart, t, prev);
        for (std::size_t j = 1; j < n; ++j) {
            AutStateId next = a.add_state("v_" + tiles[t] + "_" + std::to_string(j));
            for (LetterId x = 0; x < tiles.size(); ++x) a.add_edge(prev, x, next);
            prev = next;
        }
        for (LetterId t2 = 0; t2 < tiles.size(); ++t2)
            if (!detail::contains_pair(v, tiles[t], tiles[t2])) a.add_edge(prev, t2, fin);
    }

    // Horizontal: (T^n)* T^i t t' for 0 <= i <= n-2.
    if (n >= 2) {
        std::vector<AutStateId> col;
        for (std::size_t j = 0; j < n; ++j) col.push_back(a.add_state("h_col_" + std::to_string(j)));
        a.add_edge(init, kEpsilon, col[0]);
        for (std::size_t j = 0; j < n; ++j)
            for (LetterId x = 0; x < tiles.size(); ++x) a.add_edge(col[j], x, col[(j + 1) % n]);
        for (LetterId t = 0; t < tiles.size(); ++t) {
            const AutStateId after = a.add_state("h_" + tiles[t]);
            for (std::size_t j = 0; j + 2 <= n; ++j) a.add_edge(col[j], t, after);
            for (LetterId t2 = 0; t2 < tiles.size(); ++t2)
                if (!detail::contains_pair(h, tiles[t], tiles[t2])) a.add_edge(after, t2, fin);
        }
    }
    out.formula = make::eg(LanguageRef::named(a.name), make::ff());
    return out;
}

/// Brute force: rows that respect H form the nodes, V-compatible row pairs
/// the edges; a corridor tiling exists iff this graph has a cycle.
inline bool tiling_exists(std::size_t n, const std::vector<std::string>& tiles, const TilePairs& h,
                          const TilePairs& v) {
    std::vector<std::vector<std::size_t>> rows;
    std::vector<std::size_t> row(n, 0);
    std::function<void(std::size_t)> fill = [&](std::size_t j) {
        if (j == n) {
            rows.push_back(row);
            return;
        }
        for (std::size_t t = 0; t < tiles.size(); ++t) {
            if (j > 0 && !detail::contains_pair(h, tiles[row[j - 1]], tiles[t])) continue;
            row[j] = t;
            fill(j + 1);
        }
    };
    fill(0);
    const std::size_t m = rows.size();
    auto compatible = [&](std::size_t r1, std::size_t r2) {
        for (std::size_t j = 0; j < n; ++j)
            if (!detail::contains_pair(v, tiles[rows[r1][j]], tiles[rows[r2][j]])) return false;
        return true;
    };
    std::vector<int> color(m, 0);
    std::function<bool(std::size_t)> cyclic = [&](std::size_t r) {
        color[r] = 1;
        for (std::size_t r2 = 0; r2 < m; ++r2) {
            if (!compatible(r, r2)) continue;
            if (color[r2] == 1) return true;
            if (color[r2] == 0 && cyclic(r2)) return true;
        }
        color[r] = 2;
        return false;
    };
    for (std::size_t r = 0; r < m; ++r)
        if (color[r] == 0 && cyclic(r)) return true;
    return false;
}

} // namespace ectl::oracle
