#pragma once

// Pushdown systems, P-automata over configurations and the saturation
// procedures on top of them: pre*, repeating heads and infinite runs.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/error.hpp"

namespace ectl {

using ControlId = std::uint32_t;
using CaState = std::uint32_t;
inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

/// (from, top) -> (to, push), push written top-first.
struct PdsRule {
    ControlId from;
    StackSymbol top;
    ControlId to;
    std::vector<StackSymbol> push;
    std::uint32_t tag = kNone; ///< caller payload, kept by normalize() on the first chain rule
};

class PushdownSystem {
public:
    PushdownSystem() = default;
    PushdownSystem(std::size_t controls, std::size_t stack_symbols, std::optional<StackSymbol> bottom = std::nullopt)
        : num_controls_(controls), num_stack_(stack_symbols), bottom_(bottom) {}

    ControlId add_control(std::string name = {}) {
        ControlId id = static_cast<ControlId>(num_controls_++);
        if (!name.empty() || !control_names_.empty()) {
            control_names_.resize(num_controls_);
            control_names_[id] = std::move(name);
        }
        return id;
    }
    StackSymbol add_stack_symbol(std::string name = {}) {
        StackSymbol id = static_cast<StackSymbol>(num_stack_++);
        if (!name.empty() || !stack_names_.empty()) {
            stack_names_.resize(num_stack_);
            stack_names_[id] = std::move(name);
        }
        return id;
    }
    void set_control_names(std::vector<std::string> names) { control_names_ = std::move(names); }
    void set_stack_names(std::vector<std::string> names) { stack_names_ = std::move(names); }

    void add_rule(ControlId from, StackSymbol top, ControlId to, std::vector<StackSymbol> push,
                  std::uint32_t tag = kNone) {
        if (from >= num_controls_ || to >= num_controls_) throw ValidationError("pds rule uses an unknown control state");
        if (top >= num_stack_) throw ValidationError("pds rule uses an unknown stack symbol");
        for (StackSymbol g : push)
            if (g >= num_stack_) throw ValidationError("pds rule pushes an unknown stack symbol");
        if (bottom_) {
            const StackSymbol b = *bottom_;
            for (std::size_t i = 0; i < push.size(); ++i)
                if (push[i] == b && !(top == b && i + 1 == push.size()))
                    throw ValidationError("pds rule pushes the bottom symbol");
            if (top == b && (push.empty() || push.back() != b))
                throw ValidationError("pds rule removes the bottom symbol");
        }
        rules_.push_back({from, top, to, std::move(push), tag});
    }

    std::size_t num_controls() const noexcept { return num_controls_; }
    std::size_t num_stack_symbols() const noexcept { return num_stack_; }
    std::optional<StackSymbol> bottom() const noexcept { return bottom_; }
    const std::vector<PdsRule>& rules() const noexcept { return rules_; }

    std::string control_name(ControlId p) const {
        if (p < control_names_.size() && !control_names_[p].empty()) return control_names_[p];
        return "p" + std::to_string(p);
    }
    std::string stack_name(StackSymbol g) const {
        if (g < stack_names_.size() && !stack_names_[g].empty()) return stack_names_[g];
        return "g" + std::to_string(g);
    }

    bool is_normalized() const {
        return std::all_of(rules_.begin(), rules_.end(), [](const PdsRule& r) { return r.push.size() <= 2; });
    }

    /// Rules grouped by trigger (from, top).
    std::vector<std::vector<std::uint32_t>> rules_by_trigger() const {
        std::vector<std::vector<std::uint32_t>> out(num_controls_ * num_stack_);
        for (std::uint32_t i = 0; i < rules_.size(); ++i) out[rules_[i].from * num_stack_ + rules_[i].top].push_back(i);
        return out;
    }

private:
    std::size_t num_controls_ = 0;
    std::size_t num_stack_ = 0;
    std::optional<StackSymbol> bottom_;
    std::vector<PdsRule> rules_;
    std::vector<std::string> control_names_;
    std::vector<std::string> stack_names_;
};

/// Splits every rule with a replacement longer than two into a chain of
/// push rules through fresh control states. Original control ids are kept;
/// fresh ones are appended and named "norm:<rule>:<i>".
inline PushdownSystem normalize(const PushdownSystem& pds) {
    if (pds.is_normalized()) return pds;
    std::vector<PdsRule> rules = pds.rules();
    PushdownSystem rebuilt(pds.num_controls(), pds.num_stack_symbols(), pds.bottom());
    std::vector<std::string> cnames, snames;
    for (ControlId p = 0; p < pds.num_controls(); ++p) cnames.push_back(pds.control_name(p));
    for (StackSymbol g = 0; g < pds.num_stack_symbols(); ++g) snames.push_back(pds.stack_name(g));
    rebuilt.set_control_names(cnames);
    rebuilt.set_stack_names(snames);
    for (std::uint32_t i = 0; i < rules.size(); ++i) {
        const PdsRule& r = rules[i];
        const std::size_t k = r.push.size();
        if (k <= 2) {
            rebuilt.add_rule(r.from, r.top, r.to, r.push, r.tag);
            continue;
        }
        // (p, top) -> (f1, w[k-2] w[k-1]); (f_j, w[k-1-j]) -> (f_{j+1}, w[k-2-j] w[k-1-j]); last lands in r.to.
        ControlId prev = rebuilt.add_control("norm:" + std::to_string(i) + ":1");
        // Bottom discipline is checked on the original rule; the chain only
        // rewrites non-bottom tops except possibly the first step.
        std::vector<StackSymbol> first{r.push[k - 2], r.push[k - 1]};
        rebuilt.add_rule(r.from, r.top, prev, first, r.tag);
        for (std::size_t j = 1; j + 1 < k; ++j) {
            const bool last = j + 2 == k;
            ControlId next = last ? r.to : rebuilt.add_control("norm:" + std::to_string(i) + ":" + std::to_string(j + 1));
            StackSymbol below = r.push[k - 1 - j];
            StackSymbol above = r.push[k - 2 - j];
            rebuilt.add_rule(prev, below, next, {above, below}, kNone);
            prev = next;
        }
    }
    return rebuilt;
}

// ---------------------------------------------------------------------------
// Configuration automata

/// Finite automaton over the stack alphabet representing a regular set of
/// configurations: (p, w) is accepted iff w is accepted from state p.
/// States [0, num_controls) are the control states; the rest are auxiliary.
class ConfigAutomaton {
public:
    struct Edge {
        CaState from;
        StackSymbol symbol;
        CaState to;
        friend auto operator<=>(const Edge&, const Edge&) = default;
    };
    /// Why an edge exists: kNone for edges of the original target,
    /// otherwise the saturating rule and, for push rules, the state
    /// reached after the first pushed symbol.
    struct Origin {
        std::uint32_t rule = kNone;
        CaState mid = kNone;
    };

    ConfigAutomaton() = default;
    ConfigAutomaton(std::size_t num_controls, std::size_t num_stack_symbols)
        : num_controls_(num_controls), num_stack_(num_stack_symbols), final_(num_controls, false),
          out_(num_controls) {}

    std::size_t num_controls() const noexcept { return num_controls_; }
    std::size_t num_stack_symbols() const noexcept { return num_stack_; }
    std::size_t num_states() const noexcept { return final_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    CaState add_aux_state(bool is_final = false) {
        final_.push_back(is_final);
        out_.emplace_back();
        return static_cast<CaState>(final_.size() - 1);
    }
    void set_final(CaState q, bool f = true) { final_.at(q) = f; }
    bool is_final(CaState q) const { return final_.at(q); }

    /// Returns the edge index and whether it is new.
    std::pair<std::uint32_t, bool> add_edge(CaState from, StackSymbol symbol, CaState to) {
        return add_edge(from, symbol, to, Origin{kNone, kNone});
    }
    std::pair<std::uint32_t, bool> add_edge(CaState from, StackSymbol symbol, CaState to, Origin origin) {
        if (from >= num_states() || to >= num_states()) throw ValidationError("config automaton edge on unknown state");
        if (symbol >= num_stack_) throw ValidationError("config automaton edge on unknown stack symbol");
        auto [it, inserted] = index_.emplace(key(from, symbol, to), static_cast<std::uint32_t>(edges_.size()));
        if (!inserted) return {it->second, false};
        edges_.push_back({from, symbol, to});
        origins_.push_back(origin);
        out_[from].push_back(it->second);
        return {it->second, true};
    }
    bool has_edge(CaState from, StackSymbol symbol, CaState to) const {
        return index_.count(key(from, symbol, to)) != 0;
    }
    std::optional<std::uint32_t> edge_index(CaState from, StackSymbol symbol, CaState to) const {
        auto it = index_.find(key(from, symbol, to));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::uint32_t i) const { return edges_.at(i); }
    const Origin& origin(std::uint32_t i) const { return origins_.at(i); }
    const std::vector<std::uint32_t>& out_edges(CaState q) const { return out_.at(q); }

    /// Membership of the configuration (p, w), w written top-first.
    bool accepts(ControlId p, std::span<const StackSymbol> w) const {
        if (p >= num_controls_) throw ValidationError("unknown control state " + std::to_string(p));
        std::vector<char> cur(num_states(), 0);
        cur[p] = 1;
        for (StackSymbol g : w) {
            std::vector<char> next(num_states(), 0);
            bool any = false;
            for (CaState q = 0; q < num_states(); ++q) {
                if (!cur[q]) continue;
                for (auto e : out_[q])
                    if (edges_[e].symbol == g) next[edges_[e].to] = 1, any = true;
            }
            if (!any) return false;
            cur = std::move(next);
        }
        for (CaState q = 0; q < num_states(); ++q)
            if (cur[q] && final_[q]) return true;
        return false;
    }
    bool accepts(ControlId p, std::initializer_list<StackSymbol> w) const {
        return accepts(p, std::span<const StackSymbol>(w.begin(), w.size()));
    }

private:
    struct KeyHash {
        std::size_t operator()(const std::tuple<CaState, StackSymbol, CaState>& k) const noexcept {
            auto [a, b, c] = k;
            std::uint64_t h = (static_cast<std::uint64_t>(a) * 0x9E3779B97F4A7C15ULL) ^
                              (static_cast<std::uint64_t>(b) * 0xC2B2AE3D27D4EB4FULL) ^
                              (static_cast<std::uint64_t>(c) * 0x165667B19E3779F9ULL);
            return static_cast<std::size_t>(h ^ (h >> 29));
        }
    };
    static std::tuple<CaState, StackSymbol, CaState> key(CaState a, StackSymbol b, CaState c) { return {a, b, c}; }

    std::size_t num_controls_ = 0;
    std::size_t num_stack_ = 0;
    std::vector<bool> final_;
    std::vector<Edge> edges_;
    std::vector<Origin> origins_;
    std::vector<std::vector<std::uint32_t>> out_;
    std::unordered_map<std::tuple<CaState, StackSymbol, CaState>, std::uint32_t, KeyHash> index_;
};

/// Copies every control state into a fresh auxiliary state and redirects
/// incoming edges there, so that no edge targets a control state. The
/// accepted configuration set is unchanged.
inline ConfigAutomaton separate_control_states(const ConfigAutomaton& ca) {
    ConfigAutomaton out(ca.num_controls(), ca.num_stack_symbols());
    for (CaState q = 0; q < ca.num_controls(); ++q) out.set_final(q, ca.is_final(q));
    std::vector<CaState> map(ca.num_states());
    for (CaState q = ca.num_controls(); q < ca.num_states(); ++q) map[q] = out.add_aux_state(ca.is_final(q));
    std::vector<CaState> copy(ca.num_controls());
    for (CaState q = 0; q < ca.num_controls(); ++q) {
        copy[q] = out.add_aux_state(ca.is_final(q));
        map[q] = copy[q];
    }
    for (const auto& e : ca.edges()) {
        CaState target = map[e.to];
        if (e.from < ca.num_controls()) {
            out.add_edge(e.from, e.symbol, target);
            out.add_edge(copy[e.from], e.symbol, target);
        } else {
            out.add_edge(map[e.from], e.symbol, target);
        }
    }
    return out;
}

struct SaturationStats {
    std::size_t edges_added = 0;
    std::size_t edges_processed = 0;
};

/// Backward reachability by saturation: the result accepts exactly the
/// configurations from which some target configuration is reachable.
///
/// Whenever (p, top) -> (p', w) is a rule and the automaton reads w from p'
/// to q, the edge p -top-> q is added. Edges are processed FIFO; push rules
/// are split on the fly into derived rules (p, top) -> (q', second symbol)
/// for each state q' reached by the first symbol. Each added edge records
/// its origin, and the edges justifying it always precede it.
inline ConfigAutomaton pre_star(const PushdownSystem& pds, const ConfigAutomaton& target,
                                SaturationStats* stats = nullptr) {
    if (!pds.is_normalized()) throw ValidationError("pre_star: pushdown system is not normalized");
    if (target.num_controls() != pds.num_controls() || target.num_stack_symbols() != pds.num_stack_symbols())
        throw ValidationError("pre_star: target automaton does not match the pushdown system");
    for (const auto& e : target.edges())
        if (e.to < target.num_controls())
            throw ValidationError("pre_star: target automaton has an edge into control state " +
                                  pds.control_name(e.to));

    ConfigAutomaton ca = target;
    const std::size_t nsym = pds.num_stack_symbols();
    const auto& rules = pds.rules();
    auto slot = [nsym](CaState q, StackSymbol g) { return static_cast<std::uint64_t>(q) * nsym + g; };

    // Rules by (to, first pushed symbol), split by replacement length.
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> swap_rules, push_rules;
    for (std::uint32_t i = 0; i < rules.size(); ++i) {
        const auto& r = rules[i];
        if (r.push.size() == 1) swap_rules[slot(r.to, r.push[0])].push_back(i);
        else if (r.push.size() == 2) push_rules[slot(r.to, r.push[0])].push_back(i);
    }
    struct Derived {
        std::uint32_t rule;
        CaState mid;
    };
    std::unordered_map<std::uint64_t, std::vector<Derived>> derived; // keyed by (mid, second symbol)
    std::unordered_map<std::uint64_t, std::vector<CaState>> processed; // (state, symbol) -> targets

    std::deque<std::uint32_t> work;
    for (std::uint32_t i = 0; i < ca.num_edges(); ++i) work.push_back(i);
    std::size_t added = 0;
    auto add = [&](CaState from, StackSymbol g, CaState to, std::uint32_t rule, CaState mid) {
        auto [idx, fresh] = ca.add_edge(from, g, to, {rule, mid});
        if (fresh) {
            work.push_back(idx);
            ++added;
        }
    };
    for (std::uint32_t i = 0; i < rules.size(); ++i)
        if (rules[i].push.empty()) add(rules[i].from, rules[i].top, rules[i].to, i, kNone);

    std::size_t done = 0;
    while (!work.empty()) {
        const auto t = ca.edge(work.front());
        work.pop_front();
        ++done;
        const std::uint64_t s = slot(t.from, t.symbol);
        processed[s].push_back(t.to);
        if (auto it = swap_rules.find(s); it != swap_rules.end())
            for (auto ri : it->second) add(rules[ri].from, rules[ri].top, t.to, ri, kNone);
        if (auto it = derived.find(s); it != derived.end()) {
            const auto pending = it->second;
            for (const auto& d : pending) add(rules[d.rule].from, rules[d.rule].top, t.to, d.rule, t.from);
        }
        if (auto it = push_rules.find(s); it != push_rules.end()) {
            for (auto ri : it->second) {
                const auto& r = rules[ri];
                const std::uint64_t s2 = slot(t.to, r.push[1]);
                derived[s2].push_back({ri, t.to});
                if (auto pit = processed.find(s2); pit != processed.end()) {
                    const auto targets = pit->second;
                    for (CaState q2 : targets) add(r.from, r.top, q2, ri, t.to);
                }
            }
        }
    }
    if (stats) {
        stats->edges_added = added;
        stats->edges_processed = done;
    }
    return ca;
}

inline bool accepts_config(const ConfigAutomaton& ca, ControlId p, std::span<const StackSymbol> w) {
    return ca.accepts(p, w);
}

/// Target automaton accepting (p, g w) for every head (p, g) in the set
/// and any w, plus (p, empty) for the listed control states.
inline ConfigAutomaton heads_target(std::size_t controls, std::size_t stack_symbols,
                                    const std::vector<std::pair<ControlId, StackSymbol>>& heads,
                                    const std::vector<ControlId>& empty_stack = {}) {
    ConfigAutomaton ca(controls, stack_symbols);
    CaState any = ca.add_aux_state(true);
    for (StackSymbol g = 0; g < stack_symbols; ++g) ca.add_edge(any, g, any);
    for (const auto& [p, g] : heads) ca.add_edge(p, g, any);
    for (ControlId p : empty_stack) ca.set_final(p);
    return ca;
}

/// Configurations with no applicable rule, plus every empty-stack
/// configuration (unreachable under the bottom discipline).
inline ConfigAutomaton dead_configs(const PushdownSystem& pds) {
    const auto by_trigger = pds.rules_by_trigger();
    std::vector<std::pair<ControlId, StackSymbol>> heads;
    std::vector<ControlId> all;
    for (ControlId p = 0; p < pds.num_controls(); ++p) {
        all.push_back(p);
        for (StackSymbol g = 0; g < pds.num_stack_symbols(); ++g)
            if (by_trigger[p * pds.num_stack_symbols() + g].empty()) heads.emplace_back(p, g);
    }
    return heads_target(pds.num_controls(), pds.num_stack_symbols(), heads, all);
}

namespace detail {
/// Iterative Tarjan; returns the SCC id of each node.
inline std::vector<std::uint32_t> strongly_connected(const std::vector<std::vector<std::uint32_t>>& succ,
                                                     std::uint32_t& count) {
    const std::uint32_t n = static_cast<std::uint32_t>(succ.size());
    std::vector<std::uint32_t> index(n, kNone), low(n, 0), comp(n, kNone);
    std::vector<std::uint32_t> stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::pair<std::uint32_t, std::size_t>> call;
    std::uint32_t next = 0;
    count = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < succ[v].size()) {
                std::uint32_t w = succ[v][i++];
                if (index[w] == kNone) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    return comp;
}
} // namespace detail

/// Heads (p, g) with (p, g) =>+ (p, g w): the stack below g is never read.
///
/// Head graph: a swap rule (p,g)->(p',g') gives (p,g)->(p',g'); a push rule
/// (p,g)->(p',g1 g2) gives (p,g)->(p',g1) and, for every p'' with
/// (p',g1) =>* (p'',empty), (p,g)->(p'',g2). The repeating heads are the
/// nodes on a cycle of this graph.
inline std::vector<std::pair<ControlId, StackSymbol>> repeating_heads(const PushdownSystem& pds) {
    if (!pds.is_normalized()) throw ValidationError("repeating_heads: pushdown system is not normalized");
    const std::size_t nsym = pds.num_stack_symbols();
    const std::size_t n = pds.num_controls() * nsym;

    // Pop summaries: (p, g) =>* (p'', empty) iff pre* of {(p'', empty)} has p -g-> p''.
    ConfigAutomaton empty(pds.num_controls(), nsym);
    for (ControlId p = 0; p < pds.num_controls(); ++p) empty.set_final(p);
    const ConfigAutomaton pops = pre_star(pds, empty);
    std::unordered_map<std::uint64_t, std::vector<ControlId>> pop_to;
    for (const auto& e : pops.edges()) pop_to[static_cast<std::uint64_t>(e.from) * nsym + e.symbol].push_back(e.to);

    std::vector<std::vector<std::uint32_t>> succ(n);
    std::vector<char> self(n, 0);
    auto link = [&](std::uint32_t a, std::uint32_t b) {
        succ[a].push_back(b);
        if (a == b) self[a] = 1;
    };
    for (const auto& r : pds.rules()) {
        const auto a = static_cast<std::uint32_t>(r.from * nsym + r.top);
        if (r.push.empty()) continue;
        link(a, static_cast<std::uint32_t>(r.to * nsym + r.push[0]));
        if (r.push.size() == 2) {
            auto it = pop_to.find(static_cast<std::uint64_t>(r.to) * nsym + r.push[0]);
            if (it != pop_to.end())
                for (ControlId p2 : it->second) link(a, static_cast<std::uint32_t>(p2 * nsym + r.push[1]));
        }
    }
    std::uint32_t ncomp = 0;
    const auto comp = detail::strongly_connected(succ, ncomp);
    std::vector<std::uint32_t> comp_size(ncomp, 0);
    for (auto c : comp) ++comp_size[c];

    std::vector<std::pair<ControlId, StackSymbol>> out;
    for (std::uint32_t v = 0; v < n; ++v)
        if (comp_size[comp[v]] > 1 || self[v])
            out.emplace_back(static_cast<ControlId>(v / nsym), static_cast<StackSymbol>(v % nsym));
    return out;
}

/// Configurations from which an infinite run exists: pre* of the
/// configurations whose head repeats.
inline ConfigAutomaton has_infinite_run(const PushdownSystem& pds, SaturationStats* stats = nullptr) {
    const auto rep = repeating_heads(pds);
    return pre_star(pds, heads_target(pds.num_controls(), pds.num_stack_symbols(), rep), stats);
}

// ---------------------------------------------------------------------------
// Debug dump

inline std::string ca_state_name(const PushdownSystem& pds, const ConfigAutomaton& ca, CaState q) {
    if (q < ca.num_controls()) return pds.control_name(q);
    return "aux:" + std::to_string(q - ca.num_controls());
}

/// One edge per line "FROM SYMBOL TO", then "final STATE" lines; both
/// blocks sorted by name.
inline std::string dump(const PushdownSystem& pds, const ConfigAutomaton& ca) {
    std::vector<std::string> lines;
    for (const auto& e : ca.edges())
        lines.push_back(ca_state_name(pds, ca, e.from) + " " + pds.stack_name(e.symbol) + " " +
                        ca_state_name(pds, ca, e.to));
    std::sort(lines.begin(), lines.end());
    std::vector<std::string> finals;
    for (CaState q = 0; q < ca.num_states(); ++q)
        if (ca.is_final(q)) finals.push_back("final " + ca_state_name(pds, ca, q));
    std::sort(finals.begin(), finals.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    for (const auto& l : finals) out += l + "\n";
    return out;
}

} // namespace ectl
