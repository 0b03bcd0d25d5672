#pragma once

// Bottom-up model checking. Every subformula's satisfying set is computed
// innermost-first and then treated as a fresh proposition; the two
// temporal connectives reduce to pushdown reachability questions on a
// product of the system with the annotating automaton.

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/classify.hpp"
#include "ectl/determinize.hpp"
#include "ectl/environment.hpp"
#include "ectl/error.hpp"
#include "ectl/formula.hpp"
#include "ectl/lowering.hpp"
#include "ectl/lts.hpp"
#include "ectl/pds.hpp"
#include "ectl/state_set.hpp"

namespace ectl {

/// Statistics of one engine invocation.
struct EngineStats {
    std::size_t controls = 0;
    std::size_t rules = 0;
    std::size_t saturation_edges = 0;
    double millis = 0.0;
};

/// The product pushdown system of an until check, kept for witness replay.
struct UntilProduct {
    PushdownSystem pds;    ///< normalized
    ConfigAutomaton pre;   ///< pre* of the target set, with edge origins
    PushdownAutomaton aut; ///< the lowered annotation
    std::size_t num_lts_states = 0;
    /// Product rule tag -> (action, target LTS state).
    std::vector<std::pair<ActionId, StateId>> steps;

    ControlId control(AutStateId q, StateId s) const { return static_cast<ControlId>(q * num_lts_states + s); }
};

struct Witness {
    std::vector<StateId> states;   ///< s0 ... sn
    std::vector<ActionId> actions; ///< a1 ... an
};

namespace detail {
/// Letter of the automaton for each LTS action, or kNone.
inline std::vector<LetterId> action_letters(const Lts& lts, const SymbolTable& alphabet) {
    std::vector<LetterId> out(lts.num_actions(), kNone);
    for (ActionId a = 0; a < lts.num_actions(); ++a)
        if (auto l = alphabet.find(lts.action_name(a))) out[a] = *l;
    return out;
}

/// Rules of the automaton grouped by (state, letter).
inline std::vector<std::vector<std::uint32_t>> rules_by_state_letter(const PushdownAutomaton& a) {
    std::vector<std::vector<std::uint32_t>> out(a.num_states() * a.alphabet.size());
    for (std::uint32_t i = 0; i < a.rules.size(); ++i)
        out[a.rules[i].from * a.alphabet.size() + a.rules[i].letter].push_back(i);
    return out;
}

inline std::vector<std::string> product_control_names(const Lts& lts, const PushdownAutomaton& a) {
    std::vector<std::string> names;
    names.reserve(a.num_states() * lts.num_states());
    for (AutStateId q = 0; q < a.num_states(); ++q)
        for (StateId s = 0; s < lts.num_states(); ++s)
            names.push_back("(" + a.states.name(q) + "," + lts.state_name(s) + ")");
    return names;
}
} // namespace detail

/// Builds the until product and saturates it.
///
/// Controls are pairs (q, s); ((p,s),g) -> ((q,t),w) whenever s -a-> t,
/// (p,a,g) -> (q,w) is an automaton rule and s is in sat_x. The target is
/// every configuration whose control has a final automaton state and an
/// LTS state in sat_y.
inline UntilProduct build_until_product(const Lts& lts, const StateSet& sat_x, const Automaton& aut,
                                        const StateSet& sat_y, EngineStats* stats = nullptr) {
    UntilProduct prod;
    prod.aut = to_pushdown(aut);
    prod.num_lts_states = lts.num_states();
    const PushdownAutomaton& a = prod.aut;
    const std::size_t nsym = a.stack.size();
    const auto letters = detail::action_letters(lts, a.alphabet);
    const auto by_letter = detail::rules_by_state_letter(a);

    PushdownSystem pds(a.num_states() * lts.num_states(), nsym, a.bottom);
    pds.set_control_names(detail::product_control_names(lts, a));
    pds.set_stack_names(a.stack.names());
    for (StateId s = 0; s < lts.num_states(); ++s) {
        if (!sat_x.contains(s)) continue;
        for (const auto& succ : lts.successors(s)) {
            const LetterId l = letters[succ.action];
            if (l == kNone) continue;
            const auto tag = static_cast<std::uint32_t>(prod.steps.size());
            bool used = false;
            for (AutStateId p = 0; p < a.num_states(); ++p)
                for (auto ri : by_letter[p * a.alphabet.size() + l]) {
                    const auto& r = a.rules[ri];
                    pds.add_rule(prod.control(p, s), r.top, prod.control(r.to, succ.target), r.push, tag);
                    used = true;
                }
            if (used) prod.steps.emplace_back(succ.action, succ.target);
        }
    }
    prod.pds = normalize(pds);

    std::vector<std::pair<ControlId, StackSymbol>> heads;
    std::vector<ControlId> empties;
    for (AutStateId p = 0; p < a.num_states(); ++p) {
        if (!a.is_final(p)) continue;
        for (StateId s = 0; s < lts.num_states(); ++s) {
            if (!sat_y.contains(s)) continue;
            empties.push_back(prod.control(p, s));
            for (StackSymbol g = 0; g < nsym; ++g) heads.emplace_back(prod.control(p, s), g);
        }
    }
    SaturationStats sat;
    prod.pre = pre_star(prod.pds, heads_target(prod.pds.num_controls(), nsym, heads, empties), &sat);
    if (stats) {
        stats->controls = prod.pds.num_controls();
        stats->rules = prod.pds.rules().size();
        stats->saturation_edges = prod.pre.num_edges();
    }
    return prod;
}

inline StateSet until_states(const Lts& lts, const UntilProduct& prod) {
    StateSet out(lts.num_states());
    const StackSymbol bottom[] = {prod.aut.bottom};
    for (StateId s = 0; s < lts.num_states(); ++s)
        if (prod.pre.accepts(prod.control(prod.aut.initial, s), bottom)) out.insert(s);
    return out;
}

/// States satisfying E(x U[aut] y) for x = sat_x, y = sat_y. Any kind.
inline StateSet check_eu(const Lts& lts, const StateSet& sat_x, const Automaton& aut, const StateSet& sat_y,
                         EngineStats* stats = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    UntilProduct prod = build_until_product(lts, sat_x, aut, sat_y, stats);
    StateSet out = until_states(lts, prod);
    if (stats)
        stats->millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Replays pre* origins from ((q0, s), [⊥]) down to a target configuration
/// and reads off the LTS path. Each step replaces the first edge of the
/// accepting path by the edges that justified it, which were all added
/// earlier, so the replay terminates.
inline Witness extract_witness(const Lts& lts, const UntilProduct& prod, StateId s) {
    const ConfigAutomaton& ca = prod.pre;
    const PushdownSystem& pds = prod.pds;
    ControlId control = prod.control(prod.aut.initial, s);
    std::vector<StackSymbol> stack{prod.aut.bottom}; // top-first

    // An accepting path for the bottom-only stack: one edge to a final state.
    std::vector<std::uint32_t> path;
    for (auto e : ca.out_edges(control))
        if (ca.edge(e).symbol == prod.aut.bottom && ca.is_final(ca.edge(e).to)) {
            path.push_back(e);
            break;
        }
    if (path.empty()) throw ValidationError("extract_witness: state '" + lts.state_name(s) + "' is not in the set");

    Witness w;
    w.states.push_back(s);
    const std::size_t limit = 1u << 26;
    for (std::size_t iter = 0;; ++iter) {
        if (iter > limit) throw std::logic_error("extract_witness: replay did not terminate");
        if (path.empty()) break;
        const auto first = ca.edge(path.front());
        const auto origin = ca.origin(path.front());
        if (origin.rule == kNone) break; // configuration is in the target
        const PdsRule& r = pds.rules()[origin.rule];
        std::vector<std::uint32_t> replaced;
        if (r.push.size() == 1) {
            replaced.push_back(*ca.edge_index(r.to, r.push[0], first.to));
        } else if (r.push.size() == 2) {
            replaced.push_back(*ca.edge_index(r.to, r.push[0], origin.mid));
            replaced.push_back(*ca.edge_index(origin.mid, r.push[1], first.to));
        }
        replaced.insert(replaced.end(), path.begin() + 1, path.end());
        path = std::move(replaced);
        stack.erase(stack.begin());
        stack.insert(stack.begin(), r.push.begin(), r.push.end());
        control = r.to;
        if (r.tag != kNone) {
            const auto [action, target] = prod.steps.at(r.tag);
            w.actions.push_back(action);
            w.states.push_back(target);
        }
    }
    return w;
}

/// States satisfying E(x R[aut] y) for a deterministic annotation.
///
/// Product over (Q x S) + {g, b}: from (p, s) move to g if s is in sat_x and
/// (p final => s in sat_y); else to b if p is final and s is not in sat_y;
/// otherwise take the synchronized moves. A state satisfies the release iff
/// ((q0,s),[⊥]) has a maximal run that never reaches b, i.e. it lies in
/// pre* (without b rules) of the runs that halt safely or run forever.
/// Halting is judged on the full system's triggers.
inline StateSet check_er(const Lts& lts, const StateSet& sat_x, const Automaton& aut_in, const StateSet& sat_y,
                         EngineStats* stats = nullptr, std::string* ca_dump = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    if (!is_deterministic(aut_in))
        throw ValidationError("check_er: automaton '" + name_of(aut_in) + "' must be deterministic");
    const Automaton completed = is_complete(aut_in) ? aut_in : complete(aut_in);
    const PushdownAutomaton a = to_pushdown(completed);
    const std::size_t nsym = a.stack.size();
    const std::size_t nprod = a.num_states() * lts.num_states();
    const auto letters = detail::action_letters(lts, a.alphabet);
    const auto by_letter = detail::rules_by_state_letter(a);
    auto control = [&](AutStateId q, StateId s) { return static_cast<ControlId>(q * lts.num_states() + s); };
    const ControlId good = static_cast<ControlId>(nprod);
    const ControlId bad = good + 1;

    // Only the b-free system is materialized; `has_rule` records the full
    // system's triggers.
    PushdownSystem pds(nprod + 2, nsym, a.bottom);
    auto names = detail::product_control_names(lts, a);
    names.push_back("g");
    names.push_back("b");
    pds.set_control_names(std::move(names));
    pds.set_stack_names(a.stack.names());
    std::vector<char> has_rule((nprod + 2) * nsym, 0);

    for (AutStateId p = 0; p < a.num_states(); ++p) {
        for (StateId s = 0; s < lts.num_states(); ++s) {
            const ControlId c = control(p, s);
            const bool fin = a.is_final(p);
            if (sat_x.contains(s) && (!fin || sat_y.contains(s))) {
                for (StackSymbol g = 0; g < nsym; ++g) {
                    pds.add_rule(c, g, good, {g});
                    has_rule[c * nsym + g] = 1;
                }
                continue;
            }
            if (fin && !sat_y.contains(s)) {
                for (StackSymbol g = 0; g < nsym; ++g) has_rule[c * nsym + g] = 1; // to b, omitted
                continue;
            }
            // An action outside the automaton's alphabet leaves L for good,
            // so taking it is as safe as reaching g.
            bool escape = false;
            for (const auto& succ : lts.successors(s)) {
                const LetterId l = letters[succ.action];
                if (l == kNone) {
                    escape = true;
                    continue;
                }
                for (auto ri : by_letter[p * a.alphabet.size() + l]) {
                    const auto& r = a.rules[ri];
                    pds.add_rule(c, r.top, control(r.to, succ.target), r.push);
                    has_rule[c * nsym + r.top] = 1;
                }
            }
            if (escape)
                for (StackSymbol g = 0; g < nsym; ++g) {
                    pds.add_rule(c, g, good, {g});
                    has_rule[c * nsym + g] = 1;
                }
        }
    }
    const PushdownSystem norm = normalize(pds);

    std::vector<std::pair<ControlId, StackSymbol>> heads;
    std::vector<ControlId> empties;
    for (ControlId c = 0; c < nprod + 2; ++c) {
        if (c == bad) continue;
        empties.push_back(c);
        for (StackSymbol g = 0; g < nsym; ++g)
            if (!has_rule[c * nsym + g]) heads.emplace_back(c, g);
    }
    for (const auto& h : repeating_heads(norm)) heads.push_back(h);

    SaturationStats sat;
    const ConfigAutomaton pre = pre_star(norm, heads_target(norm.num_controls(), nsym, heads, empties), &sat);
    if (ca_dump) *ca_dump = dump(norm, pre);

    StateSet out(lts.num_states());
    const StackSymbol bottom[] = {a.bottom};
    for (StateId s = 0; s < lts.num_states(); ++s)
        if (pre.accepts(control(a.initial, s), bottom)) out.insert(s);
    if (stats) {
        stats->controls = norm.num_controls();
        stats->rules = norm.rules().size();
        stats->saturation_edges = pre.num_edges();
        stats->millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Driver

struct CheckOptions {
    std::size_t cap = kDefaultStateCap; ///< determinization state cap
    bool parallel = false;              ///< evaluate independent subformulas concurrently
    bool witnesses = true;              ///< witnesses for a top-level EU at designated states
    bool dump_config_automata = false;
    std::vector<StateId> witness_states; ///< default: the designated states
};

struct DeterminizationRecord {
    std::string language;
    AutomatonKind from;
    AutomatonKind to;
    std::size_t size_before;
    std::size_t size_after;
};

struct EngineRecord {
    std::string subformula;
    std::string engine; ///< "until" or "release"
    EngineStats stats;
};

struct Diagnostics {
    std::vector<DeterminizationRecord> determinizations;
    std::vector<EngineRecord> engines;
    std::vector<std::pair<std::string, std::string>> config_automata; ///< subformula -> dump
    double millis = 0.0;
};

struct WitnessRecord {
    StateId state;
    Witness path;
    Word word;
};

class CheckResult {
public:
    FormulaPtr formula; ///< the desugared formula
    std::vector<std::pair<std::string, StateSet>> table; ///< core subformulas, children first
    Diagnostics diagnostics;
    std::vector<WitnessRecord> witnesses;

    const StateSet& sat(const std::string& subformula) const {
        for (const auto& [f, s] : table)
            if (f == subformula) return s;
        throw ValidationError("subformula not in the result table: " + subformula);
    }
    const StateSet& top() const { return table.back().second; }
    bool holds_at(StateId s) const { return top().contains(s); }
};

namespace detail {
struct Node {
    FormulaPtr f;
    std::string key;
    std::vector<std::size_t> children;
    std::size_t height = 0;
};

inline std::size_t collect_nodes(const FormulaPtr& f, std::vector<Node>& nodes,
                                 std::unordered_map<std::string, std::size_t>& index) {
    std::string key = to_string(*f);
    if (auto it = index.find(key); it != index.end()) return it->second;
    Node n{f, key, {}, 0};
    for (const auto& c : f->children()) {
        std::size_t ci = collect_nodes(c, nodes, index);
        n.children.push_back(ci);
        n.height = std::max(n.height, nodes[ci].height + 1);
    }
    nodes.push_back(std::move(n));
    index.emplace(key, nodes.size() - 1);
    return nodes.size() - 1;
}

inline Automaton release_automaton(const Automaton& a, const LanguageRef& ref, const Environment& env,
                                   std::size_t cap, std::vector<DeterminizationRecord>& log) {
    const std::string key = ref.key();
    switch (kind_of(a)) {
    case AutomatonKind::nfa: {
        const auto& d = env.derive("det(" + key + ")", [&] {
            return Automaton(determinize_nfa(std::get<FiniteAutomaton>(a), cap));
        });
        log.push_back({key, AutomatonKind::nfa, AutomatonKind::dfa, automaton_size(a), automaton_size(d)});
        return d;
    }
    case AutomatonKind::vpa: {
        const auto& d = env.derive("det(" + key + ")", [&] {
            return Automaton(determinize_vpa(std::get<VisiblyPushdownAutomaton>(a), cap));
        });
        log.push_back({key, AutomatonKind::vpa, AutomatonKind::dvpa, automaton_size(a), automaton_size(d)});
        return d;
    }
    default: return a;
    }
}
} // namespace detail

/// Evaluates every subformula of the desugared formula bottom-up.
inline CheckResult check(const Lts& lts, const FormulaPtr& formula, const Environment& env,
                         const CheckOptions& opts = {}) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult result;
    // Σ and Σ* range over every action of the system.
    std::optional<Environment> widened;
    {
        std::vector<std::string> alphabet = env.alphabet();
        bool missing = false;
        for (const auto& a : lts.actions().names())
            if (std::find(alphabet.begin(), alphabet.end(), a) == alphabet.end()) {
                alphabet.push_back(a);
                missing = true;
            }
        if (missing) {
            widened.emplace(env);
            widened->set_alphabet(std::move(alphabet));
        }
    }
    const Environment& env_used = widened ? *widened : env;
    result.formula = desugar(formula);
    const Plan plan = classify(result.formula, env_used);
    require_decidable(plan);

    std::vector<detail::Node> nodes;
    std::unordered_map<std::string, std::size_t> index;
    detail::collect_nodes(result.formula, nodes, index);

    // Resolve and prepare every annotation up front; this may determinize.
    std::vector<std::optional<Automaton>> automata(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& f = nodes[i].f;
        if (f->op() == Op::eu) automata[i] = env_used.resolve(f->lang());
        if (f->op() == Op::er)
            automata[i] = detail::release_automaton(env_used.resolve(f->lang()), f->lang(), env_used, opts.cap,
                                                    result.diagnostics.determinizations);
    }

    std::vector<StateSet> sets(nodes.size());
    std::vector<std::optional<EngineRecord>> records(nodes.size());
    std::vector<std::string> dumps(nodes.size());
    auto eval = [&](std::size_t i) {
        const auto& n = nodes[i];
        const auto& f = n.f;
        switch (f->op()) {
        case Op::prop: sets[i] = lts.sat_prop(f->prop()); break;
        case Op::tt: sets[i] = StateSet::all(lts.num_states()); break;
        case Op::ff: sets[i] = StateSet(lts.num_states()); break;
        case Op::not_: sets[i] = sets[n.children[0]].complement(); break;
        case Op::and_: sets[i] = sets[n.children[0]] & sets[n.children[1]]; break;
        case Op::or_: sets[i] = sets[n.children[0]] | sets[n.children[1]]; break;
        case Op::eu: {
            EngineRecord rec{n.key, "until", {}};
            sets[i] = check_eu(lts, sets[n.children[0]], *automata[i], sets[n.children[1]], &rec.stats);
            records[i] = rec;
            break;
        }
        case Op::er: {
            EngineRecord rec{n.key, "release", {}};
            sets[i] = check_er(lts, sets[n.children[0]], *automata[i], sets[n.children[1]], &rec.stats,
                               opts.dump_config_automata ? &dumps[i] : nullptr);
            records[i] = rec;
            break;
        }
        default: throw ValidationError("unexpected connective after desugaring: " + n.key);
        }
    };

    std::size_t max_height = 0;
    for (const auto& n : nodes) max_height = std::max(max_height, n.height);
    for (std::size_t h = 0; h <= max_height; ++h) {
        std::vector<std::size_t> level;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].height == h) level.push_back(i);
        if (opts.parallel && level.size() > 1) {
            std::vector<std::future<void>> jobs;
            for (auto i : level) jobs.push_back(std::async(std::launch::async, eval, i));
            for (auto& j : jobs) j.get();
        } else {
            for (auto i : level) eval(i);
        }
    }

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        result.table.emplace_back(nodes[i].key, sets[i]);
        if (records[i]) result.diagnostics.engines.push_back(*records[i]);
        if (opts.dump_config_automata && nodes[i].f->op() == Op::eu) {
            auto prod = build_until_product(lts, sets[nodes[i].children[0]], *automata[i], sets[nodes[i].children[1]]);
            dumps[i] = dump(prod.pds, prod.pre);
        }
        if (opts.dump_config_automata && !dumps[i].empty())
            result.diagnostics.config_automata.emplace_back(nodes[i].key, dumps[i]);
    }

    const auto& root = nodes.back();
    if (opts.witnesses && root.f->op() == Op::eu) {
        const auto& sx = sets[root.children[0]];
        const auto& sy = sets[root.children[1]];
        const auto& aut = *automata[nodes.size() - 1];
        auto prod = build_until_product(lts, sx, aut, sy);
        for (StateId s : opts.witness_states.empty() ? lts.designated() : opts.witness_states) {
            if (!sets.back().contains(s)) continue;
            WitnessRecord rec{s, extract_witness(lts, prod, s), {}};
            for (ActionId a : rec.path.actions) rec.word.push_back(lts.action_name(a));
            result.witnesses.push_back(std::move(rec));
        }
    }
    result.diagnostics.millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

/// A witness is valid when its word is accepted, every state before the
/// last satisfies x, the last satisfies y, and consecutive states are
/// connected by the listed actions.
inline bool validate_witness(const Lts& lts, const Witness& w, const Automaton& aut, const StateSet& sat_x,
                             const StateSet& sat_y) {
    if (w.states.empty() || w.states.size() != w.actions.size() + 1) return false;
    for (std::size_t i = 0; i < w.actions.size(); ++i) {
        const auto& succ = lts.successors(w.states[i]);
        if (std::find(succ.begin(), succ.end(), Successor{w.actions[i], w.states[i + 1]}) == succ.end()) return false;
        if (!sat_x.contains(w.states[i])) return false;
    }
    if (!sat_y.contains(w.states.back())) return false;
    Word word;
    for (ActionId a : w.actions) word.push_back(lts.action_name(a));
    try {
        return accepts(aut, word);
    } catch (const ValidationError&) {
        return false;
    }
}

} // namespace ectl
