#pragma once

// Depth-bounded path enumeration with three-valued answers. Pushdown
// annotations are simulated on explicit configuration sets; finite ones
// and the unannotated operators are evaluated exactly.

#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "ectl/automata.hpp"
#include "ectl/environment.hpp"
#include "ectl/formula.hpp"
#include "ectl/lts.hpp"
#include "ectl/oracle/ctl.hpp"
#include "ectl/oracle/product.hpp"
#include "ectl/state_set.hpp"

namespace ectl::oracle {

enum class Truth { no, yes, unknown };

inline std::string_view to_string(Truth t) {
    switch (t) {
    case Truth::no: return "false";
    case Truth::yes: return "true";
    case Truth::unknown: return "unknown";
    }
    return "?";
}

struct BoundedVerdict {
    std::vector<Truth> values; ///< indexed by state
    std::size_t horizon = 0;

    Truth at(StateId s) const { return values.at(s); }
};

/// Explicit configuration-set simulator for the stack-based kinds.
/// Stacks are stored bottom-first.
class StackSimulator {
public:
    using Config = std::pair<AutStateId, std::vector<StackSymbol>>;
    using Configs = std::set<Config>;

    StackSimulator(const Automaton& aut, const Lts& lts) : aut_(aut) {
        std::visit([&](const auto& a) {
            letters_.resize(lts.num_actions());
            for (ActionId x = 0; x < lts.num_actions(); ++x) letters_[x] = a.alphabet.find(lts.action_name(x));
        }, aut);
    }

    Configs initial() const {
        return std::visit([](const auto& a) -> Configs {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, FiniteAutomaton>) return {};
            else return {{a.initial, {a.bottom}}};
        }, aut_);
    }

    bool accepting(const Configs& cs) const {
        return std::visit([&](const auto& a) {
            for (const auto& c : cs)
                if (a.final[c.first]) return true;
            return false;
        }, aut_);
    }

    Configs step(const Configs& cs, ActionId action) const {
        Configs out;
        if (!letters_[action]) return out;
        const LetterId l = *letters_[action];
        if (const auto* v = std::get_if<VisiblyPushdownAutomaton>(&aut_)) {
            for (const auto& [q, st] : cs) {
                switch (v->letter_class[l]) {
                case LetterClass::call:
                    for (const auto& r : v->calls)
                        if (r.from == q && r.letter == l) {
                            auto s2 = st;
                            s2.push_back(r.push);
                            out.insert({r.to, std::move(s2)});
                        }
                    break;
                case LetterClass::ret:
                    for (const auto& r : v->returns)
                        if (r.from == q && r.letter == l && r.top == st.back()) {
                            auto s2 = st;
                            if (r.top != v->bottom) s2.pop_back();
                            out.insert({r.to, std::move(s2)});
                        }
                    break;
                case LetterClass::internal:
                    for (const auto& r : v->internals)
                        if (r.from == q && r.letter == l) out.insert({r.to, st});
                    break;
                }
            }
        } else if (const auto* p = std::get_if<PushdownAutomaton>(&aut_)) {
            for (const auto& [q, st] : cs)
                for (const auto& r : p->rules)
                    if (r.from == q && r.letter == l && r.top == st.back()) {
                        auto s2 = st;
                        s2.pop_back();
                        for (auto it = r.push.rbegin(); it != r.push.rend(); ++it) s2.push_back(*it);
                        out.insert({r.to, std::move(s2)});
                    }
        }
        return out;
    }

private:
    const Automaton& aut_;
    std::vector<std::optional<LetterId>> letters_;
};

namespace detail {

struct Bounds {
    StateSet lo; ///< certainly satisfied
    StateSet hi; ///< possibly satisfied
};

class BoundedSearch {
public:
    using Configs = StackSimulator::Configs;

    BoundedSearch(const Lts& lts, const StackSimulator& sim, std::size_t depth) : lts_(lts), sim_(sim), depth_(depth) {}

    /// Some path prefix of length <= depth witnesses the until.
    /// Returns (found, horizon was cut somewhere).
    std::pair<bool, bool> until(StateId s, const StateSet& x, const StateSet& y) {
        memo_.clear();
        return until_rec(s, sim_.initial(), depth_, x, y);
    }

    /// A maximal path that certainly never violates the release.
    bool release_safe(StateId s, const StateSet& x, const StateSet& y) {
        memo_.clear();
        return safe_rec(s, sim_.initial(), depth_, x, y);
    }

    /// Every path certainly violates the release within the horizon.
    bool release_doomed(StateId s, const StateSet& x, const StateSet& y) {
        memo_.clear();
        return doomed_rec(s, sim_.initial(), depth_, x, y);
    }

private:
    using Key = std::tuple<StateId, std::size_t, Configs>;

    std::pair<bool, bool> until_rec(StateId s, const Configs& cs, std::size_t d, const StateSet& x,
                                    const StateSet& y) {
        if (cs.empty()) return {false, false};
        if (sim_.accepting(cs) && y.contains(s)) return {true, false};
        if (!x.contains(s) || lts_.successors(s).empty()) return {false, false};
        if (d == 0) return {false, true};
        Key key{s, d, cs};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::pair<bool, bool> r{false, false};
        for (const auto& e : lts_.successors(s)) {
            auto sub = until_rec(e.target, sim_.step(cs, e.action), d - 1, x, y);
            r.second = r.second || sub.second;
            if (sub.first) {
                r.first = true;
                break;
            }
        }
        memo_.emplace(std::move(key), r);
        return r;
    }

    bool safe_rec(StateId s, const Configs& cs, std::size_t d, const StateSet& x, const StateSet& y) {
        if (cs.empty()) return true;
        const bool acc = sim_.accepting(cs);
        if (acc && !y.contains(s)) return false;
        if (x.contains(s)) return true;
        if (lts_.successors(s).empty()) return true;
        if (d == 0) return false;
        Key key{s, d, cs};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;
        bool r = false;
        for (const auto& e : lts_.successors(s))
            if (safe_rec(e.target, sim_.step(cs, e.action), d - 1, x, y)) {
                r = true;
                break;
            }
        memo_.emplace(std::move(key), std::make_pair(r, false));
        return r;
    }

    bool doomed_rec(StateId s, const Configs& cs, std::size_t d, const StateSet& x, const StateSet& y) {
        if (cs.empty()) return false;
        const bool acc = sim_.accepting(cs);
        if (x.contains(s) && (!acc || y.contains(s))) return false;
        if (acc && !y.contains(s)) return true;
        if (lts_.successors(s).empty()) return false;
        if (d == 0) return false;
        Key key{s, d, cs};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.first;
        bool r = true;
        for (const auto& e : lts_.successors(s))
            if (!doomed_rec(e.target, sim_.step(cs, e.action), d - 1, x, y)) {
                r = false;
                break;
            }
        memo_.emplace(std::move(key), std::make_pair(r, false));
        return r;
    }

    const Lts& lts_;
    const StackSimulator& sim_;
    std::size_t depth_;
    std::map<Key, std::pair<bool, bool>> memo_;
};

inline Bounds bounded_eval(const Lts& lts, const FormulaPtr& f, const Environment& env, std::size_t depth) {
    const std::size_t n = lts.num_states();
    auto exact = [](StateSet s) { return Bounds{s, s}; };
    switch (f->op()) {
    case Op::prop: return exact(lts.sat_prop(f->prop()));
    case Op::tt: return exact(StateSet::all(n));
    case Op::ff: return exact(StateSet(n));
    case Op::not_: {
        auto b = bounded_eval(lts, f->left(), env, depth);
        return {b.hi.complement(), b.lo.complement()};
    }
    case Op::and_:
    case Op::or_: {
        auto l = bounded_eval(lts, f->left(), env, depth);
        auto r = bounded_eval(lts, f->right(), env, depth);
        if (f->op() == Op::and_) return {l.lo & r.lo, l.hi & r.hi};
        return {l.lo | r.lo, l.hi | r.hi};
    }
    case Op::eu:
    case Op::er: break;
    default: throw ValidationError("bounded_path_check expects a desugared formula: " + to_string(*f));
    }
    const bool until = f->op() == Op::eu;
    const Bounds x = bounded_eval(lts, f->left(), env, depth);
    const Bounds y = bounded_eval(lts, f->right(), env, depth);
    const auto lk = f->lang().kind;
    if (lk == LanguageRef::Kind::sigma_star) {
        auto op = until ? sets::eu_star : sets::er_star;
        return {op(lts, x.lo, y.lo), op(lts, x.hi, y.hi)};
    }
    if (lk == LanguageRef::Kind::sigma) {
        auto op = until ? sets::eu_step : sets::er_step;
        return {op(lts, x.lo, y.lo), op(lts, x.hi, y.hi)};
    }
    const Automaton& aut = env.resolve(f->lang());
    if (const auto* fa = std::get_if<FiniteAutomaton>(&aut)) {
        const auto mode = until ? ProductMode::until : ProductMode::release;
        return {finite_product_check(lts, x.lo, *fa, y.lo, mode), finite_product_check(lts, x.hi, *fa, y.hi, mode)};
    }
    const StackSimulator sim(aut, lts);
    BoundedSearch search(lts, sim, depth);
    Bounds out{StateSet(n), StateSet::all(n)};
    for (StateId s = 0; s < n; ++s) {
        if (until) {
            if (search.until(s, x.lo, y.lo).first) out.lo.insert(s);
            auto [found, cut] = search.until(s, x.hi, y.hi);
            if (!found && !cut) out.hi.erase(s);
        } else {
            if (search.release_safe(s, x.lo, y.lo)) out.lo.insert(s);
            if (search.release_doomed(s, x.hi, y.hi)) out.hi.erase(s);
        }
    }
    return out;
}

} // namespace detail

/// Three-valued verdict per state; unknown only where a pushdown-annotated
/// operator ran out of horizon.
inline BoundedVerdict bounded_path_check(const Lts& lts, const FormulaPtr& formula, const Environment& env,
                                         std::size_t depth) {
    const auto b = detail::bounded_eval(lts, desugar(formula), env, depth);
    BoundedVerdict v;
    v.horizon = depth;
    for (StateId s = 0; s < lts.num_states(); ++s)
        v.values.push_back(b.lo.contains(s) ? Truth::yes : b.hi.contains(s) ? Truth::unknown : Truth::no);
    return v;
}

} // namespace ectl::oracle
