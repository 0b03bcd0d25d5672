#pragma once

// Classical CTL labeling by fixpoint iteration. Reference implementation
// for the unannotated fragment; it does not touch the pushdown pipeline.

#include <string>

#include "ectl/error.hpp"
#include "ectl/formula.hpp"
#include "ectl/lts.hpp"
#include "ectl/state_set.hpp"

namespace ectl::oracle {

namespace sets {

inline StateSet dead_ends(const Lts& lts) {
    StateSet d(lts.num_states());
    for (StateId s = 0; s < lts.num_states(); ++s)
        if (lts.successors(s).empty()) d.insert(s);
    return d;
}

/// Some successor in z.
inline StateSet pre_exists(const Lts& lts, const StateSet& z) {
    StateSet out(lts.num_states());
    for (StateId s = 0; s < lts.num_states(); ++s)
        for (const auto& e : lts.successors(s))
            if (z.contains(e.target)) {
                out.insert(s);
                break;
            }
    return out;
}

/// Every successor in z (vacuous at dead ends).
inline StateSet pre_forall(const Lts& lts, const StateSet& z) {
    StateSet out(lts.num_states());
    for (StateId s = 0; s < lts.num_states(); ++s) {
        bool all = true;
        for (const auto& e : lts.successors(s)) all = all && z.contains(e.target);
        if (all) out.insert(s);
    }
    return out;
}

template <class F>
StateSet lfp(std::size_t n, F f) {
    StateSet z(n);
    for (;;) {
        StateSet next = f(z);
        if (next == z) return z;
        z = std::move(next);
    }
}

template <class F>
StateSet gfp(std::size_t n, F f) {
    StateSet z = StateSet::all(n);
    for (;;) {
        StateSet next = f(z);
        if (next == z) return z;
        z = std::move(next);
    }
}

// Unrestricted (Σ*) operators over maximal paths.
inline StateSet eu_star(const Lts& lts, const StateSet& x, const StateSet& y) {
    return lfp(lts.num_states(), [&](const StateSet& z) { return y | (x & pre_exists(lts, z)); });
}
inline StateSet er_star(const Lts& lts, const StateSet& x, const StateSet& y) {
    const StateSet dead = dead_ends(lts);
    return gfp(lts.num_states(), [&](const StateSet& z) { return y & (x | dead | pre_exists(lts, z)); });
}
inline StateSet au_star(const Lts& lts, const StateSet& x, const StateSet& y) {
    const StateSet live = dead_ends(lts).complement();
    return lfp(lts.num_states(), [&](const StateSet& z) { return y | (x & live & pre_forall(lts, z)); });
}
inline StateSet ar_star(const Lts& lts, const StateSet& x, const StateSet& y) {
    return gfp(lts.num_states(), [&](const StateSet& z) { return y & (x | pre_forall(lts, z)); });
}

// Single-step (Σ) operators: only the prefix of length one matters.
inline StateSet eu_step(const Lts& lts, const StateSet& x, const StateSet& y) { return x & pre_exists(lts, y); }
inline StateSet er_step(const Lts& lts, const StateSet& x, const StateSet& y) {
    return x | dead_ends(lts) | pre_exists(lts, y);
}
inline StateSet au_step(const Lts& lts, const StateSet& x, const StateSet& y) {
    return x & dead_ends(lts).complement() & pre_forall(lts, y);
}
inline StateSet ar_step(const Lts& lts, const StateSet& x, const StateSet& y) { return x | pre_forall(lts, y); }

} // namespace sets

/// Satisfying states of an unannotated formula (sugar allowed). Every
/// language must be Σ or Σ*; anything else is rejected.
inline StateSet ctl_fixpoint_check(const Lts& lts, const FormulaPtr& f) {
    const std::size_t n = lts.num_states();
    const StateSet all = StateSet::all(n), none(n);
    auto sub = [&](const FormulaPtr& g) { return ctl_fixpoint_check(lts, g); };
    bool step = false;
    if (is_temporal(f->op())) {
        const auto k = f->lang().kind;
        if (k != LanguageRef::Kind::sigma && k != LanguageRef::Kind::sigma_star)
            throw ValidationError("ctl_fixpoint_check: annotated operator in " + to_string(*f));
        step = k == LanguageRef::Kind::sigma;
    }
    switch (f->op()) {
    case Op::prop: return lts.sat_prop(f->prop());
    case Op::tt: return all;
    case Op::ff: return none;
    case Op::not_: return sub(f->left()).complement();
    case Op::and_: return sub(f->left()) & sub(f->right());
    case Op::or_: return sub(f->left()) | sub(f->right());
    case Op::implies: return sub(f->left()).complement() | sub(f->right());
    case Op::eu: return (step ? sets::eu_step : sets::eu_star)(lts, sub(f->left()), sub(f->right()));
    case Op::er: return (step ? sets::er_step : sets::er_star)(lts, sub(f->left()), sub(f->right()));
    case Op::au: return (step ? sets::au_step : sets::au_star)(lts, sub(f->left()), sub(f->right()));
    case Op::ar: return (step ? sets::ar_step : sets::ar_star)(lts, sub(f->left()), sub(f->right()));
    case Op::ef:
    case Op::ex: return (step ? sets::eu_step : sets::eu_star)(lts, all, sub(f->left()));
    case Op::af: return (step ? sets::au_step : sets::au_star)(lts, all, sub(f->left()));
    case Op::ax:
        return (step ? sets::eu_step : sets::eu_star)(lts, all, sub(f->left()).complement()).complement();
    case Op::eg: return (step ? sets::er_step : sets::er_star)(lts, none, sub(f->left()));
    case Op::ag: return (step ? sets::ar_step : sets::ar_star)(lts, none, sub(f->left()));
    }
    throw ValidationError("ctl_fixpoint_check: unknown connective");
}

} // namespace ectl::oracle
