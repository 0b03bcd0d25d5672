#pragma once

#include <string>
#include <vector>

#include "ectl/environment.hpp"
#include "ectl/error.hpp"
#include "ectl/formula.hpp"

namespace ectl {

/// How the checker treats one temporal node of a core formula.
enum class PlanAction {
    until_engine,                 ///< any automaton kind, pre* reachability
    release_engine,               ///< deterministic annotation, used as is (after completion)
    determinize_nfa_then_release, ///< subset construction first
    determinize_vpa_then_release, ///< summary-set construction first
    undecidable,                  ///< nondeterministic non-visibly PDA on a release
};

inline std::string_view to_string(PlanAction a) {
    switch (a) {
    case PlanAction::until_engine: return "until-engine";
    case PlanAction::release_engine: return "release-engine";
    case PlanAction::determinize_nfa_then_release: return "determinize-nfa+release-engine";
    case PlanAction::determinize_vpa_then_release: return "determinize-vpa+release-engine";
    case PlanAction::undecidable: return "undecidable";
    }
    return "?";
}

struct PlanStep {
    std::string subformula;
    std::string language; ///< environment key of the annotation
    AutomatonKind kind;
    PlanAction action;
};

struct Plan {
    std::vector<PlanStep> steps; ///< one per temporal node, post-order
    bool decidable() const {
        for (const auto& s : steps)
            if (s.action == PlanAction::undecidable) return false;
        return true;
    }
    const PlanStep* first_undecidable() const {
        for (const auto& s : steps)
            if (s.action == PlanAction::undecidable) return &s;
        return nullptr;
    }
};

namespace detail {
inline void classify_into(const FormulaPtr& f, const Environment& env, Plan& plan) {
    for (const auto& c : f->children()) classify_into(c, env, plan);
    if (f->op() != Op::eu && f->op() != Op::er) {
        if (is_temporal(f->op())) throw ValidationError("classify expects a desugared formula: " + to_string(*f));
        return;
    }
    const AutomatonKind kind = kind_of(env.resolve(f->lang()));
    PlanAction action = PlanAction::until_engine;
    if (f->op() == Op::er) {
        switch (kind) {
        case AutomatonKind::dfa:
        case AutomatonKind::dvpa:
        case AutomatonKind::dpda: action = PlanAction::release_engine; break;
        case AutomatonKind::nfa: action = PlanAction::determinize_nfa_then_release; break;
        case AutomatonKind::vpa: action = PlanAction::determinize_vpa_then_release; break;
        case AutomatonKind::pda: action = PlanAction::undecidable; break;
        }
    }
    plan.steps.push_back({to_string(*f), f->lang().key(), kind, action});
}
} // namespace detail

/// Dispatch plan for a desugared formula. Never throws on undecidable
/// combinations; those are reported in the plan.
inline Plan classify(const FormulaPtr& core, const Environment& env) {
    Plan plan;
    detail::classify_into(core, env, plan);
    return plan;
}

inline void require_decidable(const Plan& plan) {
    if (const PlanStep* bad = plan.first_undecidable())
        throw UndecidableError(bad->subformula,
                               "a release annotated with a nondeterministic pushdown automaton ('" + bad->language +
                                   "') cannot be decided; only deterministic pushdown, visibly pushdown and finite "
                                   "automata are supported on release operators");
}

} // namespace ectl
