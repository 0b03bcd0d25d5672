#pragma once

// Verdict reports. The JSON rendering has the keys
//   formula, states: [{name, verdict, witness?}], diagnostics
// plus `table` when the subformula table was requested.

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ectl/checker.hpp"
#include "ectl/lts.hpp"

namespace ectl {

struct StateVerdict {
    StateId state;
    bool holds;
    const WitnessRecord* witness = nullptr;
};

struct Report {
    std::string formula;  ///< as written
    std::string core;     ///< desugared
    std::vector<StateVerdict> verdicts;
    const CheckResult* result = nullptr;
    bool include_table = false;
    nlohmann::json oracle; ///< null unless an oracle run was requested

    bool all_hold() const {
        for (const auto& v : verdicts)
            if (!v.holds) return false;
        return true;
    }
};

inline Report make_report(const Lts& lts, const FormulaPtr& formula, const CheckResult& result,
                          const std::vector<StateId>& at, bool witnesses, bool table) {
    Report r;
    r.formula = to_string(*formula);
    r.core = to_string(*result.formula);
    r.result = &result;
    r.include_table = table;
    for (StateId s : at) {
        StateVerdict v{s, result.holds_at(s), nullptr};
        if (witnesses)
            for (const auto& w : result.witnesses)
                if (w.state == s) v.witness = &w;
        r.verdicts.push_back(v);
    }
    (void)lts;
    return r;
}

namespace detail {
inline nlohmann::json witness_json(const Lts& lts, const WitnessRecord& w) {
    nlohmann::json path = nlohmann::json::array();
    for (std::size_t i = 0; i < w.path.states.size(); ++i) {
        if (i > 0) path.push_back(lts.action_name(w.path.actions[i - 1]));
        path.push_back(lts.state_name(w.path.states[i]));
    }
    return {{"path", path}, {"word", w.word}};
}

inline nlohmann::json state_names(const Lts& lts, const StateSet& s) {
    nlohmann::json out = nlohmann::json::array();
    for (StateId x : s.members()) out.push_back(lts.state_name(x));
    return out;
}
} // namespace detail

inline nlohmann::json diagnostics_json(const Diagnostics& d) {
    nlohmann::json dets = nlohmann::json::array();
    for (const auto& x : d.determinizations)
        dets.push_back({{"language", x.language},
                        {"from", std::string(to_string(x.from))},
                        {"to", std::string(to_string(x.to))},
                        {"size_before", x.size_before},
                        {"size_after", x.size_after}});
    nlohmann::json engines = nlohmann::json::array();
    for (const auto& e : d.engines)
        engines.push_back({{"subformula", e.subformula},
                           {"engine", e.engine},
                           {"controls", e.stats.controls},
                           {"rules", e.stats.rules},
                           {"saturation_edges", e.stats.saturation_edges},
                           {"millis", e.stats.millis}});
    return {{"determinizations", dets}, {"engines", engines}, {"millis", d.millis}};
}

inline nlohmann::json to_json(const Lts& lts, const Report& r) {
    nlohmann::json states = nlohmann::json::array();
    for (const auto& v : r.verdicts) {
        nlohmann::json s{{"name", lts.state_name(v.state)}, {"verdict", v.holds}};
        if (v.witness) s["witness"] = detail::witness_json(lts, *v.witness);
        states.push_back(std::move(s));
    }
    nlohmann::json diag = diagnostics_json(r.result->diagnostics);
    diag["core"] = r.core;
    if (!r.oracle.is_null()) diag["oracle"] = r.oracle;
    nlohmann::json out{{"formula", r.formula}, {"states", states}, {"diagnostics", diag}};
    if (r.include_table) {
        nlohmann::json table = nlohmann::json::array();
        for (const auto& [f, s] : r.result->table)
            table.push_back({{"subformula", f}, {"states", detail::state_names(lts, s)}});
        out["table"] = table;
    }
    return out;
}

inline std::string to_text(const Lts& lts, const Report& r) {
    std::ostringstream out;
    out << "formula: " << r.formula << "\n";
    if (r.core != r.formula) out << "core:    " << r.core << "\n";
    for (const auto& v : r.verdicts) {
        out << lts.state_name(v.state) << ": " << (v.holds ? "holds" : "fails") << "\n";
        if (v.witness) {
            out << "  witness: " << lts.state_name(v.witness->path.states[0]);
            for (std::size_t i = 0; i < v.witness->path.actions.size(); ++i)
                out << " -" << lts.action_name(v.witness->path.actions[i]) << "-> "
                    << lts.state_name(v.witness->path.states[i + 1]);
            out << "\n";
        }
    }
    if (r.include_table) {
        out << "subformulas:\n";
        for (const auto& [f, s] : r.result->table) {
            out << "  " << f << ":";
            for (StateId x : s.members()) out << " " << lts.state_name(x);
            out << "\n";
        }
    }
    const auto& d = r.result->diagnostics;
    for (const auto& x : d.determinizations)
        out << "determinized " << x.language << ": " << to_string(x.from) << " size " << x.size_before << " -> "
            << to_string(x.to) << " size " << x.size_after << "\n";
    if (!r.oracle.is_null()) out << "oracle: " << r.oracle.dump() << "\n";
    return out.str();
}

} // namespace ectl
