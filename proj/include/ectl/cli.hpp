#pragma once

// Command-line driver. Exit codes: 0 the formula holds at every queried
// state, 1 it fails somewhere, 2 undecidable combination or cap exceeded,
// 3 parse or validation error (including bad usage).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ectl/checker.hpp"
#include "ectl/determinize.hpp"
#include "ectl/environment.hpp"
#include "ectl/io.hpp"
#include "ectl/oracle/bounded.hpp"
#include "ectl/oracle/corpus.hpp"
#include "ectl/parser.hpp"
#include "ectl/report.hpp"

namespace ectl {

enum ExitCode : int { exit_holds = 0, exit_fails = 1, exit_unsupported = 2, exit_invalid = 3 };

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

namespace detail {

/// Prefixes a positioned error with its file.
template <class Fn>
auto in_file(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ":" + e.what());
    }
}

struct CheckArgs {
    std::string system;
    std::string formula_file;
    std::string expr;
    std::vector<std::string> automata;
    std::vector<std::string> at;
    bool witness = false;
    bool json = false;
    bool table = false;
    int oracle_depth = -1;
    std::size_t cap = kDefaultStateCap;
    bool dump_ca = false;
    bool parallel = false;
};

inline int run_check(const CheckArgs& a, std::ostream& out) {
    const Lts lts = in_file(a.system, [&] { return parse_lts(read_file(a.system)); });
    Environment env;
    env.set_cap(a.cap);
    std::vector<std::string> alphabet = lts.actions().names();
    for (const auto& path : a.automata) {
        Automaton aut = in_file(path, [&] { return parse_aut(read_file(path)); });
        for (const auto& x : alphabet_of(aut).names())
            if (std::find(alphabet.begin(), alphabet.end(), x) == alphabet.end()) alphabet.push_back(x);
        in_file(path, [&] { env.add(std::move(aut)); });
    }
    env.set_alphabet(alphabet);

    FormulaPtr formula;
    if (!a.formula_file.empty())
        formula = in_file(a.formula_file, [&] { return parse_formula(read_file(a.formula_file), env); });
    else
        formula = in_file("--expr", [&] { return parse_formula(a.expr, env); });

    std::vector<StateId> at;
    for (const auto& s : a.at) at.push_back(lts.state_id(s));
    if (at.empty()) at = lts.designated();
    if (at.empty())
        for (StateId s = 0; s < lts.num_states(); ++s) at.push_back(s);

    CheckOptions opts;
    opts.cap = a.cap;
    opts.parallel = a.parallel;
    opts.witnesses = a.witness;
    opts.dump_config_automata = a.dump_ca;
    opts.witness_states = at;
    const CheckResult result = check(lts, formula, env, opts);

    Report report = make_report(lts, formula, result, at, a.witness, a.table);
    if (a.oracle_depth >= 0) {
        const auto verdict = oracle::bounded_path_check(lts, formula, env, static_cast<std::size_t>(a.oracle_depth));
        nlohmann::json dis = nlohmann::json::array();
        std::size_t known = 0;
        for (StateId s = 0; s < lts.num_states(); ++s) {
            const auto v = verdict.at(s);
            if (v == oracle::Truth::unknown) continue;
            ++known;
            if ((v == oracle::Truth::yes) != result.holds_at(s)) dis.push_back(lts.state_name(s));
        }
        report.oracle = {{"depth", a.oracle_depth}, {"decided", known}, {"disagreements", dis}};
    }

    if (a.json) {
        out << to_json(lts, report).dump(2) << "\n";
    } else {
        out << to_text(lts, report);
    }
    if (a.dump_ca)
        for (const auto& [f, d] : result.diagnostics.config_automata) out << "# " << f << "\n" << d;
    return report.all_hold() ? exit_holds : exit_fails;
}

inline std::vector<std::pair<std::string, std::string>> parse_pairs(const std::vector<std::string>& items) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& it : items) {
        auto c = it.find(':');
        if (c == std::string::npos) throw ValidationError("tile pair '" + it + "' must be written a:b");
        out.emplace_back(it.substr(0, c), it.substr(c + 1));
    }
    return out;
}

} // namespace detail

/// Runs the CLI with the given arguments, writing to `out` and `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model checker for CTL with automaton-annotated until and release operators", "ectl"};
    app.require_subcommand(1);

    detail::CheckArgs ca;
    auto* check_cmd = app.add_subcommand("check", "check a formula against a system");
    check_cmd->add_option("--system", ca.system, "system file (.lts)")->required();
    auto* fopt = check_cmd->add_option("--formula", ca.formula_file, "formula file (.ectl)");
    auto* eopt = check_cmd->add_option("--expr", ca.expr, "formula text");
    fopt->excludes(eopt);
    check_cmd->add_option("--aut", ca.automata, "automaton file (.aut), repeatable");
    check_cmd->add_option("--at", ca.at, "state to query, repeatable (default: init states)");
    check_cmd->add_flag("--witness", ca.witness, "print witnesses for a top-level until");
    check_cmd->add_flag("--json", ca.json, "JSON report");
    check_cmd->add_flag("--table", ca.table, "include the subformula table");
    check_cmd->add_option("--oracle", ca.oracle_depth, "cross-check with the bounded path oracle at this depth");
    check_cmd->add_option("--cap", ca.cap, "determinization state cap")->capture_default_str();
    check_cmd->add_flag("--dump-ca", ca.dump_ca, "print the saturated configuration automata");
    check_cmd->add_flag("--parallel", ca.parallel, "evaluate independent subformulas concurrently");

    auto* aut_cmd = app.add_subcommand("aut", "automaton operations");
    aut_cmd->require_subcommand(1);
    std::string aut_file;
    std::size_t aut_cap = kDefaultStateCap;
    std::vector<std::string> word;
    auto* det_cmd = aut_cmd->add_subcommand("determinize", "subset or summary construction");
    auto* comp_cmd = aut_cmd->add_subcommand("complete", "add a sink for missing moves");
    auto* neg_cmd = aut_cmd->add_subcommand("complement", "complement (determinizing first)");
    auto* acc_cmd = aut_cmd->add_subcommand("accepts", "membership of a word (letters as arguments)");
    for (auto* c : {det_cmd, comp_cmd, neg_cmd, acc_cmd}) c->add_option("file", aut_file, "automaton file")->required();
    for (auto* c : {det_cmd, neg_cmd}) c->add_option("--cap", aut_cap, "state cap")->capture_default_str();
    acc_cmd->add_option("word", word, "letters of the word");

    auto* gen_cmd = app.add_subcommand("gen", "test-family generators");
    gen_cmd->require_subcommand(1);
    std::size_t gn = 0, gk = 0;
    std::string gout;
    std::vector<std::string> tiles, hpairs, vpairs;
    auto* fair_cmd = gen_cmd->add_subcommand("fairness", "layered fairness systems T and S");
    fair_cmd->add_option("n", gn)->required();
    fair_cmd->add_option("k", gk)->required();
    fair_cmd->add_option("--out", gout, "output directory (default: print)");
    auto* tile_cmd = gen_cmd->add_subcommand("tiling", "corridor tiling instance");
    tile_cmd->add_option("n", gn)->required();
    tile_cmd->add_option("--tiles", tiles)->required()->delimiter(',');
    tile_cmd->add_option("--horizontal", hpairs, "horizontal pairs a:b")->delimiter(',');
    tile_cmd->add_option("--vertical", vpairs, "vertical pairs a:b")->delimiter(',');
    tile_cmd->add_option("--out", gout, "output directory (default: print)");
    auto* corpus_cmd = gen_cmd->add_subcommand("corpus", "write the default corpus");
    corpus_cmd->add_option("dir", gout)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_holds : exit_invalid;
    }

    try {
        if (*check_cmd) {
            if (ca.formula_file.empty() && ca.expr.empty()) throw ValidationError("one of --formula or --expr is required");
            return detail::run_check(ca, out);
        }
        if (*aut_cmd) {
            const Automaton a = detail::in_file(aut_file, [&] { return parse_aut(read_file(aut_file)); });
            if (*det_cmd) {
                switch (kind_of(a)) {
                case AutomatonKind::nfa: out << serialize_aut(determinize_nfa(std::get<FiniteAutomaton>(a), aut_cap)); break;
                case AutomatonKind::vpa:
                    out << serialize_aut(determinize_vpa(std::get<VisiblyPushdownAutomaton>(a), aut_cap));
                    break;
                case AutomatonKind::pda:
                    throw UndecidableError(name_of(a), "pushdown automata cannot be determinized in general");
                default: out << serialize_aut(a); break;
                }
            } else if (*comp_cmd) {
                if (!is_deterministic(a)) throw ValidationError("completion needs a deterministic automaton");
                out << serialize_aut(complete(a));
            } else if (*neg_cmd) {
                out << serialize_aut(complement_language(a, aut_cap));
            } else {
                const bool yes = accepts(a, word);
                out << (yes ? "true" : "false") << "\n";
                return yes ? exit_holds : exit_fails;
            }
            return exit_holds;
        }
        if (*gen_cmd) {
            if (*fair_cmd) {
                if (!gout.empty()) {
                    for (const auto& p : oracle::emit_fairness(gout, gn, gk)) out << p.string() << "\n";
                } else {
                    auto [t, s] = oracle::gen_fairness_family(gn, gk);
                    out << serialize_lts(t) << "\n" << serialize_lts(s);
                }
            } else if (*tile_cmd) {
                const auto h = detail::parse_pairs(hpairs), v = detail::parse_pairs(vpairs);
                const auto inst = oracle::gen_micro_tiling(gn, tiles, h, v);
                const bool exists = oracle::tiling_exists(gn, tiles, h, v);
                if (!gout.empty()) {
                    for (const auto& p : oracle::emit_tiling(gout, "tiling_" + std::to_string(gn), inst))
                        out << p.string() << "\n";
                } else {
                    out << serialize_lts(inst.system) << "\n" << serialize_aut(inst.violations) << "\n"
                        << to_string(*inst.formula) << "\n";
                }
                out << "# brute-force tiling search: " << (exists ? "tiling exists" : "no tiling") << "\n";
            } else {
                for (const auto& p : oracle::emit_corpus(gout)) out << p.string() << "\n";
            }
            return exit_holds;
        }
    } catch (const UndecidableError& e) {
        err << "error: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const CapExceededError& e) {
        err << "error: " << e.what() << "\n";
        return exit_unsupported;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid;
    }
    return exit_invalid;
}

} // namespace ectl
