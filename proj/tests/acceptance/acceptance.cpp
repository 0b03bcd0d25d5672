// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ectl/checker.hpp"
#include "ectl/parser.hpp"
#include "support/batteries.hpp"
#include "support/library.hpp"

using namespace ectl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string tally_text(const testing::Tally& t) {
    std::ostringstream s;
    s << t.instances << " instances, " << t.disagreements << " disagreements";
    if (t.inconclusive) s << ", " << t.inconclusive << " inconclusive";
    if (!t.ok()) s << " (first: " << t.first_failure << ")";
    return s.str();
}

Outcome buffer_example() {
    const Lts lts = testing::load_sample_lts("buffer_loop.lts");
    Environment env({"p", "c", "r"});
    env.add(testing::load_sample_aut("nbu.aut"));
    const auto spec = parse_formula(read_file(testing::sample_path("nbu_spec.ectl")), env);
    const auto r = check(lts, spec, env);
    const auto f1 = desugar(parse_formula("AG EX[re:p] tt", env));
    const auto f2 = desugar(parse_formula("AG[NBU] (AX[re:c] ff & EX[re:r] tt)", env));
    const auto f3 = desugar(parse_formula("AG[~NBU] (EX[re:c] tt & AX[re:r] ff)", env));
    const bool whole = r.holds_at(0);
    const bool v1 = r.sat(to_string(*f1)).contains(0);
    const bool v2 = r.sat(to_string(*f2)).contains(0);
    const bool v3 = r.sat(to_string(*f3)).contains(0);
    std::ostringstream d;
    d << std::boolalpha << "conjunction " << whole << ", (1) " << v1 << ", (2) " << v2 << ", (3) " << v3;
    return {!whole && v1 && !v2, d.str()};
}

Outcome emptiness() {
    const auto lib = testing::emptiness_library(2001, 2);
    std::set<AutomatonKind> kinds;
    for (const auto& k : lib) kinds.insert(kind_of(k.aut));
    const auto t = testing::emptiness_battery(lib);
    return {t.ok() && lib.size() >= 20 && kinds.size() == 6,
            tally_text(t) + ", " + std::to_string(kinds.size()) + " kinds"};
}

Outcome plain_ctl() {
    const auto t = testing::plain_ctl_battery(3001, 1000);
    return {t.ok() && t.instances == 1000, tally_text(t)};
}

Outcome regular() {
    const auto t = testing::regular_battery(4001, 1000);
    return {t.ok() && t.instances == 1000, tally_text(t)};
}

Outcome pds_micro() {
    const auto t = testing::pds_battery(5001, 500);
    // inconclusive run verdicts are searches that neither halted nor looped
    // within the exploration bound; they are not counted as agreement
    const bool ok = t.prestar.ok() && t.heads.ok() && t.runs.ok() && t.runs.inconclusive * 10 < t.runs.instances;
    return {ok, "pre* " + tally_text(t.prestar) + "; heads " + tally_text(t.heads) + "; runs " + tally_text(t.runs)};
}

Outcome determinization() {
    const auto t = testing::determinization_battery(6001, 200, 100);
    return {t.nfa.ok() && t.vpa.ok() && t.nfa.instances == 200 && t.vpa.instances == 100,
            "nfa " + tally_text(t.nfa) + "; vpa " + tally_text(t.vpa) + " (" + std::to_string(t.vpa_discarded) +
                " draws over the 2048-state cap redrawn)"};
}

Outcome tiling() {
    std::size_t tilable = 0;
    const auto cases = testing::tiling_cases(7001, 200);
    const auto t = testing::tiling_battery(cases, &tilable);
    return {t.ok(), tally_text(t) + ", " + std::to_string(tilable) + " tilable"};
}

Outcome fairness() {
    const auto a = testing::fairness_battery(3, 2, 8001, 100);
    const auto b = testing::fairness_battery(4, 3, 8002, 100);
    return {a.ok() && b.ok(), "(3,2) " + tally_text(a) + "; (4,3) " + tally_text(b)};
}

Outcome pushdown_until() {
    std::ostringstream d;
    bool ok = true;
    {
        const Lts lts = testing::anbn_truncated_chain(10);
        Environment env({"a", "b"});
        const Automaton vpa = parse_aut(testing::kAnbnVpa);
        env.add(vpa);
        const auto r = check(lts, parse_formula("EF[anbn_vpa] AX ff", env), env);
        const bool holds = r.holds_at(0);
        bool valid = false;
        if (!r.witnesses.empty()) {
            const auto& w = r.witnesses[0].path;
            const StateSet all = StateSet::all(lts.num_states());
            StateSet dead(lts.num_states());
            for (StateId s = 0; s < lts.num_states(); ++s)
                if (lts.is_dead_end(s)) dead.insert(s);
            valid = validate_witness(lts, w, vpa, all, dead);
            d << "witness of length " << w.actions.size();
        }
        ok = ok && holds && valid;
        d << (holds ? ", root holds" : ", root fails") << (valid ? ", replayed" : ", not replayed");
    }
    {
        const Lts lts = testing::anban_chain(5);
        Environment env({"a", "b"});
        const Automaton dpda = testing::load_sample_aut("anban_det.aut");
        env.add(dpda);
        const auto r = check(lts, parse_formula("E(tt U[anban_det] q)", env), env);
        bool valid = false;
        if (!r.witnesses.empty())
            valid = validate_witness(lts, r.witnesses[0].path, dpda, StateSet::all(lts.num_states()),
                                     lts.sat_prop("q"));
        ok = ok && r.holds_at(0) && valid;
        d << "; a^n b a^n chain " << (r.holds_at(0) ? "holds" : "fails") << (valid ? ", replayed" : ", not replayed");
    }
    return {ok, d.str()};
}

/// Chain of n states: a-steps, one b in the middle, q at the end and r nowhere.
Lts scaling_chain(std::size_t n) {
    Lts lts("chain_" + std::to_string(n));
    const ActionId a = lts.add_action("a");
    const ActionId b = lts.add_action("b");
    const PropId q = lts.add_prop("q");
    lts.add_prop("r");
    for (std::size_t i = 0; i < n; ++i) lts.add_state("c" + std::to_string(i));
    for (std::size_t i = 0; i + 1 < n; ++i)
        lts.add_transition(static_cast<StateId>(i), i == n / 2 - 1 ? b : a, static_cast<StateId>(i + 1));
    lts.label(static_cast<StateId>(n - 1), q);
    lts.add_designated(0);
    return lts;
}

Outcome scaling() {
    Environment env({"a", "b"});
    env.add(testing::load_sample_aut("anban.aut"));
    env.add(testing::load_sample_aut("anban_det.aut"));
    const auto f = parse_formula("EF[anban] q & EG[anban_det] !r", env);
    std::vector<double> xs, ys;
    std::ostringstream d;
    bool verdicts = true;
    for (std::size_t n : {100u, 200u, 400u, 800u}) {
        const Lts lts = scaling_chain(n);
        double best = 1e9;
        for (int rep = 0; rep < 2; ++rep) {
            const auto t0 = Clock::now();
            const auto r = check(lts, f, env);
            best = std::min(best, seconds_since(t0));
            // odd n has no matching split; even n splits (n/2-1) a's, b, (n/2-1) a's
            verdicts = verdicts && r.holds_at(0);
        }
        xs.push_back(std::log(static_cast<double>(n)));
        ys.push_back(std::log(std::max(best, 1e-6)));
        d << "n=" << n << " " << best << "s; ";
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = num / den;
    d << "slope " << slope;
    return {verdicts && slope < 2.5, d.str()};
}

struct Captured {
    int code;
    std::string output;
};

Captured run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + ECTL_CLI_PATH + "\" " + args + " 2>&1";
    Captured c{-1, {}};
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return c;
    std::array<char, 512> buf;
    while (std::fgets(buf.data(), buf.size(), p)) c.output += buf.data();
    const int status = pclose(p);
    c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return c;
}

Outcome guardrails() {
    const std::string base = std::string("check --system \"") + testing::sample_path("loop.lts") + "\" --aut \"" +
                             testing::sample_path("anban.aut") + "\" --expr ";
    const std::vector<std::string> formulas{
        "'EG[pda:anban] ff'",        "'EG[anban] tt'",          "'E(tt R[anban] ff)'",
        "'AF[anban] tt'",            "'A(tt U[anban] ff)'",     "'EF EG[anban] ff'",
        "'AX tt & !EG[anban] tt'",   "'AG (tt -> AF[anban] tt)'"};
    std::ostringstream d;
    bool ok = true;
    for (const auto& f : formulas) {
        const auto r = run_cli(base + f);
        const bool named = r.output.find("R[anban]") != std::string::npos ||
                           r.output.find("R[pda:anban]") != std::string::npos;
        if (r.code != 2 || !named) {
            ok = false;
            d << f << " -> exit " << r.code << (named ? "" : " without the subformula") << "; ";
        }
    }
    // the until side stays decidable
    const auto until = run_cli(base + "'EF[anban] tt'");
    if (until.code == 2) {
        ok = false;
        d << "until side rejected; ";
    }
    d << formulas.size() << " rejected formulas checked";
    return {ok, d.str()};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "buffer example verdicts", 1, buffer_example},
        {2, "emptiness correspondence", 5, emptiness},
        {3, "plain CTL differential battery", 30, plain_ctl},
        {4, "regular fragment differential battery", 60, regular},
        {5, "pre* and infinite-run micro-oracles", 60, pds_micro},
        {6, "determinization batteries", 60, determinization},
        {7, "micro tiling outcomes", 30, tiling},
        {8, "fairness family invariance", 30, fairness},
        {9, "pushdown until on chain models", 1, pushdown_until},
        {10, "polynomial scaling on chains", 120, scaling},
        {11, "undecidability guardrails", 30, guardrails},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = seconds_since(t0);
        const bool in_time = secs <= c.budget;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::cout << (pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " ["
                  << secs << "s of " << c.budget << "s" << (in_time ? "" : ", over budget") << "]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
