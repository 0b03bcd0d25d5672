#include <catch_amalgamated.hpp>

#include "ectl/checker.hpp"
#include "ectl/classify.hpp"
#include "ectl/io.hpp"
#include "ectl/measures.hpp"
#include "ectl/oracle/product.hpp"
#include "ectl/parser.hpp"
#include "support/library.hpp"
#include "support/random.hpp"

using namespace ectl;
using namespace ectl::make;

namespace {

Environment env_with(std::vector<std::string> alphabet, std::vector<Automaton> automata) {
    Environment env(std::move(alphabet));
    for (auto& a : automata) env.add(std::move(a));
    return env;
}

FiniteAutomaton two_state_dfa() {
    FiniteAutomaton a;
    a.kind = AutomatonKind::dfa;
    a.name = "A";
    a.add_letter("a");
    a.add_state("q0");
    a.add_state("q1", true);
    a.add_edge("q0", "a", "q1");
    a.add_edge("q1", "a", "q1");
    return a;
}

bool same(const FormulaPtr& a, const FormulaPtr& b) { return equal(*a, *b); }

} // namespace

TEST_CASE("desugar: EF with an automaton") {
    const auto A = LanguageRef::named("A");
    CHECK(same(desugar(ef(A, prop("p"))), eu(tt(), A, prop("p"))));
}

TEST_CASE("desugar: AX") {
    CHECK(same(desugar(ax(prop("p"))), not_(eu(tt(), LanguageRef::sigma(), not_(prop("p"))))));
    // AX ff: no successor at all
    CHECK(same(desugar(ax(ff())), not_(eu(tt(), LanguageRef::sigma(), tt()))));
}

TEST_CASE("desugar: every sugar form") {
    const auto L = LanguageRef::named("L");
    const auto p = prop("p"), q = prop("q");
    CHECK(same(desugar(au(p, L, q)), not_(er(not_(p), L, not_(q)))));
    CHECK(same(desugar(ar(p, L, q)), not_(eu(not_(p), L, not_(q)))));
    CHECK(same(desugar(eg(L, p)), er(ff(), L, p)));
    CHECK(same(desugar(af(L, p)), not_(er(ff(), L, not_(p)))));
    CHECK(same(desugar(ag(L, p)), not_(eu(tt(), L, not_(p)))));
    CHECK(same(desugar(ex(p)), eu(tt(), LanguageRef::sigma(), p)));
    CHECK(same(desugar(implies(p, q)), or_(not_(p), q)));
    CHECK(same(desugar(ef(p)), eu(tt(), LanguageRef::sigma_star(), p)));
    CHECK(same(desugar(eg(p)), er(ff(), LanguageRef::sigma_star(), p)));
}

TEST_CASE("desugar: output is core and idempotent") {
    testing::Rng rng(301);
    for (int i = 0; i < 300; ++i) {
        const auto f = testing::random_plain_formula(rng, 4, {"p", "q"});
        const auto d = desugar(f);
        CHECK(is_core(*d));
        CHECK(same(desugar(d), d));
    }
}

TEST_CASE("formula_size") {
    Environment env = env_with({"a"}, {two_state_dfa()});
    CHECK(formula_size(prop("q"), env) == 1);
    CHECK(formula_size(or_(prop("q"), prop("q")), env) == 2);
    // EF[A] q, q, and the implicit tt; plus 2 states and 2 rules
    CHECK(formula_size(ef(LanguageRef::named("A"), prop("q")), env) == 7);
    // q, tt, ff, EF[A] q, EG[A] q and the conjunction; the automaton counts once
    CHECK(formula_size(and_(ef(LanguageRef::named("A"), prop("q")), eg(LanguageRef::named("A"), prop("q"))), env) ==
          6 + 4);
}

TEST_CASE("temporal_depth") {
    CHECK(temporal_depth(*ef(LanguageRef::named("A"), prop("q"))) == 1);
    CHECK(temporal_depth(*or_(prop("q"), prop("p"))) == 0);
    CHECK(temporal_depth(*ag(and_(ef(prop("q")), ex(ex(prop("p")))))) == 3);
}

TEST_CASE("automata_depth") {
    FiniteAutomaton d;
    d.kind = AutomatonKind::dfa;
    d.name = "D";
    d.add_letter("a");
    d.add_letter("b");
    d.add_letter("c");
    for (const char* s : {"q0", "q1"}) d.add_state(s);
    d.add_state("q2", true);
    d.add_state("q3", true);
    d.add_edge("q0", "a", "q1");
    d.add_edge("q1", "b", "q2");
    d.add_edge("q2", "c", "q3");
    Environment env = env_with({"a", "b", "c"}, {d, parse_aut(testing::kSigmaStarNfa), parse_aut(testing::kAnbnDvpa),
                                                 parse_aut(testing::kEmptyDfa)});
    CHECK(automaton_depth(*env.find("D")) == 3);
    CHECK(automaton_depth(*env.find("sigma_star_nfa")) == 0);
    CHECK(automaton_depth(*env.find("anbn_dvpa")) == 2);
    CHECK(automata_depth(ef(LanguageRef::named("D"), prop("q")), env) == 3);
    CHECK(automata_depth(prop("q"), env) == 0);
    CHECK_THROWS_AS(automaton_depth(*env.find("empty_dfa")), ValidationError);
    CHECK_THROWS_AS(longest_word_length(*env.find("anbn_dvpa")), ValidationError);
}

TEST_CASE("measures are monotone under embedding") {
    Environment env = env_with({"a", "b"}, {parse_aut(testing::kEvenDfa), parse_aut(testing::kAnbnDvpa)});
    env.set_alphabet({"a", "b"});
    const std::vector<LanguageRef> langs{LanguageRef::named("even"), LanguageRef::named("anbn_dvpa"),
                                         LanguageRef::sigma(), LanguageRef::sigma_star()};
    testing::Rng rng(302);
    for (int i = 0; i < 200; ++i) {
        const auto f = testing::random_annotated_formula(rng, 3, langs, {"p"});
        const auto g = testing::coin(rng) ? ef(langs[0], f) : and_(prop("p"), f);
        CHECK(temporal_depth(*g) >= temporal_depth(*f));
        CHECK(automata_depth(g, env) >= automata_depth(f, env));
    }
}

TEST_CASE("classify: dispatch by kind and side") {
    Environment env = env_with({"a", "b"}, {parse_aut(testing::kEvenNfa), testing::load_sample_aut("anban.aut"),
                                            parse_aut(testing::kAnbnVpa), parse_aut(testing::kAnbnDpda)});
    auto plan_of = [&](const FormulaPtr& f) { return classify(desugar(f), env); };

    const auto until_pda = plan_of(eu(prop("p"), LanguageRef::named("anban", AutomatonKind::pda), prop("q")));
    REQUIRE(until_pda.steps.size() == 1);
    CHECK(until_pda.steps[0].action == PlanAction::until_engine);
    CHECK(until_pda.decidable());

    const auto eg_nfa = plan_of(eg(LanguageRef::named("even_nfa"), prop("q")));
    CHECK(eg_nfa.steps[0].action == PlanAction::determinize_nfa_then_release);

    CHECK(plan_of(eg(LanguageRef::named("anbn_vpa"), prop("q"))).steps[0].action ==
          PlanAction::determinize_vpa_then_release);
    CHECK(plan_of(eg(LanguageRef::named("anbn_dpda"), prop("q"))).steps[0].action == PlanAction::release_engine);

    const auto bad = plan_of(eg(LanguageRef::named("anban"), ff()));
    CHECK_FALSE(bad.decidable());
    REQUIRE(bad.first_undecidable());
    CHECK(bad.first_undecidable()->subformula == to_string(*er(ff(), LanguageRef::named("anban"), ff())));
    CHECK_THROWS_AS(require_decidable(bad), UndecidableError);

    // AG puts the pushdown automaton on an until: fine
    CHECK(plan_of(ag(LanguageRef::named("anban"), prop("q"))).decidable());
    // AF puts it on a release
    CHECK_FALSE(plan_of(af(LanguageRef::named("anban"), prop("q"))).decidable());
}

TEST_CASE("classify rejects sugar") {
    Environment env({"a"});
    CHECK_THROWS_AS(classify(ef(prop("p")), env), ValidationError);
}

TEST_CASE("dualities hold extensionally against the product oracle") {
    // A(p U[L] q) = S \ E(!p R[L] !q) and A(p R[L] q) = S \ E(!p U[L] !q),
    // with the right-hand sides computed by the independent product search.
    testing::Rng rng(303);
    for (int i = 0; i < 150; ++i) {
        const Lts lts = testing::random_lts(rng, 6, {"a", "b"}, {"p", "q"}, 0.3);
        FiniteAutomaton aut = testing::coin(rng) ? testing::random_nfa(rng, 4, {"a", "b"}, true, "L")
                                                 : testing::random_dfa(rng, 4, {"a", "b"}, "L");
        Environment env({"a", "b"});
        env.add(aut);
        const auto L = LanguageRef::named("L");
        const StateSet p = lts.sat_prop("p"), q = lts.sat_prop("q");
        const auto au_sat = check(lts, au(prop("p"), L, prop("q")), env).top();
        const auto ar_sat = check(lts, ar(prop("p"), L, prop("q")), env).top();
        const auto er_oracle = oracle::finite_product_check(lts, p.complement(), aut, q.complement(),
                                                            oracle::ProductMode::release);
        const auto eu_oracle = oracle::finite_product_check(lts, p.complement(), aut, q.complement(),
                                                            oracle::ProductMode::until);
        CHECK(au_sat == er_oracle.complement());
        CHECK(ar_sat == eu_oracle.complement());
        // F, G and X against their defining equivalences
        const auto ef_sat = check(lts, ef(L, prop("q")), env).top();
        CHECK(ef_sat == oracle::finite_product_check(lts, StateSet::all(lts.num_states()), aut, q,
                                                     oracle::ProductMode::until));
        const auto eg_sat = check(lts, eg(L, prop("q")), env).top();
        CHECK(eg_sat == oracle::finite_product_check(lts, StateSet(lts.num_states()), aut, q,
                                                     oracle::ProductMode::release));
    }
}
