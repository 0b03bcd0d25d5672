#include <catch_amalgamated.hpp>

#include "ectl/automata.hpp"
#include "ectl/determinize.hpp"
#include "ectl/io.hpp"
#include "ectl/regex.hpp"
#include "support/library.hpp"
#include "support/random.hpp"

using namespace ectl;
using testing::all_words;

namespace {

bool acc(const Automaton& a, std::string_view w) { return accepts(a, word_of(w)); }

// Letters as single characters; a word of length <= n.
std::vector<std::string> letters(const Automaton& a) { return alphabet_of(a).names(); }

void same_language(const Automaton& x, const Automaton& y, std::size_t n) {
    const Acceptor ax(x), ay(y);
    for (const auto& w : all_words(letters(x), n)) {
        INFO("word length " << w.size());
        REQUIRE(ax(w) == ay(w));
    }
}

bool bottom_discipline(const VisiblyPushdownAutomaton& a) {
    for (const auto& r : a.calls)
        if (r.push == a.bottom) return false;
    return true;
}

bool bottom_discipline(const PushdownAutomaton& a) {
    for (const auto& r : a.rules) {
        for (std::size_t i = 0; i < r.push.size(); ++i)
            if (r.push[i] == a.bottom && !(r.top == a.bottom && i + 1 == r.push.size())) return false;
        if (r.top == a.bottom && (r.push.empty() || r.push.back() != a.bottom)) return false;
    }
    return true;
}

bool total_per_trigger(const FiniteAutomaton& a) {
    if (a.has_epsilon()) return false;
    std::vector<int> count(a.num_states() * a.alphabet.size(), 0);
    for (const auto& e : a.edges) ++count[e.from * a.alphabet.size() + e.letter];
    for (int c : count)
        if (c != 1) return false;
    return true;
}

bool total_per_trigger(const VisiblyPushdownAutomaton& a) {
    const std::size_t nl = a.alphabet.size(), ns = a.stack.size();
    std::vector<int> ci(a.num_states() * nl, 0), r(a.num_states() * nl * ns, 0);
    for (const auto& x : a.calls) ++ci[x.from * nl + x.letter];
    for (const auto& x : a.internals) ++ci[x.from * nl + x.letter];
    for (const auto& x : a.returns) ++r[(x.from * nl + x.letter) * ns + x.top];
    for (AutStateId q = 0; q < a.num_states(); ++q)
        for (LetterId l = 0; l < nl; ++l) {
            if (a.letter_class[l] == LetterClass::ret) {
                for (StackSymbol g = 0; g < ns; ++g)
                    if (r[(q * nl + l) * ns + g] != 1) return false;
            } else if (ci[q * nl + l] != 1) {
                return false;
            }
        }
    return true;
}

} // namespace

TEST_CASE("accepts: a^n b^n visibly pushdown") {
    const Automaton a = parse_aut(testing::kAnbnDvpa);
    CHECK(acc(a, "aabb"));
    CHECK(acc(a, "ab"));
    CHECK_FALSE(acc(a, "aab"));
    CHECK_FALSE(acc(a, ""));
    CHECK_FALSE(acc(a, "abab"));
}

TEST_CASE("accepts: sigma star accepts the empty word") {
    const Automaton a = parse_aut(testing::kSigmaStarNfa);
    CHECK(acc(a, ""));
    CHECK(acc(a, "abba"));
}

TEST_CASE("accepts: a^n b a^n pushdown") {
    const Automaton a = testing::load_sample_aut("anban.aut");
    CHECK(acc(a, "aba"));
    CHECK(acc(a, "b"));
    CHECK(acc(a, "aabaa"));
    CHECK_FALSE(acc(a, "ab"));
    CHECK_FALSE(acc(a, "abaa"));
}

TEST_CASE("accepts: letters outside the alphabet are errors") {
    const Automaton a = parse_aut(testing::kEvenDfa);
    CHECK_THROWS_AS(acc(a, "ab"), ValidationError);
}

TEST_CASE("Sigma and Sigma* builders") {
    const std::vector<std::string> ab{"a", "b"};
    const Automaton one = sigma_automaton(ab);
    const Automaton star = sigma_star_automaton(ab);
    for (const auto& w : all_words(ab, 5)) {
        CHECK(accepts(one, w) == (w.size() == 1));
        CHECK(accepts(star, w));
    }
}

TEST_CASE("determinize_nfa: deterministic input keeps its language") {
    const Automaton in = parse_aut(testing::kEvenDfa);
    FiniteAutomaton nfa = std::get<FiniteAutomaton>(in);
    nfa.kind = AutomatonKind::nfa;
    const FiniteAutomaton d = determinize_nfa(nfa);
    CHECK(d.kind == AutomatonKind::dfa);
    CHECK(d.is_complete());
    same_language(in, d, 8);
}

TEST_CASE("determinize_nfa: (a|b)*a") {
    FiniteAutomaton nfa;
    nfa.kind = AutomatonKind::nfa;
    nfa.name = "ends_in_a";
    nfa.add_letter("a");
    nfa.add_letter("b");
    nfa.add_state("q0");
    nfa.add_state("q1");
    nfa.add_state("q2", true);
    nfa.add_edge("q0", "a", "q0");
    nfa.add_edge("q0", "b", "q0");
    nfa.add_edge("q0", "a", "q1");
    nfa.add_edge("q1", "eps", "q2");
    const FiniteAutomaton d = determinize_nfa(nfa);
    CHECK(d.is_complete());
    for (const auto& w : all_words({"a", "b"}, 8)) CHECK(accepts(d, w) == (!w.empty() && w.back() == "a"));
    CHECK(d.name.find("ends_in_a") != std::string::npos);
}

TEST_CASE("determinize_nfa: epsilon closure after a letter") {
    FiniteAutomaton nfa;
    nfa.kind = AutomatonKind::nfa;
    nfa.name = "chain";
    nfa.add_letter("a");
    nfa.add_state("q0");
    nfa.add_state("q1");
    nfa.add_state("q2", true);
    nfa.add_edge("q0", "a", "q1");
    nfa.add_edge("q1", "eps", "q2");
    const FiniteAutomaton d = determinize_nfa(nfa);
    CHECK(accepts(d, word_of("a")));
    CHECK_FALSE(accepts(d, word_of("")));
    CHECK_FALSE(accepts(d, word_of("aa")));
    // subset states are named by sorted member lists
    CHECK(d.states.find("{q1,q2}"));
}

TEST_CASE("determinize_nfa: random battery") {
    testing::Rng rng(601);
    for (int i = 0; i < 200; ++i) {
        const FiniteAutomaton nfa = testing::random_nfa(rng, 6, {"a", "b"}, true);
        const FiniteAutomaton d = determinize_nfa(nfa);
        CHECK(d.kind == AutomatonKind::dfa);
        CHECK(d.is_deterministic());
        CHECK(total_per_trigger(d));
        same_language(nfa, d, 8);
    }
}

TEST_CASE("determinize_nfa: the cap is enforced") {
    // (a|b)* a (a|b)^5 needs 2^6 subsets.
    const FiniteAutomaton nfa = regex_to_nfa("(a|b)*a(a|b)(a|b)(a|b)(a|b)(a|b)", {"a", "b"});
    CHECK_THROWS_AS(determinize_nfa(nfa, 10), CapExceededError);
    CHECK_NOTHROW(determinize_nfa(nfa, 1000));
}

TEST_CASE("determinize_vpa: deterministic input") {
    const Automaton in = parse_aut(testing::kAnbnDvpa);
    const auto d = determinize_vpa(std::get<VisiblyPushdownAutomaton>(in));
    CHECK(d.kind == AutomatonKind::dvpa);
    same_language(in, d, 8);
}

TEST_CASE("determinize_vpa: union with an internal loop") {
    const Automaton base = parse_aut(testing::kAnbnDvpa);
    VisiblyPushdownAutomaton v = std::get<VisiblyPushdownAutomaton>(base);
    v.kind = AutomatonKind::vpa;
    const LetterId c = v.add_letter("c", LetterClass::internal);
    const AutStateId loop = v.add_state("loop", true);
    v.add_internal(v.initial, c, loop);
    v.add_internal(loop, c, loop);
    const AutStateId fresh = v.add_state("alt");
    v.add_call(v.initial, v.alphabet.find("a").value(), fresh, v.stack.find("A").value());
    validate(v);
    REQUIRE_FALSE(v.is_deterministic());
    const auto d = determinize_vpa(v);
    CHECK(d.is_deterministic());
    CHECK(total_per_trigger(d));
    same_language(v, d, 8);
}

TEST_CASE("determinize_vpa: balanced-buffer language") {
    const auto nbu = std::get<VisiblyPushdownAutomaton>(testing::load_sample_aut("nbu.aut"));
    const Automaton d = determinize_vpa(nbu);
    CHECK(acc(d, "pc"));
    CHECK(acc(d, "ppcc"));
    CHECK_FALSE(acc(d, "c"));
    CHECK_FALSE(acc(d, "pcc"));
    // membership read off the defining counting condition
    for (const auto& w : all_words({"p", "c", "r"}, 7)) {
        long bal = 0;
        bool prefix_ok = true;
        for (const auto& l : w) {
            bal += l == "p" ? 1 : l == "c" ? -1 : 0;
            if (bal < 0) prefix_ok = false;
        }
        CHECK(accepts(d, w) == (prefix_ok && bal == 0));
    }
}

TEST_CASE("determinize_vpa: random battery") {
    testing::Rng rng(602);
    for (int i = 0; i < 100; ++i) {
        const auto [v, d] = testing::tractable_vpa(rng, 5, 2);
        CHECK(d.kind == AutomatonKind::dvpa);
        CHECK(d.is_deterministic());
        CHECK(total_per_trigger(d));
        CHECK(bottom_discipline(d));
        same_language(v, d, 8);
    }
}

TEST_CASE("complete: already complete DFA") {
    const auto a = std::get<FiniteAutomaton>(parse_aut(testing::kEvenDfa));
    REQUIRE(a.is_complete());
    const auto c = complete(a);
    CHECK(c.is_complete());
    CHECK(c.num_states() == a.num_states());
    same_language(a, c, 8);
}

TEST_CASE("complete: missing edges go to a non-final sink") {
    const auto a = std::get<FiniteAutomaton>(parse_aut(testing::kEmptyDfa));
    REQUIRE_FALSE(a.is_complete());
    const auto c = complete(a);
    CHECK(c.is_complete());
    const auto sink = c.states.find(kSinkName);
    REQUIRE(sink);
    CHECK_FALSE(c.is_final(*sink));
    CHECK(total_per_trigger(c));
    same_language(a, c, 8);
}

TEST_CASE("complete: DPDA for a^n b^n") {
    const Automaton a = parse_aut(testing::kAnbnDpda);
    const Automaton c = complete(a);
    const auto& p = std::get<PushdownAutomaton>(c);
    CHECK(p.is_complete());
    CHECK(bottom_discipline(p));
    CHECK_FALSE(acc(c, "ba"));
    same_language(a, c, 8);
}

TEST_CASE("complete: DVPA keeps language and bottom discipline") {
    const Automaton a = parse_aut(testing::kAnbnDvpa);
    const Automaton c = complete(a);
    CHECK(is_complete(c));
    CHECK(bottom_discipline(std::get<VisiblyPushdownAutomaton>(c)));
    same_language(a, c, 8);
}

TEST_CASE("complete: nondeterministic input is rejected") {
    CHECK_THROWS_AS(complete(parse_aut(testing::kAnbnVpa)), ValidationError);
    CHECK_THROWS_AS(complete(parse_aut(testing::kAnbnPda)), ValidationError);
}

TEST_CASE("complement: flipped finals on (aa)*") {
    const Automaton a = complement(parse_aut(testing::kEvenDfa));
    CHECK(acc(a, "a"));
    CHECK_FALSE(acc(a, "aa"));
    CHECK_FALSE(acc(a, ""));
}

TEST_CASE("complement: completed balanced-buffer DVPA") {
    const auto nbu = std::get<VisiblyPushdownAutomaton>(testing::load_sample_aut("nbu.aut"));
    const Automaton c = complement(complete(determinize_vpa(nbu)));
    CHECK(acc(c, "c"));
    CHECK_FALSE(acc(c, "pc"));
}

TEST_CASE("complement: involution and pointwise negation") {
    testing::Rng rng(603);
    for (int i = 0; i < 50; ++i) {
        const Automaton d = complete(determinize_nfa(testing::random_nfa(rng, 4, {"a", "b"}, true)));
        const Automaton c = complement(d);
        const Automaton cc = complement(c);
        for (const auto& w : all_words({"a", "b"}, 8)) {
            CHECK(accepts(c, w) == !accepts(d, w));
            CHECK(accepts(cc, w) == accepts(d, w));
        }
    }
    for (int i = 0; i < 20; ++i) {
        const Automaton d = complete(testing::tractable_vpa(rng, 3, 1).det);
        const Automaton c = complement(d);
        const Acceptor ac(c), ad(d);
        for (const auto& w : all_words({"p", "c", "r"}, 6)) CHECK(ac(w) == !ad(w));
    }
}

TEST_CASE("complement: incomplete or pushdown input is rejected") {
    CHECK_THROWS_AS(complement(parse_aut(testing::kEmptyDfa)), ValidationError);
    CHECK_THROWS_AS(complement(parse_aut(testing::kAnbnDvpa)), ValidationError);
    CHECK_THROWS_AS(complement(parse_aut(testing::kAnbnDpda)), ValidationError);
    CHECK_THROWS_AS(complement_language(parse_aut(testing::kAnbnPda)), ValidationError);
}

TEST_CASE("complement_language handles nondeterministic finite and visibly input") {
    const Automaton nfa = parse_aut(testing::kEvenNfa);
    const Automaton c = complement_language(nfa);
    for (const auto& w : all_words({"a"}, 8)) CHECK(accepts(c, w) == !accepts(nfa, w));
    const Automaton vpa = parse_aut(testing::kAnbnVpa);
    const Automaton cv = complement_language(vpa);
    for (const auto& w : all_words({"a", "b"}, 8)) CHECK(accepts(cv, w) == !accepts(vpa, w));
}

TEST_CASE("regex: (aa)*") {
    const FiniteAutomaton r = regex_to_nfa("(aa)*", {"a"});
    CHECK(accepts(r, word_of("")));
    CHECK(accepts(r, word_of("aa")));
    CHECK_FALSE(accepts(r, word_of("a")));
}

TEST_CASE("regex: single letter") {
    const FiniteAutomaton r = regex_to_nfa("a", {"a", "b"});
    for (const auto& w : all_words({"a", "b"}, 3)) CHECK(accepts(r, w) == (w == Word{"a"}));
}

TEST_CASE("regex: star binds tighter than alternation") {
    const FiniteAutomaton r = regex_to_nfa("a|b*", {"a", "b"});
    FiniteAutomaton ref;
    ref.kind = AutomatonKind::nfa;
    ref.add_letter("a");
    ref.add_letter("b");
    ref.add_state("i");
    ref.add_state("x", true);
    ref.add_state("y", true);
    ref.add_edge("i", "a", "x");
    ref.add_edge("i", "eps", "y");
    ref.add_edge("y", "b", "y");
    for (const auto& w : all_words({"a", "b"}, 3)) CHECK(accepts(r, w) == accepts(ref, w));
    CHECK(accepts(r, word_of("")));
}

TEST_CASE("regex: plus, option, dot and multi-character letters") {
    const FiniteAutomaton r = regex_to_nfa("a+b?.", {"a", "b", "c"});
    CHECK(accepts(r, word_of("ac")));
    CHECK(accepts(r, word_of("aabc")));
    CHECK(accepts(r, word_of("aba")));
    CHECK_FALSE(accepts(r, word_of("bc")));
    CHECK_FALSE(accepts(r, word_of("a")));
    const FiniteAutomaton m = regex_to_nfa("<req> <ack>*", {"req", "ack"});
    CHECK(accepts(m, Word{"req", "ack", "ack"}));
    CHECK_FALSE(accepts(m, Word{"ack"}));
}

TEST_CASE("regex: errors carry positions") {
    try {
        regex_to_nfa("(ab", {"a", "b"});
        FAIL("no error");
    } catch (const ValidationError& e) {
        CHECK(e.column() > 0);
    }
    CHECK_THROWS_AS(regex_to_nfa("x", {"a"}), ValidationError);
    CHECK_THROWS_AS(regex_to_nfa("a|*", {"a"}), ValidationError);
}

TEST_CASE("structural validation") {
    CHECK_THROWS_AS(parse_aut("kind dfa\nname d\nalphabet a\nstates q\ninitial q\nrule q eps q\n"), ValidationError);
    CHECK_THROWS_AS(parse_aut("kind dfa\nname d\nalphabet a\nstates q r\ninitial q\nrule q a q\nrule q a r\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_aut("kind dvpa\nname v\ncalls a\nstates q\ninitial q\nstack BOT A\nbottom BOT\n"
                              "rule q a push BOT q\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_aut("kind pda\nname p\nalphabet a\nstates q\ninitial q\nstack BOT A\nbottom BOT\n"
                              "rule q a BOT -> q A\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_aut("kind dpda\nname p\nalphabet a\nstates q\ninitial q\nstack BOT A\nbottom BOT\n"
                              "rule q a A -> q A\nrule q a A -> q\n"),
                    ValidationError);
}

TEST_CASE("bottom discipline holds after every construction") {
    testing::Rng rng(604);
    for (int i = 0; i < 30; ++i) {
        const auto [v, d] = testing::tractable_vpa(rng, 4, 2);
        CHECK(bottom_discipline(v));
        CHECK(bottom_discipline(complete(d)));
        const auto p = testing::random_pda(rng, 4, 2);
        CHECK(bottom_discipline(p));
        validate(p);
        if (p.is_deterministic()) CHECK(bottom_discipline(complete(p)));
    }
}
