#include <catch_amalgamated.hpp>

#include "ectl/pds.hpp"
#include "support/batteries.hpp"
#include "support/brute.hpp"
#include "support/random.hpp"

using namespace ectl;
using testing::Config;
using testing::Stack;

namespace {

bool acc(const ConfigAutomaton& ca, ControlId p, const Stack& w) {
    return ca.accepts(p, std::span<const StackSymbol>(w));
}

// Counter system: controls p=0, q=1; symbols g=0, BOT=1.
PushdownSystem counter(bool with_exit, bool with_p_rules = true) {
    PushdownSystem pds(2, 2, StackSymbol{1});
    if (with_p_rules) {
        pds.add_rule(0, 1, 0, {0, 1});
        pds.add_rule(0, 0, 0, {0, 0});
        if (with_exit) pds.add_rule(0, 0, 1, {});
    }
    pds.add_rule(1, 0, 1, {});
    return pds;
}

Stack gs(std::size_t n, bool bottom = true) {
    Stack w(n, 0);
    if (bottom) w.push_back(1);
    return w;
}

} // namespace

TEST_CASE("normalize splits long replacements") {
    PushdownSystem pds(1, 3);
    pds.add_rule(0, 0, 0, {0, 1, 2});
    const PushdownSystem n = normalize(pds);
    CHECK(n.is_normalized());
    CHECK(n.rules().size() == 2);
    CHECK(n.num_controls() == 2);
    CHECK(n.control_name(1).rfind("norm:", 0) == 0);
}

TEST_CASE("normalize leaves normalized systems alone") {
    PushdownSystem pds(2, 2);
    pds.add_rule(0, 0, 1, {1, 0});
    pds.add_rule(1, 1, 0, {});
    const PushdownSystem n = normalize(pds);
    CHECK(n.num_controls() == 2);
    REQUIRE(n.rules().size() == 2);
    CHECK(n.rules()[0].push == pds.rules()[0].push);
    CHECK(n.rules()[1].push.empty());
}

TEST_CASE("normalize preserves bounded reachability between original configurations") {
    testing::Rng rng(401);
    for (int i = 0; i < 40; ++i) {
        PushdownSystem pds(3, 2);
        const std::size_t nr = testing::uniform(rng, 1, 6);
        for (std::size_t r = 0; r < nr; ++r) {
            Stack w(testing::uniform(rng, 0, 4));
            for (auto& g : w) g = static_cast<StackSymbol>(testing::uniform(rng, 0, 1));
            pds.add_rule(static_cast<ControlId>(testing::uniform(rng, 0, 2)),
                         static_cast<StackSymbol>(testing::uniform(rng, 0, 1)),
                         static_cast<ControlId>(testing::uniform(rng, 0, 2)), w);
        }
        const PushdownSystem n = normalize(pds);
        for (ControlId p = 0; p < 3; ++p)
            for (const auto& w : testing::all_stacks(2, 1, 2))
                for (ControlId p2 = 0; p2 < 3; ++p2)
                    for (const auto& w2 : testing::all_stacks(2, 0, 3)) {
                        auto goal = [&](const Config& c) { return c.first == p2 && c.second == w2; };
                        const bool before = testing::reaches(pds, {p, w}, goal, 6, 10);
                        // each original step costs at most three normalized steps
                        const bool after = testing::reaches(n, {p, w}, goal, 6, 30);
                        CHECK((!before || after));
                        if (after && !before) CHECK(testing::reaches(pds, {p, w}, goal, 8, 30));
                    }
    }
}

TEST_CASE("pre*: no rules accepts exactly the target") {
    PushdownSystem pds(2, 2);
    const auto ca = pre_star(pds, testing::finite_target(pds, {{0, {1, 0}}, {1, {}}}));
    for (ControlId p = 0; p < 2; ++p)
        for (const auto& w : testing::all_stacks(2, 0, 3))
            CHECK(acc(ca, p, w) == ((p == 0 && w == Stack{1, 0}) || (p == 1 && w.empty())));
}

TEST_CASE("pre*: single pop rule") {
    PushdownSystem pds(2, 1);
    pds.add_rule(0, 0, 1, {});
    const auto ca = pre_star(pds, testing::finite_target(pds, {{1, {}}}));
    for (ControlId p = 0; p < 2; ++p)
        for (const auto& w : testing::all_stacks(1, 0, 3)) {
            const bool brute = testing::reaches(
                pds, {p, w}, [](const Config& c) { return c.first == 1 && c.second.empty(); }, 3, 10);
            CHECK(acc(ca, p, w) == brute);
        }
    CHECK(acc(ca, 0, {0}));
    CHECK_FALSE(acc(ca, 0, {0, 0}));
}

TEST_CASE("pre*: counter system") {
    const PushdownSystem pds = counter(true);
    ConfigAutomaton target(2, 2);
    const CaState f = target.add_aux_state(true);
    target.add_edge(1, 1, f);
    const auto ca = pre_star(pds, target);
    for (std::size_t n = 0; n <= 5; ++n) {
        CHECK(acc(ca, 0, gs(n)));
        CHECK(acc(ca, 1, gs(n)));
    }
    auto goal = [](const Config& c) { return c.first == 1 && c.second == Stack{1}; };
    for (ControlId p = 0; p < 2; ++p)
        for (const auto& w : testing::all_stacks(2, 0, 6))
            if (testing::reaches(pds, {p, w}, goal, 6, 40)) CHECK(acc(ca, p, w));
}

TEST_CASE("pre*: target with edges into control states is rejected") {
    PushdownSystem pds(2, 1);
    ConfigAutomaton bad(2, 1);
    bad.add_edge(0, 0, 1);
    CHECK_THROWS_AS(pre_star(pds, bad), ValidationError);
    PushdownSystem wide(1, 1);
    wide.add_rule(0, 0, 0, {0, 0, 0});
    CHECK_THROWS_AS(pre_star(wide, ConfigAutomaton(1, 1)), ValidationError);
}

TEST_CASE("accepts_config") {
    PushdownSystem pds(2, 2);
    const ConfigAutomaton empty(2, 2);
    for (const auto& w : testing::all_stacks(2, 0, 3)) CHECK_FALSE(acc(empty, 0, w));
    const auto universal = heads_target(2, 2, {{1, 0}, {1, 1}}, {1});
    for (const auto& w : testing::all_stacks(2, 0, 4)) CHECK(accepts_config(universal, 1, w));
    CHECK_THROWS_AS(acc(empty, 5, {}), ValidationError);
}

TEST_CASE("pre* invariants on random systems") {
    testing::Rng rng(402);
    for (int i = 0; i < 60; ++i) {
        const PushdownSystem pds = testing::random_pds(rng, 4, 3, 10);
        std::vector<Config> targets;
        for (int j = 0; j < 2; ++j) {
            Stack w(testing::uniform(rng, 0, 3));
            for (auto& g : w) g = static_cast<StackSymbol>(testing::uniform(rng, 0, pds.num_stack_symbols() - 1));
            targets.emplace_back(static_cast<ControlId>(testing::uniform(rng, 0, pds.num_controls() - 1)), w);
        }
        const auto target = testing::finite_target(pds, targets);
        const auto once = pre_star(pds, target);
        const auto twice = pre_star(pds, separate_control_states(once));
        const auto stacks = testing::all_stacks(pds.num_stack_symbols(), 0, 4);
        for (ControlId p = 0; p < pds.num_controls(); ++p)
            for (const auto& w : stacks) {
                // extensivity and idempotence
                if (acc(target, p, w)) CHECK(acc(once, p, w));
                CHECK(acc(once, p, w) == acc(twice, p, w));
            }
        // one-step closure
        for (const auto& r : pds.rules())
            for (const auto& rest : testing::all_stacks(pds.num_stack_symbols(), 0, 2)) {
                Stack after = r.push;
                after.insert(after.end(), rest.begin(), rest.end());
                Stack before{r.top};
                before.insert(before.end(), rest.begin(), rest.end());
                if (acc(once, r.to, after)) CHECK(acc(once, r.from, before));
            }
    }
}

TEST_CASE("pre* saturation is reproducible") {
    testing::Rng rng(403);
    for (int i = 0; i < 20; ++i) {
        const PushdownSystem pds = testing::random_pds(rng, 4, 3, 10);
        const auto target = heads_target(pds.num_controls(), pds.num_stack_symbols(), {{0, 0}});
        CHECK(dump(pds, pre_star(pds, target)) == dump(pds, pre_star(pds, target)));
    }
}

TEST_CASE("repeating heads: push loop") {
    PushdownSystem pds(1, 1);
    pds.add_rule(0, 0, 0, {0, 0});
    CHECK(repeating_heads(pds) == std::vector<std::pair<ControlId, StackSymbol>>{{0, 0}});
}

TEST_CASE("repeating heads: pop-only systems have none") {
    PushdownSystem pds(2, 2);
    pds.add_rule(0, 0, 1, {});
    pds.add_rule(1, 1, 0, {});
    pds.add_rule(0, 1, 0, {});
    CHECK(repeating_heads(pds).empty());
    const auto inf = has_infinite_run(pds);
    for (ControlId p = 0; p < 2; ++p)
        for (const auto& w : testing::all_stacks(2, 0, 4)) CHECK_FALSE(acc(inf, p, w));
}

TEST_CASE("repeating heads: two-rule cycle") {
    PushdownSystem pds(2, 1);
    pds.add_rule(0, 0, 1, {0});
    pds.add_rule(1, 0, 0, {0});
    const auto rep = repeating_heads(pds);
    CHECK(rep == std::vector<std::pair<ControlId, StackSymbol>>{{0, 0}, {1, 0}});
    CHECK(testing::head_repeats_brute(pds, 0, 0, 6, 10));
    CHECK(testing::head_repeats_brute(pds, 1, 0, 6, 10));
}

TEST_CASE("repeating heads: a pop summary closes the cycle") {
    // (p,a) -> (q, b a); (q,b) -> (q, empty); so (p,a) reaches (q,a)... and (q,a) -> (p,a)
    PushdownSystem pds(2, 2);
    pds.add_rule(0, 0, 1, {1, 0});
    pds.add_rule(1, 1, 1, {});
    pds.add_rule(1, 0, 0, {0});
    const auto rep = repeating_heads(pds);
    const std::set<std::pair<ControlId, StackSymbol>> got(rep.begin(), rep.end());
    CHECK(got.count({0, 0}));
    CHECK(got.count({1, 0}));
    CHECK_FALSE(got.count({1, 1}));
    CHECK(testing::head_repeats_prestar(pds, 0, 0));
}

TEST_CASE("infinite runs") {
    PushdownSystem loop(1, 2, StackSymbol{1});
    loop.add_rule(0, 0, 0, {0, 0});
    CHECK(acc(has_infinite_run(loop), 0, {0, 1}));

    const auto no_exit = has_infinite_run(counter(false));
    CHECK(acc(no_exit, 0, {1}));
    CHECK(testing::run_extension(counter(false), {0, {1}}, 50) == testing::RunVerdict::extends);

    const PushdownSystem drain = counter(false, false);
    const auto inf = has_infinite_run(drain);
    CHECK_FALSE(acc(inf, 1, {0, 0, 1}));
    CHECK(testing::run_extension(drain, {1, {0, 0, 1}}, 3) == testing::RunVerdict::halts);
}

TEST_CASE("dead configurations") {
    PushdownSystem pds(1, 3, StackSymbol{2});
    pds.add_rule(0, 0, 0, {0});
    const auto dead = dead_configs(pds);
    CHECK(acc(dead, 0, {1, 2}));
    CHECK_FALSE(acc(dead, 0, {0, 2}));
    CHECK(acc(dead, 0, {}));
    const PushdownSystem none(2, 2);
    const auto all = dead_configs(none);
    for (ControlId p = 0; p < 2; ++p)
        for (const auto& w : testing::all_stacks(2, 0, 3)) CHECK(acc(all, p, w));
}

TEST_CASE("dump format is sorted edges then finals") {
    PushdownSystem pds(2, 1);
    pds.set_control_names({"p", "q"});
    pds.set_stack_names({"g"});
    pds.add_rule(0, 0, 1, {});
    ConfigAutomaton target(2, 1);
    target.set_final(1);
    const auto ca = pre_star(pds, target);
    CHECK(dump(pds, ca) == "p g q\nfinal q\n");
    ConfigAutomaton aux(2, 1);
    const CaState a = aux.add_aux_state(true);
    aux.add_edge(0, 0, a);
    CHECK(dump(pds, aux) == "p g aux:0\nfinal aux:0\n");
}

TEST_CASE("bottom discipline on pushdown systems") {
    PushdownSystem pds(1, 2, StackSymbol{1});
    CHECK_THROWS_AS(pds.add_rule(0, 1, 0, {0}), ValidationError);
    CHECK_THROWS_AS(pds.add_rule(0, 0, 0, {1}), ValidationError);
    CHECK_THROWS_AS(pds.add_rule(0, 1, 0, {1, 1}), ValidationError);
    CHECK_NOTHROW(pds.add_rule(0, 1, 0, {0, 1}));
}

TEST_CASE("brute-force battery (small)") {
    const auto t = testing::pds_battery(404, 60);
    INFO(t.prestar.first_failure << t.heads.first_failure << t.runs.first_failure);
    CHECK(t.prestar.ok());
    CHECK(t.heads.ok());
    CHECK(t.runs.ok());
    CHECK(t.runs.inconclusive * 10 < t.runs.instances);
}
