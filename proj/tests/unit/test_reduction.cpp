#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "globalcsp/apps.hpp"
#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/hypergraph.hpp"
#include "globalcsp/reduction.hpp"

#include "helpers.hpp"

using namespace gcsp;
using namespace gcsp::test;

namespace {

ConstraintPtr find_constraint(const CspInstance& p, const std::string& label) {
    for (const auto& c : p.constraints())
        if (c->label() == label)
            return c;
    throw std::logic_error("no constraint " + label);
}

bool lifts_to_solution(const ClassicReduction& red) {
    auto classic_sols = enum_solutions(red.classic()).solutions;
    if (classic_sols.empty())
        return brute_force_solutions(red.original()).empty();
    if (brute_force_solutions(red.original()).empty())
        return false;
    return std::all_of(classic_sols.begin(), classic_sols.end(),
                       [&](const Assignment& s) {
                           return red.original().is_solution(red.lift(s));
                       });
}

} // namespace

TEST_CASE("intersection variables are the pairwise scope overlaps") {
    auto p = t1t2_instance();
    CHECK(intersection_variables(p, find_constraint(p, "T1")) == vars({"y"}));
    CHECK(intersection_variables(p, find_constraint(p, "T2")) == vars({"y"}));

    auto g = egc3_instance();
    CHECK(intersection_variables(g, find_constraint(g, "G")).empty());

    auto foreign = table("F", {"x"}, {dom({"0", "1"})}, {{"0"}});
    CHECK_THROWS_AS(intersection_variables(p, foreign), ValidationError);
}

TEST_CASE("induced tables pad private variables with the star value") {
    auto p = t1t2_instance();
    auto ic1 = induced_table_constraint(p, find_constraint(p, "T1"), 1000);
    auto t = std::dynamic_pointer_cast<const TableConstraint>(ic1);
    REQUIRE(t);
    CHECK(t->label() == "ic(T1)");
    CHECK(t->scope() == vars({"x", "y"}));
    REQUIRE(t->rows().size() == 1);
    auto row = t->row_as_assignment(0);
    CHECK(row.at(V("x")) == Value::star());
    CHECK(row.at(V("y")) == val("1"));

    // a constraint whose scope is all shared keeps its real domains
    auto g5 = encode_cgp(cycle_graph(5), 3, 2);
    auto icb = induced_table_constraint(g5, find_constraint(g5, "C^beta"), 100000);
    auto tb = std::dynamic_pointer_cast<const TableConstraint>(icb);
    REQUIRE(tb);
    CHECK(tb->rows().size() == 16); // sum of C(5,i) for i = 0..2
    for (std::size_t r = 0; r < tb->rows().size(); ++r)
        for (const auto& [v, val] : tb->row_as_assignment(r).bindings())
            CHECK(val != Value::star());
}

TEST_CASE("induced tables refuse to grow past the cap") {
    auto p = dense_instance();
    CHECK_THROWS_AS(induced_table_constraint(p, p.constraints()[0], 16), SparsityError);
    try {
        reduce_to_classic(p, 1); // cap 58, but the shared scope has 1024 rows
        FAIL("expected SparsityError");
    } catch (const SparsityError& e) {
        CHECK(e.constraint_label == "E1");
    }
}

TEST_CASE("reduce_to_classic on the warm-up instance") {
    auto p = t1t2_instance();
    auto red = reduce_to_classic(p, 2);
    CHECK(hypergraph_of(red.classic()) == hypergraph_of(p));
    CHECK(red.classic().domain_of(V("x")) == std::vector<Value>{Value::star()});
    CHECK(red.classic().domain_of(V("y")) == dom({"0", "1"}));

    auto sols = enum_solutions(red.classic()).solutions;
    REQUIRE(sols.size() == 1);
    Assignment lifted = red.lift(sols[0]);
    CHECK(lifted ==
          Assignment::from_pairs({{V("x"), val("1")}, {V("y"), val("1")}}));

    Assignment bogus = Assignment::from_pairs({{V("x"), Value::star()},
                                               {V("y"), val("0")}});
    CHECK_THROWS_AS(red.lift(bogus), ValidationError);
}

TEST_CASE("reducing a single-constraint instance probes pure satisfiability") {
    auto g = egc3_instance();
    auto red = reduce_to_classic(g, 1);
    for (VariableId v : red.classic().variables())
        CHECK(red.classic().domain_of(v) == std::vector<Value>{Value::star()});
    auto sols = enum_solutions(red.classic()).solutions;
    REQUIRE(sols.size() == 1); // the all-star row: satisfiable
    CHECK(g.is_solution(red.lift(sols[0])));
}

TEST_CASE("the subproblem family reduces and lifts") {
    auto p = family_instance(6);
    auto red = reduce_to_classic(p, 1);
    CHECK(hypergraph_of(red.classic()) == hypergraph_of(p));
    auto ic = std::dynamic_pointer_cast<const TableConstraint>(
        red.classic().constraints()[0]);
    REQUIRE(ic);
    CHECK(ic->rows().size() == 15); // C(6,4)
    auto sols = enum_solutions(red.classic()).solutions;
    CHECK(sols.size() == 15);
    for (const auto& s : sols)
        CHECK(p.is_solution(red.lift(s)));
}

TEST_CASE("random instances: reduction preserves satisfiability and shape") {
    std::mt19937_64 rng(0x7edu);
    for (int it = 0; it < 80; ++it) {
        CspInstance p = random_pac_instance(rng);
        ClassicReduction red = reduce_to_classic(p, 2);
        CHECK(hypergraph_of(red.classic()) == hypergraph_of(p));
        for (const auto& c : red.classic().constraints())
            CHECK(c->kind() == ConstraintKind::table);
        CHECK(lifts_to_solution(red));
    }
}

TEST_CASE("non-PAC constraints block the reduction") {
    auto d = dom({"a", "b"});
    std::map<Value, CardinalitySet> card{
        {val("a"), CardinalitySet::explicit_set({0, 2})},
        {val("b"), CardinalitySet::interval(0, 3)},
    };
    auto g = std::make_shared<EgcConstraint>("G", vars({"x1", "x2", "x3"}),
                                             std::vector<std::vector<Value>>{d, d, d},
                                             card);
    CspInstance p({{V("x1"), d}, {V("x2"), d}, {V("x3"), d}}, {g});
    CHECK_THROWS_AS(reduce_to_classic(p, 2), CapabilityError);
}

TEST_CASE("back-door augmentation preserves solutions and the hypergraph") {
    auto b = dom({"0", "1"});
    auto t1 = table("T1", {"x", "y"}, {b, b}, {{"0", "0"}, {"1", "1"}});
    auto t2 = table("T2", {"y"}, {b}, {{"1"}});

    auto finder = [](const ConstraintPtr& c) { return BackDoorSpec::full_scope(c); };
    auto flagged = [](const ConstraintPtr& c) { return c->label() != "C3"; };

    SUBCASE("the foreign constraint keeps its pruning power") {
        auto c3 = table("C3", {"x", "y"}, {b, b}, {{"0", "0"}, {"0", "1"}});
        CspInstance p({{V("x"), b}, {V("y"), b}}, {t1, t2, c3});
        CspInstance q = reduce_backdoors(p, flagged, finder, 2);
        CHECK(hypergraph_of(q) == hypergraph_of(p));
        CHECK(is_pac_instance(q));
        CHECK(as_set(enum_solutions(q).solutions) == as_set(brute_force_solutions(p)));
        CHECK(brute_force_solutions(p).empty()); // C3 kills the only candidate
    }

    SUBCASE("a satisfiable variant") {
        auto c3 = table("C3", {"x", "y"}, {b, b}, {{"0", "1"}, {"1", "1"}});
        CspInstance p({{V("x"), b}, {V("y"), b}}, {t1, t2, c3});
        CspInstance q = reduce_backdoors(p, flagged, finder, 2);
        CHECK(is_pac_instance(q));
        CHECK(as_set(enum_solutions(q).solutions) == as_set(brute_force_solutions(p)));
        CHECK(enum_solutions(q).solutions.size() == 1);
    }

    SUBCASE("back-door variables outside the PAC cover get padded") {
        auto tx = table("TX", {"x"}, {b}, {{"1"}});
        auto c3 = table("C3", {"a", "x"}, {b, b}, {{"0", "1"}});
        CspInstance p({{V("x"), b}, {V("a"), b}}, {tx, c3});
        CspInstance q = reduce_backdoors(p, flagged, finder, 2);
        CHECK(hypergraph_of(q) == hypergraph_of(p));
        CHECK(is_pac_instance(q));
        CHECK(as_set(enum_solutions(q).solutions) == as_set(brute_force_solutions(p)));
    }

    SUBCASE("everything already PAC returns the instance untouched") {
        CspInstance p({{V("x"), b}, {V("y"), b}}, {t1, t2});
        CspInstance q = reduce_backdoors(
            p, [](const ConstraintPtr&) { return true; }, finder, 2);
        CHECK(q.constraints() == p.constraints());
    }

    SUBCASE("a missing decider is a capability error") {
        auto c3 = table("C3", {"x", "y"}, {b, b}, {{"1", "1"}});
        CspInstance p({{V("x"), b}, {V("y"), b}}, {t1, t2, c3});
        auto no_door = [](const ConstraintPtr&) { return BackDoorSpec{}; };
        CHECK_THROWS_AS(reduce_backdoors(p, flagged, no_door, 2), CapabilityError);
        auto throwing = [](const ConstraintPtr&) -> BackDoorSpec {
            throw ValidationError("nope");
        };
        CHECK_THROWS_AS(reduce_backdoors(p, flagged, throwing, 2), CapabilityError);
    }
}

TEST_CASE("back-door covers respect the size cap") {
    auto b = dom({"0", "1"});
    std::vector<std::pair<VariableId, std::vector<Value>>> domains{{V("x"), b}};
    std::vector<std::string> names{"x"};
    std::vector<std::vector<Value>> doms{b};
    std::vector<std::string> row{"0"};
    for (int i = 1; i <= 7; ++i) {
        names.push_back("a" + std::to_string(i));
        domains.emplace_back(V(names.back()), b);
        doms.push_back(b);
        row.push_back("0");
    }
    auto t1 = table("T1", {"x"}, {b}, {{"0"}, {"1"}});
    auto c = table("C", names, doms, {row});
    CspInstance p(domains, {t1, c});
    REQUIRE(instance_size(p) == 43); // 2 * 128 candidate rows exceed 43^1

    auto finder = [](const ConstraintPtr& q) { return BackDoorSpec::full_scope(q); };
    auto flagged = [](const ConstraintPtr& q) { return q->label() == "T1"; };
    try {
        reduce_backdoors(p, flagged, finder, 1);
        FAIL("expected SparsityError");
    } catch (const SparsityError& e) {
        CHECK(e.constraint_label == "C");
    }
    CHECK_NOTHROW(reduce_backdoors(p, flagged, finder, 2));
}

TEST_CASE("subproblem constraints behave like the conjunction of their parts") {
    auto d = dom({"a", "b"});
    auto g = std::make_shared<EgcConstraint>(
        "G", vars({"x1", "x2", "x3"}), std::vector<std::vector<Value>>{d, d, d},
        std::map<Value, CardinalitySet>{{val("a"), CardinalitySet::interval(1, 1)},
                                        {val("b"), CardinalitySet::interval(0, 3)}});
    auto tx = table("TX", {"x1"}, {d}, {{"b"}});
    auto sp = std::make_shared<SubproblemConstraint>("SP",
                                                     std::vector<ConstraintPtr>{g, tx});

    CHECK(sp->kind() == ConstraintKind::subproblem);
    CHECK(sp->scope() == vars({"x1", "x2", "x3"}));
    CHECK(sp->description_size() == g->description_size() + tx->description_size());
    CHECK(sp->has_pac());

    CspInstance grouped({{V("x1"), d}, {V("x2"), d}, {V("x3"), d}}, {sp});
    CspInstance flat({{V("x1"), d}, {V("x2"), d}, {V("x3"), d}}, {g, tx});
    CHECK(as_set(enum_solutions(grouped).solutions) ==
          as_set(brute_force_solutions(flat)));
    CHECK(enum_solutions(grouped).solutions.size() == 2);

    CHECK(sp->pac_extends(Assignment::from_pairs({{V("x2"), val("a")}})));
    CHECK_FALSE(sp->pac_extends(Assignment::from_pairs({{V("x1"), val("a")}})));

    CHECK_THROWS_AS(SubproblemConstraint("E", {}), ValidationError);
    CHECK_THROWS_AS(SubproblemConstraint("E", {g, nullptr}), ValidationError);

    auto clash = table("TX2", {"x1"}, {dom({"a", "c"})}, {{"c"}});
    CHECK_THROWS_AS(SubproblemConstraint("E", {g, clash}), DomainError);
}

TEST_CASE("subproblem extension search respects the budget") {
    auto d = dom({"a", "b"});
    auto g = std::make_shared<EgcConstraint>(
        "G", vars({"x1", "x2", "x3"}), std::vector<std::vector<Value>>{d, d, d},
        std::map<Value, CardinalitySet>{{val("a"), CardinalitySet::interval(1, 1)},
                                        {val("b"), CardinalitySet::interval(0, 3)}});
    auto sp = std::make_shared<SubproblemConstraint>("SP",
                                                     std::vector<ConstraintPtr>{g});
    setenv("GLOBALCSP_BUDGET", "2", 1);
    CHECK_THROWS_AS(sp->pac_extends(Assignment{}), BudgetError);
    unsetenv("GLOBALCSP_BUDGET");
    CHECK(sp->pac_extends(Assignment{}));
}

TEST_CASE("subproblem unions merge domains and deduplicate constraints") {
    auto b = dom({"0", "1"});
    auto t1 = table("T1", {"x", "y"}, {b, b}, {{"0", "0"}, {"1", "1"}});
    auto t2 = table("T2", {"y"}, {b}, {{"1"}});
    CspInstance q1({{V("x"), b}, {V("y"), b}}, {t1});
    CspInstance q2({{V("y"), b}}, {t2});
    CspInstance u = subproblem_union(q1, q2);
    CHECK(u.variables() == vars({"x", "y"}));
    CHECK(u.constraints().size() == 2);

    CspInstance again = subproblem_union(u, q1); // t1 occurs in both operands
    CHECK(again.constraints().size() == 2);

    CspInstance clash({{V("y"), dom({"1", "2"})}},
                      {table("T3", {"y"}, {dom({"1", "2"})}, {{"1"}})});
    CHECK_THROWS_AS(subproblem_union(q1, clash), DomainError);
}

TEST_CASE("decompositions must be proper") {
    auto b = dom({"0", "1"});
    auto t1 = table("T1", {"x", "y"}, {b, b}, {{"0", "0"}, {"1", "1"}});
    auto t2 = table("T2", {"y"}, {b}, {{"1"}});
    CspInstance q1({{V("x"), b}, {V("y"), b}}, {t1});
    CspInstance q2({{V("y"), b}}, {t2});
    CspInstance whole({{V("x"), b}, {V("y"), b}}, {t1, t2});

    CHECK_NOTHROW(validate_decomposition({{q1, q2}}));
    CHECK_THROWS_AS(validate_decomposition({{q1, whole}}), ValidationError);
    CHECK_THROWS_AS(validate_decomposition({{q1, q1}}), ValidationError);
    CHECK_THROWS_AS(validate_decomposition({{}}), ValidationError);
    CHECK_THROWS_AS(decomposition_union({{}}), ValidationError);

    CspInstance u = decomposition_union({{q1, q2}});
    CHECK(as_set(brute_force_solutions(u)) ==
          as_set(brute_force_solutions(whole)));
}

TEST_CASE("reducing a decomposition matches reducing the union") {
    auto b = dom({"0", "1"});
    auto t1 = table("T1", {"x", "y"}, {b, b}, {{"0", "0"}, {"1", "1"}});
    auto t2 = table("T2", {"y"}, {b}, {{"1"}});
    CspInstance q1({{V("x"), b}, {V("y"), b}}, {t1});
    CspInstance q2({{V("y"), b}}, {t2});
    CspInstance whole({{V("x"), b}, {V("y"), b}}, {t1, t2});

    auto by_parts = reduce_decomposition_to_classic({{q1, q2}}, 2);
    auto direct = reduce_to_classic(whole, 2);
    CHECK(hypergraph_of(by_parts.classic()) == hypergraph_of(direct.classic()));
    CHECK(as_set(enum_solutions(by_parts.classic()).solutions) ==
          as_set(enum_solutions(direct.classic()).solutions));

    auto sols = enum_solutions(by_parts.classic()).solutions;
    REQUIRE(sols.size() == 1);
    CHECK(whole.is_solution(by_parts.lift(sols[0])));
}
