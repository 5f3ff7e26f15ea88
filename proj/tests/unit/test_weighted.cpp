#include <doctest.h>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/weighted.hpp"

#include "helpers.hpp"

using namespace gcsp;
using namespace gcsp::test;

namespace {

std::shared_ptr<const WeightedTable>
wtable(const std::string& label, const std::vector<std::string>& names,
       const std::vector<std::vector<Value>>& domains,
       const std::vector<std::vector<std::string>>& row_texts,
       const std::vector<std::string>& cost_texts) {
    VarList scope;
    for (const auto& n : names)
        scope.push_back(VariableId::of(n));
    std::vector<std::vector<Value>> rows;
    for (const auto& r : row_texts) {
        std::vector<Value> row;
        for (const auto& t : r)
            row.push_back(Value::of(t));
        rows.push_back(std::move(row));
    }
    std::vector<Rational> costs;
    for (const auto& c : cost_texts)
        costs.push_back(Rational::parse(c));
    return std::make_shared<WeightedTable>(label, scope, domains, rows, costs);
}

Assignment asg(const std::vector<std::pair<std::string, std::string>>& pairs) {
    std::vector<Assignment::Binding> bs;
    for (const auto& [n, v] : pairs)
        bs.emplace_back(VariableId::of(n), Value::of(v));
    return Assignment::from_pairs(std::move(bs));
}

// exhaustive reference optimum
std::optional<Rational> optimum_by_hand(const WcspInstance& P) {
    std::optional<Rational> best;
    for (const auto& s : brute_force_solutions(P.base())) {
        Rational c = wcost(P, s);
        if (!best || c < *best)
            best = c;
    }
    return best;
}

} // namespace

TEST_CASE("rational arithmetic stays normalized") {
    CHECK(Rational::parse("2/6").str() == "1/3");
    CHECK(Rational::parse("-4/8").str() == "-1/2");
    CHECK(Rational::parse("3").str() == "3");
    CHECK(Rational::parse("-0/5") == Rational(0));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(-1, 2) + Rational(1, 2) == Rational(0));
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(7, 2).ceil() == 4);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK_THROWS_AS(Rational::parse("1/0"), ValidationError);
    CHECK_THROWS_AS(Rational::parse("one half"), ParseError);
    CHECK_THROWS_AS(Rational(1) / Rational(0), ValidationError);
}

TEST_CASE("weighted tables align costs with the normalized scope") {
    auto b = dom({"0", "1"});
    // scope handed over as (y, x); rows follow that order
    auto w = wtable("W", {"y", "x"}, {b, b}, {{"0", "1"}, {"1", "0"}}, {"5", "7"});
    CHECK(w->scope() == vars({"x", "y"}));
    CHECK(w->cost(asg({{"x", "1"}, {"y", "0"}})) == Rational(5));
    CHECK(w->cost(asg({{"x", "0"}, {"y", "1"}})) == Rational(7));
    CHECK_THROWS_AS(w->cost(asg({{"x", "0"}, {"y", "0"}})), ApplicabilityError);

    CHECK_THROWS_AS(WeightedTable("W", vars({"x"}), {b},
                                  {{val("0")}, {val("0")}},
                                  {Rational(1), Rational(2)}),
                    ValidationError); // ambiguous duplicate row
    CHECK_THROWS_AS(WeightedTable("W", vars({"x"}), {b}, {{val("0")}},
                                  {Rational(1), Rational(2)}),
                    ValidationError); // row/cost count mismatch
}

TEST_CASE("weighted PAC and minimum-cost extension on a unary table") {
    auto b = dom({"0", "1"});
    auto w = wtable("W", {"x"}, {b}, {{"0"}, {"1"}}, {"1", "1/3"});
    CHECK(w->has_weighted_pac());
    CHECK(w->weighted_pac(Assignment{}, Rational(1, 2)));
    CHECK_FALSE(w->weighted_pac(Assignment{}, Rational(1, 4)));
    CHECK_FALSE(w->weighted_pac(asg({{"x", "0"}}), Rational(1, 2)));
    CHECK(w->weighted_pac(asg({{"x", "0"}}), Rational(1)));

    CHECK(w->min_cost_extension(Assignment{}) == Rational(1, 3));
    CHECK(w->min_cost_extension(asg({{"x", "0"}})) == Rational(1));

    auto only1 = wtable("W1", {"x"}, {b}, {{"1"}}, {"2"});
    CHECK(only1->min_cost_extension(asg({{"x", "0"}})) == std::nullopt);

    CHECK_THROWS_AS(w->weighted_pac(asg({{"z", "0"}}), Rational(1)), ScopeError);
    CHECK_THROWS_AS(w->min_cost_extension(asg({{"x", "7"}})), DomainError);
}

TEST_CASE("the cost of a solution sums the per-constraint costs") {
    auto b = dom({"0", "1"});
    auto w1 = wtable("W1", {"x"}, {b}, {{"0"}, {"1"}}, {"0", "1/2"});
    auto w2 = wtable("W2", {"x"}, {b}, {{"1"}}, {"1/3"});
    WcspInstance p({{V("x"), b}}, {w1, w2});
    CHECK(wcost(p, asg({{"x", "1"}})) == Rational(5, 6));
    CHECK_THROWS_AS(wcost(p, asg({{"x", "0"}})), ApplicabilityError);

    auto neg = wtable("N", {"x"}, {b}, {{"1"}}, {"-1/2"});
    auto pos = wtable("P", {"x"}, {b}, {{"1"}}, {"1/2"});
    WcspInstance q({{V("x"), b}}, {neg, pos});
    CHECK(wcost(q, asg({{"x", "1"}})) == Rational(0));

    CHECK(wcsp_size(p) > 0);
}

TEST_CASE("the zero-cost wrapper delegates to the base constraint") {
    auto g = egc3_instance().constraints()[0];
    auto z = zero_cost(g);
    CHECK(z->is_zero_cost());
    CHECK(z->has_weighted_pac());
    Assignment sol = asg({{"x1", "a"}, {"x2", "b"}, {"x3", "b"}});
    CHECK(z->cost(sol) == Rational(0));
    CHECK_THROWS_AS(z->cost(asg({{"x1", "a"}, {"x2", "a"}, {"x3", "a"}})),
                    ApplicabilityError);
    CHECK(z->weighted_pac(asg({{"x1", "a"}}), Rational(0)));
    CHECK_FALSE(z->weighted_pac(asg({{"x1", "a"}}), Rational(-1)));
    CHECK(z->min_cost_extension(asg({{"x1", "b"}})) == Rational(0));
    CHECK(z->min_cost_extension(asg({{"x1", "a"}, {"x2", "a"}})) == std::nullopt);

    auto b = dom({"0", "1"});
    auto w = wtable("W", {"x"}, {b}, {{"0"}}, {"1"});
    CHECK_FALSE(w->is_zero_cost());
}

TEST_CASE("weighted projection keeps the cheapest extension") {
    auto b = dom({"0", "1"});
    auto w = wtable("W", {"x", "y"}, {b, b},
                    {{"0", "0"}, {"0", "1"}, {"1", "1"}}, {"3", "1", "2"});

    CHECK(weighted_project(w, vars({"x", "y"})).get() == w.get()); // identity

    auto pw = weighted_project(w, vars({"x"}));
    CHECK(pw->scope() == vars({"x"}));
    CHECK(pw->cost(asg({{"x", "0"}})) == Rational(1));
    CHECK(pw->cost(asg({{"x", "1"}})) == Rational(2));
    CHECK(pw->has_weighted_pac());
    CHECK(pw->weighted_pac(asg({{"x", "0"}}), Rational(1)));
    CHECK_FALSE(pw->weighted_pac(asg({{"x", "0"}}), Rational(1, 2)));
    CHECK(pw->min_cost_extension(asg({{"x", "1"}})) == Rational(2));
    CHECK(pw->min_cost_extension(Assignment{}) == Rational(1));
    CHECK_THROWS_AS(pw->weighted_pac(asg({{"y", "0"}}), Rational(5)), ScopeError);
    CHECK_THROWS_AS(pw->min_cost_extension(asg({{"y", "0"}})), ScopeError);
    CHECK(pw->description_size() > 0);
}

TEST_CASE("instance-level weighted projection mirrors pj_X") {
    auto b = dom({"0", "1"});
    auto wa = wtable("A", {"x", "y"}, {b, b},
                     {{"0", "0"}, {"0", "1"}, {"1", "1"}}, {"3", "1", "2"});
    auto wb = wtable("B", {"y", "z"}, {b, b}, {{"0", "0"}, {"1", "0"}}, {"0", "1/2"});
    WcspInstance p({{V("x"), b}, {V("y"), b}, {V("z"), b}}, {wa, wb});

    WcspInstance px = project_wcsp(p, vars({"x"}));
    CHECK(px.constraints().size() == 1); // B's scope misses x entirely
    CHECK(px.base().variables() == vars({"x"}));

    WcspInstance py = project_wcsp(p, vars({"y"}));
    CHECK(py.constraints().size() == 2);

    CHECK_THROWS_AS(project_wcsp(p, {}), ScopeError);
    CHECK_THROWS_AS(project_wcsp(p, vars({"unknown"})), ScopeError);
}

TEST_CASE("black-box weighted constraints recover minima by bisection") {
    auto b = dom({"0", "1"});
    auto base = table("BB", {"x", "y"}, {b, b},
                      {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}});
    std::map<std::pair<std::string, std::string>, Rational> cost_map{
        {{"0", "0"}, Rational(3, 4)},
        {{"0", "1"}, Rational(-1, 4)},
        {{"1", "0"}, Rational(1, 2)},
        {{"1", "1"}, Rational(0)},
    };
    auto cost_of = [cost_map](const Assignment& theta) {
        return cost_map.at({std::string(theta.at(V("x")).text()),
                            std::string(theta.at(V("y")).text())});
    };
    auto oracle = [cost_map](const Assignment& theta, const Rational& k) {
        for (const auto& [row, c] : cost_map) {
            Assignment full = asg({{"x", row.first}, {"y", row.second}});
            if (full.extends(theta) && c <= k)
                return true;
        }
        return false;
    };
    BlackBoxWeighted bb(base, cost_of, oracle, 4, Rational(-1), Rational(1));

    auto reference = wtable("R", {"x", "y"}, {b, b},
                            {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}},
                            {"3/4", "-1/4", "1/2", "0"});
    std::vector<Assignment> partials = {
        Assignment{},          asg({{"x", "0"}}),          asg({{"x", "1"}}),
        asg({{"y", "0"}}),     asg({{"y", "1"}}),          asg({{"x", "0"}, {"y", "0"}}),
        asg({{"x", "1"}, {"y", "1"}}),
    };
    for (const auto& theta : partials) {
        CHECK(bb.min_cost_extension(theta) == reference->min_cost_extension(theta));
        for (const auto& k : {Rational(-1, 2), Rational(0), Rational(1, 4)})
            CHECK(bb.weighted_pac(theta, k) == reference->weighted_pac(theta, k));
    }
    CHECK(bb.cost(asg({{"x", "0"}, {"y", "0"}})) == Rational(3, 4));

    BlackBoxWeighted clipped(base, cost_of, oracle, 4, Rational(-1), Rational(-1, 2));
    CHECK(clipped.min_cost_extension(asg({{"x", "0"}})) == std::nullopt);

    BlackBoxWeighted no_grid(base, cost_of, oracle, 0, Rational(-1), Rational(1));
    CHECK_THROWS_AS(no_grid.min_cost_extension(Assignment{}), CapabilityError);
    CHECK(no_grid.weighted_pac(Assignment{}, Rational(0)));

    CHECK_THROWS_AS(BlackBoxWeighted(base, nullptr, oracle, 4, Rational(0), Rational(1)),
                    ValidationError);
    CHECK_THROWS_AS(BlackBoxWeighted(base, cost_of, oracle, -2, Rational(0), Rational(1)),
                    ValidationError);
    CHECK_THROWS_AS(BlackBoxWeighted(base, cost_of, oracle, 4, Rational(1), Rational(0)),
                    ValidationError);
}

TEST_CASE("tree-DP optima match exhaustive search") {
    std::mt19937_64 rng(0x3c0deu);
    static const std::vector<std::string> texts{"0", "1", "2"};
    int unsat_seen = 0;
    for (int it = 0; it < 60; ++it) {
        std::size_t n = 2 + rng() % 3;
        std::vector<std::pair<VariableId, std::vector<Value>>> domains;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Value> d;
            for (std::size_t j = 0; j <= rng() % 3; ++j)
                d.push_back(val(texts[j]));
            domains.emplace_back(V("q" + std::to_string(i)), d);
        }
        std::vector<WeightedPtr> ws;
        std::size_t count = 1 + rng() % 3;
        std::set<VariableId> covered;
        for (std::size_t ci = 0; ci < count || covered.size() < n; ++ci) {
            std::set<std::size_t> pick{ci % n};
            if (rng() % 2)
                pick.insert(rng() % n);
            VarList scope;
            std::vector<std::vector<Value>> doms;
            for (std::size_t i : pick) {
                scope.push_back(domains[i].first);
                covered.insert(domains[i].first);
            }
            scope = sorted_vars(scope);
            for (VariableId v : scope)
                for (const auto& [var, d] : domains)
                    if (var == v)
                        doms.push_back(d);
            std::vector<std::vector<Value>> rows;
            std::vector<std::size_t> odo(scope.size(), 0);
            while (true) {
                if (rng() % 5) {
                    std::vector<Value> r;
                    for (std::size_t i = 0; i < scope.size(); ++i)
                        r.push_back(doms[i][odo[i]]);
                    rows.push_back(std::move(r));
                }
                std::size_t i = scope.size();
                bool done = true;
                while (i > 0) {
                    --i;
                    if (++odo[i] < doms[i].size()) { done = false; break; }
                    odo[i] = 0;
                }
                if (done)
                    break;
            }
            if (rows.empty() && rng() % 4 != 0) { // usually repair, sometimes
                std::vector<Value> r;             // keep the dead constraint
                for (std::size_t i = 0; i < scope.size(); ++i)
                    r.push_back(doms[i][0]);
                rows.push_back(std::move(r));
            }
            std::vector<Rational> costs;
            for (std::size_t i = 0; i < rows.size(); ++i)
                costs.emplace_back(static_cast<long long>(rng() % 17) - 8,
                                   1 + static_cast<long long>(rng() % 8));
            ws.push_back(std::make_shared<WeightedTable>(
                "w" + std::to_string(ws.size()), scope, doms, rows, costs));
        }
        WcspInstance p(domains, ws);
        WcspResult r = wcsp_optimal(p);
        auto expect = optimum_by_hand(p);
        CHECK(r.optimal == expect);
        if (!expect) {
            ++unsat_seen;
            CHECK_FALSE(r.argmin.has_value());
            CHECK_FALSE(wcsp_decision(p, Rational(1000)));
        } else {
            REQUIRE(r.argmin.has_value());
            CHECK(p.base().is_solution(*r.argmin));
            CHECK(wcost(p, *r.argmin) == *expect);
            CHECK(wcsp_decision(p, *expect));
            CHECK_FALSE(wcsp_decision(p, *expect - Rational(1, 1000)));
        }
    }
    CHECK(unsat_seen > 0);
}

TEST_CASE("non-table instances fall back to exhaustive optimization") {
    auto d = dom({"a", "b"});
    auto g = egc3_instance().constraints()[0];
    auto prefer_b = wtable("PB", {"x1"}, {d}, {{"a"}, {"b"}}, {"1", "0"});
    WcspInstance p({{V("x1"), d}, {V("x2"), d}, {V("x3"), d}},
                   {zero_cost(g), prefer_b});
    WcspResult r = wcsp_optimal(p);
    REQUIRE(r.optimal.has_value());
    CHECK(*r.optimal == Rational(0)); // put the single 'a' on x2 or x3
    CHECK(r.argmin->at(V("x1")) == val("b"));
    CHECK(optimum_by_hand(p) == r.optimal);
}

TEST_CASE("the weighted reduction preserves the optimum") {
    auto b = dom({"0", "1"});
    auto wa = wtable("A", {"x", "y"}, {b, b},
                     {{"0", "0"}, {"0", "1"}, {"1", "1"}}, {"2", "1", "2"});
    auto wb = wtable("B", {"y", "z"}, {b, b},
                     {{"0", "0"}, {"1", "0"}, {"1", "1"}}, {"1", "1/2", "3"});
    WcspInstance part0({{V("x"), b}, {V("y"), b}}, {wa});
    WcspInstance part1({{V("y"), b}, {V("z"), b}}, {wb});
    WeightedDecomposition S{{part0, part1}};

    auto red = reduce_weighted(S, 1000);
    const WcspInstance& classic = red.classic();
    CHECK(classic.base().domain_of(V("x")) == std::vector<Value>{Value::star()});
    CHECK(classic.base().domain_of(V("y")) == b);
    CHECK(classic.base().domain_of(V("z")) == std::vector<Value>{Value::star()});

    WcspInstance uni = weighted_decomposition_union(S);
    WcspResult direct = wcsp_optimal(uni);
    WcspResult reduced = wcsp_optimal(classic);
    REQUIRE(direct.optimal.has_value());
    REQUIRE(reduced.optimal.has_value());
    CHECK(*direct.optimal == Rational(3, 2));
    CHECK(*reduced.optimal == *direct.optimal);

    Assignment lifted = red.lift(*reduced.argmin);
    CHECK(uni.base().is_solution(lifted));
    CHECK(wcost(uni, lifted) == *direct.optimal);

    CHECK(wcsp_decision(classic, Rational(3, 2)));
    CHECK_FALSE(wcsp_decision(classic, Rational(3, 2) - Rational(1, 1000)));
}

TEST_CASE("the induced weighted table carries minimum completion costs") {
    auto b = dom({"0", "1"});
    auto wa = wtable("A", {"x", "y"}, {b, b}, {{"0", "1"}, {"1", "1"}}, {"2", "5"});
    auto wb = wtable("B", {"y"}, {b}, {{"0"}, {"1"}}, {"0", "0"});
    WcspInstance part0({{V("x"), b}, {V("y"), b}}, {wa});
    WcspInstance part1({{V("y"), b}}, {wb});
    WeightedDecomposition S{{part0, part1}};

    WeightedPtr wic = weighted_induced_constraint(S, 0, 1000);
    CHECK(wic->scope() == vars({"x", "y"}));
    Assignment row = Assignment::from_pairs({{V("x"), Value::star()}, {V("y"), val("1")}});
    CHECK(wic->cost(row) == Rational(2)); // the cheaper of the two completions

    CHECK_THROWS_AS(weighted_induced_constraint(S, 7, 1000), ValidationError);
}

TEST_CASE("weighted decompositions must not share cost constraints") {
    auto b = dom({"0", "1"});
    auto wa = wtable("A", {"x"}, {b}, {{"0"}, {"1"}}, {"0", "1"});
    WcspInstance p1({{V("x"), b}}, {wa});
    WcspInstance p2({{V("x"), b}}, {wa});
    CHECK_THROWS_AS(reduce_weighted({{p1, p2}}, 1000), ValidationError);
    CHECK_THROWS_AS(reduce_weighted({{}}, 1000), ValidationError);

    WcspInstance clash({{V("x"), dom({"1", "2"})}},
                       {wtable("C", {"x"}, {dom({"1", "2"})}, {{"1"}}, {"0"})});
    CHECK_THROWS_AS(wcsp_union(p1, clash), DomainError);
}

TEST_CASE("the weighted sparsity cap refuses oversized induced tables") {
    auto b = dom({"0", "1"});
    auto wa = wtable("A", {"x", "y"}, {b, b},
                     {{"0", "0"}, {"0", "1"}, {"1", "0"}, {"1", "1"}},
                     {"0", "0", "0", "0"});
    auto wb = wtable("B", {"y"}, {b}, {{"0"}, {"1"}}, {"0", "0"});
    WcspInstance part0({{V("x"), b}, {V("y"), b}}, {wa});
    WcspInstance part1({{V("y"), b}}, {wb});
    WeightedDecomposition S{{part0, part1}};
    try {
        reduce_weighted(S, 2); // sol(pj_y) has two rows, cap of 2 refuses
        FAIL("expected SparsityError");
    } catch (const SparsityError& e) {
        CHECK(e.constraint_label == "sub0");
    }
    CHECK_NOTHROW(reduce_weighted(S, 3));
}
