#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "globalcsp/apps.hpp"
#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/structure.hpp"

#include "helpers.hpp"

using namespace gcsp;
using namespace gcsp::test;

namespace {

Hypergraph hg(const std::vector<std::string>& names,
              const std::vector<std::vector<std::string>>& edges) {
    std::vector<VarList> es;
    for (const auto& e : edges)
        es.push_back(vars(e));
    return Hypergraph(vars(names), es);
}

Hypergraph triangle() { return hg({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}}); }

Hypergraph cycle5() {
    return hg({"v1", "v2", "v3", "v4", "v5"},
              {{"v1", "v2"}, {"v2", "v3"}, {"v3", "v4"}, {"v4", "v5"}, {"v1", "v5"}});
}

Hypergraph k4() {
    return hg({"a", "b", "c", "d"},
              {{"a", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "d"}});
}

Hypergraph star3() { return hg({"c", "l1", "l2", "l3"}, {{"c", "l1"}, {"c", "l2"}, {"c", "l3"}}); }

// Exhaustive reference: minimum over all n! elimination orders of the largest
// bag met while eliminating on the primal graph.
std::size_t tw_all_orders(const Hypergraph& G) {
    const auto& verts = G.vertices();
    const std::size_t n = verts.size();
    std::vector<std::vector<bool>> base(n, std::vector<bool>(n, false));
    auto index = [&](VariableId v) {
        return static_cast<std::size_t>(
            std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
    };
    for (const auto& e : G.edges())
        for (VariableId u : e)
            for (VariableId w : e)
                if (!(u == w)) {
                    base[index(u)][index(w)] = true;
                    base[index(w)][index(u)] = true;
                }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    std::size_t best = n == 0 ? 0 : n - 1;
    do {
        auto adj = base;
        std::vector<bool> alive(n, true);
        std::size_t width = 0;
        for (std::size_t v : perm) {
            std::vector<std::size_t> nbrs;
            for (std::size_t u = 0; u < n; ++u)
                if (alive[u] && adj[v][u])
                    nbrs.push_back(u);
            width = std::max(width, nbrs.size());
            for (std::size_t a : nbrs)
                for (std::size_t b : nbrs)
                    if (a != b)
                        adj[a][b] = true;
            alive[v] = false;
            if (width >= best)
                break;
        }
        best = std::min(best, width);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Hypergraph random_graph(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        names.push_back("n" + std::to_string(i));
    std::vector<std::vector<std::string>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng() % 100 < 55)
                edges.push_back({names[i], names[j]});
    if (edges.empty())
        edges.push_back({names[0], names[1 % n]});
    if (rng() % 2 && n >= 3) { // throw in one ternary hyperedge
        std::set<std::size_t> pick;
        while (pick.size() < 3)
            pick.insert(rng() % n);
        std::vector<std::string> e;
        for (std::size_t i : pick)
            e.push_back(names[i]);
        edges.push_back(e);
    }
    return hg(names, edges);
}

} // namespace

TEST_CASE("tree decomposition width and validation") {
    TreeDecomposition empty;
    CHECK(empty.width() == 0);

    TreeDecomposition one{{vars({"a", "b", "c"})}, {}};
    CHECK(one.width() == 2);
    CHECK(validate_tree_decomposition(triangle(), one));

    TreeDecomposition partial{{vars({"a", "b"}), vars({"b", "c"})}, {{0, 1}}};
    CHECK(partial.width() == 1);
    CHECK_FALSE(validate_tree_decomposition(triangle(), partial)); // {a,c} uncovered

    Hypergraph path = hg({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"a", "d"}});
    TreeDecomposition broken{{vars({"a", "b"}), vars({"b", "c"}), vars({"a", "d"})},
                             {{0, 1}, {1, 2}}};
    CHECK_FALSE(validate_tree_decomposition(path, broken)); // 'a' holders split

    TreeDecomposition good{{vars({"a", "b"}), vars({"b", "c"}), vars({"a", "d"})},
                           {{0, 1}, {0, 2}}};
    CHECK(validate_tree_decomposition(path, good));

    TreeDecomposition empty_bag{{vars({"a", "b", "c"}), {}}, {{0, 1}}};
    CHECK_FALSE(validate_tree_decomposition(triangle(), empty_bag));
}

TEST_CASE("malformed trees are rejected outright") {
    auto g = triangle();
    TreeDecomposition bad_index{{vars({"a", "b", "c"})}, {{0, 5}}};
    CHECK_THROWS_AS(validate_tree_decomposition(g, bad_index), ValidationError);

    TreeDecomposition loop{{vars({"a", "b", "c"}), vars({"a"})}, {{1, 1}}};
    CHECK_THROWS_AS(validate_tree_decomposition(g, loop), ValidationError);

    TreeDecomposition too_few{{vars({"a", "b"}), vars({"b", "c"}), vars({"a", "c"})},
                              {{0, 1}}};
    CHECK_THROWS_AS(validate_tree_decomposition(g, too_few), ValidationError);

    TreeDecomposition cyclic{{vars({"a", "b"}), vars({"b", "c"}), vars({"a", "c"})},
                             {{0, 1}, {1, 2}, {2, 0}}};
    CHECK_THROWS_AS(validate_tree_decomposition(g, cyclic), ValidationError);

    TreeDecomposition split{{vars({"a", "b"}), vars({"b", "c"}), vars({"a", "c"}),
                             vars({"a"})},
                            {{0, 1}, {0, 1}, {2, 3}}};
    CHECK_THROWS_AS(validate_tree_decomposition(g, split), ValidationError);
}

TEST_CASE("fractional and integral edge covers") {
    auto [value, cover] = fractional_edge_cover_number(triangle(), vars({"a", "b", "c"}));
    CHECK(value == Rational(3, 2));
    CHECK(cover.covered == vars({"a", "b", "c"}));
    for (const auto& w : cover.weights)
        CHECK(w == Rational(1, 2));

    CHECK(fractional_edge_cover_number(star3(), vars({"c", "l1", "l2", "l3"})).value ==
          Rational(3));
    CHECK(fractional_edge_cover_number(hg({"a", "b"}, {{"a", "b"}}), vars({"a", "b"}))
              .value == Rational(1));
    CHECK(fractional_edge_cover_number(k4(), vars({"a", "b", "c", "d"})).value ==
          Rational(2));

    CHECK(edge_cover_number(triangle(), vars({"a", "b", "c"})).first == 2);
    CHECK(edge_cover_number(star3(), vars({"c", "l1", "l2", "l3"})).first == 3);
    CHECK(edge_cover_number(triangle(), vars({"a", "b"})).first == 1);

    CHECK_THROWS_AS(fractional_edge_cover_number(triangle(), {}), ScopeError);
    CHECK_THROWS_AS(edge_cover_number(triangle(), {}), ScopeError);
    CHECK_THROWS_AS(fractional_edge_cover_number(triangle(), vars({"zz"})),
                    ValidationError);

    Hypergraph isolated = hg({"a", "b", "c"}, {{"a", "b"}});
    CHECK_THROWS_AS(fractional_edge_cover_number(isolated, vars({"a", "c"})),
                    InfeasibleError);
    CHECK_THROWS_AS(edge_cover_number(isolated, vars({"c"})), InfeasibleError);
}

TEST_CASE("every fractional cover is feasible and no heavier than the integral one") {
    std::mt19937_64 rng(0x57a7u);
    for (int it = 0; it < 25; ++it) {
        Hypergraph g = random_graph(rng, 3 + rng() % 4);
        VarList X = g.vertices();
        auto frac = fractional_edge_cover_number(g, X);
        auto integral = edge_cover_number(g, X);
        CHECK(frac.value <= Rational(static_cast<long long>(integral.first)));
        for (const auto& v : X) {
            Rational covered(0);
            for (std::size_t j = 0; j < g.edges().size(); ++j)
                if (contains_var(g.edges()[j], v))
                    covered += frac.cover.weights[j];
            CHECK(covered >= Rational(1));
        }
    }
}

TEST_CASE("exact treewidth on the stock examples") {
    auto single = hg({"a", "b"}, {{"a", "b"}});
    CHECK(treewidth_exact(single).value == Rational(1));
    CHECK(treewidth_exact(cycle5()).value == Rational(2));
    CHECK(treewidth_exact(k4()).value == Rational(3));
    CHECK(treewidth_exact(star3()).value == Rational(1));
    CHECK(treewidth_exact(triangle()).value == Rational(2));

    for (const auto& g : {single, cycle5(), k4(), star3(), triangle()}) {
        auto report = treewidth_exact(g);
        CHECK(report.measure == "tw");
        CHECK(validate_width_report(g, report));
    }
}

TEST_CASE("treewidth DP agrees with trying all elimination orders") {
    std::mt19937_64 rng(0x0adau);
    for (int it = 0; it < 30; ++it) {
        Hypergraph g = random_graph(rng, 4 + rng() % 3);
        auto report = treewidth_exact(g);
        CHECK(report.value ==
              Rational(static_cast<long long>(tw_all_orders(g))));
        CHECK(validate_width_report(g, report));
    }
}

TEST_CASE("width limits are enforced") {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> edges;
    for (int i = 0; i < 15; ++i)
        names.push_back("w" + std::to_string(i));
    for (int i = 0; i + 1 < 15; ++i)
        edges.push_back({names[i], names[i + 1]});
    Hypergraph big = hg(names, edges);
    CHECK_THROWS_AS(treewidth_exact(big), BudgetError);
    CHECK_THROWS_AS(ghw_and_fhw_exact_small(big, CoverMeasure::rho), BudgetError);
    CHECK_NOTHROW(treewidth_exact(big, 15));
}

TEST_CASE("generalized and fractional hypertree width on the stock examples") {
    auto gh = ghw_and_fhw_exact_small(triangle(), CoverMeasure::rho);
    CHECK(gh.measure == "ghw");
    CHECK(gh.value == Rational(2));
    CHECK(validate_width_report(triangle(), gh));

    auto fh = ghw_and_fhw_exact_small(triangle(), CoverMeasure::rho_star);
    CHECK(fh.measure == "fhw");
    CHECK(fh.value == Rational(3, 2));
    CHECK(validate_width_report(triangle(), fh));

    auto single = hg({"a", "b"}, {{"a", "b"}});
    CHECK(ghw_and_fhw_exact_small(single, CoverMeasure::rho).value == Rational(1));
    CHECK(ghw_and_fhw_exact_small(single, CoverMeasure::rho_star).value == Rational(1));
}

TEST_CASE("the CGP encoding hypergraph has ghw 2 and treewidth at least 4") {
    Hypergraph g = hypergraph_of(encode_cgp(cycle_graph(5), 3, 2));
    CHECK(g.num_vertices() == 10);
    CHECK(g.num_edges() == 7); // two cardinality edges + five ternary ones

    auto tw = treewidth_exact(g);
    CHECK(tw.value >= Rational(4)); // some bag swallows a five-variable edge
    CHECK(validate_width_report(g, tw));

    auto gh = ghw_and_fhw_exact_small(g, CoverMeasure::rho);
    CHECK(gh.value == Rational(2));
    CHECK(validate_width_report(g, gh));

    auto fh = ghw_and_fhw_exact_small(g, CoverMeasure::rho_star);
    CHECK(fh.value <= gh.value);
    CHECK(validate_width_report(g, fh));
}

TEST_CASE("3-colourability encodings are width one") {
    for (const auto& graph : {complete_graph(3), cycle_graph(5)}) {
        Hypergraph g = hypergraph_of(encode_3col(graph));
        CHECK(ghw_and_fhw_exact_small(g, CoverMeasure::rho).value == Rational(1));
        CHECK(ghw_and_fhw_exact_small(g, CoverMeasure::rho_star).value == Rational(1));
    }
}

TEST_CASE("the width hierarchy holds on every hypergraph we compute") {
    std::vector<Hypergraph> graphs = {
        triangle(), cycle5(), k4(), star3(), hg({"a", "b"}, {{"a", "b"}}),
        hypergraph_of(encode_cgp(cycle_graph(5), 3, 2)),
        hypergraph_of(encode_3col(complete_graph(3))),
        hypergraph_of(encode_3col(cycle_graph(5))),
    };
    std::mt19937_64 rng(0x1e1au);
    for (int it = 0; it < 10; ++it)
        graphs.push_back(random_graph(rng, 3 + rng() % 4));

    for (const auto& g : graphs) {
        auto tw = treewidth_exact(g);
        auto gh = ghw_and_fhw_exact_small(g, CoverMeasure::rho);
        auto fh = ghw_and_fhw_exact_small(g, CoverMeasure::rho_star);
        CHECK(fh.value <= gh.value);
        CHECK(gh.value <= tw.value);
        CHECK(validate_width_report(g, tw));
        CHECK(validate_width_report(g, gh));
        CHECK(validate_width_report(g, fh));
    }
}

TEST_CASE("subw is reported as unsupported") {
    auto report = subw_report();
    CHECK(report.measure == "subw-unsupported");
    CHECK_FALSE(report.supported);
    CHECK(validate_width_report(triangle(), report));

    WidthReport fake = report;
    fake.measure = "subw";
    CHECK_FALSE(validate_width_report(triangle(), fake));
}

TEST_CASE("tampered reports fail validation") {
    auto report = treewidth_exact(triangle());
    report.value = Rational(1);
    CHECK_FALSE(validate_width_report(triangle(), report));

    auto gh = ghw_and_fhw_exact_small(triangle(), CoverMeasure::rho);
    gh.bag_covers.clear();
    CHECK_FALSE(validate_width_report(triangle(), gh));

    auto fh = ghw_and_fhw_exact_small(triangle(), CoverMeasure::rho_star);
    for (auto& cover : fh.bag_covers)
        for (auto& w : cover.weights)
            w = Rational(1, 4); // too light to cover anything
    CHECK_FALSE(validate_width_report(triangle(), fh));
}

TEST_CASE("min-fill produces valid decompositions no better than exact") {
    std::mt19937_64 rng(0xf111u);
    for (int it = 0; it < 25; ++it) {
        Hypergraph g = random_graph(rng, 4 + rng() % 3);
        TreeDecomposition td = min_fill_decomposition(g);
        CHECK(validate_tree_decomposition(g, td));
        CHECK(Rational(static_cast<long long>(td.width())) >=
              treewidth_exact(g).value);
    }
}

TEST_CASE("the solution-count bound is exact on classic instances") {
    CHECK(solution_bound(t1t2_instance()) == 14);

    auto b = dom({"0", "1"});
    std::vector<std::vector<std::string>> all2{{"0", "0"}, {"0", "1"},
                                               {"1", "0"}, {"1", "1"}};
    CspInstance tri({{V("a"), b}, {V("b"), b}, {V("c"), b}},
                    {table("ab", {"a", "b"}, {b, b}, all2),
                     table("bc", {"b", "c"}, {b, b}, all2),
                     table("ac", {"a", "c"}, {b, b}, all2)});
    // |P| = 39 and rho* = 3/2: the bound is the smallest t with t^2 >= 39^3
    CHECK(solution_bound(tri) == 244);
    CHECK(brute_force_solutions(tri).size() == 8);

    CHECK_THROWS_AS(solution_bound(egc3_instance()), ApplicabilityError);
}

TEST_CASE("random classic instances respect the solution-count bound") {
    std::mt19937_64 rng(0xb0b0u);
    static const std::vector<std::string> texts{"0", "1", "2"};
    for (int it = 0; it < 40; ++it) {
        std::size_t n = 2 + rng() % 3;
        std::vector<std::pair<VariableId, std::vector<Value>>> domains;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<Value> d;
            for (std::size_t j = 0; j <= rng() % 3; ++j)
                d.push_back(val(texts[j]));
            domains.emplace_back(V("q" + std::to_string(i)), d);
        }
        std::vector<ConstraintPtr> cs;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = (i + 1 + rng() % (n - 1)) % n;
            VarList scope = sorted_vars({domains[i].first, domains[j].first});
            std::vector<std::vector<Value>> doms;
            for (VariableId v : scope)
                for (const auto& [var, d] : domains)
                    if (var == v)
                        doms.push_back(d);
            std::vector<std::vector<Value>> rows;
            for (const auto& x : doms[0])
                for (const auto& y : doms[1])
                    if (rng() % 3)
                        rows.push_back({x, y});
            if (rows.empty())
                rows.push_back({doms[0][0], doms[1][0]});
            cs.push_back(std::make_shared<TableConstraint>("t" + std::to_string(i),
                                                           scope, doms, rows));
        }
        CspInstance p(domains, cs);
        CHECK(BigInt(brute_force_solutions(p).size()) <= solution_bound(p));
    }
}
