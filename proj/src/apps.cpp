#include "globalcsp/apps.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "globalcsp/errors.hpp"
#include "globalcsp/rational.hpp"
#include "globalcsp/symbols.hpp"

namespace gcsp {

namespace {

std::size_t vertex_index(const Graph& G, const std::string& name) {
    auto it = std::lower_bound(G.vertices.begin(), G.vertices.end(), name);
    if (it == G.vertices.end() || *it != name)
        throw ValidationError("unknown vertex '" + name + "'");
    return static_cast<std::size_t>(it - G.vertices.begin());
}

struct UnionFind {
    std::vector<std::size_t> parent, size;

    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) {
        for (std::size_t i = 0; i < n; ++i)
            parent[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size[a] < size[b])
            std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

} // namespace

Graph make_graph(std::vector<std::string> vertices,
                 std::vector<std::pair<std::string, std::string>> edges) {
    if (vertices.empty())
        throw ValidationError("graph requires at least one vertex");
    std::sort(vertices.begin(), vertices.end());
    if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
        throw ValidationError("duplicate vertex");

    Graph G;
    G.vertices = std::move(vertices);
    for (auto& [u, v] : edges) {
        if (u == v)
            throw ValidationError("self-loop at '" + u + "'");
        vertex_index(G, u);
        vertex_index(G, v);
        if (v < u)
            std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw ValidationError("duplicate edge");
    G.edges = std::move(edges);
    return G;
}

bool is_connected(const Graph& G) {
    UnionFind uf(G.vertices.size());
    for (const auto& [u, v] : G.edges)
        uf.unite(vertex_index(G, u), vertex_index(G, v));
    std::size_t root = uf.find(0);
    for (std::size_t i = 1; i < G.vertices.size(); ++i)
        if (uf.find(i) != root)
            return false;
    return true;
}

Graph cycle_graph(std::size_t n) {
    if (n < 3)
        throw ValidationError("cycle graphs need at least three vertices");
    std::vector<std::string> vs;
    std::vector<std::pair<std::string, std::string>> es;
    for (std::size_t i = 1; i <= n; ++i)
        vs.push_back("v" + std::to_string(i));
    for (std::size_t i = 1; i < n; ++i)
        es.emplace_back("v" + std::to_string(i), "v" + std::to_string(i + 1));
    es.emplace_back("v" + std::to_string(n), "v1");
    return make_graph(std::move(vs), std::move(es));
}

Graph complete_graph(std::size_t n) {
    if (n < 1)
        throw ValidationError("complete graphs need at least one vertex");
    std::vector<std::string> vs;
    std::vector<std::pair<std::string, std::string>> es;
    for (std::size_t i = 1; i <= n; ++i)
        vs.push_back("v" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
            es.emplace_back("v" + std::to_string(i), "v" + std::to_string(j));
    return make_graph(std::move(vs), std::move(es));
}

std::string cgp_edge_variable(const std::string& u, const std::string& v) {
    const std::string& a = u < v ? u : v;
    const std::string& b = u < v ? v : u;
    return "e(" + a + "," + b + ")";
}

CspInstance encode_cgp(const Graph& G, unsigned alpha, unsigned beta) {
    if (!is_connected(G))
        throw ValidationError("the CGP encoding requires a connected graph");
    if (alpha < 1)
        throw ValidationError("alpha must be at least 1");
    if (beta > G.edges.size())
        throw ValidationError("beta must not exceed the edge count");

    const std::size_t nv = G.vertices.size();
    std::vector<Value> labels;
    labels.reserve(nv);
    for (std::size_t i = 1; i <= nv; ++i)
        labels.push_back(Value::of(std::to_string(i)));
    std::vector<Value> booleans = {Value::of("0"), Value::of("1")};

    std::set<std::string> names(G.vertices.begin(), G.vertices.end());
    VarList vertex_vars, edge_vars;
    for (const auto& name : G.vertices)
        vertex_vars.push_back(VariableId::of(name));
    for (const auto& [u, v] : G.edges) {
        std::string name = cgp_edge_variable(u, v);
        if (!names.insert(name).second)
            throw ValidationError("variable name collision on '" + name + "'");
        edge_vars.push_back(VariableId::of(name));
    }
    vertex_vars = sorted_vars(vertex_vars);
    edge_vars = sorted_vars(edge_vars);

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (const auto& v : vertex_vars)
        domains.emplace_back(v, labels);
    for (const auto& v : edge_vars)
        domains.emplace_back(v, booleans);

    std::vector<ConstraintPtr> constraints;

    std::map<Value, CardinalitySet> alpha_card;
    int label_cap = static_cast<int>(std::min<unsigned>(alpha, static_cast<unsigned>(nv)));
    for (const auto& a : labels)
        alpha_card.emplace(a, CardinalitySet::interval(0, label_cap));
    std::vector<std::vector<Value>> vertex_doms(vertex_vars.size(), labels);
    constraints.push_back(std::make_shared<EgcConstraint>("C^alpha", vertex_vars, vertex_doms,
                                                          std::move(alpha_card)));

    if (!G.edges.empty()) {
        std::map<Value, CardinalitySet> beta_card;
        beta_card.emplace(Value::of("0"),
                          CardinalitySet::interval(0, static_cast<int>(G.edges.size())));
        beta_card.emplace(Value::of("1"), CardinalitySet::interval(0, static_cast<int>(beta)));
        std::vector<std::vector<Value>> edge_doms(edge_vars.size(), booleans);
        constraints.push_back(std::make_shared<EgcConstraint>("C^beta", edge_vars, edge_doms,
                                                              std::move(beta_card)));
    }

    for (const auto& [u, v] : G.edges) {
        VariableId vu = VariableId::of(u);
        VariableId vv = VariableId::of(v);
        VariableId ve = VariableId::of(cgp_edge_variable(u, v));
        std::vector<std::vector<Value>> rows;
        for (const auto& a : labels)
            for (const auto& b : labels)
                for (const auto& x : booleans)
                    if (a == b || x == Value::of("1"))
                        rows.push_back({a, b, x});
        constraints.push_back(std::make_shared<TableConstraint>(
            "edge(" + u + "," + v + ")", VarList{vu, vv, ve},
            std::vector<std::vector<Value>>{labels, labels, booleans}, std::move(rows)));
    }

    return CspInstance(std::move(domains), std::move(constraints));
}

bool cgp_oracle(const Graph& G, unsigned alpha, unsigned beta) {
    const std::size_t m = G.edges.size();
    const unsigned b = std::min<unsigned>(beta, static_cast<unsigned>(m));

    BigInt work = 0;
    BigInt binom = 1;
    for (unsigned i = 0; i <= b; ++i) {
        work += binom;
        binom = binom * static_cast<int>(m - i) / static_cast<int>(i + 1);
    }
    if (work > BigInt(enumeration_budget()))
        throw BudgetError("oracle subset count exceeds the budget");

    std::vector<std::pair<std::size_t, std::size_t>> idx_edges;
    idx_edges.reserve(m);
    for (const auto& [u, v] : G.edges)
        idx_edges.emplace_back(vertex_index(G, u), vertex_index(G, v));

    for (unsigned k = 0; k <= b; ++k) {
        std::vector<std::size_t> pick(k);
        for (unsigned i = 0; i < k; ++i)
            pick[i] = i;
        while (true) {
            UnionFind uf(G.vertices.size());
            std::size_t next_removed = 0;
            for (std::size_t e = 0; e < m; ++e) {
                if (next_removed < k && pick[next_removed] == e) {
                    ++next_removed;
                    continue;
                }
                uf.unite(idx_edges[e].first, idx_edges[e].second);
            }
            bool ok = true;
            for (std::size_t i = 0; i < G.vertices.size(); ++i)
                if (uf.find(i) == i && uf.size[i] > alpha) {
                    ok = false;
                    break;
                }
            if (ok)
                return true;

            // next k-combination of {0..m-1}
            if (k == 0)
                break;
            std::size_t i = k;
            while (i > 0) {
                --i;
                if (pick[i] != m - k + i) {
                    ++pick[i];
                    for (std::size_t j = i + 1; j < k; ++j)
                        pick[j] = pick[j - 1] + 1;
                    break;
                }
                if (i == 0) {
                    i = SIZE_MAX;
                    break;
                }
            }
            if (i == SIZE_MAX)
                break;
        }
    }
    return false;
}

bool cgp_solution_valid(const Graph& G, unsigned alpha, unsigned beta,
                        const Assignment& theta) {
    std::size_t cut = 0;
    UnionFind uf(G.vertices.size());
    for (const auto& [u, v] : G.edges) {
        VariableId e = VariableId::of(cgp_edge_variable(u, v));
        if (!theta.defines(e))
            throw ScopeError("edge variable '" + std::string(e.name()) + "' is unassigned");
        if (theta.at(e) == Value::of("1"))
            ++cut;
        else
            uf.unite(vertex_index(G, u), vertex_index(G, v));
    }
    if (cut > beta)
        return false;
    for (std::size_t i = 0; i < G.vertices.size(); ++i)
        if (uf.find(i) == i && uf.size[i] > alpha)
            return false;
    return true;
}

CspInstance encode_3col(const Graph& G) {
    std::vector<Value> colours = {Value::of("b"), Value::of("g"), Value::of("r")};
    VarList vars;
    for (const auto& name : G.vertices)
        vars.push_back(VariableId::of(name));
    vars = sorted_vars(vars);

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (const auto& v : vars)
        domains.emplace_back(v, colours);

    std::vector<ConstraintPtr> constraints;
    for (const auto& [u, v] : G.edges) {
        VarList scope = sorted_vars({VariableId::of(u), VariableId::of(v)});
        std::map<Value, CardinalitySet> card;
        for (const auto& c : colours)
            card.emplace(c, CardinalitySet::interval(0, 1));
        constraints.push_back(std::make_shared<EgcConstraint>(
            "edge(" + u + "," + v + ")", scope,
            std::vector<std::vector<Value>>(2, colours), std::move(card)));
    }
    std::map<Value, CardinalitySet> vacuous;
    for (const auto& c : colours)
        vacuous.emplace(c, CardinalitySet::interval(0, static_cast<int>(vars.size())));
    constraints.push_back(std::make_shared<EgcConstraint>(
        "palette", vars, std::vector<std::vector<Value>>(vars.size(), colours),
        std::move(vacuous)));

    return CspInstance(std::move(domains), std::move(constraints));
}

namespace {

template <typename OnColouring>
void sweep_colourings(const Graph& G, OnColouring&& visit) {
    const std::size_t n = G.vertices.size();
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (space > enumeration_budget() / 3)
            throw BudgetError("colouring space exceeds the budget");
        space *= 3;
    }
    std::vector<std::pair<std::size_t, std::size_t>> idx_edges;
    for (const auto& [u, v] : G.edges)
        idx_edges.emplace_back(vertex_index(G, u), vertex_index(G, v));

    std::vector<int> colour(n, 0);
    while (true) {
        bool proper = true;
        for (const auto& [a, b] : idx_edges)
            if (colour[a] == colour[b]) {
                proper = false;
                break;
            }
        if (proper && visit(colour))
            return;
        bool done = true;
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++colour[i] < 3) {
                done = false;
                break;
            }
            colour[i] = 0;
        }
        if (done)
            break;
    }
}

} // namespace

bool three_colourable(const Graph& G) {
    bool found = false;
    sweep_colourings(G, [&](const std::vector<int>&) {
        found = true;
        return true;
    });
    return found;
}

std::uint64_t count_three_colourings(const Graph& G) {
    std::uint64_t count = 0;
    sweep_colourings(G, [&](const std::vector<int>&) {
        ++count;
        return false;
    });
    return count;
}

bool three_colouring_valid(const Graph& G, const Assignment& theta) {
    for (const auto& [u, v] : G.edges) {
        VariableId vu = VariableId::of(u);
        VariableId vv = VariableId::of(v);
        if (!theta.defines(vu) || !theta.defines(vv))
            throw ScopeError("colouring leaves a vertex unassigned");
        if (theta.at(vu) == theta.at(vv))
            return false;
    }
    return true;
}

} // namespace gcsp
