#include "globalcsp/structure.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "globalcsp/errors.hpp"
#include "globalcsp/simplex.hpp"

namespace gcsp {

namespace {

/// Primal view of a hypergraph with vertices renumbered 0..n-1.
struct Primal {
    std::vector<VariableId> verts;
    std::vector<std::vector<std::size_t>> edges; // hyperedges as index lists
    std::vector<std::set<std::size_t>> adj;

    explicit Primal(const Hypergraph& G) : verts(G.vertices()), adj(verts.size()) {
        auto index_of = [&](VariableId v) {
            return static_cast<std::size_t>(
                std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
        };
        for (const auto& e : G.edges()) {
            std::vector<std::size_t> idx;
            idx.reserve(e.size());
            for (const auto& v : e)
                idx.push_back(index_of(v));
            for (std::size_t a : idx)
                for (std::size_t b : idx)
                    if (a != b)
                        adj[a].insert(b);
            edges.push_back(std::move(idx));
        }
    }
};

/// Q(S,v): vertices outside S ∪ {v} reachable from v through S.
std::uint32_t reachable_through(const Primal& g, std::uint32_t S, std::size_t v) {
    std::uint32_t seen = static_cast<std::uint32_t>(1u << v);
    std::uint32_t result = 0;
    std::vector<std::size_t> stack{v};
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t w : g.adj[u]) {
            std::uint32_t bit = 1u << w;
            if (seen & bit)
                continue;
            seen |= bit;
            if (S & bit)
                stack.push_back(w);
            else
                result |= bit;
        }
    }
    return result;
}

VarList bag_from_mask(const Primal& g, std::uint32_t mask) {
    VarList bag;
    for (std::size_t i = 0; i < g.verts.size(); ++i)
        if (mask & (1u << i))
            bag.push_back(g.verts[i]);
    return bag;
}

/// Builds the decomposition induced by an elimination order: one bag per
/// eliminated vertex ({v} ∪ its neighbors in the current fill graph), each
/// linked to the bag of the first later-eliminated vertex it contains.
TreeDecomposition decomposition_from_order(const Primal& g,
                                           const std::vector<std::size_t>& order) {
    const std::size_t n = g.verts.size();
    TreeDecomposition td;
    if (n == 0) {
        if (!g.edges.empty())
            throw ValidationError("edges without vertices");
        return td;
    }
    std::vector<std::set<std::size_t>> adj = g.adj;
    std::vector<std::size_t> position(n);
    std::vector<std::vector<std::size_t>> bag_members(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t v = order[step];
        position[v] = step;
        std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        for (std::size_t u : nb)
            adj[u].erase(v);
        adj[v].clear();
        bag_members[step] = nb;
        bag_members[step].push_back(v);
        VarList bag;
        bag.reserve(bag_members[step].size());
        for (std::size_t u : bag_members[step])
            bag.push_back(g.verts[u]);
        td.bags.push_back(sorted_vars(bag));
    }
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t attach = SIZE_MAX;
        for (std::size_t w : bag_members[step])
            if (position[w] > step)
                attach = std::min(attach, position[w]);
        if (attach == SIZE_MAX)
            attach = step + 1; // isolated component; chain to keep a tree
        td.edges.emplace_back(step, attach);
    }
    return td;
}

/// Exact elimination DP with an arbitrary monotone bag cost. Returns the
/// optimal value and a witness order.
template <typename Cost, typename BagCost>
std::pair<Cost, std::vector<std::size_t>>
elimination_dp(const Primal& g, BagCost&& bag_cost, const Cost& zero) {
    const std::size_t n = g.verts.size();
    const std::size_t full = (std::size_t{1} << n) - 1;
    std::vector<Cost> dp(full + 1, zero);
    std::vector<std::int8_t> choice(full + 1, -1);
    std::vector<bool> feasible(full + 1, false);
    feasible[0] = true;

    for (std::size_t S = 0; S <= full; ++S) {
        if (!feasible[S])
            continue;
        for (std::size_t v = 0; v < n; ++v) {
            if (S & (std::size_t{1} << v))
                continue;
            std::uint32_t bag =
                reachable_through(g, static_cast<std::uint32_t>(S), v) |
                (1u << v);
            Cost cost = std::max(dp[S], bag_cost(bag));
            std::size_t T = S | (std::size_t{1} << v);
            if (!feasible[T] || cost < dp[T]) {
                feasible[T] = true;
                dp[T] = cost;
                choice[T] = static_cast<std::int8_t>(v);
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::size_t S = full;
    for (std::size_t step = n; step-- > 0;) {
        std::size_t v = static_cast<std::size_t>(choice[S]);
        order[step] = v;
        S &= ~(std::size_t{1} << v);
    }
    return {dp[full], std::move(order)};
}

std::size_t index_in(const VarList& sorted, VariableId v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    if (it == sorted.end() || *it != v)
        throw ValidationError("vertex '" + std::string(v.name()) +
                              "' is not a vertex of the hypergraph");
    return static_cast<std::size_t>(it - sorted.begin());
}

CoverResult solve_cover_lp(const Hypergraph& G, const VarList& X) {
    const auto& edges = G.edges();
    std::vector<std::vector<Rational>> A(X.size(),
                                         std::vector<Rational>(edges.size(), Rational(0)));
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < edges.size(); ++j)
            if (contains_var(edges[j], X[i]))
                A[i][j] = Rational(1);
    std::vector<Rational> b(X.size(), Rational(1));
    std::vector<Rational> c(edges.size(), Rational(1));
    LpResult lp = solve_lp_min(A, b, c);
    if (lp.status != LpStatus::optimal)
        throw InfeasibleError("some vertex of X lies in no hyperedge");
    CoverResult result;
    result.value = lp.objective;
    result.cover.weights = std::move(lp.x);
    result.cover.covered = X;
    return result;
}

} // namespace

std::size_t TreeDecomposition::width() const {
    std::size_t best = 0;
    for (const auto& bag : bags)
        best = std::max(best, bag.size());
    return best == 0 ? 0 : best - 1;
}

bool validate_tree_decomposition(const Hypergraph& G, const TreeDecomposition& td) {
    const std::size_t n = td.bags.size();
    for (const auto& [a, b] : td.edges)
        if (a >= n || b >= n || a == b)
            throw ValidationError("tree edge references a missing node");
    if (n > 0) {
        if (td.edges.size() != n - 1)
            throw ValidationError("tree must have exactly one edge less than nodes");
        std::vector<std::vector<std::size_t>> nbr(n);
        for (const auto& [a, b] : td.edges) {
            nbr[a].push_back(b);
            nbr[b].push_back(a);
        }
        std::vector<bool> seen(n, false);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = true;
        std::size_t reached = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (std::size_t w : nbr[u])
                if (!seen[w]) {
                    seen[w] = true;
                    ++reached;
                    q.push(w);
                }
        }
        if (reached != n)
            throw ValidationError("tree is disconnected");
    }

    for (const auto& bag : td.bags)
        if (bag.empty())
            return false;

    std::vector<VarList> sorted_bags;
    sorted_bags.reserve(n);
    for (const auto& bag : td.bags)
        sorted_bags.push_back(sorted_vars(bag));

    for (const auto& v : G.vertices()) {
        bool found = false;
        for (const auto& bag : sorted_bags)
            if (contains_var(bag, v)) {
                found = true;
                break;
            }
        if (!found)
            return false;
    }
    for (const auto& e : G.edges()) {
        bool inside = false;
        for (const auto& bag : sorted_bags)
            if (subset_of(e, bag)) {
                inside = true;
                break;
            }
        if (!inside)
            return false;
    }
    // connectivity: the nodes holding each vertex induce a subtree
    std::vector<std::vector<std::size_t>> nbr(n);
    for (const auto& [a, b] : td.edges) {
        nbr[a].push_back(b);
        nbr[b].push_back(a);
    }
    for (const auto& v : G.vertices()) {
        std::vector<std::size_t> holders;
        for (std::size_t i = 0; i < n; ++i)
            if (contains_var(sorted_bags[i], v))
                holders.push_back(i);
        if (holders.empty())
            return false;
        std::set<std::size_t> holder_set(holders.begin(), holders.end());
        std::set<std::size_t> seen{holders[0]};
        std::queue<std::size_t> q;
        q.push(holders[0]);
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (std::size_t w : nbr[u])
                if (holder_set.count(w) && !seen.count(w)) {
                    seen.insert(w);
                    q.push(w);
                }
        }
        if (seen.size() != holders.size())
            return false;
    }
    return true;
}

CoverResult fractional_edge_cover_number(const Hypergraph& G, const VarList& X) {
    if (X.empty())
        throw ScopeError("cover number of the empty set is rejected");
    VarList x = sorted_vars(X);
    for (const auto& v : x)
        index_in(G.vertices(), v);
    return solve_cover_lp(G, x);
}

std::pair<std::size_t, FractionalCover> edge_cover_number(const Hypergraph& G,
                                                          const VarList& X) {
    if (X.empty())
        throw ScopeError("cover number of the empty set is rejected");
    VarList x = sorted_vars(X);
    const auto& edges = G.edges();

    std::uint64_t target = 0;
    std::vector<std::uint64_t> edge_masks(edges.size(), 0);
    if (x.size() > 63)
        throw BudgetError("integral cover search limited to 63 vertices");
    for (std::size_t i = 0; i < x.size(); ++i) {
        index_in(G.vertices(), x[i]);
        target |= std::uint64_t{1} << i;
        for (std::size_t j = 0; j < edges.size(); ++j)
            if (contains_var(edges[j], x[i]))
                edge_masks[j] |= std::uint64_t{1} << i;
    }

    std::map<std::uint64_t, std::pair<std::size_t, std::vector<std::size_t>>> memo;
    std::function<std::pair<std::size_t, std::vector<std::size_t>>(std::uint64_t)> best =
        [&](std::uint64_t uncovered)
        -> std::pair<std::size_t, std::vector<std::size_t>> {
        if (uncovered == 0)
            return {0, {}};
        auto it = memo.find(uncovered);
        if (it != memo.end())
            return it->second;
        std::size_t low = 0;
        while (!(uncovered & (std::uint64_t{1} << low)))
            ++low;
        std::pair<std::size_t, std::vector<std::size_t>> result{SIZE_MAX, {}};
        for (std::size_t j = 0; j < edges.size(); ++j) {
            if (!(edge_masks[j] & (std::uint64_t{1} << low)))
                continue;
            auto sub = best(uncovered & ~edge_masks[j]);
            if (sub.first != SIZE_MAX && sub.first + 1 < result.first) {
                result.first = sub.first + 1;
                result.second = std::move(sub.second);
                result.second.push_back(j);
            }
        }
        memo[uncovered] = result;
        return result;
    };
    auto [count, picked] = best(target);
    if (count == SIZE_MAX)
        throw InfeasibleError("some vertex of X lies in no hyperedge");

    FractionalCover cover;
    cover.weights.assign(edges.size(), Rational(0));
    for (std::size_t j : picked)
        cover.weights[j] = Rational(1);
    cover.covered = x;
    return {count, std::move(cover)};
}

WidthReport treewidth_exact(const Hypergraph& G, unsigned limit) {
    if (G.vertices().size() > limit)
        throw BudgetError("treewidth_exact limited to " + std::to_string(limit) +
                          " vertices");
    Primal g(G);
    WidthReport report;
    report.measure = "tw";
    if (g.verts.empty()) {
        report.value = Rational(0);
        return report;
    }
    auto [value, order] = elimination_dp<int>(
        g, [](std::uint32_t bag) { return __builtin_popcount(bag) - 1; }, 0);
    report.value = Rational(value);
    report.witness = decomposition_from_order(g, order);
    return report;
}

WidthReport ghw_and_fhw_exact_small(const Hypergraph& G, CoverMeasure measure,
                                    unsigned limit) {
    if (G.vertices().size() > limit)
        throw BudgetError("width computation limited to " + std::to_string(limit) +
                          " vertices");
    Primal g(G);
    WidthReport report;
    report.measure = measure == CoverMeasure::rho ? "ghw" : "fhw";
    if (g.verts.empty()) {
        report.value = Rational(0);
        return report;
    }

    std::map<std::uint32_t, Rational> bag_value;
    auto cost_of = [&](std::uint32_t bag) -> Rational {
        auto it = bag_value.find(bag);
        if (it != bag_value.end())
            return it->second;
        VarList vars = bag_from_mask(g, bag);
        Rational value;
        if (measure == CoverMeasure::rho)
            value = Rational(static_cast<long long>(edge_cover_number(G, vars).first));
        else
            value = fractional_edge_cover_number(G, vars).value;
        bag_value.emplace(bag, value);
        return value;
    };

    auto [value, order] = elimination_dp<Rational>(g, cost_of, Rational(0));
    report.value = value;
    report.witness = decomposition_from_order(g, order);
    report.bag_covers.reserve(report.witness.bags.size());
    for (const auto& bag : report.witness.bags) {
        if (measure == CoverMeasure::rho)
            report.bag_covers.push_back(edge_cover_number(G, bag).second);
        else
            report.bag_covers.push_back(fractional_edge_cover_number(G, bag).cover);
    }
    return report;
}

WidthReport subw_report() {
    WidthReport report;
    report.measure = "subw-unsupported";
    report.supported = false;
    return report;
}

bool validate_width_report(const Hypergraph& G, const WidthReport& report) {
    if (!report.supported)
        return report.measure == "subw-unsupported";
    if (G.vertices().empty())
        return report.witness.bags.empty() && report.value == Rational(0);
    if (!validate_tree_decomposition(G, report.witness))
        return false;
    if (report.measure == "tw")
        return Rational(static_cast<long long>(report.witness.width())) == report.value;

    if (report.bag_covers.size() != report.witness.bags.size())
        return false;
    Rational max_cover(0);
    for (std::size_t i = 0; i < report.witness.bags.size(); ++i) {
        const auto& cover = report.bag_covers[i];
        if (cover.weights.size() != G.edges().size())
            return false;
        Rational total(0);
        for (std::size_t j = 0; j < cover.weights.size(); ++j) {
            const Rational& w = cover.weights[j];
            if (w < Rational(0) || w > Rational(1))
                return false;
            if (report.measure == "ghw" && !(w == Rational(0) || w == Rational(1)))
                return false;
            total += w;
        }
        for (const auto& v : report.witness.bags[i]) {
            Rational covered(0);
            for (std::size_t j = 0; j < G.edges().size(); ++j)
                if (contains_var(G.edges()[j], v))
                    covered += cover.weights[j];
            if (covered < Rational(1))
                return false;
        }
        max_cover = std::max(max_cover, total);
    }
    return max_cover == report.value;
}

BigInt solution_bound(const CspInstance& P) {
    for (const auto& c : P.constraints())
        if (c->kind() != ConstraintKind::table)
            throw ApplicabilityError("solution_bound needs a classic (all-table) instance");
    if (P.variables().empty())
        return 1;
    Hypergraph G = hypergraph_of(P);
    Rational rho = fractional_edge_cover_number(G, G.vertices()).value;
    const BigInt size(instance_size(P));
    if (size == 0)
        return 1;
    const BigInt p = rho.num();
    const BigInt q = rho.den();
    BigInt power = boost::multiprecision::pow(
        size, static_cast<unsigned>(p)); // |P|^p; exponents stay desk-scale

    // smallest t with t^q >= |P|^p
    BigInt lo = 1, hi = 1;
    while (boost::multiprecision::pow(hi, static_cast<unsigned>(q)) < power)
        hi *= 2;
    while (lo < hi) {
        BigInt mid = (lo + hi) / 2;
        if (boost::multiprecision::pow(mid, static_cast<unsigned>(q)) >= power)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

TreeDecomposition min_fill_decomposition(const Hypergraph& G) {
    Primal g(G);
    const std::size_t n = g.verts.size();
    std::vector<std::set<std::size_t>> adj = g.adj;
    std::vector<bool> gone(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = SIZE_MAX, best_fill = SIZE_MAX;
        for (std::size_t v = 0; v < n; ++v) {
            if (gone[v])
                continue;
            std::size_t fill = 0;
            std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
            for (std::size_t i = 0; i < nb.size(); ++i)
                for (std::size_t j = i + 1; j < nb.size(); ++j)
                    if (!adj[nb[i]].count(nb[j]))
                        ++fill;
            if (fill < best_fill) {
                best_fill = fill;
                best = v;
            }
        }
        std::vector<std::size_t> nb(adj[best].begin(), adj[best].end());
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        for (std::size_t u : nb)
            adj[u].erase(best);
        adj[best].clear();
        gone[best] = true;
        order.push_back(best);
    }
    return decomposition_from_order(g, order);
}

} // namespace gcsp
