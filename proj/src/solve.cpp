#include "globalcsp/solve.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/reduction.hpp"

namespace gcsp {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::optional<Assignment> first_solution_exhaustive(const CspInstance& P) {
    std::uint64_t space = 1;
    for (const auto& d : P.domains())
        space = sat_mul(space, d.size());
    if (space > enumeration_budget())
        throw BudgetError("assignment space exceeds the budget");
    const auto& vars = P.variables();
    std::vector<std::size_t> odo(vars.size(), 0);
    while (true) {
        std::vector<Assignment::Binding> bs;
        bs.reserve(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            bs.emplace_back(vars[i], P.domains()[i][odo[i]]);
        Assignment cand = Assignment::from_pairs(std::move(bs));
        if (P.is_solution(cand))
            return cand;
        bool done = true;
        std::size_t i = odo.size();
        while (i > 0) {
            --i;
            if (++odo[i] < P.domains()[i].size()) {
                done = false;
                break;
            }
            odo[i] = 0;
        }
        if (done)
            break;
    }
    return std::nullopt;
}

} // namespace

std::optional<Assignment> solve_classic(const CspInstance& P) {
    for (const auto& c : P.constraints()) {
        if (c->kind() != ConstraintKind::table)
            throw ApplicabilityError("solve_classic handles classic (all-table) instances only");
        if (static_cast<const TableConstraint&>(*c).rows().empty())
            return std::nullopt;
    }

    std::vector<std::size_t> idx(P.variables().size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (P.domains()[a].size() != P.domains()[b].size())
            return P.domains()[a].size() < P.domains()[b].size();
        return P.variables()[a] < P.variables()[b];
    });

    std::vector<Assignment::Binding> trail;
    std::uint64_t nodes = 0;
    const std::uint64_t budget = enumeration_budget();

    std::function<bool(std::size_t)> descend = [&](std::size_t depth) -> bool {
        if (depth == idx.size())
            return true;
        VariableId v = P.variables()[idx[depth]];
        for (const auto& val : P.domains()[idx[depth]]) {
            if (++nodes > budget)
                throw BudgetError("search budget exceeded");
            trail.emplace_back(v, val);
            Assignment partial = Assignment::from_pairs(trail);
            bool ok = true;
            for (const auto& c : P.constraints()) {
                if (!contains_var(c->scope(), v))
                    continue; // unchanged since the parent node
                VarList shared = intersection_of(c->scope(), partial.variables());
                if (!c->pac_extends(partial.restrict_to(shared))) {
                    ok = false;
                    break;
                }
            }
            if (ok && descend(depth + 1))
                return true;
            trail.pop_back();
        }
        return false;
    };

    if (descend(0))
        return Assignment::from_pairs(std::move(trail));
    return std::nullopt;
}

std::optional<Assignment> solve_via_tree_decomposition(const CspInstance& P,
                                                       const TreeDecomposition& td) {
    Hypergraph G = hypergraph_of(P);
    if (!validate_tree_decomposition(G, td))
        throw ValidationError("tree decomposition does not validate against the instance");
    const std::size_t n = td.bags.size();

    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [x, y] : td.edges) {
        adj[x].push_back(y);
        adj[y].push_back(x);
    }
    std::vector<std::size_t> parent(n, SIZE_MAX), order;
    std::vector<char> seen(n, 0);
    order.push_back(0);
    seen[0] = 1;
    for (std::size_t head = 0; head < order.size(); ++head)
        for (std::size_t w : adj[order[head]])
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = order[head];
                order.push_back(w);
            }

    std::vector<std::vector<std::size_t>> assigned(n);
    for (std::size_t ci = 0; ci < P.constraints().size(); ++ci) {
        const auto& c = P.constraints()[ci];
        std::size_t home = SIZE_MAX;
        for (std::size_t i = 0; i < n && home == SIZE_MAX; ++i)
            if (subset_of(c->scope(), td.bags[i]))
                home = i;
        if (home == SIZE_MAX)
            throw ValidationError("no bag holds the scope of '" + c->label() + "'");
        assigned[home].push_back(ci);
    }

    // leaf-to-root semijoin
    std::vector<std::vector<Assignment>> alive(n);
    std::vector<std::set<Assignment>> keys(n); // projections onto the parent separator
    std::uint64_t produced = 0;
    const std::uint64_t budget = enumeration_budget();

    for (std::size_t pos = order.size(); pos > 0; --pos) {
        std::size_t i = order[pos - 1];
        const VarList& bag = td.bags[i];
        std::vector<std::size_t> children;
        for (std::size_t w : adj[i])
            if (w != parent[i])
                children.push_back(w);
        std::vector<VarList> seps;
        seps.reserve(children.size());
        for (std::size_t ch : children)
            seps.push_back(intersection_of(bag, td.bags[ch]));
        VarList parent_sep =
            parent[i] == SIZE_MAX ? VarList{} : intersection_of(bag, td.bags[parent[i]]);

        std::vector<std::size_t> odo(bag.size(), 0);
        while (true) {
            if (++produced > budget)
                throw BudgetError("bag relation budget exceeded");
            std::vector<Assignment::Binding> bs;
            bs.reserve(bag.size());
            for (std::size_t t = 0; t < bag.size(); ++t)
                bs.emplace_back(bag[t], P.domain_of(bag[t])[odo[t]]);
            Assignment row = Assignment::from_pairs(std::move(bs));

            bool ok = true;
            for (std::size_t ci : assigned[i])
                if (!P.constraints()[ci]->evaluate(row.restrict_to(P.constraints()[ci]->scope()))) {
                    ok = false;
                    break;
                }
            if (ok)
                for (std::size_t c = 0; c < children.size(); ++c)
                    if (!keys[children[c]].count(row.restrict_to(seps[c]))) {
                        ok = false;
                        break;
                    }
            if (ok) {
                alive[i].push_back(row);
                if (parent[i] != SIZE_MAX)
                    keys[i].insert(row.restrict_to(parent_sep));
            }

            bool done = true;
            std::size_t t = odo.size();
            while (t > 0) {
                --t;
                if (++odo[t] < P.domain_of(bag[t]).size()) {
                    done = false;
                    break;
                }
                odo[t] = 0;
            }
            if (done)
                break;
        }
    }

    if (alive[0].empty())
        return std::nullopt;

    // root-to-leaf extraction
    std::vector<Assignment> chosen(n);
    chosen[0] = alive[0].front();
    std::map<VariableId, Value> merged;
    for (const auto& [v, val] : chosen[0].bindings())
        merged.emplace(v, val);
    for (std::size_t pos = 1; pos < order.size(); ++pos) {
        std::size_t i = order[pos];
        VarList sep = intersection_of(td.bags[i], td.bags[parent[i]]);
        Assignment want = chosen[parent[i]].restrict_to(sep);
        bool found = false;
        for (const auto& row : alive[i])
            if (row.restrict_to(sep) == want) {
                chosen[i] = row;
                found = true;
                break;
            }
        if (!found)
            throw ValidationError("semijoin invariant failed during extraction");
        for (const auto& [v, val] : chosen[i].bindings()) {
            auto [it, inserted] = merged.emplace(v, val);
            if (!inserted && it->second != val)
                throw ValidationError("inconsistent extraction across bags");
        }
    }

    std::vector<Assignment::Binding> bs(merged.begin(), merged.end());
    return Assignment::from_pairs(std::move(bs));
}

SolveReport solve_pipeline(const CspInstance& P, unsigned c) {
    SolveReport rep;

    CspInstance work = P;
    if (!is_pac_instance(P)) {
        work = reduce_backdoors(
            P, [](const ConstraintPtr& q) { return q->has_pac(); },
            [](const ConstraintPtr& q) { return BackDoorSpec::full_scope(q); }, c);
        rep.used_backdoors = true;
    }

    std::optional<ClassicReduction> red;
    try {
        red.emplace(reduce_to_classic(work, c));
    } catch (const SparsityError& e) {
        std::uint64_t space = 1;
        for (const auto& d : P.domains())
            space = sat_mul(space, d.size());
        if (space > enumeration_budget())
            throw;
        rep.used_brute_force = true;
        rep.note = std::string("reduction refused (") + e.what() + "); exhaustive fallback";
        rep.solution = first_solution_exhaustive(P);
        rep.satisfiable = rep.solution.has_value();
        return rep;
    }
    rep.reduced = true;

    const CspInstance& classic = red->classic();
    rep.classic_size = instance_size(classic);
    Hypergraph G = hypergraph_of(classic);
    TreeDecomposition td =
        G.num_vertices() <= 14 ? treewidth_exact(G).witness : min_fill_decomposition(G);
    rep.decomposition_width = td.width();

    std::optional<Assignment> cl;
    try {
        cl = solve_via_tree_decomposition(classic, td);
        rep.used_tree_decomposition = true;
    } catch (const BudgetError&) {
        rep.note = "tree join exceeded the budget; backtracking fallback";
        cl = solve_classic(classic);
    }

    if (!cl) {
        rep.satisfiable = false;
        return rep;
    }
    Assignment lifted = red->lift(*cl);
    if (!P.is_solution(lifted))
        throw ValidationError("lifted assignment fails the original instance");
    rep.satisfiable = true;
    rep.solution = std::move(lifted);
    return rep;
}

} // namespace gcsp
