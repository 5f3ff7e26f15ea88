#include "globalcsp/weighted.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/reduction.hpp"
#include "globalcsp/structure.hpp"

namespace gcsp {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        return 0;
    if (a > std::numeric_limits<std::uint64_t>::max() / b)
        return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::size_t bit_size(const BigInt& x) {
    if (x == 0)
        return 1;
    BigInt a = boost::multiprecision::abs(x);
    return static_cast<std::size_t>(boost::multiprecision::msb(a)) + 1;
}

std::size_t rational_bits(const Rational& r) {
    return bit_size(r.num()) + bit_size(r.den());
}

void check_partial_against(const GlobalConstraint& c, const Assignment& theta) {
    for (const auto& [v, val] : theta.bindings()) {
        const auto& dom = c.domain_of(v);
        if (!std::binary_search(dom.begin(), dom.end(), val))
            throw DomainError("value '" + std::string(val.text()) + "' is outside the domain of '" +
                              std::string(v.name()) + "' in '" + c.label() + "'");
    }
}

} // namespace

WeightedConstraint::WeightedConstraint(ConstraintPtr base) : base_(std::move(base)) {
    if (!base_)
        throw ValidationError("weighted constraint requires a base constraint");
}

// ---------------------------------------------------------------------------
// WeightedTable

WeightedTable::WeightedTable(std::string label, VarList scope,
                             std::vector<std::vector<Value>> domains,
                             std::vector<std::vector<Value>> rows, std::vector<Rational> costs)
    : WeightedConstraint(std::make_shared<TableConstraint>(label, scope, domains, rows)) {
    if (rows.size() != costs.size())
        throw ValidationError("weighted table '" + label + "': " + std::to_string(rows.size()) +
                              " rows but " + std::to_string(costs.size()) + " costs");
    const TableConstraint& t = table();
    std::map<std::vector<Value>, Rational> by_row;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        std::vector<Value> canon(t.arity());
        for (std::size_t p = 0; p < scope.size(); ++p)
            canon[t.scope_position(scope[p])] = rows[j][p];
        if (!by_row.emplace(std::move(canon), costs[j]).second)
            throw ValidationError("weighted table '" + label +
                                  "': duplicate row makes the cost ambiguous");
    }
    costs_.reserve(t.rows().size());
    for (const auto& r : t.rows())
        costs_.push_back(by_row.at(r));
}

std::shared_ptr<const WeightedTable>
WeightedTable::from_assignments(std::string label, VarList scope,
                                std::vector<std::vector<Value>> domains,
                                const std::vector<Assignment>& rows, std::vector<Rational> costs) {
    std::vector<std::vector<Value>> value_rows;
    value_rows.reserve(rows.size());
    for (const auto& a : rows) {
        if (a.size() != scope.size())
            throw ValidationError("weighted table '" + label +
                                  "': a row does not assign the scope exactly");
        std::vector<Value> r;
        r.reserve(scope.size());
        for (const auto& v : scope)
            r.push_back(a.at(v));
        value_rows.push_back(std::move(r));
    }
    return std::make_shared<WeightedTable>(std::move(label), std::move(scope), std::move(domains),
                                           std::move(value_rows), std::move(costs));
}

const TableConstraint& WeightedTable::table() const {
    return static_cast<const TableConstraint&>(*base_);
}

Rational WeightedTable::cost(const Assignment& theta) const {
    if (!base_->evaluate(theta))
        throw ApplicabilityError("cost of '" + label() +
                                 "' applies to satisfying assignments only");
    const TableConstraint& t = table();
    std::vector<Value> row(t.arity());
    for (std::size_t p = 0; p < t.arity(); ++p)
        row[p] = theta.at(t.scope()[p]);
    auto it = std::lower_bound(t.rows().begin(), t.rows().end(), row);
    if (it == t.rows().end() || *it != row)
        throw ApplicabilityError("cost of '" + label() + "': row not found");
    return costs_[static_cast<std::size_t>(it - t.rows().begin())];
}

bool WeightedTable::weighted_pac(const Assignment& theta, const Rational& k) const {
    check_partial_against(*base_, theta);
    const TableConstraint& t = table();
    std::vector<std::pair<std::size_t, Value>> fixed;
    fixed.reserve(theta.size());
    for (const auto& [v, val] : theta.bindings())
        fixed.emplace_back(t.scope_position(v), val);
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        bool match = true;
        for (const auto& [pos, val] : fixed)
            if (t.rows()[i][pos] != val) {
                match = false;
                break;
            }
        if (match && costs_[i] <= k)
            return true;
    }
    return false;
}

std::optional<Rational> WeightedTable::min_cost_extension(const Assignment& theta) const {
    check_partial_against(*base_, theta);
    const TableConstraint& t = table();
    std::vector<std::pair<std::size_t, Value>> fixed;
    fixed.reserve(theta.size());
    for (const auto& [v, val] : theta.bindings())
        fixed.emplace_back(t.scope_position(v), val);
    std::optional<Rational> best;
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
        bool match = true;
        for (const auto& [pos, val] : fixed)
            if (t.rows()[i][pos] != val) {
                match = false;
                break;
            }
        if (match && (!best || costs_[i] < *best))
            best = costs_[i];
    }
    return best;
}

std::size_t WeightedTable::description_size() const {
    std::size_t s = base_->description_size();
    for (const auto& c : costs_)
        s += rational_bits(c);
    return s;
}

// ---------------------------------------------------------------------------
// Zero-cost wrapper

namespace {

class ZeroCost final : public WeightedConstraint {
public:
    explicit ZeroCost(ConstraintPtr base) : WeightedConstraint(std::move(base)) {}

    Rational cost(const Assignment& theta) const override {
        if (!base_->evaluate(theta))
            throw ApplicabilityError("cost of '" + label() +
                                     "' applies to satisfying assignments only");
        return Rational(0);
    }
    bool has_weighted_pac() const override { return base_->has_pac(); }
    bool weighted_pac(const Assignment& theta, const Rational& k) const override {
        return base_->pac_extends(theta) && Rational(0) <= k;
    }
    std::optional<Rational> min_cost_extension(const Assignment& theta) const override {
        if (base_->pac_extends(theta))
            return Rational(0);
        return std::nullopt;
    }
    std::size_t description_size() const override {
        return base_->description_size() + rational_bits(Rational(0));
    }
    bool is_zero_cost() const override { return true; }
};

} // namespace

WeightedPtr zero_cost(const ConstraintPtr& c) {
    return std::make_shared<ZeroCost>(c);
}

// ---------------------------------------------------------------------------
// Black-box weighted constraint

BlackBoxWeighted::BlackBoxWeighted(ConstraintPtr base, CostFn cost, Oracle weighted_pac,
                                   BigInt denominator_bound, Rational lo, Rational hi)
    : WeightedConstraint(std::move(base)),
      cost_(std::move(cost)),
      oracle_(std::move(weighted_pac)),
      denominator_bound_(std::move(denominator_bound)),
      lo_(std::move(lo)),
      hi_(std::move(hi)) {
    if (!cost_ || !oracle_)
        throw ValidationError("black-box weighted constraint requires cost and oracle procedures");
    if (denominator_bound_ < 0)
        throw ValidationError("negative denominator bound");
    if (hi_ < lo_)
        throw ValidationError("empty declared cost range");
}

Rational BlackBoxWeighted::cost(const Assignment& theta) const {
    if (!base_->evaluate(theta))
        throw ApplicabilityError("cost of '" + label() +
                                 "' applies to satisfying assignments only");
    return cost_(theta);
}

bool BlackBoxWeighted::weighted_pac(const Assignment& theta, const Rational& k) const {
    check_partial_against(*base_, theta);
    return oracle_(theta, k);
}

std::optional<Rational> BlackBoxWeighted::min_cost_extension(const Assignment& theta) const {
    check_partial_against(*base_, theta);
    if (denominator_bound_ == 0)
        throw CapabilityError("constraint '" + label() +
                              "': costs are not integer-scaled, no search grid exists");
    // costs lie on the grid Z / denominator_bound within [lo, hi]
    Rational scale((BigInt(denominator_bound_)));
    BigInt a = (lo_ * scale).ceil();
    BigInt b = (hi_ * scale).floor();
    if (a > b)
        return std::nullopt;
    if (!oracle_(theta, Rational(b, denominator_bound_)))
        return std::nullopt;
    while (a < b) {
        BigInt mid = a + (b - a) / 2;
        if (oracle_(theta, Rational(mid, denominator_bound_)))
            b = mid;
        else
            a = mid + 1;
    }
    return Rational(a, denominator_bound_);
}

std::size_t BlackBoxWeighted::description_size() const {
    return base_->description_size() + bit_size(denominator_bound_) + rational_bits(lo_) +
           rational_bits(hi_);
}

// ---------------------------------------------------------------------------
// WcspInstance

WcspInstance::WcspInstance(std::vector<std::pair<VariableId, std::vector<Value>>> domains,
                           std::vector<WeightedPtr> constraints) {
    std::vector<ConstraintPtr> bases;
    bases.reserve(constraints.size());
    for (const auto& w : constraints) {
        if (!w)
            throw ValidationError("null weighted constraint");
        bases.push_back(w->base());
    }
    base_ = CspInstance(std::move(domains), std::move(bases));
    weighted_ = std::move(constraints);
}

Rational wcost(const WcspInstance& P, const Assignment& theta) {
    if (!P.base().is_solution(theta))
        throw ApplicabilityError("wcost applies to solutions only");
    Rational total(0);
    for (const auto& w : P.constraints())
        total += w->cost(theta.restrict_to(w->scope()));
    return total;
}

std::size_t wcsp_size(const WcspInstance& P) {
    std::size_t s = P.base().variables().size();
    for (const auto& d : P.base().domains())
        s += d.size();
    for (const auto& w : P.constraints())
        s += w->description_size();
    return s;
}

// ---------------------------------------------------------------------------
// Weighted projection

namespace {

class ProjectedWeighted final : public WeightedConstraint {
public:
    ProjectedWeighted(WeightedPtr original, const VarList& X)
        : WeightedConstraint(project_constraint(original->base(), X)),
          original_(std::move(original)) {}

    Rational cost(const Assignment& theta) const override {
        if (!base_->evaluate(theta))
            throw ApplicabilityError("cost of '" + label() +
                                     "' applies to satisfying assignments only");
        auto m = original_->min_cost_extension(theta);
        if (!m)
            throw ApplicabilityError("cost of '" + label() + "': no extension exists");
        return *m;
    }
    bool has_weighted_pac() const override { return original_->has_weighted_pac(); }
    bool weighted_pac(const Assignment& theta, const Rational& k) const override {
        for (const auto& [v, val] : theta.bindings()) {
            (void)val;
            if (!contains_var(scope(), v))
                throw ScopeError("'" + std::string(v.name()) + "' is outside the projection scope");
        }
        return original_->weighted_pac(theta, k);
    }
    std::optional<Rational> min_cost_extension(const Assignment& theta) const override {
        for (const auto& [v, val] : theta.bindings()) {
            (void)val;
            if (!contains_var(scope(), v))
                throw ScopeError("'" + std::string(v.name()) + "' is outside the projection scope");
        }
        return original_->min_cost_extension(theta);
    }
    std::size_t description_size() const override {
        // description of the projection plus the original's cost representation
        std::size_t cost_part =
            original_->description_size() - original_->base()->description_size();
        return base_->description_size() + cost_part;
    }

private:
    WeightedPtr original_;
};

} // namespace

WeightedPtr weighted_project(const WeightedPtr& c, const VarList& X) {
    if (!c)
        throw ValidationError("null weighted constraint");
    VarList x = sorted_vars(X);
    if (x == c->scope())
        return c;
    return std::make_shared<ProjectedWeighted>(c, x);
}

WcspInstance project_wcsp(const WcspInstance& P, const VarList& X) {
    VarList x = sorted_vars(X);
    if (x.empty())
        throw ScopeError("projection onto the empty set is rejected");
    if (!subset_of(x, P.base().variables()))
        throw ScopeError("projection target is not a subset of the variables");

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    domains.reserve(x.size());
    for (const auto& v : x)
        domains.emplace_back(v, P.base().domain_of(v));

    std::vector<WeightedPtr> ws;
    for (const auto& w : P.constraints()) {
        VarList shared = intersection_of(w->scope(), x);
        if (shared.empty())
            continue;
        ws.push_back(shared == w->scope() ? w : weighted_project(w, shared));
    }
    return WcspInstance(std::move(domains), std::move(ws));
}

// ---------------------------------------------------------------------------
// Weighted decompositions and the weighted reduction

WcspInstance wcsp_union(const WcspInstance& Q1, const WcspInstance& Q2) {
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (std::size_t i = 0; i < Q1.base().variables().size(); ++i)
        domains.emplace_back(Q1.base().variables()[i], Q1.base().domains()[i]);
    for (std::size_t i = 0; i < Q2.base().variables().size(); ++i) {
        VariableId v = Q2.base().variables()[i];
        if (Q1.base().has_variable(v)) {
            if (Q1.base().domain_of(v) != Q2.base().domains()[i])
                throw DomainError("shared variable '" + std::string(v.name()) +
                                  "' carries two different domains");
        } else {
            domains.emplace_back(v, Q2.base().domains()[i]);
        }
    }

    std::vector<WeightedPtr> ws = Q1.constraints();
    for (const auto& w : Q2.constraints()) {
        bool present = false;
        for (const auto& existing : ws)
            if (existing.get() == w.get()) {
                present = true;
                break;
            }
        if (!present)
            ws.push_back(w);
    }
    return WcspInstance(std::move(domains), std::move(ws));
}

WcspInstance weighted_decomposition_union(const WeightedDecomposition& S) {
    if (S.parts.empty())
        throw ValidationError("empty weighted decomposition");
    WcspInstance u = S.parts.front();
    for (std::size_t i = 1; i < S.parts.size(); ++i)
        u = wcsp_union(u, S.parts[i]);
    return u;
}

namespace {

/// Minimum-cost completion of theta into a full solution of P, found by
/// exhaustive extension over the unassigned variables. Ties break toward the
/// first candidate in domain order.
std::optional<std::pair<Rational, Assignment>> min_cost_completion(const WcspInstance& P,
                                                                   const Assignment& theta) {
    const CspInstance& B = P.base();
    for (const auto& [v, val] : theta.bindings()) {
        if (!B.has_variable(v))
            throw ScopeError("'" + std::string(v.name()) + "' is not a variable of the instance");
        const auto& dom = B.domain_of(v);
        if (!std::binary_search(dom.begin(), dom.end(), val))
            throw DomainError("value '" + std::string(val.text()) +
                              "' is outside the domain of '" + std::string(v.name()) + "'");
    }
    VarList missing = difference_of(B.variables(), theta.variables());
    std::uint64_t space = 1;
    for (const auto& v : missing)
        space = sat_mul(space, B.domain_of(v).size());
    if (space > enumeration_budget())
        throw BudgetError("completion search space exceeds the budget");

    std::optional<std::pair<Rational, Assignment>> best;
    std::vector<std::size_t> odo(missing.size(), 0);
    while (true) {
        std::vector<Assignment::Binding> bs(theta.bindings());
        for (std::size_t i = 0; i < missing.size(); ++i)
            bs.emplace_back(missing[i], B.domain_of(missing[i])[odo[i]]);
        Assignment cand = Assignment::from_pairs(std::move(bs));
        if (B.is_solution(cand)) {
            Rational cost(0);
            for (const auto& w : P.constraints())
                cost += w->cost(cand.restrict_to(w->scope()));
            if (!best || cost < best->first)
                best = std::make_pair(std::move(cost), std::move(cand));
        }
        bool done = true;
        std::size_t i = odo.size();
        while (i > 0) {
            --i;
            if (++odo[i] < B.domain_of(missing[i]).size()) {
                done = false;
                break;
            }
            odo[i] = 0;
        }
        if (done)
            break;
    }
    return best;
}

struct WeightedGrouping {
    WcspInstance uni;
    CspInstance grouped; // parts wrapped as single subproblem constraints
    std::vector<ConstraintPtr> wrapped;
    std::vector<VarList> ivs;
};

WeightedGrouping group_parts(const WeightedDecomposition& S) {
    if (S.parts.empty())
        throw ValidationError("empty weighted decomposition");
    std::set<const WeightedConstraint*> seen;
    for (const auto& part : S.parts)
        for (const auto& w : part.constraints())
            if (!seen.insert(w.get()).second)
                throw ValidationError("weighted constraint '" + w->label() +
                                      "' occurs in two parts; costs must not be counted twice");

    WeightedGrouping g;
    g.uni = weighted_decomposition_union(S);

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (std::size_t i = 0; i < g.uni.base().variables().size(); ++i)
        domains.emplace_back(g.uni.base().variables()[i], g.uni.base().domains()[i]);

    g.wrapped.reserve(S.parts.size());
    for (std::size_t i = 0; i < S.parts.size(); ++i)
        g.wrapped.push_back(std::make_shared<SubproblemConstraint>(
            "sub" + std::to_string(i), S.parts[i].base().constraints()));
    g.grouped = CspInstance(std::move(domains), g.wrapped);

    g.ivs.reserve(S.parts.size());
    for (const auto& w : g.wrapped)
        g.ivs.push_back(intersection_variables(g.grouped, w));
    return g;
}

WeightedPtr induced_from_grouping(const WeightedGrouping& g, const WeightedDecomposition& S,
                                  std::size_t T, std::uint64_t cap) {
    const VarList& iv = g.ivs[T];
    const VarList& scope_T = g.wrapped[T]->scope();
    const std::string& part_label = g.wrapped[T]->label();

    std::vector<Assignment> shared_part;
    if (iv.empty()) {
        if (g.wrapped[T]->pac_extends(Assignment{}))
            shared_part.push_back(Assignment{});
    } else {
        CspInstance Pi = project_instance(g.grouped, iv);
        auto res = detail::levelwise_solutions(Pi, iv, cap, cap, enumeration_budget(), true);
        if (res.level_cap_hit || res.final_cap_hit)
            throw SparsityError("induced table for '" + part_label +
                                    "' exceeds the sparsity cap",
                                part_label);
        shared_part = std::move(res.solutions);
    }

    VarList priv = difference_of(scope_T, iv);
    std::vector<Assignment::Binding> star_bindings;
    star_bindings.reserve(priv.size());
    for (const auto& v : priv)
        star_bindings.emplace_back(v, Value::star());
    Assignment star_pad = Assignment::from_pairs(star_bindings);

    std::vector<Assignment> rows;
    std::vector<Rational> costs;
    rows.reserve(shared_part.size());
    costs.reserve(shared_part.size());
    for (const auto& theta : shared_part) {
        auto m = min_cost_completion(S.parts[T], theta);
        if (!m)
            throw InfeasibleError("projected row has no extension inside part '" + part_label +
                                  "'");
        rows.push_back(theta.disjoint_union(star_pad));
        costs.push_back(m->first);
    }

    std::vector<std::vector<Value>> domains;
    domains.reserve(scope_T.size());
    for (const auto& v : scope_T)
        domains.push_back(contains_var(iv, v) ? g.uni.base().domain_of(v)
                                              : std::vector<Value>{Value::star()});
    return WeightedTable::from_assignments("wic(" + part_label + ")", scope_T,
                                           std::move(domains), rows, std::move(costs));
}

} // namespace

WeightedPtr weighted_induced_constraint(const WeightedDecomposition& S, std::size_t T,
                                        std::uint64_t cap) {
    if (T >= S.parts.size())
        throw ValidationError("part index out of range");
    WeightedGrouping g = group_parts(S);
    return induced_from_grouping(g, S, T, cap);
}

WeightedReduction::WeightedReduction(WcspInstance classic, WeightedDecomposition parts,
                                     std::vector<VarList> ivs)
    : classic_(std::move(classic)), parts_(std::move(parts)), ivs_(std::move(ivs)) {}

Assignment WeightedReduction::lift(const Assignment& classic_solution) const {
    if (!classic_.base().is_solution(classic_solution))
        throw ValidationError("lift requires a solution of the classic instance");
    std::map<VariableId, Value> combined;
    for (std::size_t T = 0; T < parts_.parts.size(); ++T) {
        Assignment theta = classic_solution.restrict_to(ivs_[T]);
        auto m = min_cost_completion(parts_.parts[T], theta);
        if (!m)
            throw InfeasibleError("no extension inside part " + std::to_string(T) +
                                  " realizes the induced cost");
        for (const auto& [v, val] : m->second.bindings()) {
            auto [it, inserted] = combined.emplace(v, val);
            if (!inserted && it->second != val)
                throw InfeasibleError("parts disagree on '" + std::string(v.name()) + "'");
        }
    }
    std::vector<Assignment::Binding> bs(combined.begin(), combined.end());
    return Assignment::from_pairs(std::move(bs));
}

WeightedReduction reduce_weighted(const WeightedDecomposition& S, std::uint64_t cap) {
    WeightedGrouping g = group_parts(S);

    std::vector<WeightedPtr> wics;
    wics.reserve(S.parts.size());
    for (std::size_t T = 0; T < S.parts.size(); ++T)
        wics.push_back(induced_from_grouping(g, S, T, cap));

    VarList shared;
    for (const auto& iv : g.ivs)
        shared = union_of(shared, iv);

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (std::size_t i = 0; i < g.uni.base().variables().size(); ++i) {
        VariableId v = g.uni.base().variables()[i];
        domains.emplace_back(v, contains_var(shared, v)
                                    ? g.uni.base().domains()[i]
                                    : std::vector<Value>{Value::star()});
    }
    WcspInstance classic(std::move(domains), std::move(wics));
    return WeightedReduction(std::move(classic), S, std::move(g.ivs));
}

// ---------------------------------------------------------------------------
// Optimal weighted solving

namespace {

Assignment merge_agreeing(const Assignment& a, const Assignment& b) {
    std::vector<Assignment::Binding> out;
    out.reserve(a.size() + b.size());
    const auto& ba = a.bindings();
    const auto& bb = b.bindings();
    std::size_t i = 0, j = 0;
    while (i < ba.size() && j < bb.size()) {
        if (ba[i].first < bb[j].first) {
            out.push_back(ba[i++]);
        } else if (bb[j].first < ba[i].first) {
            out.push_back(bb[j++]);
        } else {
            if (ba[i].second != bb[j].second)
                throw ValidationError("inconsistent assignments in tree DP merge");
            out.push_back(ba[i++]);
            ++j;
        }
    }
    out.insert(out.end(), ba.begin() + static_cast<std::ptrdiff_t>(i), ba.end());
    out.insert(out.end(), bb.begin() + static_cast<std::ptrdiff_t>(j), bb.end());
    return Assignment::from_pairs(std::move(out));
}

WcspResult wcsp_tree_dp(const WcspInstance& P) {
    const CspInstance& B = P.base();
    Hypergraph G = hypergraph_of(B);
    TreeDecomposition td = min_fill_decomposition(G);
    if (!validate_tree_decomposition(G, td))
        throw ValidationError("tree decomposition failed validation");
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
    for (std::size_t head = 0; head < order.size(); ++head) {
        std::size_t u = order[head];
        for (std::size_t w : adj[u])
            if (!seen[w]) {
                seen[w] = 1;
                parent[w] = u;
                order.push_back(w);
            }
    }

    // each weighted constraint settles into the first bag holding its scope
    std::vector<std::vector<std::size_t>> assigned(n);
    for (std::size_t wi = 0; wi < P.constraints().size(); ++wi) {
        const auto& w = P.constraints()[wi];
        std::size_t home = SIZE_MAX;
        for (std::size_t i = 0; i < n && home == SIZE_MAX; ++i)
            if (subset_of(w->scope(), td.bags[i]))
                home = i;
        if (home == SIZE_MAX)
            throw ValidationError("no bag holds the scope of '" + w->label() + "'");
        assigned[home].push_back(wi);
    }

    // cost + subtree witness per separator key, leaves upward
    std::vector<std::map<Assignment, std::pair<Rational, Assignment>>> msg(n);
    std::optional<std::pair<Rational, Assignment>> best_root;
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
                throw BudgetError("tree DP row budget exceeded");
            std::vector<Assignment::Binding> bs;
            bs.reserve(bag.size());
            for (std::size_t t = 0; t < bag.size(); ++t)
                bs.emplace_back(bag[t], B.domain_of(bag[t])[odo[t]]);
            Assignment row = Assignment::from_pairs(std::move(bs));

            bool ok = true;
            Rational cost(0);
            for (std::size_t wi : assigned[i]) {
                const auto& w = P.constraints()[wi];
                Assignment local = row.restrict_to(w->scope());
                if (!w->base()->evaluate(local)) {
                    ok = false;
                    break;
                }
                cost += w->cost(local);
            }
            Assignment subtree = row;
            if (ok)
                for (std::size_t c = 0; c < children.size(); ++c) {
                    auto it = msg[children[c]].find(row.restrict_to(seps[c]));
                    if (it == msg[children[c]].end()) {
                        ok = false;
                        break;
                    }
                    cost += it->second.first;
                    subtree = merge_agreeing(subtree, it->second.second);
                }
            if (ok) {
                if (parent[i] == SIZE_MAX) {
                    if (!best_root || cost < best_root->first)
                        best_root = std::make_pair(cost, subtree);
                } else {
                    Assignment key = row.restrict_to(parent_sep);
                    auto it = msg[i].find(key);
                    if (it == msg[i].end())
                        msg[i].emplace(std::move(key), std::make_pair(cost, subtree));
                    else if (cost < it->second.first)
                        it->second = std::make_pair(cost, subtree);
                }
            }

            bool done = true;
            std::size_t t = odo.size();
            while (t > 0) {
                --t;
                if (++odo[t] < B.domain_of(bag[t]).size()) {
                    done = false;
                    break;
                }
                odo[t] = 0;
            }
            if (done)
                break;
        }
        for (std::size_t ch : children)
            msg[ch].clear();
    }

    if (!best_root)
        return {};
    if (!B.is_solution(best_root->second))
        throw ValidationError("tree DP produced a non-solution");
    return {best_root->first, best_root->second};
}

} // namespace

WcspResult wcsp_optimal(const WcspInstance& P) {
    const CspInstance& B = P.base();
    if (B.variables().empty())
        return {Rational(0), Assignment{}};
    bool all_tables = true;
    for (const auto& c : B.constraints())
        if (c->kind() != ConstraintKind::table)
            all_tables = false;
    if (!all_tables) {
        auto m = min_cost_completion(P, Assignment{});
        if (!m)
            return {};
        return {m->first, m->second};
    }
    return wcsp_tree_dp(P);
}

bool wcsp_decision(const WcspInstance& P, const Rational& k) {
    WcspResult r = wcsp_optimal(P);
    return r.optimal.has_value() && *r.optimal <= k;
}

} // namespace gcsp
