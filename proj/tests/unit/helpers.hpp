#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "globalcsp/constraint.hpp"
#include "globalcsp/instance.hpp"
#include "globalcsp/reduction.hpp"

namespace gcsp::test {

inline VariableId V(const std::string& name) { return VariableId::of(name); }
inline Value val(const std::string& text) { return Value::of(text); }

inline std::vector<Value> dom(const std::vector<std::string>& texts) {
    std::vector<Value> d;
    for (const auto& t : texts)
        d.push_back(Value::of(t));
    std::sort(d.begin(), d.end());
    return d;
}

inline VarList vars(const std::vector<std::string>& names) {
    VarList vs;
    for (const auto& n : names)
        vs.push_back(VariableId::of(n));
    return sorted_vars(std::move(vs));
}

/// Table over the given scope; rows as value-text tuples aligned to `names`
/// (which may list the scope in any order; the constructor normalizes).
inline std::shared_ptr<const TableConstraint>
table(const std::string& label, const std::vector<std::string>& names,
      const std::vector<std::vector<Value>>& domains,
      const std::vector<std::vector<std::string>>& row_texts) {
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
    return std::make_shared<TableConstraint>(label, scope, domains, rows);
}

/// Two-table warm-up instance: sol = {{x→1, y→1}}.
inline CspInstance t1t2_instance() {
    auto b = dom({"0", "1"});
    auto t1 = table("T1", {"x", "y"}, {b, b}, {{"0", "0"}, {"1", "1"}});
    auto t2 = table("T2", {"y"}, {b}, {{"1"}});
    return CspInstance({{V("x"), b}, {V("y"), b}}, {t1, t2});
}

/// Three variables over {a,b}; exactly one "a". Has exactly 3 solutions.
inline CspInstance egc3_instance() {
    auto d = dom({"a", "b"});
    std::map<Value, CardinalitySet> card{
        {val("a"), CardinalitySet::interval(1, 1)},
        {val("b"), CardinalitySet::interval(0, 3)},
    };
    auto g = std::make_shared<EgcConstraint>("G", vars({"x1", "x2", "x3"}),
                                             std::vector<std::vector<Value>>{d, d, d}, card);
    return CspInstance({{V("x1"), d}, {V("x2"), d}, {V("x3"), d}}, {g});
}

inline std::set<Assignment> as_set(const std::vector<Assignment>& v) {
    return {v.begin(), v.end()};
}

/// Decomposition-style instance: part P forces exactly four ones among the
/// x's and copies x_i into y_i; part Q forces exactly n ones among y's ∪ z's.
/// iv for both constraints is {y1..yn} and every projection onto a subset of
/// it has at most C(n,4) solutions.
inline CspInstance family_instance(std::size_t n) {
    auto b = dom({"0", "1"});
    VarList xs, ys, zs;
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (std::size_t i = 1; i <= n; ++i) {
        xs.push_back(V("x" + std::to_string(i)));
        ys.push_back(V("y" + std::to_string(i)));
        zs.push_back(V("z" + std::to_string(i)));
    }
    for (const auto& group : {xs, ys, zs})
        for (VariableId v : group)
            domains.emplace_back(v, b);

    std::vector<std::vector<Value>> xdoms(n, b);
    std::map<Value, CardinalitySet> four{
        {val("1"), CardinalitySet::interval(4, 4)},
        {val("0"), CardinalitySet::interval(0, static_cast<int>(n))},
    };
    std::vector<ConstraintPtr> p_parts;
    p_parts.push_back(std::make_shared<EgcConstraint>("A", xs, xdoms, four));
    for (std::size_t i = 1; i <= n; ++i) {
        auto xi = "x" + std::to_string(i), yi = "y" + std::to_string(i);
        p_parts.push_back(table("eq" + std::to_string(i), {xi, yi}, {b, b},
                                {{"0", "0"}, {"1", "1"}}));
    }

    VarList yz = ys;
    yz.insert(yz.end(), zs.begin(), zs.end());
    yz = sorted_vars(std::move(yz));
    std::vector<std::vector<Value>> yzdoms(2 * n, b);
    std::map<Value, CardinalitySet> half{
        {val("1"), CardinalitySet::interval(static_cast<int>(n), static_cast<int>(n))},
        {val("0"), CardinalitySet::interval(static_cast<int>(n), static_cast<int>(n))},
    };
    auto B = std::make_shared<EgcConstraint>("B", yz, yzdoms, half);

    auto cp = std::make_shared<SubproblemConstraint>("SP", p_parts);
    auto cq = std::make_shared<SubproblemConstraint>("SQ", std::vector<ConstraintPtr>{B});
    return CspInstance(std::move(domains), {cp, cq});
}

/// Two always-satisfied cardinality constraints over the same ten variables:
/// every projection onto the shared scope has 2^10 solutions, which dwarfs
/// the instance size.
inline CspInstance dense_instance() {
    auto b = dom({"0", "1"});
    VarList ss;
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (int i = 0; i < 10; ++i) {
        ss.push_back(V("s" + std::to_string(i)));
        domains.emplace_back(ss.back(), b);
    }
    ss = sorted_vars(std::move(ss));
    std::vector<std::vector<Value>> doms(10, b);
    std::map<Value, CardinalitySet> any{
        {val("0"), CardinalitySet::interval(0, 10)},
        {val("1"), CardinalitySet::interval(0, 10)},
    };
    auto e1 = std::make_shared<EgcConstraint>("E1", ss, doms, any);
    auto e2 = std::make_shared<EgcConstraint>("E2", ss, doms, any);
    return CspInstance(std::move(domains), {e1, e2});
}

/// Random instance over `n` variables with domains of size ≤ max_dom, built
/// from table, negative, and interval-EGC constraints (all offer PAC).
/// Every variable is covered by some scope.
inline CspInstance random_pac_instance(std::mt19937_64& rng, std::size_t n = 4,
                                       int max_dom = 3) {
    static const std::vector<std::string> value_texts{"0", "1", "2"};
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    VarList all;
    for (std::size_t i = 0; i < n; ++i) {
        VariableId v = VariableId::of("u" + std::to_string(i + 1));
        int ds = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_dom));
        std::vector<Value> d;
        for (int j = 0; j < ds; ++j)
            d.push_back(Value::of(value_texts[static_cast<std::size_t>(j)]));
        domains.emplace_back(v, d);
        all.push_back(v);
    }

    auto domain_of = [&](VariableId v) -> const std::vector<Value>& {
        for (const auto& [var, d] : domains)
            if (var == v)
                return d;
        throw std::logic_error("unknown var");
    };

    std::size_t num_constraints = 1 + rng() % 3;
    std::vector<ConstraintPtr> cs;
    std::set<VariableId> covered;
    for (std::size_t ci = 0; ci < num_constraints || covered.size() < n; ++ci) {
        std::size_t arity = 1 + rng() % std::min<std::size_t>(3, n);
        std::set<VariableId> scope_set;
        if (covered.size() < n) // steer towards uncovered variables first
            for (VariableId v : all)
                if (!covered.count(v) && scope_set.size() < arity) scope_set.insert(v);
        while (scope_set.size() < arity)
            scope_set.insert(all[rng() % n]);
        VarList scope(scope_set.begin(), scope_set.end());
        std::vector<std::vector<Value>> doms;
        for (VariableId v : scope)
            doms.push_back(domain_of(v));

        std::vector<std::vector<Value>> tuples;
        std::vector<std::size_t> idx(scope.size(), 0);
        for (bool done = scope.empty(); !done;) {
            std::vector<Value> t;
            for (std::size_t i = 0; i < scope.size(); ++i)
                t.push_back(doms[i][idx[i]]);
            tuples.push_back(std::move(t));
            done = true;
            for (std::size_t i = scope.size(); i-- > 0;) {
                if (++idx[i] < doms[i].size()) { done = false; break; }
                idx[i] = 0;
            }
        }

        std::string label = "c" + std::to_string(cs.size() + 1);
        switch (rng() % 3) {
        case 0: {
            std::vector<std::vector<Value>> rows;
            for (auto& t : tuples)
                if (rng() % 4) rows.push_back(t); // keep ~3/4
            if (rows.empty())
                rows.push_back(tuples[rng() % tuples.size()]);
            cs.push_back(std::make_shared<TableConstraint>(label, scope, doms, rows));
            break;
        }
        case 1: {
            std::vector<std::vector<Value>> rows;
            for (auto& t : tuples)
                if (rng() % 4 == 0) rows.push_back(t); // forbid ~1/4
            cs.push_back(std::make_shared<NegativeConstraint>(label, scope, doms, rows));
            break;
        }
        default: {
            std::set<Value> value_set;
            for (const auto& d : doms)
                value_set.insert(d.begin(), d.end());
            std::map<Value, CardinalitySet> card;
            int m = static_cast<int>(scope.size());
            for (Value a : value_set) {
                int lo = static_cast<int>(rng() % static_cast<unsigned>(m + 1));
                int hi = lo + static_cast<int>(rng() % static_cast<unsigned>(m - lo + 1));
                card[a] = CardinalitySet::interval(lo, hi);
            }
            cs.push_back(std::make_shared<EgcConstraint>(label, scope, doms, card));
            break;
        }
        }
        for (VariableId v : scope)
            covered.insert(v);
    }
    return CspInstance(std::move(domains), std::move(cs));
}

} // namespace gcsp::test
