#include "globalcsp/reduction.hpp"

#include <algorithm>
#include <limits>

#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"

namespace gcsp {

namespace {

std::uint64_t clamp_to_u64(const BigInt& b) {
    return b > BigInt(UINT64_MAX) ? UINT64_MAX : static_cast<std::uint64_t>(b);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        return 0;
    if (a > UINT64_MAX / b)
        return UINT64_MAX;
    return a * b;
}

} // namespace

VarList intersection_variables(const CspInstance& P, const ConstraintPtr& c) {
    if (!P.has_constraint(c))
        throw ValidationError("constraint '" + c->label() +
                              "' is not a constraint of the instance");
    VarList iv;
    for (const auto& d : P.constraints()) {
        if (d.get() == c.get())
            continue;
        iv = union_of(iv, intersection_of(c->scope(), d->scope()));
    }
    return iv;
}

ConstraintPtr induced_table_constraint(const CspInstance& P, const ConstraintPtr& c,
                                       std::uint64_t cap) {
    VarList iv = intersection_variables(P, c);
    VarList priv = difference_of(c->scope(), iv);

    std::vector<Assignment> shared_part;
    if (iv.empty()) {
        if (!c->has_pac())
            throw CapabilityError("constraint '" + c->label() +
                                  "': satisfiability probe requires PAC");
        if (c->pac_extends(Assignment{}))
            shared_part.push_back(Assignment{});
    } else {
        CspInstance Pi = project_instance(P, iv);
        auto r = detail::levelwise_solutions(Pi, Pi.variables(), cap, cap,
                                             enumeration_budget(), true);
        if (r.level_cap_hit || r.final_cap_hit)
            throw SparsityError("induced table for '" + c->label() +
                                    "' exceeds the cap of " + std::to_string(cap) +
                                    " rows; reduction refused",
                                c->label());
        shared_part = std::move(r.solutions);
    }

    std::vector<Assignment::Binding> star_pad;
    star_pad.reserve(priv.size());
    for (const auto& v : priv)
        star_pad.emplace_back(v, Value::star());

    std::vector<std::vector<Value>> domains;
    domains.reserve(c->scope().size());
    for (const auto& v : c->scope())
        domains.push_back(contains_var(iv, v) ? P.domain_of(v)
                                              : std::vector<Value>{Value::star()});

    std::vector<Assignment> rows;
    rows.reserve(shared_part.size());
    for (const auto& theta : shared_part) {
        auto bindings = theta.bindings();
        bindings.insert(bindings.end(), star_pad.begin(), star_pad.end());
        rows.push_back(Assignment::from_pairs(std::move(bindings)));
    }
    return TableConstraint::from_assignments("ic(" + c->label() + ")", c->scope(),
                                             std::move(domains), rows);
}

ClassicReduction::ClassicReduction(CspInstance classic, CspInstance original,
                                   std::vector<std::pair<ConstraintPtr, VarList>> parts)
    : classic_(std::move(classic)), original_(std::move(original)),
      parts_(std::move(parts)) {}

Assignment ClassicReduction::lift(const Assignment& classic_solution) const {
    if (!classic_.is_solution(classic_solution))
        throw ValidationError("lift expects a solution of the reduced instance");

    std::vector<Assignment::Binding> combined;
    VarList shared;
    for (const auto& [c, iv] : parts_)
        shared = union_of(shared, iv);
    for (const auto& v : shared)
        combined.emplace_back(v, classic_solution.at(v));

    for (const auto& [c, iv] : parts_) {
        Assignment partial = classic_solution.restrict_to(iv);
        VarList priv = difference_of(c->scope(), iv);
        for (const auto& v : priv) {
            bool extended = false;
            for (const auto& val : original_.domain_of(v)) {
                auto bindings = partial.bindings();
                bindings.emplace_back(v, val);
                Assignment candidate = Assignment::from_pairs(std::move(bindings));
                if (c->pac_extends(candidate)) {
                    partial = std::move(candidate);
                    extended = true;
                    break;
                }
            }
            if (!extended)
                throw InfeasibleError("lift failed to extend '" + c->label() +
                                      "' over '" + std::string(v.name()) + "'");
        }
        for (const auto& v : priv)
            combined.emplace_back(v, partial.at(v));
    }
    return Assignment::from_pairs(std::move(combined));
}

ClassicReduction reduce_to_classic(const CspInstance& P, unsigned c) {
    for (const auto& ci : P.constraints())
        if (!ci->has_pac())
            throw CapabilityError("constraint '" + ci->label() +
                                  "' offers no PAC; reduction is unavailable");

    const std::uint64_t cap = clamp_to_u64(
        boost::multiprecision::pow(BigInt(instance_size(P)), static_cast<int>(c)));

    std::vector<std::pair<ConstraintPtr, VarList>> parts;
    std::vector<ConstraintPtr> tables;
    VarList shared;
    for (const auto& ci : P.constraints()) {
        VarList iv = intersection_variables(P, ci);
        tables.push_back(induced_table_constraint(P, ci, cap));
        shared = union_of(shared, iv);
        parts.emplace_back(ci, std::move(iv));
    }

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    domains.reserve(P.variables().size());
    for (const auto& v : P.variables())
        domains.emplace_back(v, contains_var(shared, v)
                                    ? P.domain_of(v)
                                    : std::vector<Value>{Value::star()});

    CspInstance classic(std::move(domains), std::move(tables));
    return ClassicReduction(std::move(classic), P, std::move(parts));
}

CspInstance reduce_backdoors(const CspInstance& P, const PacMembership& pac_membership,
                             const BackDoorFinder& finder, unsigned c) {
    std::vector<ConstraintPtr> pac_part;
    std::vector<ConstraintPtr> rest;
    for (const auto& ci : P.constraints())
        (pac_membership(ci) ? pac_part : rest).push_back(ci);
    if (rest.empty())
        return P;

    VarList covered;
    for (const auto& ci : pac_part)
        covered = union_of(covered, ci->scope());
    std::vector<std::pair<VariableId, std::vector<Value>>> pac_domains;
    for (const auto& v : covered)
        pac_domains.emplace_back(v, P.domain_of(v));
    CspInstance pac_instance(std::move(pac_domains), pac_part);

    const BigInt bound =
        boost::multiprecision::pow(BigInt(instance_size(P)), static_cast<int>(c));
    const std::uint64_t cap = clamp_to_u64(bound + 1);

    std::vector<ConstraintPtr> result = pac_part;
    for (const auto& ci : rest) {
        BackDoorSpec bd;
        try {
            bd = finder(ci);
        } catch (const Error&) {
            throw CapabilityError("no back door available for constraint '" +
                                  ci->label() + "'");
        }
        if (!bd.decider)
            throw CapabilityError("no back door available for constraint '" +
                                  ci->label() + "'");
        bd.W = sorted_vars(bd.W);

        VarList inside = intersection_of(bd.W, covered);
        VarList outside = difference_of(bd.W, inside);

        std::vector<Assignment> core;
        if (inside.empty()) {
            core.push_back(Assignment{});
        } else {
            CspInstance Pi = project_instance(pac_instance, inside);
            auto r = detail::levelwise_solutions(Pi, Pi.variables(), cap, cap,
                                                 enumeration_budget(), true);
            if (r.level_cap_hit || r.final_cap_hit)
                throw SparsityError("back-door cover for '" + ci->label() +
                                        "' exceeds |P|^" + std::to_string(c),
                                    ci->label());
            core = std::move(r.solutions);
        }

        std::uint64_t padding = 1;
        for (const auto& v : outside)
            padding = sat_mul(padding, P.domain_of(v).size());
        if (BigInt(sat_mul(core.size(), padding)) > bound)
            throw SparsityError("back-door cover for '" + ci->label() +
                                    "' exceeds |P|^" + std::to_string(c),
                                ci->label());

        std::vector<Assignment> allowed;
        allowed.reserve(core.size() * padding);
        std::vector<std::size_t> odo(outside.size(), 0);
        while (true) {
            std::vector<Assignment::Binding> pad;
            pad.reserve(outside.size());
            for (std::size_t i = 0; i < outside.size(); ++i)
                pad.emplace_back(outside[i], P.domain_of(outside[i])[odo[i]]);
            Assignment padding_part = Assignment::from_pairs(pad);
            for (const auto& tau : core)
                allowed.push_back(tau.disjoint_union(padding_part));
            std::size_t i = outside.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++odo[i] < P.domain_of(outside[i]).size()) {
                    done = false;
                    break;
                }
                odo[i] = 0;
            }
            if (done)
                break;
        }

        result.push_back(augment_with_backdoor(ci, bd, AssignmentSet(bd.W, allowed)));
    }

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (const auto& v : P.variables())
        domains.emplace_back(v, P.domain_of(v));
    return CspInstance(std::move(domains), std::move(result));
}

SubproblemConstraint::SubproblemConstraint(std::string label,
                                           std::vector<ConstraintPtr> parts)
    : GlobalConstraint(ConstraintKind::subproblem, std::move(label), {}, {}),
      parts_(std::move(parts)) {
    if (parts_.empty())
        throw ValidationError("subproblem constraint needs at least one constituent");
    for (const auto& p : parts_) {
        if (!p)
            throw ValidationError("null constituent");
        scope_ = union_of(scope_, p->scope());
    }
    domains_.reserve(scope_.size());
    for (const auto& v : scope_) {
        const std::vector<Value>* dom = nullptr;
        for (const auto& p : parts_) {
            if (!contains_var(p->scope(), v))
                continue;
            if (dom && *dom != p->domain_of(v))
                throw DomainError("constituents disagree on the domain of '" +
                                  std::string(v.name()) + "'");
            dom = &p->domain_of(v);
        }
        domains_.push_back(*dom);
    }
}

std::size_t SubproblemConstraint::description_size() const {
    std::size_t total = 0;
    for (const auto& p : parts_)
        total += p->description_size();
    return total;
}

bool SubproblemConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    for (const auto& p : parts_)
        if (!p->evaluate(theta.restrict_to(p->scope())))
            return false;
    return true;
}

PacCapability SubproblemConstraint::pac_capability() const {
    for (const auto& p : parts_)
        if (!p->has_pac())
            return PacCapability::none;
    return PacCapability::native;
}

bool SubproblemConstraint::pac_extends(const Assignment& theta) const {
    if (!has_pac())
        throw CapabilityError("constraint '" + label_ +
                              "': some constituent offers no PAC");
    check_partial(theta);
    for (const auto& p : parts_)
        if (!p->pac_extends(theta.restrict_to(intersection_of(p->scope(),
                                                              theta.variables()))))
            return false;

    VarList missing = difference_of(scope_, theta.variables());
    if (missing.empty())
        return true;

    // depth-first extension with per-constituent pruning
    std::uint64_t nodes = 0;
    const std::uint64_t budget = enumeration_budget();
    std::function<bool(const Assignment&, std::size_t)> extend =
        [&](const Assignment& partial, std::size_t next) -> bool {
        if (next == missing.size())
            return true;
        VariableId v = missing[next];
        for (const auto& val : domain_of(v)) {
            if (++nodes > budget)
                throw BudgetError("subproblem extension search exceeded the budget");
            auto bindings = partial.bindings();
            bindings.emplace_back(v, val);
            Assignment candidate = Assignment::from_pairs(std::move(bindings));
            bool ok = true;
            for (const auto& p : parts_) {
                if (!contains_var(p->scope(), v))
                    continue;
                if (!p->pac_extends(candidate.restrict_to(
                        intersection_of(p->scope(), candidate.variables())))) {
                    ok = false;
                    break;
                }
            }
            if (ok && extend(candidate, next + 1))
                return true;
        }
        return false;
    };
    return extend(theta, 0);
}

CspInstance subproblem_union(const CspInstance& Q1, const CspInstance& Q2) {
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (const auto& v : Q1.variables())
        domains.emplace_back(v, Q1.domain_of(v));
    for (const auto& v : Q2.variables()) {
        if (Q1.has_variable(v)) {
            if (Q1.domain_of(v) != Q2.domain_of(v))
                throw DomainError("union operands disagree on the domain of '" +
                                  std::string(v.name()) + "'");
            continue;
        }
        domains.emplace_back(v, Q2.domain_of(v));
    }
    std::vector<ConstraintPtr> constraints = Q1.constraints();
    for (const auto& c : Q2.constraints()) {
        bool dup = std::any_of(constraints.begin(), constraints.end(),
                               [&](const ConstraintPtr& d) { return d.get() == c.get(); });
        if (!dup)
            constraints.push_back(c);
    }
    return CspInstance(std::move(domains), std::move(constraints));
}

CspInstance decomposition_union(const SubproblemDecomposition& S) {
    if (S.parts.empty())
        throw ValidationError("empty subproblem decomposition");
    CspInstance u = S.parts.front();
    for (std::size_t i = 1; i < S.parts.size(); ++i)
        u = subproblem_union(u, S.parts[i]);
    return u;
}

void validate_decomposition(const SubproblemDecomposition& S) {
    if (S.parts.empty())
        throw ValidationError("empty subproblem decomposition");
    auto key = [](const CspInstance& Q) {
        std::vector<const GlobalConstraint*> ptrs;
        for (const auto& c : Q.constraints())
            ptrs.push_back(c.get());
        std::sort(ptrs.begin(), ptrs.end());
        return ptrs;
    };
    std::vector<std::vector<const GlobalConstraint*>> keys;
    keys.reserve(S.parts.size());
    for (const auto& part : S.parts)
        keys.push_back(key(part));
    for (std::size_t i = 0; i < keys.size(); ++i)
        for (std::size_t j = 0; j < keys.size(); ++j) {
            if (i == j)
                continue;
            if (std::includes(keys[j].begin(), keys[j].end(), keys[i].begin(),
                              keys[i].end()))
                throw ValidationError("decomposition is not proper: part " +
                                      std::to_string(i) + " is a subproblem of part " +
                                      std::to_string(j));
        }
}

ClassicReduction reduce_decomposition_to_classic(const SubproblemDecomposition& S,
                                                 unsigned c) {
    validate_decomposition(S);
    CspInstance u = decomposition_union(S);

    std::vector<ConstraintPtr> wrapped;
    wrapped.reserve(S.parts.size());
    for (std::size_t i = 0; i < S.parts.size(); ++i)
        wrapped.push_back(std::make_shared<SubproblemConstraint>(
            "sub" + std::to_string(i), S.parts[i].constraints()));

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (const auto& v : u.variables())
        domains.emplace_back(v, u.domain_of(v));
    CspInstance grouped(std::move(domains), std::move(wrapped));

    // solutions of the grouped instance are exactly those of ⊔S
    return reduce_to_classic(grouped, c);
}

} // namespace gcsp
