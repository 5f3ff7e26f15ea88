#include "globalcsp/instance.hpp"

#include <algorithm>
#include <set>

#include "globalcsp/errors.hpp"

namespace gcsp {

CspInstance::CspInstance(std::vector<std::pair<VariableId, std::vector<Value>>> domains,
                         std::vector<ConstraintPtr> constraints)
    : constraints_(std::move(constraints)) {
    std::sort(domains.begin(), domains.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    variables_.reserve(domains.size());
    domains_.reserve(domains.size());
    for (auto& [v, dom] : domains) {
        if (!variables_.empty() && variables_.back() == v)
            throw ValidationError("variable '" + std::string(v.name()) + "' listed twice");
        std::sort(dom.begin(), dom.end());
        dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
        if (dom.empty())
            throw DomainError("variable '" + std::string(v.name()) + "' has an empty domain");
        if (dom.size() > 1)
            for (const auto& val : dom)
                if (val.is_star())
                    throw DomainError("variable '" + std::string(v.name()) +
                                      "': '*' may only form a singleton domain");
        variables_.push_back(v);
        domains_.push_back(std::move(dom));
    }

    std::set<std::string> labels;
    std::vector<bool> covered(variables_.size(), false);
    for (const auto& c : constraints_) {
        if (!c)
            throw ValidationError("null constraint");
        if (!labels.insert(c->label()).second)
            throw ValidationError("duplicate constraint label '" + c->label() + "'");
        for (const auto& v : c->scope()) {
            auto it = std::lower_bound(variables_.begin(), variables_.end(), v);
            if (it == variables_.end() || *it != v)
                throw ValidationError("constraint '" + c->label() + "' mentions unknown variable '" +
                                      std::string(v.name()) + "'");
            std::size_t pos = static_cast<std::size_t>(it - variables_.begin());
            if (c->domain_of(v) != domains_[pos])
                throw ValidationError("constraint '" + c->label() +
                                      "' captured a different domain for '" +
                                      std::string(v.name()) + "'");
            covered[pos] = true;
        }
    }
    for (std::size_t i = 0; i < variables_.size(); ++i)
        if (!covered[i])
            throw ValidationError("variable '" + std::string(variables_[i].name()) +
                                  "' occurs in no constraint scope");
}

const std::vector<Value>& CspInstance::domain_of(VariableId v) const {
    auto it = std::lower_bound(variables_.begin(), variables_.end(), v);
    if (it == variables_.end() || *it != v)
        throw ScopeError("unknown variable '" + std::string(v.name()) + "'");
    return domains_[static_cast<std::size_t>(it - variables_.begin())];
}

bool CspInstance::has_constraint(const ConstraintPtr& c) const {
    return std::any_of(constraints_.begin(), constraints_.end(),
                       [&](const ConstraintPtr& d) { return d.get() == c.get(); });
}

ConstraintPtr CspInstance::constraint_by_label(const std::string& label) const {
    for (const auto& c : constraints_)
        if (c->label() == label)
            return c;
    throw ValidationError("no constraint labeled '" + label + "'");
}

Assignment CspInstance::assignment(std::vector<Assignment::Binding> bindings) const {
    for (const auto& [v, val] : bindings) {
        const auto& dom = domain_of(v);
        if (!std::binary_search(dom.begin(), dom.end(), val))
            throw DomainError("value '" + std::string(val.text()) +
                              "' is outside the domain of '" + std::string(v.name()) + "'");
    }
    return Assignment::from_pairs(std::move(bindings));
}

bool CspInstance::is_solution(const Assignment& theta) const {
    if (theta.variables() != variables_)
        return false;
    for (const auto& [v, val] : theta.bindings()) {
        const auto& dom = domain_of(v);
        if (!std::binary_search(dom.begin(), dom.end(), val))
            return false;
    }
    for (const auto& c : constraints_)
        if (!c->evaluate(theta.restrict_to(c->scope())))
            return false;
    return true;
}

std::size_t CspInstance::size() const { return instance_size(*this); }

std::size_t instance_size(const CspInstance& P) {
    std::size_t total = P.variables().size();
    for (const auto& dom : P.domains())
        total += dom.size();
    for (const auto& c : P.constraints())
        total += c->description_size();
    return total;
}

Hypergraph hypergraph_of(const CspInstance& P) {
    std::vector<VarList> edges;
    edges.reserve(P.constraints().size());
    for (const auto& c : P.constraints())
        edges.push_back(c->scope());
    return Hypergraph(P.variables(), std::move(edges));
}

CspInstance project_instance(const CspInstance& P, const VarList& X) {
    VarList x = sorted_vars(X);
    if (x.empty())
        throw ScopeError("projection onto the empty set is rejected");
    if (!subset_of(x, P.variables()))
        throw ScopeError("projection target is not a subset of the variables");

    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    domains.reserve(x.size());
    for (const auto& v : x)
        domains.emplace_back(v, P.domain_of(v));

    std::vector<ConstraintPtr> constraints;
    for (const auto& c : P.constraints()) {
        VarList shared = intersection_of(c->scope(), x);
        if (shared.empty())
            continue;
        constraints.push_back(shared == c->scope() ? c : project_constraint(c, shared));
    }
    return CspInstance(std::move(domains), std::move(constraints));
}

} // namespace gcsp
