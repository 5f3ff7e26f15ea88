#include "globalcsp/assignment.hpp"

#include <algorithm>

#include "globalcsp/errors.hpp"

namespace gcsp {

namespace {

std::string var_list_text(const VarList& vars) {
    std::string out;
    for (const auto& v : vars) {
        if (!out.empty())
            out += ",";
        out += v.name();
    }
    return out;
}

} // namespace

Assignment::Assignment(std::initializer_list<Binding> bindings)
    : Assignment(from_pairs(std::vector<Binding>(bindings))) {}

Assignment Assignment::from_pairs(std::vector<Binding> bindings) {
    std::sort(bindings.begin(), bindings.end(),
              [](const Binding& a, const Binding& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < bindings.size(); ++i)
        if (bindings[i].first == bindings[i - 1].first)
            throw ScopeError("assignment binds variable '" +
                             std::string(bindings[i].first.name()) + "' twice");
    Assignment theta;
    theta.bindings_ = std::move(bindings);
    return theta;
}

VarList Assignment::variables() const {
    VarList vars;
    vars.reserve(bindings_.size());
    for (const auto& [v, _] : bindings_)
        vars.push_back(v);
    return vars;
}

bool Assignment::defines(VariableId v) const {
    return value_of(v).has_value();
}

std::optional<Value> Assignment::value_of(VariableId v) const {
    auto it = std::lower_bound(bindings_.begin(), bindings_.end(), v,
                               [](const Binding& b, VariableId x) { return b.first < x; });
    if (it != bindings_.end() && it->first == v)
        return it->second;
    return std::nullopt;
}

Value Assignment::at(VariableId v) const {
    auto val = value_of(v);
    if (!val)
        throw ScopeError("assignment does not bind variable '" + std::string(v.name()) + "'");
    return *val;
}

Assignment Assignment::restrict_to(const VarList& W) const {
    std::vector<Binding> out;
    out.reserve(W.size());
    for (const auto& v : W) {
        auto val = value_of(v);
        if (!val)
            throw ScopeError("restriction target contains unbound variable '" +
                             std::string(v.name()) + "'");
        out.emplace_back(v, *val);
    }
    return from_pairs(std::move(out));
}

Assignment Assignment::disjoint_union(const Assignment& other) const {
    std::vector<Binding> out;
    out.reserve(bindings_.size() + other.bindings_.size());
    auto a = bindings_.begin();
    auto b = other.bindings_.begin();
    while (a != bindings_.end() && b != other.bindings_.end()) {
        if (a->first == b->first)
            throw DisjointError("assignments are not disjoint: both bind '" +
                                std::string(a->first.name()) + "'");
        if (a->first < b->first)
            out.push_back(*a++);
        else
            out.push_back(*b++);
    }
    out.insert(out.end(), a, bindings_.end());
    out.insert(out.end(), b, other.bindings_.end());
    Assignment theta;
    theta.bindings_ = std::move(out);
    return theta;
}

bool Assignment::consistent_with(const Assignment& other) const {
    auto a = bindings_.begin();
    auto b = other.bindings_.begin();
    while (a != bindings_.end() && b != other.bindings_.end()) {
        if (a->first == b->first) {
            if (a->second != b->second)
                return false;
            ++a;
            ++b;
        } else if (a->first < b->first) {
            ++a;
        } else {
            ++b;
        }
    }
    return true;
}

bool Assignment::extends(const Assignment& other) const {
    for (const auto& [v, val] : other.bindings_) {
        auto mine = value_of(v);
        if (!mine || *mine != val)
            return false;
    }
    return true;
}

bool operator<(const Assignment& a, const Assignment& b) {
    auto i = a.bindings_.begin();
    auto j = b.bindings_.begin();
    for (; i != a.bindings_.end() && j != b.bindings_.end(); ++i, ++j) {
        if (i->first != j->first)
            return i->first < j->first;
        if (i->second != j->second)
            return i->second.id() < j->second.id();
    }
    return a.bindings_.size() < b.bindings_.size();
}

Assignment restrict(const Assignment& theta, const VarList& W) {
    return theta.restrict_to(W);
}

Assignment disjoint_union(const Assignment& theta1, const Assignment& theta2) {
    return theta1.disjoint_union(theta2);
}

AssignmentSet AssignmentSet::empty_over(VarList vars) {
    AssignmentSet s;
    s.vars_ = sorted_vars(std::move(vars));
    return s;
}

AssignmentSet AssignmentSet::bottom_only() {
    AssignmentSet s;
    s.members_.push_back(Assignment{});
    return s;
}

AssignmentSet::AssignmentSet(VarList vars, std::vector<Assignment> members)
    : vars_(sorted_vars(std::move(vars))), members_(std::move(members)) {
    for (const auto& theta : members_)
        if (theta.variables() != vars_)
            throw ScopeError("assignment set member is not over {" + var_list_text(vars_) + "}");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool AssignmentSet::contains(const Assignment& theta) const {
    return std::binary_search(members_.begin(), members_.end(), theta);
}

AssignmentSet project_assignments(const AssignmentSet& Theta, const VarList& X) {
    VarList x = sorted_vars(X);
    if (Theta.empty())
        return AssignmentSet::empty_over(x);
    if (!subset_of(x, Theta.variables()))
        throw ScopeError("projection target {" + var_list_text(x) +
                         "} is not a subset of the assignment-set variables");
    if (x.empty())
        return AssignmentSet::bottom_only();
    std::vector<Assignment> out;
    out.reserve(Theta.size());
    for (const auto& theta : Theta.members())
        out.push_back(theta.restrict_to(x));
    return AssignmentSet(std::move(x), std::move(out));
}

} // namespace gcsp
