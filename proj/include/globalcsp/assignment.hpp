#pragma once

#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "globalcsp/symbols.hpp"

namespace gcsp {

/// A partial assignment θ: a finite map from variables to values.
/// The empty assignment ⊥ is Assignment{}.
class Assignment {
public:
    using Binding = std::pair<VariableId, Value>;

    Assignment() = default;
    Assignment(std::initializer_list<Binding> bindings);
    static Assignment from_pairs(std::vector<Binding> bindings);

    const std::vector<Binding>& bindings() const { return bindings_; }
    VarList variables() const;
    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }

    bool defines(VariableId v) const;
    std::optional<Value> value_of(VariableId v) const;
    Value at(VariableId v) const; // ScopeError if unbound

    /// θ|_W. ScopeError unless W ⊆ variables(θ).
    Assignment restrict_to(const VarList& W) const;
    /// θ ⊕ θ′. DisjointError if any variable is bound by both.
    Assignment disjoint_union(const Assignment& other) const;

    bool consistent_with(const Assignment& other) const; // agree on shared vars
    bool extends(const Assignment& other) const;         // this ⊇ other

    friend bool operator==(const Assignment& a, const Assignment& b) {
        return a.bindings_ == b.bindings_;
    }
    friend bool operator!=(const Assignment& a, const Assignment& b) {
        return !(a == b);
    }
    /// Total order: variable-wise, then value id. Canonical within a process.
    friend bool operator<(const Assignment& a, const Assignment& b);

private:
    // sorted by variable
    std::vector<Binding> bindings_;
};

/// θ|_W.
Assignment restrict(const Assignment& theta, const VarList& W);
/// θ1 ⊕ θ2; the arguments must not share variables.
Assignment disjoint_union(const Assignment& theta1, const Assignment& theta2);

/// A set of assignments sharing one variable set. The empty set keeps its
/// declared variable set for plumbing but compares equal to any empty set.
class AssignmentSet {
public:
    AssignmentSet() = default; // ∅ over ∅
    static AssignmentSet empty_over(VarList vars);
    static AssignmentSet bottom_only(); // {⊥}
    AssignmentSet(VarList vars, std::vector<Assignment> members);

    const VarList& variables() const { return vars_; }
    const std::vector<Assignment>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    bool contains(const Assignment& theta) const;

    friend bool operator==(const AssignmentSet& a, const AssignmentSet& b) {
        return a.members_ == b.members_;
    }
    friend bool operator!=(const AssignmentSet& a, const AssignmentSet& b) {
        return !(a == b);
    }

private:
    VarList vars_;
    std::vector<Assignment> members_; // sorted, unique
};

/// π_X(Θ). ScopeError unless X ⊆ variables(Θ) (or Θ = ∅, which projects to ∅).
/// π_∅(Θ) = {⊥} for nonempty Θ.
AssignmentSet project_assignments(const AssignmentSet& Theta, const VarList& X);

} // namespace gcsp
