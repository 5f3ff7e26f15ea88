#pragma once

#include <memory>
#include <string>
#include <vector>

#include "globalcsp/assignment.hpp"
#include "globalcsp/constraint.hpp"
#include "globalcsp/hypergraph.hpp"
#include "globalcsp/symbols.hpp"

namespace gcsp {

/// A CSP instance with global constraints. Variables are kept sorted; each
/// variable carries its own domain and must occur in at least one scope.
class CspInstance {
public:
    CspInstance() = default;
    CspInstance(std::vector<std::pair<VariableId, std::vector<Value>>> domains,
                std::vector<ConstraintPtr> constraints);

    const VarList& variables() const { return variables_; }
    const std::vector<std::vector<Value>>& domains() const { return domains_; }
    const std::vector<Value>& domain_of(VariableId v) const;
    bool has_variable(VariableId v) const { return contains_var(variables_, v); }

    const std::vector<ConstraintPtr>& constraints() const { return constraints_; }
    bool has_constraint(const ConstraintPtr& c) const;
    ConstraintPtr constraint_by_label(const std::string& label) const;

    /// Builds an assignment after validating every binding against this
    /// instance (known variable, value inside its domain).
    Assignment assignment(std::vector<Assignment::Binding> bindings) const;

    bool is_solution(const Assignment& theta) const;

    std::size_t size() const;

private:
    VarList variables_;
    std::vector<std::vector<Value>> domains_;
    std::vector<ConstraintPtr> constraints_;
};

/// |P| = |V| + sum of domain sizes + sum of constraint description sizes.
std::size_t instance_size(const CspInstance& P);

/// Constraint hypergraph: vertices are the variables, edges the distinct scopes.
Hypergraph hypergraph_of(const CspInstance& P);

/// Projection of the whole instance onto X (nonempty subset of the variables).
/// Constraints whose scope lies inside X are kept as-is; the rest are wrapped,
/// which requires PAC.
CspInstance project_instance(const CspInstance& P, const VarList& X);

} // namespace gcsp
