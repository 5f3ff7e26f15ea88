#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "globalcsp/assignment.hpp"
#include "globalcsp/symbols.hpp"

namespace gcsp {

enum class ConstraintKind {
    table,
    negative,
    egc,
    projected,
    augmented,
    subproblem,
    join,
};

enum class PacCapability {
    none,        // extension checking not offered
    native,      // polynomial extension check
    table_backed // finite extension list materialized
};

/// A global constraint e[δ]: a constraint type (kind) plus a description.
/// Constraints capture the domains of their scope variables at construction,
/// so evaluate / pac_extends are self-contained; instances re-check that the
/// captured domains match their own.
class GlobalConstraint {
public:
    virtual ~GlobalConstraint() = default;

    ConstraintKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    const VarList& scope() const { return scope_; }
    std::size_t arity() const { return scope_.size(); }
    /// Captured domain of a scope variable, sorted by value text.
    const std::vector<Value>& domain_of(VariableId v) const;
    const std::vector<std::vector<Value>>& scope_domains() const { return domains_; }

    /// |δ|: description size per kind (see instance_size).
    virtual std::size_t description_size() const = 0;

    /// θ ∈ e[δ]? ScopeError unless variables(θ) = scope.
    virtual bool evaluate(const Assignment& theta) const = 0;

    virtual PacCapability pac_capability() const = 0;
    bool has_pac() const { return pac_capability() != PacCapability::none; }

    /// Does θ extend to a full satisfying assignment of the scope?
    /// ScopeError unless variables(θ) ⊆ scope; CapabilityError without PAC.
    virtual bool pac_extends(const Assignment& theta) const = 0;

    std::size_t scope_position(VariableId v) const; // index into scope_

protected:
    GlobalConstraint(ConstraintKind kind, std::string label, VarList scope,
                     std::vector<std::vector<Value>> domains);
    void check_full(const Assignment& theta) const;
    void check_partial(const Assignment& theta) const;

    ConstraintKind kind_;
    std::string label_;
    VarList scope_;                           // sorted
    std::vector<std::vector<Value>> domains_; // aligned to scope_, each sorted by text
};

using ConstraintPtr = std::shared_ptr<const GlobalConstraint>;

/// Rows listed positively. Rows are stored aligned to the sorted scope and
/// kept in canonical (value-text lexicographic) order.
class TableConstraint final : public GlobalConstraint {
public:
    TableConstraint(std::string label, VarList scope,
                    std::vector<std::vector<Value>> domains,
                    std::vector<std::vector<Value>> rows);

    /// Rows given as assignments over the scope.
    static std::shared_ptr<const TableConstraint>
    from_assignments(std::string label, VarList scope,
                     std::vector<std::vector<Value>> domains,
                     const std::vector<Assignment>& rows);

    const std::vector<std::vector<Value>>& rows() const { return rows_; }
    Assignment row_as_assignment(std::size_t i) const;

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override { return PacCapability::table_backed; }
    bool pac_extends(const Assignment& theta) const override;

private:
    std::vector<std::vector<Value>> rows_;
};

/// Rows listed negatively (forbidden tuples).
class NegativeConstraint final : public GlobalConstraint {
public:
    NegativeConstraint(std::string label, VarList scope,
                       std::vector<std::vector<Value>> domains,
                       std::vector<std::vector<Value>> forbidden);

    const std::vector<std::vector<Value>>& forbidden() const { return rows_; }

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override { return PacCapability::native; }
    /// θ extends iff #(forbidden rows consistent with θ) < Π_{v unassigned} |D(v)|.
    bool pac_extends(const Assignment& theta) const override;

private:
    std::vector<std::vector<Value>> rows_;
};

/// A cardinality set K(a): an interval [lo,hi] or an explicit set of counts.
/// Contiguous explicit sets normalize to interval form.
struct CardinalitySet {
    bool is_interval = true;
    int lo = 0;
    int hi = 0;
    std::vector<int> members; // sorted, when !is_interval

    static CardinalitySet interval(int lo, int hi);
    static CardinalitySet explicit_set(std::vector<int> members);
    bool contains(int n) const;
    std::size_t encoding_size() const { return is_interval ? 2 : members.size(); }
};

/// Extended global cardinality constraint: for every a ∈ D(scope), the number
/// of scope variables assigned a must lie in K(a).
class EgcConstraint final : public GlobalConstraint {
public:
    EgcConstraint(std::string label, VarList scope,
                  std::vector<std::vector<Value>> domains,
                  std::map<Value, CardinalitySet> cardinality);

    const std::vector<Value>& counted_values() const { return values_; }
    const CardinalitySet& cardinality_of(Value a) const;

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    /// PAC only when every cardinality set is an interval (flow feasibility);
    /// general EGC satisfiability is NP-hard.
    PacCapability pac_capability() const override;
    bool pac_extends(const Assignment& theta) const override;

    /// Feasibility of completing committed per-value counts using the given
    /// unassigned scope positions (used by the enumeration fast path).
    bool feasible_completion(const std::vector<int>& committed_counts,
                             const std::vector<std::size_t>& unassigned_positions) const;
    std::size_t value_index(Value a) const; // position in counted_values()

private:
    std::vector<Value> values_;            // D(scope), sorted by text
    std::vector<CardinalitySet> card_;     // aligned to values_
    std::vector<std::vector<int>> domain_value_indices_; // per scope position
    bool all_intervals_;
};

/// pj_X(c): scope X, extension = restrictions of the original's extension.
/// Keeps the original description; membership queries delegate to the
/// original's PAC. Projecting a projection re-projects the original.
class ProjectedConstraint final : public GlobalConstraint {
public:
    ProjectedConstraint(std::string label, ConstraintPtr original, VarList X);

    const ConstraintPtr& original() const { return original_; }

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override { return PacCapability::native; }
    bool pac_extends(const Assignment& theta) const override;

private:
    ConstraintPtr original_;
};

/// A back door for a constraint: a variable set W ⊆ scope such that extension
/// checking is polynomial once W is assigned. W = scope is always valid.
struct BackDoorSpec {
    VarList W;
    /// Decides, for θ with variables(θ) ⊇ W (and ⊆ scope), whether θ extends
    /// into the base constraint.
    std::function<bool(const GlobalConstraint&, const Assignment&)> decider;

    static BackDoorSpec full_scope(const ConstraintPtr& base);
};

/// base filtered by an allowed set Θ over a back-door set W:
/// extension = {μ ∈ base : μ|_W ∈ Θ}. Advertises PAC.
class AugmentedConstraint final : public GlobalConstraint {
public:
    AugmentedConstraint(std::string label, ConstraintPtr base, BackDoorSpec bd,
                        AssignmentSet allowed);

    const ConstraintPtr& base() const { return base_; }
    const VarList& back_door() const { return bd_.W; }
    const AssignmentSet& allowed() const { return allowed_; }

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override { return PacCapability::native; }
    bool pac_extends(const Assignment& theta) const override;

private:
    ConstraintPtr base_;
    BackDoorSpec bd_;
    AssignmentSet allowed_;
};

/// Lazy conjunction of two constraints over the union scope. No PAC.
class JoinConstraint final : public GlobalConstraint {
public:
    JoinConstraint(std::string label, ConstraintPtr a, ConstraintPtr b);

    std::size_t description_size() const override;
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override { return PacCapability::none; }
    bool pac_extends(const Assignment& theta) const override;

private:
    ConstraintPtr a_, b_;
};

/// Free-function forms of the two membership queries.
bool evaluate(const ConstraintPtr& c, const Assignment& theta);
bool pac_extends(const ConstraintPtr& c, const Assignment& theta);

/// Join of two constraints: a materialized table when both inputs are tables,
/// otherwise a lazy conjunction wrapper.
ConstraintPtr join(const ConstraintPtr& c1, const ConstraintPtr& c2);

/// pj_X(c). X = scope returns c itself.
ConstraintPtr project_constraint(const ConstraintPtr& c, const VarList& X);

/// augment_with_backdoor (reduction machinery; declared here with the types).
ConstraintPtr augment_with_backdoor(const ConstraintPtr& c, const BackDoorSpec& bd,
                                    const AssignmentSet& Theta);

} // namespace gcsp
