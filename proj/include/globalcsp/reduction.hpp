#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "globalcsp/instance.hpp"

namespace gcsp {

/// iv(δ): union of the pairwise scope intersections of c with the other
/// constraints of P. Membership error if c is not a constraint of P.
VarList intersection_variables(const CspInstance& P, const ConstraintPtr& c);

/// Table constraint induced by c: scope 𝒱(δ), one row θ ⊕ μ* per
/// θ ∈ sol(pj_{iv(δ)}(P)), where μ* assigns STAR to the private variables.
/// The enumeration aborts with a sparsity violation once any level reaches
/// the cap.
ConstraintPtr induced_table_constraint(const CspInstance& P, const ConstraintPtr& c,
                                       std::uint64_t cap);

/// Result of the global→classic reduction, along with a lifting procedure
/// mapping any solution of the classic instance back to a solution of the
/// original (one PAC-guided extension per constraint).
class ClassicReduction {
public:
    ClassicReduction(CspInstance classic, CspInstance original,
                     std::vector<std::pair<ConstraintPtr, VarList>> parts);

    const CspInstance& classic() const { return classic_; }
    const CspInstance& original() const { return original_; }

    Assignment lift(const Assignment& classic_solution) const;

private:
    CspInstance classic_;
    CspInstance original_;
    std::vector<std::pair<ConstraintPtr, VarList>> parts_; // (constraint, iv)
};

/// P_CL: every constraint replaced by its induced table (cap |P|^c); shared
/// variables keep their domains, private ones become {STAR}. Same hypergraph;
/// satisfiable iff P is. Refused with a sparsity violation when a cap hits.
ClassicReduction reduce_to_classic(const CspInstance& P, unsigned c);

using PacMembership = std::function<bool(const ConstraintPtr&)>;
using BackDoorFinder = std::function<BackDoorSpec(const ConstraintPtr&)>;

/// Augments every constraint not in Γ_PAC (per pac_membership) with
/// Θ = sol(pj_W(P ∩ Γ_PAC)), padded with all assignments of the back-door
/// variables that Γ_PAC never mentions. Solution set and hypergraph are
/// preserved and the result is fully PAC. |Θ| may not exceed |P|^c.
CspInstance reduce_backdoors(const CspInstance& P, const PacMembership& pac_membership,
                             const BackDoorFinder& finder, unsigned c);

/// A whole subproblem viewed as a single global constraint over 𝒱(part).
/// PAC is available when all constituents advertise it (seeded search with
/// per-constituent pruning).
class SubproblemConstraint final : public GlobalConstraint {
public:
    SubproblemConstraint(std::string label, std::vector<ConstraintPtr> parts);

    const std::vector<ConstraintPtr>& parts() const { return parts_; }

    std::size_t description_size() const override; // sum of the constituents'
    bool evaluate(const Assignment& theta) const override;
    PacCapability pac_capability() const override;
    bool pac_extends(const Assignment& theta) const override;

private:
    std::vector<ConstraintPtr> parts_;
};

/// S = {Q_1, ..., Q_m}: ⊔S rebuilds the union; proper means no part's
/// constraint set is a subset of another's (by constraint identity).
struct SubproblemDecomposition {
    std::vector<CspInstance> parts;
};

/// ⟨V1 ∪ V2, C1 ∪ C2⟩; shared variables must have identical domains.
/// Constraints occurring in both operands (by identity) appear once.
CspInstance subproblem_union(const CspInstance& Q1, const CspInstance& Q2);

/// ⊔S. ValidationError on an empty decomposition.
CspInstance decomposition_union(const SubproblemDecomposition& S);

/// Throws ValidationError unless S is proper.
void validate_decomposition(const SubproblemDecomposition& S);

/// One induced table per part, each part viewed as a single constraint over
/// 𝒱(part). Identical to reduce_to_classic for the one-part-per-constraint
/// decomposition.
ClassicReduction reduce_decomposition_to_classic(const SubproblemDecomposition& S,
                                                 unsigned c);

} // namespace gcsp
