#pragma once

#include <optional>
#include <string>

#include "globalcsp/instance.hpp"
#include "globalcsp/structure.hpp"

namespace gcsp {

/// Chronological backtracking over a static smallest-domain-first order
/// (lexicographic tie-break) with PAC pruning at every node.
/// ApplicabilityError unless every constraint is a table.
std::optional<Assignment> solve_classic(const CspInstance& P);

/// Two-phase evaluation over a validated tree decomposition: leaf-to-root
/// semijoins over the per-bag relations, then root-to-leaf extraction of a
/// witness. ValidationError when td does not validate against hyp(P);
/// BudgetError when the bag relations outgrow the budget.
std::optional<Assignment> solve_via_tree_decomposition(const CspInstance& P,
                                                       const TreeDecomposition& td);

struct SolveReport {
    bool satisfiable = false;
    std::optional<Assignment> solution; // over the original variables
    bool used_backdoors = false;        // non-PAC constraints were augmented first
    bool reduced = false;               // classic reduction succeeded
    bool used_tree_decomposition = false;
    bool used_brute_force = false;      // reduction refused, exhaustive fallback
    std::size_t classic_size = 0;       // |P_CL| when reduced
    std::size_t decomposition_width = 0;
    std::string note;
};

/// End-to-end pipeline: augment non-PAC constraints with full-scope back
/// doors, reduce to a classic instance under the cap |P|^c, compute a tree
/// decomposition (exact treewidth at desk scale, min-fill beyond), solve, and
/// lift the solution back. A refused reduction falls back to exhaustive
/// search when the assignment space fits the budget (with a warning note);
/// otherwise the sparsity error propagates.
SolveReport solve_pipeline(const CspInstance& P, unsigned c);

} // namespace gcsp
