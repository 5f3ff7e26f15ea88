#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "globalcsp/hypergraph.hpp"
#include "globalcsp/instance.hpp"
#include "globalcsp/rational.hpp"

namespace gcsp {

struct TreeDecomposition {
    std::vector<VarList> bags;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    std::size_t width() const; // max bag size - 1 (0 for no bags)
};

/// True iff all three tree-decomposition conditions hold for G. Empty bags
/// are rejected. A malformed tree (bad node indices, cycles, disconnected)
/// throws ValidationError.
bool validate_tree_decomposition(const Hypergraph& G, const TreeDecomposition& td);

struct FractionalCover {
    std::vector<Rational> weights; // aligned to G.edges()
    VarList covered;               // the set X the weights cover
};

struct CoverResult {
    Rational value;
    FractionalCover cover;
};

/// Exact fractional edge cover number of X in G (rational simplex).
/// X must be nonempty; a vertex of X outside every edge is infeasible.
CoverResult fractional_edge_cover_number(const Hypergraph& G, const VarList& X);

/// Exact integral edge cover number of X (set-cover search).
std::pair<std::size_t, FractionalCover> edge_cover_number(const Hypergraph& G,
                                                          const VarList& X);

struct WidthReport {
    std::string measure; // "tw" | "ghw" | "fhw" | "subw-unsupported"
    bool supported = true;
    Rational value;
    TreeDecomposition witness;
    std::vector<FractionalCover> bag_covers; // one per bag for ghw/fhw
};

/// Exact treewidth by dynamic programming over vertex subsets.
/// BudgetError when |vertices| exceeds the limit.
WidthReport treewidth_exact(const Hypergraph& G, unsigned limit = 14);

enum class CoverMeasure { rho, rho_star };

/// Exact generalized hypertree width (measure rho) or fractional hypertree
/// width (measure rho_star) on small hypergraphs: the same elimination DP as
/// treewidth with the bag cost replaced by the exact cover number.
WidthReport ghw_and_fhw_exact_small(const Hypergraph& G, CoverMeasure measure,
                                    unsigned limit = 10);

/// subw is deliberately not computed; reports carry this tag instead.
WidthReport subw_report();

/// Re-checks that a report's witness certifies its value.
bool validate_width_report(const Hypergraph& G, const WidthReport& report);

/// ⌈|P|^{ρ*(hyp(P))}⌉ for classic (all-table) instances.
BigInt solution_bound(const CspInstance& P);

/// Min-fill elimination heuristic; always returns a valid decomposition.
TreeDecomposition min_fill_decomposition(const Hypergraph& G);

} // namespace gcsp
