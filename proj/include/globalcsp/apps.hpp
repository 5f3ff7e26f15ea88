#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "globalcsp/instance.hpp"

namespace gcsp {

/// A simple undirected graph over named vertices. Kept canonical: vertices
/// sorted and unique, edges as (min,max) pairs, sorted and unique, no loops.
struct Graph {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> edges;
};

/// Validates and canonicalizes. Rejects empty vertex sets, unknown endpoints,
/// self-loops and duplicate vertices/edges.
Graph make_graph(std::vector<std::string> vertices,
                 std::vector<std::pair<std::string, std::string>> edges);

bool is_connected(const Graph& G);

Graph cycle_graph(std::size_t n);    // C_n, n >= 3; vertices v1..vn
Graph complete_graph(std::size_t n); // K_n, n >= 1; vertices v1..vn

/// Name of the boolean edge variable the CGP encoding introduces for {u,v}.
std::string cgp_edge_variable(const std::string& u, const std::string& v);

/// CGP as a CSP: vertex variables with domain {1..|V|}, boolean edge
/// variables, an EGC bounding every label class by alpha, an EGC bounding the
/// number of cut edges by beta, and one ternary table per edge enforcing
/// θ(u) ≠ θ(v) → θ(e) = 1.
CspInstance encode_cgp(const Graph& G, unsigned alpha, unsigned beta);

/// Exhaustive CGP decision: some E' with |E'| <= beta leaves only components
/// with at most alpha vertices. BudgetError when Σ_{i<=beta} C(|E|,i) exceeds
/// the budget.
bool cgp_oracle(const Graph& G, unsigned alpha, unsigned beta);

/// Independent check of a CGP solution: the cut named by the edge variables
/// has at most beta edges and splits G into components of at most alpha
/// vertices.
bool cgp_solution_valid(const Graph& G, unsigned alpha, unsigned beta,
                        const Assignment& theta);

/// 3-colourability as a CSP: domain {r,g,b}, one EGC per edge capping every
/// colour at one occurrence, plus a vacuous full-scope EGC that shapes the
/// hypergraph.
CspInstance encode_3col(const Graph& G);

bool three_colourable(const Graph& G);
std::uint64_t count_three_colourings(const Graph& G);

/// Adjacent vertices carry different colours under theta.
bool three_colouring_valid(const Graph& G, const Assignment& theta);

} // namespace gcsp
