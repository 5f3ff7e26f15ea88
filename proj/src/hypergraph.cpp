#include "globalcsp/hypergraph.hpp"

#include <algorithm>

#include "globalcsp/errors.hpp"

namespace gcsp {

Hypergraph::Hypergraph(VarList vertices, std::vector<VarList> edges)
    : vertices_(sorted_vars(std::move(vertices))) {
    for (auto& e : edges) {
        e = sorted_vars(std::move(e));
        if (e.empty())
            throw ValidationError("hypergraph edge must be nonempty");
        if (!subset_of(e, vertices_))
            throw ValidationError("hyperedge contains a vertex missing from the vertex set");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
}

} // namespace gcsp
