#pragma once

#include <vector>

#include "globalcsp/symbols.hpp"

namespace gcsp {

/// A hypergraph over variable vertices. Hyperedges are canonical (sorted,
/// duplicate-free) and stored as a sorted set, so equal hypergraphs compare
/// equal structurally.
class Hypergraph {
public:
    Hypergraph() = default;
    Hypergraph(VarList vertices, std::vector<VarList> edges);

    const VarList& vertices() const { return vertices_; }
    const std::vector<VarList>& edges() const { return edges_; }
    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    bool has_vertex(VariableId v) const { return contains_var(vertices_, v); }

    friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }
    friend bool operator!=(const Hypergraph& a, const Hypergraph& b) {
        return !(a == b);
    }

private:
    VarList vertices_;
    std::vector<VarList> edges_;
};

} // namespace gcsp
