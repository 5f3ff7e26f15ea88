#pragma once

#include <string>

#include "globalcsp/apps.hpp"
#include "globalcsp/hypergraph.hpp"
#include "globalcsp/instance.hpp"
#include "globalcsp/weighted.hpp"

namespace gcsp {

/// Result of parsing an instance document: weighted when any constraint
/// carries costs (cost-free constraints then count as zero-cost).
struct ParsedInstance {
    bool weighted = false;
    CspInstance csp;   // when !weighted
    WcspInstance wcsp; // when weighted
};

ParsedInstance parse_instance_text(const std::string& text);
ParsedInstance parse_instance_file(const std::string& path);

/// Serializes table / negative / egc constraints; other kinds have no file
/// representation and raise ValidationError.
std::string serialize_instance(const CspInstance& P, bool pretty = false);
std::string serialize_wcsp(const WcspInstance& P, bool pretty = false);

Hypergraph parse_hypergraph_text(const std::string& text);
Hypergraph parse_hypergraph_file(const std::string& path);
std::string serialize_hypergraph(const Hypergraph& G, bool pretty = false);

Graph parse_graph_text(const std::string& text);
Graph parse_graph_file(const std::string& path);
std::string serialize_graph(const Graph& G, bool pretty = false);

/// Views an unweighted instance as a WCSP by wrapping every constraint with
/// the zero cost function.
WcspInstance as_wcsp(const CspInstance& P);

} // namespace gcsp
