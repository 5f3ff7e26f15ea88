#include "globalcsp/io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "globalcsp/errors.hpp"
#include "globalcsp/rational.hpp"

namespace gcsp {

namespace {

using ojson = nlohmann::ordered_json;

ojson parse_json(const std::string& text) {
    try {
        return ojson::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const ojson& field(const ojson& o, const std::string& key, const std::string& where) {
    if (!o.is_object())
        throw ParseError(where + ": expected an object");
    auto it = o.find(key);
    if (it == o.end())
        throw ParseError(where + ": missing field '" + key + "'");
    return *it;
}

void reject_unknown_keys(const ojson& o, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = o.begin(); it != o.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError(where + ": unexpected field '" + it.key() + "'");
}

std::vector<std::string> string_array(const ojson& a, const std::string& where) {
    if (!a.is_array())
        throw ParseError(where + ": expected an array");
    std::vector<std::string> out;
    out.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_string())
            throw ParseError(where + ": expected an array of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::vector<std::vector<Value>> value_rows(const ojson& a, const std::string& where) {
    if (!a.is_array())
        throw ParseError(where + ": expected an array of rows");
    std::vector<std::vector<Value>> rows;
    rows.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<Value> row;
        for (const auto& name :
             string_array(a[i], where + "[" + std::to_string(i) + "]"))
            row.push_back(Value::of(name));
        rows.push_back(std::move(row));
    }
    return rows;
}

CardinalitySet parse_cardinality_set(const ojson& a, const std::string& where) {
    if (!a.is_array() || a.empty())
        throw ParseError(where + ": expected a nonempty array of counts");
    std::vector<int> nums;
    nums.reserve(a.size());
    for (const auto& x : a) {
        if (!x.is_number_integer())
            throw ParseError(where + ": counts must be integers");
        nums.push_back(x.get<int>());
    }
    // two entries name an interval; anything else is an explicit set
    if (nums.size() == 2)
        return CardinalitySet::interval(nums[0], nums[1]);
    return CardinalitySet::explicit_set(std::move(nums));
}

ojson cardinality_set_to_json(const CardinalitySet& K) {
    ojson a = ojson::array();
    if (K.is_interval) {
        a.push_back(K.lo);
        a.push_back(K.hi);
        return a;
    }
    for (int n : K.members)
        a.push_back(n);
    // a two-member explicit set would read back as an interval; repeating the
    // last member keeps the round trip exact (explicit sets deduplicate)
    if (K.members.size() == 2)
        a.push_back(K.members.back());
    return a;
}

struct ParsedConstraint {
    ConstraintPtr base;
    WeightedPtr weighted; // set when the constraint carries costs
};

ParsedConstraint parse_constraint(const ojson& cj, std::size_t index,
                                  const std::map<std::string, std::vector<Value>>& domains) {
    const std::string where = "constraints[" + std::to_string(index) + "]";
    const ojson& kindj = field(cj, "kind", where);
    if (!kindj.is_string())
        throw ParseError(where + ".kind: expected a string");
    std::string kind = kindj.get<std::string>();
    std::string label = "c" + std::to_string(index);
    if (cj.contains("label")) {
        if (!cj["label"].is_string())
            throw ParseError(where + ".label: expected a string");
        label = cj["label"].get<std::string>();
    }
    std::vector<std::string> scope_names = string_array(field(cj, "scope", where), where + ".scope");
    VarList scope;
    std::vector<std::vector<Value>> scope_domains;
    for (const auto& name : scope_names) {
        auto it = domains.find(name);
        if (it == domains.end())
            throw ParseError(where + ".scope: unknown variable '" + name + "'");
        scope.push_back(VariableId::of(name));
        scope_domains.push_back(it->second);
    }

    ParsedConstraint out;
    if (kind == "table") {
        reject_unknown_keys(cj, {"kind", "label", "scope", "rows", "costs"}, where);
        auto rows = value_rows(field(cj, "rows", where), where + ".rows");
        if (cj.contains("costs")) {
            std::vector<Rational> costs;
            for (const auto& c : string_array(cj["costs"], where + ".costs"))
                costs.push_back(Rational::parse(c));
            auto wt = std::make_shared<WeightedTable>(label, std::move(scope),
                                                      std::move(scope_domains),
                                                      std::move(rows), std::move(costs));
            out.base = wt->base();
            out.weighted = std::move(wt);
        } else {
            out.base = std::make_shared<TableConstraint>(label, std::move(scope),
                                                         std::move(scope_domains),
                                                         std::move(rows));
        }
    } else if (kind == "negative") {
        reject_unknown_keys(cj, {"kind", "label", "scope", "forbidden"}, where);
        auto rows = value_rows(field(cj, "forbidden", where), where + ".forbidden");
        out.base = std::make_shared<NegativeConstraint>(label, std::move(scope),
                                                        std::move(scope_domains),
                                                        std::move(rows));
    } else if (kind == "egc") {
        reject_unknown_keys(cj, {"kind", "label", "scope", "cardinality"}, where);
        const ojson& cardj = field(cj, "cardinality", where);
        if (!cardj.is_object())
            throw ParseError(where + ".cardinality: expected an object");
        std::map<Value, CardinalitySet> card;
        for (auto it = cardj.begin(); it != cardj.end(); ++it)
            card.emplace(Value::of(it.key()),
                         parse_cardinality_set(it.value(),
                                               where + ".cardinality['" + it.key() + "']"));
        out.base = std::make_shared<EgcConstraint>(label, std::move(scope),
                                                   std::move(scope_domains), std::move(card));
    } else {
        throw ParseError(where + ": unknown kind '" + kind + "'");
    }
    return out;
}

} // namespace

ParsedInstance parse_instance_text(const std::string& text) {
    ojson j = parse_json(text);
    if (!j.is_object())
        throw ParseError("instance: expected a top-level object");
    reject_unknown_keys(j, {"variables", "constraints"}, "instance");

    const ojson& varsj = field(j, "variables", "instance");
    if (!varsj.is_array())
        throw ParseError("variables: expected an array");
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    std::map<std::string, std::vector<Value>> by_name;
    for (std::size_t i = 0; i < varsj.size(); ++i) {
        const std::string where = "variables[" + std::to_string(i) + "]";
        const ojson& vj = varsj[i];
        reject_unknown_keys(vj, {"name", "domain"}, where);
        const ojson& namej = field(vj, "name", where);
        if (!namej.is_string())
            throw ParseError(where + ".name: expected a string");
        std::string name = namej.get<std::string>();
        std::vector<Value> dom;
        for (const auto& val : string_array(field(vj, "domain", where), where + ".domain"))
            dom.push_back(Value::of(val));
        if (!by_name.emplace(name, dom).second)
            throw ParseError(where + ": duplicate variable '" + name + "'");
        domains.emplace_back(VariableId::of(name), std::move(dom));
    }

    const ojson& consj = field(j, "constraints", "instance");
    if (!consj.is_array())
        throw ParseError("constraints: expected an array");
    std::vector<ParsedConstraint> parsed;
    bool weighted = false;
    for (std::size_t i = 0; i < consj.size(); ++i) {
        parsed.push_back(parse_constraint(consj[i], i, by_name));
        weighted = weighted || parsed.back().weighted != nullptr;
    }

    ParsedInstance out;
    out.weighted = weighted;
    if (!weighted) {
        std::vector<ConstraintPtr> cs;
        cs.reserve(parsed.size());
        for (auto& p : parsed)
            cs.push_back(std::move(p.base));
        out.csp = CspInstance(std::move(domains), std::move(cs));
        return out;
    }
    std::vector<WeightedPtr> ws;
    ws.reserve(parsed.size());
    for (auto& p : parsed)
        ws.push_back(p.weighted ? std::move(p.weighted) : zero_cost(p.base));
    out.wcsp = WcspInstance(std::move(domains), std::move(ws));
    return out;
}

ParsedInstance parse_instance_file(const std::string& path) {
    return parse_instance_text(read_file(path));
}

namespace {

ojson constraint_to_json(const GlobalConstraint& c) {
    ojson cj;
    switch (c.kind()) {
    case ConstraintKind::table: {
        const auto& t = static_cast<const TableConstraint&>(c);
        cj["kind"] = "table";
        cj["label"] = t.label();
        ojson scope = ojson::array();
        for (const auto& v : t.scope())
            scope.push_back(std::string(v.name()));
        cj["scope"] = std::move(scope);
        ojson rows = ojson::array();
        for (const auto& row : t.rows()) {
            ojson r = ojson::array();
            for (const auto& val : row)
                r.push_back(std::string(val.text()));
            rows.push_back(std::move(r));
        }
        cj["rows"] = std::move(rows);
        return cj;
    }
    case ConstraintKind::negative: {
        const auto& t = static_cast<const NegativeConstraint&>(c);
        cj["kind"] = "negative";
        cj["label"] = t.label();
        ojson scope = ojson::array();
        for (const auto& v : t.scope())
            scope.push_back(std::string(v.name()));
        cj["scope"] = std::move(scope);
        ojson rows = ojson::array();
        for (const auto& row : t.forbidden()) {
            ojson r = ojson::array();
            for (const auto& val : row)
                r.push_back(std::string(val.text()));
            rows.push_back(std::move(r));
        }
        cj["forbidden"] = std::move(rows);
        return cj;
    }
    case ConstraintKind::egc: {
        const auto& t = static_cast<const EgcConstraint&>(c);
        cj["kind"] = "egc";
        cj["label"] = t.label();
        ojson scope = ojson::array();
        for (const auto& v : t.scope())
            scope.push_back(std::string(v.name()));
        cj["scope"] = std::move(scope);
        ojson card;
        for (const auto& a : t.counted_values())
            card[std::string(a.text())] = cardinality_set_to_json(t.cardinality_of(a));
        cj["cardinality"] = std::move(card);
        return cj;
    }
    default:
        throw ValidationError("constraint '" + c.label() + "' has no file representation");
    }
}

ojson instance_to_json(const CspInstance& P) {
    ojson j;
    ojson vars = ojson::array();
    for (std::size_t i = 0; i < P.variables().size(); ++i) {
        ojson vj;
        vj["name"] = std::string(P.variables()[i].name());
        ojson dom = ojson::array();
        for (const auto& val : P.domains()[i])
            dom.push_back(std::string(val.text()));
        vj["domain"] = std::move(dom);
        vars.push_back(std::move(vj));
    }
    j["variables"] = std::move(vars);
    ojson cons = ojson::array();
    for (const auto& c : P.constraints())
        cons.push_back(constraint_to_json(*c));
    j["constraints"] = std::move(cons);
    return j;
}

std::string dump(const ojson& j, bool pretty) {
    return (pretty ? j.dump(2) : j.dump()) + "\n";
}

} // namespace

std::string serialize_instance(const CspInstance& P, bool pretty) {
    return dump(instance_to_json(P), pretty);
}

std::string serialize_wcsp(const WcspInstance& P, bool pretty) {
    ojson j = instance_to_json(P.base());
    for (std::size_t i = 0; i < P.constraints().size(); ++i) {
        const auto& w = P.constraints()[i];
        if (w->is_zero_cost())
            continue;
        const auto* wt = dynamic_cast<const WeightedTable*>(w.get());
        if (!wt)
            throw ValidationError("weighted constraint '" + w->label() +
                                  "' has no file representation");
        ojson costs = ojson::array();
        for (const auto& c : wt->costs())
            costs.push_back(c.str());
        j["constraints"][i]["costs"] = std::move(costs);
    }
    return dump(j, pretty);
}

Hypergraph parse_hypergraph_text(const std::string& text) {
    ojson j = parse_json(text);
    if (!j.is_object())
        throw ParseError("hypergraph: expected a top-level object");
    reject_unknown_keys(j, {"vertices", "edges"}, "hypergraph");
    VarList vertices;
    for (const auto& name : string_array(field(j, "vertices", "hypergraph"), "vertices"))
        vertices.push_back(VariableId::of(name));
    const ojson& edgesj = field(j, "edges", "hypergraph");
    if (!edgesj.is_array())
        throw ParseError("edges: expected an array");
    std::vector<VarList> edges;
    for (std::size_t i = 0; i < edgesj.size(); ++i) {
        VarList e;
        for (const auto& name :
             string_array(edgesj[i], "edges[" + std::to_string(i) + "]"))
            e.push_back(VariableId::of(name));
        edges.push_back(std::move(e));
    }
    return Hypergraph(std::move(vertices), std::move(edges));
}

Hypergraph parse_hypergraph_file(const std::string& path) {
    return parse_hypergraph_text(read_file(path));
}

std::string serialize_hypergraph(const Hypergraph& G, bool pretty) {
    ojson j;
    ojson vs = ojson::array();
    for (const auto& v : G.vertices())
        vs.push_back(std::string(v.name()));
    j["vertices"] = std::move(vs);
    ojson es = ojson::array();
    for (const auto& e : G.edges()) {
        ojson ej = ojson::array();
        for (const auto& v : e)
            ej.push_back(std::string(v.name()));
        es.push_back(std::move(ej));
    }
    j["edges"] = std::move(es);
    return dump(j, pretty);
}

Graph parse_graph_text(const std::string& text) {
    ojson j = parse_json(text);
    if (!j.is_object())
        throw ParseError("graph: expected a top-level object");
    reject_unknown_keys(j, {"vertices", "edges"}, "graph");
    std::vector<std::string> vertices =
        string_array(field(j, "vertices", "graph"), "vertices");
    const ojson& edgesj = field(j, "edges", "graph");
    if (!edgesj.is_array())
        throw ParseError("edges: expected an array");
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < edgesj.size(); ++i) {
        auto pair = string_array(edgesj[i], "edges[" + std::to_string(i) + "]");
        if (pair.size() != 2)
            throw ParseError("edges[" + std::to_string(i) + "]: expected exactly two endpoints");
        edges.emplace_back(std::move(pair[0]), std::move(pair[1]));
    }
    return make_graph(std::move(vertices), std::move(edges));
}

Graph parse_graph_file(const std::string& path) {
    return parse_graph_text(read_file(path));
}

std::string serialize_graph(const Graph& G, bool pretty) {
    ojson j;
    ojson vs = ojson::array();
    for (const auto& v : G.vertices)
        vs.push_back(v);
    j["vertices"] = std::move(vs);
    ojson es = ojson::array();
    for (const auto& [u, v] : G.edges)
        es.push_back(ojson::array({u, v}));
    j["edges"] = std::move(es);
    return dump(j, pretty);
}

WcspInstance as_wcsp(const CspInstance& P) {
    std::vector<std::pair<VariableId, std::vector<Value>>> domains;
    for (std::size_t i = 0; i < P.variables().size(); ++i)
        domains.emplace_back(P.variables()[i], P.domains()[i]);
    std::vector<WeightedPtr> ws;
    ws.reserve(P.constraints().size());
    for (const auto& c : P.constraints())
        ws.push_back(zero_cost(c));
    return WcspInstance(std::move(domains), std::move(ws));
}

} // namespace gcsp
