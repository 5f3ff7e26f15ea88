#include "globalcsp/cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "globalcsp/apps.hpp"
#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/io.hpp"
#include "globalcsp/reduction.hpp"
#include "globalcsp/solve.hpp"
#include "globalcsp/structure.hpp"
#include "globalcsp/weighted.hpp"

namespace gcsp {
namespace {

using ojson = nlohmann::ordered_json;

ojson assignment_json(const Assignment& theta) {
    ojson o = ojson::object();
    for (const auto& [var, val] : theta.bindings())
        o[std::string(var.name())] = std::string(val.text());
    return o;
}

void emit(std::ostream& out, const ojson& report, bool pretty) {
    out << (pretty ? report.dump(2) : report.dump()) << "\n";
}

ojson make_report(const std::string& verdict, ojson witness, ojson stats) {
    ojson r = ojson::object();
    r["verdict"] = verdict;
    r["witness"] = std::move(witness);
    r["stats"] = std::move(stats);
    return r;
}

std::string error_kind(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const ScopeError*>(&e)) return "scope";
    if (dynamic_cast<const DisjointError*>(&e)) return "disjoint";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const CapabilityError*>(&e)) return "capability";
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    if (dynamic_cast<const BudgetError*>(&e)) return "budget";
    if (dynamic_cast<const SparsityError*>(&e)) return "sparsity";
    if (dynamic_cast<const ApplicabilityError*>(&e)) return "applicability";
    if (dynamic_cast<const InfeasibleError*>(&e)) return "infeasible";
    return "error";
}

const CspInstance& require_unweighted(const ParsedInstance& pi, const std::string& cmd) {
    if (pi.weighted)
        throw ApplicabilityError(cmd + " handles unweighted instances; use the wcsp command for weighted input");
    return pi.csp;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f)
        throw ValidationError("cannot open '" + path + "' for writing");
    f << text;
    if (!f.good())
        throw ValidationError("writing '" + path + "' failed");
}

/// Serialized instance goes either to a file (witness = the path) or inline
/// into the report.
ojson place_output(const std::string& text, const std::string& output_path) {
    if (output_path.empty())
        return ojson::parse(text);
    write_text_file(output_path, text);
    return ojson(output_path);
}

VarList parse_order_csv(const std::string& csv) {
    VarList order;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            throw ValidationError("--order has an empty variable name");
        order.push_back(VariableId::of(item));
    }
    if (order.empty())
        throw ValidationError("--order lists no variables");
    return order;
}

int cmd_solve(const std::string& file, unsigned exponent, bool pretty, std::ostream& out) {
    ParsedInstance pi = parse_instance_file(file);
    const CspInstance& P = require_unweighted(pi, "solve");
    SolveReport rep = solve_pipeline(P, exponent);
    ojson stats = {{"used_backdoors", rep.used_backdoors},
                   {"reduced", rep.reduced},
                   {"used_tree_decomposition", rep.used_tree_decomposition},
                   {"used_brute_force", rep.used_brute_force},
                   {"classic_size", rep.classic_size},
                   {"decomposition_width", rep.decomposition_width},
                   {"note", rep.note}};
    ojson witness = rep.solution ? assignment_json(*rep.solution) : ojson(nullptr);
    emit(out, make_report(rep.satisfiable ? "sat" : "unsat", std::move(witness), std::move(stats)), pretty);
    return rep.satisfiable ? 0 : 1;
}

int cmd_enumerate(const std::string& file, const std::string& order_csv, std::uint64_t cap,
                  bool pretty, std::ostream& out) {
    ParsedInstance pi = parse_instance_file(file);
    const CspInstance& P = require_unweighted(pi, "enumerate");
    std::optional<VarList> order;
    if (!order_csv.empty())
        order = parse_order_csv(order_csv);
    EnumerationReport rep = enum_solutions(P, order, cap);

    ojson sols = ojson::array();
    for (const auto& theta : rep.solutions)
        sols.push_back(assignment_json(theta));
    ojson witness = {{"count", rep.solutions.size()}, {"solutions", std::move(sols)}};
    ojson order_names = ojson::array();
    for (VariableId v : rep.order)
        order_names.push_back(std::string(v.name()));
    ojson stats = {{"order", std::move(order_names)}, {"per_level", rep.per_level_counts}};

    std::string verdict = rep.cap_hit ? "capped" : (rep.solutions.empty() ? "unsat" : "sat");
    emit(out, make_report(verdict, std::move(witness), std::move(stats)), pretty);
    if (rep.cap_hit)
        return 1;
    return rep.solutions.empty() ? 1 : 0;
}

int cmd_reduce(const std::string& file, unsigned exponent, const std::string& output,
               bool pretty, std::ostream& out) {
    ParsedInstance pi = parse_instance_file(file);
    const CspInstance& P = require_unweighted(pi, "reduce");
    try {
        ClassicReduction red = reduce_to_classic(P, exponent);
        ojson witness = place_output(serialize_instance(red.classic(), pretty), output);
        ojson stats = {{"exponent", exponent},
                       {"classic_size", instance_size(red.classic())},
                       {"variables", red.classic().variables().size()},
                       {"constraints", red.classic().constraints().size()}};
        emit(out, make_report("reduced", std::move(witness), std::move(stats)), pretty);
        return 0;
    } catch (const SparsityError& e) {
        ojson witness = {{"constraint", e.constraint_label}};
        ojson stats = {{"exponent", exponent}, {"message", e.what()}};
        emit(out, make_report("not-sparse", std::move(witness), std::move(stats)), pretty);
        return 1;
    }
}

int cmd_check_sparse(const std::string& file, unsigned exponent, std::uint64_t probes,
                     std::uint64_t seed, bool pretty, std::ostream& out) {
    ParsedInstance pi = parse_instance_file(file);
    const CspInstance& P = require_unweighted(pi, "check-sparse");
    SparsityCertificate cert = has_sparse_intersections(P, exponent, probes, seed);

    ojson probe_list = ojson::array();
    for (const auto& p : cert.per_constraint)
        probe_list.push_back({{"constraint", p.label}, {"max_count", p.max_count}, {"capped", p.capped}});
    ojson stats = {{"exponent", cert.exponent},
                   {"bound", cert.bound.str()},
                   {"probes", probes},
                   {"seed", seed},
                   {"per_constraint", std::move(probe_list)}};

    switch (cert.verdict) {
    case SparsityVerdict::sparse:
        emit(out, make_report("sparse", ojson(nullptr), std::move(stats)), pretty);
        return 0;
    case SparsityVerdict::not_sparse:
        emit(out, make_report("not-sparse", ojson{{"constraint", cert.offending_label}}, std::move(stats)), pretty);
        return 1;
    case SparsityVerdict::exhausted_budget:
    default:
        emit(out, make_report("exhausted-budget", ojson(nullptr), std::move(stats)), pretty);
        return 2;
    }
}

ojson width_json(const WidthReport& rep) {
    ojson o = ojson::object();
    o["supported"] = rep.supported;
    if (rep.supported) {
        o["value"] = rep.value.str();
        o["bags"] = rep.witness.bags.size();
    } else {
        o["measure"] = rep.measure;
    }
    return o;
}

int cmd_analyze(const std::string& file, bool pretty, std::ostream& out) {
    Hypergraph G = parse_hypergraph_file(file);
    ojson witness = ojson::object();

    try {
        witness["tw"] = width_json(treewidth_exact(G));
    } catch (const BudgetError&) {
        TreeDecomposition td = min_fill_decomposition(G);
        witness["tw"] = {{"supported", false}, {"upper_bound", td.width()}};
    }
    try {
        witness["ghw"] = width_json(ghw_and_fhw_exact_small(G, CoverMeasure::rho));
    } catch (const BudgetError&) {
        witness["ghw"] = {{"supported", false}};
    }
    try {
        witness["fhw"] = width_json(ghw_and_fhw_exact_small(G, CoverMeasure::rho_star));
    } catch (const BudgetError&) {
        witness["fhw"] = {{"supported", false}};
    }
    witness["subw"] = width_json(subw_report());

    ojson stats = {{"vertices", G.num_vertices()}, {"edges", G.num_edges()}};
    emit(out, make_report("ok", std::move(witness), std::move(stats)), pretty);
    return 0;
}

int cmd_wcsp(const std::string& file, const std::string& decision, bool pretty, std::ostream& out) {
    ParsedInstance pi = parse_instance_file(file);
    WcspInstance W = pi.weighted ? pi.wcsp : as_wcsp(pi.csp);
    WcspResult res = wcsp_optimal(W);

    if (!decision.empty()) {
        Rational k = Rational::parse(decision);
        bool yes = res.optimal.has_value() && *res.optimal <= k;
        ojson witness = (yes && res.argmin) ? assignment_json(*res.argmin) : ojson(nullptr);
        ojson stats = {{"bound", k.str()},
                       {"optimal", res.optimal ? ojson(res.optimal->str()) : ojson(nullptr)}};
        emit(out, make_report(yes ? "yes" : "no", std::move(witness), std::move(stats)), pretty);
        return yes ? 0 : 1;
    }

    if (!res.optimal) {
        emit(out, make_report("unsat", ojson(nullptr), ojson::object()), pretty);
        return 1;
    }
    ojson witness = {{"assignment", res.argmin ? assignment_json(*res.argmin) : ojson(nullptr)},
                     {"cost", res.optimal->str()}};
    ojson stats = {{"optimal", res.optimal->str()}};
    emit(out, make_report("sat", std::move(witness), std::move(stats)), pretty);
    return 0;
}

int cmd_encode_cgp(const std::string& file, unsigned alpha, unsigned beta,
                   const std::string& output, bool pretty, std::ostream& out) {
    Graph G = parse_graph_file(file);
    CspInstance P = encode_cgp(G, alpha, beta);
    ojson witness = place_output(serialize_instance(P, pretty), output);
    ojson stats = {{"alpha", alpha},
                   {"beta", beta},
                   {"variables", P.variables().size()},
                   {"constraints", P.constraints().size()}};
    emit(out, make_report("encoded", std::move(witness), std::move(stats)), pretty);
    return 0;
}

int cmd_encode_3col(const std::string& file, const std::string& output, bool pretty,
                    std::ostream& out) {
    Graph G = parse_graph_file(file);
    CspInstance P = encode_3col(G);
    ojson witness = place_output(serialize_instance(P, pretty), output);
    ojson stats = {{"variables", P.variables().size()}, {"constraints", P.constraints().size()}};
    emit(out, make_report("encoded", std::move(witness), std::move(stats)), pretty);
    return 0;
}

int cmd_oracle(const std::string& file, const std::string& problem, unsigned alpha,
               unsigned beta, bool have_alpha, bool have_beta, bool pretty, std::ostream& out) {
    Graph G = parse_graph_file(file);
    bool yes = false;
    ojson stats = {{"problem", problem}};
    if (problem == "cgp") {
        if (!have_alpha || !have_beta)
            throw ValidationError("the cgp oracle needs both --alpha and --beta");
        yes = cgp_oracle(G, alpha, beta);
        stats["alpha"] = alpha;
        stats["beta"] = beta;
    } else {
        yes = three_colourable(G);
    }
    emit(out, make_report(yes ? "yes" : "no", ojson(nullptr), std::move(stats)), pretty);
    return yes ? 0 : 1;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"globalcsp: solving and analysis for CSPs with global constraints"};
    app.require_subcommand(1);
    app.fallthrough();
    app.footer("The GLOBALCSP_BUDGET environment variable caps enumeration and\n"
               "brute-force work (default 10000000 partial assignments).");

    bool pretty = false;
    app.add_flag("--pretty", pretty, "indent the JSON report");

    std::string file;
    std::string output;
    std::string order_csv;
    std::string decision;
    std::string problem;
    unsigned exponent = 2;
    unsigned alpha = 0;
    unsigned beta = 0;
    std::uint64_t cap = kNoCap;
    std::uint64_t probes = 0;
    std::uint64_t seed = kDefaultSparsitySeed;
    int code = 0;

    auto* solve = app.add_subcommand("solve", "decide satisfiability end to end and print a witness");
    solve->add_option("file", file, "instance file (JSON)")->required();
    solve->add_option("--exponent", exponent, "sparsity exponent c for the reduction cap |P|^c");
    solve->callback([&] { code = cmd_solve(file, exponent, pretty, out); });

    auto* enumerate = app.add_subcommand("enumerate", "list all solutions level by level");
    enumerate->add_option("file", file, "instance file (JSON)")->required();
    enumerate->add_option("--order", order_csv, "comma-separated variable order");
    enumerate->add_option("--cap", cap, "abort once any level collects this many partial solutions");
    enumerate->callback([&] { code = cmd_enumerate(file, order_csv, cap, pretty, out); });

    auto* reduce = app.add_subcommand("reduce", "reduce to a classic (all-table) instance");
    reduce->add_option("file", file, "instance file (JSON)")->required();
    reduce->add_option("--exponent", exponent, "sparsity exponent c for the cap |P|^c");
    reduce->add_option("-o,--output", output, "write the classic instance to this file");
    reduce->callback([&] { code = cmd_reduce(file, exponent, output, pretty, out); });

    auto* sparse = app.add_subcommand("check-sparse", "test the sparse-intersection condition");
    sparse->add_option("file", file, "instance file (JSON)")->required();
    sparse->add_option("--exponent", exponent, "sparsity exponent c");
    sparse->add_option("--probes", probes, "random proper subsets probed per constraint");
    sparse->add_option("--seed", seed, "seed for the subset probes");
    sparse->callback([&] { code = cmd_check_sparse(file, exponent, probes, seed, pretty, out); });

    auto* analyze = app.add_subcommand("analyze", "width measures of a hypergraph");
    analyze->add_option("file", file, "hypergraph file (JSON)")->required();
    analyze->callback([&] { code = cmd_analyze(file, pretty, out); });

    auto* wcsp = app.add_subcommand("wcsp", "optimal cost, or a cost-threshold decision");
    wcsp->add_option("file", file, "instance file (JSON); unweighted input gets zero costs")->required();
    wcsp->add_option("--decision", decision, "decide whether some solution costs at most this rational (p/q)");
    wcsp->callback([&] { code = cmd_wcsp(file, decision, pretty, out); });

    auto* cgp = app.add_subcommand("encode-cgp", "encode a connected-graph-partition instance");
    cgp->add_option("file", file, "graph file (JSON)")->required();
    cgp->add_option("--alpha", alpha, "max component size")->required();
    cgp->add_option("--beta", beta, "max number of cut edges")->required();
    cgp->add_option("-o,--output", output, "write the instance to this file");
    cgp->callback([&] { code = cmd_encode_cgp(file, alpha, beta, output, pretty, out); });

    auto* col = app.add_subcommand("encode-3col", "encode graph 3-colourability");
    col->add_option("file", file, "graph file (JSON)")->required();
    col->add_option("-o,--output", output, "write the instance to this file");
    col->callback([&] { code = cmd_encode_3col(file, output, pretty, out); });

    auto* oracle = app.add_subcommand("oracle", "answer a graph problem by direct search");
    oracle->add_option("file", file, "graph file (JSON)")->required();
    oracle->add_option("--problem", problem, "cgp or 3col")
        ->required()
        ->check(CLI::IsMember({"cgp", "3col"}));
    auto* alpha_opt = oracle->add_option("--alpha", alpha, "max component size (cgp)");
    auto* beta_opt = oracle->add_option("--beta", beta, "max number of cut edges (cgp)");
    oracle->callback([&] {
        code = cmd_oracle(file, problem, alpha, beta, alpha_opt->count() > 0,
                          beta_opt->count() > 0, pretty, out);
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("globalcsp");
    for (const auto& a : args)
        argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    } catch (const Error& e) {
        ojson report = make_report("error", ojson(nullptr),
                                   ojson{{"kind", error_kind(e)}, {"message", e.what()}});
        emit(out, report, pretty);
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return code;
}

} // namespace gcsp
