#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "globalcsp/apps.hpp"
#include "globalcsp/cli.hpp"
#include "globalcsp/enumerate.hpp"
#include "globalcsp/errors.hpp"
#include "globalcsp/instance.hpp"
#include "globalcsp/io.hpp"
#include "globalcsp/reduction.hpp"
#include "globalcsp/solve.hpp"
#include "globalcsp/structure.hpp"
#include "globalcsp/weighted.hpp"

namespace py = pybind11;

namespace {

py::dict assignment_dict(const gcsp::Assignment& theta) {
    py::dict d;
    for (const auto& [var, val] : theta.bindings())
        d[py::str(std::string(var.name()))] = std::string(val.text());
    return d;
}

const gcsp::CspInstance& unweighted(const gcsp::ParsedInstance& pi, const char* op) {
    if (pi.weighted)
        throw gcsp::ApplicabilityError(std::string(op) + " handles unweighted instances");
    return pi.csp;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CSPs with global constraints: solving, enumeration, reduction, widths";

    auto base = py::register_exception<gcsp::Error>(m, "GlobalCspError");
    py::register_exception<gcsp::ParseError>(m, "ParseError", base);
    py::register_exception<gcsp::ValidationError>(m, "ValidationError", base);
    py::register_exception<gcsp::BudgetError>(m, "BudgetError", base);
    py::register_exception<gcsp::SparsityError>(m, "SparsityError", base);
    py::register_exception<gcsp::CapabilityError>(m, "CapabilityError", base);
    py::register_exception<gcsp::ApplicabilityError>(m, "ApplicabilityError", base);
    py::register_exception<gcsp::ScopeError>(m, "ScopeError", base);
    py::register_exception<gcsp::DomainError>(m, "DomainError", base);
    py::register_exception<gcsp::DisjointError>(m, "DisjointError", base);
    py::register_exception<gcsp::InfeasibleError>(m, "InfeasibleError", base);

    m.def(
        "run",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = gcsp::run_command(args, out, err);
            return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"),
        "Run the command-line driver in process; returns (exit_code, stdout, stderr).");

    m.def(
        "solve",
        [](const std::string& text, unsigned exponent) -> py::object {
            auto pi = gcsp::parse_instance_text(text);
            auto rep = gcsp::solve_pipeline(unweighted(pi, "solve"), exponent);
            if (!rep.satisfiable)
                return py::none();
            return assignment_dict(*rep.solution);
        },
        py::arg("text"), py::arg("exponent") = 2,
        "Decide satisfiability of an instance (JSON text); returns a witness dict or None.");

    m.def(
        "enumerate_solutions",
        [](const std::string& text, std::optional<std::vector<std::string>> order,
           std::optional<std::uint64_t> cap) {
            auto pi = gcsp::parse_instance_text(text);
            std::optional<gcsp::VarList> ord;
            if (order) {
                gcsp::VarList o;
                for (const auto& name : *order)
                    o.push_back(gcsp::VariableId::of(name));
                ord = std::move(o);
            }
            auto rep = gcsp::enum_solutions(unweighted(pi, "enumerate_solutions"), ord,
                                            cap.value_or(gcsp::kNoCap));
            py::list sols;
            for (const auto& theta : rep.solutions)
                sols.append(assignment_dict(theta));
            return py::make_tuple(sols, rep.cap_hit);
        },
        py::arg("text"), py::arg("order") = py::none(), py::arg("cap") = py::none(),
        "All solutions of an instance; returns (list_of_dicts, cap_hit).");

    m.def(
        "count_solutions",
        [](const std::string& text, std::optional<std::uint64_t> cap) -> py::object {
            auto pi = gcsp::parse_instance_text(text);
            auto n = gcsp::count_solutions_capped(unweighted(pi, "count_solutions"),
                                                  cap.value_or(gcsp::kNoCap));
            if (!n)
                return py::none();
            return py::cast(*n);
        },
        py::arg("text"), py::arg("cap") = py::none(),
        "Exact solution count, or None once the cap is reached.");

    m.def(
        "reduce_to_classic",
        [](const std::string& text, unsigned exponent) {
            auto pi = gcsp::parse_instance_text(text);
            auto red = gcsp::reduce_to_classic(unweighted(pi, "reduce_to_classic"), exponent);
            return gcsp::serialize_instance(red.classic());
        },
        py::arg("text"), py::arg("exponent") = 2,
        "Reduce to a classic (all-table) instance; returns its JSON text. "
        "Raises SparsityError when the instance is not sparse enough.");

    m.def(
        "check_sparse",
        [](const std::string& text, unsigned exponent, std::uint64_t probes, std::uint64_t seed) {
            auto pi = gcsp::parse_instance_text(text);
            auto cert = gcsp::has_sparse_intersections(unweighted(pi, "check_sparse"), exponent,
                                                       probes, seed);
            py::dict d;
            switch (cert.verdict) {
            case gcsp::SparsityVerdict::sparse: d["verdict"] = "sparse"; break;
            case gcsp::SparsityVerdict::not_sparse: d["verdict"] = "not-sparse"; break;
            default: d["verdict"] = "exhausted-budget"; break;
            }
            d["bound"] = cert.bound.str();
            if (!cert.offending_label.empty())
                d["offending"] = cert.offending_label;
            return d;
        },
        py::arg("text"), py::arg("exponent"), py::arg("probes") = 0,
        py::arg("seed") = gcsp::kDefaultSparsitySeed,
        "Probe the sparse-intersection condition; returns a verdict dict.");

    m.def(
        "instance_size",
        [](const std::string& text) {
            auto pi = gcsp::parse_instance_text(text);
            return gcsp::instance_size(pi.weighted ? pi.wcsp.base() : pi.csp);
        },
        py::arg("text"), "Size |P| of an instance.");

    m.def(
        "solution_bound",
        [](const std::string& text) {
            auto pi = gcsp::parse_instance_text(text);
            return gcsp::solution_bound(pi.weighted ? pi.wcsp.base() : pi.csp).str();
        },
        py::arg("text"), "Upper bound on |sol(P)| as a decimal string.");

    m.def(
        "wcsp_optimal",
        [](const std::string& text) -> py::object {
            auto pi = gcsp::parse_instance_text(text);
            gcsp::WcspInstance W = pi.weighted ? pi.wcsp : gcsp::as_wcsp(pi.csp);
            auto res = gcsp::wcsp_optimal(W);
            if (!res.optimal)
                return py::none();
            py::dict d;
            d["cost"] = res.optimal->str();
            d["assignment"] = res.argmin ? py::object(assignment_dict(*res.argmin)) : py::none();
            return d;
        },
        py::arg("text"),
        "Minimal solution cost and a minimizer, or None when unsatisfiable.");

    m.def(
        "wcsp_decision",
        [](const std::string& text, const std::string& k) {
            auto pi = gcsp::parse_instance_text(text);
            gcsp::WcspInstance W = pi.weighted ? pi.wcsp : gcsp::as_wcsp(pi.csp);
            return gcsp::wcsp_decision(W, gcsp::Rational::parse(k));
        },
        py::arg("text"), py::arg("k"),
        "Whether some solution costs at most k (a rational such as '5/6').");

    m.def(
        "treewidth",
        [](const std::string& hypergraph_text) -> py::object {
            auto G = gcsp::parse_hypergraph_text(hypergraph_text);
            try {
                return py::cast(gcsp::treewidth_exact(G).value.str());
            } catch (const gcsp::BudgetError&) {
                return py::none();
            }
        },
        py::arg("hypergraph_text"),
        "Exact treewidth as a string, or None beyond the supported size.");

    m.def(
        "ghw",
        [](const std::string& hypergraph_text) -> py::object {
            auto G = gcsp::parse_hypergraph_text(hypergraph_text);
            try {
                return py::cast(gcsp::ghw_and_fhw_exact_small(G, gcsp::CoverMeasure::rho).value.str());
            } catch (const gcsp::BudgetError&) {
                return py::none();
            }
        },
        py::arg("hypergraph_text"),
        "Exact generalized hypertree width as a string, or None beyond the supported size.");

    m.def(
        "fhw",
        [](const std::string& hypergraph_text) -> py::object {
            auto G = gcsp::parse_hypergraph_text(hypergraph_text);
            try {
                return py::cast(
                    gcsp::ghw_and_fhw_exact_small(G, gcsp::CoverMeasure::rho_star).value.str());
            } catch (const gcsp::BudgetError&) {
                return py::none();
            }
        },
        py::arg("hypergraph_text"),
        "Exact fractional hypertree width as a string, or None beyond the supported size.");

    m.def(
        "encode_cgp",
        [](const std::string& graph_text, unsigned alpha, unsigned beta) {
            auto G = gcsp::parse_graph_text(graph_text);
            return gcsp::serialize_instance(gcsp::encode_cgp(G, alpha, beta));
        },
        py::arg("graph_text"), py::arg("alpha"), py::arg("beta"),
        "Encode a connected-graph-partition question as an instance (JSON text).");

    m.def(
        "encode_3col",
        [](const std::string& graph_text) {
            auto G = gcsp::parse_graph_text(graph_text);
            return gcsp::serialize_instance(gcsp::encode_3col(G));
        },
        py::arg("graph_text"), "Encode 3-colourability as an instance (JSON text).");

    m.def(
        "cgp_oracle",
        [](const std::string& graph_text, unsigned alpha, unsigned beta) {
            return gcsp::cgp_oracle(gcsp::parse_graph_text(graph_text), alpha, beta);
        },
        py::arg("graph_text"), py::arg("alpha"), py::arg("beta"),
        "Direct-search answer to the connected-graph-partition question.");

    m.def(
        "three_colourable",
        [](const std::string& graph_text) {
            return gcsp::three_colourable(gcsp::parse_graph_text(graph_text));
        },
        py::arg("graph_text"), "Direct-search 3-colourability.");
}
