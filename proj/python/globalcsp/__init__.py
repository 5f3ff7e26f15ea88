"""CSPs with global constraints: solving, enumeration, reduction, widths.

Instances, hypergraphs, and graphs are passed around as JSON text in the same
format the command-line tool reads and writes.
"""

from ._core import (
    ApplicabilityError,
    BudgetError,
    CapabilityError,
    DisjointError,
    DomainError,
    GlobalCspError,
    InfeasibleError,
    ParseError,
    ScopeError,
    SparsityError,
    ValidationError,
    cgp_oracle,
    check_sparse,
    count_solutions,
    encode_3col,
    encode_cgp,
    enumerate_solutions,
    fhw,
    ghw,
    instance_size,
    reduce_to_classic,
    run,
    solution_bound,
    solve,
    three_colourable,
    treewidth,
    wcsp_decision,
    wcsp_optimal,
)

__all__ = [
    "ApplicabilityError",
    "BudgetError",
    "CapabilityError",
    "DisjointError",
    "DomainError",
    "GlobalCspError",
    "InfeasibleError",
    "ParseError",
    "ScopeError",
    "SparsityError",
    "ValidationError",
    "cgp_oracle",
    "check_sparse",
    "count_solutions",
    "encode_3col",
    "encode_cgp",
    "enumerate_solutions",
    "fhw",
    "ghw",
    "instance_size",
    "reduce_to_classic",
    "run",
    "solution_bound",
    "solve",
    "three_colourable",
    "treewidth",
    "wcsp_decision",
    "wcsp_optimal",
]
