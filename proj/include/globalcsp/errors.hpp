#pragma once

#include <stdexcept>
#include <string>

namespace gcsp {

/// Base class of every error the library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A variable set violates a scope precondition (W ⊄ vars(θ), X ⊄ scope, ...).
struct ScopeError : Error {
    using Error::Error;
};

/// Two assignments share a variable where disjointness is required.
struct DisjointError : Error {
    using Error::Error;
};

/// A value falls outside the declared domain of its variable.
struct DomainError : Error {
    using Error::Error;
};

/// A requested capability (PAC, weighted PAC, cost scaling, size limit) is unavailable.
struct CapabilityError : Error {
    using Error::Error;
};

/// A structural invariant failed (instance, decomposition, tree decomposition, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// An enumeration / search / join exceeded the configured budget.
struct BudgetError : Error {
    using Error::Error;
};

/// The sparsity cap |P|^c was exceeded while building an induced table.
struct SparsityError : Error {
    std::string constraint_label;
    SparsityError(std::string msg, std::string label)
        : Error(std::move(msg)), constraint_label(std::move(label)) {}
};

/// An operation was applied to an argument outside its domain of applicability
/// (cost of a non-solution, solution bound of a non-classic instance, ...).
struct ApplicabilityError : Error {
    using Error::Error;
};

/// A linear program or cover problem has no feasible point.
struct InfeasibleError : Error {
    using Error::Error;
};

/// Malformed input text (instance files, rationals, graphs).
struct ParseError : Error {
    using Error::Error;
};

} // namespace gcsp
