#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "globalcsp/instance.hpp"

namespace gcsp {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kNoCap = UINT64_MAX;

struct EnumerationReport {
    std::vector<Assignment> solutions;
    std::vector<std::uint64_t> per_level_counts; // |Theta_k| for k = 1..n
    VarList order;
    bool cap_hit = false;
    double elapsed_seconds = 0.0;
};

/// Level-wise enumeration of all solutions. Every constraint must offer PAC.
/// With a cap, the run aborts as soon as some level k >= 1 collects cap
/// partial solutions; the root level (the empty assignment) is exempt.
EnumerationReport enum_solutions(const CspInstance& P,
                                 std::optional<VarList> order = std::nullopt,
                                 std::uint64_t cap = kNoCap);

/// Exact solution count, or nullopt once any level reaches the cap.
std::optional<std::uint64_t> count_solutions_capped(const CspInstance& P,
                                                    std::uint64_t cap);

/// Cartesian-product enumeration that only needs evaluate(). Throws
/// BudgetError when the product of the domain sizes exceeds the budget.
std::vector<Assignment> brute_force_solutions(const CspInstance& P);

bool is_pac_instance(const CspInstance& P);

enum class SparsityVerdict { sparse, not_sparse, exhausted_budget };

struct SparsityProbe {
    std::string label;        // constraint whose intersection sets were probed
    std::uint64_t max_count;  // max |sol(pj_X(P))| observed over probed X
    bool capped;              // true when some count reached the bound
};

struct SparsityCertificate {
    unsigned exponent = 0;
    BigInt bound;             // |P|^c
    SparsityVerdict verdict = SparsityVerdict::sparse;
    std::vector<SparsityProbe> per_constraint;
    std::string offending_label; // set when verdict is not sparse
};

inline constexpr std::uint64_t kDefaultSparsitySeed = 0x5eed2026ull;

/// Checks c-sparse intersections: |sol(pj_X(P))| < |P|^c must hold for every
/// X ⊆ iv(δ). X = iv(δ) is probed exactly for every constraint; in addition,
/// up to probe_budget random proper subsets of each iv(δ) are probed (seeded,
/// deterministic). The nested levels visited along each enumeration are
/// themselves subsets of iv(δ), so any level reaching the bound already
/// refutes sparsity.
SparsityCertificate has_sparse_intersections(const CspInstance& P, unsigned c,
                                             std::uint64_t probe_budget = 0,
                                             std::uint64_t seed = kDefaultSparsitySeed);

namespace detail {

struct LevelwiseResult {
    std::vector<Assignment> solutions;
    std::vector<std::uint64_t> per_level;
    bool level_cap_hit = false;
    bool final_cap_hit = false;
};

/// Shared engine. level_cap aborts any level reaching it; final_cap only
/// applies to the last level (used by sparsity probes where intermediate
/// levels may legitimately exceed the final count). budget bounds the total
/// number of partial solutions across levels (BudgetError).
LevelwiseResult levelwise_solutions(const CspInstance& P, const VarList& order,
                                    std::uint64_t level_cap, std::uint64_t final_cap,
                                    std::uint64_t budget, bool materialize);

} // namespace detail

} // namespace gcsp
