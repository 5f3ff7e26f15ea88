#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "globalcsp/instance.hpp"
#include "globalcsp/rational.hpp"

namespace gcsp {

/// A weighted constraint: a base global constraint plus a cost function
/// defined exactly on its satisfying assignments. Costs are rationals and
/// may be negative.
class WeightedConstraint {
public:
    virtual ~WeightedConstraint() = default;

    const ConstraintPtr& base() const { return base_; }
    const std::string& label() const { return base_->label(); }
    const VarList& scope() const { return base_->scope(); }

    /// Cost of a satisfying full assignment of the scope.
    /// ApplicabilityError when theta does not satisfy the base.
    virtual Rational cost(const Assignment& theta) const = 0;

    virtual bool has_weighted_pac() const = 0;
    /// ∃μ ∈ base extending θ with cost(μ) ≤ k.
    virtual bool weighted_pac(const Assignment& theta, const Rational& k) const = 0;
    /// min{cost(μ) : μ ⊇ θ}, or nullopt when θ has no extension.
    virtual std::optional<Rational> min_cost_extension(const Assignment& theta) const = 0;

    /// Base description size plus the bit size of the cost representation.
    virtual std::size_t description_size() const = 0;

    /// True for the zero-cost wrapper (costs drop out of serialization).
    virtual bool is_zero_cost() const { return false; }

protected:
    explicit WeightedConstraint(ConstraintPtr base);

    ConstraintPtr base_;
};

using WeightedPtr = std::shared_ptr<const WeightedConstraint>;

/// Weighted table: cost stored inline per row.
class WeightedTable final : public WeightedConstraint {
public:
    /// rows/costs aligned; duplicate rows are rejected (the cost function
    /// must be well defined).
    WeightedTable(std::string label, VarList scope,
                  std::vector<std::vector<Value>> domains,
                  std::vector<std::vector<Value>> rows, std::vector<Rational> costs);

    static std::shared_ptr<const WeightedTable>
    from_assignments(std::string label, VarList scope,
                     std::vector<std::vector<Value>> domains,
                     const std::vector<Assignment>& rows, std::vector<Rational> costs);

    const TableConstraint& table() const;
    const std::vector<Rational>& costs() const { return costs_; }

    Rational cost(const Assignment& theta) const override;
    bool has_weighted_pac() const override { return true; }
    bool weighted_pac(const Assignment& theta, const Rational& k) const override;
    std::optional<Rational> min_cost_extension(const Assignment& theta) const override;
    std::size_t description_size() const override;

private:
    std::vector<Rational> costs_; // aligned to table rows
};

/// Wraps any constraint with the zero cost function.
WeightedPtr zero_cost(const ConstraintPtr& c);

/// Black-box weighted constraint: costs are only reachable through a
/// weighted-PAC oracle. min_cost_extension runs a binary search over the
/// integer grid with denominators bounded by L within [lo, hi].
class BlackBoxWeighted final : public WeightedConstraint {
public:
    using Oracle = std::function<bool(const Assignment&, const Rational&)>;
    using CostFn = std::function<Rational(const Assignment&)>;

    BlackBoxWeighted(ConstraintPtr base, CostFn cost, Oracle weighted_pac,
                     BigInt denominator_bound, Rational lo, Rational hi);

    Rational cost(const Assignment& theta) const override;
    bool has_weighted_pac() const override { return true; }
    bool weighted_pac(const Assignment& theta, const Rational& k) const override;
    std::optional<Rational> min_cost_extension(const Assignment& theta) const override;
    std::size_t description_size() const override;

private:
    CostFn cost_;
    Oracle oracle_;
    BigInt denominator_bound_;
    Rational lo_, hi_;
};

/// A WCSP instance: a CSP instance whose constraints carry costs.
class WcspInstance {
public:
    WcspInstance() = default;
    WcspInstance(std::vector<std::pair<VariableId, std::vector<Value>>> domains,
                 std::vector<WeightedPtr> constraints);

    const CspInstance& base() const { return base_; }
    const std::vector<WeightedPtr>& constraints() const { return weighted_; }

private:
    CspInstance base_;
    std::vector<WeightedPtr> weighted_;
};

/// Σ over constraints of cost(θ|scope). ApplicabilityError unless θ ∈ sol(P).
Rational wcost(const WcspInstance& P, const Assignment& theta);

/// Weighted projection: base projected to X, cost = min cost over extensions.
WeightedPtr weighted_project(const WeightedPtr& c, const VarList& X);

/// Instance-level weighted projection, mirroring pj_X(P).
WcspInstance project_wcsp(const WcspInstance& P, const VarList& X);

std::size_t wcsp_size(const WcspInstance& P);

struct WeightedDecomposition {
    std::vector<WcspInstance> parts;
};

WcspInstance wcsp_union(const WcspInstance& Q1, const WcspInstance& Q2);
WcspInstance weighted_decomposition_union(const WeightedDecomposition& S);

/// Weighted table induced by part T (an index into S.parts): one row θ ⊕ μ*
/// per θ ∈ sol(pj_{iv(T)}(⊔S)), carrying cost(pj_{iv(T)}(T), θ).
WeightedPtr weighted_induced_constraint(const WeightedDecomposition& S, std::size_t T,
                                        std::uint64_t cap);

/// The weighted global→classic reduction with its lifting procedure.
class WeightedReduction {
public:
    WeightedReduction(WcspInstance classic, WeightedDecomposition parts,
                      std::vector<VarList> ivs);

    const WcspInstance& classic() const { return classic_; }

    /// Maps a solution of the classic instance to a solution of ⊔S of equal
    /// cost (min-cost extension per part).
    Assignment lift(const Assignment& classic_solution) const;

private:
    WcspInstance classic_;
    WeightedDecomposition parts_;
    std::vector<VarList> ivs_;
};

WeightedReduction reduce_weighted(const WeightedDecomposition& S, std::uint64_t cap);

struct WcspResult {
    std::optional<Rational> optimal; // nullopt when unsatisfiable
    std::optional<Assignment> argmin;
};

/// Minimum wcost over sol(P): min-sum message passing over a tree
/// decomposition for all-table instances, exhaustive search otherwise.
WcspResult wcsp_optimal(const WcspInstance& P);

/// True iff P has a solution of cost ≤ k.
bool wcsp_decision(const WcspInstance& P, const Rational& k);

} // namespace gcsp
