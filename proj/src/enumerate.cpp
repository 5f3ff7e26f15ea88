#include "globalcsp/enumerate.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include "globalcsp/errors.hpp"
#include "globalcsp/reduction.hpp"

namespace gcsp {

namespace {

constexpr std::uint64_t kSat = UINT64_MAX;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        return 0;
    if (a > kSat / b)
        return kSat;
    return a * b;
}

/// Per-constraint incremental membership check for the level-wise engine.
/// Rows are dense vectors of domain indices aligned to the enumeration order;
/// begin_parent() fixes the parent partial row, admits_child() tests one more
/// value for the level's variable.
class Checker {
public:
    virtual ~Checker() = default;
    virtual void begin_parent(const std::uint32_t* parent, std::size_t level) = 0;
    virtual bool admits_child(std::uint32_t value_idx) = 0;
};

std::uint32_t domain_index(const std::vector<Value>& dom, Value v) {
    auto it = std::lower_bound(dom.begin(), dom.end(), v);
    return static_cast<std::uint32_t>(it - dom.begin());
}

/// Shared layout for table-backed checkers: scope coordinates are permuted so
/// that variables appear in the order they get assigned, with variables
/// outside the enumeration order at the tail (never assigned).
struct PermutedRows {
    std::vector<std::size_t> order_positions; // ascending order indices of scope vars
    std::vector<std::uint32_t> rows;          // flattened, sorted lexicographically
    std::size_t arity = 0;
    std::vector<std::uint64_t> suffix_product; // of permuted domain sizes

    PermutedRows(const GlobalConstraint& c, const std::vector<std::vector<Value>>& rows_in,
                 const std::vector<std::size_t>& scope_to_order) {
        const auto& scope = c.scope();
        arity = scope.size();
        std::vector<std::size_t> perm(arity);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return scope_to_order[a] < scope_to_order[b];
        });
        for (std::size_t pos = 0; pos < arity; ++pos)
            if (scope_to_order[pos] != SIZE_MAX)
                order_positions.push_back(scope_to_order[pos]);
        std::sort(order_positions.begin(), order_positions.end());

        std::vector<std::vector<std::uint32_t>> permuted;
        permuted.reserve(rows_in.size());
        for (const auto& row : rows_in) {
            std::vector<std::uint32_t> pr(arity);
            for (std::size_t j = 0; j < arity; ++j)
                pr[j] = domain_index(c.scope_domains()[perm[j]], row[perm[j]]);
            permuted.push_back(std::move(pr));
        }
        std::sort(permuted.begin(), permuted.end());
        rows.reserve(permuted.size() * arity);
        for (const auto& pr : permuted)
            rows.insert(rows.end(), pr.begin(), pr.end());

        suffix_product.assign(arity + 1, 1);
        for (std::size_t j = arity; j-- > 0;)
            suffix_product[j] =
                sat_mul(suffix_product[j + 1], c.scope_domains()[perm[j]].size());
    }

    std::size_t row_count() const { return arity == 0 ? 0 : rows.size() / arity; }

    /// Number of scope coordinates assigned once the variable at order index
    /// `level` is placed (that variable must be in the scope).
    std::size_t assigned_at(std::size_t level) const {
        auto it = std::lower_bound(order_positions.begin(), order_positions.end(), level);
        return static_cast<std::size_t>(it - order_positions.begin()) + 1;
    }

    /// Range of rows matching the first (m-1) coordinates of the key.
    std::pair<std::size_t, std::size_t> prefix_range(const std::vector<std::uint32_t>& key,
                                                     std::size_t len) const {
        std::size_t lo = 0, hi = row_count();
        for (std::size_t j = 0; j < len; ++j) {
            auto cmp_lo = [&](std::size_t idx) { return rows[idx * arity + j] < key[j]; };
            auto cmp_hi = [&](std::size_t idx) { return rows[idx * arity + j] <= key[j]; };
            std::size_t l = lo, h = hi;
            while (l < h) {
                std::size_t mid = (l + h) / 2;
                if (cmp_lo(mid))
                    l = mid + 1;
                else
                    h = mid;
            }
            std::size_t new_lo = l;
            l = new_lo;
            h = hi;
            while (l < h) {
                std::size_t mid = (l + h) / 2;
                if (cmp_hi(mid))
                    l = mid + 1;
                else
                    h = mid;
            }
            lo = new_lo;
            hi = l;
            if (lo == hi)
                break;
        }
        return {lo, hi};
    }

    /// Within [lo,hi) (rows agreeing on the first `coord` coordinates), the
    /// subrange whose coordinate `coord` equals `val`.
    std::pair<std::size_t, std::size_t> narrow(std::size_t lo, std::size_t hi,
                                               std::size_t coord, std::uint32_t val) const {
        auto less = [&](std::size_t idx, std::uint32_t v) {
            return rows[idx * arity + coord] < v;
        };
        std::size_t l = lo, h = hi;
        while (l < h) {
            std::size_t mid = (l + h) / 2;
            if (less(mid, val))
                l = mid + 1;
            else
                h = mid;
        }
        std::size_t first = l;
        h = hi;
        while (l < h) {
            std::size_t mid = (l + h) / 2;
            if (rows[mid * arity + coord] <= val)
                l = mid + 1;
            else
                h = mid;
        }
        return {first, l};
    }
};

class TableChecker final : public Checker {
public:
    TableChecker(const TableConstraint& t, const std::vector<std::size_t>& scope_to_order)
        : pr_(t, t.rows(), scope_to_order) {}

    void begin_parent(const std::uint32_t* parent, std::size_t level) override {
        m_ = pr_.assigned_at(level);
        key_.clear();
        for (std::size_t j = 0; j + 1 < m_; ++j)
            key_.push_back(parent[pr_.order_positions[j]]);
        std::tie(lo_, hi_) = pr_.prefix_range(key_, m_ - 1);
    }

    bool admits_child(std::uint32_t value_idx) override {
        if (lo_ == hi_)
            return false;
        auto [l, h] = pr_.narrow(lo_, hi_, m_ - 1, value_idx);
        return l < h;
    }

private:
    PermutedRows pr_;
    std::vector<std::uint32_t> key_;
    std::size_t m_ = 0, lo_ = 0, hi_ = 0;
};

class NegativeChecker final : public Checker {
public:
    NegativeChecker(const NegativeConstraint& t,
                    const std::vector<std::size_t>& scope_to_order)
        : pr_(t, t.forbidden(), scope_to_order) {}

    void begin_parent(const std::uint32_t* parent, std::size_t level) override {
        m_ = pr_.assigned_at(level);
        key_.clear();
        for (std::size_t j = 0; j + 1 < m_; ++j)
            key_.push_back(parent[pr_.order_positions[j]]);
        std::tie(lo_, hi_) = pr_.prefix_range(key_, m_ - 1);
    }

    bool admits_child(std::uint32_t value_idx) override {
        std::uint64_t extensions = pr_.suffix_product[m_];
        if (lo_ == hi_)
            return extensions > 0;
        auto [l, h] = pr_.narrow(lo_, hi_, m_ - 1, value_idx);
        return static_cast<std::uint64_t>(h - l) < extensions;
    }

private:
    PermutedRows pr_;
    std::vector<std::uint32_t> key_;
    std::size_t m_ = 0, lo_ = 0, hi_ = 0;
};

class EgcChecker final : public Checker {
public:
    EgcChecker(std::shared_ptr<const EgcConstraint> egc,
               const std::vector<std::size_t>& scope_to_order)
        : egc_(std::move(egc)), scope_to_order_(scope_to_order) {
        const auto& scope = egc_->scope();
        translate_.resize(scope.size());
        for (std::size_t pos = 0; pos < scope.size(); ++pos) {
            const auto& dom = egc_->scope_domains()[pos];
            translate_[pos].reserve(dom.size());
            for (const auto& v : dom)
                translate_[pos].push_back(static_cast<int>(egc_->value_index(v)));
        }
        counts_.resize(egc_->counted_values().size());
    }

    void begin_parent(const std::uint32_t* parent, std::size_t level) override {
        std::fill(counts_.begin(), counts_.end(), 0);
        unassigned_.clear();
        new_pos_ = SIZE_MAX;
        for (std::size_t pos = 0; pos < scope_to_order_.size(); ++pos) {
            std::size_t at = scope_to_order_[pos];
            if (at == level) {
                new_pos_ = pos;
            } else if (at < level) {
                ++counts_[translate_[pos][parent[at]]];
            } else {
                unassigned_.push_back(pos);
            }
        }
    }

    bool admits_child(std::uint32_t value_idx) override {
        int vi = translate_[new_pos_][value_idx];
        ++counts_[vi];
        bool ok = egc_->feasible_completion(counts_, unassigned_);
        --counts_[vi];
        return ok;
    }

private:
    std::shared_ptr<const EgcConstraint> egc_;
    std::vector<std::size_t> scope_to_order_;
    std::vector<std::vector<int>> translate_;
    std::vector<int> counts_;
    std::vector<std::size_t> unassigned_;
    std::size_t new_pos_ = SIZE_MAX;
};

class GenericChecker final : public Checker {
public:
    GenericChecker(ConstraintPtr c, const CspInstance& P, const VarList& order,
                   const std::vector<std::size_t>& scope_to_order)
        : c_(std::move(c)) {
        for (std::size_t pos = 0; pos < c_->scope().size(); ++pos)
            if (scope_to_order[pos] != SIZE_MAX)
                assigned_.emplace_back(scope_to_order[pos], c_->scope()[pos]);
        std::sort(assigned_.begin(), assigned_.end());
        for (const auto& [at, v] : assigned_)
            domains_.push_back(&P.domain_of(v));
        (void)order;
    }

    void begin_parent(const std::uint32_t* parent, std::size_t level) override {
        bindings_.clear();
        new_slot_ = SIZE_MAX;
        for (std::size_t j = 0; j < assigned_.size(); ++j) {
            auto [at, v] = assigned_[j];
            if (at < level) {
                bindings_.emplace_back(v, (*domains_[j])[parent[at]]);
            } else if (at == level) {
                new_slot_ = j;
                bindings_.emplace_back(v, Value::star()); // placeholder
                break;
            } else {
                break;
            }
        }
        new_binding_index_ = bindings_.size() - 1;
    }

    bool admits_child(std::uint32_t value_idx) override {
        auto bindings = bindings_;
        bindings[new_binding_index_].second = (*domains_[new_slot_])[value_idx];
        return c_->pac_extends(Assignment::from_pairs(std::move(bindings)));
    }

private:
    ConstraintPtr c_;
    std::vector<std::pair<std::size_t, VariableId>> assigned_; // (order idx, var)
    std::vector<const std::vector<Value>*> domains_;
    std::vector<Assignment::Binding> bindings_;
    std::size_t new_slot_ = SIZE_MAX;
    std::size_t new_binding_index_ = SIZE_MAX;
};

} // namespace

namespace detail {

LevelwiseResult levelwise_solutions(const CspInstance& P, const VarList& order,
                                    std::uint64_t level_cap, std::uint64_t final_cap,
                                    std::uint64_t budget, bool materialize) {
    if (sorted_vars(order) != P.variables())
        throw ScopeError("enumeration order is not a permutation of the variables");
    for (const auto& c : P.constraints())
        if (!c->has_pac())
            throw CapabilityError("constraint '" + c->label() +
                                  "' offers no PAC; level-wise enumeration is unavailable");

    const std::size_t n = order.size();
    std::vector<const std::vector<Value>*> domains;
    domains.reserve(n);
    for (const auto& v : order)
        domains.push_back(&P.domain_of(v));

    auto order_index = [&](VariableId v) -> std::size_t {
        for (std::size_t i = 0; i < n; ++i)
            if (order[i] == v)
                return i;
        return SIZE_MAX;
    };

    std::vector<std::unique_ptr<Checker>> checkers;
    std::vector<std::vector<Checker*>> at_level(n);
    for (const auto& c : P.constraints()) {
        ConstraintPtr eff = c;
        if (c->kind() == ConstraintKind::projected)
            eff = static_cast<const ProjectedConstraint&>(*c).original();
        std::vector<std::size_t> scope_to_order;
        scope_to_order.reserve(eff->scope().size());
        for (const auto& v : eff->scope())
            scope_to_order.push_back(order_index(v));

        std::unique_ptr<Checker> chk;
        if (const auto* t = dynamic_cast<const TableConstraint*>(eff.get())) {
            chk = std::make_unique<TableChecker>(*t, scope_to_order);
        } else if (const auto* neg = dynamic_cast<const NegativeConstraint*>(eff.get())) {
            chk = std::make_unique<NegativeChecker>(*neg, scope_to_order);
        } else if (auto egc = std::dynamic_pointer_cast<const EgcConstraint>(eff);
                   egc && egc->has_pac()) {
            chk = std::make_unique<EgcChecker>(egc, scope_to_order);
        } else {
            std::vector<std::size_t> wrap_to_order;
            for (const auto& v : c->scope())
                wrap_to_order.push_back(order_index(v));
            chk = std::make_unique<GenericChecker>(c, P, order, wrap_to_order);
            scope_to_order = std::move(wrap_to_order);
        }
        for (std::size_t at : scope_to_order)
            if (at != SIZE_MAX)
                at_level[at].push_back(chk.get());
        checkers.push_back(std::move(chk));
    }

    LevelwiseResult result;
    std::vector<std::uint32_t> prev; // stride k-1
    std::size_t prev_count = 1;      // the root (empty assignment)
    std::uint64_t total = 0;

    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t stride = k;
        const auto& dom = *domains[k - 1];
        const std::uint64_t cap =
            (k == n) ? std::min(level_cap, final_cap) : level_cap;
        std::vector<std::uint32_t> next;
        std::uint64_t count = 0;
        bool aborted = false;

        auto flag_abort = [&]() {
            result.per_level.push_back(count);
            result.level_cap_hit = count >= level_cap;
            result.final_cap_hit = (k == n) && count >= final_cap;
            aborted = true;
        };

        if (cap == 0) {
            flag_abort();
            return result;
        }
        for (std::size_t p = 0; p < prev_count && !aborted; ++p) {
            const std::uint32_t* parent = prev.data() + p * (stride - 1);
            for (Checker* chk : at_level[k - 1])
                chk->begin_parent(parent, k - 1);
            for (std::uint32_t a = 0; a < dom.size(); ++a) {
                bool ok = true;
                for (Checker* chk : at_level[k - 1])
                    if (!chk->admits_child(a)) {
                        ok = false;
                        break;
                    }
                if (!ok)
                    continue;
                next.insert(next.end(), parent, parent + (stride - 1));
                next.push_back(a);
                ++count;
                if (++total > budget)
                    throw BudgetError("enumeration budget exhausted (" +
                                      std::to_string(budget) + " partial solutions)");
                if (count >= cap) {
                    flag_abort();
                    break;
                }
            }
        }
        if (aborted)
            return result;
        result.per_level.push_back(count);
        prev = std::move(next);
        prev_count = static_cast<std::size_t>(count);
    }

    if (materialize) {
        result.solutions.reserve(prev_count);
        for (std::size_t p = 0; p < prev_count; ++p) {
            std::vector<Assignment::Binding> bindings;
            bindings.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                bindings.emplace_back(order[i], (*domains[i])[prev[p * n + i]]);
            result.solutions.push_back(Assignment::from_pairs(std::move(bindings)));
        }
        std::sort(result.solutions.begin(), result.solutions.end());
    }
    return result;
}

} // namespace detail

EnumerationReport enum_solutions(const CspInstance& P, std::optional<VarList> order,
                                 std::uint64_t cap) {
    const auto start = std::chrono::steady_clock::now();
    VarList ord = order ? std::move(*order) : P.variables();
    auto r = detail::levelwise_solutions(P, ord, cap, cap, enumeration_budget(), true);
    EnumerationReport report;
    report.solutions = std::move(r.solutions);
    report.per_level_counts = std::move(r.per_level);
    report.order = std::move(ord);
    report.cap_hit = r.level_cap_hit || r.final_cap_hit;
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::optional<std::uint64_t> count_solutions_capped(const CspInstance& P,
                                                    std::uint64_t cap) {
    auto r = detail::levelwise_solutions(P, P.variables(), cap, cap,
                                         enumeration_budget(), false);
    if (r.level_cap_hit || r.final_cap_hit)
        return std::nullopt;
    if (r.per_level.empty())
        return 1; // the empty assignment
    return r.per_level.back();
}

std::vector<Assignment> brute_force_solutions(const CspInstance& P) {
    const auto& vars = P.variables();
    const auto& doms = P.domains();
    std::uint64_t space = 1;
    for (const auto& d : doms)
        space = sat_mul(space, d.size());
    if (space > enumeration_budget())
        throw BudgetError("assignment space exceeds the enumeration budget");

    std::vector<Assignment> out;
    std::vector<std::size_t> odo(vars.size(), 0);
    while (true) {
        std::vector<Assignment::Binding> bindings;
        bindings.reserve(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i)
            bindings.emplace_back(vars[i], doms[i][odo[i]]);
        Assignment theta = Assignment::from_pairs(std::move(bindings));
        if (P.is_solution(theta))
            out.push_back(std::move(theta));
        std::size_t i = vars.size();
        bool done = true;
        while (i > 0) {
            --i;
            if (++odo[i] < doms[i].size()) {
                done = false;
                break;
            }
            odo[i] = 0;
        }
        if (done)
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_pac_instance(const CspInstance& P) {
    return std::all_of(P.constraints().begin(), P.constraints().end(),
                       [](const ConstraintPtr& c) { return c->has_pac(); });
}

SparsityCertificate has_sparse_intersections(const CspInstance& P, unsigned c,
                                             std::uint64_t probe_budget,
                                             std::uint64_t seed) {
    SparsityCertificate cert;
    cert.exponent = c;
    cert.bound = boost::multiprecision::pow(BigInt(instance_size(P)),
                                            static_cast<int>(c));
    const std::uint64_t cap =
        cert.bound > BigInt(kNoCap) ? kNoCap : static_cast<std::uint64_t>(cert.bound);

    std::size_t constraint_idx = 0;
    for (const auto& ci : P.constraints()) {
        VarList iv = intersection_variables(P, ci);
        SparsityProbe probe{ci->label(), 0, false};

        // X = iv exactly, then random proper subsets; the levels visited by
        // each run cover further subsets for free.
        std::vector<VarList> targets;
        if (!iv.empty())
            targets.push_back(iv);
        if (iv.size() > 1 && probe_budget > 0) {
            std::mt19937_64 rng(seed ^ (constraint_idx * 0x9e3779b97f4a7c15ull));
            std::set<std::vector<std::size_t>> seen;
            std::uint64_t made = 0, attempts = 0;
            while (made < probe_budget && attempts < 8 * probe_budget + 64) {
                ++attempts;
                std::vector<std::size_t> pick;
                for (std::size_t i = 0; i < iv.size(); ++i)
                    if (rng() & 1)
                        pick.push_back(i);
                if (pick.empty() || pick.size() == iv.size() || !seen.insert(pick).second)
                    continue;
                VarList X;
                for (std::size_t i : pick)
                    X.push_back(iv[i]);
                targets.push_back(std::move(X));
                ++made;
            }
        }

        bool violated = false;
        for (const auto& X : targets) {
            CspInstance Pi = project_instance(P, X);
            detail::LevelwiseResult r;
            try {
                r = detail::levelwise_solutions(Pi, Pi.variables(), cap, cap,
                                                enumeration_budget(), false);
            } catch (const BudgetError&) {
                cert.per_constraint.push_back(probe);
                cert.verdict = SparsityVerdict::exhausted_budget;
                cert.offending_label = ci->label();
                return cert;
            }
            for (std::uint64_t lv : r.per_level)
                probe.max_count = std::max(probe.max_count, lv);
            if (r.level_cap_hit || r.final_cap_hit) {
                probe.capped = true;
                violated = true;
                break;
            }
        }
        if (targets.empty() && cert.bound <= 1)
            violated = true; // |sol(pj_none)| ≤ 1 cannot be < an exhausted bound
        cert.per_constraint.push_back(probe);
        if (violated) {
            cert.verdict = SparsityVerdict::not_sparse;
            cert.offending_label = ci->label();
            return cert;
        }
        ++constraint_idx;
    }
    cert.verdict = SparsityVerdict::sparse;
    return cert;
}

} // namespace gcsp
