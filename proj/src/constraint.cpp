#include "globalcsp/constraint.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "globalcsp/errors.hpp"

namespace gcsp {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0)
        return 0;
    if (a > kSaturated / b)
        return kSaturated;
    return a * b;
}

struct ScopeNorm {
    VarList scope;
    std::vector<std::vector<Value>> domains;
    std::vector<std::size_t> perm; // sorted position -> original position
};

std::vector<Value> normalize_domain(std::vector<Value> dom) {
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    if (dom.empty())
        throw DomainError("empty domain");
    if (dom.size() > 1)
        for (const auto& v : dom)
            if (v.is_star())
                throw DomainError("the reserved value '*' may only form a singleton domain");
    return dom;
}

ScopeNorm normalize_scope(const std::string& label, VarList scope,
                          std::vector<std::vector<Value>> domains) {
    if (scope.empty())
        throw ScopeError("constraint '" + label + "': scope must be nonempty");
    if (domains.size() != scope.size())
        throw DomainError("constraint '" + label + "': one domain per scope variable required");
    std::vector<std::size_t> perm(scope.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
    ScopeNorm out;
    out.scope.reserve(scope.size());
    out.domains.reserve(scope.size());
    for (std::size_t i : perm) {
        out.scope.push_back(scope[i]);
        out.domains.push_back(normalize_domain(std::move(domains[i])));
    }
    for (std::size_t i = 1; i < out.scope.size(); ++i)
        if (out.scope[i] == out.scope[i - 1])
            throw ScopeError("constraint '" + label + "': scope lists variable '" +
                             std::string(out.scope[i].name()) + "' twice");
    out.perm = std::move(perm);
    return out;
}

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<std::vector<Value>>
normalize_rows(const std::string& label, const ScopeNorm& norm,
               std::vector<std::vector<Value>> rows) {
    for (auto& row : rows) {
        if (row.size() != norm.scope.size())
            throw DomainError("constraint '" + label + "': row arity mismatch");
        std::vector<Value> permuted(row.size());
        for (std::size_t i = 0; i < row.size(); ++i)
            permuted[i] = row[norm.perm[i]];
        for (std::size_t i = 0; i < permuted.size(); ++i)
            if (!std::binary_search(norm.domains[i].begin(), norm.domains[i].end(),
                                    permuted[i]))
                throw DomainError("constraint '" + label + "': row value '" +
                                  std::string(permuted[i].text()) +
                                  "' outside the domain of '" +
                                  std::string(norm.scope[i].name()) + "'");
        row = std::move(permuted);
    }
    std::sort(rows.begin(), rows.end(), row_less);
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

/// Tiny Dinic max-flow for the EGC feasibility network.
class MaxFlow {
public:
    explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

    void add_edge(int u, int v, std::int64_t cap) {
        edges_.push_back({v, head_[u], cap});
        head_[u] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({u, head_[v], 0});
        head_[v] = static_cast<int>(edges_.size()) - 1;
    }

    std::int64_t run(int s, int t) {
        std::int64_t flow = 0;
        while (bfs(s, t)) {
            it_ = head_;
            while (std::int64_t pushed = dfs(s, t, std::numeric_limits<std::int64_t>::max()))
                flow += pushed;
        }
        return flow;
    }

private:
    struct Edge {
        int to;
        int next;
        std::int64_t cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[u]; e != -1; e = edges_[e].next)
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
        }
        return level_[t] >= 0;
    }

    std::int64_t dfs(int u, int t, std::int64_t limit) {
        if (u == t || limit == 0)
            return limit;
        for (int& e = it_[u]; e != -1; e = edges_[e].next) {
            int v = edges_[e].to;
            if (edges_[e].cap > 0 && level_[v] == level_[u] + 1) {
                std::int64_t pushed = dfs(v, t, std::min(limit, edges_[e].cap));
                if (pushed > 0) {
                    edges_[e].cap -= pushed;
                    edges_[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
        }
        level_[u] = -1;
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_, level_, it_;
};

} // namespace

GlobalConstraint::GlobalConstraint(ConstraintKind kind, std::string label, VarList scope,
                                   std::vector<std::vector<Value>> domains)
    : kind_(kind), label_(std::move(label)), scope_(std::move(scope)),
      domains_(std::move(domains)) {}

const std::vector<Value>& GlobalConstraint::domain_of(VariableId v) const {
    return domains_[scope_position(v)];
}

std::size_t GlobalConstraint::scope_position(VariableId v) const {
    auto it = std::lower_bound(scope_.begin(), scope_.end(), v);
    if (it == scope_.end() || *it != v)
        throw ScopeError("constraint '" + label_ + "' does not contain variable '" +
                         std::string(v.name()) + "'");
    return static_cast<std::size_t>(it - scope_.begin());
}

void GlobalConstraint::check_full(const Assignment& theta) const {
    if (theta.variables() != scope_)
        throw ScopeError("constraint '" + label_ +
                         "': evaluate needs a full assignment of the scope");
}

void GlobalConstraint::check_partial(const Assignment& theta) const {
    for (const auto& [v, _] : theta.bindings())
        if (!contains_var(scope_, v))
            throw ScopeError("constraint '" + label_ + "': assignment binds '" +
                             std::string(v.name()) + "' outside the scope");
}

// ---------------------------------------------------------------- table ----

TableConstraint::TableConstraint(std::string label, VarList scope,
                                 std::vector<std::vector<Value>> domains,
                                 std::vector<std::vector<Value>> rows)
    : GlobalConstraint(ConstraintKind::table, label, {}, {}) {
    auto norm = normalize_scope(label, std::move(scope), std::move(domains));
    rows_ = normalize_rows(label, norm, std::move(rows));
    scope_ = std::move(norm.scope);
    domains_ = std::move(norm.domains);
}

std::shared_ptr<const TableConstraint>
TableConstraint::from_assignments(std::string label, VarList scope,
                                  std::vector<std::vector<Value>> domains,
                                  const std::vector<Assignment>& rows) {
    VarList sorted = sorted_vars(scope);
    std::vector<std::vector<Value>> tuples;
    tuples.reserve(rows.size());
    for (const auto& theta : rows) {
        if (theta.variables() != sorted)
            throw ScopeError("table row is not a full assignment of the scope");
        std::vector<Value> tuple;
        tuple.reserve(sorted.size());
        for (const auto& [_, val] : theta.bindings())
            tuple.push_back(val);
        tuples.push_back(std::move(tuple));
    }
    // rows are already aligned to the sorted scope; align domains the same way
    std::vector<std::size_t> perm(scope.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(),
              [&](std::size_t a, std::size_t b) { return scope[a] < scope[b]; });
    std::vector<std::vector<Value>> sorted_domains;
    sorted_domains.reserve(domains.size());
    for (std::size_t i : perm)
        sorted_domains.push_back(domains[i]);
    return std::make_shared<TableConstraint>(std::move(label), sorted,
                                             std::move(sorted_domains), std::move(tuples));
}

Assignment TableConstraint::row_as_assignment(std::size_t i) const {
    std::vector<Assignment::Binding> bindings;
    bindings.reserve(scope_.size());
    for (std::size_t j = 0; j < scope_.size(); ++j)
        bindings.emplace_back(scope_[j], rows_[i][j]);
    return Assignment::from_pairs(std::move(bindings));
}

std::size_t TableConstraint::description_size() const {
    return rows_.size() * scope_.size() + scope_.size();
}

bool TableConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    std::vector<Value> tuple;
    tuple.reserve(scope_.size());
    for (const auto& [_, val] : theta.bindings())
        tuple.push_back(val);
    return std::binary_search(rows_.begin(), rows_.end(), tuple, row_less);
}

bool TableConstraint::pac_extends(const Assignment& theta) const {
    check_partial(theta);
    std::vector<std::pair<std::size_t, Value>> fixed;
    fixed.reserve(theta.size());
    for (const auto& [v, val] : theta.bindings())
        fixed.emplace_back(scope_position(v), val);
    for (const auto& row : rows_) {
        bool ok = true;
        for (const auto& [pos, val] : fixed)
            if (row[pos] != val) {
                ok = false;
                break;
            }
        if (ok)
            return true;
    }
    return false;
}

// ------------------------------------------------------------- negative ----

NegativeConstraint::NegativeConstraint(std::string label, VarList scope,
                                       std::vector<std::vector<Value>> domains,
                                       std::vector<std::vector<Value>> forbidden)
    : GlobalConstraint(ConstraintKind::negative, label, {}, {}) {
    auto norm = normalize_scope(label, std::move(scope), std::move(domains));
    rows_ = normalize_rows(label, norm, std::move(forbidden));
    scope_ = std::move(norm.scope);
    domains_ = std::move(norm.domains);
}

std::size_t NegativeConstraint::description_size() const {
    return rows_.size() * scope_.size() + scope_.size();
}

bool NegativeConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    std::vector<Value> tuple;
    tuple.reserve(scope_.size());
    for (const auto& [_, val] : theta.bindings())
        tuple.push_back(val);
    return !std::binary_search(rows_.begin(), rows_.end(), tuple, row_less);
}

bool NegativeConstraint::pac_extends(const Assignment& theta) const {
    check_partial(theta);
    std::vector<std::optional<Value>> fixed(scope_.size());
    for (const auto& [v, val] : theta.bindings())
        fixed[scope_position(v)] = val;
    std::uint64_t consistent = 0;
    for (const auto& row : rows_) {
        bool ok = true;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (fixed[i] && *fixed[i] != row[i]) {
                ok = false;
                break;
            }
        if (ok)
            ++consistent;
    }
    std::uint64_t extensions = 1;
    for (std::size_t i = 0; i < scope_.size(); ++i)
        if (!fixed[i])
            extensions = saturating_mul(extensions, domains_[i].size());
    return consistent < extensions;
}

// ------------------------------------------------------------------ egc ----

CardinalitySet CardinalitySet::interval(int lo, int hi) {
    if (lo < 0 || lo > hi)
        throw ValidationError("malformed cardinality interval");
    CardinalitySet k;
    k.is_interval = true;
    k.lo = lo;
    k.hi = hi;
    return k;
}

CardinalitySet CardinalitySet::explicit_set(std::vector<int> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (int m : members)
        if (m < 0)
            throw ValidationError("cardinality sets contain naturals only");
    if (!members.empty() &&
        members.back() - members.front() == static_cast<int>(members.size()) - 1)
        return interval(members.front(), members.back());
    CardinalitySet k;
    k.is_interval = false;
    k.members = std::move(members);
    return k;
}

bool CardinalitySet::contains(int n) const {
    if (is_interval)
        return lo <= n && n <= hi;
    return std::binary_search(members.begin(), members.end(), n);
}

EgcConstraint::EgcConstraint(std::string label, VarList scope,
                             std::vector<std::vector<Value>> domains,
                             std::map<Value, CardinalitySet> cardinality)
    : GlobalConstraint(ConstraintKind::egc, label, {}, {}) {
    auto norm = normalize_scope(label, std::move(scope), std::move(domains));
    scope_ = std::move(norm.scope);
    domains_ = std::move(norm.domains);

    for (const auto& dom : domains_)
        for (const auto& v : dom)
            values_.push_back(v);
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());

    const int n = static_cast<int>(scope_.size());
    card_.reserve(values_.size());
    for (const auto& v : values_) {
        auto it = cardinality.find(v);
        if (it == cardinality.end())
            throw ValidationError("constraint '" + label_ + "': no cardinality set for value '" +
                                  std::string(v.text()) + "'");
        const CardinalitySet& k = it->second;
        int top = k.is_interval ? k.hi : (k.members.empty() ? 0 : k.members.back());
        if (top > n)
            throw ValidationError("constraint '" + label_ + "': cardinality for '" +
                                  std::string(v.text()) + "' exceeds the scope size");
        card_.push_back(k);
        cardinality.erase(it);
    }
    if (!cardinality.empty())
        throw ValidationError("constraint '" + label_ +
                              "': cardinality entry for a value outside D(scope)");

    domain_value_indices_.reserve(scope_.size());
    for (const auto& dom : domains_) {
        std::vector<int> idx;
        idx.reserve(dom.size());
        for (const auto& v : dom)
            idx.push_back(static_cast<int>(value_index(v)));
        domain_value_indices_.push_back(std::move(idx));
    }
    all_intervals_ = std::all_of(card_.begin(), card_.end(),
                                 [](const CardinalitySet& k) { return k.is_interval; });
}

const CardinalitySet& EgcConstraint::cardinality_of(Value a) const {
    return card_[value_index(a)];
}

std::size_t EgcConstraint::value_index(Value a) const {
    auto it = std::lower_bound(values_.begin(), values_.end(), a);
    if (it == values_.end() || *it != a)
        throw DomainError("constraint '" + label_ + "': value '" + std::string(a.text()) +
                          "' is not in D(scope)");
    return static_cast<std::size_t>(it - values_.begin());
}

std::size_t EgcConstraint::description_size() const {
    std::size_t total = scope_.size();
    for (const auto& k : card_)
        total += k.encoding_size();
    return total;
}

bool EgcConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    std::vector<int> counts(values_.size(), 0);
    for (const auto& [_, val] : theta.bindings())
        ++counts[value_index(val)];
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!card_[i].contains(counts[i]))
            return false;
    return true;
}

PacCapability EgcConstraint::pac_capability() const {
    return all_intervals_ ? PacCapability::native : PacCapability::none;
}

bool EgcConstraint::pac_extends(const Assignment& theta) const {
    if (!all_intervals_)
        throw CapabilityError("constraint '" + label_ +
                              "': PAC requires interval cardinality sets");
    check_partial(theta);
    std::vector<int> counts(values_.size(), 0);
    std::vector<bool> assigned(scope_.size(), false);
    for (const auto& [v, val] : theta.bindings()) {
        std::size_t pos = scope_position(v);
        assigned[pos] = true;
        ++counts[value_index(val)];
    }
    std::vector<std::size_t> unassigned;
    for (std::size_t i = 0; i < scope_.size(); ++i)
        if (!assigned[i])
            unassigned.push_back(i);
    return feasible_completion(counts, unassigned);
}

bool EgcConstraint::feasible_completion(
    const std::vector<int>& committed_counts,
    const std::vector<std::size_t>& unassigned_positions) const {
    if (!all_intervals_)
        throw CapabilityError("constraint '" + label_ +
                              "': feasibility check requires interval cardinality sets");
    const std::size_t m = values_.size();
    std::vector<std::int64_t> lower(m), upper(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (committed_counts[i] > card_[i].hi)
            return false;
        lower[i] = std::max(0, card_[i].lo - committed_counts[i]);
        upper[i] = card_[i].hi - committed_counts[i];
    }
    const std::int64_t need = static_cast<std::int64_t>(unassigned_positions.size());

    bool uniform = true;
    for (std::size_t j = 1; j < unassigned_positions.size(); ++j)
        if (domain_value_indices_[unassigned_positions[j]] !=
            domain_value_indices_[unassigned_positions[0]]) {
            uniform = false;
            break;
        }
    if (uniform) {
        std::vector<bool> reachable(m, false);
        if (!unassigned_positions.empty())
            for (int idx : domain_value_indices_[unassigned_positions[0]])
                reachable[idx] = true;
        std::int64_t total_l = 0, total_u = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!reachable[i]) {
                if (lower[i] > 0)
                    return false;
                continue;
            }
            total_l += lower[i];
            total_u += std::min(upper[i], need);
        }
        return total_l <= need && need <= total_u;
    }

    // Mixed domains: feasible circulation with lower bounds.
    // Nodes: 0 = s, 1 = t, 2 = super-source, 3 = super-sink, then left
    // (unassigned positions), then right (values).
    const int s = 0, t = 1, ss = 2, st = 3;
    const int left0 = 4;
    const int right0 = left0 + static_cast<int>(unassigned_positions.size());
    MaxFlow net(right0 + static_cast<int>(m));
    std::vector<std::int64_t> excess(right0 + m, 0);
    for (std::size_t j = 0; j < unassigned_positions.size(); ++j) {
        // s -> left with bounds [1,1]
        excess[left0 + j] += 1;
        excess[s] -= 1;
        for (int idx : domain_value_indices_[unassigned_positions[j]])
            net.add_edge(left0 + static_cast<int>(j), right0 + idx, 1);
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (upper[i] < lower[i])
            return false;
        net.add_edge(right0 + static_cast<int>(i), t, upper[i] - lower[i]);
        excess[t] += lower[i];
        excess[right0 + i] -= lower[i];
    }
    net.add_edge(t, s, std::numeric_limits<std::int64_t>::max() / 4);
    std::int64_t required = 0;
    for (int u = 0; u < right0 + static_cast<int>(m); ++u) {
        if (u == ss || u == st)
            continue;
        if (excess[u] > 0) {
            net.add_edge(ss, u, excess[u]);
            required += excess[u];
        } else if (excess[u] < 0) {
            net.add_edge(u, st, -excess[u]);
        }
    }
    return net.run(ss, st) == required;
}

// ------------------------------------------------------------ projected ----

ProjectedConstraint::ProjectedConstraint(std::string label, ConstraintPtr original, VarList X)
    : GlobalConstraint(ConstraintKind::projected, std::move(label), {}, {}),
      original_(std::move(original)) {
    if (!original_)
        throw ValidationError("projection of a null constraint");
    if (original_->kind() == ConstraintKind::projected)
        throw ValidationError("projection wrappers must wrap the original constraint");
    if (!original_->has_pac())
        throw CapabilityError("constraint '" + original_->label() +
                              "': projection requires PAC");
    scope_ = sorted_vars(std::move(X));
    if (scope_.empty())
        throw ScopeError("projection onto the empty set is rejected");
    if (!subset_of(scope_, original_->scope()))
        throw ScopeError("projection target is not a subset of the scope");
    domains_.reserve(scope_.size());
    for (const auto& v : scope_)
        domains_.push_back(original_->domain_of(v));
}

std::size_t ProjectedConstraint::description_size() const {
    return scope_.size() + original_->description_size();
}

bool ProjectedConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    return original_->pac_extends(theta);
}

bool ProjectedConstraint::pac_extends(const Assignment& theta) const {
    check_partial(theta);
    return original_->pac_extends(theta);
}

// ------------------------------------------------------------ augmented ----

BackDoorSpec BackDoorSpec::full_scope(const ConstraintPtr& base) {
    BackDoorSpec bd;
    bd.W = base->scope();
    bd.decider = [](const GlobalConstraint& c, const Assignment& theta) {
        return c.evaluate(theta.restrict_to(c.scope()));
    };
    return bd;
}

AugmentedConstraint::AugmentedConstraint(std::string label, ConstraintPtr base,
                                         BackDoorSpec bd, AssignmentSet allowed)
    : GlobalConstraint(ConstraintKind::augmented, std::move(label), {}, {}),
      base_(std::move(base)), bd_(std::move(bd)), allowed_(std::move(allowed)) {
    if (!base_)
        throw ValidationError("augmentation of a null constraint");
    bd_.W = sorted_vars(std::move(bd_.W));
    if (!subset_of(bd_.W, base_->scope()))
        throw ScopeError("back-door set must be a subset of the scope");
    if (!bd_.decider)
        throw ValidationError("back-door spec lacks an extension decider");
    if (!allowed_.empty() && allowed_.variables() != bd_.W)
        throw ScopeError("allowed set is not over the back-door variables");
    scope_ = base_->scope();
    domains_ = base_->scope_domains();
}

std::size_t AugmentedConstraint::description_size() const {
    return base_->description_size() + allowed_.size() * bd_.W.size() + bd_.W.size();
}

bool AugmentedConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    return base_->evaluate(theta) && allowed_.contains(theta.restrict_to(bd_.W));
}

bool AugmentedConstraint::pac_extends(const Assignment& theta) const {
    check_partial(theta);
    for (const auto& tau : allowed_.members()) {
        if (!tau.consistent_with(theta))
            continue;
        VarList missing = difference_of(bd_.W, theta.variables());
        Assignment combined = theta.disjoint_union(tau.restrict_to(missing));
        if (bd_.decider(*base_, combined))
            return true;
    }
    return false;
}

// ----------------------------------------------------------------- join ----

JoinConstraint::JoinConstraint(std::string label, ConstraintPtr a, ConstraintPtr b)
    : GlobalConstraint(ConstraintKind::join, std::move(label), {}, {}),
      a_(std::move(a)), b_(std::move(b)) {
    scope_ = union_of(a_->scope(), b_->scope());
    domains_.reserve(scope_.size());
    for (const auto& v : scope_) {
        bool in_a = contains_var(a_->scope(), v);
        bool in_b = contains_var(b_->scope(), v);
        if (in_a && in_b && a_->domain_of(v) != b_->domain_of(v))
            throw DomainError("join operands disagree on the domain of '" +
                              std::string(v.name()) + "'");
        domains_.push_back(in_a ? a_->domain_of(v) : b_->domain_of(v));
    }
}

std::size_t JoinConstraint::description_size() const {
    return scope_.size() + a_->description_size() + b_->description_size();
}

bool JoinConstraint::evaluate(const Assignment& theta) const {
    check_full(theta);
    return a_->evaluate(theta.restrict_to(a_->scope())) &&
           b_->evaluate(theta.restrict_to(b_->scope()));
}

bool JoinConstraint::pac_extends(const Assignment&) const {
    throw CapabilityError("constraint '" + label_ + "': join wrappers do not offer PAC");
}

// -------------------------------------------------------- free functions ----

bool evaluate(const ConstraintPtr& c, const Assignment& theta) {
    return c->evaluate(theta);
}

bool pac_extends(const ConstraintPtr& c, const Assignment& theta) {
    if (!c->has_pac())
        throw CapabilityError("constraint '" + c->label() + "' does not advertise PAC");
    return c->pac_extends(theta);
}

ConstraintPtr join(const ConstraintPtr& c1, const ConstraintPtr& c2) {
    std::string label = "(" + c1->label() + "*" + c2->label() + ")";
    const auto* t1 = dynamic_cast<const TableConstraint*>(c1.get());
    const auto* t2 = dynamic_cast<const TableConstraint*>(c2.get());
    if (!t1 || !t2)
        return std::make_shared<JoinConstraint>(std::move(label), c1, c2);

    VarList scope = union_of(c1->scope(), c2->scope());
    VarList shared = intersection_of(c1->scope(), c2->scope());
    std::vector<std::vector<Value>> domains;
    domains.reserve(scope.size());
    for (const auto& v : scope) {
        bool in1 = contains_var(c1->scope(), v);
        if (in1 && contains_var(c2->scope(), v) && c1->domain_of(v) != c2->domain_of(v))
            throw DomainError("join operands disagree on the domain of '" +
                              std::string(v.name()) + "'");
        domains.push_back(in1 ? c1->domain_of(v) : c2->domain_of(v));
    }

    std::vector<std::size_t> shared1, shared2;
    for (const auto& v : shared) {
        shared1.push_back(t1->scope_position(v));
        shared2.push_back(t2->scope_position(v));
    }
    std::vector<int> take_from_1(scope.size(), -1), take_from_2(scope.size(), -1);
    for (std::size_t i = 0; i < scope.size(); ++i) {
        if (contains_var(c1->scope(), scope[i]))
            take_from_1[i] = static_cast<int>(t1->scope_position(scope[i]));
        else
            take_from_2[i] = static_cast<int>(t2->scope_position(scope[i]));
    }

    std::unordered_map<std::string, std::vector<std::size_t>> index;
    auto key_of = [](const std::vector<Value>& row, const std::vector<std::size_t>& at) {
        std::string key;
        for (std::size_t p : at) {
            key += std::to_string(row[p].id());
            key += ',';
        }
        return key;
    };
    for (std::size_t j = 0; j < t2->rows().size(); ++j)
        index[key_of(t2->rows()[j], shared2)].push_back(j);

    std::vector<std::vector<Value>> rows;
    const std::uint64_t budget = enumeration_budget();
    for (const auto& r1 : t1->rows()) {
        auto it = index.find(key_of(r1, shared1));
        if (it == index.end())
            continue;
        for (std::size_t j : it->second) {
            const auto& r2 = t2->rows()[j];
            std::vector<Value> merged(scope.size());
            for (std::size_t i = 0; i < scope.size(); ++i)
                merged[i] = take_from_1[i] >= 0 ? r1[take_from_1[i]] : r2[take_from_2[i]];
            rows.push_back(std::move(merged));
            if (rows.size() > budget)
                throw BudgetError("join result exceeds the enumeration budget");
        }
    }
    std::vector<VariableId> scope_copy = scope;
    return std::make_shared<TableConstraint>(std::move(label), std::move(scope_copy),
                                             std::move(domains), std::move(rows));
}

ConstraintPtr project_constraint(const ConstraintPtr& c, const VarList& X) {
    VarList x = sorted_vars(X);
    if (x.empty())
        throw ScopeError("projection onto the empty set is rejected");
    if (!subset_of(x, c->scope()))
        throw ScopeError("projection target is not a subset of the scope of '" +
                         c->label() + "'");
    if (!c->has_pac())
        throw CapabilityError("constraint '" + c->label() + "': projection requires PAC");
    if (x == c->scope())
        return c;
    ConstraintPtr original = c;
    if (const auto* pj = dynamic_cast<const ProjectedConstraint*>(c.get()))
        original = pj->original();
    return std::make_shared<ProjectedConstraint>("pj(" + original->label() + ")",
                                                 original, std::move(x));
}

ConstraintPtr augment_with_backdoor(const ConstraintPtr& c, const BackDoorSpec& bd,
                                    const AssignmentSet& Theta) {
    return std::make_shared<AugmentedConstraint>(c->label() + "+bd", c, bd, Theta);
}

} // namespace gcsp
