#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcsp {

namespace detail {

/// Process-wide interning pool. Tokens are immutable once interned; ids are
/// dense and stable for the lifetime of the process.
class SymbolPool {
public:
    std::uint32_t intern(std::string_view text);
    std::string_view text(std::uint32_t id) const;

    static SymbolPool& values();    // token 0 is reserved for "*"
    static SymbolPool& variables();

private:
    explicit SymbolPool(bool reserve_star);
    struct Impl;
    Impl* impl_;
};

} // namespace detail

/// An opaque domain value: an interned token. The token "*" (STAR) is
/// reserved for the reduction machinery and never appears in user domains.
class Value {
public:
    Value() : id_(0) {} // STAR
    static Value of(std::string_view text);
    static Value star() { return Value(); }

    bool is_star() const { return id_ == 0; }
    std::string_view text() const;
    std::uint32_t id() const { return id_; }

    friend bool operator==(Value a, Value b) { return a.id_ == b.id_; }
    friend bool operator!=(Value a, Value b) { return a.id_ != b.id_; }
    /// Lexicographic order on the token text (user-facing determinism).
    friend bool operator<(Value a, Value b);

private:
    std::uint32_t id_;
};

/// A variable name: an interned token ordered lexicographically by name.
class VariableId {
public:
    VariableId() : id_(UINT32_MAX) {}
    static VariableId of(std::string_view name);

    std::string_view name() const;
    std::uint32_t id() const { return id_; }
    bool valid() const { return id_ != UINT32_MAX; }

    friend bool operator==(VariableId a, VariableId b) { return a.id_ == b.id_; }
    friend bool operator!=(VariableId a, VariableId b) { return a.id_ != b.id_; }
    friend bool operator<(VariableId a, VariableId b);

private:
    std::uint32_t id_;
};

/// Sorted, duplicate-free variable list; the canonical scope representation.
using VarList = std::vector<VariableId>;

VarList sorted_vars(VarList vars);                       // sort + dedup
bool contains_var(const VarList& vars, VariableId v);    // binary search
bool subset_of(const VarList& a, const VarList& b);      // a ⊆ b, both sorted
VarList union_of(const VarList& a, const VarList& b);
VarList intersection_of(const VarList& a, const VarList& b);
VarList difference_of(const VarList& a, const VarList& b);

/// Current enumeration / brute-force budget: GLOBALCSP_BUDGET or 10^7.
std::uint64_t enumeration_budget();

} // namespace gcsp
