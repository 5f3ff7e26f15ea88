#include "globalcsp/symbols.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace gcsp {
namespace detail {

struct SymbolPool::Impl {
    mutable std::shared_mutex mu;
    std::deque<std::string> texts; // stable references
    std::unordered_map<std::string_view, std::uint32_t> index;
};

SymbolPool::SymbolPool(bool reserve_star) : impl_(new Impl) {
    if (reserve_star)
        intern("*");
}

std::uint32_t SymbolPool::intern(std::string_view text) {
    {
        std::shared_lock lock(impl_->mu);
        auto it = impl_->index.find(text);
        if (it != impl_->index.end())
            return it->second;
    }
    std::unique_lock lock(impl_->mu);
    auto it = impl_->index.find(text);
    if (it != impl_->index.end())
        return it->second;
    auto id = static_cast<std::uint32_t>(impl_->texts.size());
    impl_->texts.emplace_back(text);
    impl_->index.emplace(impl_->texts.back(), id);
    return id;
}

std::string_view SymbolPool::text(std::uint32_t id) const {
    std::shared_lock lock(impl_->mu);
    return impl_->texts[id];
}

SymbolPool& SymbolPool::values() {
    static SymbolPool pool(true);
    return pool;
}

SymbolPool& SymbolPool::variables() {
    static SymbolPool pool(false);
    return pool;
}

} // namespace detail

Value Value::of(std::string_view text) {
    Value v;
    v.id_ = detail::SymbolPool::values().intern(text);
    return v;
}

std::string_view Value::text() const {
    return detail::SymbolPool::values().text(id_);
}

bool operator<(Value a, Value b) {
    if (a.id_ == b.id_)
        return false;
    return a.text() < b.text();
}

VariableId VariableId::of(std::string_view name) {
    VariableId v;
    v.id_ = detail::SymbolPool::variables().intern(name);
    return v;
}

std::string_view VariableId::name() const {
    return detail::SymbolPool::variables().text(id_);
}

bool operator<(VariableId a, VariableId b) {
    if (a.id_ == b.id_)
        return false;
    return a.name() < b.name();
}

VarList sorted_vars(VarList vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

bool contains_var(const VarList& vars, VariableId v) {
    return std::binary_search(vars.begin(), vars.end(), v);
}

bool subset_of(const VarList& a, const VarList& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

VarList union_of(const VarList& a, const VarList& b) {
    VarList out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarList intersection_of(const VarList& a, const VarList& b) {
    VarList out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarList difference_of(const VarList& a, const VarList& b) {
    VarList out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::uint64_t enumeration_budget() {
    if (const char* env = std::getenv("GLOBALCSP_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && v > 0)
            return v;
    }
    return 10'000'000ULL;
}

} // namespace gcsp
