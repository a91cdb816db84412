#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexnet/model.hpp"

namespace lexnet {

/// Pure node predicate, evaluable in O(depth). Atoms: own-attribute equality,
/// ancestor-or-self id membership, rank equality; closed under and/or/not.
class NodeFilter {
public:
    virtual ~NodeFilter() = default;
    virtual bool matches(const BaseNetwork& base, NodeIndex n) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

using FilterPtr = std::shared_ptr<const NodeFilter>;

/// Shared pass-all instance; parse_filter(null) returns it.
FilterPtr pass_all_filter();

inline bool filter_matches(const FilterPtr& f, const BaseNetwork& base, NodeIndex n) {
    return !f || f->matches(base, n);
}

/// JSON forms:
///   null | {"op":"all"}
///   {"op":"attr_eq","key":K,"value":V}
///   {"op":"ancestor_in","ids":[...]}          (ancestor-or-self)
///   {"op":"rank_eq","rank":N}
///   {"op":"and","args":[...]} {"op":"or","args":[...]} {"op":"not","arg":F}
/// Throws std::invalid_argument on anything else.
FilterPtr parse_filter(const nlohmann::json& spec);

FilterPtr make_attr_eq(std::string key, std::string value);
FilterPtr make_ancestor_in(std::set<std::string> ids);
FilterPtr make_rank_eq(int rank);
FilterPtr make_and(std::vector<FilterPtr> args);
FilterPtr make_or(std::vector<FilterPtr> args);
FilterPtr make_not(FilterPtr arg);

}  // namespace lexnet
