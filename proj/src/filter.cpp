#include "lexnet/filter.hpp"

#include <stdexcept>

namespace lexnet {

namespace {

using nlohmann::json;

struct PassAll final : NodeFilter {
    bool matches(const BaseNetwork&, NodeIndex) const override { return true; }
    json to_json() const override { return json{{"op", "all"}}; }
};

struct AttrEq final : NodeFilter {
    std::string key, value;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        const auto& attrs = base.node(n).attributes;
        auto it = attrs.find(key);
        return it != attrs.end() && it->second == value;
    }
    json to_json() const override {
        return json{{"op", "attr_eq"}, {"key", key}, {"value", value}};
    }
};

struct AncestorIn final : NodeFilter {
    std::set<std::string> ids;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        for (NodeIndex cur = n; cur != kNoNode; cur = base.node(cur).parent) {
            if (ids.count(base.node(cur).id)) return true;
        }
        return false;
    }
    json to_json() const override {
        return json{{"op", "ancestor_in"}, {"ids", std::vector<std::string>(ids.begin(), ids.end())}};
    }
};

struct RankEq final : NodeFilter {
    int rank;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        return base.node(n).rank == rank;
    }
    json to_json() const override { return json{{"op", "rank_eq"}, {"rank", rank}}; }
};

struct And final : NodeFilter {
    std::vector<FilterPtr> args;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        for (const auto& a : args)
            if (!a->matches(base, n)) return false;
        return true;
    }
    json to_json() const override {
        json out{{"op", "and"}};
        out["args"] = json::array();
        for (const auto& a : args) out["args"].push_back(a->to_json());
        return out;
    }
};

struct Or final : NodeFilter {
    std::vector<FilterPtr> args;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        for (const auto& a : args)
            if (a->matches(base, n)) return true;
        return false;
    }
    json to_json() const override {
        json out{{"op", "or"}};
        out["args"] = json::array();
        for (const auto& a : args) out["args"].push_back(a->to_json());
        return out;
    }
};

struct Not final : NodeFilter {
    FilterPtr arg;
    bool matches(const BaseNetwork& base, NodeIndex n) const override {
        return !arg->matches(base, n);
    }
    json to_json() const override { return json{{"op", "not"}, {"arg", arg->to_json()}}; }
};

std::vector<FilterPtr> parse_args(const json& spec) {
    auto it = spec.find("args");
    if (it == spec.end() || !it->is_array() || it->empty())
        throw std::invalid_argument("filter: 'args' must be a nonempty array");
    std::vector<FilterPtr> out;
    for (const auto& a : *it) out.push_back(parse_filter(a));
    return out;
}

}  // namespace

FilterPtr pass_all_filter() {
    static const FilterPtr instance = std::make_shared<PassAll>();
    return instance;
}

FilterPtr make_attr_eq(std::string key, std::string value) {
    auto f = std::make_shared<AttrEq>();
    f->key = std::move(key);
    f->value = std::move(value);
    return f;
}

FilterPtr make_ancestor_in(std::set<std::string> ids) {
    auto f = std::make_shared<AncestorIn>();
    f->ids = std::move(ids);
    return f;
}

FilterPtr make_rank_eq(int rank) {
    auto f = std::make_shared<RankEq>();
    f->rank = rank;
    return f;
}

FilterPtr make_and(std::vector<FilterPtr> args) {
    auto f = std::make_shared<And>();
    f->args = std::move(args);
    return f;
}

FilterPtr make_or(std::vector<FilterPtr> args) {
    auto f = std::make_shared<Or>();
    f->args = std::move(args);
    return f;
}

FilterPtr make_not(FilterPtr arg) {
    auto f = std::make_shared<Not>();
    f->arg = std::move(arg);
    return f;
}

FilterPtr parse_filter(const nlohmann::json& spec) {
    if (spec.is_null()) return pass_all_filter();
    if (!spec.is_object()) throw std::invalid_argument("filter: spec must be an object or null");
    auto op_it = spec.find("op");
    if (op_it == spec.end() || !op_it->is_string())
        throw std::invalid_argument("filter: missing 'op'");
    const std::string op = op_it->get<std::string>();
    if (op == "all") return pass_all_filter();
    if (op == "attr_eq") {
        if (!spec.contains("key") || !spec["key"].is_string() || !spec.contains("value") ||
            !spec["value"].is_string())
            throw std::invalid_argument("filter: attr_eq needs string 'key' and 'value'");
        return make_attr_eq(spec["key"].get<std::string>(), spec["value"].get<std::string>());
    }
    if (op == "ancestor_in") {
        if (!spec.contains("ids") || !spec["ids"].is_array())
            throw std::invalid_argument("filter: ancestor_in needs an 'ids' array");
        std::set<std::string> ids;
        for (const auto& v : spec["ids"]) {
            if (!v.is_string()) throw std::invalid_argument("filter: ancestor_in ids must be strings");
            ids.insert(v.get<std::string>());
        }
        return make_ancestor_in(std::move(ids));
    }
    if (op == "rank_eq") {
        if (!spec.contains("rank") || !spec["rank"].is_number_integer())
            throw std::invalid_argument("filter: rank_eq needs integer 'rank'");
        return make_rank_eq(spec["rank"].get<int>());
    }
    if (op == "and") return make_and(parse_args(spec));
    if (op == "or") return make_or(parse_args(spec));
    if (op == "not") {
        if (!spec.contains("arg")) throw std::invalid_argument("filter: not needs 'arg'");
        return make_not(parse_filter(spec["arg"]));
    }
    throw std::invalid_argument("filter: unknown op '" + op + "'");
}

}  // namespace lexnet
