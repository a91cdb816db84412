#include "lexnet/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lexnet::io {

using nlohmann::json;

namespace {

std::string want_string(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw CorpusError(std::string("missing or non-string '") + key + "'", line);
    return it->get<std::string>();
}

BaseNetwork parse_stream(std::istream& in, bool validate) {
    CorpusBuilder builder;
    std::string raw;
    std::size_t line = 0;
    bool edges_started = false;
    while (std::getline(in, raw)) {
        ++line;
        if (raw.empty()) continue;
        json j = json::parse(raw, nullptr, false);
        if (j.is_discarded()) throw CorpusError("malformed JSON", line);
        if (!j.is_object()) throw CorpusError("record is not an object", line);
        std::string kind = want_string(j, "kind", line);
        try {
            if (kind == "node") {
                if (edges_started) throw CorpusError("node record after edge records", line);
                auto branch = branch_from_name(want_string(j, "branch", line));
                if (!branch) throw CorpusError("unknown branch", line);
                auto rank_it = j.find("rank");
                if (rank_it == j.end() || !rank_it->is_number_integer())
                    throw CorpusError("missing or non-integer 'rank'", line);
                std::string parent;
                auto parent_it = j.find("parent");
                if (parent_it != j.end() && !parent_it->is_null()) {
                    if (!parent_it->is_string())
                        throw CorpusError("non-string 'parent'", line);
                    parent = parent_it->get<std::string>();
                }
                std::string label;
                auto label_it = j.find("label");
                if (label_it != j.end() && label_it->is_string())
                    label = label_it->get<std::string>();
                std::map<std::string, std::string> attrs;
                auto attr_it = j.find("attributes");
                if (attr_it != j.end() && attr_it->is_object()) {
                    for (auto& [k, v] : attr_it->items()) {
                        if (!v.is_string())
                            throw CorpusError("attribute '" + k + "' is not a string", line);
                        attrs[k] = v.get<std::string>();
                    }
                }
                builder.add_node(want_string(j, "id", line), *branch,
                                 rank_it->get<int>(), parent, label, std::move(attrs));
            } else if (kind == "edge") {
                edges_started = true;
                std::int64_t mult = 1;
                auto mult_it = j.find("multiplicity");
                if (mult_it != j.end()) {
                    if (!mult_it->is_number_integer())
                        throw CorpusError("non-integer 'multiplicity'", line);
                    mult = mult_it->get<std::int64_t>();
                }
                builder.add_ref(want_string(j, "source", line),
                                want_string(j, "target", line), mult);
            } else {
                throw CorpusError("unknown record kind '" + kind + "'", line);
            }
        } catch (const std::invalid_argument& e) {
            throw CorpusError(e.what(), line);
        }
    }
    BaseNetwork net = std::move(builder).build();
    if (validate) {
        auto violations = net.validate();
        if (!violations.empty())
            throw CorpusError(violations.front().subject + ": " + violations.front().message, 0);
    }
    return net;
}

json node_record(const Node& n, const BaseNetwork& base) {
    json j;
    j["kind"] = "node";
    j["id"] = n.id;
    j["branch"] = branch_name(n.branch);
    j["rank"] = n.rank;
    if (n.parent == kNoNode)
        j["parent"] = nullptr;
    else
        j["parent"] = base.node(n.parent).id;
    j["label"] = n.label;
    j["attributes"] = json::object();
    for (const auto& [k, v] : n.attributes) j["attributes"][k] = v;
    return j;
}

}  // namespace

BaseNetwork load_corpus(const std::string& path, bool validate) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file '" + path + "'");
    return parse_stream(in, validate);
}

BaseNetwork read_corpus(std::istream& in, bool validate) {
    return parse_stream(in, validate);
}

void save_corpus(const BaseNetwork& base, std::ostream& out) {
    for (Branch b : {Branch::judicial, Branch::legislative}) {
        for (int rank = 1; rank <= branch_depth(b); ++rank) {
            for (NodeIndex i : base.level_nodes({b, rank}))
                out << node_record(base.node(i), base).dump() << "\n";
        }
    }
    for (const RefEdge& e : base.refs()) {
        json j;
        j["kind"] = "edge";
        j["source"] = base.node(e.source).id;
        j["target"] = base.node(e.target).id;
        j["multiplicity"] = e.multiplicity;
        out << j.dump() << "\n";
    }
}

std::string corpus_to_string(const BaseNetwork& base) {
    std::ostringstream out;
    save_corpus(base, out);
    return out.str();
}

}  // namespace lexnet::io
