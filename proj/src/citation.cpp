#include "lexnet/citation.hpp"

namespace lexnet::io {

namespace {

struct Tokenizer {
    const std::string& text;
    std::size_t pos = 0;

    void skip_spaces() {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    }

    std::optional<std::pair<std::string, std::size_t>> next() {
        skip_spaces();
        if (pos >= text.size()) return std::nullopt;
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ') ++pos;
        return std::make_pair(text.substr(start, pos - start), start);
    }
};

}  // namespace

CitationPath parse_citation(const std::string& text) {
    Tokenizer tok{text};
    auto first = tok.next();
    if (!first || first->first != "\xC2\xA7")
        throw CitationError("missing \xC2\xA7 section token", first ? first->second : text.size());
    auto section = tok.next();
    if (!section) throw CitationError("missing section number", text.size());

    // optional depth markers in fixed order, statute abbreviation last
    const std::pair<const char*, int> markers[] = {{"Abs.", 3}, {"S.", 4}, {"Nr.", 5}};
    std::vector<std::pair<int, std::string>> deeper;
    auto cur = tok.next();
    for (auto [marker, rank] : markers) {
        if (cur && cur->first == marker) {
            auto value = tok.next();
            if (!value)
                throw CitationError(std::string("missing value after ") + marker, text.size());
            deeper.emplace_back(rank, value->first);
            cur = tok.next();
        }
    }
    if (!cur) throw CitationError("missing statute abbreviation", text.size());
    auto trailing = tok.next();
    if (trailing)
        throw CitationError("unexpected token '" + trailing->first + "'", trailing->second);

    CitationPath path;
    path.emplace_back(1, cur->first);
    path.emplace_back(2, section->first);
    for (auto& d : deeper) path.push_back(std::move(d));
    return path;
}

Resolution resolve_citation(const CitationPath& path, const BaseNetwork& base) {
    if (path.empty() || path.front().first != 1) return {std::nullopt, false};
    std::optional<NodeIndex> statute;
    for (NodeIndex i : base.level_nodes({Branch::legislative, 1})) {
        if (base.node(i).label == path.front().second) {
            statute = i;
            break;
        }
    }
    if (!statute) return {std::nullopt, false};

    NodeIndex cur = *statute;
    for (std::size_t k = 1; k < path.size(); ++k) {
        const auto& [rank, token] = path[k];
        NodeIndex next = kNoNode;
        for (NodeIndex c : base.node(cur).children) {
            const Node& child = base.node(c);
            if (child.rank == rank && child.label == token) {
                next = c;
                break;
            }
        }
        if (next == kNoNode) return {cur, true};
        cur = next;
    }
    return {cur, false};
}

}  // namespace lexnet::io
