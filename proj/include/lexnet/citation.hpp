#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lexnet/model.hpp"

namespace lexnet::io {

/// (legislative rank, label token) pairs, statute first, ranks strictly
/// increasing. "§ 433 Abs. 1 S. 2 BGB" becomes
/// [(1,"BGB"), (2,"433"), (3,"1"), (4,"2")].
using CitationPath = std::vector<std::pair<int, std::string>>;

class CitationError : public std::runtime_error {
public:
    CitationError(std::string message, std::size_t position)
        : std::runtime_error("position " + std::to_string(position) + ": " + message),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Canonical form: "§ <sec>[ Abs. <sub>][ S. <sub2>][ Nr. <sub3>] <statute>".
/// Total over that grammar; anything else throws CitationError with the
/// offending character position.
CitationPath parse_citation(const std::string& text);

struct Resolution {
    std::optional<NodeIndex> node;  // empty: statute unknown
    bool truncated = false;         // deeper tokens had no match
};

/// Deepest legislative node whose label path matches a prefix of the
/// citation. Statute labels match rank-1 nodes; each further token must match
/// a child at exactly the token's rank.
Resolution resolve_citation(const CitationPath& path, const BaseNetwork& base);

}  // namespace lexnet::io
