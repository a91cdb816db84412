#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lexnet {

enum class Branch : std::uint8_t { judicial = 0, legislative = 1 };

inline constexpr int kJudicialDepth = 4;     // court > panel > decision > paragraph
inline constexpr int kLegislativeDepth = 5;  // statute > section > sub > sub2 > sub3

inline int branch_depth(Branch b) {
    return b == Branch::judicial ? kJudicialDepth : kLegislativeDepth;
}

const char* branch_name(Branch b);
std::optional<Branch> branch_from_name(const std::string& name);

/// Rank names, 1-based within each branch. Returns nullptr for out-of-range.
const char* rank_name(Branch b, int rank);
/// 0 when the name is unknown for that branch.
int rank_from_name(Branch b, const std::string& name);

struct LevelTag {
    Branch branch;
    int rank;  // 1-based ordinal depth within the branch
    friend bool operator==(const LevelTag&, const LevelTag&) = default;
};

using NodeIndex = std::uint32_t;
inline constexpr NodeIndex kNoNode = 0xFFFFFFFFu;

struct Node {
    std::string id;
    Branch branch{};
    int rank = 0;
    NodeIndex parent = kNoNode;
    std::string label;
    std::map<std::string, std::string> attributes;
    std::vector<NodeIndex> children;  // sorted by child id
};

struct RefEdge {
    NodeIndex source = kNoNode;  // judicial, a paragraph in valid corpora
    NodeIndex target = kNoNode;  // legislative
    std::int64_t multiplicity = 1;
};

/// Hierarchy edge kinds are a function of the endpoint levels, never stored.
const char* hierarchy_edge_kind(Branch branch, int parent_rank, int child_rank);

struct Violation {
    std::string subject;  // node or edge identity
    std::string message;
};

class BaseNetwork;

/// Staging area for corpus construction. Representability is looser than
/// validity: wrong-rank parents or non-paragraph reference sources build fine
/// and surface through validate(). Duplicate ids, unknown parents, and unknown
/// edge endpoints are not representable and throw here.
class CorpusBuilder {
public:
    NodeIndex add_node(std::string id, Branch branch, int rank,
                       const std::string& parent_id = "",
                       std::string label = "",
                       std::map<std::string, std::string> attributes = {});
    /// Identical (source, target) pairs collapse by summing multiplicity.
    void add_ref(const std::string& source_id, const std::string& target_id,
                 std::int64_t multiplicity = 1);

    BaseNetwork build() &&;

private:
    std::vector<Node> nodes_;
    std::map<std::string, NodeIndex> by_id_;
    std::map<std::pair<NodeIndex, NodeIndex>, std::int64_t> refs_;
};

/// Immutable once built; all accessors are pure reads and thread-safe.
class BaseNetwork {
public:
    std::size_t node_count() const { return nodes_.size(); }
    const Node& node(NodeIndex i) const { return nodes_[i]; }
    const std::vector<Node>& nodes() const { return nodes_; }

    std::optional<NodeIndex> find(const std::string& id) const;
    /// Throws std::out_of_range with the id in the message.
    NodeIndex require(const std::string& id) const;

    const std::vector<RefEdge>& refs() const { return refs_; }
    std::int64_t total_multiplicity() const { return total_multiplicity_; }

    /// All nodes at the given level, ordered by id.
    std::vector<NodeIndex> level_nodes(LevelTag level) const;
    std::size_t level_count(LevelTag level) const;

    /// Root plus every descendant, in preorder.
    std::vector<NodeIndex> subtree(NodeIndex root) const;

    /// Deepest ancestor-or-self of n whose rank is <= rank; falls back to the
    /// root of n's tree when even the root is deeper than rank. This is the
    /// carrier of n's mass in a rank-`rank` table and keeps aggregation
    /// conservative in the presence of rank gaps.
    NodeIndex mapped_at(NodeIndex n, int rank) const;

    /// Deepest legislative rank present; 0 for a corpus without legislative
    /// nodes. Broadcast targets this frontier.
    int frontier_rank() const { return frontier_rank_; }

    std::vector<Violation> validate() const;

private:
    friend class CorpusBuilder;
    std::vector<Node> nodes_;
    std::map<std::string, NodeIndex> by_id_;  // ordered: iteration is id-sorted
    std::vector<RefEdge> refs_;
    std::int64_t total_multiplicity_ = 0;
    int frontier_rank_ = 0;
};

/// Comparator for id-ordered node index sequences.
struct IdLess {
    const BaseNetwork& base;
    bool operator()(NodeIndex a, NodeIndex b) const {
        return base.node(a).id < base.node(b).id;
    }
};

}  // namespace lexnet
