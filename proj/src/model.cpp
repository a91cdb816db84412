#include "lexnet/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexnet {

namespace {

const char* kJudicialRanks[] = {"court", "panel", "decision", "paragraph"};
const char* kLegislativeRanks[] = {"statute", "section", "sub", "sub2", "sub3"};

}  // namespace

const char* branch_name(Branch b) {
    return b == Branch::judicial ? "judicial" : "legislative";
}

std::optional<Branch> branch_from_name(const std::string& name) {
    if (name == "judicial") return Branch::judicial;
    if (name == "legislative") return Branch::legislative;
    return std::nullopt;
}

const char* rank_name(Branch b, int rank) {
    if (rank < 1 || rank > branch_depth(b)) return nullptr;
    return b == Branch::judicial ? kJudicialRanks[rank - 1] : kLegislativeRanks[rank - 1];
}

int rank_from_name(Branch b, const std::string& name) {
    for (int r = 1; r <= branch_depth(b); ++r) {
        if (name == rank_name(b, r)) return r;
    }
    return 0;
}

const char* hierarchy_edge_kind(Branch branch, int parent_rank, int child_rank) {
    if (branch == Branch::judicial) {
        if (parent_rank == 1 && child_rank == 2) return "organizational";
        if (parent_rank == 2 && child_rank == 3) return "authorship";
    }
    return "containment";
}

NodeIndex CorpusBuilder::add_node(std::string id, Branch branch, int rank,
                                  const std::string& parent_id, std::string label,
                                  std::map<std::string, std::string> attributes) {
    if (by_id_.count(id)) throw std::invalid_argument("duplicate node id '" + id + "'");
    NodeIndex parent = kNoNode;
    if (!parent_id.empty()) {
        auto it = by_id_.find(parent_id);
        if (it == by_id_.end())
            throw std::invalid_argument("unknown parent '" + parent_id + "' for node '" + id + "'");
        parent = it->second;
    }
    NodeIndex idx = static_cast<NodeIndex>(nodes_.size());
    if (idx >= 0x7FFFFFFFu) throw std::length_error("corpus too large");
    Node n;
    n.id = std::move(id);
    n.branch = branch;
    n.rank = rank;
    n.parent = parent;
    n.label = std::move(label);
    n.attributes = std::move(attributes);
    by_id_.emplace(n.id, idx);
    nodes_.push_back(std::move(n));
    return idx;
}

void CorpusBuilder::add_ref(const std::string& source_id, const std::string& target_id,
                            std::int64_t multiplicity) {
    auto s = by_id_.find(source_id);
    if (s == by_id_.end()) throw std::invalid_argument("unknown reference source '" + source_id + "'");
    auto t = by_id_.find(target_id);
    if (t == by_id_.end()) throw std::invalid_argument("unknown reference target '" + target_id + "'");
    refs_[{s->second, t->second}] += multiplicity;
}

BaseNetwork CorpusBuilder::build() && {
    BaseNetwork net;
    net.nodes_ = std::move(nodes_);
    net.by_id_ = std::move(by_id_);
    for (NodeIndex i = 0; i < net.nodes_.size(); ++i) {
        NodeIndex p = net.nodes_[i].parent;
        if (p != kNoNode) net.nodes_[p].children.push_back(i);
    }
    for (auto& n : net.nodes_) {
        std::sort(n.children.begin(), n.children.end(), IdLess{net});
        if (n.branch == Branch::legislative && n.rank > net.frontier_rank_)
            net.frontier_rank_ = n.rank;
    }
    net.refs_.reserve(refs_.size());
    for (const auto& [key, mult] : refs_) {
        net.refs_.push_back({key.first, key.second, mult});
        net.total_multiplicity_ += mult;
    }
    // (source id, target id) ordering for deterministic iteration
    std::sort(net.refs_.begin(), net.refs_.end(), [&](const RefEdge& a, const RefEdge& b) {
        const auto& sa = net.nodes_[a.source].id;
        const auto& sb = net.nodes_[b.source].id;
        if (sa != sb) return sa < sb;
        return net.nodes_[a.target].id < net.nodes_[b.target].id;
    });
    return net;
}

std::optional<NodeIndex> BaseNetwork::find(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

NodeIndex BaseNetwork::require(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw std::out_of_range("node not found: '" + id + "'");
    return it->second;
}

std::vector<NodeIndex> BaseNetwork::level_nodes(LevelTag level) const {
    std::vector<NodeIndex> out;
    for (const auto& [id, idx] : by_id_) {
        const Node& n = nodes_[idx];
        if (n.branch == level.branch && n.rank == level.rank) out.push_back(idx);
    }
    return out;  // by_id_ iteration is id-sorted
}

std::size_t BaseNetwork::level_count(LevelTag level) const {
    std::size_t c = 0;
    for (const auto& n : nodes_)
        if (n.branch == level.branch && n.rank == level.rank) ++c;
    return c;
}

std::vector<NodeIndex> BaseNetwork::subtree(NodeIndex root) const {
    std::vector<NodeIndex> out;
    std::vector<NodeIndex> stack{root};
    while (!stack.empty()) {
        NodeIndex i = stack.back();
        stack.pop_back();
        out.push_back(i);
        const auto& ch = nodes_[i].children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

NodeIndex BaseNetwork::mapped_at(NodeIndex n, int rank) const {
    NodeIndex cur = n;
    NodeIndex root = n;
    while (cur != kNoNode) {
        if (nodes_[cur].rank <= rank) return cur;
        root = cur;
        cur = nodes_[cur].parent;
    }
    return root;
}

std::vector<Violation> BaseNetwork::validate() const {
    std::vector<Violation> out;
    for (NodeIndex i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.rank < 1 || n.rank > branch_depth(n.branch)) {
            out.push_back({n.id, "rank " + std::to_string(n.rank) + " out of range for " +
                                     branch_name(n.branch) + " branch"});
            continue;
        }
        if (n.id.size() >= 6 && n.id.compare(n.id.size() - 6, 6, "~proxy") == 0)
            out.push_back({n.id, "id uses the reserved proxy suffix"});
        if (n.parent == kNoNode) {
            if (n.rank != 1)
                out.push_back({n.id, std::string("root must be a ") + rank_name(n.branch, 1) +
                                         ", found rank " + std::to_string(n.rank)});
            continue;
        }
        const Node& p = nodes_[n.parent];
        if (p.branch != n.branch) {
            out.push_back({n.id, "parent '" + p.id + "' belongs to the other branch"});
            continue;
        }
        if (p.rank >= n.rank)
            out.push_back({n.id, "parent '" + p.id + "' does not coarsen rank (" +
                                     std::to_string(p.rank) + " >= " + std::to_string(n.rank) + ")"});
        else if (n.branch == Branch::judicial && p.rank != n.rank - 1)
            out.push_back({n.id, "judicial chain skips rank " + std::to_string(n.rank - 1)});
    }
    for (const RefEdge& e : refs_) {
        const Node& s = nodes_[e.source];
        const Node& t = nodes_[e.target];
        std::string subject = s.id + "->" + t.id;
        if (s.branch != Branch::judicial || s.rank != kJudicialDepth)
            out.push_back({subject, "source not a paragraph"});
        if (t.branch != Branch::legislative)
            out.push_back({subject, "target not legislative"});
        if (e.multiplicity < 1)
            out.push_back({subject, "multiplicity " + std::to_string(e.multiplicity) + " < 1"});
    }
    return out;
}

}  // namespace lexnet
