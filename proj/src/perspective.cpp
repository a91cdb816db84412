#include "lexnet/perspective.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexnet {

NetworkSpace::NetworkSpace(const BaseNetwork& base, SplitMode mode)
    : base_(base), mode_(mode) {}

const LeafMassTable& NetworkSpace::leaf_table() {
    std::lock_guard lock(mu_);
    if (!leaf_) leaf_ = broadcast_to_leaves(base_, mode_);
    return *leaf_;
}

std::shared_ptr<const MassTable> NetworkSpace::paragraph_masses(int legislative_rank) {
    {
        std::lock_guard lock(mu_);
        auto it = para_.find(legislative_rank);
        if (it != para_.end()) return it->second;
    }
    const LeafMassTable& leaf = leaf_table();
    auto built = std::make_shared<MassTable>(aggregate_at_level(leaf, base_, legislative_rank));
    std::lock_guard lock(mu_);
    auto [it, inserted] = para_.emplace(legislative_rank, std::move(built));
    return it->second;
}

std::shared_ptr<const MassTable> NetworkSpace::rolled(int judicial_rank, int legislative_rank) {
    std::pair<int, int> key{judicial_rank, legislative_rank};
    {
        std::lock_guard lock(mu_);
        auto it = rolled_.find(key);
        if (it != rolled_.end()) return it->second;
    }
    auto para = paragraph_masses(legislative_rank);
    std::shared_ptr<const MassTable> built;
    if (judicial_rank == kJudicialDepth)
        built = para;
    else
        built = std::make_shared<MassTable>(roll_up_source(*para, base_, judicial_rank));
    std::lock_guard lock(mu_);
    auto [it, inserted] = rolled_.emplace(key, std::move(built));
    return it->second;
}

std::shared_ptr<const std::vector<NodeIndex>> NetworkSpace::reach_set(NodeIndex target,
                                                                      int legislative_rank) {
    std::pair<NodeIndex, int> key{target, legislative_rank};
    {
        std::lock_guard lock(mu_);
        auto it = reach_.find(key);
        if (it != reach_.end()) return it->second;
    }
    std::vector<NodeIndex> carriers;
    for (LeafSlot slot : frontier_slots(base_, target))
        carriers.push_back(base_.mapped_at(slot.anchor, legislative_rank));
    std::sort(carriers.begin(), carriers.end(), IdLess{base_});
    carriers.erase(std::unique(carriers.begin(), carriers.end()), carriers.end());
    auto built = std::make_shared<const std::vector<NodeIndex>>(std::move(carriers));
    std::lock_guard lock(mu_);
    auto [it, inserted] = reach_.emplace(key, std::move(built));
    return it->second;
}

namespace {

void check_ranks(const Perspective& p) {
    if (p.judicial_rank < 1 || p.judicial_rank > kJudicialDepth)
        throw std::invalid_argument("judicial rank " + std::to_string(p.judicial_rank) +
                                    " out of range");
    if (p.legislative_rank < 1 || p.legislative_rank > kLegislativeDepth)
        throw std::invalid_argument("legislative rank " + std::to_string(p.legislative_rank) +
                                    " out of range");
}

}  // namespace

MassTable perspective_masses(NetworkSpace& space, const Perspective& p) {
    check_ranks(p);
    auto table = space.rolled(p.judicial_rank, p.legislative_rank);
    const BaseNetwork& base = space.base();
    MassTable out;
    out.reserve(table->size());
    for (const MassCell& c : *table) {
        if (!filter_matches(p.judicial_filter, base, c.unit)) continue;
        if (!filter_matches(p.legislative_filter, base, c.target)) continue;
        out.push_back(c);
    }
    return out;
}

BipartiteNetwork derive(NetworkSpace& space, const Perspective& p) {
    BipartiteNetwork net;
    net.perspective = p;
    net.edges = perspective_masses(space, p);
    const BaseNetwork& base = space.base();
    std::vector<NodeIndex> left, right;
    for (const MassCell& c : net.edges) {
        left.push_back(c.unit);
        right.push_back(c.target);
    }
    auto dedupe = [&](std::vector<NodeIndex>& v) {
        std::sort(v.begin(), v.end(), IdLess{base});
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(left);
    dedupe(right);
    net.left_nodes = std::move(left);
    net.right_nodes = std::move(right);
    return net;
}

std::vector<Perspective> enumerate_grid(const std::vector<FilterPtr>& judicial_filters,
                                        const std::vector<FilterPtr>& legislative_filters) {
    std::vector<FilterPtr> jf = judicial_filters.empty()
                                    ? std::vector<FilterPtr>{nullptr}
                                    : judicial_filters;
    std::vector<FilterPtr> lf = legislative_filters.empty()
                                    ? std::vector<FilterPtr>{nullptr}
                                    : legislative_filters;
    std::vector<Perspective> out;
    out.reserve(kJudicialDepth * kLegislativeDepth * jf.size() * lf.size());
    for (int j = 1; j <= kJudicialDepth; ++j) {
        for (int l = 1; l <= kLegislativeDepth; ++l) {
            for (std::size_t ji = 0; ji < jf.size(); ++ji) {
                for (std::size_t li = 0; li < lf.size(); ++li) {
                    Perspective p;
                    p.judicial_rank = j;
                    p.legislative_rank = l;
                    p.judicial_filter = jf[ji];
                    p.legislative_filter = lf[li];
                    p.judicial_filter_index = static_cast<int>(ji);
                    p.legislative_filter_index = static_cast<int>(li);
                    out.push_back(p);
                }
            }
        }
    }
    return out;
}

}  // namespace lexnet
