#include "lexnet/counting.hpp"

#include <algorithm>
#include <map>

namespace lexnet {

std::string leaf_slot_id(const BaseNetwork& base, LeafSlot slot) {
    std::string id = base.node(slot.anchor).id;
    if (slot.proxy) id += "~proxy";
    return id;
}

LeafMassTable::LeafMassTable(std::vector<SlotMass> entries, int frontier, SplitMode mode)
    : entries_(std::move(entries)), frontier_(frontier), mode_(mode) {}

Rational LeafMassTable::total() const {
    Rational t;
    for (const auto& e : entries_) t += e.mass;
    return t;
}

std::vector<LeafSlot> frontier_slots(const BaseNetwork& base, NodeIndex root) {
    std::vector<LeafSlot> out;
    const int frontier = base.frontier_rank();
    std::vector<NodeIndex> stack{root};
    while (!stack.empty()) {
        NodeIndex i = stack.back();
        stack.pop_back();
        const Node& n = base.node(i);
        if (n.children.empty()) {
            out.push_back({i, n.rank < frontier});
        } else {
            for (auto it = n.children.rbegin(); it != n.children.rend(); ++it)
                stack.push_back(*it);
        }
    }
    std::sort(out.begin(), out.end(), [&](LeafSlot a, LeafSlot b) {
        const auto& ia = base.node(a.anchor).id;
        const auto& ib = base.node(b.anchor).id;
        if (ia != ib) return ia < ib;
        return a.proxy < b.proxy;
    });
    return out;
}

namespace {

void spread_per_child(const BaseNetwork& base, NodeIndex target, const Rational& mass,
                      int frontier, std::map<LeafSlot, Rational>& sink) {
    const Node& n = base.node(target);
    if (n.children.empty()) {
        sink[{target, n.rank < frontier}] += mass;
        return;
    }
    Rational share = mass / Rational(static_cast<long>(n.children.size()));
    for (NodeIndex c : n.children) spread_per_child(base, c, share, frontier, sink);
}

}  // namespace

LeafMassTable broadcast_to_leaves(const BaseNetwork& base, SplitMode mode) {
    const int frontier = base.frontier_rank();
    // (source, slot) -> mass; map keys give the deterministic entry order
    std::map<std::pair<NodeIndex, LeafSlot>, Rational> acc;
    for (const RefEdge& e : base.refs()) {
        Rational mass(static_cast<long>(e.multiplicity));
        if (mode == SplitMode::per_child) {
            std::map<LeafSlot, Rational> sink;
            spread_per_child(base, e.target, mass, frontier, sink);
            for (auto& [slot, m] : sink) acc[{e.source, slot}] += m;
        } else {
            auto slots = frontier_slots(base, e.target);
            Rational share = mass / Rational(static_cast<long>(slots.size()));
            for (LeafSlot slot : slots) acc[{e.source, slot}] += share;
        }
    }
    std::vector<SlotMass> entries;
    entries.reserve(acc.size());
    for (auto& [key, m] : acc) entries.push_back({key.first, key.second, std::move(m)});
    return LeafMassTable(std::move(entries), frontier, mode);
}

MassTable aggregate_at_level(const LeafMassTable& table, const BaseNetwork& base,
                             int legislative_rank) {
    std::map<std::pair<NodeIndex, NodeIndex>, Rational> acc;
    for (const SlotMass& e : table.entries()) {
        NodeIndex carrier = base.mapped_at(e.slot.anchor, legislative_rank);
        acc[{e.source, carrier}] += e.mass;
    }
    MassTable out;
    out.reserve(acc.size());
    for (auto& [key, m] : acc) out.push_back({key.first, key.second, std::move(m)});
    return out;
}

MassTable roll_up_source(const MassTable& paragraph_masses, const BaseNetwork& base,
                         int judicial_rank) {
    std::map<std::pair<NodeIndex, NodeIndex>, Rational> acc;
    for (const MassCell& c : paragraph_masses) {
        NodeIndex unit = base.mapped_at(c.unit, judicial_rank);
        acc[{unit, c.target}] += c.mass;
    }
    MassTable out;
    out.reserve(acc.size());
    for (auto& [key, m] : acc) out.push_back({key.first, key.second, std::move(m)});
    return out;
}

Rational table_total(const MassTable& table) {
    Rational t;
    for (const auto& c : table) t += c.mass;
    return t;
}

}  // namespace lexnet
