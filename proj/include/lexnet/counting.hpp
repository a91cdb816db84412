#pragma once

#include <vector>

#include "lexnet/model.hpp"
#include "lexnet/rational.hpp"

namespace lexnet {

/// How a reference targeting an inner node spreads over the leaf frontier.
/// per_child: recursive even split among immediate children.
/// per_leaf: uniform over all frontier slots of the target's subtree.
/// The two coincide whenever sibling subtrees carry equal slot counts.
enum class SplitMode { per_child, per_leaf };

/// A position on the global leaf frontier. Real frontier-rank leaves carry
/// proxy=false; a childless node above the frontier owns exactly one proxy
/// slot (proxy=true) that stands in for its missing substructure.
struct LeafSlot {
    NodeIndex anchor = kNoNode;
    bool proxy = false;
    friend auto operator<=>(const LeafSlot&, const LeafSlot&) = default;
};

/// External name used only in debug dumps; proxies never surface elsewhere.
std::string leaf_slot_id(const BaseNetwork& base, LeafSlot slot);

struct SlotMass {
    NodeIndex source = kNoNode;  // paragraph
    LeafSlot slot;
    Rational mass;
};

/// Per-(paragraph, frontier slot) reference mass. Entry order is
/// (source index, slot); masses are strictly positive and sum to the corpus
/// total multiplicity.
class LeafMassTable {
public:
    LeafMassTable() = default;
    LeafMassTable(std::vector<SlotMass> entries, int frontier, SplitMode mode);

    const std::vector<SlotMass>& entries() const { return entries_; }
    int frontier_rank() const { return frontier_; }
    SplitMode split_mode() const { return mode_; }
    Rational total() const;

private:
    std::vector<SlotMass> entries_;
    int frontier_ = 0;
    SplitMode mode_ = SplitMode::per_child;
};

/// Frontier slots of a subtree, in (anchor id, proxy) order: the positions a
/// reference to `root` can reach.
std::vector<LeafSlot> frontier_slots(const BaseNetwork& base, NodeIndex root);

LeafMassTable broadcast_to_leaves(const BaseNetwork& base,
                                  SplitMode mode = SplitMode::per_child);

/// One cell of an aggregated mass table. `unit` is a paragraph after
/// aggregate_at_level, or a judicial unit after roll_up_source. `target` is
/// the deepest real ancestor-or-self of the mass carrier at the requested
/// rank, so tables stay conservative when substructure terminates early.
struct MassCell {
    NodeIndex unit = kNoNode;
    NodeIndex target = kNoNode;
    Rational mass;
};

/// Index-keyed (unit, target) -> mass, strictly positive cells only, ordered
/// by (unit, target) index.
using MassTable = std::vector<MassCell>;

MassTable aggregate_at_level(const LeafMassTable& table, const BaseNetwork& base,
                             int legislative_rank);

MassTable roll_up_source(const MassTable& paragraph_masses, const BaseNetwork& base,
                         int judicial_rank);

Rational table_total(const MassTable& table);

}  // namespace lexnet
