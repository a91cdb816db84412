#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "lexnet/counting.hpp"
#include "lexnet/filter.hpp"
#include "lexnet/model.hpp"

namespace lexnet {

struct Perspective {
    int judicial_rank = kJudicialDepth;
    int legislative_rank = 2;
    FilterPtr judicial_filter;    // null means pass-all
    FilterPtr legislative_filter;
    // positions in the grid's filter lists; 0 for ad-hoc perspectives
    int judicial_filter_index = 0;
    int legislative_filter_index = 0;
};

struct BipartiteNetwork {
    Perspective perspective;
    std::vector<MassCell> edges;           // (unit=left judicial, target=right legislative)
    std::vector<NodeIndex> left_nodes;     // distinct edge endpoints, id-sorted
    std::vector<NodeIndex> right_nodes;
    Rational total_weight() const { return table_total(edges); }
};

/// Shared computation cache over one immutable corpus: the leaf table is
/// built once, per-legislative-rank paragraph aggregations and per-(judicial,
/// legislative) roll-ups are memoized. Safe for concurrent use.
class NetworkSpace {
public:
    explicit NetworkSpace(const BaseNetwork& base, SplitMode mode = SplitMode::per_child);

    const BaseNetwork& base() const { return base_; }
    SplitMode split_mode() const { return mode_; }

    const LeafMassTable& leaf_table();
    /// Unfiltered paragraph-level masses at a legislative rank.
    std::shared_ptr<const MassTable> paragraph_masses(int legislative_rank);
    /// Unfiltered roll-up at (judicial rank, legislative rank).
    std::shared_ptr<const MassTable> rolled(int judicial_rank, int legislative_rank);

    /// Distinct rank-`legislative_rank` carriers a reference to `target` can
    /// reach, id-sorted. Singleton when the target sits at or below the rank.
    std::shared_ptr<const std::vector<NodeIndex>> reach_set(NodeIndex target,
                                                            int legislative_rank);

private:
    const BaseNetwork& base_;
    SplitMode mode_;
    std::mutex mu_;
    std::optional<LeafMassTable> leaf_;
    std::map<int, std::shared_ptr<const MassTable>> para_;
    std::map<std::pair<int, int>, std::shared_ptr<const MassTable>> rolled_;
    std::map<std::pair<NodeIndex, int>, std::shared_ptr<const std::vector<NodeIndex>>> reach_;
};

/// Filtered mass table for a perspective: judicial filtering drops a unit's
/// entire contribution, legislative filtering drops the target's mass with no
/// redistribution. Cells keep (unit at p.judicial_rank, target) keys.
MassTable perspective_masses(NetworkSpace& space, const Perspective& p);

/// Throws std::invalid_argument when ranks fall outside their branches.
BipartiteNetwork derive(NetworkSpace& space, const Perspective& p);

/// Full Cartesian grid: judicial rank major, then legislative rank, then
/// judicial filter index major over legislative filter index. Empty filter
/// lists behave as a single pass-all entry.
std::vector<Perspective> enumerate_grid(const std::vector<FilterPtr>& judicial_filters = {},
                                        const std::vector<FilterPtr>& legislative_filters = {});

}  // namespace lexnet
