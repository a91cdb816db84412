#pragma once

#include <map>
#include <string>
#include <vector>

#include "lexnet/perspective.hpp"

namespace lexnet {

enum class ProjectionSide { legislative, judicial };
enum class WeightMode { unit_count, event_count, combined };
enum class PresenceRule { binary, multiplicity };
enum class StrengthDirection { incoming, outgoing };
enum class Normalization { sum, max };

const char* to_string(ProjectionSide);
const char* to_string(WeightMode);
const char* to_string(PresenceRule);
const char* to_string(StrengthDirection);
const char* to_string(Normalization);

struct WeightingSpec {
    ProjectionSide side = ProjectionSide::legislative;
    WeightMode mode = WeightMode::unit_count;
    /// Witness rank on the opposite branch of `side`; the unit whose shared
    /// references create a co-occurrence. Must be at least as fine as the
    /// perspective's rank on that branch.
    int witness_rank = kJudicialDepth;
    int k = 1;  // combined mode threshold
    /// combined only: binary counts qualifying witness paragraphs, while
    /// multiplicity sums per-paragraph min mention counts toward k.
    PresenceRule presence = PresenceRule::binary;
};

struct ProjEdge {
    NodeIndex a = kNoNode;  // a < b by node id
    NodeIndex b = kNoNode;
    Rational weight;
};

struct ProjectedGraph {
    const BaseNetwork* base = nullptr;
    ProjectionSide side = ProjectionSide::legislative;
    Perspective perspective;
    WeightingSpec weighting;
    std::vector<NodeIndex> nodes;  // id-sorted carriers of the projected side
    std::vector<ProjEdge> edges;   // positive weights only, (a,b) id-ordered

    std::size_t neighbor_count(NodeIndex n) const;
};

/// One-mode projection of the perspective's bipartite network.
/// unit_count: number of witness units referencing both endpoints (reference
/// means positive dynamically counted mass). event_count: sum over witness
/// units of min raw mention counts. combined: number of decisions holding at
/// least k qualifying paragraphs. Throws std::invalid_argument on rank or
/// mode preconditions.
ProjectedGraph project(NetworkSpace& space, const Perspective& p, const WeightingSpec& w);

/// True when project(space, p, w) would accept the pair: the witness rank is
/// at least as fine as the perspective's rank on the witness branch and the
/// mode's own constraints hold. Grid sweeps use this to skip the rest.
bool weighting_applies(const Perspective& p, const WeightingSpec& w);

struct StrengthEntry {
    NodeIndex i = kNoNode;
    NodeIndex j = kNoNode;
    Rational value;
};

struct StrengthMatrix {
    StrengthDirection direction = StrengthDirection::incoming;
    Normalization normalization = Normalization::sum;
    std::vector<StrengthEntry> entries;   // (i, j) id-ordered, one per ordered pair
    std::vector<NodeIndex> zero_rows;     // isolated nodes, flagged not emitted
};

/// incoming(i,j) = w(i,j) normalized over i's row, P(s_j | s_i);
/// outgoing(i,j) = w(i,j) normalized over j's row, P(s_i | s_j).
/// sum divides by the row total, max by the row maximum.
StrengthMatrix strength(const ProjectedGraph& g, StrengthDirection direction,
                        Normalization normalization);

struct MeanStrength {
    NodeIndex node = kNoNode;
    bool defined = false;  // false for isolated nodes
    Rational incoming;
    Rational outgoing;
};

/// Arithmetic means of a node's sum-normalized strength entries over its
/// neighbors only; isolated nodes come back undefined.
std::vector<MeanStrength> mean_strengths(const ProjectedGraph& g);

/// Per-group projections over witness units grouped by a judicial rank or by
/// an attribute (nearest ancestor-or-self carrying the key; missing values
/// group under ""). Rank grouping requires the rank to be strictly coarser
/// than the witness rank.
std::map<std::string, ProjectedGraph> grouped_project(NetworkSpace& space,
                                                      const Perspective& p,
                                                      const WeightingSpec& w,
                                                      int group_rank);
std::map<std::string, ProjectedGraph> grouped_project(NetworkSpace& space,
                                                      const Perspective& p,
                                                      const WeightingSpec& w,
                                                      const std::string& attribute);

}  // namespace lexnet
