#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lexnet/projection.hpp"

namespace lexnet {

struct RankRow {
    NodeIndex node = kNoNode;
    Rational value;
    int rank = 0;  // 1-based position under the tie rule
};

/// Rows ordered by value descending, node id ascending on equal values; rank
/// is the 1-based position in that total order.
struct RankTable {
    std::string metric;
    std::string tie_rule = "value_desc_id_asc";
    std::vector<RankRow> rows;

    std::optional<Rational> value_of(NodeIndex n) const;
};

/// Builds the canonical ordering and rank numbering from raw values.
RankTable make_rank_table(const BaseNetwork& base, std::string metric,
                          std::vector<std::pair<NodeIndex, Rational>> values);

/// Total dynamically counted mass per legislative carrier at a rank. The
/// bipartite overload sums the network's columns, honoring its filters.
RankTable in_degree(NetworkSpace& space, int legislative_rank);
RankTable in_degree(const BaseNetwork& base, const BipartiteNetwork& net);

/// Number of decisions whose mass toward the carrier reaches at least k
/// (exact rational comparison). The carrier universe matches in_degree's at
/// the same rank, so tables across k and against in_degree are comparable.
RankTable decisions_with_at_least(NetworkSpace& space, int legislative_rank, long k,
                                  const Perspective* filters = nullptr);

enum class ShareNormalization { corpus_total, per_group_total };

struct Share {
    std::string group;            // group node id or attribute value
    std::optional<Rational> value;  // empty: undefined (zero denominator)
};

struct SourceDistribution {
    NodeIndex focal = kNoNode;
    ShareNormalization normalization = ShareNormalization::corpus_total;
    std::vector<Share> shares;  // group-sorted
};

using GroupBy = std::variant<int, std::string>;  // judicial rank | attribute key

/// Incoming mass of `focal` broken down by source group. corpus_total divides
/// by the focal's total incoming mass, per_group_total by the group's
/// corpus-wide outgoing mass.
SourceDistribution source_distribution(NetworkSpace& space, NodeIndex focal,
                                       const GroupBy& group_by,
                                       ShareNormalization normalization);

struct TargetShare {
    NodeIndex node = kNoNode;
    std::int64_t direct = 0;
    std::optional<Rational> share;  // empty when the subtree total is zero
};

struct TargetDistribution {
    NodeIndex focal = kNoNode;
    std::int64_t total = 0;
    std::vector<TargetShare> shares;  // id-sorted over subtree(focal)
};

/// Raw direct-reference counts over the focal's subtree; no broadcast.
TargetDistribution target_distribution(const BaseNetwork& base, NodeIndex focal);

/// Score of s: among nodes with at least one neighbor, the fraction whose
/// sum-normalized row gives s a share of at least `threshold`.
RankTable overrepresentation(const ProjectedGraph& g, const Rational& threshold = Rational(1, 4));

struct CompareRow {
    NodeIndex node = kNoNode;
    std::vector<int> ranks;  // one per input table
};

struct CompareReport {
    std::vector<std::string> metrics;  // per input table
    std::vector<CompareRow> rows;      // union of top-n, first table's order
};

/// Requires at least two tables over identical node universes.
CompareReport rank_compare(const std::vector<RankTable>& tables, int top_n);

}  // namespace lexnet
