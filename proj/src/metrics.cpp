#include "lexnet/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace lexnet {

std::optional<Rational> RankTable::value_of(NodeIndex n) const {
    for (const RankRow& r : rows)
        if (r.node == n) return r.value;
    return std::nullopt;
}

RankTable make_rank_table(const BaseNetwork& base, std::string metric,
                          std::vector<std::pair<NodeIndex, Rational>> values) {
    std::sort(values.begin(), values.end(),
              [&](const auto& a, const auto& b) {
                  if (a.second != b.second) return b.second < a.second;
                  return base.node(a.first).id < base.node(b.first).id;
              });
    RankTable table;
    table.metric = std::move(metric);
    table.rows.reserve(values.size());
    int rank = 0;
    for (auto& [node, value] : values)
        table.rows.push_back({node, std::move(value), ++rank});
    return table;
}

RankTable in_degree(NetworkSpace& space, int legislative_rank) {
    const BaseNetwork& base = space.base();
    auto table = space.paragraph_masses(legislative_rank);
    std::map<NodeIndex, Rational> totals;
    for (const MassCell& c : *table) totals[c.target] += c.mass;
    std::vector<std::pair<NodeIndex, Rational>> values(totals.begin(), totals.end());
    return make_rank_table(base, std::string("in_degree@") +
                                     rank_name(Branch::legislative, legislative_rank),
                           std::move(values));
}

RankTable in_degree(const BaseNetwork& base, const BipartiteNetwork& net) {
    std::map<NodeIndex, Rational> totals;
    for (const MassCell& c : net.edges) totals[c.target] += c.mass;
    std::vector<std::pair<NodeIndex, Rational>> values(totals.begin(), totals.end());
    return make_rank_table(base, std::string("in_degree@") +
                                     rank_name(Branch::legislative,
                                               net.perspective.legislative_rank),
                           std::move(values));
}

RankTable decisions_with_at_least(NetworkSpace& space, int legislative_rank, long k,
                                  const Perspective* filters) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const BaseNetwork& base = space.base();
    // Filter at paragraph granularity before rolling up, so paragraph-rank
    // judicial filters drop exactly the right contributions.
    auto para = space.paragraph_masses(legislative_rank);
    std::map<std::pair<NodeIndex, NodeIndex>, Rational> per_decision;
    std::map<NodeIndex, Rational> counts;  // target -> qualifying decisions
    for (const MassCell& c : *para) {
        if (filters) {
            if (!filter_matches(filters->judicial_filter, base,
                                base.mapped_at(c.unit, filters->judicial_rank)))
                continue;
            if (!filter_matches(filters->legislative_filter, base, c.target)) continue;
        }
        counts.try_emplace(c.target, Rational(0));  // keep the universe stable across k
        per_decision[{base.mapped_at(c.unit, 3), c.target}] += c.mass;
    }
    Rational bound(k);
    for (const auto& [key, mass] : per_decision)
        if (mass >= bound) counts[key.second] += Rational(1);
    std::vector<std::pair<NodeIndex, Rational>> values(counts.begin(), counts.end());
    std::string name = std::string("decisions_at_least@") +
                       rank_name(Branch::legislative, legislative_rank) + "_k" +
                       std::to_string(k);
    return make_rank_table(base, std::move(name), std::move(values));
}

SourceDistribution source_distribution(NetworkSpace& space, NodeIndex focal,
                                       const GroupBy& group_by,
                                       ShareNormalization normalization) {
    const BaseNetwork& base = space.base();
    if (focal >= base.node_count() || base.node(focal).branch != Branch::legislative)
        throw std::invalid_argument("source distribution focal must be a legislative node");
    const int level = base.node(focal).rank;
    auto para = space.paragraph_masses(level);

    // Attribute grouping uses the nearest ancestor-or-self carrying the key;
    // paragraphs without a value land in the "" group so shares stay total.
    auto group_key = [&](NodeIndex paragraph) -> std::string {
        if (std::holds_alternative<int>(group_by)) {
            int rank = std::get<int>(group_by);
            return base.node(base.mapped_at(paragraph, rank)).id;
        }
        const std::string& attr = std::get<std::string>(group_by);
        for (NodeIndex cur = paragraph; cur != kNoNode; cur = base.node(cur).parent) {
            auto it = base.node(cur).attributes.find(attr);
            if (it != base.node(cur).attributes.end()) return it->second;
        }
        return std::string();
    };

    std::map<std::string, Rational> toward_focal;
    std::map<std::string, Rational> group_total;
    Rational focal_total;
    for (const MassCell& c : *para) {
        std::string key = group_key(c.unit);
        group_total[key] += c.mass;
        if (c.target == focal) {
            toward_focal[key] += c.mass;
            focal_total += c.mass;
        }
    }

    SourceDistribution dist;
    dist.focal = focal;
    dist.normalization = normalization;
    for (const auto& [key, mass] : toward_focal) {
        Share s;
        s.group = key;
        const Rational& denom =
            normalization == ShareNormalization::corpus_total ? focal_total : group_total[key];
        if (denom.is_zero())
            s.value = std::nullopt;
        else
            s.value = mass / denom;
        dist.shares.push_back(std::move(s));
    }
    return dist;
}

TargetDistribution target_distribution(const BaseNetwork& base, NodeIndex focal) {
    if (focal >= base.node_count() || base.node(focal).branch != Branch::legislative)
        throw std::invalid_argument("target distribution focal must be a legislative node");
    std::map<NodeIndex, std::int64_t> direct;
    for (NodeIndex n : base.subtree(focal)) direct[n] = 0;
    std::int64_t total = 0;
    for (const RefEdge& e : base.refs()) {
        auto it = direct.find(e.target);
        if (it == direct.end()) continue;
        it->second += e.multiplicity;
        total += e.multiplicity;
    }
    TargetDistribution dist;
    dist.focal = focal;
    dist.total = total;
    std::vector<NodeIndex> members;
    for (const auto& [n, count] : direct) members.push_back(n);
    std::sort(members.begin(), members.end(), IdLess{base});
    for (NodeIndex n : members) {
        TargetShare s;
        s.node = n;
        s.direct = direct[n];
        if (total > 0)
            s.share = Rational(static_cast<long>(direct[n])) / Rational(static_cast<long>(total));
        dist.shares.push_back(std::move(s));
    }
    return dist;
}

RankTable overrepresentation(const ProjectedGraph& g, const Rational& threshold) {
    if (threshold <= Rational(0) || threshold > Rational(1))
        throw std::invalid_argument("overrepresentation threshold must lie in (0, 1]");
    if (g.side != ProjectionSide::legislative)
        throw std::invalid_argument("overrepresentation expects a legislative-side projection");
    const BaseNetwork& base = *g.base;

    std::map<NodeIndex, Rational> row_sum;
    std::map<NodeIndex, std::vector<std::pair<NodeIndex, const Rational*>>> rows;
    for (const ProjEdge& e : g.edges) {
        rows[e.a].emplace_back(e.b, &e.weight);
        rows[e.b].emplace_back(e.a, &e.weight);
        row_sum[e.a] += e.weight;
        row_sum[e.b] += e.weight;
    }
    long connected = static_cast<long>(rows.size());

    std::map<NodeIndex, long> qualifying;
    for (NodeIndex n : g.nodes) qualifying[n] = 0;
    for (const auto& [i, row] : rows) {
        const Rational& denom = row_sum[i];
        for (const auto& [s, wp] : row) {
            if (*wp / denom >= threshold) qualifying[s] += 1;
        }
    }

    std::vector<std::pair<NodeIndex, Rational>> values;
    values.reserve(qualifying.size());
    for (const auto& [n, count] : qualifying) {
        Rational score = connected == 0 ? Rational(0)
                                        : Rational(count) / Rational(connected);
        values.emplace_back(n, std::move(score));
    }
    return make_rank_table(base, "overrepresentation_t" + threshold.num_str() + "_" +
                                     threshold.den_str(),
                           std::move(values));
}

CompareReport rank_compare(const std::vector<RankTable>& tables, int top_n) {
    if (tables.size() < 2) throw std::invalid_argument("rank_compare needs at least two tables");
    if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");

    std::set<NodeIndex> universe;
    for (const RankRow& r : tables.front().rows) universe.insert(r.node);
    for (std::size_t t = 1; t < tables.size(); ++t) {
        std::set<NodeIndex> u;
        for (const RankRow& r : tables[t].rows) u.insert(r.node);
        if (u != universe)
            throw std::invalid_argument("rank_compare: table '" + tables[t].metric +
                                        "' covers a different node universe");
    }

    std::set<NodeIndex> selected;
    for (const RankTable& t : tables) {
        for (const RankRow& r : t.rows) {
            if (r.rank > top_n) break;
            selected.insert(r.node);
        }
    }

    CompareReport report;
    for (const RankTable& t : tables) report.metrics.push_back(t.metric);
    for (const RankRow& r : tables.front().rows) {
        if (!selected.count(r.node)) continue;
        CompareRow row;
        row.node = r.node;
        for (const RankTable& t : tables) {
            int rank = 0;
            for (const RankRow& tr : t.rows) {
                if (tr.node == row.node) {
                    rank = tr.rank;
                    break;
                }
            }
            row.ranks.push_back(rank);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace lexnet
