#include "lexnet/projection.hpp"

#include <algorithm>
#include <stdexcept>

namespace lexnet {

const char* to_string(ProjectionSide s) {
    return s == ProjectionSide::legislative ? "legislative" : "judicial";
}
const char* to_string(WeightMode m) {
    switch (m) {
        case WeightMode::unit_count: return "unit_count";
        case WeightMode::event_count: return "event_count";
        case WeightMode::combined: return "combined";
    }
    return "?";
}
const char* to_string(PresenceRule p) {
    return p == PresenceRule::binary ? "binary" : "multiplicity";
}
const char* to_string(StrengthDirection d) {
    return d == StrengthDirection::incoming ? "incoming" : "outgoing";
}
const char* to_string(Normalization n) { return n == Normalization::sum ? "sum" : "max"; }

std::size_t ProjectedGraph::neighbor_count(NodeIndex n) const {
    std::size_t c = 0;
    for (const ProjEdge& e : edges)
        if (e.a == n || e.b == n) ++c;
    return c;
}

namespace {

struct PairKey {
    NodeIndex a, b;
    bool operator<(const PairKey& o) const {
        if (a != o.a) return a < o.a;
        return b < o.b;
    }
};

PairKey canonical_pair(const BaseNetwork& base, NodeIndex x, NodeIndex y) {
    if (base.node(x).id < base.node(y).id) return {x, y};
    return {y, x};
}

void validate_spec(const Perspective& p, const WeightingSpec& w) {
    if (p.judicial_rank < 1 || p.judicial_rank > kJudicialDepth ||
        p.legislative_rank < 1 || p.legislative_rank > kLegislativeDepth)
        throw std::invalid_argument("perspective rank out of range");
    if (w.k < 1) throw std::invalid_argument("projection threshold k must be >= 1");
    if (w.side == ProjectionSide::legislative) {
        if (w.witness_rank < p.judicial_rank || w.witness_rank > kJudicialDepth)
            throw std::invalid_argument(
                "witness rank must be a judicial rank at least as fine as the perspective's");
    } else {
        if (w.witness_rank < p.legislative_rank || w.witness_rank > kLegislativeDepth)
            throw std::invalid_argument(
                "witness rank must be a legislative rank at least as fine as the perspective's");
    }
    if (w.mode == WeightMode::combined) {
        if (w.side != ProjectionSide::legislative)
            throw std::invalid_argument("combined mode projects the legislative side only");
        if (w.witness_rank != kJudicialDepth)
            throw std::invalid_argument("combined mode requires paragraph witnesses");
    }
}

/// Filtered (witness, carrier) mass cells for the projection, as per-witness
/// carrier lists. Carrier admission doubles as the graph's node set.
struct WitnessView {
    std::map<NodeIndex, std::vector<NodeIndex>> targets_by_witness;
    std::vector<NodeIndex> carriers;  // id-sorted distinct carriers
};

WitnessView witness_view(NetworkSpace& space, const Perspective& p, const WeightingSpec& w,
                         int witness_rank_override = 0) {
    const BaseNetwork& base = space.base();
    const int witness_rank = witness_rank_override ? witness_rank_override : w.witness_rank;
    std::shared_ptr<const MassTable> table;
    if (w.side == ProjectionSide::legislative)
        table = space.rolled(witness_rank, p.legislative_rank);
    else
        table = space.rolled(p.judicial_rank, witness_rank);

    WitnessView view;
    for (const MassCell& c : *table) {
        NodeIndex witness = w.side == ProjectionSide::legislative ? c.unit : c.target;
        NodeIndex carrier = w.side == ProjectionSide::legislative ? c.target : c.unit;
        if (w.side == ProjectionSide::legislative) {
            if (!filter_matches(p.judicial_filter, base, base.mapped_at(witness, p.judicial_rank)))
                continue;
            if (!filter_matches(p.legislative_filter, base, carrier)) continue;
        } else {
            if (!filter_matches(p.legislative_filter, base,
                                base.mapped_at(witness, p.legislative_rank)))
                continue;
            if (!filter_matches(p.judicial_filter, base, carrier)) continue;
        }
        view.targets_by_witness[witness].push_back(carrier);
        view.carriers.push_back(carrier);
    }
    std::sort(view.carriers.begin(), view.carriers.end(), IdLess{base});
    view.carriers.erase(std::unique(view.carriers.begin(), view.carriers.end()),
                        view.carriers.end());
    return view;
}

/// Raw mention counts per (witness, carrier): multiplicity of every reference
/// whose mass reaches the carrier. Mirrors witness_view's filtering.
std::map<NodeIndex, std::map<NodeIndex, std::int64_t>> raw_counts(
    NetworkSpace& space, const Perspective& p, const WeightingSpec& w, int witness_rank) {
    const BaseNetwork& base = space.base();
    std::map<NodeIndex, std::map<NodeIndex, std::int64_t>> counts;
    for (const RefEdge& e : base.refs()) {
        if (w.side == ProjectionSide::legislative) {
            NodeIndex witness = base.mapped_at(e.source, witness_rank);
            if (!filter_matches(p.judicial_filter, base, base.mapped_at(e.source, p.judicial_rank)))
                continue;
            auto reach = space.reach_set(e.target, p.legislative_rank);
            for (NodeIndex carrier : *reach) {
                if (!filter_matches(p.legislative_filter, base, carrier)) continue;
                counts[witness][carrier] += e.multiplicity;
            }
        } else {
            NodeIndex carrier = base.mapped_at(e.source, p.judicial_rank);
            if (!filter_matches(p.judicial_filter, base, carrier)) continue;
            auto reach = space.reach_set(e.target, witness_rank);
            for (NodeIndex witness : *reach) {
                if (!filter_matches(p.legislative_filter, base,
                                    base.mapped_at(witness, p.legislative_rank)))
                    continue;
                counts[witness][carrier] += e.multiplicity;
            }
        }
    }
    return counts;
}

std::vector<ProjEdge> to_edges(const BaseNetwork& base, std::map<PairKey, Rational> acc) {
    std::vector<ProjEdge> edges;
    edges.reserve(acc.size());
    for (auto& [key, weight] : acc) {
        if (weight.is_zero()) continue;
        edges.push_back({key.a, key.b, std::move(weight)});
    }
    std::sort(edges.begin(), edges.end(), [&](const ProjEdge& x, const ProjEdge& y) {
        const auto& xa = base.node(x.a).id;
        const auto& ya = base.node(y.a).id;
        if (xa != ya) return xa < ya;
        return base.node(x.b).id < base.node(y.b).id;
    });
    return edges;
}

std::map<PairKey, Rational> unit_count_weights(const BaseNetwork& base, const WitnessView& view) {
    std::map<PairKey, Rational> acc;
    for (const auto& [witness, targets] : view.targets_by_witness) {
        for (std::size_t x = 0; x < targets.size(); ++x)
            for (std::size_t y = x + 1; y < targets.size(); ++y)
                acc[canonical_pair(base, targets[x], targets[y])] += Rational(1);
    }
    return acc;
}

std::map<PairKey, Rational> event_count_weights(
    const BaseNetwork& base,
    const std::map<NodeIndex, std::map<NodeIndex, std::int64_t>>& counts) {
    std::map<PairKey, Rational> acc;
    for (const auto& [witness, per_carrier] : counts) {
        std::vector<std::pair<NodeIndex, std::int64_t>> items(per_carrier.begin(),
                                                              per_carrier.end());
        for (std::size_t x = 0; x < items.size(); ++x)
            for (std::size_t y = x + 1; y < items.size(); ++y) {
                auto key = canonical_pair(base, items[x].first, items[y].first);
                acc[key] += Rational(static_cast<long>(std::min(items[x].second, items[y].second)));
            }
    }
    return acc;
}

std::map<PairKey, Rational> combined_weights(NetworkSpace& space, const Perspective& p,
                                             const WeightingSpec& w, const WitnessView& view) {
    const BaseNetwork& base = space.base();
    // per decision, per pair: qualifying paragraph count (binary) or summed
    // min mention events (multiplicity)
    std::map<NodeIndex, std::map<PairKey, std::int64_t>> per_decision;
    if (w.presence == PresenceRule::binary) {
        for (const auto& [paragraph, targets] : view.targets_by_witness) {
            NodeIndex decision = base.mapped_at(paragraph, 3);
            auto& pairs = per_decision[decision];
            for (std::size_t x = 0; x < targets.size(); ++x)
                for (std::size_t y = x + 1; y < targets.size(); ++y)
                    pairs[canonical_pair(base, targets[x], targets[y])] += 1;
        }
    } else {
        auto counts = raw_counts(space, p, w, kJudicialDepth);
        for (const auto& [paragraph, per_carrier] : counts) {
            NodeIndex decision = base.mapped_at(paragraph, 3);
            auto& pairs = per_decision[decision];
            std::vector<std::pair<NodeIndex, std::int64_t>> items(per_carrier.begin(),
                                                                  per_carrier.end());
            for (std::size_t x = 0; x < items.size(); ++x)
                for (std::size_t y = x + 1; y < items.size(); ++y)
                    pairs[canonical_pair(base, items[x].first, items[y].first)] +=
                        std::min(items[x].second, items[y].second);
        }
    }
    std::map<PairKey, Rational> acc;
    for (const auto& [decision, pairs] : per_decision) {
        for (const auto& [key, count] : pairs)
            if (count >= w.k) acc[key] += Rational(1);
    }
    return acc;
}

}  // namespace

bool weighting_applies(const Perspective& p, const WeightingSpec& w) {
    try {
        validate_spec(p, w);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

ProjectedGraph project(NetworkSpace& space, const Perspective& p, const WeightingSpec& w) {
    validate_spec(p, w);
    const BaseNetwork& base = space.base();
    WitnessView view = witness_view(space, p, w);

    std::map<PairKey, Rational> acc;
    switch (w.mode) {
        case WeightMode::unit_count:
            acc = unit_count_weights(base, view);
            break;
        case WeightMode::event_count:
            acc = event_count_weights(base, raw_counts(space, p, w, w.witness_rank));
            break;
        case WeightMode::combined:
            acc = combined_weights(space, p, w, view);
            break;
    }

    ProjectedGraph g;
    g.base = &base;
    g.side = w.side;
    g.perspective = p;
    g.weighting = w;
    g.nodes = std::move(view.carriers);
    g.edges = to_edges(base, std::move(acc));
    return g;
}

namespace {

struct Adjacency {
    std::map<NodeIndex, std::vector<std::pair<NodeIndex, const Rational*>>> rows;
    std::map<NodeIndex, Rational> row_sum;
    std::map<NodeIndex, Rational> row_max;
};

Adjacency build_adjacency(const ProjectedGraph& g) {
    Adjacency adj;
    for (NodeIndex n : g.nodes) adj.rows[n];
    for (const ProjEdge& e : g.edges) {
        adj.rows[e.a].emplace_back(e.b, &e.weight);
        adj.rows[e.b].emplace_back(e.a, &e.weight);
    }
    for (auto& [n, row] : adj.rows) {
        Rational sum, mx;
        for (auto& [m, wp] : row) {
            sum += *wp;
            if (*wp > mx) mx = *wp;
        }
        adj.row_sum[n] = sum;
        adj.row_max[n] = mx;
    }
    return adj;
}

}  // namespace

StrengthMatrix strength(const ProjectedGraph& g, StrengthDirection direction,
                        Normalization normalization) {
    Adjacency adj = build_adjacency(g);
    StrengthMatrix out;
    out.direction = direction;
    out.normalization = normalization;
    for (NodeIndex n : g.nodes)
        if (adj.rows[n].empty()) out.zero_rows.push_back(n);

    std::vector<StrengthEntry> entries;
    for (const ProjEdge& e : g.edges) {
        for (auto [i, j] : {std::pair{e.a, e.b}, std::pair{e.b, e.a}}) {
            NodeIndex row = direction == StrengthDirection::incoming ? i : j;
            const Rational& denom = normalization == Normalization::sum
                                        ? adj.row_sum[row]
                                        : adj.row_max[row];
            entries.push_back({i, j, e.weight / denom});
        }
    }
    // row-major by id for stable emission
    const BaseNetwork& base = *g.base;
    std::sort(entries.begin(), entries.end(), [&](const StrengthEntry& x, const StrengthEntry& y) {
        const auto& xi = base.node(x.i).id;
        const auto& yi = base.node(y.i).id;
        if (xi != yi) return xi < yi;
        return base.node(x.j).id < base.node(y.j).id;
    });
    out.entries = std::move(entries);
    return out;
}

std::vector<MeanStrength> mean_strengths(const ProjectedGraph& g) {
    Adjacency adj = build_adjacency(g);
    std::vector<MeanStrength> out;
    for (NodeIndex n : g.nodes) {
        MeanStrength m;
        m.node = n;
        const auto& row = adj.rows[n];
        if (row.empty()) {
            out.push_back(m);
            continue;
        }
        m.defined = true;
        Rational in_sum, out_sum;
        for (auto& [j, wp] : row) {
            in_sum += *wp / adj.row_sum[n];
            out_sum += *wp / adj.row_sum[j];
        }
        Rational deg(static_cast<long>(row.size()));
        m.incoming = in_sum / deg;
        m.outgoing = out_sum / deg;
        out.push_back(m);
    }
    return out;
}

namespace {

std::map<std::string, WitnessView> split_view(const BaseNetwork& base, const WitnessView& view,
                                              const std::map<NodeIndex, std::string>& group_of) {
    std::map<std::string, WitnessView> parts;
    for (const auto& [witness, targets] : view.targets_by_witness) {
        auto it = group_of.find(witness);
        const std::string& key = it == group_of.end() ? std::string() : it->second;
        WitnessView& part = parts[key];
        part.targets_by_witness.emplace(witness, targets);
        for (NodeIndex t : targets) part.carriers.push_back(t);
    }
    for (auto& [key, part] : parts) {
        std::sort(part.carriers.begin(), part.carriers.end(), IdLess{base});
        part.carriers.erase(std::unique(part.carriers.begin(), part.carriers.end()),
                            part.carriers.end());
    }
    return parts;
}

std::map<std::string, ProjectedGraph> grouped_from_assignment(
    NetworkSpace& space, const Perspective& p, const WeightingSpec& w,
    const std::map<NodeIndex, std::string>& group_of) {
    if (w.mode != WeightMode::unit_count)
        throw std::invalid_argument("grouped projections support unit_count weighting");
    const BaseNetwork& base = space.base();
    WitnessView view = witness_view(space, p, w);
    std::map<std::string, ProjectedGraph> out;
    for (auto& [key, part] : split_view(base, view, group_of)) {
        ProjectedGraph g;
        g.base = &base;
        g.side = w.side;
        g.perspective = p;
        g.weighting = w;
        g.nodes = std::move(part.carriers);
        g.edges = to_edges(base, unit_count_weights(base, part));
        out.emplace(key, std::move(g));
    }
    return out;
}

}  // namespace

std::map<std::string, ProjectedGraph> grouped_project(NetworkSpace& space, const Perspective& p,
                                                      const WeightingSpec& w, int group_rank) {
    validate_spec(p, w);
    if (w.side != ProjectionSide::legislative)
        throw std::invalid_argument("rank grouping applies to legislative-side projections");
    if (group_rank < 1 || group_rank >= w.witness_rank)
        throw std::invalid_argument("group rank must be strictly coarser than the witness rank");
    const BaseNetwork& base = space.base();
    std::map<NodeIndex, std::string> group_of;
    for (NodeIndex u : base.level_nodes({Branch::judicial, w.witness_rank}))
        group_of[u] = base.node(base.mapped_at(u, group_rank)).id;
    return grouped_from_assignment(space, p, w, group_of);
}

std::map<std::string, ProjectedGraph> grouped_project(NetworkSpace& space, const Perspective& p,
                                                      const WeightingSpec& w,
                                                      const std::string& attribute) {
    validate_spec(p, w);
    const BaseNetwork& base = space.base();
    Branch witness_branch =
        w.side == ProjectionSide::legislative ? Branch::judicial : Branch::legislative;
    std::map<NodeIndex, std::string> group_of;
    for (NodeIndex u : base.level_nodes({witness_branch, w.witness_rank})) {
        for (NodeIndex cur = u; cur != kNoNode; cur = base.node(cur).parent) {
            auto it = base.node(cur).attributes.find(attribute);
            if (it != base.node(cur).attributes.end()) {
                group_of[u] = it->second;
                break;
            }
        }
    }
    return grouped_from_assignment(space, p, w, group_of);
}

}  // namespace lexnet
