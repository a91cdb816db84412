#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "lexnet/counting.hpp"
#include "lexnet/model.hpp"
#include "lexnet/rational.hpp"
#include "lexnet/synth.hpp"

// Brute-force re-derivations of the library's counting and projection
// semantics, written directly against the definitions with none of the
// library's caching or table plumbing. Tests compare library output against
// these on small corpora.
namespace testutil {

using lexnet::BaseNetwork;
using lexnet::NodeIndex;
using lexnet::Rational;
using lexnet::SplitMode;

using PairMap = std::map<std::pair<NodeIndex, NodeIndex>, Rational>;

/// Deepest ancestor-or-self of n with rank <= rank; the tree root when every
/// ancestor sits deeper.
NodeIndex slow_map(const BaseNetwork& base, NodeIndex n, int rank);

struct Slot {
    NodeIndex anchor;
    bool proxy;
    bool operator<(const Slot& o) const {
        return anchor != o.anchor ? anchor < o.anchor : proxy < o.proxy;
    }
    bool operator==(const Slot& o) const = default;
};

/// Frontier positions reachable from root: real nodes at the frontier rank,
/// plus one proxy per childless node above it.
std::vector<Slot> slow_slots(const BaseNetwork& base, NodeIndex root, int frontier);

/// Per-(paragraph, slot) masses by per-reference recursive splitting.
std::map<std::pair<NodeIndex, Slot>, Rational> slow_leaf_masses(const BaseNetwork& base,
                                                                SplitMode mode);

/// (paragraph, carrier at legislative_rank) -> mass.
PairMap slow_aggregate(const BaseNetwork& base, int legislative_rank, SplitMode mode);

/// (unit at judicial_rank, carrier at legislative_rank) -> mass.
PairMap slow_rolled(const BaseNetwork& base, int judicial_rank, int legislative_rank,
                    SplitMode mode);

/// Distinct carriers at legislative_rank a reference to target can reach.
std::set<NodeIndex> slow_reach(const BaseNetwork& base, NodeIndex target, int legislative_rank);

/// Legislative-side projections with pass-all filters; keys are (a, b) with
/// id(a) < id(b).
PairMap slow_unit_count(const BaseNetwork& base, int witness_rank, int legislative_rank,
                        SplitMode mode);
PairMap slow_event_count(const BaseNetwork& base, int witness_rank, int legislative_rank);
PairMap slow_combined(const BaseNetwork& base, int legislative_rank, long k, bool multiplicity,
                      SplitMode mode);

/// Judicial-side projections: witnesses are legislative carriers at
/// witness_rank, projected nodes are judicial units at judicial_rank.
PairMap slow_unit_count_judicial(const BaseNetwork& base, int witness_rank, int judicial_rank,
                                 SplitMode mode);
PairMap slow_event_count_judicial(const BaseNetwork& base, int witness_rank, int judicial_rank);

/// T1: two statutes (A with sections A1{A1a,A1b} and A2, B with B1), one
/// court with one panel, decisions D1{q1,q2} and D2{q3}, six references of
/// multiplicity one.
BaseNetwork make_t1();

struct GenOptions {
    int max_paragraphs = 10;      // per decision
    int max_legislative = 24;     // extra nodes under the statutes
    int max_refs = 30;
    std::int64_t max_multiplicity = 3;
    bool with_attributes = true;
};

/// Random valid corpus: strict judicial chain, legislative trees with rank
/// gaps, optional attributes, multi-mention references. Deterministic for a
/// fixed rng state.
BaseNetwork random_corpus(lexnet::io::Rng& rng, const GenOptions& opts = {});

/// Smaller variant capped at ~max_nodes nodes in total.
BaseNetwork small_random_corpus(lexnet::io::Rng& rng, int max_nodes, int max_refs);

/// Library mass table rendered into oracle shape for comparison.
PairMap table_to_map(const lexnet::MassTable& table);

}  // namespace testutil
