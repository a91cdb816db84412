#include "lexnet/synth.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

namespace lexnet::io {

using nlohmann::json;

std::uint64_t Rng::below(std::uint64_t bound) {
    // rejection zone keeps the draw exactly uniform
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

namespace {

Rational parse_fraction(const json& j, const char* what) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw SynthError(std::string(what) +
                     ": write fractions as strings (\"0.35\" or \"7/20\") to keep them exact");
}

std::string padded(const char* prefix, std::int64_t index, std::int64_t count) {
    int width = 1;
    for (std::int64_t c = count; c >= 10; c /= 10) ++width;
    std::string digits = std::to_string(index);
    std::string out(prefix);
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
    out += digits;
    return out;
}

/// child ordinal -> parent ordinal, honoring per-parent [lo, hi] load
std::vector<std::int64_t> assign_parents(Rng& rng, std::int64_t children, std::int64_t parents,
                                         std::int64_t lo, std::int64_t hi, const char* what) {
    if (children == 0) return {};
    if (parents == 0)
        throw SynthError(std::string(what) + ": children without any parent level");
    if (children < parents * lo || children > parents * hi)
        throw SynthError(std::string(what) + ": " + std::to_string(children) +
                         " children cannot satisfy per-parent bounds [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "] over " + std::to_string(parents) +
                         " parents");
    std::vector<std::int64_t> parent_of(children);
    std::vector<std::int64_t> load(parents, 0);
    std::int64_t next = 0;
    for (std::int64_t p = 0; p < parents && next < children; ++p) {
        for (std::int64_t i = 0; i < lo && next < children; ++i) {
            parent_of[next++] = p;
            ++load[p];
        }
    }
    std::vector<std::int64_t> open;
    for (std::int64_t p = 0; p < parents; ++p)
        if (load[p] < hi) open.push_back(p);
    for (; next < children; ++next) {
        std::size_t pick = static_cast<std::size_t>(rng.below(open.size()));
        std::int64_t p = open[pick];
        parent_of[next] = p;
        if (++load[p] == hi) {
            open[pick] = open.back();
            open.pop_back();
        }
    }
    return parent_of;
}

}  // namespace

namespace {

void known_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw SynthError(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

}  // namespace

SynthConfig SynthConfig::from_json(const json& j) {
    SynthConfig c;
    if (!j.is_object()) throw SynthError("synth config must be a JSON object");
    known_keys(j,
               {"seed", "judicial_counts", "legislative_counts", "judicial_branching",
                "legislative_branching", "references", "planted"},
               "synth config");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    auto counts = [](const json& arr, std::size_t n, const char* what) {
        if (!arr.is_array() || arr.size() != n)
            throw SynthError(std::string(what) + " must list exactly " + std::to_string(n) +
                             " level counts");
        std::vector<std::int64_t> out;
        for (const auto& v : arr) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                throw SynthError(std::string(what) + " entries must be integers >= 0");
            out.push_back(v.get<std::int64_t>());
        }
        return out;
    };
    if (j.contains("judicial_counts"))
        c.judicial_counts = counts(j.at("judicial_counts"), kJudicialDepth, "judicial_counts");
    if (j.contains("legislative_counts"))
        c.legislative_counts =
            counts(j.at("legislative_counts"), kLegislativeDepth, "legislative_counts");
    auto branching = [](const json& b, std::int64_t& lo, std::int64_t& hi, const char* what) {
        if (!b.is_object())
            throw SynthError(std::string(what) + " must be {\"min\":..,\"max\":..}");
        known_keys(b, {"min", "max"}, what);
        if (b.contains("min")) lo = b.at("min").get<std::int64_t>();
        if (b.contains("max")) hi = b.at("max").get<std::int64_t>();
        if (lo < 0 || hi < lo) throw SynthError(std::string(what) + ": need 0 <= min <= max");
    };
    if (j.contains("judicial_branching"))
        branching(j.at("judicial_branching"), c.judicial_branch_min, c.judicial_branch_max,
                  "judicial_branching");
    if (j.contains("legislative_branching"))
        branching(j.at("legislative_branching"), c.legislative_branch_min,
                  c.legislative_branch_max, "legislative_branching");
    if (j.contains("references")) {
        const json& r = j.at("references");
        known_keys(r, {"total", "multiplicity", "rank_fractions"}, "references");
        if (r.contains("total")) {
            c.reference_total = r.at("total").get<std::int64_t>();
            if (c.reference_total < 0) throw SynthError("references.total must be >= 0");
        }
        if (r.contains("multiplicity")) {
            const json& m = r.at("multiplicity");
            known_keys(m, {"min", "max"}, "references.multiplicity");
            if (m.contains("min")) c.multiplicity_min = m.at("min").get<std::int64_t>();
            if (m.contains("max")) c.multiplicity_max = m.at("max").get<std::int64_t>();
            if (c.multiplicity_min < 1 || c.multiplicity_max < c.multiplicity_min)
                throw SynthError("references.multiplicity: need 1 <= min <= max");
        }
        if (r.contains("rank_fractions")) {
            const json& f = r.at("rank_fractions");
            if (!f.is_array() || f.size() != kLegislativeDepth)
                throw SynthError("references.rank_fractions must list 5 fractions");
            c.rank_fractions.clear();
            for (const auto& v : f)
                c.rank_fractions.push_back(parse_fraction(v, "rank_fractions"));
        }
    }
    if (j.contains("planted")) {
        const json& p = j.at("planted");
        known_keys(p, {"procedural", "cluster"}, "planted");
        if (p.contains("procedural") && !p.at("procedural").is_null()) {
            const json& q = p.at("procedural");
            known_keys(q, {"target", "decision_fraction", "max_mentions"}, "procedural");
            PlantedProcedural proc;
            if (q.contains("target")) proc.target = q.at("target").get<std::string>();
            if (q.contains("decision_fraction"))
                proc.decision_fraction =
                    parse_fraction(q.at("decision_fraction"), "decision_fraction");
            if (q.contains("max_mentions")) proc.max_mentions = q.at("max_mentions").get<int>();
            if (proc.max_mentions < 1) throw SynthError("procedural.max_mentions must be >= 1");
            if (proc.decision_fraction < Rational(0) || proc.decision_fraction > Rational(1))
                throw SynthError("procedural.decision_fraction must lie in [0, 1]");
            c.procedural = std::move(proc);
        }
        if (p.contains("cluster") && !p.at("cluster").is_null()) {
            const json& q = p.at("cluster");
            known_keys(q, {"sections", "paragraphs"}, "cluster");
            PlantedCluster cl;
            if (q.contains("sections")) cl.sections = q.at("sections").get<int>();
            if (q.contains("paragraphs")) cl.paragraphs = q.at("paragraphs").get<int>();
            if (cl.sections < 2 || cl.paragraphs < 1)
                throw SynthError("cluster needs sections >= 2 and paragraphs >= 1");
            c.cluster = cl;
        }
    }
    return c;
}

SynthResult generate_synthetic(const SynthConfig& config) {
    if (config.judicial_counts.size() != kJudicialDepth ||
        config.legislative_counts.size() != kLegislativeDepth)
        throw SynthError("level count vectors must cover every rank");

    Rng rng(config.seed);
    CorpusBuilder builder;

    struct LevelPlan {
        const char* prefix;
        std::int64_t count;
    };
    const LevelPlan judicial[] = {{"C", config.judicial_counts[0]},
                                  {"P", config.judicial_counts[1]},
                                  {"D", config.judicial_counts[2]},
                                  {"Q", config.judicial_counts[3]}};
    const LevelPlan legislative[] = {{"T", config.legislative_counts[0]},
                                     {"S", config.legislative_counts[1]},
                                     {"U", config.legislative_counts[2]},
                                     {"V", config.legislative_counts[3]},
                                     {"W", config.legislative_counts[4]}};

    std::vector<std::vector<std::string>> jids(kJudicialDepth), lids(kLegislativeDepth);
    std::map<std::string, std::string> parent_of;  // "" for roots

    auto build_branch = [&](Branch branch, const LevelPlan* plan, int depth,
                            std::vector<std::vector<std::string>>& ids, std::int64_t lo,
                            std::int64_t hi) {
        for (int level = 0; level < depth; ++level) {
            std::int64_t n = plan[level].count;
            for (std::int64_t i = 1; i <= n; ++i)
                ids[level].push_back(padded(plan[level].prefix, i, n));
            if (level == 0) {
                for (std::int64_t i = 0; i < n; ++i) {
                    std::map<std::string, std::string> attrs;
                    std::string label = ids[level][i];
                    if (branch == Branch::judicial)
                        attrs["kind"] = (i % 2 == 0) ? "ordinary" : "specialized";
                    else
                        label = "G" + std::to_string(i + 1);  // statute abbreviation
                    parent_of[ids[level][i]] = "";
                    builder.add_node(ids[level][i], branch, level + 1, "", label,
                                     std::move(attrs));
                }
                continue;
            }
            auto assignment = assign_parents(rng, n, plan[level - 1].count, lo, hi,
                                             rank_name(branch, level + 1));
            std::vector<std::int64_t> position(plan[level - 1].count, 0);
            for (std::int64_t i = 0; i < n; ++i) {
                const std::string& parent = ids[level - 1][assignment[i]];
                parent_of[ids[level][i]] = parent;
                builder.add_node(ids[level][i], branch, level + 1, parent,
                                 std::to_string(++position[assignment[i]]));
            }
        }
    };

    build_branch(Branch::judicial, judicial, kJudicialDepth, jids, config.judicial_branch_min,
                 config.judicial_branch_max);
    build_branch(Branch::legislative, legislative, kLegislativeDepth, lids,
                 config.legislative_branch_min, config.legislative_branch_max);

    // planted target resolution happens before background generation so the
    // norm's subtree can be kept out of the background pools
    std::string proc_id;
    if (config.procedural) {
        if (!config.procedural->target.empty()) {
            proc_id = config.procedural->target;
            if (std::find(lids[1].begin(), lids[1].end(), proc_id) == lids[1].end())
                throw SynthError("procedural target '" + proc_id +
                                 "' is not a generated section");
        } else {
            if (lids[1].empty())
                throw SynthError("procedural pattern needs at least one section");
            proc_id = lids[1].front();
        }
    }
    auto in_proc_subtree = [&](const std::string& id) {
        if (proc_id.empty()) return false;
        for (std::string cur = id; !cur.empty();) {
            if (cur == proc_id) return true;
            auto it = parent_of.find(cur);
            if (it == parent_of.end()) break;
            cur = it->second;
        }
        return false;
    };

    std::map<std::string, int> para_refs;  // background + cluster presence

    // background references: exact rank apportionment by largest remainder
    if (config.reference_total > 0) {
        if (config.rank_fractions.size() != kLegislativeDepth)
            throw SynthError("rank_fractions must cover 5 ranks");
        Rational sum;
        for (const auto& f : config.rank_fractions) {
            if (f < Rational(0)) throw SynthError("rank fractions must be >= 0");
            sum += f;
        }
        if (sum != Rational(1)) throw SynthError("rank fractions must sum to exactly 1");
        if (jids[3].empty()) throw SynthError("references need paragraphs");

        std::vector<std::vector<const std::string*>> pools(kLegislativeDepth);
        for (int level = 0; level < kLegislativeDepth; ++level)
            for (const std::string& id : lids[level])
                if (!in_proc_subtree(id)) pools[level].push_back(&id);

        Rational total(static_cast<long>(config.reference_total));
        std::vector<std::int64_t> per_rank(kLegislativeDepth);
        std::vector<std::pair<Rational, int>> remainders;
        std::int64_t assigned = 0;
        for (int r = 0; r < kLegislativeDepth; ++r) {
            Rational exact = total * config.rank_fractions[r];
            per_rank[r] = exact.floor_long();
            assigned += per_rank[r];
            remainders.emplace_back(exact - Rational(per_rank[r]), r);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return b.first < a.first; });
        for (std::int64_t left = config.reference_total - assigned; left > 0; --left)
            per_rank[remainders[static_cast<std::size_t>(left - 1) % kLegislativeDepth].second] += 1;

        for (int r = 0; r < kLegislativeDepth; ++r) {
            std::int64_t remaining = per_rank[r];
            if (remaining > 0 && pools[r].empty())
                throw SynthError(std::string("rank fraction for ") +
                                 rank_name(Branch::legislative, r + 1) +
                                 " has no target nodes");
            while (remaining > 0) {
                std::int64_t hi = std::min(config.multiplicity_max, remaining);
                std::int64_t lo = std::min(config.multiplicity_min, hi);
                std::int64_t m = rng.between(lo, hi);
                const std::string& q =
                    jids[3][static_cast<std::size_t>(rng.below(jids[3].size()))];
                const std::string& t =
                    *pools[r][static_cast<std::size_t>(rng.below(pools[r].size()))];
                builder.add_ref(q, t, m);
                para_refs[q] += 1;
                remaining -= m;
            }
        }
    }

    // substantive cluster: a fixed section set co-referenced inside the same
    // paragraphs
    std::vector<std::string> cluster_ids;
    std::set<std::string> cluster_paragraphs;
    if (config.cluster) {
        std::vector<std::string> sections;
        for (const std::string& id : lids[1])
            if (id != proc_id) sections.push_back(id);
        if (static_cast<std::int64_t>(sections.size()) < config.cluster->sections)
            throw SynthError("cluster wants more sections than the corpus offers");
        if (static_cast<std::int64_t>(jids[3].size()) < config.cluster->paragraphs)
            throw SynthError("cluster wants more paragraphs than the corpus offers");
        rng.shuffle(sections);
        cluster_ids.assign(sections.begin(), sections.begin() + config.cluster->sections);
        std::sort(cluster_ids.begin(), cluster_ids.end());
        std::vector<std::string> hosts = jids[3];
        rng.shuffle(hosts);
        hosts.resize(static_cast<std::size_t>(config.cluster->paragraphs));
        for (const std::string& q : hosts) {
            cluster_paragraphs.insert(q);
            for (const std::string& s : cluster_ids) {
                builder.add_ref(q, s, 1);
                para_refs[q] += 1;
            }
        }
    }

    // procedural norm: near-universal decision coverage, at most max_mentions
    // mentions per decision, placed away from the cluster and preferring
    // otherwise reference-free paragraphs
    if (!proc_id.empty()) {
        std::map<std::string, std::vector<std::string>> paragraphs_of;
        for (const std::string& q : jids[3]) paragraphs_of[parent_of[q]].push_back(q);
        std::int64_t decisions = static_cast<std::int64_t>(jids[2].size());
        long covered =
            (config.procedural->decision_fraction * Rational(static_cast<long>(decisions)))
                .ceil_long();
        std::vector<std::string> chosen = jids[2];
        rng.shuffle(chosen);
        if (covered > decisions) covered = decisions;
        chosen.resize(static_cast<std::size_t>(covered));
        for (const std::string& d : chosen) {
            std::vector<std::string> cand;
            for (const std::string& q : paragraphs_of[d])
                if (!cluster_paragraphs.count(q)) cand.push_back(q);
            if (cand.empty())
                throw SynthError("decision " + d +
                                 " has no paragraph free of the cluster for the norm");
            std::vector<std::string> fresh;
            for (const std::string& q : cand)
                if (para_refs[q] == 0) fresh.push_back(q);
            std::int64_t mentions = rng.between(1, config.procedural->max_mentions);
            for (std::int64_t m = 0; m < mentions; ++m) {
                std::string q;
                if (!fresh.empty()) {
                    std::size_t pick = static_cast<std::size_t>(rng.below(fresh.size()));
                    q = fresh[pick];
                    fresh[pick] = fresh.back();
                    fresh.pop_back();
                } else {
                    q = cand[static_cast<std::size_t>(rng.below(cand.size()))];
                }
                builder.add_ref(q, proc_id, 1);
                para_refs[q] += 1;
            }
        }
    }

    SynthResult result;
    result.net = std::move(builder).build();
    result.procedural_id = proc_id;
    result.cluster_ids = std::move(cluster_ids);
    return result;
}

}  // namespace lexnet::io
