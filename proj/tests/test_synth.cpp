#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexnet/corpus_io.hpp"
#include "lexnet/synth.hpp"
#include "support/testutil.hpp"

using namespace lexnet;
using lexnet::io::Rng;
using lexnet::io::SynthConfig;
using lexnet::io::SynthError;
using lexnet::io::SynthResult;
using nlohmann::json;

namespace {

/// multiplicity toward `target_id`, keyed by referencing paragraph id
std::map<std::string, std::int64_t> mentions_by_paragraph(const BaseNetwork& net,
                                                          const std::string& target_id) {
    std::map<std::string, std::int64_t> out;
    NodeIndex target = net.require(target_id);
    for (const RefEdge& r : net.refs())
        if (r.target == target) out[net.node(r.source).id] += r.multiplicity;
    return out;
}

std::string decision_of(const BaseNetwork& net, const std::string& paragraph_id) {
    return net.node(net.node(net.require(paragraph_id)).parent).id;
}

}  // namespace

TEST_CASE("bounded draws stay in range and shuffles permute") {
    Rng rng(5);
    CHECK(rng.below(1) == 0);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 400; ++i) {
        std::int64_t v = rng.between(-2, 3);
        CHECK(v >= -2);
        CHECK(v <= 3);
        seen.insert(v);
    }
    CHECK(seen.size() == 6);  // every value of a six-wide range shows up

    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> shuffled = v;
    rng.shuffle(shuffled);
    std::sort(shuffled.begin(), shuffled.end());
    CHECK(shuffled == v);

    Rng a(77), b(77);
    for (int i = 0; i < 50; ++i) CHECK(a.below(1000) == b.below(1000));
}

TEST_CASE("generation is deterministic in the seed") {
    SynthConfig cfg;
    cfg.seed = 42;
    SynthResult first = generate_synthetic(cfg);
    SynthResult second = generate_synthetic(cfg);
    CHECK(io::corpus_to_string(first.net) == io::corpus_to_string(second.net));

    cfg.seed = 43;
    SynthResult other = generate_synthetic(cfg);
    CHECK(io::corpus_to_string(first.net) != io::corpus_to_string(other.net));
}

TEST_CASE("generated corpora honor the configured shape") {
    SynthConfig cfg;
    cfg.seed = 9;
    SynthResult r = generate_synthetic(cfg);
    const BaseNetwork& net = r.net;

    CHECK(net.validate().empty());
    CHECK(net.level_count({Branch::judicial, 1}) == 1);
    CHECK(net.level_count({Branch::judicial, 2}) == 2);
    CHECK(net.level_count({Branch::judicial, 3}) == 10);
    CHECK(net.level_count({Branch::judicial, 4}) == 40);
    CHECK(net.level_count({Branch::legislative, 1}) == 2);
    CHECK(net.level_count({Branch::legislative, 2}) == 10);
    CHECK(net.level_count({Branch::legislative, 3}) == 15);
    CHECK(net.level_count({Branch::legislative, 4}) == 5);
    CHECK(net.level_count({Branch::legislative, 5}) == 2);

    // no planted patterns: background mass is the whole corpus
    CHECK(net.total_multiplicity() == cfg.reference_total);
    CHECK(r.procedural_id.empty());
    CHECK(r.cluster_ids.empty());

    // statute roots carry citable abbreviations, courts a kind attribute
    CHECK(net.node(net.require("T1")).label == "G1");
    CHECK(net.node(net.require("T2")).label == "G2");
    CHECK(net.node(net.require("C1")).attributes.at("kind") == "ordinary");

    // default fractions put no background mass on statutes or deepest units
    for (const RefEdge& e : net.refs()) {
        int rank = net.node(e.target).rank;
        CHECK(rank >= 2);
        CHECK(rank <= 4);
    }
}

TEST_CASE("branching bounds are enforced per parent") {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.judicial_counts = {2, 4, 8, 16};
    cfg.judicial_branch_min = 2;
    cfg.judicial_branch_max = 2;
    cfg.reference_total = 0;
    SynthResult r = generate_synthetic(cfg);
    for (int rank = 1; rank <= 3; ++rank)
        for (NodeIndex n : r.net.level_nodes({Branch::judicial, rank}))
            CHECK(r.net.node(n).children.size() == 2);
}

TEST_CASE("infeasible shapes are rejected") {
    SynthConfig base;
    base.reference_total = 0;

    SynthConfig narrow = base;
    narrow.judicial_branch_max = 1;  // 10 decisions cannot hang off 2 panels
    CHECK_THROWS_WITH_AS(generate_synthetic(narrow),
                         doctest::Contains("cannot satisfy per-parent bounds"), SynthError);

    SynthConfig orphan = base;
    orphan.legislative_counts = {0, 2, 0, 0, 0};
    CHECK_THROWS_WITH_AS(generate_synthetic(orphan),
                         doctest::Contains("children without any parent level"), SynthError);

    SynthConfig short_counts = base;
    short_counts.judicial_counts = {1, 2, 10};
    CHECK_THROWS_AS(generate_synthetic(short_counts), SynthError);
}

TEST_CASE("background references need consistent fractions and targets") {
    SynthConfig bad_sum;
    bad_sum.rank_fractions = {Rational(0), Rational(1, 2), Rational(1, 4), Rational(0),
                              Rational(0)};
    CHECK_THROWS_WITH_AS(generate_synthetic(bad_sum),
                         doctest::Contains("sum to exactly 1"), SynthError);

    SynthConfig no_units;
    no_units.legislative_counts = {2, 10, 0, 0, 0};  // default fractions hit rank 3
    CHECK_THROWS_WITH_AS(generate_synthetic(no_units),
                         doctest::Contains("has no target nodes"), SynthError);

    SynthConfig no_paragraphs;
    no_paragraphs.judicial_counts = {1, 1, 1, 0};
    CHECK_THROWS_WITH_AS(generate_synthetic(no_paragraphs),
                         doctest::Contains("references need paragraphs"), SynthError);
}

TEST_CASE("reference totals are exact under multiplicity ranges") {
    SynthConfig cfg;
    cfg.seed = 11;
    cfg.reference_total = 97;
    cfg.multiplicity_min = 2;
    cfg.multiplicity_max = 5;
    SynthResult r = generate_synthetic(cfg);
    CHECK(r.net.total_multiplicity() == 97);
    for (const RefEdge& e : r.net.refs()) {
        CHECK(e.multiplicity >= 1);  // a short tail may dip under the minimum
        // merged duplicates can exceed a single draw, so no per-edge cap check
    }
}

TEST_CASE("planted procedural norm covers the requested decision share") {
    SynthConfig cfg;
    cfg.seed = 21;
    io::PlantedProcedural proc;
    proc.decision_fraction = Rational(1, 2);
    proc.max_mentions = 2;
    cfg.procedural = proc;

    SynthResult r = generate_synthetic(cfg);
    CHECK(r.procedural_id == "S01");  // first generated section by default

    auto mentions = mentions_by_paragraph(r.net, r.procedural_id);
    std::map<std::string, std::int64_t> per_decision;
    std::int64_t planted_total = 0;
    for (const auto& [q, m] : mentions) {
        per_decision[decision_of(r.net, q)] += m;
        planted_total += m;
    }
    CHECK(per_decision.size() == 5);  // ceil(1/2 * 10)
    for (const auto& [d, m] : per_decision) {
        (void)d;
        CHECK(m >= 1);
        CHECK(m <= 2);
    }

    // background kept out of the norm's subtree, so planted mentions account
    // for every bit of mass above the configured background total
    CHECK(r.net.total_multiplicity() == cfg.reference_total + planted_total);

    NodeIndex proc_node = r.net.require(r.procedural_id);
    for (const RefEdge& e : r.net.refs()) {
        bool inside = false;
        for (NodeIndex n : r.net.subtree(proc_node))
            if (n == e.target) inside = true;
        if (inside) CHECK(e.target == proc_node);
    }
}

TEST_CASE("explicit procedural targets are honored and checked") {
    SynthConfig cfg;
    cfg.seed = 21;
    io::PlantedProcedural proc;
    proc.target = "S03";
    cfg.procedural = proc;
    SynthResult r = generate_synthetic(cfg);
    CHECK(r.procedural_id == "S03");
    CHECK_FALSE(mentions_by_paragraph(r.net, "S03").empty());

    cfg.procedural->target = "U01";  // exists, but is not a section
    CHECK_THROWS_WITH_AS(generate_synthetic(cfg),
                         doctest::Contains("not a generated section"), SynthError);
}

TEST_CASE("planted cluster co-locates its sections") {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.reference_total = 0;  // cluster refs only, so hosts are unambiguous
    io::PlantedCluster cluster;
    cluster.sections = 3;
    cluster.paragraphs = 10;
    cfg.cluster = cluster;

    SynthResult r = generate_synthetic(cfg);
    REQUIRE(r.cluster_ids.size() == 3);
    CHECK(std::is_sorted(r.cluster_ids.begin(), r.cluster_ids.end()));
    for (const std::string& s : r.cluster_ids)
        CHECK(r.net.node(r.net.require(s)).rank == 2);

    CHECK(r.net.total_multiplicity() == 30);
    std::map<std::string, std::set<std::string>> hosts;  // paragraph -> sections
    for (const RefEdge& e : r.net.refs()) {
        CHECK(e.multiplicity == 1);
        hosts[r.net.node(e.source).id].insert(r.net.node(e.target).id);
    }
    CHECK(hosts.size() == 10);
    std::set<std::string> want(r.cluster_ids.begin(), r.cluster_ids.end());
    for (const auto& [q, sections] : hosts) {
        (void)q;
        CHECK(sections == want);  // every host carries the full cluster
    }
}

TEST_CASE("procedural mentions stay out of cluster paragraphs") {
    SynthConfig cfg;
    cfg.seed = 13;
    cfg.reference_total = 0;
    io::PlantedProcedural proc;
    proc.decision_fraction = Rational(1);
    cfg.procedural = proc;
    io::PlantedCluster cluster;
    cluster.sections = 3;
    // fewer hosts than any decision has paragraphs, so a free one always exists
    cluster.paragraphs = 3;
    cfg.cluster = cluster;

    SynthResult r = generate_synthetic(cfg);
    CHECK(std::find(r.cluster_ids.begin(), r.cluster_ids.end(), r.procedural_id) ==
          r.cluster_ids.end());

    std::set<std::string> cluster_hosts;
    for (const RefEdge& e : r.net.refs()) {
        const std::string& target = r.net.node(e.target).id;
        if (std::find(r.cluster_ids.begin(), r.cluster_ids.end(), target) !=
            r.cluster_ids.end())
            cluster_hosts.insert(r.net.node(e.source).id);
    }
    for (const auto& [q, m] : mentions_by_paragraph(r.net, r.procedural_id)) {
        (void)m;
        CHECK_FALSE(cluster_hosts.count(q));
    }

    // full coverage: each of the ten decisions mentions the norm somewhere
    std::set<std::string> covered;
    for (const auto& [q, m] : mentions_by_paragraph(r.net, r.procedural_id)) {
        (void)m;
        covered.insert(decision_of(r.net, q));
    }
    CHECK(covered.size() == 10);
}

TEST_CASE("cluster demands fit the corpus") {
    SynthConfig cfg;
    cfg.reference_total = 0;
    io::PlantedCluster cluster;
    cluster.sections = 11;  // only 10 sections exist
    cluster.paragraphs = 2;
    cfg.cluster = cluster;
    CHECK_THROWS_WITH_AS(generate_synthetic(cfg),
                         doctest::Contains("more sections"), SynthError);

    cfg.cluster->sections = 3;
    cfg.cluster->paragraphs = 41;  // only 40 paragraphs exist
    CHECK_THROWS_WITH_AS(generate_synthetic(cfg),
                         doctest::Contains("more paragraphs"), SynthError);
}

TEST_CASE("config parsing accepts exact fractions and rejects floats") {
    json j{{"seed", 5},
           {"judicial_counts", {1, 1, 4, 8}},
           {"legislative_counts", {1, 4, 4, 0, 0}},
           {"references",
            {{"total", 40},
             {"multiplicity", {{"min", 1}, {"max", 3}}},
             {"rank_fractions", {"0", "0.75", "1/4", "0", "0"}}}}};
    SynthConfig c = SynthConfig::from_json(j);
    CHECK(c.seed == 5);
    CHECK(c.judicial_counts == std::vector<std::int64_t>{1, 1, 4, 8});
    CHECK(c.reference_total == 40);
    CHECK(c.multiplicity_max == 3);
    CHECK(c.rank_fractions[1] == Rational(3, 4));
    CHECK(c.rank_fractions[2] == Rational(1, 4));
    CHECK_FALSE(c.procedural.has_value());
    SynthResult r = generate_synthetic(c);
    CHECK(r.net.total_multiplicity() == 40);

    json floats = j;
    floats["references"]["rank_fractions"] = {0.0, 0.75, 0.25, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(SynthConfig::from_json(floats),
                         doctest::Contains("write fractions as strings"), SynthError);

    CHECK(SynthConfig::from_json(json::object()).seed == 1);  // defaults survive
}

TEST_CASE("config parsing validates shapes and bounds") {
    auto reject = [](json j, const char* needle) {
        CHECK_THROWS_WITH_AS(SynthConfig::from_json(std::move(j)), doctest::Contains(needle),
                             SynthError);
    };
    reject(json::array(), "must be a JSON object");
    reject(json{{"judicial_counts", {1, 2, 3}}}, "exactly 4");
    reject(json{{"legislative_counts", {1, 2, 3, 4}}}, "exactly 5");
    reject(json{{"judicial_counts", {1, 2, 3, -1}}}, "integers >= 0");
    reject(json{{"judicial_branching", {{"min", 3}, {"max", 2}}}}, "0 <= min <= max");
    reject(json{{"judicial_branching", 4}}, "must be {\"min\"");
    reject(json{{"references", {{"total", -1}}}}, "must be >= 0");
    reject(json{{"references", {{"multiplicity", {{"min", 0}}}}}}, "1 <= min <= max");
    reject(json{{"references", {{"rank_fractions", {"1", "0"}}}}}, "5 fractions");
    reject(json{{"planted", {{"procedural", {{"max_mentions", 0}}}}}}, "max_mentions");
    reject(json{{"planted", {{"procedural", {{"decision_fraction", "3/2"}}}}}},
           "lie in [0, 1]");
    reject(json{{"planted", {{"cluster", {{"sections", 1}}}}}}, "sections >= 2");
    reject(json{{"planted", {{"cluster", {{"paragraphs", 0}}}}}}, "paragraphs >= 1");

    // a mistyped or misdirected config must not silently become defaults
    reject(json{{"sed", 7}}, "unknown key \"sed\"");
    reject(json{{"corpus", "t1.jsonl"}}, "unknown key \"corpus\"");
    reject(json{{"references", {{"totals", 10}}}}, "unknown key \"totals\"");
    reject(json{{"references", {{"multiplicity", {{"mean", 2}}}}}}, "unknown key \"mean\"");
    reject(json{{"judicial_branching", {{"min", 1}, {"cap", 3}}}}, "unknown key \"cap\"");
    reject(json{{"planted", {{"procedure", json::object()}}}}, "unknown key \"procedure\"");
    reject(json{{"planted", {{"procedural", {{"decisions", 3}}}}}},
           "unknown key \"decisions\"");
    reject(json{{"planted", {{"cluster", {{"size", 3}}}}}}, "unknown key \"size\"");

    json null_planted{{"planted", {{"procedural", nullptr}, {"cluster", nullptr}}}};
    SynthConfig c = SynthConfig::from_json(null_planted);
    CHECK_FALSE(c.procedural.has_value());
    CHECK_FALSE(c.cluster.has_value());
}
