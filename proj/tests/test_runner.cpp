#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#ifndef LEXNET_DATA_DIR
#error "LEXNET_DATA_DIR must point at the checked-in corpus fixtures"
#endif

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"
#include "lexnet/corpus_io.hpp"
#include "lexnet/emit.hpp"
#include "lexnet/filter.hpp"
#include "lexnet/metrics.hpp"
#include "lexnet/projection.hpp"
#include "lexnet/runner.hpp"
#include "support/testutil.hpp"

using namespace lexnet;
using namespace lexnet::io;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

fs::path data_path(const char* name) { return fs::path(LEXNET_DATA_DIR) / name; }

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

/// Fresh directory under the system temp root, removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = fs::temp_directory_path() /
               ("lexnet_runner_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

json t1_run_config() {
    json cfg;
    cfg["corpus"] = data_path("t1.jsonl").string();
    cfg["split_mode"] = "per_child";
    cfg["grid"] = json::object();
    cfg["projections"] = json::array(
        {json{{"side", "legislative"}, {"mode", "unit_count"}, {"witness_rank", 3}},
         json{{"side", "legislative"}, {"mode", "unit_count"}, {"witness_rank", 4}},
         json{{"side", "legislative"},
              {"mode", "combined"},
              {"witness_rank", 4},
              {"k", {1, 2}}}});
    cfg["strengths"] = json::array(
        {json{{"direction", "incoming"}, {"normalization", "sum"}},
         json{{"direction", "outgoing"}, {"normalization", "sum"}}});
    cfg["mean_strengths"] = true;
    cfg["metrics"] = json{
        {"in_degree", true},
        {"decisions_with_at_least", {1, 2}},
        {"overrepresentation", {"1/4"}},
        {"rank_compare", {{"top_n", 3}, {"tables", {"in_degree", "d_at_least_1"}}}},
        {"source_distributions",
         json::array({json{{"focal", "A1"}, {"group_rank", 1}, {"normalization", "corpus_total"}}})},
        {"target_distributions", {"A1"}}};
    cfg["emit"] =
        json{{"format", "csv"}, {"digits", 6}, {"bipartite", true}, {"leaf_masses", true}};
    return cfg;
}

RunError::Kind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const RunError& e) {
        return e.kind();
    }
    FAIL("expected a RunError");
    return RunError::Kind::domain;
}

}  // namespace

TEST_CASE("format names round trip") {
    CHECK(parse_format("csv") == Format::csv);
    CHECK(parse_format("json") == Format::json);
    CHECK(to_string(Format::csv) == std::string("csv"));
    CHECK(to_string(Format::json) == std::string("json"));
    CHECK_THROWS_AS(parse_format("yaml"), std::invalid_argument);
}

TEST_CASE("csv fields quote separators and embedded quotes") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("") == "");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
    CHECK(csv_field("cr\rhere") == "\"cr\rhere\"");
}

TEST_CASE("sha256 matches the published vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("file writes land atomically under the final name") {
    TempDir tmp;
    fs::path target = tmp.path / "out.txt";
    write_file(target, "first\n");
    CHECK(slurp_file(target) == "first\n");
    write_file(target, "second\n");
    CHECK(slurp_file(target) == "second\n");
    CHECK_FALSE(fs::exists(tmp.path / "out.txt.tmp"));
}

TEST_CASE("rank tables render to csv and json") {
    BaseNetwork t1 = testutil::make_t1();
    NetworkSpace space(t1);
    RankTable t = in_degree(space, 2);

    CHECK(render_rank_table(t1, t, {Format::csv, 6}) ==
          "id,label,value_num,value_den,value_float,rank\n"
          "A1,433,3,1,3.000000,1\n"
          "A2,434,2,1,2.000000,2\n"
          "B1,154,1,1,1.000000,3\n");
    CHECK(render_rank_table(t1, t, {Format::csv, 2}).find("3.00,1") != std::string::npos);

    json doc = json::parse(render_rank_table(t1, t, {Format::json, 6}));
    CHECK(doc["metric"] == "in_degree@section");
    CHECK(doc["tie_rule"] == "value_desc_id_asc");
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["rows"][0]["id"] == "A1");
    CHECK(doc["rows"][0]["label"] == "433");
    CHECK(doc["rows"][0]["value_num"] == "3");
    CHECK(doc["rows"][0]["value_den"] == "1");
    CHECK(doc["rows"][0]["value_float"] == "3.000000");
    CHECK(doc["rows"][0]["rank"] == 1);
}

TEST_CASE("distribution and comparison renders carry nulls for undefined values") {
    CorpusBuilder b;
    b.add_node("S", Branch::legislative, 1);
    b.add_node("S1", Branch::legislative, 2, "S");
    BaseNetwork bare = std::move(b).build();
    TargetDistribution dist = target_distribution(bare, bare.require("S"));
    std::string csv = render_target_distribution(bare, dist, {Format::csv, 6});
    CHECK(csv ==
          "id,label,value_num,value_den,value_float,rank\n"
          "S,,null,null,null,null\n"
          "S1,,null,null,null,null\n");
    json jdoc = json::parse(render_target_distribution(bare, dist, {Format::json, 6}));
    CHECK(jdoc["focal"] == "S");
    CHECK(jdoc["total"] == 0);
    CHECK(jdoc["rows"][0]["value_num"].is_null());
    CHECK(jdoc["rows"][0]["direct"] == 0);

    BaseNetwork t1 = testutil::make_t1();
    NetworkSpace space(t1);
    SourceDistribution sd = source_distribution(space, t1.require("A1"), GroupBy{1},
                                                ShareNormalization::corpus_total);
    CHECK(render_source_distribution(t1, sd, {Format::csv, 6}) ==
          "id,label,value_num,value_den,value_float,rank\n"
          "C1,C1,1,1,1.000000,1\n");
    json sj = json::parse(render_source_distribution(t1, sd, {Format::json, 6}));
    CHECK(sj["focal"] == "A1");
    CHECK(sj["normalization"] == "corpus_total");

    std::vector<RankTable> tables{in_degree(space, 2), decisions_with_at_least(space, 2, 1)};
    CompareReport report = rank_compare(tables, 1);
    std::string cmp = render_compare(t1, report, tables, {Format::csv, 6});
    CHECK(cmp ==
          "id,label,value_num,value_den,value_float,rank,metric\n"
          "A1,433,3,1,3.000000,1,in_degree@section\n"
          "A1,433,2,1,2.000000,1,decisions_at_least@section_k1\n");
}

TEST_CASE("strength and mean strength renders") {
    BaseNetwork t1 = testutil::make_t1();
    NetworkSpace space(t1);
    ProjectedGraph g = project(space, Perspective{3, 2}, WeightingSpec{});

    StrengthMatrix m = strength(g, StrengthDirection::incoming, Normalization::sum);
    CHECK(render_strength(t1, m, {Format::csv, 6}) ==
          "# strength direction=incoming normalization=sum\n"
          "i,j,value_num,value_den,value_float\n"
          "A1,A2,2,3,0.666667\n"
          "A1,B1,1,3,0.333333\n"
          "A2,A1,2,3,0.666667\n"
          "A2,B1,1,3,0.333333\n"
          "B1,A1,1,2,0.500000\n"
          "B1,A2,1,2,0.500000\n");

    // isolated carrier: flagged in the header comment, null mean rows
    CorpusBuilder b;
    b.add_node("C1", Branch::judicial, 1);
    b.add_node("P1", Branch::judicial, 2, "C1");
    b.add_node("D1", Branch::judicial, 3, "P1");
    b.add_node("q1", Branch::judicial, 4, "D1");
    b.add_node("q2", Branch::judicial, 4, "D1");
    b.add_node("S", Branch::legislative, 1);
    b.add_node("X", Branch::legislative, 2, "S");
    b.add_node("Y", Branch::legislative, 2, "S");
    b.add_node("Z", Branch::legislative, 2, "S");
    b.add_ref("q1", "X", 1);
    b.add_ref("q1", "Y", 1);
    b.add_ref("q2", "Z", 1);
    BaseNetwork net = std::move(b).build();
    NetworkSpace ns(net);
    ProjectedGraph pg = project(ns, Perspective{3, 2}, WeightingSpec{});
    StrengthMatrix sm = strength(pg, StrengthDirection::outgoing, Normalization::sum);
    std::string rendered = render_strength(net, sm, {Format::csv, 6});
    CHECK(rendered.find("# zero_rows=Z\n") != std::string::npos);

    std::vector<MeanStrength> ms = mean_strengths(pg);
    std::string means = render_mean_strengths(net, ms, StrengthDirection::incoming,
                                              {Format::csv, 6});
    CHECK(means ==
          "id,label,value_num,value_den,value_float,rank\n"
          "X,,1,1,1.000000,1\n"
          "Y,,1,1,1.000000,2\n"
          "Z,,null,null,null,null\n");
}

TEST_CASE("leaf masses render as json lines in table order") {
    BaseNetwork t1 = testutil::make_t1();
    NetworkSpace space(t1);
    CHECK(render_leaf_masses(t1, space.leaf_table()) ==
          R"({"source":"q1","anchor":"A2","proxy":true,"mass_num":"1","mass_den":"1"})" "\n"
          R"({"source":"q1","anchor":"A1a","proxy":false,"mass_num":"1","mass_den":"1"})" "\n"
          R"({"source":"q2","anchor":"A1a","proxy":false,"mass_num":"1","mass_den":"2"})" "\n"
          R"({"source":"q2","anchor":"A1b","proxy":false,"mass_num":"1","mass_den":"2"})" "\n"
          R"({"source":"q3","anchor":"A2","proxy":true,"mass_num":"1","mass_den":"1"})" "\n"
          R"({"source":"q3","anchor":"B1","proxy":true,"mass_num":"1","mass_den":"1"})" "\n"
          R"({"source":"q3","anchor":"A1b","proxy":false,"mass_num":"1","mass_den":"1"})" "\n");
}

TEST_CASE("edge lists render to csv and json lines") {
    BaseNetwork t1 = testutil::make_t1();
    NetworkSpace space(t1);
    BipartiteNetwork net = derive(space, Perspective{3, 2});
    CHECK(render_bipartite(t1, net, {Format::csv, 6}) ==
          "left,right,weight_num,weight_den\n"
          "D1,A1,2,1\n"
          "D1,A2,1,1\n"
          "D2,A1,1,1\n"
          "D2,A2,1,1\n"
          "D2,B1,1,1\n");
    std::string jsonl = render_bipartite(t1, net, {Format::json, 6});
    CHECK(jsonl.substr(0, jsonl.find('\n')) ==
          R"({"left":"D1","right":"A1","weight_num":"2","weight_den":"1"})");

    ProjectedGraph g = project(space, Perspective{3, 2}, WeightingSpec{});
    CHECK(render_projection(g, {Format::csv, 6}) ==
          "i,j,weight_num,weight_den\n"
          "A1,A2,2,1\n"
          "A1,B1,1,1\n"
          "A2,B1,1,1\n");
    std::string pj = render_projection(g, {Format::json, 6});
    CHECK(pj.substr(0, pj.find('\n')) ==
          R"({"i":"A1","j":"A2","weight_num":"2","weight_den":"1"})");
}

TEST_CASE("slugs name perspectives and weightings stably") {
    Perspective p{3, 2};
    CHECK(perspective_slug(p) == "decision__section");
    p.judicial_filter = pass_all_filter();  // pass-all contributes no suffix
    CHECK(perspective_slug(p) == "decision__section");
    p.judicial_filter = make_ancestor_in({"D1"});
    p.judicial_filter_index = 2;
    CHECK(perspective_slug(p) == "decision__section__jf2");
    p.legislative_filter = make_rank_eq(2);
    p.legislative_filter_index = 0;
    CHECK(perspective_slug(p) == "decision__section__jf2__lf0");

    WeightingSpec w;
    CHECK(weighting_slug(w) == "legislative__unit_count__w4");
    w.witness_rank = 3;
    CHECK(weighting_slug(w) == "legislative__unit_count__w3");
    w.mode = WeightMode::combined;
    w.witness_rank = 4;
    w.k = 2;
    CHECK(weighting_slug(w) == "legislative__combined__w4__k2");
    w.presence = PresenceRule::multiplicity;
    CHECK(weighting_slug(w) == "legislative__combined__w4__k2__mult");
    WeightingSpec j;
    j.side = ProjectionSide::judicial;
    j.mode = WeightMode::event_count;
    j.witness_rank = 2;
    CHECK(weighting_slug(j) == "judicial__event_count__w2");
}

TEST_CASE("perspective specs are validated") {
    CHECK_NOTHROW(parse_perspective(json{{"judicial_rank", 3}, {"legislative_rank", 2}}));
    CHECK_THROWS_AS(parse_perspective(json::array()), RunError);
    CHECK_THROWS_AS(parse_perspective(json{{"judicial_rank", 3}}), RunError);
    CHECK_THROWS_AS(parse_perspective(json{{"judicial_rank", 5}, {"legislative_rank", 2}}),
                    RunError);
    CHECK_THROWS_AS(parse_perspective(json{{"judicial_rank", 3}, {"legislative_rank", 6}}),
                    RunError);
    CHECK_THROWS_AS(parse_perspective(json{{"judicial_rank", 3}, {"legislative_rank", 2},
                                           {"extra", 1}}),
                    RunError);
    CHECK_THROWS_WITH_AS(
        parse_perspective(json{{"judicial_rank", 3},
                               {"legislative_rank", 2},
                               {"judicial_filter", json{{"op", "nope"}}}}),
        doctest::Contains("judicial_filter"), RunError);

    Perspective p = parse_perspective(json{{"judicial_rank", 1},
                                           {"legislative_rank", 5},
                                           {"legislative_filter", json{{"op", "rank_eq"},
                                                                       {"rank", 2}}}});
    CHECK(p.judicial_rank == 1);
    CHECK(p.legislative_rank == 5);
    CHECK(p.legislative_filter != nullptr);
}

TEST_CASE("weighting specs expand k lists") {
    json spec{{"side", "legislative"}, {"mode", "combined"}, {"witness_rank", 4},
              {"k", {1, 2, 3}}};
    std::vector<WeightingSpec> all = parse_weightings(spec);
    REQUIRE(all.size() == 3);
    CHECK(all[0].k == 1);
    CHECK(all[2].k == 3);
    CHECK(all[1].mode == WeightMode::combined);
    CHECK_THROWS_AS(parse_weighting(spec), RunError);  // single-spec form rejects lists

    WeightingSpec one = parse_weighting(json{{"mode", "event_count"}, {"witness_rank", 2},
                                             {"side", "judicial"}});
    CHECK(one.side == ProjectionSide::judicial);
    CHECK(one.mode == WeightMode::event_count);

    auto reject = [](json j) { CHECK_THROWS_AS(parse_weightings(std::move(j)), RunError); };
    reject(json{{"mode", "unit_count"}, {"witness_rank", 3}, {"k", 2}});
    reject(json{{"mode", "combined"}, {"witness_rank", 4}, {"k", 0}});
    reject(json{{"mode", "combined"}, {"witness_rank", 4}, {"k", json::array()}});
    reject(json{{"mode", "combined"}, {"witness_rank", 4}, {"presence", "odd"}});
    reject(json{{"mode", "mystery"}, {"witness_rank", 3}});
    reject(json{{"side", "middle"}, {"mode", "unit_count"}, {"witness_rank", 3}});
    reject(json{{"mode", "unit_count"}});
    reject(json{{"witness_rank", 3}});
    reject(json{{"mode", "unit_count"}, {"witness_rank", 3}, {"weird", 1}});
}

TEST_CASE("run configs reject contradictions before touching the disk") {
    TempDir tmp;
    RunOptions opts;
    opts.out_dir = tmp.path / "out";
    auto domain = [&](json cfg) {
        CHECK(kind_of([&] { run_config(cfg, opts); }) == RunError::Kind::domain);
        CHECK_FALSE(fs::exists(opts.out_dir));
    };
    json base = t1_run_config();

    json unknown = base;
    unknown["corpse"] = "x";
    domain(unknown);

    json both = base;
    both["synth"] = json::object();
    domain(both);

    json neither = base;
    neither.erase("corpus");
    domain(neither);

    json grid_and_list = base;
    grid_and_list["perspectives"] =
        json::array({json{{"judicial_rank", 3}, {"legislative_rank", 2}}});
    domain(grid_and_list);

    json no_proj = base;
    no_proj.erase("projections");
    domain(no_proj);  // strengths and overrepresentation need projections

    json bad_table = base;
    bad_table["metrics"]["rank_compare"]["tables"] = {"in_degree", "d_at_least_7"};
    domain(bad_table);

    json one_table = base;
    one_table["metrics"]["rank_compare"]["tables"] = {"in_degree"};
    domain(one_table);

    json bad_digits = base;
    bad_digits["emit"]["digits"] = 0;
    domain(bad_digits);

    json bad_format = base;
    bad_format["emit"]["format"] = "xml";
    CHECK_THROWS(run_config(bad_format, opts));

    json bad_mode = base;
    bad_mode["split_mode"] = "halves";
    domain(bad_mode);

    json bad_k = base;
    bad_k["metrics"]["decisions_with_at_least"] = {0};
    domain(bad_k);

    json bad_rank = base;
    bad_rank["grid"] = json{{"judicial_ranks", {9}}};
    domain(bad_rank);

    json missing = base;
    missing["corpus"] = (tmp.path / "absent.jsonl").string();
    CHECK(kind_of([&] { run_config(missing, opts); }) == RunError::Kind::io);
}

TEST_CASE("full runs write every artifact and a faithful manifest") {
    json cfg = t1_run_config();
    TempDir tmp;
    RunOptions opts;
    opts.out_dir = tmp.path / "run1";
    opts.threads = 1;

    RunResult result = run_config(cfg, opts);
    CHECK(result.perspectives == 20);
    CHECK_FALSE(fs::exists(opts.out_dir / "INCOMPLETE"));

    json manifest = json::parse(slurp_file(opts.out_dir / "manifest.json"));
    CHECK(manifest["config_hash"] == sha256_hex(cfg.dump()));
    CHECK(manifest["corpus_hash"] == sha256_hex(slurp_file(data_path("t1.jsonl"))));
    CHECK(manifest["split_mode"] == "per_child");
    CHECK(manifest["network_space"]["perspectives"] == 20);
    CHECK(manifest["network_space"]["bipartite_networks"] == 20);
    CHECK(manifest["network_space"]["one_mode_projections"] == 40);
    CHECK(manifest["network_space"]["total_networks"] == 60);
    CHECK(manifest["files"].size() == result.files);

    // every listed file exists with exactly the recorded bytes
    std::vector<std::string> paths;
    for (const auto& row : manifest["files"]) {
        const std::string rel = row["path"];
        paths.push_back(rel);
        CHECK(sha256_hex(slurp_file(opts.out_dir / rel)) == row["sha256"]);
        if (rel.rfind("corpus_metrics/", 0) == 0 || rel == "leaf_masses.jsonl")
            CHECK(row["perspective"].is_null());
    }
    CHECK(std::is_sorted(paths.begin(), paths.end()));

    // one directory per grid cell, named by its rank pair
    std::set<std::string> expected_dirs;
    for (const char* j : {"court", "panel", "decision", "paragraph"})
        for (const char* l : {"statute", "section", "sub", "sub2", "sub3"})
            expected_dirs.insert(std::string(j) + "__" + l);
    std::set<std::string> seen;
    for (const auto& entry : fs::directory_iterator(opts.out_dir))
        if (entry.is_directory() && entry.path().filename() != "corpus_metrics")
            seen.insert(entry.path().filename().string());
    CHECK(seen == expected_dirs);

    // thread count must not change a single byte
    RunOptions opts4 = opts;
    opts4.out_dir = tmp.path / "run2";
    opts4.threads = 4;
    run_config(cfg, opts4);
    CHECK(slurp_file(opts4.out_dir / "manifest.json") ==
          slurp_file(opts.out_dir / "manifest.json"));
    for (const char* rel : {"leaf_masses.jsonl", "decision__section/in_degree.csv",
                            "paragraph__sub3/bipartite.csv"})
        CHECK(slurp_file(opts4.out_dir / rel) == slurp_file(opts.out_dir / rel));

    // rerunning over a finished tree replaces it cleanly
    RunResult again = run_config(cfg, opts);
    CHECK(again.files == result.files);
    CHECK(manifest == json::parse(slurp_file(opts.out_dir / "manifest.json")));
}

TEST_CASE("output directories are guarded against clobbering foreign files") {
    json cfg = t1_run_config();
    TempDir tmp;

    fs::path alien = tmp.path / "alien";
    fs::create_directories(alien);
    write_file(alien / "notes.txt", "do not delete\n");
    RunOptions opts;
    opts.out_dir = alien;
    CHECK(kind_of([&] { run_config(cfg, opts); }) == RunError::Kind::io);
    CHECK(slurp_file(alien / "notes.txt") == "do not delete\n");

    fs::path file_target = tmp.path / "plain.txt";
    write_file(file_target, "x");
    opts.out_dir = file_target;
    CHECK(kind_of([&] { run_config(cfg, opts); }) == RunError::Kind::io);

    // an aborted run leaves INCOMPLETE behind, which marks the tree reusable
    fs::path aborted = tmp.path / "aborted";
    fs::create_directories(aborted);
    write_file(aborted / "INCOMPLETE", "run in progress\n");
    write_file(aborted / "stale.csv", "old\n");
    opts.out_dir = aborted;
    RunResult r = run_config(cfg, opts);
    CHECK(r.perspectives == 20);
    CHECK_FALSE(fs::exists(aborted / "stale.csv"));
    CHECK_FALSE(fs::exists(aborted / "INCOMPLETE"));
}

TEST_CASE("a failure during emission leaves the INCOMPLETE marker") {
    json cfg = t1_run_config();
    cfg["metrics"]["source_distributions"][0]["focal"] = "nope";
    TempDir tmp;
    RunOptions opts;
    opts.out_dir = tmp.path / "out";
    CHECK(kind_of([&] { run_config(cfg, opts); }) == RunError::Kind::domain);
    CHECK(fs::exists(opts.out_dir / "INCOMPLETE"));

    // the marked tree is reusable by the next run
    RunResult r = run_config(t1_run_config(), opts);
    CHECK(r.perspectives == 20);
    CHECK_FALSE(fs::exists(opts.out_dir / "INCOMPLETE"));
}

TEST_CASE("single shot derivation, projection, and metrics") {
    TempDir tmp;
    json base;
    base["corpus"] = data_path("t1.jsonl").string();
    base["perspective"] = json{{"judicial_rank", 3}, {"legislative_rank", 2}};

    RunOptions opts;
    opts.out_dir = tmp.path / "derive";
    fs::path out = derive_once(base, opts);
    CHECK(out.filename() == "bipartite__decision__section.csv");
    CHECK(slurp_file(out) ==
          "left,right,weight_num,weight_den\n"
          "D1,A1,2,1\n"
          "D1,A2,1,1\n"
          "D2,A1,1,1\n"
          "D2,A2,1,1\n"
          "D2,B1,1,1\n");
    CHECK_FALSE(fs::exists(opts.out_dir / "corpus.jsonl"));  // file corpora are not copied

    json proj = base;
    proj["projection"] = json{{"side", "legislative"}, {"mode", "unit_count"},
                              {"witness_rank", 3}};
    opts.out_dir = tmp.path / "project";
    out = project_once(proj, opts);
    CHECK(out.filename() == "projection__decision__section__legislative__unit_count__w3.csv");
    CHECK(slurp_file(out) ==
          "i,j,weight_num,weight_den\n"
          "A1,A2,2,1\n"
          "A1,B1,1,1\n"
          "A2,B1,1,1\n");

    json metric = base;
    metric["metric"] = json{{"name", "in_degree"}};
    opts.out_dir = tmp.path / "metric";
    out = metric_once(metric, opts);
    CHECK(out.filename() == "in_degree__decision__section.csv");
    CHECK(slurp_file(out).find("A1,433,3,1") != std::string::npos);

    metric["metric"] = json{{"name", "decisions_with_at_least"}, {"k", 2}};
    out = metric_once(metric, opts);
    CHECK(out.filename() == "d_at_least_2__decision__section.csv");

    metric["metric"] = json{{"name", "overrepresentation"}, {"threshold", "1/4"}};
    metric["projection"] = proj["projection"];
    out = metric_once(metric, opts);
    CHECK(out.filename() == "overrep__decision__section__legislative__unit_count__w3__t1_4.csv");
    CHECK(slurp_file(out).find("A1,433,2,3") != std::string::npos);

    json dist;
    dist["corpus"] = base["corpus"];
    dist["metric"] = json{{"name", "source_distribution"}, {"focal", "A1"}, {"group_rank", 1}};
    out = metric_once(dist, opts);
    CHECK(out.filename() == "source_distribution__A1__rank_court.csv");

    dist["metric"] = json{{"name", "target_distribution"}, {"focal", "A1"}};
    out = metric_once(dist, opts);
    CHECK(out.filename() == "target_distribution__A1.csv");

    dist["metric"] = json{{"name", "who_knows"}};
    CHECK_THROWS_WITH_AS(metric_once(dist, opts), doctest::Contains("unknown metric"),
                         RunError);
    dist["metric"] = json{{"name", "decisions_with_at_least"}};
    CHECK_THROWS_AS(metric_once(dist, opts), RunError);  // no k, no perspective

    // one config carrying every section serves all three commands
    json shared = proj;
    shared["metric"] = json{{"name", "in_degree"}};
    opts.out_dir = tmp.path / "shared";
    CHECK(derive_once(shared, opts).filename() == "bipartite__decision__section.csv");
    CHECK(project_once(shared, opts).filename() ==
          "projection__decision__section__legislative__unit_count__w3.csv");
    CHECK(metric_once(shared, opts).filename() == "in_degree__decision__section.csv");

    json bad = base;
    bad.erase("perspective");
    CHECK_THROWS_WITH_AS(derive_once(bad, opts), doctest::Contains("perspective"), RunError);
    CHECK_THROWS_AS(project_once(base, opts), RunError);  // projection missing
    bad = base;
    bad["weighting"] = json::object();  // unknown section names still fail fast
    CHECK_THROWS_WITH_AS(derive_once(bad, opts), doctest::Contains("weighting"), RunError);
}

TEST_CASE("synthetic runs honor seed and format overrides") {
    json cfg;
    cfg["synth"] = json{{"seed", 1},
                        {"judicial_counts", {1, 1, 2, 8}},
                        {"legislative_counts", {1, 3, 0, 0, 0}},
                        {"references",
                         {{"total", 12}, {"rank_fractions", {"0", "1", "0", "0", "0"}}}}};
    cfg["grid"] = json{{"judicial_ranks", {3}}, {"legislative_ranks", {2}}};
    cfg["metrics"] = json{{"in_degree", true}};
    cfg["emit"] = json{{"format", "csv"}};

    TempDir tmp;
    RunOptions opts;
    opts.out_dir = tmp.path / "a";
    opts.seed = 99;
    RunResult r = run_config(cfg, opts);
    CHECK(r.perspectives == 1);
    CHECK(r.files == 2);  // corpus.jsonl + one in_degree table

    SynthConfig sc = SynthConfig::from_json(cfg["synth"]);
    sc.seed = 99;
    CHECK(slurp_file(opts.out_dir / "corpus.jsonl") ==
          corpus_to_string(generate_synthetic(sc).net));

    // the seed override lands in the hashed config, keying the cache honestly
    json manifest = json::parse(slurp_file(opts.out_dir / "manifest.json"));
    json overridden = cfg;
    overridden["synth"]["seed"] = 99;
    CHECK(manifest["config_hash"] == sha256_hex(overridden.dump()));

    opts.out_dir = tmp.path / "b";
    opts.format = Format::json;
    run_config(cfg, opts);
    CHECK(fs::exists(opts.out_dir / "decision__section/in_degree.json"));
    CHECK_FALSE(fs::exists(opts.out_dir / "decision__section/in_degree.csv"));

    // single-shot synthetic outputs keep the generated corpus beside them
    json once;
    once["synth"] = cfg["synth"];
    once["perspective"] = json{{"judicial_rank", 3}, {"legislative_rank", 2}};
    opts.out_dir = tmp.path / "c";
    opts.format.reset();
    opts.seed.reset();
    derive_once(once, opts);
    CHECK(fs::exists(opts.out_dir / "corpus.jsonl"));
}
