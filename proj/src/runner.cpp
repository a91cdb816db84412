#include "lexnet/runner.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "lexnet/corpus_io.hpp"

namespace lexnet::io {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* table_ext(Format f) { return f == Format::csv ? "csv" : "json"; }
const char* edge_ext(Format f) { return f == Format::csv ? "csv" : "jsonl"; }

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError(RunError::Kind::io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw RunError(RunError::Kind::io, "read failed for " + path.string());
    return std::move(buf).str();
}

void require_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw RunError(RunError::Kind::domain,
                           std::string(where) + ": unknown key '" + key + "'");
    }
}

bool restricts(const FilterPtr& f) { return f && f != pass_all_filter(); }

StrengthDirection parse_direction(const std::string& s) {
    if (s == "incoming") return StrengthDirection::incoming;
    if (s == "outgoing") return StrengthDirection::outgoing;
    throw RunError(RunError::Kind::domain, "unknown strength direction '" + s + "'");
}

Normalization parse_normalization(const std::string& s) {
    if (s == "sum") return Normalization::sum;
    if (s == "max") return Normalization::max;
    throw RunError(RunError::Kind::domain, "unknown normalization '" + s + "'");
}

struct SourceSel {
    std::string focal;
    GroupBy group_by;
    ShareNormalization normalization = ShareNormalization::corpus_total;
    std::string slug;  // file name stem component
};

struct CompareSel {
    int top_n = 0;
    std::vector<std::string> tables;
};

struct StrengthSel {
    StrengthDirection direction;
    Normalization normalization;
};

struct EmitPlan {
    std::vector<Format> formats{Format::csv};
    int digits = 6;
    bool bipartite = false;
    bool leaf_masses = false;
};

struct RunPlan {
    SplitMode mode = SplitMode::per_child;
    std::vector<Perspective> perspectives;
    std::vector<WeightingSpec> weightings;
    std::vector<StrengthSel> strengths;
    bool mean_strengths = false;
    bool in_degree = false;
    std::vector<long> d_at_least;
    std::vector<Rational> overrep_thresholds;
    std::optional<CompareSel> compare;
    std::vector<SourceSel> sources;
    std::vector<std::string> targets;
    EmitPlan emit;
};

FilterPtr parse_filter_checked(const json& spec, const char* where) {
    try {
        return parse_filter(spec);
    } catch (const std::invalid_argument& e) {
        throw RunError(RunError::Kind::domain, std::string(where) + ": " + e.what());
    }
}

std::vector<int> parse_rank_list(const json& j, int depth, const char* what) {
    std::vector<int> out;
    if (!j.is_array() || j.empty())
        throw RunError(RunError::Kind::domain,
                       std::string(what) + " must be a nonempty integer array");
    for (const auto& v : j) {
        if (!v.is_number_integer())
            throw RunError(RunError::Kind::domain, std::string(what) + " entries must be integers");
        int r = v.get<int>();
        if (r < 1 || r > depth)
            throw RunError(RunError::Kind::domain, std::string(what) + ": rank " +
                                                       std::to_string(r) + " out of range");
        out.push_back(r);
    }
    return out;
}

/// Same traversal order as enumerate_grid: judicial rank major, legislative
/// rank, then judicial filter index over legislative filter index.
std::vector<Perspective> grid_perspectives(const json& grid) {
    require_keys(grid, {"judicial_ranks", "legislative_ranks", "judicial_filters",
                        "legislative_filters"},
                 "grid");
    std::vector<int> jranks{1, 2, 3, 4}, lranks{1, 2, 3, 4, 5};
    if (grid.contains("judicial_ranks"))
        jranks = parse_rank_list(grid.at("judicial_ranks"), kJudicialDepth, "judicial_ranks");
    if (grid.contains("legislative_ranks"))
        lranks = parse_rank_list(grid.at("legislative_ranks"), kLegislativeDepth,
                                 "legislative_ranks");
    std::vector<FilterPtr> jfilters{nullptr}, lfilters{nullptr};
    if (grid.contains("judicial_filters")) {
        jfilters.clear();
        for (const auto& spec : grid.at("judicial_filters"))
            jfilters.push_back(parse_filter_checked(spec, "judicial_filters"));
        if (jfilters.empty()) jfilters.push_back(nullptr);
    }
    if (grid.contains("legislative_filters")) {
        lfilters.clear();
        for (const auto& spec : grid.at("legislative_filters"))
            lfilters.push_back(parse_filter_checked(spec, "legislative_filters"));
        if (lfilters.empty()) lfilters.push_back(nullptr);
    }
    std::vector<Perspective> out;
    for (int j : jranks)
        for (int l : lranks)
            for (std::size_t jf = 0; jf < jfilters.size(); ++jf)
                for (std::size_t lf = 0; lf < lfilters.size(); ++lf) {
                    Perspective p;
                    p.judicial_rank = j;
                    p.legislative_rank = l;
                    p.judicial_filter = jfilters[jf];
                    p.legislative_filter = lfilters[lf];
                    p.judicial_filter_index = static_cast<int>(jf);
                    p.legislative_filter_index = static_cast<int>(lf);
                    out.push_back(std::move(p));
                }
    return out;
}

Rational parse_threshold(const json& v) {
    try {
        if (v.is_string()) return Rational::parse(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long>());
    } catch (const std::exception& e) {
        throw RunError(RunError::Kind::domain, std::string("threshold: ") + e.what());
    }
    throw RunError(RunError::Kind::domain,
                   "thresholds must be strings like \"1/4\" or integers");
}

RunPlan parse_plan(const json& config) {
    require_keys(config,
                 {"corpus", "synth", "split_mode", "grid", "perspectives", "projections",
                  "strengths", "mean_strengths", "metrics", "emit"},
                 "config");
    RunPlan plan;
    if (config.contains("split_mode")) {
        const std::string m = config.at("split_mode").get<std::string>();
        if (m == "per_child")
            plan.mode = SplitMode::per_child;
        else if (m == "per_leaf")
            plan.mode = SplitMode::per_leaf;
        else
            throw RunError(RunError::Kind::domain, "unknown split_mode '" + m + "'");
    }
    if (config.contains("grid") && config.contains("perspectives"))
        throw RunError(RunError::Kind::domain,
                       "config may set either 'grid' or 'perspectives', not both");
    if (config.contains("perspectives")) {
        for (const auto& spec : config.at("perspectives"))
            plan.perspectives.push_back(parse_perspective(spec));
        if (plan.perspectives.empty())
            throw RunError(RunError::Kind::domain, "'perspectives' must be nonempty");
    } else {
        plan.perspectives = grid_perspectives(config.value("grid", json::object()));
    }
    if (config.contains("projections")) {
        for (const auto& spec : config.at("projections"))
            for (WeightingSpec& w : parse_weightings(spec)) plan.weightings.push_back(w);
    }
    if (config.contains("strengths")) {
        for (const auto& spec : config.at("strengths")) {
            require_keys(spec, {"direction", "normalization"}, "strengths");
            plan.strengths.push_back(
                {parse_direction(spec.at("direction").get<std::string>()),
                 parse_normalization(spec.at("normalization").get<std::string>())});
        }
    }
    if (config.contains("mean_strengths"))
        plan.mean_strengths = config.at("mean_strengths").get<bool>();
    if ((plan.mean_strengths || !plan.strengths.empty()) && plan.weightings.empty())
        throw RunError(RunError::Kind::domain,
                       "strength emission needs at least one projection");

    if (config.contains("metrics")) {
        const json& m = config.at("metrics");
        require_keys(m,
                     {"in_degree", "decisions_with_at_least", "overrepresentation",
                      "rank_compare", "source_distributions", "target_distributions"},
                     "metrics");
        if (m.contains("in_degree")) plan.in_degree = m.at("in_degree").get<bool>();
        if (m.contains("decisions_with_at_least")) {
            for (const auto& v : m.at("decisions_with_at_least")) {
                if (!v.is_number_integer() || v.get<long>() < 1)
                    throw RunError(RunError::Kind::domain,
                                   "decisions_with_at_least thresholds must be integers >= 1");
                plan.d_at_least.push_back(v.get<long>());
            }
            if (plan.d_at_least.empty())
                throw RunError(RunError::Kind::domain,
                               "decisions_with_at_least must list at least one k");
        }
        if (m.contains("overrepresentation")) {
            for (const auto& v : m.at("overrepresentation"))
                plan.overrep_thresholds.push_back(parse_threshold(v));
            if (plan.overrep_thresholds.empty())
                throw RunError(RunError::Kind::domain,
                               "overrepresentation must list at least one threshold");
            if (plan.weightings.empty())
                throw RunError(RunError::Kind::domain,
                               "overrepresentation needs at least one projection");
        }
        if (m.contains("rank_compare")) {
            const json& rc = m.at("rank_compare");
            require_keys(rc, {"top_n", "tables"}, "rank_compare");
            CompareSel sel;
            sel.top_n = rc.at("top_n").get<int>();
            if (sel.top_n < 1)
                throw RunError(RunError::Kind::domain, "rank_compare.top_n must be >= 1");
            for (const auto& v : rc.at("tables")) {
                const std::string name = v.get<std::string>();
                bool known = name == "in_degree" && plan.in_degree;
                for (long k : plan.d_at_least)
                    known = known || name == "d_at_least_" + std::to_string(k);
                if (!known)
                    throw RunError(RunError::Kind::domain,
                                   "rank_compare references table '" + name +
                                       "' which this config does not compute");
                sel.tables.push_back(name);
            }
            if (sel.tables.size() < 2)
                throw RunError(RunError::Kind::domain,
                               "rank_compare needs at least two tables");
            plan.compare = std::move(sel);
        }
        if (m.contains("source_distributions")) {
            for (const auto& spec : m.at("source_distributions")) {
                require_keys(spec, {"focal", "group_rank", "group_attribute", "normalization"},
                             "source_distributions");
                SourceSel sel;
                sel.focal = spec.at("focal").get<std::string>();
                if (spec.contains("group_rank") == spec.contains("group_attribute"))
                    throw RunError(RunError::Kind::domain,
                                   "source_distributions: set exactly one of group_rank / "
                                   "group_attribute");
                if (spec.contains("group_rank")) {
                    int r = spec.at("group_rank").get<int>();
                    if (r < 1 || r > kJudicialDepth)
                        throw RunError(RunError::Kind::domain,
                                       "source_distributions: group_rank out of range");
                    sel.group_by = r;
                    sel.slug = std::string("rank_") + rank_name(Branch::judicial, r);
                } else {
                    sel.group_by = spec.at("group_attribute").get<std::string>();
                    sel.slug = "attr_" + std::get<std::string>(sel.group_by);
                }
                if (spec.contains("normalization")) {
                    const std::string n = spec.at("normalization").get<std::string>();
                    if (n == "corpus_total")
                        sel.normalization = ShareNormalization::corpus_total;
                    else if (n == "per_group_total")
                        sel.normalization = ShareNormalization::per_group_total;
                    else
                        throw RunError(RunError::Kind::domain,
                                       "unknown share normalization '" + n + "'");
                }
                sel.slug += sel.normalization == ShareNormalization::corpus_total
                                ? "__corpus_total"
                                : "__per_group_total";
                plan.sources.push_back(std::move(sel));
            }
        }
        if (m.contains("target_distributions")) {
            for (const auto& v : m.at("target_distributions"))
                plan.targets.push_back(v.get<std::string>());
        }
    }

    if (config.contains("emit")) {
        const json& e = config.at("emit");
        require_keys(e, {"format", "digits", "bipartite", "leaf_masses"}, "emit");
        if (e.contains("format")) {
            plan.emit.formats.clear();
            const json& f = e.at("format");
            if (f.is_string()) {
                plan.emit.formats.push_back(parse_format(f.get<std::string>()));
            } else if (f.is_array() && !f.empty()) {
                for (const auto& v : f)
                    plan.emit.formats.push_back(parse_format(v.get<std::string>()));
            } else {
                throw RunError(RunError::Kind::domain,
                               "emit.format must be a string or nonempty array");
            }
        }
        if (e.contains("digits")) {
            plan.emit.digits = e.at("digits").get<int>();
            if (plan.emit.digits < 1 || plan.emit.digits > 50)
                throw RunError(RunError::Kind::domain, "emit.digits must lie in [1, 50]");
        }
        if (e.contains("bipartite")) plan.emit.bipartite = e.at("bipartite").get<bool>();
        if (e.contains("leaf_masses")) plan.emit.leaf_masses = e.at("leaf_masses").get<bool>();
    }
    return plan;
}

struct ManifestEntry {
    std::string path;  // relative, '/'-separated
    std::string sha256;
    std::string perspective;  // empty for corpus-level files
    std::string kind;
};

/// Serializes rendered bytes to disk and records path, digest, and owning
/// perspective for the manifest. add() is safe to call from worker threads.
class Sink {
public:
    explicit Sink(std::filesystem::path root) : root_(std::move(root)) {}

    void add(const std::string& rel, const std::string& bytes, const std::string& perspective,
             const std::string& kind) {
        std::filesystem::path full = root_ / rel;
        try {
            std::filesystem::create_directories(full.parent_path());
            write_file(full, bytes);
        } catch (const std::exception& e) {
            throw RunError(RunError::Kind::io, e.what());
        }
        std::lock_guard lock(mu_);
        entries_.push_back({rel, sha256_hex(bytes), perspective, kind});
    }

    std::vector<ManifestEntry> sorted() && {
        std::sort(entries_.begin(), entries_.end(),
                  [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
        return std::move(entries_);
    }

private:
    std::filesystem::path root_;
    std::mutex mu_;
    std::vector<ManifestEntry> entries_;
};

/// The output directory must be fresh, empty, or a previous run (identified
/// by its manifest or INCOMPLETE marker), which gets cleared. Anything else
/// is refused instead of deleted.
void prepare_out_dir(const std::filesystem::path& dir) {
    try {
        if (!std::filesystem::exists(dir)) {
            std::filesystem::create_directories(dir);
            return;
        }
        if (!std::filesystem::is_directory(dir))
            throw RunError(RunError::Kind::io, dir.string() + " is not a directory");
        bool empty = std::filesystem::directory_iterator(dir) ==
                     std::filesystem::directory_iterator();
        if (empty) return;
        if (!std::filesystem::exists(dir / "manifest.json") &&
            !std::filesystem::exists(dir / "INCOMPLETE"))
            throw RunError(RunError::Kind::io,
                           dir.string() + " holds files from something other than a run; "
                                          "refusing to clear it");
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            std::filesystem::remove_all(entry.path());
    } catch (const std::filesystem::filesystem_error& e) {
        throw RunError(RunError::Kind::io, e.what());
    }
}

json apply_overrides(json config, const RunOptions& opts) {
    if (opts.seed && config.contains("synth")) config["synth"]["seed"] = *opts.seed;
    if (opts.format) config["emit"]["format"] = std::string(to_string(*opts.format));
    return config;
}

NodeIndex require_node(const BaseNetwork& base, const std::string& id) {
    auto idx = base.find(id);
    if (!idx) throw RunError(RunError::Kind::domain, "unknown node id '" + id + "'");
    return *idx;
}

void emit_corpus_level(const RunPlan& plan, NetworkSpace& space, Sink& sink) {
    const BaseNetwork& base = space.base();
    for (const SourceSel& sel : plan.sources) {
        NodeIndex focal = require_node(base, sel.focal);
        if (base.node(focal).branch != Branch::legislative)
            throw RunError(RunError::Kind::domain,
                           "source_distributions focal '" + sel.focal + "' is not legislative");
        SourceDistribution dist =
            source_distribution(space, focal, sel.group_by, sel.normalization);
        for (Format f : plan.emit.formats)
            sink.add("corpus_metrics/source_distribution__" + sel.focal + "__" + sel.slug + "." +
                         table_ext(f),
                     render_source_distribution(base, dist, {f, plan.emit.digits}), "",
                     "distribution");
    }
    for (const std::string& id : plan.targets) {
        NodeIndex focal = require_node(base, id);
        if (base.node(focal).branch != Branch::legislative)
            throw RunError(RunError::Kind::domain,
                           "target_distributions focal '" + id + "' is not legislative");
        TargetDistribution dist = target_distribution(base, focal);
        for (Format f : plan.emit.formats)
            sink.add("corpus_metrics/target_distribution__" + id + "." + table_ext(f),
                     render_target_distribution(base, dist, {f, plan.emit.digits}), "",
                     "distribution");
    }
}

void emit_cell(const RunPlan& plan, NetworkSpace& space, const Perspective& p, Sink& sink) {
    const BaseNetwork& base = space.base();
    const std::string slug = perspective_slug(p);
    const int digits = plan.emit.digits;

    std::optional<BipartiteNetwork> net;
    auto bipartite = [&]() -> const BipartiteNetwork& {
        if (!net) net = derive(space, p);
        return *net;
    };

    if (plan.emit.bipartite)
        for (Format f : plan.emit.formats)
            sink.add(slug + "/bipartite." + edge_ext(f),
                     render_bipartite(base, bipartite(), {f, digits}), slug, "bipartite");

    std::map<std::string, RankTable> tables;
    if (plan.in_degree) {
        RankTable t = in_degree(base, bipartite());
        for (Format f : plan.emit.formats)
            sink.add(slug + "/in_degree." + table_ext(f), render_rank_table(base, t, {f, digits}),
                     slug, "rank_table");
        tables.emplace("in_degree", std::move(t));
    }
    for (long k : plan.d_at_least) {
        RankTable t = decisions_with_at_least(space, p.legislative_rank, k, &p);
        for (Format f : plan.emit.formats)
            sink.add(slug + "/d_at_least_" + std::to_string(k) + "." + table_ext(f),
                     render_rank_table(base, t, {f, digits}), slug, "rank_table");
        tables.emplace("d_at_least_" + std::to_string(k), std::move(t));
    }
    if (plan.compare) {
        std::vector<RankTable> selected;
        for (const std::string& name : plan.compare->tables)
            selected.push_back(tables.at(name));
        CompareReport report = rank_compare(selected, plan.compare->top_n);
        for (Format f : plan.emit.formats)
            sink.add(slug + "/rank_compare." + table_ext(f),
                     render_compare(base, report, selected, {f, digits}), slug, "compare");
    }

    for (const WeightingSpec& w : plan.weightings) {
        if (!weighting_applies(p, w)) continue;
        ProjectedGraph g = project(space, p, w);
        const std::string wslug = weighting_slug(w);
        for (Format f : plan.emit.formats)
            sink.add(slug + "/projection__" + wslug + "." + edge_ext(f),
                     render_projection(g, {f, digits}), slug, "projection");
        for (const StrengthSel& s : plan.strengths) {
            StrengthMatrix m = strength(g, s.direction, s.normalization);
            std::string name = slug + "/strength__" + wslug + "__" +
                               (s.direction == StrengthDirection::incoming ? "incoming"
                                                                           : "outgoing") +
                               "__" + (s.normalization == Normalization::sum ? "sum" : "max") +
                               ".csv";
            sink.add(name, render_strength(base, m, {Format::csv, digits}), slug, "strength");
        }
        if (plan.mean_strengths) {
            std::vector<MeanStrength> ms = mean_strengths(g);
            for (auto dir : {StrengthDirection::incoming, StrengthDirection::outgoing}) {
                std::string name =
                    slug + "/mean_strength__" + wslug + "__" +
                    (dir == StrengthDirection::incoming ? "incoming" : "outgoing");
                for (Format f : plan.emit.formats)
                    sink.add(name + "." + table_ext(f),
                             render_mean_strengths(base, ms, dir, {f, digits}), slug,
                             "mean_strength");
            }
        }
        if (w.side == ProjectionSide::legislative) {
            for (const Rational& th : plan.overrep_thresholds) {
                RankTable t = overrepresentation(g, th);
                for (Format f : plan.emit.formats)
                    sink.add(slug + "/overrep__" + wslug + "__t" + th.num_str() + "_" +
                                 th.den_str() + "." + table_ext(f),
                             render_rank_table(base, t, {f, digits}), slug, "rank_table");
            }
        }
    }
}

}  // namespace

Perspective parse_perspective(const json& j) {
    if (!j.is_object())
        throw RunError(RunError::Kind::domain, "perspective must be a JSON object");
    require_keys(j, {"judicial_rank", "legislative_rank", "judicial_filter",
                     "legislative_filter"},
                 "perspective");
    if (!j.contains("judicial_rank") || !j.contains("legislative_rank"))
        throw RunError(RunError::Kind::domain,
                       "perspective needs judicial_rank and legislative_rank");
    Perspective p;
    p.judicial_rank = j.at("judicial_rank").get<int>();
    p.legislative_rank = j.at("legislative_rank").get<int>();
    if (p.judicial_rank < 1 || p.judicial_rank > kJudicialDepth)
        throw RunError(RunError::Kind::domain, "judicial_rank out of range");
    if (p.legislative_rank < 1 || p.legislative_rank > kLegislativeDepth)
        throw RunError(RunError::Kind::domain, "legislative_rank out of range");
    if (j.contains("judicial_filter"))
        p.judicial_filter = parse_filter_checked(j.at("judicial_filter"), "judicial_filter");
    if (j.contains("legislative_filter"))
        p.legislative_filter =
            parse_filter_checked(j.at("legislative_filter"), "legislative_filter");
    return p;
}

WeightingSpec parse_weighting(const json& j) {
    std::vector<WeightingSpec> all = parse_weightings(j);
    if (all.size() != 1)
        throw RunError(RunError::Kind::domain, "expected a single k, not a list");
    return all.front();
}

std::vector<WeightingSpec> parse_weightings(const json& j) {
    if (!j.is_object()) throw RunError(RunError::Kind::domain, "projection must be an object");
    require_keys(j, {"side", "mode", "witness_rank", "k", "presence"}, "projection");
    WeightingSpec w;
    if (j.contains("side")) {
        const std::string s = j.at("side").get<std::string>();
        if (s == "legislative")
            w.side = ProjectionSide::legislative;
        else if (s == "judicial")
            w.side = ProjectionSide::judicial;
        else
            throw RunError(RunError::Kind::domain, "unknown projection side '" + s + "'");
    }
    if (!j.contains("mode"))
        throw RunError(RunError::Kind::domain, "projection needs a 'mode'");
    const std::string m = j.at("mode").get<std::string>();
    if (m == "unit_count")
        w.mode = WeightMode::unit_count;
    else if (m == "event_count")
        w.mode = WeightMode::event_count;
    else if (m == "combined")
        w.mode = WeightMode::combined;
    else
        throw RunError(RunError::Kind::domain, "unknown projection mode '" + m + "'");
    if (!j.contains("witness_rank"))
        throw RunError(RunError::Kind::domain, "projection needs a 'witness_rank'");
    w.witness_rank = j.at("witness_rank").get<int>();
    if (w.mode != WeightMode::combined && (j.contains("k") || j.contains("presence")))
        throw RunError(RunError::Kind::domain,
                       "'k' and 'presence' apply to combined mode only");
    if (j.contains("presence")) {
        const std::string p = j.at("presence").get<std::string>();
        if (p == "binary")
            w.presence = PresenceRule::binary;
        else if (p == "multiplicity")
            w.presence = PresenceRule::multiplicity;
        else
            throw RunError(RunError::Kind::domain, "unknown presence rule '" + p + "'");
    }
    std::vector<WeightingSpec> out;
    if (j.contains("k") && j.at("k").is_array()) {
        for (const auto& v : j.at("k")) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw RunError(RunError::Kind::domain, "k values must be integers >= 1");
            w.k = v.get<int>();
            out.push_back(w);
        }
        if (out.empty())
            throw RunError(RunError::Kind::domain, "'k' list must be nonempty");
    } else {
        if (j.contains("k")) {
            if (!j.at("k").is_number_integer() || j.at("k").get<int>() < 1)
                throw RunError(RunError::Kind::domain, "k must be an integer >= 1");
            w.k = j.at("k").get<int>();
        }
        out.push_back(w);
    }
    return out;
}

std::string perspective_slug(const Perspective& p) {
    std::string slug = std::string(rank_name(Branch::judicial, p.judicial_rank)) + "__" +
                       rank_name(Branch::legislative, p.legislative_rank);
    if (restricts(p.judicial_filter))
        slug += "__jf" + std::to_string(p.judicial_filter_index);
    if (restricts(p.legislative_filter))
        slug += "__lf" + std::to_string(p.legislative_filter_index);
    return slug;
}

std::string weighting_slug(const WeightingSpec& w) {
    std::string slug = std::string(to_string(w.side)) + "__" + to_string(w.mode) + "__w" +
                       std::to_string(w.witness_rank);
    if (w.mode == WeightMode::combined) {
        slug += "__k" + std::to_string(w.k);
        if (w.presence == PresenceRule::multiplicity) slug += "__mult";
    }
    return slug;
}

LoadedCorpus load_run_corpus(const json& config,
                             const std::optional<std::uint64_t>& seed_override) {
    const bool has_path = config.contains("corpus");
    const bool has_synth = config.contains("synth");
    if (has_path == has_synth)
        throw RunError(RunError::Kind::domain,
                       "config needs exactly one of 'corpus' (a path) or 'synth' (a generator "
                       "config)");
    LoadedCorpus out;
    if (has_path) {
        const std::string path = config.at("corpus").get<std::string>();
        out.bytes = slurp(path);
        std::istringstream in(out.bytes);
        try {
            out.net = read_corpus(in, true);
        } catch (const CorpusError& e) {
            throw RunError(RunError::Kind::domain, path + ": " + e.what());
        }
        return out;
    }
    try {
        SynthConfig sc = SynthConfig::from_json(config.at("synth"));
        if (seed_override) sc.seed = *seed_override;
        SynthResult r = generate_synthetic(sc);
        out.net = std::move(r.net);
        out.synthetic = true;
        out.procedural_id = std::move(r.procedural_id);
        out.cluster_ids = std::move(r.cluster_ids);
        out.bytes = corpus_to_string(out.net);
    } catch (const SynthError& e) {
        throw RunError(RunError::Kind::domain, std::string("synth: ") + e.what());
    }
    return out;
}

RunResult run_config(const json& config, const RunOptions& opts) {
    const json canonical = apply_overrides(config, opts);
    RunPlan plan = parse_plan(canonical);
    LoadedCorpus corpus = load_run_corpus(canonical, opts.seed);

    prepare_out_dir(opts.out_dir);
    {
        std::ofstream marker(opts.out_dir / "INCOMPLETE", std::ios::binary | std::ios::trunc);
        marker << "run in progress\n";
        if (!marker)
            throw RunError(RunError::Kind::io, "cannot write the INCOMPLETE marker");
    }

    NetworkSpace space(corpus.net, plan.mode);
    Sink sink(opts.out_dir);

    if (corpus.synthetic) sink.add("corpus.jsonl", corpus.bytes, "", "corpus");
    if (plan.emit.leaf_masses)
        sink.add("leaf_masses.jsonl", render_leaf_masses(corpus.net, space.leaf_table()), "",
                 "leaf_masses");
    emit_corpus_level(plan, space, sink);

    const std::size_t cells = plan.perspectives.size();
    unsigned workers = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(cells, 1)));

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells) return;
            {
                std::lock_guard lock(err_mu);
                if (first_error) return;
            }
            try {
                emit_cell(plan, space, plan.perspectives[i], sink);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    const std::size_t P = cells;
    std::vector<ManifestEntry> entries = std::move(sink).sorted();
    ordered_json manifest;
    manifest["config_hash"] = sha256_hex(canonical.dump());
    manifest["corpus_hash"] = sha256_hex(corpus.bytes);
    manifest["split_mode"] = plan.mode == SplitMode::per_child ? "per_child" : "per_leaf";
    manifest["network_space"] = {{"perspectives", P},
                                 {"bipartite_networks", P},
                                 {"one_mode_projections", 2 * P},
                                 {"total_networks", 3 * P}};
    manifest["files"] = ordered_json::array();
    for (const ManifestEntry& e : entries) {
        ordered_json row;
        row["path"] = e.path;
        row["sha256"] = e.sha256;
        if (e.perspective.empty())
            row["perspective"] = nullptr;
        else
            row["perspective"] = e.perspective;
        row["kind"] = e.kind;
        manifest["files"].push_back(std::move(row));
    }
    try {
        write_file(opts.out_dir / "manifest.json", manifest.dump(2) + "\n");
        std::filesystem::remove(opts.out_dir / "INCOMPLETE");
    } catch (const std::exception& e) {
        throw RunError(RunError::Kind::io, e.what());
    }

    return {P, entries.size()};
}

namespace {

/// Shared scaffolding for the single-output subcommands.
struct OnceContext {
    LoadedCorpus corpus;
    EmitPlan emit;
};

OnceContext once_context(const json& config, const RunOptions& opts,
                         const std::set<std::string>& extra_keys) {
    std::set<std::string> allowed = {"corpus", "synth", "split_mode", "emit"};
    allowed.insert(extra_keys.begin(), extra_keys.end());
    require_keys(config, allowed, "config");
    OnceContext ctx;
    ctx.corpus = load_run_corpus(config, opts.seed);
    if (config.contains("emit")) {
        const json& e = config.at("emit");
        require_keys(e, {"format", "digits"}, "emit");
        if (e.contains("digits")) ctx.emit.digits = e.at("digits").get<int>();
        if (e.contains("format"))
            ctx.emit.formats = {parse_format(e.at("format").get<std::string>())};
    }
    if (opts.format) ctx.emit.formats = {*opts.format};
    return ctx;
}

SplitMode config_mode(const json& config) {
    if (!config.contains("split_mode")) return SplitMode::per_child;
    const std::string m = config.at("split_mode").get<std::string>();
    if (m == "per_child") return SplitMode::per_child;
    if (m == "per_leaf") return SplitMode::per_leaf;
    throw RunError(RunError::Kind::domain, "unknown split_mode '" + m + "'");
}

std::filesystem::path emit_once(const RunOptions& opts, const std::string& name,
                                const std::string& bytes, const LoadedCorpus& corpus) {
    try {
        std::filesystem::create_directories(opts.out_dir);
        if (corpus.synthetic) write_file(opts.out_dir / "corpus.jsonl", corpus.bytes);
        write_file(opts.out_dir / name, bytes);
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError(RunError::Kind::io, e.what());
    }
    return opts.out_dir / name;
}

}  // namespace

std::filesystem::path derive_once(const json& config, const RunOptions& opts) {
    // one experiment config can feed derive, project, and metric alike
    OnceContext ctx = once_context(config, opts, {"perspective", "projection", "metric"});
    if (!config.contains("perspective"))
        throw RunError(RunError::Kind::domain, "derive needs a 'perspective'");
    Perspective p = parse_perspective(config.at("perspective"));
    NetworkSpace space(ctx.corpus.net, config_mode(config));
    BipartiteNetwork net = derive(space, p);
    Format f = ctx.emit.formats.front();
    return emit_once(opts, "bipartite__" + perspective_slug(p) + "." + edge_ext(f),
                     render_bipartite(ctx.corpus.net, net, {f, ctx.emit.digits}), ctx.corpus);
}

std::filesystem::path project_once(const json& config, const RunOptions& opts) {
    OnceContext ctx = once_context(config, opts, {"perspective", "projection", "metric"});
    if (!config.contains("perspective") || !config.contains("projection"))
        throw RunError(RunError::Kind::domain,
                       "project needs a 'perspective' and a 'projection'");
    Perspective p = parse_perspective(config.at("perspective"));
    WeightingSpec w = parse_weighting(config.at("projection"));
    NetworkSpace space(ctx.corpus.net, config_mode(config));
    ProjectedGraph g;
    try {
        g = project(space, p, w);
    } catch (const std::invalid_argument& e) {
        throw RunError(RunError::Kind::domain, e.what());
    }
    Format f = ctx.emit.formats.front();
    return emit_once(opts,
                     "projection__" + perspective_slug(p) + "__" + weighting_slug(w) + "." +
                         edge_ext(f),
                     render_projection(g, {f, ctx.emit.digits}), ctx.corpus);
}

std::filesystem::path metric_once(const json& config, const RunOptions& opts) {
    OnceContext ctx = once_context(config, opts, {"perspective", "projection", "metric"});
    if (!config.contains("metric"))
        throw RunError(RunError::Kind::domain, "metric needs a 'metric' object");
    const json& m = config.at("metric");
    if (!m.is_object() || !m.contains("name"))
        throw RunError(RunError::Kind::domain, "'metric' must be an object with a 'name'");
    const std::string name = m.at("name").get<std::string>();
    const BaseNetwork& base = ctx.corpus.net;
    NetworkSpace space(base, config_mode(config));
    Format f = ctx.emit.formats.front();
    EmitOptions eo{f, ctx.emit.digits};

    auto perspective = [&]() -> Perspective {
        if (!config.contains("perspective"))
            throw RunError(RunError::Kind::domain,
                           "metric '" + name + "' needs a 'perspective'");
        return parse_perspective(config.at("perspective"));
    };

    if (name == "in_degree") {
        require_keys(m, {"name"}, "metric");
        Perspective p = perspective();
        RankTable t = in_degree(base, derive(space, p));
        return emit_once(opts, "in_degree__" + perspective_slug(p) + "." + table_ext(f),
                         render_rank_table(base, t, eo), ctx.corpus);
    }
    if (name == "decisions_with_at_least") {
        require_keys(m, {"name", "k"}, "metric");
        if (!m.contains("k") || !m.at("k").is_number_integer() || m.at("k").get<long>() < 1)
            throw RunError(RunError::Kind::domain, "metric needs an integer k >= 1");
        long k = m.at("k").get<long>();
        Perspective p = perspective();
        RankTable t = decisions_with_at_least(space, p.legislative_rank, k, &p);
        return emit_once(opts,
                         "d_at_least_" + std::to_string(k) + "__" + perspective_slug(p) + "." +
                             table_ext(f),
                         render_rank_table(base, t, eo), ctx.corpus);
    }
    if (name == "overrepresentation") {
        require_keys(m, {"name", "threshold"}, "metric");
        Rational th(1, 4);
        if (m.contains("threshold")) th = parse_threshold(m.at("threshold"));
        if (!config.contains("projection"))
            throw RunError(RunError::Kind::domain, "overrepresentation needs a 'projection'");
        Perspective p = perspective();
        WeightingSpec w = parse_weighting(config.at("projection"));
        ProjectedGraph g;
        RankTable t;
        try {
            g = project(space, p, w);
            t = overrepresentation(g, th);
        } catch (const std::invalid_argument& e) {
            throw RunError(RunError::Kind::domain, e.what());
        }
        return emit_once(opts,
                         "overrep__" + perspective_slug(p) + "__" + weighting_slug(w) + "__t" +
                             th.num_str() + "_" + th.den_str() + "." + table_ext(f),
                         render_rank_table(base, t, eo), ctx.corpus);
    }
    if (name == "source_distribution") {
        require_keys(m, {"name", "focal", "group_rank", "group_attribute", "normalization"},
                     "metric");
        if (!m.contains("focal"))
            throw RunError(RunError::Kind::domain, "source_distribution needs a 'focal'");
        const std::string focal_id = m.at("focal").get<std::string>();
        NodeIndex focal = require_node(base, focal_id);
        if (m.contains("group_rank") == m.contains("group_attribute"))
            throw RunError(RunError::Kind::domain,
                           "set exactly one of group_rank / group_attribute");
        GroupBy group_by;
        std::string gslug;
        if (m.contains("group_rank")) {
            int r = m.at("group_rank").get<int>();
            if (r < 1 || r > kJudicialDepth)
                throw RunError(RunError::Kind::domain, "group_rank out of range");
            group_by = r;
            gslug = std::string("rank_") + rank_name(Branch::judicial, r);
        } else {
            group_by = m.at("group_attribute").get<std::string>();
            gslug = "attr_" + m.at("group_attribute").get<std::string>();
        }
        ShareNormalization norm = ShareNormalization::corpus_total;
        if (m.contains("normalization")) {
            const std::string n = m.at("normalization").get<std::string>();
            if (n == "per_group_total")
                norm = ShareNormalization::per_group_total;
            else if (n != "corpus_total")
                throw RunError(RunError::Kind::domain, "unknown normalization '" + n + "'");
        }
        SourceDistribution dist;
        try {
            dist = source_distribution(space, focal, group_by, norm);
        } catch (const std::invalid_argument& e) {
            throw RunError(RunError::Kind::domain, e.what());
        }
        return emit_once(opts,
                         "source_distribution__" + focal_id + "__" + gslug + "." + table_ext(f),
                         render_source_distribution(base, dist, eo), ctx.corpus);
    }
    if (name == "target_distribution") {
        require_keys(m, {"name", "focal"}, "metric");
        if (!m.contains("focal"))
            throw RunError(RunError::Kind::domain, "target_distribution needs a 'focal'");
        const std::string focal_id = m.at("focal").get<std::string>();
        NodeIndex focal = require_node(base, focal_id);
        TargetDistribution dist;
        try {
            dist = target_distribution(base, focal);
        } catch (const std::invalid_argument& e) {
            throw RunError(RunError::Kind::domain, e.what());
        }
        return emit_once(opts, "target_distribution__" + focal_id + "." + table_ext(f),
                         render_target_distribution(base, dist, eo), ctx.corpus);
    }
    throw RunError(RunError::Kind::domain, "unknown metric '" + name + "'");
}

}  // namespace lexnet::io
