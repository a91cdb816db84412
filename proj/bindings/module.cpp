// Python bindings for the network core. Exact arithmetic crosses the
// boundary as fractions.Fraction; structured specs (filters, perspectives,
// weightings, generator configs) are accepted as dicts or JSON strings with
// the same schema the CLI config uses.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lexnet/corpus_io.hpp"
#include "lexnet/counting.hpp"
#include "lexnet/filter.hpp"
#include "lexnet/metrics.hpp"
#include "lexnet/model.hpp"
#include "lexnet/perspective.hpp"
#include "lexnet/projection.hpp"
#include "lexnet/rational.hpp"
#include "lexnet/runner.hpp"
#include "lexnet/synth.hpp"

namespace py = pybind11;
using namespace lexnet;
using nlohmann::json;

namespace {

py::object fraction(const Rational& r) {
    py::object ctor = py::module_::import("fractions").attr("Fraction");
    return ctor(r.num_str() + "/" + r.den_str());
}

/// Dict or JSON-string argument -> json. None -> fallback.
json spec_json(const py::object& obj, const char* fallback = nullptr) {
    if (obj.is_none()) {
        if (!fallback) throw py::value_error("spec must not be None");
        return json::parse(fallback);
    }
    if (py::isinstance<py::str>(obj)) return json::parse(obj.cast<std::string>());
    py::object dumped = py::module_::import("json").attr("dumps")(obj);
    return json::parse(dumped.cast<std::string>());
}

SplitMode parse_split(const std::string& s) {
    if (s == "per_child") return SplitMode::per_child;
    if (s == "per_leaf") return SplitMode::per_leaf;
    throw py::value_error("split_mode must be per_child or per_leaf, got " + s);
}

/// Owns the immutable corpus plus a lazily built computation cache. Heap
/// allocated by every factory so the cache's internal reference stays valid.
struct Corpus {
    BaseNetwork net;
    SplitMode mode = SplitMode::per_child;
    std::unique_ptr<NetworkSpace> cache;

    explicit Corpus(BaseNetwork n, SplitMode m) : net(std::move(n)), mode(m) {}

    NetworkSpace& space() {
        if (!cache) cache = std::make_unique<NetworkSpace>(net, mode);
        return *cache;
    }
    const std::string& id_of(NodeIndex n) const { return net.node(n).id; }

    Perspective perspective_of(const py::object& spec) const {
        return io::parse_perspective(spec_json(spec));
    }
};

std::unique_ptr<Corpus> load_corpus_file(const std::string& path, bool validate,
                                         const std::string& split) {
    return std::make_unique<Corpus>(io::load_corpus(path, validate), parse_split(split));
}

std::unique_ptr<Corpus> corpus_from_string(const std::string& text, bool validate,
                                           const std::string& split) {
    std::istringstream in(text);
    return std::make_unique<Corpus>(io::read_corpus(in, validate), parse_split(split));
}

py::tuple generate(const py::object& config, const std::string& split) {
    io::SynthConfig cfg = io::SynthConfig::from_json(spec_json(config, "{}"));
    io::SynthResult r = generate_synthetic(cfg);
    auto corpus = std::make_unique<Corpus>(std::move(r.net), parse_split(split));
    py::object procedural =
        r.procedural_id.empty() ? py::none().cast<py::object>() : py::cast(r.procedural_id);
    return py::make_tuple(std::move(corpus), procedural, r.cluster_ids);
}

py::list node_dicts(const Corpus& c) {
    py::list out;
    for (const Node& n : c.net.nodes()) {
        py::dict d;
        d["id"] = n.id;
        d["branch"] = branch_name(n.branch);
        d["rank"] = n.rank;
        d["rank_name"] = rank_name(n.branch, n.rank);
        d["parent"] = n.parent == kNoNode ? py::none().cast<py::object>()
                                          : py::cast(c.net.node(n.parent).id);
        d["label"] = n.label;
        d["attributes"] = n.attributes;
        out.append(std::move(d));
    }
    return out;
}

py::list ref_dicts(const Corpus& c) {
    py::list out;
    for (const RefEdge& e : c.net.refs()) {
        py::dict d;
        d["source"] = c.id_of(e.source);
        d["target"] = c.id_of(e.target);
        d["multiplicity"] = e.multiplicity;
        out.append(std::move(d));
    }
    return out;
}

py::list leaf_mass_dicts(Corpus& c) {
    py::list out;
    for (const SlotMass& m : c.space().leaf_table().entries()) {
        py::dict d;
        d["source"] = c.id_of(m.source);
        d["anchor"] = c.id_of(m.slot.anchor);
        d["proxy"] = m.slot.proxy;
        d["mass"] = fraction(m.mass);
        out.append(std::move(d));
    }
    return out;
}

py::list mass_table_tuples(const Corpus& c, const MassTable& table) {
    py::list out;
    for (const MassCell& cell : table)
        out.append(py::make_tuple(c.id_of(cell.unit), c.id_of(cell.target),
                                  fraction(cell.mass)));
    return out;
}

py::list aggregate(Corpus& c, int legislative_rank) {
    return mass_table_tuples(c, *c.space().paragraph_masses(legislative_rank));
}

py::list roll_up(Corpus& c, int judicial_rank, int legislative_rank) {
    return mass_table_tuples(c, *c.space().rolled(judicial_rank, legislative_rank));
}

py::list bipartite(Corpus& c, const py::object& perspective) {
    BipartiteNetwork net = derive(c.space(), c.perspective_of(perspective));
    return mass_table_tuples(c, net.edges);
}

py::list project_edges(Corpus& c, const py::object& perspective, const py::object& weighting) {
    WeightingSpec w = io::parse_weighting(
        spec_json(weighting, R"({"side":"legislative","mode":"unit_count","witness_rank":4})"));
    ProjectedGraph g = project(c.space(), c.perspective_of(perspective), w);
    py::list out;
    for (const ProjEdge& e : g.edges)
        out.append(py::make_tuple(c.id_of(e.a), c.id_of(e.b), fraction(e.weight)));
    return out;
}

py::list rank_rows(const Corpus& c, const RankTable& t) {
    py::list out;
    for (const RankRow& row : t.rows) {
        py::dict d;
        d["id"] = c.id_of(row.node);
        d["value"] = fraction(row.value);
        d["rank"] = row.rank;
        out.append(std::move(d));
    }
    return out;
}

py::list in_degree_table(Corpus& c, int legislative_rank) {
    return rank_rows(c, in_degree(c.space(), legislative_rank));
}

py::list d_at_least(Corpus& c, int legislative_rank, long k) {
    return rank_rows(c, decisions_with_at_least(c.space(), legislative_rank, k));
}

py::list overrep(Corpus& c, const py::object& perspective, const py::object& weighting,
                 const std::string& threshold) {
    WeightingSpec w = io::parse_weighting(
        spec_json(weighting, R"({"side":"legislative","mode":"unit_count","witness_rank":4})"));
    ProjectedGraph g = project(c.space(), c.perspective_of(perspective), w);
    return rank_rows(c, overrepresentation(g, Rational::parse(threshold)));
}

py::list grid() {
    py::list out;
    for (const Perspective& p : enumerate_grid())
        out.append(py::make_tuple(p.judicial_rank, p.legislative_rank));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Citation network core: exact dynamic counting, perspectives, projections";

    py::register_exception<io::CorpusError>(m, "CorpusError");
    py::register_exception<io::SynthError>(m, "SynthError");

    py::class_<Corpus>(m, "Corpus")
        .def_static("load", &load_corpus_file, py::arg("path"), py::arg("validate") = true,
                    py::arg("split_mode") = "per_child",
                    "Load a JSONL corpus file.")
        .def_static("from_string", &corpus_from_string, py::arg("text"),
                    py::arg("validate") = true, py::arg("split_mode") = "per_child",
                    "Parse a corpus from JSONL text.")
        .def_property_readonly("node_count",
                               [](const Corpus& c) { return c.net.node_count(); })
        .def_property_readonly("reference_count",
                               [](const Corpus& c) { return c.net.refs().size(); })
        .def_property_readonly("total_multiplicity",
                               [](const Corpus& c) { return c.net.total_multiplicity(); })
        .def_property_readonly("split_mode",
                               [](const Corpus& c) {
                                   return c.mode == SplitMode::per_child ? "per_child"
                                                                         : "per_leaf";
                               })
        .def("nodes", &node_dicts, "All nodes as dicts, in insertion order.")
        .def("references", &ref_dicts, "All reference edges as dicts.")
        .def("to_string", [](const Corpus& c) { return io::corpus_to_string(c.net); },
             "Serialize back to canonical JSONL.")
        .def("leaf_masses", &leaf_mass_dicts,
             "Per-(source, frontier slot) masses from the dynamic count.")
        .def("aggregate", &aggregate, py::arg("legislative_rank"),
             "Paragraph-to-target masses at a legislative rank.")
        .def("roll_up", &roll_up, py::arg("judicial_rank"), py::arg("legislative_rank"),
             "Masses aggregated on both sides.")
        .def("bipartite", &bipartite, py::arg("perspective"),
             "Filtered bipartite network for a perspective spec.")
        .def("project", &project_edges, py::arg("perspective"),
             py::arg("weighting") = py::none(),
             "One-mode projection edges under a weighting spec.")
        .def("in_degree", &in_degree_table, py::arg("legislative_rank"),
             "Incoming mass per legislative node, ranked.")
        .def("decisions_with_at_least", &d_at_least, py::arg("legislative_rank"),
             py::arg("k"), "Decision support counts at threshold k, ranked.")
        .def("overrepresentation", &overrep, py::arg("perspective"),
             py::arg("weighting") = py::none(), py::arg("threshold") = "1/4",
             "Share of a node's neighbors connected more strongly than the threshold.");

    m.def("generate", &generate, py::arg("config") = py::none(),
          py::arg("split_mode") = "per_child",
          "Generate a synthetic corpus; returns (corpus, procedural_id, cluster_ids).");
    m.def("grid", &grid, "All (judicial_rank, legislative_rank) perspective pairs.");
    m.def("rank_names", [](const std::string& branch) {
        std::optional<Branch> b = branch_from_name(branch);
        if (!b) throw py::value_error("unknown branch: " + branch);
        std::vector<std::string> out;
        for (int r = 1; r <= branch_depth(*b); ++r) out.emplace_back(rank_name(*b, r));
        return out;
    });
}
