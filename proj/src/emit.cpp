#include "lexnet/emit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace lexnet::io {

using nlohmann::ordered_json;

const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("unknown format '" + s + "' (expected csv or json)");
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 digest failed");
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

constexpr const char* kTableHeader = "id,label,value_num,value_den,value_float,rank\n";

struct TableRow {
    std::string id;
    std::string label;
    std::optional<Rational> value;
    std::optional<int> rank;
};

/// Dense 1-based ranks under (value desc, id asc); undefined values rank
/// after every defined one and keep a null rank.
void assign_ranks(std::vector<TableRow>& rows) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].value) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (*rows[a].value != *rows[b].value) return *rows[b].value < *rows[a].value;
        return rows[a].id < rows[b].id;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        rows[order[pos]].rank = static_cast<int>(pos + 1);
}

std::string csv_table(const std::vector<TableRow>& rows, int digits) {
    std::string out = kTableHeader;
    for (const TableRow& r : rows) {
        out += csv_field(r.id);
        out += ',';
        out += csv_field(r.label);
        if (r.value) {
            out += ',' + r.value->num_str() + ',' + r.value->den_str() + ',' +
                   r.value->decimal(digits);
        } else {
            out += ",null,null,null";
        }
        out += ',';
        out += r.rank ? std::to_string(*r.rank) : "null";
        out += '\n';
    }
    return out;
}

ordered_json json_row(const TableRow& r, int digits) {
    ordered_json row;
    row["id"] = r.id;
    row["label"] = r.label;
    if (r.value) {
        row["value_num"] = r.value->num_str();
        row["value_den"] = r.value->den_str();
        row["value_float"] = r.value->decimal(digits);
    } else {
        row["value_num"] = nullptr;
        row["value_den"] = nullptr;
        row["value_float"] = nullptr;
    }
    if (r.rank)
        row["rank"] = *r.rank;
    else
        row["rank"] = nullptr;
    return row;
}

std::string json_document(ordered_json doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string render_rank_table(const BaseNetwork& base, const RankTable& table,
                              const EmitOptions& opts) {
    std::vector<TableRow> rows;
    for (const RankRow& r : table.rows) {
        const Node& n = base.node(r.node);
        rows.push_back({n.id, n.label, r.value, r.rank});
    }
    if (opts.format == Format::csv) return csv_table(rows, opts.digits);
    ordered_json doc;
    doc["metric"] = table.metric;
    doc["tie_rule"] = table.tie_rule;
    doc["rows"] = ordered_json::array();
    for (const TableRow& r : rows) doc["rows"].push_back(json_row(r, opts.digits));
    return json_document(std::move(doc));
}

std::string render_source_distribution(const BaseNetwork& base, const SourceDistribution& dist,
                                       const EmitOptions& opts) {
    std::vector<TableRow> rows;
    for (const Share& s : dist.shares) {
        std::string label = s.group;
        if (auto idx = base.find(s.group)) label = base.node(*idx).label;
        rows.push_back({s.group, label, s.value, std::nullopt});
    }
    assign_ranks(rows);
    if (opts.format == Format::csv) return csv_table(rows, opts.digits);
    ordered_json doc;
    doc["focal"] = base.node(dist.focal).id;
    doc["normalization"] = dist.normalization == ShareNormalization::corpus_total
                               ? "corpus_total"
                               : "per_group_total";
    doc["rows"] = ordered_json::array();
    for (const TableRow& r : rows) doc["rows"].push_back(json_row(r, opts.digits));
    return json_document(std::move(doc));
}

std::string render_target_distribution(const BaseNetwork& base, const TargetDistribution& dist,
                                       const EmitOptions& opts) {
    std::vector<TableRow> rows;
    for (const TargetShare& s : dist.shares) {
        const Node& n = base.node(s.node);
        rows.push_back({n.id, n.label, s.share, std::nullopt});
    }
    assign_ranks(rows);
    if (opts.format == Format::csv) return csv_table(rows, opts.digits);
    ordered_json doc;
    doc["focal"] = base.node(dist.focal).id;
    doc["total"] = dist.total;
    doc["rows"] = ordered_json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ordered_json row = json_row(rows[i], opts.digits);
        row["direct"] = dist.shares[i].direct;
        doc["rows"].push_back(std::move(row));
    }
    return json_document(std::move(doc));
}

std::string render_compare(const BaseNetwork& base, const CompareReport& report,
                           const std::vector<RankTable>& tables, const EmitOptions& opts) {
    struct Long {
        TableRow row;
        std::string metric;
    };
    std::vector<Long> rows;
    for (const CompareRow& r : report.rows) {
        const Node& n = base.node(r.node);
        for (std::size_t t = 0; t < report.metrics.size(); ++t) {
            std::optional<Rational> value;
            if (t < tables.size()) value = tables[t].value_of(r.node);
            rows.push_back({{n.id, n.label, value, r.ranks[t]}, report.metrics[t]});
        }
    }
    if (opts.format == Format::csv) {
        std::string out = "id,label,value_num,value_den,value_float,rank,metric\n";
        for (const Long& l : rows) {
            std::string line = csv_table({l.row}, opts.digits);
            line.erase(0, std::string(kTableHeader).size());
            line.pop_back();  // newline
            out += line + ',' + csv_field(l.metric) + '\n';
        }
        return out;
    }
    ordered_json doc;
    doc["metrics"] = report.metrics;
    doc["rows"] = ordered_json::array();
    for (const Long& l : rows) {
        ordered_json row = json_row(l.row, opts.digits);
        row["metric"] = l.metric;
        doc["rows"].push_back(std::move(row));
    }
    return json_document(std::move(doc));
}

std::string render_bipartite(const BaseNetwork& base, const BipartiteNetwork& net,
                             const EmitOptions& opts) {
    std::string out;
    if (opts.format == Format::csv) out = "left,right,weight_num,weight_den\n";
    for (const MassCell& c : net.edges) {
        const std::string& left = base.node(c.unit).id;
        const std::string& right = base.node(c.target).id;
        if (opts.format == Format::csv) {
            out += csv_field(left) + ',' + csv_field(right) + ',' + c.mass.num_str() + ',' +
                   c.mass.den_str() + '\n';
        } else {
            ordered_json row;
            row["left"] = left;
            row["right"] = right;
            row["weight_num"] = c.mass.num_str();
            row["weight_den"] = c.mass.den_str();
            out += row.dump() + '\n';
        }
    }
    return out;
}

std::string render_projection(const ProjectedGraph& g, const EmitOptions& opts) {
    std::string out;
    if (opts.format == Format::csv) out = "i,j,weight_num,weight_den\n";
    for (const ProjEdge& e : g.edges) {
        const std::string& a = g.base->node(e.a).id;
        const std::string& b = g.base->node(e.b).id;
        if (opts.format == Format::csv) {
            out += csv_field(a) + ',' + csv_field(b) + ',' + e.weight.num_str() + ',' +
                   e.weight.den_str() + '\n';
        } else {
            ordered_json row;
            row["i"] = a;
            row["j"] = b;
            row["weight_num"] = e.weight.num_str();
            row["weight_den"] = e.weight.den_str();
            out += row.dump() + '\n';
        }
    }
    return out;
}

std::string render_strength(const BaseNetwork& base, const StrengthMatrix& m,
                            const EmitOptions& opts) {
    std::string out = "# strength direction=";
    out += m.direction == StrengthDirection::incoming ? "incoming" : "outgoing";
    out += " normalization=";
    out += m.normalization == Normalization::sum ? "sum" : "max";
    out += '\n';
    if (!m.zero_rows.empty()) {
        out += "# zero_rows=";
        for (std::size_t i = 0; i < m.zero_rows.size(); ++i) {
            if (i) out += ';';
            out += base.node(m.zero_rows[i]).id;
        }
        out += '\n';
    }
    out += "i,j,value_num,value_den,value_float\n";
    for (const StrengthEntry& e : m.entries) {
        out += csv_field(base.node(e.i).id) + ',' + csv_field(base.node(e.j).id) + ',' +
               e.value.num_str() + ',' + e.value.den_str() + ',' + e.value.decimal(opts.digits) +
               '\n';
    }
    return out;
}

std::string render_mean_strengths(const BaseNetwork& base, const std::vector<MeanStrength>& ms,
                                  StrengthDirection which, const EmitOptions& opts) {
    std::vector<TableRow> rows;
    for (const MeanStrength& m : ms) {
        const Node& n = base.node(m.node);
        std::optional<Rational> value;
        if (m.defined) value = which == StrengthDirection::incoming ? m.incoming : m.outgoing;
        rows.push_back({n.id, n.label, std::move(value), std::nullopt});
    }
    assign_ranks(rows);
    if (opts.format == Format::csv) return csv_table(rows, opts.digits);
    ordered_json doc;
    doc["direction"] = which == StrengthDirection::incoming ? "incoming" : "outgoing";
    doc["rows"] = ordered_json::array();
    for (const TableRow& r : rows) doc["rows"].push_back(json_row(r, opts.digits));
    return json_document(std::move(doc));
}

std::string render_leaf_masses(const BaseNetwork& base, const LeafMassTable& table) {
    std::string out;
    for (const SlotMass& s : table.entries()) {
        ordered_json row;
        row["source"] = base.node(s.source).id;
        row["anchor"] = base.node(s.slot.anchor).id;
        row["proxy"] = s.slot.proxy;
        row["mass_num"] = s.mass.num_str();
        row["mass_den"] = s.mass.den_str();
        out += row.dump() + '\n';
    }
    return out;
}

}  // namespace lexnet::io
