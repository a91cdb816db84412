#pragma once

#include <filesystem>
#include <string>

#include "lexnet/metrics.hpp"

namespace lexnet::io {

enum class Format { csv, json };

const char* to_string(Format f);
/// "csv" or "json"; anything else throws std::invalid_argument.
Format parse_format(const std::string& s);

struct EmitOptions {
    Format format = Format::csv;
    int digits = 6;  // decimal places of the float rendering
};

/// RFC-4180: quote and double embedded quotes when the field holds a comma,
/// quote, or line break.
std::string csv_field(const std::string& raw);

/// Lowercase hex SHA-256 of the byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes to a sibling temp file, then renames over the destination, so a
/// crash never leaves a half-written file under the final name.
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Tables render with the fixed column set (id, label, value_num, value_den,
/// value_float, rank) in CSV, or as one JSON document mirroring those rows.
/// Undefined values surface as the literal `null`, never as 0.
std::string render_rank_table(const BaseNetwork& base, const RankTable& table,
                              const EmitOptions& opts);
std::string render_source_distribution(const BaseNetwork& base, const SourceDistribution& dist,
                                       const EmitOptions& opts);
std::string render_target_distribution(const BaseNetwork& base, const TargetDistribution& dist,
                                       const EmitOptions& opts);
/// Long form: one row per (node, input table), nodes in report order, with a
/// trailing `metric` column naming the table a row reads from.
std::string render_compare(const BaseNetwork& base, const CompareReport& report,
                           const std::vector<RankTable>& tables, const EmitOptions& opts);

/// Bipartite edge list: {left, right, weight_num, weight_den} as JSON-lines,
/// or the same fields as CSV columns.
std::string render_bipartite(const BaseNetwork& base, const BipartiteNetwork& net,
                             const EmitOptions& opts);

/// Projection edge list: {i, j, weight_num, weight_den} as JSON-lines or CSV.
std::string render_projection(const ProjectedGraph& g, const EmitOptions& opts);

/// CSV only; the first line names direction and normalization. Zero rows are
/// listed in a second comment line when present.
std::string render_strength(const BaseNetwork& base, const StrengthMatrix& m,
                            const EmitOptions& opts);

/// One direction of the per-node neighbor means as a table; isolated nodes
/// render with null values.
std::string render_mean_strengths(const BaseNetwork& base, const std::vector<MeanStrength>& ms,
                                  StrengthDirection which, const EmitOptions& opts);

/// Debug dump of the broadcast table as JSON-lines
/// {source, anchor, proxy, mass_num, mass_den}.
std::string render_leaf_masses(const BaseNetwork& base, const LeafMassTable& table);

}  // namespace lexnet::io
