#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathbench/query.hpp"

namespace pathbench {

enum class Dialect { Sparql, Cypher, Sql, Datalog };

std::string_view to_string(Dialect d);
std::string_view file_extension(Dialect d);
std::optional<Dialect> parse_dialect(std::string_view name);
/// Comma-separated names; throws ValidationError on unknown names.
std::vector<Dialect> parse_dialect_list(std::string_view csv);

/// Count-of-distinct-answers query text. Cypher cannot express stars over
/// inverses or concatenations; those are approximated and the text starts
/// with a `/* LOSSY */` comment.
std::string translate(const Query& q, Dialect dialect);

/// Bulk-load template for the `edge(src, label, trg)` table.
std::string sql_loader_script(std::string_view graph_path = "graph.tsv");

/// Writes q<ID>.<ext> per query and dialect (plus load_edges.sql for SQL).
/// Returns the number of files written.
std::size_t write_translations(const std::vector<Query>& queries, const std::vector<Dialect>& dialects,
                               const std::filesystem::path& dir);

}  // namespace pathbench
