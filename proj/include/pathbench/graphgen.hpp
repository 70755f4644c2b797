#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pathbench/config.hpp"
#include "pathbench/distributions.hpp"

namespace pathbench {

/// One labeled edge. `predicate` indexes the owning graph's predicate list.
struct EdgeRecord {
    std::uint64_t source = 0;
    std::uint32_t predicate = 0;
    std::uint64_t target = 0;

    bool operator==(const EdgeRecord&) const = default;
};

struct GenerationOptions {
    bool allow_multi_edges = false;
    /// Draw Gaussian sides without materializing per-node degrees.
    bool gaussian_fast_path = false;
    unsigned threads = 1;
};

/// Diagnostics for one constraint of a run.
struct ConstraintStats {
    std::size_t constraint_index = 0;
    std::uint64_t source_slots = 0;  // |v_src|
    std::uint64_t target_slots = 0;  // |v_trg|
    std::uint64_t emitted = 0;       // min of the two
    std::uint64_t written = 0;       // after dedup
};

struct GraphInstance {
    std::vector<std::string> predicates;
    std::vector<EdgeRecord> edges;
    /// Set for generated graphs; empty when loaded from an edge list.
    NodeLayout layout;
    /// Node universe for loaded graphs (sorted, distinct). Generated graphs use 1..layout.total().
    std::vector<std::uint64_t> loaded_nodes;
    bool loaded = false;

    std::vector<std::uint64_t> node_universe() const;
    std::uint64_t node_count() const;
    std::uint32_t predicate_id(std::string_view name) const;
};

/// Receives the edges of one constraint, in constraint order.
using EdgeSink = std::function<void(std::span<const EdgeRecord>)>;

/// Runs the generator and hands each constraint's edges to `sink`.
/// Output is identical for every thread count.
std::vector<ConstraintStats> generate_graph(const GraphConfiguration& config, std::uint64_t seed,
                                            const GenerationOptions& options, const EdgeSink& sink);

GraphInstance generate_graph(const GraphConfiguration& config, std::uint64_t seed,
                             const GenerationOptions& options = {});

/// Edges of a single constraint (the unit the generator parallelizes over).
std::vector<EdgeRecord> generate_constraint(const GraphConfiguration& config, const NodeLayout& layout,
                                            std::size_t constraint_index, RandomStream& rng,
                                            const GenerationOptions& options, ConstraintStats* stats = nullptr);

enum class GraphFormat { TSV, NTriples };

std::size_t write_graph(std::span<const EdgeRecord> edges, const std::vector<std::string>& predicates,
                        GraphFormat format, std::ostream& out);

/// Reads the TSV edge-list format written by write_graph.
GraphInstance read_graph_tsv(std::istream& in);

}  // namespace pathbench
