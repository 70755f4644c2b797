#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "pathbench/config.hpp"
#include "pathbench/distributions.hpp"
#include "pathbench/selalgebra.hpp"

namespace pathbench {

using BigCount = boost::multiprecision::cpp_int;

/// A predicate traversed forward (a) or backward (a-).
struct Symbol {
    std::uint32_t predicate = 0;
    bool inverse = false;

    auto operator<=>(const Symbol&) const = default;
};

struct SchemaNode {
    std::uint32_t type = 0;
    SelectivityTriple triple;

    auto operator<=>(const SchemaNode&) const = default;
};

struct SchemaArc {
    Symbol label;
    std::uint32_t to = 0;
};

/// Nodes are (type, triple) pairs reachable from the epsilon seeds; an arc
/// records how appending one symbol changes the triple.
class SchemaGraph {
public:
    const std::vector<SchemaNode>& nodes() const noexcept { return nodes_; }
    const std::vector<SchemaArc>& out(std::uint32_t node) const { return out_.at(node); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t arc_count() const noexcept;

    std::optional<std::uint32_t> find(const SchemaNode& n) const;
    /// Node (T, epsilon(T)).
    std::uint32_t seed(std::uint32_t type) const { return seeds_.at(type); }
    std::size_t type_count() const noexcept { return seeds_.size(); }

    const GraphConfiguration& schema() const noexcept { return schema_; }

private:
    friend SchemaGraph build_schema_graph(const GraphConfiguration& schema);

    std::uint32_t intern(const SchemaNode& n);

    GraphConfiguration schema_;
    std::vector<SchemaNode> nodes_;
    std::vector<std::vector<SchemaArc>> out_;
    std::vector<std::uint32_t> seeds_;
    std::map<SchemaNode, std::uint32_t> index_;
};

SchemaGraph build_schema_graph(const GraphConfiguration& schema);

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// All-pairs shortest path lengths; kUnreachable when no path exists.
class DistanceMatrix {
public:
    std::uint32_t operator()(std::uint32_t from, std::uint32_t to) const { return dist_[from * n_ + to]; }
    std::size_t size() const noexcept { return n_; }

private:
    friend DistanceMatrix build_distance_matrix(const SchemaGraph& g);
    std::size_t n_ = 0;
    std::vector<std::uint32_t> dist_;
};

DistanceMatrix build_distance_matrix(const SchemaGraph& g);

/// Unlabeled graph over schema nodes: an arc n -> n' whenever some walk of
/// length within [lmin, lmax] leads from n to n'.
class SelectivityGraph {
public:
    bool has_edge(std::uint32_t from, std::uint32_t to) const { return adj_[from * n_ + to] != 0; }
    const std::vector<std::uint32_t>& successors(std::uint32_t from) const { return succ_.at(from); }
    std::size_t size() const noexcept { return n_; }
    Interval lengths() const noexcept { return lengths_; }

private:
    friend SelectivityGraph build_selectivity_graph(const SchemaGraph& g, Interval lengths);
    std::size_t n_ = 0;
    Interval lengths_;
    std::vector<char> adj_;
    std::vector<std::vector<std::uint32_t>> succ_;
};

SelectivityGraph build_selectivity_graph(const SchemaGraph& g, Interval lengths);

/// Walks of exactly `length` steps from `from` (lengths[i] true for every i that works).
std::vector<bool> walk_lengths(const SchemaGraph& g, std::uint32_t from, std::uint32_t to, std::uint32_t max_length);

/// nb_path(n, i): number of label walks of i steps from n that end on a target node.
class PathCountTable {
public:
    const BigCount& operator()(std::uint32_t node, std::uint32_t length) const { return counts_.at(length).at(node); }
    std::uint32_t max_length() const noexcept { return static_cast<std::uint32_t>(counts_.size()) - 1; }
    bool is_target(std::uint32_t node) const { return target_.at(node); }

private:
    friend PathCountTable saturate_path_counts(const SchemaGraph& g, const std::vector<bool>& target,
                                               std::uint32_t max_length);
    std::vector<std::vector<BigCount>> counts_;
    std::vector<bool> target_;
};

PathCountTable saturate_path_counts(const SchemaGraph& g, const std::vector<bool>& target, std::uint32_t max_length);
PathCountTable saturate_path_counts(const SchemaGraph& g, SelectivityClass target, std::uint32_t max_length);

struct DrawnPath {
    std::uint32_t start = 0;
    std::uint32_t end = 0;
    std::vector<Symbol> labels;
};

/// Uniform over all counted walks of `length` steps (from `start` when given).
/// Throws NoPathError when there is none.
DrawnPath draw_path(const SchemaGraph& g, const PathCountTable& counts, std::uint32_t length, RandomStream& rng,
                    std::optional<std::uint32_t> start = std::nullopt);

/// Uniform integer in [0, bound); bound must be positive.
BigCount uniform_below(const BigCount& bound, RandomStream& rng);

/// Index chosen with probability weights[i] / sum(weights).
std::size_t weighted_index(const std::vector<BigCount>& weights, RandomStream& rng);

std::string describe(const SchemaGraph& g, std::uint32_t node);
std::string describe(const SchemaGraph& g, Symbol s);

/// Plain-text adjacency listing, for diagnostics.
void dump_schema_graph(const SchemaGraph& g, std::ostream& out);
void dump_selectivity_graph(const SchemaGraph& g, const SelectivityGraph& sel, std::ostream& out);

}  // namespace pathbench
