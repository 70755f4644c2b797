#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pathbench {

enum class DistributionKind { Uniform, Gaussian, Zipfian, NonSpecified };

/// Degree distribution attached to one side of an edge constraint.
///
/// Only the fields relevant to `kind` are meaningful. `kmax` caps the support
/// of a Zipfian draw; when absent the cap is the population on the opposite
/// side of the constraint.
struct DegreeDistribution {
    DistributionKind kind = DistributionKind::NonSpecified;
    std::int64_t min = 0;
    std::int64_t max = 0;
    double mu = 0.0;
    double sigma = 0.0;
    double s = 0.0;
    std::optional<std::uint64_t> kmax;

    static DegreeDistribution uniform(std::int64_t lo, std::int64_t hi);
    static DegreeDistribution gaussian(double mu, double sigma);
    static DegreeDistribution zipfian(double s, std::optional<std::uint64_t> kmax = std::nullopt);
    static DegreeDistribution non_specified();

    bool specified() const noexcept { return kind != DistributionKind::NonSpecified; }
    bool operator==(const DegreeDistribution&) const = default;
};

struct Predicate {
    std::string name;
    bool operator==(const Predicate&) const = default;
};

struct Proportion {
    double fraction = 0.0;
    bool operator==(const Proportion&) const = default;
};

struct Fixed {
    std::uint64_t count = 0;
    bool operator==(const Fixed&) const = default;
};

struct NodeType {
    std::string name;
    std::variant<Proportion, Fixed> count_constraint;

    bool is_fixed() const noexcept { return std::holds_alternative<Fixed>(count_constraint); }
    bool operator==(const NodeType&) const = default;
};

struct EdgeConstraint {
    std::string source_type;
    std::string target_type;
    std::string predicate;
    DegreeDistribution d_in;
    DegreeDistribution d_out;
    bool operator==(const EdgeConstraint&) const = default;
};

struct GraphConfiguration {
    std::uint64_t n = 0;
    std::vector<Predicate> predicates;
    std::vector<NodeType> node_types;
    std::vector<EdgeConstraint> constraints;

    std::optional<std::size_t> type_index(std::string_view name) const;
    std::optional<std::size_t> predicate_index(std::string_view name) const;
    bool operator==(const GraphConfiguration&) const = default;
};

/// Resolved population of one node type; ids are global and 1-based.
/// An empty population has `last_id == first_id - 1`.
struct TypeRange {
    std::string name;
    std::uint64_t count = 0;
    std::uint64_t first_id = 0;
    std::uint64_t last_id = 0;

    /// Global id of the j-th node of the type, j in [1, count].
    std::uint64_t id_of(std::uint64_t j) const noexcept { return first_id + j - 1; }
    bool contains(std::uint64_t id) const noexcept { return id >= first_id && id <= last_id; }
};

/// Node populations in declaration order.
struct NodeLayout {
    std::vector<TypeRange> ranges;

    const TypeRange& at(std::string_view type_name) const;
    std::uint64_t total() const noexcept;
};

struct Interval {
    int min = 1;
    int max = 1;
    bool operator==(const Interval&) const = default;
};

struct QuerySize {
    Interval rules;
    Interval conjuncts;
    Interval disjuncts;
    Interval path_length;
    bool operator==(const QuerySize&) const = default;
};

enum class Shape { Chain, Star, Cycle, StarChain };
enum class SelectivityClass { Constant, Linear, Quadratic };

std::string_view to_string(Shape shape);
std::string_view to_string(SelectivityClass cls);
std::optional<Shape> parse_shape(std::string_view text);
std::optional<SelectivityClass> parse_selectivity_class(std::string_view text);

struct WorkloadConfiguration {
    GraphConfiguration graph;
    std::uint64_t num_queries = 1;
    /// Allowed arities, sorted ascending, contiguous.
    std::vector<int> arity;
    std::vector<Shape> shapes;
    /// Empty when selectivity is not enforced.
    std::vector<SelectivityClass> selectivities;
    double recursion_probability = 0.0;
    QuerySize size;

    bool selectivity_enforced() const noexcept { return !selectivities.empty(); }
    bool operator==(const WorkloadConfiguration&) const = default;
};

GraphConfiguration parse_graph_config(std::string_view text);
WorkloadConfiguration parse_workload_config(std::string_view text, const GraphConfiguration& graph);

/// Checks every graph-configuration invariant; throws ValidationError.
void validate_graph_config(const GraphConfiguration& config);
void validate_workload_config(const WorkloadConfiguration& config);

std::string serialize_graph_config(const GraphConfiguration& config);
std::string serialize_workload_config(const WorkloadConfiguration& config);

NodeLayout resolve_node_counts(const GraphConfiguration& config);

GraphConfiguration load_graph_config(const std::filesystem::path& path);
WorkloadConfiguration load_workload_config(const std::filesystem::path& path, const GraphConfiguration& graph);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace pathbench
