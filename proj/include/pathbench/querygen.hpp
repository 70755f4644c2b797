#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "pathbench/config.hpp"
#include "pathbench/distributions.hpp"
#include "pathbench/errors.hpp"
#include "pathbench/query.hpp"
#include "pathbench/selstructs.hpp"

namespace pathbench {

struct SkeletonConjunct {
    int from = 0;  // variable index, x1 is 0
    int to = 0;
};

/// Placeholder layout of one rule. `chains` lists conjunct indices per
/// chain; chain 0 runs between the designated endpoints.
struct QuerySkeleton {
    Shape shape = Shape::Chain;
    int variable_count = 0;
    std::vector<SkeletonConjunct> conjuncts;
    std::vector<std::vector<int>> chains;
    int start_var = 0;
    int end_var = 0;
};

/// Throws ContractError when the shape needs more conjuncts than size allows
/// (star and cycle need 2, starchain 3).
QuerySkeleton get_query_skeleton(Shape shape, const QuerySize& size, RandomStream& rng);

/// Projection variables (indices). With selectivity enforced: the designated endpoints.
std::vector<int> add_projection_variables(const QuerySkeleton& skeleton, const std::vector<int>& arity,
                                          bool selectivity_enforced, RandomStream& rng);

/// Per placeholder: the disjunct lengths requested.
using PathSkeleton = std::vector<int>;
std::vector<PathSkeleton> build_path_skeleton(const QuerySkeleton& skeleton, const QuerySize& size,
                                              RandomStream& rng);

struct ConjunctType {
    std::uint32_t source_type = 0;
    SelectivityTriple triple;  // standalone triple of the conjunct
    std::uint32_t target_type = 0;
    bool starred = false;
    std::uint32_t target_node = 0;  // schema node the disjunct paths must reach from seed(source_type)
};

/// Precomputed per (schema, length interval); immutable and shareable.
class GenerationContext {
public:
    GenerationContext(const GraphConfiguration& schema, Interval lengths, int relaxation_margin = 2);

    const GraphConfiguration& schema() const noexcept { return graph_.schema(); }
    const SchemaGraph& schema_graph() const noexcept { return graph_; }
    const SelectivityGraph& selectivity_graph() const noexcept { return sel_; }
    Interval lengths() const noexcept { return lengths_; }
    int relaxation_margin() const noexcept { return margin_; }
    std::uint32_t max_length() const noexcept { return static_cast<std::uint32_t>(lengths_.max + margin_); }

    /// Walk counts towards a single schema node.
    const PathCountTable& counts_to(std::uint32_t node) const { return *to_node_.at(node); }
    /// A type can carry a starred conjunct when seed(T) reaches itself.
    bool star_capable(std::uint32_t type) const;

    std::size_t state_count() const noexcept { return graph_.type_count() * 8; }
    std::uint32_t state_of(std::uint32_t type, const SelectivityTriple& t) const;
    std::uint32_t state_type(std::uint32_t state) const noexcept { return state / 8; }
    SelectivityTriple state_triple(std::uint32_t state) const;

private:
    SchemaGraph graph_;
    SelectivityGraph sel_;
    Interval lengths_;
    int margin_;
    std::vector<std::unique_ptr<PathCountTable>> to_node_;
};

/// Types and standalone triples for every placeholder. Throws InstantiationError.
std::vector<ConjunctType> assign_conjunct_types(const QuerySkeleton& skeleton,
                                                std::optional<SelectivityClass> target_class,
                                                const GenerationContext& ctx, double recursion_probability,
                                                RandomStream& rng);

struct InstantiatedRule {
    QueryRule rule;
    int relaxations = 0;
};

/// Draws label paths for every slot, relaxing lengths when needed.
/// Variables are named x1, x2, ... Throws InstantiationError.
InstantiatedRule instantiate_placeholders(const QuerySkeleton& skeleton, const std::vector<ConjunctType>& types,
                                          const std::vector<PathSkeleton>& paths, const std::vector<int>& head,
                                          const GenerationContext& ctx, RandomStream& rng);

/// Selectivity estimate recomputed from the query text over all type pairs
/// along the designated path of each rule; the maximum over rules.
/// nullopt when no type pair admits a match.
std::optional<int> audit_alpha_hat(const Query& q, const GraphConfiguration& schema);

struct QueryGenOptions {
    unsigned threads = 1;
    int retries = 50;
    int relaxation_margin = 2;
};

class WorkloadError : public Error {
public:
    WorkloadError(std::vector<Query> partial, std::vector<std::uint64_t> failed);
    const std::vector<Query>& partial() const noexcept { return partial_; }
    const std::vector<std::uint64_t>& failed() const noexcept { return failed_; }

private:
    std::vector<Query> partial_;
    std::vector<std::uint64_t> failed_;
};

/// Target class of each query index (equal blocks in constant, linear, quadratic order).
std::vector<std::optional<SelectivityClass>> class_quotas(const WorkloadConfiguration& cfg);

Query generate_query(const WorkloadConfiguration& cfg, const GenerationContext& ctx, std::uint64_t id,
                     std::optional<SelectivityClass> target, RandomStream& rng, int retries = 50);

std::vector<Query> generate_workload(const WorkloadConfiguration& cfg, std::uint64_t seed,
                                     const QueryGenOptions& options = {});

}  // namespace pathbench
