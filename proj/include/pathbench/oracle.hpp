#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pathbench/config.hpp"
#include "pathbench/graphgen.hpp"
#include "pathbench/query.hpp"

namespace pathbench {

/// Binary relation over dense node indices, as sorted successor lists.
struct Relation {
    std::vector<std::vector<std::uint32_t>> succ;

    explicit Relation(std::size_t nodes = 0) : succ(nodes) {}
    std::size_t node_count() const noexcept { return succ.size(); }
    std::uint64_t pair_count() const;
    bool contains(std::uint32_t a, std::uint32_t b) const;
    Relation transposed() const;
    bool operator==(const Relation&) const = default;
};

Relation compose(const Relation& a, const Relation& b);
Relation unite(const Relation& a, const Relation& b);
/// Reflexive-transitive closure over every node of the universe.
Relation closure(const Relation& r);

/// Immutable index over a graph instance.
class OracleGraph {
public:
    explicit OracleGraph(const GraphInstance& g);

    std::size_t node_count() const noexcept { return ids_.size(); }
    std::uint64_t id_of(std::uint32_t dense) const { return ids_.at(dense); }
    /// Forward edges of a predicate; empty relation for unknown names.
    const Relation& edges(const std::string& predicate, bool inverse) const;

private:
    std::vector<std::uint64_t> ids_;
    std::unordered_map<std::string, std::pair<Relation, Relation>> by_predicate_;
    Relation empty_;
};

Relation evaluate_relation(const LabelPath& path, const OracleGraph& g);
Relation evaluate_relation(const RegularExpression& re, const OracleGraph& g);

/// Pairs of original node ids, sorted.
std::vector<std::pair<std::uint64_t, std::uint64_t>> evaluate_path(const RegularExpression& re, const OracleGraph& g);

/// Distinct head tuples in original ids, sorted. A Boolean query yields one
/// empty tuple when true and nothing when false.
struct ResultSet {
    std::size_t arity = 0;
    std::vector<std::vector<std::uint64_t>> tuples;
};

ResultSet evaluate_query(const Query& q, const OracleGraph& g);
std::uint64_t count_results(const Query& q, const OracleGraph& g);

struct RegressionResult {
    double alpha = 0.0;
    double beta = 0.0;
    int points_used = 0;
};

/// Least squares of log(count) on log(size) over nonzero counts; count ~ beta * size^alpha. More than
/// half zero counts classifies the query as constant (alpha 0). Throws
/// InsufficientData with fewer than two nonzero points otherwise.
RegressionResult regress_log_log(std::span<const double> sizes, std::span<const double> counts);

/// Seed of the instance generated for `size` during estimation.
std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t size);

/// Result counts of every query on one generated instance per size: [size][query].
std::vector<std::vector<std::uint64_t>> measure_counts(const std::vector<Query>& queries,
                                                       const GraphConfiguration& config,
                                                       const std::vector<std::uint64_t>& sizes, std::uint64_t seed,
                                                       unsigned threads = 1);

RegressionResult estimate_alpha(const Query& q, const GraphConfiguration& config,
                                const std::vector<std::uint64_t>& sizes, std::uint64_t seed);

}  // namespace pathbench
