#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pathbench/config.hpp"

namespace pathbench {

/// One predicate occurrence inside a path, possibly traversed backwards.
struct Atom {
    std::string predicate;
    bool inverse = false;

    bool operator==(const Atom&) const = default;
};

using LabelPath = std::vector<Atom>;

/// (P1 + ... + Pk), or its Kleene closure when `star` is set.
struct RegularExpression {
    std::vector<LabelPath> disjuncts;
    bool star = false;

    bool operator==(const RegularExpression&) const = default;
};

struct Conjunct {
    std::string from;
    RegularExpression regex;
    std::string to;

    bool operator==(const Conjunct&) const = default;
};

struct QueryRule {
    std::vector<std::string> head;
    std::vector<Conjunct> body;

    bool operator==(const QueryRule&) const = default;
    /// Distinct variables of the body in order of first appearance.
    std::vector<std::string> variables() const;
};

struct Query {
    std::uint64_t id = 0;
    Shape shape = Shape::Chain;
    std::optional<SelectivityClass> selectivity;
    int relaxations = 0;
    std::vector<QueryRule> rules;

    bool operator==(const Query&) const = default;
    const std::vector<std::string>& head() const { return rules.front().head; }
    std::size_t arity() const { return rules.front().head.size(); }
};

/// Checks structural invariants: non-empty rules and bodies, equal arities,
/// head variables occurring in their body. Throws ValidationError.
void validate_query(const Query& q);

std::string serialize_workload(const std::vector<Query>& queries);
std::vector<Query> parse_workload(std::string_view text);

/// Compact single-line rendering, e.g. `(?x1,?x3) <- (?x1, (a.b- + c)*, ?x2), ...`.
std::string to_string(const Query& q);

}  // namespace pathbench
