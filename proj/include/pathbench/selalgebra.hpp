#pragma once

#include <array>
#include <compare>
#include <string>

#include "pathbench/config.hpp"

namespace pathbench {

enum class SizeClass : std::uint8_t { One, N };
enum class SelOp : std::uint8_t { Eq, Lt, Gt, Diamond, Cross };
enum class Direction : std::uint8_t { Forward, Inverse };

inline constexpr std::array<SelOp, 5> kAllOps{SelOp::Eq, SelOp::Lt, SelOp::Gt, SelOp::Diamond, SelOp::Cross};

/// (left size class, operator, right size class).
struct SelectivityTriple {
    SizeClass left = SizeClass::N;
    SelOp op = SelOp::Eq;
    SizeClass right = SizeClass::N;

    auto operator<=>(const SelectivityTriple&) const = default;
};

std::string to_string(SizeClass c);
/// ASCII spelling: = < > <> x
std::string to_string(SelOp op);
std::string to_string(const SelectivityTriple& t);

SizeClass type_size_class(const NodeType& t);
SelectivityTriple epsilon_triple(const NodeType& t);

/// Triple of a single label traversed forward or backward along `constraint`.
SelectivityTriple base_triple(const EdgeConstraint& constraint, Direction direction, const GraphConfiguration& schema);

/// Swaps sides and turns < into > (and back).
SelectivityTriple mirror(const SelectivityTriple& t);

SelOp compose_disjunction(SelOp o1, SelOp o2);
/// o1 first, then o2.
SelOp compose_concatenation(SelOp o1, SelOp o2);

SelectivityTriple normalize(const SelectivityTriple& t);
bool is_normalized(const SelectivityTriple& t);

/// Throws ContractError when t1.right != t2.left.
SelectivityTriple concat_triples(const SelectivityTriple& t1, const SelectivityTriple& t2);
/// Throws ContractError when the endpoint classes differ.
SelectivityTriple disjoin_triples(const SelectivityTriple& t1, const SelectivityTriple& t2);
/// Throws ContractError unless same_endpoint_type.
SelectivityTriple star_triple(const SelectivityTriple& t, bool same_endpoint_type);

int alpha_hat(const SelectivityTriple& t);

/// Class membership used by the instantiation machinery:
/// constant is (1,=,1), quadratic is (N,x,N), linear is everything else.
bool in_class(const SelectivityTriple& t, SelectivityClass cls);
SelectivityClass class_of(const SelectivityTriple& t);
int alpha_hat(SelectivityClass cls);

/// The 8 normalized triples, in a fixed order.
const std::array<SelectivityTriple, 8>& legal_triples();

/// Whether the answers of one source (out) or one target (in) stay bounded as
/// the graph grows. `<` fans out and `>` fans in.
struct FanBounds {
    bool out = true;
    bool in = true;
    bool operator==(const FanBounds&) const = default;
};
FanBounds fan_bounds(SelOp op);

}  // namespace pathbench
