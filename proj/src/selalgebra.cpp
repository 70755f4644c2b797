#include "pathbench/selalgebra.hpp"

#include "pathbench/errors.hpp"

namespace pathbench {

namespace {

constexpr SelOp E = SelOp::Eq;
constexpr SelOp L = SelOp::Lt;
constexpr SelOp G = SelOp::Gt;
constexpr SelOp D = SelOp::Diamond;
constexpr SelOp X = SelOp::Cross;

// Indexed [o2][o1]: the row is the right operand, the column the left one.
constexpr SelOp kDisjunction[5][5] = {
    {E, L, G, D, X},
    {L, L, D, D, X},
    {G, D, G, D, X},
    {D, D, D, D, X},
    {X, X, X, X, X},
};

constexpr SelOp kConcatenation[5][5] = {
    {E, L, G, D, X},
    {L, L, X, X, X},
    {G, D, G, D, X},
    {D, D, X, X, X},
    {X, X, X, X, X},
};

constexpr int idx(SelOp op) { return static_cast<int>(op); }

bool is_zipfian(const DegreeDistribution& d) { return d.kind == DistributionKind::Zipfian; }

const NodeType& declared_type(const GraphConfiguration& schema, const std::string& name) {
    auto i = schema.type_index(name);
    if (!i) throw ContractError("undeclared node type '" + name + "'");
    return schema.node_types[*i];
}

}  // namespace

std::string to_string(SizeClass c) { return c == SizeClass::One ? "1" : "N"; }

std::string to_string(SelOp op) {
    switch (op) {
        case SelOp::Eq: return "=";
        case SelOp::Lt: return "<";
        case SelOp::Gt: return ">";
        case SelOp::Diamond: return "<>";
        case SelOp::Cross: return "x";
    }
    return "?";
}

std::string to_string(const SelectivityTriple& t) {
    return "(" + to_string(t.left) + "," + to_string(t.op) + "," + to_string(t.right) + ")";
}

SizeClass type_size_class(const NodeType& t) { return t.is_fixed() ? SizeClass::One : SizeClass::N; }

SelectivityTriple epsilon_triple(const NodeType& t) {
    const auto c = type_size_class(t);
    return {c, SelOp::Eq, c};
}

SelectivityTriple mirror(const SelectivityTriple& t) {
    SelOp op = t.op;
    if (op == SelOp::Lt) {
        op = SelOp::Gt;
    } else if (op == SelOp::Gt) {
        op = SelOp::Lt;
    }
    return {t.right, op, t.left};
}

SelectivityTriple base_triple(const EdgeConstraint& constraint, Direction direction, const GraphConfiguration& schema) {
    const auto a = type_size_class(declared_type(schema, constraint.source_type));
    const auto b = type_size_class(declared_type(schema, constraint.target_type));
    SelectivityTriple t{a, SelOp::Eq, b};
    if (a == SizeClass::N && b == SizeClass::One) {
        t.op = SelOp::Gt;
    } else if (a == SizeClass::One && b == SizeClass::N) {
        t.op = SelOp::Lt;
    } else if (a == SizeClass::N && b == SizeClass::N) {
        const bool zout = is_zipfian(constraint.d_out);
        const bool zin = is_zipfian(constraint.d_in);
        if (zout && zin) {
            t.op = SelOp::Diamond;
        } else if (zout) {
            t.op = SelOp::Lt;
        } else if (zin) {
            t.op = SelOp::Gt;
        }
    }
    return direction == Direction::Forward ? t : mirror(t);
}

SelOp compose_disjunction(SelOp o1, SelOp o2) { return kDisjunction[idx(o2)][idx(o1)]; }

SelOp compose_concatenation(SelOp o1, SelOp o2) { return kConcatenation[idx(o2)][idx(o1)]; }

SelectivityTriple normalize(const SelectivityTriple& t) {
    const bool l1 = t.left == SizeClass::One;
    const bool r1 = t.right == SizeClass::One;
    if (l1 && r1) return {t.left, SelOp::Eq, t.right};
    if (l1) return {t.left, SelOp::Lt, t.right};
    if (r1) return {t.left, SelOp::Gt, t.right};
    return t;
}

bool is_normalized(const SelectivityTriple& t) { return normalize(t) == t; }

SelectivityTriple concat_triples(const SelectivityTriple& t1, const SelectivityTriple& t2) {
    if (t1.right != t2.left) {
        throw ContractError("cannot concatenate " + to_string(t1) + " with " + to_string(t2));
    }
    return normalize({t1.left, compose_concatenation(t1.op, t2.op), t2.right});
}

SelectivityTriple disjoin_triples(const SelectivityTriple& t1, const SelectivityTriple& t2) {
    if (t1.left != t2.left || t1.right != t2.right) {
        throw ContractError("cannot disjoin " + to_string(t1) + " with " + to_string(t2));
    }
    return normalize({t1.left, compose_disjunction(t1.op, t2.op), t1.right});
}

SelectivityTriple star_triple(const SelectivityTriple& t, bool same_endpoint_type) {
    if (!same_endpoint_type) throw ContractError("star needs equal input and output types");
    return concat_triples(t, t);
}

int alpha_hat(const SelectivityTriple& t) {
    if (t == SelectivityTriple{SizeClass::One, SelOp::Eq, SizeClass::One}) return 0;
    if (t == SelectivityTriple{SizeClass::N, SelOp::Cross, SizeClass::N}) return 2;
    return 1;
}

int alpha_hat(SelectivityClass cls) {
    switch (cls) {
        case SelectivityClass::Constant: return 0;
        case SelectivityClass::Linear: return 1;
        case SelectivityClass::Quadratic: return 2;
    }
    return 1;
}

bool in_class(const SelectivityTriple& t, SelectivityClass cls) { return alpha_hat(t) == alpha_hat(cls); }

SelectivityClass class_of(const SelectivityTriple& t) {
    switch (alpha_hat(t)) {
        case 0: return SelectivityClass::Constant;
        case 2: return SelectivityClass::Quadratic;
        default: return SelectivityClass::Linear;
    }
}

FanBounds fan_bounds(SelOp op) {
    switch (op) {
        case SelOp::Eq: return {true, true};
        case SelOp::Lt: return {false, true};
        case SelOp::Gt: return {true, false};
        case SelOp::Diamond:
        case SelOp::Cross: return {false, false};
    }
    return {false, false};
}

const std::array<SelectivityTriple, 8>& legal_triples() {
    static const std::array<SelectivityTriple, 8> all = [] {
        std::array<SelectivityTriple, 8> out{};
        std::size_t i = 0;
        out[i++] = {SizeClass::One, SelOp::Eq, SizeClass::One};
        out[i++] = {SizeClass::One, SelOp::Lt, SizeClass::N};
        out[i++] = {SizeClass::N, SelOp::Gt, SizeClass::One};
        for (auto op : kAllOps) out[i++] = {SizeClass::N, op, SizeClass::N};
        return out;
    }();
    return all;
}

}  // namespace pathbench
