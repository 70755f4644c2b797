#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <sstream>

#include "pathbench/errors.hpp"
#include "pathbench/selstructs.hpp"
#include "support.hpp"

using namespace pathbench;

namespace {

constexpr auto ONE = SizeClass::One;
constexpr auto N = SizeClass::N;

std::uint32_t node(const SchemaGraph& g, std::uint32_t type, SelectivityTriple t) {
    const auto id = g.find({type, t});
    REQUIRE_MESSAGE(id.has_value(), "missing schema node ", type, " ", to_string(t));
    return *id;
}

bool has_arc(const SchemaGraph& g, std::uint32_t from, Symbol s, std::uint32_t to) {
    for (const auto& a : g.out(from)) {
        if (a.label == s && a.to == to) return true;
    }
    return false;
}

// Every label walk of exactly `len` steps from `from`, by enumeration.
void walks(const SchemaGraph& g, std::uint32_t from, std::uint32_t len, std::vector<Symbol>& prefix,
           std::vector<std::pair<std::vector<Symbol>, std::uint32_t>>& out) {
    if (len == 0) {
        out.emplace_back(prefix, from);
        return;
    }
    for (const auto& a : g.out(from)) {
        prefix.push_back(a.label);
        walks(g, a.to, len - 1, prefix, out);
        prefix.pop_back();
    }
}

std::vector<std::pair<std::vector<Symbol>, std::uint32_t>> all_walks(const SchemaGraph& g, std::uint32_t from,
                                                                       std::uint32_t len) {
    std::vector<std::pair<std::vector<Symbol>, std::uint32_t>> out;
    std::vector<Symbol> prefix;
    walks(g, from, len, prefix, out);
    return out;
}

GraphConfiguration line_schema() {
    // A (grows) --p--> C (one node), nothing else.
    GraphConfiguration g;
    g.n = 50;
    g.predicates = {{"p"}};
    g.node_types = {{"A", Proportion{0.5}}, {"C", Fixed{1}}};
    g.constraints = {{"A", "C", "p", DegreeDistribution::non_specified(), DegreeDistribution::uniform(1, 1)}};
    return g;
}

}  // namespace

TEST_CASE("schema graph of the running example") {
    const auto cfg = testing::small_config();
    const auto g = build_schema_graph(cfg);
    const Symbol a{0, false}, a_inv{0, true}, b{1, false}, b_inv{1, true};
    const auto t1_eq = node(g, 0, {N, SelOp::Eq, N});
    const auto t1_lt = node(g, 0, {N, SelOp::Lt, N});
    const auto t1_dm = node(g, 0, {N, SelOp::Diamond, N});
    const auto t2_eq = node(g, 1, {N, SelOp::Eq, N});
    const auto t3_gt = node(g, 2, {N, SelOp::Gt, ONE});
    const auto t2_x = node(g, 1, {N, SelOp::Cross, N});
    CHECK(g.seed(0) == t1_eq);
    CHECK(g.seed(1) == t2_eq);
    CHECK(g.nodes()[g.seed(2)].triple == SelectivityTriple{ONE, SelOp::Eq, ONE});

    CHECK(has_arc(g, t1_eq, a, t1_lt));
    CHECK(has_arc(g, t1_lt, a_inv, t1_dm));
    CHECK(has_arc(g, t1_eq, b, t2_eq));
    CHECK(has_arc(g, t2_eq, b_inv, t1_eq));
    CHECK(has_arc(g, t2_eq, b, t3_gt));
    CHECK(has_arc(g, t3_gt, b_inv, t2_x));
    CHECK(has_arc(g, t2_x, b, t3_gt));
    CHECK(has_arc(g, t1_dm, a_inv, t1_dm));
    CHECK(has_arc(g, t1_lt, a, t1_lt));
    CHECK(has_arc(g, t2_eq, b, t2_eq));
}

TEST_CASE("schema graph arcs follow the algebra, and all of them are present") {
    for (const auto& cfg : {testing::small_config(), testing::bib_config(), line_schema()}) {
        const auto g = build_schema_graph(cfg);
        std::set<std::uint32_t> types_seen;
        for (std::uint32_t v = 0; v < g.size(); ++v) {
            const auto& n = g.nodes()[v];
            types_seen.insert(n.type);
            CHECK(is_normalized(n.triple));
            CHECK(n.triple.right == type_size_class(cfg.node_types[n.type]));
            std::size_t expected = 0;
            for (const auto& c : cfg.constraints) {
                const auto src = static_cast<std::uint32_t>(*cfg.type_index(c.source_type));
                const auto trg = static_cast<std::uint32_t>(*cfg.type_index(c.target_type));
                const auto p = static_cast<std::uint32_t>(*cfg.predicate_index(c.predicate));
                if (src == n.type) {
                    ++expected;
                    const auto t = normalize(concat_triples(n.triple, base_triple(c, Direction::Forward, cfg)));
                    const auto to = g.find({trg, t});
                    REQUIRE(to.has_value());
                    CHECK(has_arc(g, v, {p, false}, *to));
                }
                if (trg == n.type) {
                    ++expected;
                    const auto t = normalize(concat_triples(n.triple, base_triple(c, Direction::Inverse, cfg)));
                    const auto to = g.find({src, t});
                    REQUIRE(to.has_value());
                    CHECK(has_arc(g, v, {p, true}, *to));
                }
            }
            CHECK(g.out(v).size() == expected);
        }
        CHECK(types_seen.size() == cfg.node_types.size());
    }
}

TEST_CASE("schema without constraints") {
    auto cfg = line_schema();
    cfg.constraints.clear();
    const auto g = build_schema_graph(cfg);
    CHECK(g.size() == 2);
    CHECK(g.arc_count() == 0);
}

TEST_CASE("distance matrix") {
    const auto cfg = testing::small_config();
    const auto g = build_schema_graph(cfg);
    const auto d = build_distance_matrix(g);
    const auto t1_eq = g.seed(0);
    const auto t1_dm = node(g, 0, {N, SelOp::Diamond, N});
    const auto t2_x = node(g, 1, {N, SelOp::Cross, N});
    CHECK(d(t1_eq, t1_eq) == 0);
    CHECK(d(t1_eq, t1_dm) == 2);  // a . a-
    CHECK(d(t1_eq, t2_x) == 3);   // b . b . b-
    CHECK(d(t2_x, t1_eq) == kUnreachable);

    // Agrees with walk enumeration up to length 4.
    for (std::uint32_t from = 0; from < g.size(); ++from) {
        std::map<std::uint32_t, std::uint32_t> best{{from, 0}};
        for (std::uint32_t len = 1; len <= 4; ++len) {
            for (const auto& [w, end] : all_walks(g, from, len)) best.emplace(end, len);
        }
        for (std::uint32_t to = 0; to < g.size(); ++to) {
            const auto it = best.find(to);
            if (it != best.end()) {
                CHECK(d(from, to) == it->second);
            } else {
                CHECK(d(from, to) > 4);
            }
        }
    }
}

TEST_CASE("selectivity graph against walk enumeration") {
    const auto cfg = testing::small_config();
    const auto g = build_schema_graph(cfg);
    for (const Interval len : {Interval{1, 1}, Interval{1, 4}, Interval{2, 3}, Interval{3, 3}}) {
        CAPTURE(len.min);
        CAPTURE(len.max);
        const auto sel = build_selectivity_graph(g, len);
        for (std::uint32_t from = 0; from < g.size(); ++from) {
            std::set<std::uint32_t> reach;
            for (int l = len.min; l <= len.max; ++l) {
                for (const auto& [w, end] : all_walks(g, from, static_cast<std::uint32_t>(l))) reach.insert(end);
            }
            for (std::uint32_t to = 0; to < g.size(); ++to) CHECK(sel.has_edge(from, to) == (reach.count(to) == 1));
            CHECK(sel.successors(from).size() == reach.size());
        }
    }
    // A single-step interval keeps exactly the schema graph's arcs.
    const auto one = build_selectivity_graph(g, {1, 1});
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        std::set<std::uint32_t> targets;
        for (const auto& a : g.out(v)) targets.insert(a.to);
        CHECK(std::set<std::uint32_t>(one.successors(v).begin(), one.successors(v).end()) == targets);
    }
    const auto wide = build_selectivity_graph(g, {1, 4});
    CHECK(wide.has_edge(g.seed(0), node(g, 1, {N, SelOp::Cross, N})));
    CHECK_FALSE(wide.has_edge(node(g, 1, {N, SelOp::Cross, N}), g.seed(0)));
}

TEST_CASE("path counts") {
    SUBCASE("two-node line") {
        const auto cfg = line_schema();
        const auto g = build_schema_graph(cfg);
        const auto n = g.seed(0);
        const auto m = node(g, 1, {N, SelOp::Gt, ONE});
        std::vector<bool> target(g.size(), false);
        target[m] = true;
        const auto counts = saturate_path_counts(g, target, 3);
        CHECK(counts(n, 1) == 1);
        CHECK(counts(n, 0) == 0);
        CHECK(counts(m, 0) == 1);
        CHECK(counts.max_length() == 3);
    }
    SUBCASE("agree with enumeration for every class") {
        for (const auto& cfg : {testing::small_config(), testing::bib_config()}) {
            const auto g = build_schema_graph(cfg);
            for (auto cls : {SelectivityClass::Constant, SelectivityClass::Linear, SelectivityClass::Quadratic}) {
                const auto counts = saturate_path_counts(g, cls, 4);
                for (std::uint32_t v = 0; v < g.size(); ++v) {
                    for (std::uint32_t len = 0; len <= 4; ++len) {
                        std::uint64_t brute = 0;
                        for (const auto& [w, end] : all_walks(g, v, len)) brute += in_class(g.nodes()[end].triple, cls);
                        REQUIRE(counts(v, len) == brute);
                    }
                }
            }
        }
    }
}

TEST_CASE("path drawing") {
    const auto cfg = testing::small_config();
    const auto g = build_schema_graph(cfg);

    SUBCASE("uniform over qualifying walks") {
        const auto counts = saturate_path_counts(g, SelectivityClass::Quadratic, 4);
        const auto start = g.seed(0);
        // Walks can share labels and end, so weight outcomes by multiplicity.
        using Outcome = std::pair<std::vector<Symbol>, std::uint32_t>;
        std::map<Outcome, int> multiplicity;
        std::size_t total = 0;
        for (const auto& w : all_walks(g, start, 4)) {
            if (!in_class(g.nodes()[w.second].triple, SelectivityClass::Quadratic)) continue;
            ++multiplicity[w];
            ++total;
        }
        REQUIRE(multiplicity.size() >= 2);
        REQUIRE(counts(start, 4) == total);
        RandomStream rng(31);
        const int trials = 2000 * static_cast<int>(total);
        std::map<Outcome, int> seen;
        for (int i = 0; i < trials; ++i) {
            const auto p = draw_path(g, counts, 4, rng, start);
            REQUIRE(p.start == start);
            const Outcome o{p.labels, p.end};
            REQUIRE(multiplicity.count(o) == 1);
            ++seen[o];
        }
        double chi2 = 0;
        for (const auto& [o, m] : multiplicity) {
            const double e = 2000.0 * m;
            chi2 += (seen[o] - e) * (seen[o] - e) / e;
        }
        // Loose bound: mean is dof, sd is sqrt(2 dof).
        const double dof = static_cast<double>(multiplicity.size() - 1);
        CHECK(chi2 < dof + 6 * std::sqrt(2 * dof));
    }
    SUBCASE("free start draws from any node") {
        const auto counts = saturate_path_counts(g, SelectivityClass::Linear, 2);
        RandomStream rng(2);
        for (int i = 0; i < 100; ++i) {
            const auto p = draw_path(g, counts, 2, rng);
            REQUIRE(p.labels.size() == 2);
            REQUIRE(in_class(g.nodes()[p.end].triple, SelectivityClass::Linear));
        }
    }
    SUBCASE("length zero") {
        const auto counts = saturate_path_counts(g, SelectivityClass::Linear, 2);
        RandomStream rng(2);
        const auto p = draw_path(g, counts, 0, rng, g.seed(0));
        CHECK(p.labels.empty());
        CHECK(p.end == g.seed(0));
    }
    SUBCASE("forced path") {
        const auto line = build_schema_graph(line_schema());
        std::vector<bool> target(line.size(), false);
        // seed(A) -p-> (C,(N,>,1)) -p- -> (A,(N,x,N)): one walk of length two.
        const auto end = node(line, 0, {N, SelOp::Cross, N});
        target[end] = true;
        const auto counts = saturate_path_counts(line, target, 2);
        RandomStream rng(4);
        for (int i = 0; i < 50; ++i) {
            const auto p = draw_path(line, counts, 2, rng, line.seed(0));
            REQUIRE(p.labels == std::vector<Symbol>{{0, false}, {0, true}});
            REQUIRE(p.end == end);
        }
        CHECK_THROWS_AS(draw_path(line, counts, 1, rng, line.seed(0)), NoPathError);
    }
}

TEST_CASE("big-number helpers") {
    RandomStream rng(6);
    const BigCount bound = BigCount(1) << 100;
    for (int i = 0; i < 200; ++i) {
        const auto x = uniform_below(bound, rng);
        REQUIRE(x >= 0);
        REQUIRE(x < bound);
    }
    int small[3] = {0, 0, 0};
    for (int i = 0; i < 3000; ++i) ++small[static_cast<int>(uniform_below(3, rng))];
    for (int c : small) CHECK(std::abs(c - 1000) < 150);

    const std::vector<BigCount> w{0, 3, 0, 1};
    int hits[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4000; ++i) ++hits[weighted_index(w, rng)];
    CHECK(hits[0] == 0);
    CHECK(hits[2] == 0);
    CHECK(std::abs(hits[1] - 3000) < 150);
}

TEST_CASE("diagnostic dumps mention every node") {
    const auto g = build_schema_graph(testing::small_config());
    std::ostringstream out;
    dump_schema_graph(g, out);
    for (std::uint32_t v = 0; v < g.size(); ++v) CHECK(out.str().find(describe(g, v)) != std::string::npos);
}
