#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "pathbench/config.hpp"
#include "pathbench/graphgen.hpp"
#include "support.hpp"

using namespace pathbench;

namespace {

// Two types A, B (half of n each) and one predicate p from A to B.
GraphConfiguration two_types(std::uint64_t n, DegreeDistribution in, DegreeDistribution out) {
    GraphConfiguration g;
    g.n = n;
    g.predicates = {{"p"}};
    g.node_types = {{"A", Proportion{0.5}}, {"B", Proportion{0.5}}};
    g.constraints = {{"A", "B", "p", in, out}};
    validate_graph_config(g);
    return g;
}

std::map<std::uint64_t, std::uint64_t> out_degrees(const GraphInstance& g) {
    std::map<std::uint64_t, std::uint64_t> d;
    for (const auto& e : g.edges) ++d[e.source];
    return d;
}

}  // namespace

TEST_CASE("edge count is the shorter slot vector") {
    const auto cfg = two_types(20, DegreeDistribution::uniform(1, 1), DegreeDistribution::uniform(2, 2));
    const auto layout = resolve_node_counts(cfg);
    RandomStream rng(1);
    ConstraintStats stats;
    const auto edges = generate_constraint(cfg, layout, 0, rng, {}, &stats);
    CHECK(stats.source_slots == 20);
    CHECK(stats.target_slots == 10);
    CHECK(stats.emitted == 10);
    CHECK(edges.size() == stats.written);
    CHECK(stats.written <= 10);
    // Every target slot is used exactly once before dedup, so in-degree is at most one.
    std::map<std::uint64_t, int> in;
    for (const auto& e : edges) CHECK(++in[e.target] == 1);
}

TEST_CASE("uniform(1,1) out-degree with a nonspecified in side") {
    const auto cfg = two_types(2000, DegreeDistribution::non_specified(), DegreeDistribution::uniform(1, 1));
    const auto g = generate_graph(cfg, 4);
    CHECK(g.edges.size() == 1000);
    const auto d = out_degrees(g);
    CHECK(d.size() == 1000);
    for (const auto& [src, deg] : d) REQUIRE(deg == 1);
    for (const auto& e : g.edges) {
        REQUIRE(g.layout.at("A").contains(e.source));
        REQUIRE(g.layout.at("B").contains(e.target));
    }
}

TEST_CASE("out-degree follows the requested law") {
    SUBCASE("uniform(1,3) chi-square") {
        GenerationOptions opts;
        opts.allow_multi_edges = true;
        const auto cfg = two_types(60000, DegreeDistribution::non_specified(), DegreeDistribution::uniform(1, 3));
        const auto g = generate_graph(cfg, 9, opts);
        std::map<std::uint64_t, double> freq;
        for (const auto& [src, deg] : out_degrees(g)) freq[deg] += 1;
        double chi2 = 0;
        for (std::uint64_t k = 1; k <= 3; ++k) {
            const double e = 30000.0 / 3;
            chi2 += (freq[k] - e) * (freq[k] - e) / e;
        }
        CHECK(freq.size() == 3);
        CHECK(chi2 < 13.8);  // 2 dof, 0.999 quantile
    }
    SUBCASE("zipfian head ratio") {
        GenerationOptions opts;
        opts.allow_multi_edges = true;
        const auto cfg = two_types(400000, DegreeDistribution::non_specified(), DegreeDistribution::zipfian(2.0));
        const auto g = generate_graph(cfg, 3, opts);
        std::map<std::uint64_t, double> freq;
        for (const auto& [src, deg] : out_degrees(g)) freq[deg] += 1;
        // f(1)/f(2) = 2^s and f(2)/f(4) = 2^s for a power law.
        CHECK(freq[1] / freq[2] == doctest::Approx(4.0).epsilon(0.08));
        CHECK(freq[2] / freq[4] == doctest::Approx(4.0).epsilon(0.15));
        CHECK(out_degrees(g).size() == 200000);
    }
    SUBCASE("gaussian in-degree mean") {
        GenerationOptions opts;
        opts.allow_multi_edges = true;
        const auto cfg = two_types(100000, DegreeDistribution::gaussian(3, 1), DegreeDistribution::non_specified());
        const auto g = generate_graph(cfg, 5, opts);
        CHECK(static_cast<double>(g.edges.size()) / 50000.0 == doctest::Approx(3.0).epsilon(0.01));
    }
}

TEST_CASE("gaussian fast path keeps the expected total") {
    GenerationOptions opts;
    opts.gaussian_fast_path = true;
    opts.allow_multi_edges = true;
    const auto cfg = two_types(10000, DegreeDistribution::gaussian(2.5, 1), DegreeDistribution::non_specified());
    const auto g = generate_graph(cfg, 5, opts);
    CHECK(g.edges.size() == 12500);
}

TEST_CASE("dedup removes repeated pairs") {
    // Two A nodes, one B node: every A slot points at the single B.
    GraphConfiguration g;
    g.n = 3;
    g.predicates = {{"p"}};
    g.node_types = {{"A", Fixed{2}}, {"B", Fixed{1}}};
    g.constraints = {{"A", "B", "p", DegreeDistribution::non_specified(), DegreeDistribution::uniform(3, 3)}};
    const auto plain = generate_graph(g, 1);
    CHECK(plain.edges.size() == 2);
    GenerationOptions multi;
    multi.allow_multi_edges = true;
    CHECK(generate_graph(g, 1, multi).edges.size() == 6);
}

TEST_CASE("five-node configuration") {
    const auto cfg = testing::small_config();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = generate_graph(cfg, seed);
        CHECK(g.node_count() == 5);
        CHECK(g.layout.at("T1").count == 3);
        CHECK(g.layout.at("T2").count == 1);
        CHECK(g.layout.at("T3").count == 1);
        for (const auto& e : g.edges) {
            REQUIRE(e.source >= 1);
            REQUIRE(e.target <= 5);
            if (g.predicates[e.predicate] == "a") {
                REQUIRE(e.source <= 3);
                REQUIRE(e.target <= 3);
            }
        }
    }
}

TEST_CASE("bib graph respects fixed degrees") {
    auto cfg = testing::bib_config();
    cfg.n = 4000;
    const auto g = generate_graph(cfg, 12);
    const auto& paper = g.layout.at("paper");
    const auto& conf = g.layout.at("conference");
    std::map<std::uint64_t, int> published;
    std::map<std::uint64_t, int> held;
    for (const auto& e : g.edges) {
        const auto& p = g.predicates[e.predicate];
        if (p == "publishedIn") {
            REQUIRE(paper.contains(e.source));
            REQUIRE(conf.contains(e.target));
            ++published[e.source];
        }
        if (p == "heldIn") {
            REQUIRE(conf.contains(e.source));
            REQUIRE(g.layout.at("city").contains(e.target));
            ++held[e.source];
        }
    }
    for (const auto& [k, v] : published) REQUIRE(v == 1);
    for (const auto& [k, v] : held) REQUIRE(v == 1);
    CHECK(g.layout.at("city").count == 100);
}

TEST_CASE("determinism across runs and thread counts") {
    auto cfg = testing::bib_config();
    cfg.n = 5000;
    const auto a = generate_graph(cfg, 77);
    const auto b = generate_graph(cfg, 77);
    GenerationOptions threaded;
    threaded.threads = 3;
    const auto c = generate_graph(cfg, 77, threaded);
    CHECK(a.edges == b.edges);
    CHECK(a.edges == c.edges);
    CHECK(generate_graph(cfg, 78).edges != a.edges);

    std::ostringstream sa;
    std::ostringstream sc;
    write_graph(a.edges, a.predicates, GraphFormat::TSV, sa);
    write_graph(c.edges, c.predicates, GraphFormat::TSV, sc);
    CHECK(sa.str() == sc.str());
}

TEST_CASE("edge list formats") {
    const std::vector<std::string> preds{"authors"};
    const std::vector<EdgeRecord> one{{123, 0, 456}};
    std::ostringstream tsv;
    CHECK(write_graph(one, preds, GraphFormat::TSV, tsv) == 1);
    CHECK(tsv.str() == "123 authors 456\n");
    std::ostringstream nt;
    write_graph(one, preds, GraphFormat::NTriples, nt);
    CHECK(nt.str() == "<http://example.org/n123> <http://example.org/p/authors> <http://example.org/n456> .\n");
    std::ostringstream empty;
    CHECK(write_graph({}, preds, GraphFormat::TSV, empty) == 0);
    CHECK(empty.str().empty());
}

TEST_CASE("tsv round trip") {
    const auto g = testing::small_graph();
    std::ostringstream out;
    write_graph(g.edges, g.predicates, GraphFormat::TSV, out);
    std::istringstream in(out.str());
    const auto back = read_graph_tsv(in);
    CHECK(back.loaded);
    CHECK(back.edges.size() == g.edges.size());
    CHECK(back.node_count() == 5);
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        CHECK(back.edges[i].source == g.edges[i].source);
        CHECK(back.edges[i].target == g.edges[i].target);
        CHECK(back.predicates[back.edges[i].predicate] == g.predicates[g.edges[i].predicate]);
    }
    std::istringstream bad("1 a\n");
    CHECK_THROWS(read_graph_tsv(bad));
}
