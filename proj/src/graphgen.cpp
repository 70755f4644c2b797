#include "pathbench/graphgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <thread>
#include <unordered_map>

#include "pathbench/errors.hpp"

namespace pathbench {

namespace {

// Slot vector for one side: `draw(D)` copies of each local index 1..population.
std::vector<std::uint32_t> degree_slots(const DegreeSampler& sampler, std::uint64_t population, RandomStream& rng) {
    std::vector<std::uint32_t> slots;
    slots.reserve(population);
    for (std::uint64_t j = 1; j <= population; ++j) {
        const auto d = sampler(rng);
        slots.insert(slots.end(), d, static_cast<std::uint32_t>(j));
    }
    return slots;
}

std::vector<std::uint32_t> uniform_slots(std::uint64_t population, std::uint64_t length, RandomStream& rng) {
    std::vector<std::uint32_t> slots(length);
    for (auto& s : slots) s = static_cast<std::uint32_t>(rng.uniform_int(1, population));
    return slots;
}

std::vector<std::uint32_t> side_slots(const DegreeDistribution& dist, std::uint64_t population,
                                      std::uint64_t opposite, RandomStream& rng, const GenerationOptions& options) {
    if (options.gaussian_fast_path && dist.kind == DistributionKind::Gaussian) {
        // Expected total only; endpoints land uniformly so per-node degrees stay centered on mu.
        const auto length = static_cast<std::uint64_t>(std::llround(static_cast<double>(population) * dist.mu));
        return uniform_slots(population, length, rng);
    }
    return degree_slots(DegreeSampler(dist, opposite), population, rng);
}

}  // namespace

std::vector<std::uint64_t> GraphInstance::node_universe() const {
    if (loaded) return loaded_nodes;
    std::vector<std::uint64_t> out(layout.total());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i + 1;
    return out;
}

std::uint64_t GraphInstance::node_count() const { return loaded ? loaded_nodes.size() : layout.total(); }

std::uint32_t GraphInstance::predicate_id(std::string_view name) const {
    for (std::size_t i = 0; i < predicates.size(); ++i) {
        if (predicates[i] == name) return static_cast<std::uint32_t>(i);
    }
    throw ContractError("unknown predicate '" + std::string(name) + "'");
}

std::vector<EdgeRecord> generate_constraint(const GraphConfiguration& config, const NodeLayout& layout,
                                            std::size_t constraint_index, RandomStream& rng,
                                            const GenerationOptions& options, ConstraintStats* stats) {
    const auto& c = config.constraints.at(constraint_index);
    if (!c.d_in.specified() && !c.d_out.specified()) {
        throw ContractError("constraint has no specified distribution");
    }
    const auto& src = layout.at(c.source_type);
    const auto& trg = layout.at(c.target_type);
    if (src.count > UINT32_MAX || trg.count > UINT32_MAX) throw ContractError("type population exceeds 2^32");
    const auto pred = static_cast<std::uint32_t>(*config.predicate_index(c.predicate));

    std::vector<std::uint32_t> v_src;
    std::vector<std::uint32_t> v_trg;
    if (src.count > 0 && trg.count > 0) {
        if (c.d_out.specified()) v_src = side_slots(c.d_out, src.count, trg.count, rng, options);
        if (c.d_in.specified()) v_trg = side_slots(c.d_in, trg.count, src.count, rng, options);
        if (!c.d_out.specified()) v_src = uniform_slots(src.count, v_trg.size(), rng);
        if (!c.d_in.specified()) v_trg = uniform_slots(trg.count, v_src.size(), rng);
    }
    // A uniform injection of the shorter side into the longer one; the same
    // pairing law as shuffling both sides and truncating, at O(m) swaps.
    const std::size_t m = std::min(v_src.size(), v_trg.size());
    if (v_src.size() > v_trg.size()) {
        partial_shuffle(std::span<std::uint32_t>(v_src), m, rng);
    } else {
        partial_shuffle(std::span<std::uint32_t>(v_trg), m, rng);
    }

    if (stats) {
        stats->constraint_index = constraint_index;
        stats->source_slots = v_src.size();
        stats->target_slots = v_trg.size();
        stats->emitted = m;
    }
    std::vector<EdgeRecord> edges;
    edges.reserve(m);
    if (options.allow_multi_edges) {
        for (std::size_t i = 0; i < m; ++i) edges.push_back({src.id_of(v_src[i]), pred, trg.id_of(v_trg[i])});
    } else {
        // Bucket by source (counting sort), then sort and dedup each bucket.
        std::vector<std::uint32_t> start(src.count + 2, 0);
        for (std::size_t i = 0; i < m; ++i) ++start[v_src[i] + 1];
        for (std::size_t j = 1; j < start.size(); ++j) start[j] += start[j - 1];
        std::vector<std::uint32_t> targets(m);
        {
            auto fill = start;
            for (std::size_t i = 0; i < m; ++i) targets[fill[v_src[i]]++] = v_trg[i];
        }
        for (std::uint64_t j = 1; j <= src.count; ++j) {
            const auto b = targets.begin() + start[j];
            const auto e = targets.begin() + start[j + 1];
            if (b == e) continue;
            std::sort(b, e);
            const auto s_id = src.id_of(static_cast<std::uint32_t>(j));
            for (auto it = b; it != e; ++it) {
                if (it != b && *it == *(it - 1)) continue;
                edges.push_back({s_id, pred, trg.id_of(*it)});
            }
        }
    }
    if (stats) stats->written = edges.size();
    return edges;
}

std::vector<ConstraintStats> generate_graph(const GraphConfiguration& config, std::uint64_t seed,
                                            const GenerationOptions& options, const EdgeSink& sink) {
    const NodeLayout layout = resolve_node_counts(config);
    const RandomStream root(seed);
    const std::size_t k = config.constraints.size();
    std::vector<ConstraintStats> stats(k);

    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1 || k <= 1) {
        for (std::size_t i = 0; i < k; ++i) {
            auto rng = root.child(i);
            auto edges = generate_constraint(config, layout, i, rng, options, &stats[i]);
            sink(edges);
        }
        return stats;
    }

    // Batches of `threads` constraints; each batch is flushed in index order.
    for (std::size_t begin = 0; begin < k; begin += threads) {
        const std::size_t end = std::min(k, begin + threads);
        std::vector<std::vector<EdgeRecord>> results(end - begin);
        std::vector<std::exception_ptr> errors(end - begin);
        std::vector<std::thread> pool;
        for (std::size_t i = begin; i < end; ++i) {
            pool.emplace_back([&, i] {
                try {
                    auto rng = root.child(i);
                    results[i - begin] = generate_constraint(config, layout, i, rng, options, &stats[i]);
                } catch (...) {
                    errors[i - begin] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (errors[i]) std::rethrow_exception(errors[i]);
            sink(results[i]);
        }
    }
    return stats;
}

GraphInstance generate_graph(const GraphConfiguration& config, std::uint64_t seed, const GenerationOptions& options) {
    GraphInstance g;
    for (const auto& p : config.predicates) g.predicates.push_back(p.name);
    g.layout = resolve_node_counts(config);
    generate_graph(config, seed, options,
                   [&](std::span<const EdgeRecord> batch) { g.edges.insert(g.edges.end(), batch.begin(), batch.end()); });
    return g;
}

std::size_t write_graph(std::span<const EdgeRecord> edges, const std::vector<std::string>& predicates,
                        GraphFormat format, std::ostream& out) {
    std::string buf;
    buf.reserve(1 << 16);
    char num[24];
    auto append_id = [&](std::uint64_t id) {
        auto [p, ec] = std::to_chars(num, num + sizeof(num), id);
        buf.append(num, p);
    };
    for (const auto& e : edges) {
        const auto& name = predicates.at(e.predicate);
        if (format == GraphFormat::TSV) {
            append_id(e.source);
            buf += ' ';
            buf += name;
            buf += ' ';
            append_id(e.target);
            buf += '\n';
        } else {
            buf += "<http://example.org/n";
            append_id(e.source);
            buf += "> <http://example.org/p/";
            buf += name;
            buf += "> <http://example.org/n";
            append_id(e.target);
            buf += "> .\n";
        }
        if (buf.size() > (1 << 16) - 256) {
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IOError("failed writing graph output");
    return edges.size();
}

GraphInstance read_graph_tsv(std::istream& in) {
    GraphInstance g;
    g.loaded = true;
    std::unordered_map<std::string, std::uint32_t> ids;
    std::string line;
    std::size_t lineno = 0;
    auto parse_id = [&](std::string_view tok) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) {
            throw SyntaxError("bad node id '" + std::string(tok) + "'", lineno, 1);
        }
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view sv(line);
        const auto a = sv.find_first_of(" \t");
        const auto b = sv.find_first_of(" \t", a == std::string_view::npos ? a : a + 1);
        if (a == std::string_view::npos || b == std::string_view::npos) {
            throw SyntaxError("expected 'SOURCE PREDICATE TARGET'", lineno, 1);
        }
        const auto src = parse_id(sv.substr(0, a));
        const std::string pred(sv.substr(a + 1, b - a - 1));
        const auto trg = parse_id(sv.substr(b + 1));
        auto [it, fresh] = ids.try_emplace(pred, static_cast<std::uint32_t>(g.predicates.size()));
        if (fresh) g.predicates.push_back(pred);
        g.edges.push_back({src, it->second, trg});
        g.loaded_nodes.push_back(src);
        g.loaded_nodes.push_back(trg);
    }
    std::sort(g.loaded_nodes.begin(), g.loaded_nodes.end());
    g.loaded_nodes.erase(std::unique(g.loaded_nodes.begin(), g.loaded_nodes.end()), g.loaded_nodes.end());
    return g;
}

}  // namespace pathbench
