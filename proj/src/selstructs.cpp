#include "pathbench/selstructs.hpp"

#include <deque>

#include "pathbench/errors.hpp"

namespace pathbench {

std::size_t SchemaGraph::arc_count() const noexcept {
    std::size_t total = 0;
    for (const auto& arcs : out_) total += arcs.size();
    return total;
}

std::optional<std::uint32_t> SchemaGraph::find(const SchemaNode& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t SchemaGraph::intern(const SchemaNode& n) {
    auto [it, fresh] = index_.try_emplace(n, static_cast<std::uint32_t>(nodes_.size()));
    if (fresh) {
        nodes_.push_back(n);
        out_.emplace_back();
    }
    return it->second;
}

SchemaGraph build_schema_graph(const GraphConfiguration& schema) {
    SchemaGraph g;
    g.schema_ = schema;

    struct Step {
        Symbol label;
        std::uint32_t to_type;
        SelectivityTriple base;
    };
    // Steps available from each type, forward arcs first, in constraint order.
    std::vector<std::vector<Step>> steps(schema.node_types.size());
    for (const auto& c : schema.constraints) {
        const auto src = static_cast<std::uint32_t>(*schema.type_index(c.source_type));
        const auto trg = static_cast<std::uint32_t>(*schema.type_index(c.target_type));
        const auto pred = static_cast<std::uint32_t>(*schema.predicate_index(c.predicate));
        steps[src].push_back({{pred, false}, trg, base_triple(c, Direction::Forward, schema)});
    }
    for (const auto& c : schema.constraints) {
        const auto src = static_cast<std::uint32_t>(*schema.type_index(c.source_type));
        const auto trg = static_cast<std::uint32_t>(*schema.type_index(c.target_type));
        const auto pred = static_cast<std::uint32_t>(*schema.predicate_index(c.predicate));
        steps[trg].push_back({{pred, true}, src, base_triple(c, Direction::Inverse, schema)});
    }

    for (std::uint32_t t = 0; t < schema.node_types.size(); ++t) {
        g.seeds_.push_back(g.intern({t, epsilon_triple(schema.node_types[t])}));
    }
    // Nodes are appended as discovered, so a single forward sweep saturates.
    for (std::uint32_t i = 0; i < g.nodes_.size(); ++i) {
        const SchemaNode here = g.nodes_[i];
        for (const auto& s : steps[here.type]) {
            const auto next = g.intern({s.to_type, concat_triples(here.triple, s.base)});
            g.out_[i].push_back({s.label, next});
        }
    }
    return g;
}

DistanceMatrix build_distance_matrix(const SchemaGraph& g) {
    DistanceMatrix d;
    d.n_ = g.size();
    d.dist_.assign(d.n_ * d.n_, kUnreachable);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t s = 0; s < d.n_; ++s) {
        auto* row = &d.dist_[s * d.n_];
        row[s] = 0;
        queue.assign(1, s);
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            for (const auto& arc : g.out(u)) {
                if (row[arc.to] == kUnreachable) {
                    row[arc.to] = row[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
    }
    return d;
}

SelectivityGraph build_selectivity_graph(const SchemaGraph& g, Interval lengths) {
    if (lengths.min < 1 || lengths.max < lengths.min) throw ContractError("length interval needs 1 <= min <= max");
    SelectivityGraph sel;
    sel.n_ = g.size();
    sel.lengths_ = lengths;
    sel.adj_.assign(sel.n_ * sel.n_, 0);
    sel.succ_.resize(sel.n_);
    std::vector<char> layer(sel.n_);
    std::vector<char> next(sel.n_);
    for (std::uint32_t s = 0; s < sel.n_; ++s) {
        std::fill(layer.begin(), layer.end(), 0);
        layer[s] = 1;
        for (int len = 1; len <= lengths.max; ++len) {
            std::fill(next.begin(), next.end(), 0);
            for (std::uint32_t u = 0; u < sel.n_; ++u) {
                if (!layer[u]) continue;
                for (const auto& arc : g.out(u)) next[arc.to] = 1;
            }
            layer.swap(next);
            if (len >= lengths.min) {
                for (std::uint32_t v = 0; v < sel.n_; ++v) {
                    if (layer[v]) sel.adj_[s * sel.n_ + v] = 1;
                }
            }
        }
        for (std::uint32_t v = 0; v < sel.n_; ++v) {
            if (sel.adj_[s * sel.n_ + v]) sel.succ_[s].push_back(v);
        }
    }
    return sel;
}

std::vector<bool> walk_lengths(const SchemaGraph& g, std::uint32_t from, std::uint32_t to, std::uint32_t max_length) {
    std::vector<bool> out(max_length + 1, false);
    std::vector<char> layer(g.size(), 0);
    std::vector<char> next(g.size(), 0);
    layer[from] = 1;
    out[0] = from == to;
    for (std::uint32_t len = 1; len <= max_length; ++len) {
        std::fill(next.begin(), next.end(), 0);
        for (std::uint32_t u = 0; u < g.size(); ++u) {
            if (!layer[u]) continue;
            for (const auto& arc : g.out(u)) next[arc.to] = 1;
        }
        layer.swap(next);
        out[len] = layer[to] != 0;
    }
    return out;
}

PathCountTable saturate_path_counts(const SchemaGraph& g, const std::vector<bool>& target, std::uint32_t max_length) {
    if (target.size() != g.size()) throw ContractError("target mask size differs from schema graph size");
    PathCountTable t;
    t.target_ = target;
    t.counts_.resize(max_length + 1);
    t.counts_[0].resize(g.size());
    for (std::uint32_t n = 0; n < g.size(); ++n) t.counts_[0][n] = target[n] ? 1 : 0;
    for (std::uint32_t i = 1; i <= max_length; ++i) {
        auto& row = t.counts_[i];
        const auto& prev = t.counts_[i - 1];
        row.assign(g.size(), 0);
        for (std::uint32_t n = 0; n < g.size(); ++n) {
            for (const auto& arc : g.out(n)) row[n] += prev[arc.to];
        }
    }
    return t;
}

PathCountTable saturate_path_counts(const SchemaGraph& g, SelectivityClass target, std::uint32_t max_length) {
    std::vector<bool> mask(g.size());
    for (std::uint32_t n = 0; n < g.size(); ++n) mask[n] = in_class(g.nodes()[n].triple, target);
    return saturate_path_counts(g, mask, max_length);
}

BigCount uniform_below(const BigCount& bound, RandomStream& rng) {
    if (bound <= 0) throw ContractError("uniform_below needs a positive bound");
    if (bound <= std::numeric_limits<std::uint64_t>::max()) {
        return BigCount(rng.uniform_int(0, static_cast<std::uint64_t>(bound - 1)));
    }
    // 64 spare bits keep the modulo bias below 2^-64.
    const auto words = msb(bound) / 64 + 2;
    BigCount r = 0;
    for (std::size_t w = 0; w < words; ++w) {
        r <<= 64;
        r += rng.uniform_int(0, std::numeric_limits<std::uint64_t>::max());
    }
    return r % bound;
}

std::size_t weighted_index(const std::vector<BigCount>& weights, RandomStream& rng) {
    BigCount total = 0;
    for (const auto& w : weights) total += w;
    if (total <= 0) throw NoPathError("all weights are zero");
    BigCount r = uniform_below(total, rng);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    return weights.size() - 1;
}

DrawnPath draw_path(const SchemaGraph& g, const PathCountTable& counts, std::uint32_t length, RandomStream& rng,
                    std::optional<std::uint32_t> start) {
    if (length > counts.max_length()) throw ContractError("requested length exceeds the saturated range");
    DrawnPath p;
    if (start) {
        if (counts(*start, length) == 0) {
            throw NoPathError("no walk of length " + std::to_string(length) + " from " + describe(g, *start));
        }
        p.start = *start;
    } else {
        std::vector<BigCount> w(g.size());
        for (std::uint32_t n = 0; n < g.size(); ++n) w[n] = counts(n, length);
        try {
            p.start = static_cast<std::uint32_t>(weighted_index(w, rng));
        } catch (const NoPathError&) {
            throw NoPathError("no walk of length " + std::to_string(length) + " reaches the target");
        }
    }
    std::uint32_t here = p.start;
    std::vector<BigCount> w;
    for (std::uint32_t remaining = length; remaining > 0; --remaining) {
        const auto& arcs = g.out(here);
        w.resize(arcs.size());
        for (std::size_t k = 0; k < arcs.size(); ++k) w[k] = counts(arcs[k].to, remaining - 1);
        const auto& chosen = arcs[weighted_index(w, rng)];
        p.labels.push_back(chosen.label);
        here = chosen.to;
    }
    p.end = here;
    return p;
}

std::string describe(const SchemaGraph& g, std::uint32_t node) {
    const auto& n = g.nodes().at(node);
    return "(" + g.schema().node_types.at(n.type).name + "," + to_string(n.triple) + ")";
}

std::string describe(const SchemaGraph& g, Symbol s) {
    return g.schema().predicates.at(s.predicate).name + (s.inverse ? "-" : "");
}

void dump_schema_graph(const SchemaGraph& g, std::ostream& out) {
    out << "# schema graph: " << g.size() << " nodes, " << g.arc_count() << " arcs\n";
    for (std::uint32_t n = 0; n < g.size(); ++n) {
        out << n << ' ' << describe(g, n) << " ->";
        for (const auto& arc : g.out(n)) out << ' ' << describe(g, arc.label) << ':' << arc.to;
        out << '\n';
    }
}

void dump_selectivity_graph(const SchemaGraph& g, const SelectivityGraph& sel, std::ostream& out) {
    out << "# selectivity graph, lengths " << sel.lengths().min << ".." << sel.lengths().max << "\n";
    for (std::uint32_t n = 0; n < sel.size(); ++n) {
        out << n << ' ' << describe(g, n) << " ->";
        for (auto m : sel.successors(n)) out << ' ' << m;
        out << '\n';
    }
}

}  // namespace pathbench
