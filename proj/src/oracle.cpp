#include "pathbench/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <optional>
#include <numeric>
#include <thread>

#include "pathbench/errors.hpp"

namespace pathbench {

std::uint64_t Relation::pair_count() const {
    std::uint64_t n = 0;
    for (const auto& s : succ) n += s.size();
    return n;
}

bool Relation::contains(std::uint32_t a, std::uint32_t b) const {
    const auto& s = succ.at(a);
    return std::binary_search(s.begin(), s.end(), b);
}

Relation Relation::transposed() const {
    Relation t(succ.size());
    for (std::uint32_t a = 0; a < succ.size(); ++a) {
        for (auto b : succ[a]) t.succ[b].push_back(a);
    }
    return t;  // appended in increasing a, so already sorted
}

namespace {

// Successor lists of at least one word-row's worth of entries get a bitset
// copy, so unions over dense relations run as word ORs. Memory stays within
// twice the relation's own footprint.
class RowBits {
public:
    explicit RowBits(const Relation& r) : words_((r.node_count() + 63) / 64), slot_(r.node_count(), kNone) {
        for (std::uint32_t v = 0; v < r.node_count(); ++v) {
            if (words_ == 0 || r.succ[v].size() < words_) continue;
            slot_[v] = static_cast<std::uint32_t>(bits_.size() / words_);
            bits_.resize(bits_.size() + words_, 0);
            auto* row = bits_.data() + bits_.size() - words_;
            for (auto t : r.succ[v]) row[t >> 6] |= std::uint64_t{1} << (t & 63);
        }
    }
    std::size_t words() const { return words_; }
    const std::uint64_t* row(std::uint32_t v) const {
        return slot_[v] == kNone ? nullptr : bits_.data() + std::size_t{slot_[v]} * words_;
    }

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};
    std::size_t words_;
    std::vector<std::uint32_t> slot_;
    std::vector<std::uint64_t> bits_;
};

// Set accumulator that emits its members sorted. Sparse rounds only visit
// the words they touched.
class Accumulator {
public:
    explicit Accumulator(std::size_t words) : words_(words, 0) {}
    void add(std::uint32_t t) {
        auto& w = words_[t >> 6];
        if (!full_ && w == 0) touched_.push_back(t >> 6);
        w |= std::uint64_t{1} << (t & 63);
    }
    void add_row(const std::uint64_t* row) {
        full_ = true;
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= row[i];
    }
    void add_all(const Relation& r, const RowBits& bits, std::uint32_t v) {
        if (const auto* row = bits.row(v)) {
            add_row(row);
        } else {
            for (auto t : r.succ[v]) add(t);
        }
    }
    template <class F>
    void drain(F&& emit) {
        auto take = [&](std::size_t i) {
            auto w = words_[i];
            words_[i] = 0;
            while (w != 0) {
                emit(static_cast<std::uint32_t>(i * 64 + static_cast<std::size_t>(std::countr_zero(w))));
                w &= w - 1;
            }
        };
        if (full_) {
            for (std::size_t i = 0; i < words_.size(); ++i) {
                if (words_[i] != 0) take(i);
            }
        } else {
            std::sort(touched_.begin(), touched_.end());
            for (auto i : touched_) take(i);
        }
        touched_.clear();
        full_ = false;
    }

private:
    std::vector<std::uint64_t> words_;
    std::vector<std::uint32_t> touched_;
    bool full_ = false;
};

}  // namespace

Relation compose(const Relation& a, const Relation& b) {
    const auto n = a.node_count();
    Relation out(n);
    const RowBits bits(b);
    Accumulator acc(bits.words());
    for (std::uint32_t s = 0; s < n; ++s) {
        if (a.succ[s].empty()) continue;
        for (auto mid : a.succ[s]) acc.add_all(b, bits, mid);
        auto& dst = out.succ[s];
        acc.drain([&](std::uint32_t t) { dst.push_back(t); });
    }
    return out;
}

Relation unite(const Relation& a, const Relation& b) {
    Relation out(a.node_count());
    for (std::size_t s = 0; s < a.node_count(); ++s) {
        auto& dst = out.succ[s];
        std::set_union(a.succ[s].begin(), a.succ[s].end(), b.succ[s].begin(), b.succ[s].end(),
                       std::back_inserter(dst));
    }
    return out;
}

Relation closure(const Relation& r) {
    const auto n = r.node_count();
    Relation out(n);
    std::vector<std::uint32_t> mark(n, 0);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t s = 0; s < n; ++s) {
        auto& dst = out.succ[s];
        mark[s] = s + 1;
        dst.push_back(s);
        // Semi-naive: only nodes found in the previous round are expanded.
        frontier.assign(1, s);
        while (!frontier.empty()) {
            const auto u = frontier.back();
            frontier.pop_back();
            for (auto v : r.succ[u]) {
                if (mark[v] != s + 1) {
                    mark[v] = s + 1;
                    dst.push_back(v);
                    frontier.push_back(v);
                }
            }
        }
        std::sort(dst.begin(), dst.end());
    }
    return out;
}

OracleGraph::OracleGraph(const GraphInstance& g) : ids_(g.node_universe()), empty_(ids_.size()) {
    const bool contiguous = !g.loaded;
    std::unordered_map<std::uint64_t, std::uint32_t> dense;
    if (!contiguous) {
        dense.reserve(ids_.size());
        for (std::uint32_t i = 0; i < ids_.size(); ++i) dense.emplace(ids_[i], i);
    }
    auto index = [&](std::uint64_t id) -> std::uint32_t {
        if (contiguous) {
            if (id == 0 || id > ids_.size()) throw ContractError("edge endpoint outside the node universe");
            return static_cast<std::uint32_t>(id - 1);
        }
        return dense.at(id);
    };
    std::vector<Relation> forward(g.predicates.size(), Relation(ids_.size()));
    for (const auto& e : g.edges) forward.at(e.predicate).succ[index(e.source)].push_back(index(e.target));
    for (std::size_t p = 0; p < g.predicates.size(); ++p) {
        for (auto& s : forward[p].succ) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
        auto backward = forward[p].transposed();
        by_predicate_.emplace(g.predicates[p], std::make_pair(std::move(forward[p]), std::move(backward)));
    }
}

const Relation& OracleGraph::edges(const std::string& predicate, bool inverse) const {
    auto it = by_predicate_.find(predicate);
    if (it == by_predicate_.end()) return empty_;
    return inverse ? it->second.second : it->second.first;
}

Relation evaluate_relation(const LabelPath& path, const OracleGraph& g) {
    if (path.empty()) throw ContractError("empty label path");
    Relation r = g.edges(path.front().predicate, path.front().inverse);
    for (std::size_t i = 1; i < path.size(); ++i) r = compose(r, g.edges(path[i].predicate, path[i].inverse));
    return r;
}

Relation evaluate_relation(const RegularExpression& re, const OracleGraph& g) {
    Relation r(g.node_count());
    for (const auto& p : re.disjuncts) r = unite(r, evaluate_relation(p, g));
    return re.star ? closure(r) : r;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> evaluate_path(const RegularExpression& re, const OracleGraph& g) {
    const auto r = evaluate_relation(re, g);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint32_t a = 0; a < r.node_count(); ++a) {
        for (auto b : r.succ[a]) out.emplace_back(g.id_of(a), g.id_of(b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Bindings table: rows of dense node indices, one column per variable.
struct Table {
    std::vector<std::string> vars;
    std::vector<std::uint32_t> data;
    bool unit = true;  // no conjunct processed yet: a single empty row

    std::size_t width() const { return vars.size(); }
    // A zero-width table holds one row iff data is non-empty.
    std::size_t rows() const { return unit ? 1 : (vars.empty() ? (data.empty() ? 0 : 1) : data.size() / vars.size()); }
    int column(const std::string& v) const {
        auto it = std::find(vars.begin(), vars.end(), v);
        return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
    }
};

void dedup(Table& t) {
    const auto w = t.width();
    if (w == 0) return;
    const auto n = t.data.size() / w;
    if (w == 1) {
        std::sort(t.data.begin(), t.data.end());
        t.data.erase(std::unique(t.data.begin(), t.data.end()), t.data.end());
        return;
    }
    if (w == 2) {
        std::vector<std::uint64_t> packed(n);
        for (std::size_t i = 0; i < n; ++i) packed[i] = (std::uint64_t{t.data[2 * i]} << 32) | t.data[2 * i + 1];
        std::sort(packed.begin(), packed.end());
        packed.erase(std::unique(packed.begin(), packed.end()), packed.end());
        t.data.resize(packed.size() * 2);
        for (std::size_t i = 0; i < packed.size(); ++i) {
            t.data[2 * i] = static_cast<std::uint32_t>(packed[i] >> 32);
            t.data[2 * i + 1] = static_cast<std::uint32_t>(packed[i]);
        }
        return;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto row = [&](std::size_t i) { return t.data.begin() + static_cast<std::ptrdiff_t>(i * w); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(row(a), row(a) + static_cast<std::ptrdiff_t>(w), row(b),
                                            row(b) + static_cast<std::ptrdiff_t>(w));
    });
    std::vector<std::uint32_t> out;
    out.reserve(t.data.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && std::equal(row(order[k]), row(order[k]) + static_cast<std::ptrdiff_t>(w), row(order[k - 1]))) {
            continue;
        }
        out.insert(out.end(), row(order[k]), row(order[k]) + static_cast<std::ptrdiff_t>(w));
    }
    t.data.swap(out);
}

// Joins keep distinct rows distinct, so only dropping a column needs dedup.
Table project(Table&& t, const std::vector<std::string>& keep) {
    if (std::all_of(t.vars.begin(), t.vars.end(),
                    [&](const std::string& v) { return std::find(keep.begin(), keep.end(), v) != keep.end(); })) {
        return std::move(t);
    }
    Table out;
    out.unit = t.unit;
    std::vector<int> cols;
    for (const auto& v : t.vars) {
        if (std::find(keep.begin(), keep.end(), v) != keep.end()) {
            out.vars.push_back(v);
            cols.push_back(t.column(v));
        }
    }
    if (t.unit) return out;
    const auto w = t.width();
    const auto n = w == 0 ? 0 : t.data.size() / w;
    if (w == 0) {
        out.data = t.data;
        return out;
    }
    if (out.vars.empty()) {
        if (n > 0) out.data.push_back(0);  // marker: non-empty Boolean result
        return out;
    }
    out.data.reserve(n * cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (int c : cols) out.data.push_back(t.data[i * w + static_cast<std::size_t>(c)]);
    }
    dedup(out);
    return out;
}

bool table_empty(const Table& t) {
    if (t.unit) return false;
    return t.data.empty();
}

// Extends by one variable while dropping the bound column `col`; rows that
// agree elsewhere share one successor union, so nothing larger than the
// deduplicated output is materialized.
Table grouped_extend(const Table& t, std::size_t col, const std::string& var, const Relation& rel) {
    const auto w = t.width();
    const auto n = t.rows();
    Table out;
    out.unit = false;
    std::vector<std::size_t> rest;
    for (std::size_t c = 0; c < w; ++c) {
        if (c != col) {
            rest.push_back(c);
            out.vars.push_back(t.vars[c]);
        }
    }
    out.vars.push_back(var);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
        for (auto c : rest) {
            if (t.data[a * w + c] != t.data[b * w + c]) return t.data[a * w + c] < t.data[b * w + c];
        }
        return false;
    };
    // Rows leaving dedup are usually ordered by these columns already.
    if (!std::is_sorted(order.begin(), order.end(), less)) std::sort(order.begin(), order.end(), less);
    const RowBits bits(rel);
    Accumulator acc(bits.words());
    for (std::size_t k = 0; k < n;) {
        std::size_t e = k + 1;
        while (e < n && !less(order[k], order[e])) ++e;
        for (std::size_t j = k; j < e; ++j) acc.add_all(rel, bits, t.data[order[j] * w + col]);
        acc.drain([&](std::uint32_t y) {
            for (auto c : rest) out.data.push_back(t.data[order[k] * w + c]);
            out.data.push_back(y);
        });
        k = e;
    }
    return out;
}

// Joins one conjunct into the table.
Table join(const Table& t, const std::string& from, const std::string& to, const Relation& r,
           const std::function<const Relation&()>& transposed, const std::vector<std::string>& needed) {
    const int cf = t.unit ? -1 : t.column(from);
    const int ct = t.unit ? -1 : t.column(to);
    Table out;
    out.unit = false;
    const auto w = t.width();
    const auto n = t.rows();
    if (from == to) {
        // Self-loop conjunct: keep nodes related to themselves.
        if (cf >= 0) {
            out.vars = t.vars;
            for (std::size_t i = 0; i < n; ++i) {
                const auto x = t.data[i * w + static_cast<std::size_t>(cf)];
                if (r.contains(x, x)) out.data.insert(out.data.end(), t.data.begin() + i * w, t.data.begin() + (i + 1) * w);
            }
            return out;
        }
        out.vars = t.vars;
        out.vars.push_back(from);
        std::vector<std::uint32_t> loops;
        for (std::uint32_t x = 0; x < r.node_count(); ++x) {
            if (r.contains(x, x)) loops.push_back(x);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (auto x : loops) {
                out.data.insert(out.data.end(), t.data.begin() + i * w, t.data.begin() + (i + 1) * w);
                out.data.push_back(x);
            }
        }
        return out;
    }
    if (cf >= 0 && ct >= 0) {
        out.vars = t.vars;
        for (std::size_t i = 0; i < n; ++i) {
            if (r.contains(t.data[i * w + static_cast<std::size_t>(cf)], t.data[i * w + static_cast<std::size_t>(ct)])) {
                out.data.insert(out.data.end(), t.data.begin() + i * w, t.data.begin() + (i + 1) * w);
            }
        }
        return out;
    }
    if (cf >= 0 || ct >= 0) {
        const bool forward = cf >= 0;
        const auto& rel = forward ? r : transposed();
        const auto col = static_cast<std::size_t>(forward ? cf : ct);
        const auto& bound = t.vars[col];
        if (std::find(needed.begin(), needed.end(), bound) == needed.end()) {
            return grouped_extend(t, col, forward ? to : from, rel);
        }
        out.vars = t.vars;
        out.vars.push_back(forward ? to : from);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto y : rel.succ[t.data[i * w + col]]) {
                out.data.insert(out.data.end(), t.data.begin() + i * w, t.data.begin() + (i + 1) * w);
                out.data.push_back(y);
            }
        }
        return out;
    }
    // Neither endpoint bound: cross product with the relation's pairs.
    out.vars = t.vars;
    out.vars.push_back(from);
    out.vars.push_back(to);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t x = 0; x < r.node_count(); ++x) {
            for (auto y : r.succ[x]) {
                out.data.insert(out.data.end(), t.data.begin() + i * w, t.data.begin() + (i + 1) * w);
                out.data.push_back(x);
                out.data.push_back(y);
            }
        }
    }
    return out;
}

// Distinct head tuples of one rule, as dense indices (flat, width = head size).
std::vector<std::uint32_t> evaluate_rule(const QueryRule& rule, const OracleGraph& g, bool& nonempty) {
    std::vector<Relation> rel;
    std::vector<std::optional<Relation>> rel_t(rule.body.size());
    for (const auto& c : rule.body) rel.push_back(evaluate_relation(c.regex, g));
    std::vector<bool> done(rule.body.size(), false);
    Table t;
    for (std::size_t step = 0; step < rule.body.size(); ++step) {
        // Prefer a conjunct touching bound variables to avoid cross products.
        std::size_t pick = rule.body.size();
        for (std::size_t i = 0; i < rule.body.size() && pick == rule.body.size(); ++i) {
            if (!done[i] && (t.column(rule.body[i].from) >= 0 || t.column(rule.body[i].to) >= 0)) pick = i;
        }
        if (pick == rule.body.size()) {
            for (std::size_t i = 0; i < rule.body.size(); ++i) {
                if (!done[i]) {
                    pick = i;
                    break;
                }
            }
        }
        done[pick] = true;
        std::vector<std::string> keep(rule.head.begin(), rule.head.end());
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            if (!done[i]) {
                keep.push_back(rule.body[i].from);
                keep.push_back(rule.body[i].to);
            }
        }
        auto transposed = [&]() -> const Relation& {
            if (!rel_t[pick]) rel_t[pick] = rel[pick].transposed();
            return *rel_t[pick];
        };
        t = join(t, rule.body[pick].from, rule.body[pick].to, rel[pick], transposed, keep);
        if (table_empty(t)) {
            nonempty = false;
            return {};
        }
        t = project(std::move(t), keep);
    }
    nonempty = !table_empty(t);
    if (rule.head.empty()) return {};
    std::vector<std::uint32_t> out;
    const auto w = t.width();
    std::vector<int> cols;
    for (const auto& h : rule.head) cols.push_back(t.column(h));
    const auto n = t.data.size() / w;
    out.reserve(n * cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (int c : cols) out.push_back(t.data[i * w + static_cast<std::size_t>(c)]);
    }
    return out;
}

}  // namespace

ResultSet evaluate_query(const Query& q, const OracleGraph& g) {
    ResultSet rs;
    rs.arity = q.arity();
    bool any = false;
    std::vector<std::vector<std::uint64_t>> tuples;
    for (const auto& rule : q.rules) {
        bool nonempty = false;
        const auto flat = evaluate_rule(rule, g, nonempty);
        any = any || nonempty;
        if (rs.arity == 0) continue;
        for (std::size_t i = 0; i < flat.size(); i += rs.arity) {
            std::vector<std::uint64_t> tup(rs.arity);
            for (std::size_t k = 0; k < rs.arity; ++k) tup[k] = g.id_of(flat[i + k]);
            tuples.push_back(std::move(tup));
        }
    }
    if (rs.arity == 0) {
        if (any) rs.tuples.emplace_back();
        return rs;
    }
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    rs.tuples = std::move(tuples);
    return rs;
}

std::uint64_t count_results(const Query& q, const OracleGraph& g) {
    const auto arity = q.arity();
    if (arity == 0) return evaluate_query(q, g).tuples.size();
    // Rule results are already distinct; only the union needs merging.
    std::vector<std::vector<std::uint32_t>> flats;
    for (const auto& rule : q.rules) {
        bool nonempty = false;
        flats.push_back(evaluate_rule(rule, g, nonempty));
    }
    if (flats.size() == 1) return flats.front().size() / arity;
    if (arity <= 2) {
        std::vector<std::uint64_t> packed;
        for (const auto& f : flats) {
            for (std::size_t i = 0; i < f.size(); i += arity) {
                packed.push_back(arity == 2 ? (std::uint64_t{f[i]} << 32) | f[i + 1] : f[i]);
            }
        }
        std::sort(packed.begin(), packed.end());
        return static_cast<std::uint64_t>(std::unique(packed.begin(), packed.end()) - packed.begin());
    }
    return evaluate_query(q, g).tuples.size();
}

RegressionResult regress_log_log(std::span<const double> sizes, std::span<const double> counts) {
    if (sizes.size() != counts.size()) throw ContractError("sizes and counts differ in length");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (counts[i] > 0 && sizes[i] > 0) {
            xs.push_back(std::log(sizes[i]));
            ys.push_back(std::log(counts[i]));
        }
    }
    RegressionResult r;
    r.points_used = static_cast<int>(xs.size());
    const auto zeros = sizes.size() - xs.size();
    if (2 * zeros > sizes.size()) {
        r.alpha = 0.0;
        r.beta = 0.0;
        if (!ys.empty()) r.beta = std::exp(std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size()));
        return r;
    }
    if (xs.size() < 2) throw InsufficientData("fewer than two nonzero counts");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("all nonzero points share one size");
    r.alpha = sxy / sxx;
    r.beta = std::exp(my - r.alpha * mx);
    return r;
}

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t size) { return derive_seed(seed, size); }

std::vector<std::vector<std::uint64_t>> measure_counts(const std::vector<Query>& queries,
                                                       const GraphConfiguration& config,
                                                       const std::vector<std::uint64_t>& sizes, std::uint64_t seed,
                                                       unsigned threads) {
    std::vector<std::vector<std::uint64_t>> out;
    for (auto n : sizes) {
        GraphConfiguration c = config;
        c.n = n;
        GenerationOptions opts;
        opts.threads = threads;
        const OracleGraph g(generate_graph(c, instance_seed(seed, n), opts));
        std::vector<std::uint64_t> row(queries.size());
        auto work = [&](std::size_t begin, std::size_t step) {
            for (std::size_t i = begin; i < queries.size(); i += step) row[i] = count_results(queries[i], g);
        };
        if (threads <= 1) {
            work(0, 1);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
            for (auto& t : pool) t.join();
        }
        out.push_back(std::move(row));
    }
    return out;
}

RegressionResult estimate_alpha(const Query& q, const GraphConfiguration& config,
                                const std::vector<std::uint64_t>& sizes, std::uint64_t seed) {
    if (sizes.size() < 2) throw ContractError("estimation needs at least two sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i - 1]) throw ContractError("sizes must be strictly increasing");
    }
    const auto counts = measure_counts({q}, config, sizes, seed);
    std::vector<double> xs(sizes.begin(), sizes.end());
    std::vector<double> ys;
    for (const auto& row : counts) ys.push_back(static_cast<double>(row[0]));
    return regress_log_log(xs, ys);
}

}  // namespace pathbench
