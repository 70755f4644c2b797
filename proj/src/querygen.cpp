#include "pathbench/querygen.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

namespace pathbench {

namespace {

int draw_int(RandomStream& rng, int lo, int hi) {
    return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)));
}

int minimum_conjuncts(Shape shape) {
    switch (shape) {
        case Shape::Chain: return 1;
        case Shape::Star: return 2;
        case Shape::Cycle: return 2;
        case Shape::StarChain: return 3;
    }
    return 1;
}

// Uniform composition of `total` into `parts` positive integers.
std::vector<int> random_composition(int total, int parts, RandomStream& rng) {
    std::vector<int> cuts(static_cast<std::size_t>(total - 1));
    std::iota(cuts.begin(), cuts.end(), 1);
    shuffle(cuts, rng);
    cuts.resize(static_cast<std::size_t>(parts - 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> out;
    int prev = 0;
    for (int c : cuts) {
        out.push_back(c - prev);
        prev = c;
    }
    out.push_back(total - prev);
    return out;
}

std::size_t triple_index(const SelectivityTriple& t) {
    const auto& all = legal_triples();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] == t) return i;
    }
    throw ContractError("triple " + to_string(t) + " is not normalized");
}

std::string var_name(int v) { return "x" + std::to_string(v + 1); }

struct Transition {
    std::uint32_t next_state;
    std::uint32_t target_node;
};

std::vector<Transition> transitions(const GenerationContext& ctx, std::uint32_t state, bool starred) {
    const auto type = ctx.state_type(state);
    const auto& g = ctx.schema_graph();
    const auto seed = g.seed(type);
    std::vector<Transition> out;
    if (starred) {
        if (ctx.star_capable(type)) out.push_back({state, seed});
        return out;
    }
    const auto here = ctx.state_triple(state);
    if (here.right != g.nodes()[seed].triple.left) return out;  // not a reachable state
    for (auto m : ctx.selectivity_graph().successors(seed)) {
        const auto& node = g.nodes()[m];
        out.push_back({ctx.state_of(node.type, concat_triples(here, node.triple)), m});
    }
    return out;
}

using Matrix = std::vector<std::optional<SelectivityTriple>>;

void accumulate(std::optional<SelectivityTriple>& slot, const SelectivityTriple& t) {
    slot = slot ? disjoin_triples(*slot, t) : t;
}

Matrix symbol_matrix(const GraphConfiguration& schema, const Atom& atom) {
    const auto k = schema.node_types.size();
    Matrix m(k * k);
    for (const auto& c : schema.constraints) {
        if (c.predicate != atom.predicate) continue;
        auto s = *schema.type_index(c.source_type);
        auto t = *schema.type_index(c.target_type);
        if (atom.inverse) {
            accumulate(m[t * k + s], base_triple(c, Direction::Inverse, schema));
        } else {
            accumulate(m[s * k + t], base_triple(c, Direction::Forward, schema));
        }
    }
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t k) {
    Matrix out(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t c = 0; c < k; ++c) {
            if (!a[i * k + c]) continue;
            for (std::size_t j = 0; j < k; ++j) {
                if (b[c * k + j]) accumulate(out[i * k + j], concat_triples(*a[i * k + c], *b[c * k + j]));
            }
        }
    }
    return out;
}

Matrix regex_matrix(const GraphConfiguration& schema, const RegularExpression& re) {
    const auto k = schema.node_types.size();
    Matrix sum(k * k);
    for (const auto& path : re.disjuncts) {
        Matrix m = symbol_matrix(schema, path.front());
        for (std::size_t i = 1; i < path.size(); ++i) m = multiply(m, symbol_matrix(schema, path[i]), k);
        for (std::size_t i = 0; i < k * k; ++i) {
            if (m[i]) accumulate(sum[i], *m[i]);
        }
    }
    if (!re.star) return sum;
    // Closure keeps only same-type pairs, plus the empty word on every type.
    Matrix star(k * k);
    for (std::size_t a = 0; a < k; ++a) {
        auto eps = epsilon_triple(schema.node_types[a]);
        const auto& loop = sum[a * k + a];
        star[a * k + a] = loop ? disjoin_triples(eps, star_triple(*loop, true)) : eps;
    }
    return star;
}

// Conjunct indices leading from `from` to `to` along conjunct directions, first match in body order.
bool designated_path(const QueryRule& rule, const std::string& from, const std::string& to, std::vector<bool>& used,
                     std::vector<std::size_t>& out) {
    if (from == to && !out.empty()) return true;
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (used[i] || rule.body[i].from != from) continue;
        used[i] = true;
        out.push_back(i);
        if (rule.body[i].to == to || designated_path(rule, rule.body[i].to, to, used, out)) return true;
        out.pop_back();
        used[i] = false;
    }
    return false;
}

void rename_rule(QueryRule& rule, const std::unordered_map<std::string, std::string>& names) {
    auto apply = [&](std::string& v) {
        auto it = names.find(v);
        if (it != names.end()) v = it->second;
    };
    for (auto& h : rule.head) apply(h);
    for (auto& c : rule.body) {
        apply(c.from);
        apply(c.to);
    }
}

// Renames rule variables so its head matches `head`; other variables take the
// lowest unused xN names.
void align_head(QueryRule& rule, const std::vector<std::string>& head) {
    std::unordered_map<std::string, std::string> names;
    std::set<std::string> used(head.begin(), head.end());
    for (std::size_t j = 0; j < head.size(); ++j) names[rule.head[j]] = head[j];
    int next = 0;
    for (const auto& v : rule.variables()) {
        if (names.count(v)) continue;
        std::string candidate;
        do {
            candidate = var_name(next++);
        } while (used.count(candidate));
        used.insert(candidate);
        names[v] = candidate;
    }
    rename_rule(rule, names);
}

}  // namespace

QuerySkeleton get_query_skeleton(Shape shape, const QuerySize& size, RandomStream& rng) {
    const int need = minimum_conjuncts(shape);
    if (size.conjuncts.max < need) {
        throw ContractError("shape " + std::string(to_string(shape)) + " needs at least " + std::to_string(need) +
                            " conjuncts");
    }
    const int c = draw_int(rng, std::max(size.conjuncts.min, need), size.conjuncts.max);
    QuerySkeleton s;
    s.shape = shape;
    auto add = [&](int from, int to) {
        s.conjuncts.push_back({from, to});
        return static_cast<int>(s.conjuncts.size()) - 1;
    };
    switch (shape) {
        case Shape::Chain: {
            s.chains.emplace_back();
            for (int i = 0; i < c; ++i) s.chains[0].push_back(add(i, i + 1));
            s.variable_count = c + 1;
            s.end_var = c;
            break;
        }
        case Shape::Star: {
            const int k = draw_int(rng, 2, c);
            int next = 1;
            for (int len : random_composition(c, k, rng)) {
                std::vector<int> chain;
                int prev = 0;
                for (int j = 0; j < len; ++j) {
                    chain.push_back(add(prev, next));
                    prev = next++;
                }
                if (s.chains.empty()) s.end_var = prev;
                s.chains.push_back(std::move(chain));
            }
            s.variable_count = next;
            break;
        }
        case Shape::Cycle: {
            const int c1 = draw_int(rng, 1, c - 1);
            s.chains.emplace_back();
            for (int i = 0; i < c1; ++i) s.chains[0].push_back(add(i, i + 1));
            s.end_var = c1;
            int next = c1 + 1;
            std::vector<int> chain;
            int prev = 0;
            for (int j = 0; j < c - c1; ++j) {
                const int to = j + 1 == c - c1 ? c1 : next++;
                chain.push_back(add(prev, to));
                prev = to;
            }
            s.chains.push_back(std::move(chain));
            s.variable_count = next;
            break;
        }
        case Shape::StarChain: {
            const int b = draw_int(rng, 2, c - 1);
            s.chains.emplace_back();
            for (int i = 0; i < b; ++i) s.chains[0].push_back(add(i, i + 1));
            s.end_var = b;
            int next = b + 1;
            const int r = c - b;
            const int k = draw_int(rng, 1, r);
            for (int len : random_composition(r, k, rng)) {
                int prev = draw_int(rng, 1, b - 1);
                std::vector<int> chain;
                for (int j = 0; j < len; ++j) {
                    chain.push_back(add(prev, next));
                    prev = next++;
                }
                s.chains.push_back(std::move(chain));
            }
            s.variable_count = next;
            break;
        }
    }
    return s;
}

std::vector<int> add_projection_variables(const QuerySkeleton& skeleton, const std::vector<int>& arity,
                                          bool selectivity_enforced, RandomStream& rng) {
    if (selectivity_enforced) return {skeleton.start_var, skeleton.end_var};
    std::vector<int> allowed;
    for (int a : arity) {
        if (a <= skeleton.variable_count) allowed.push_back(a);
    }
    const int a = allowed.empty() ? skeleton.variable_count
                                  : allowed[static_cast<std::size_t>(rng.uniform_int(0, allowed.size() - 1))];
    std::vector<int> vars(static_cast<std::size_t>(skeleton.variable_count));
    std::iota(vars.begin(), vars.end(), 0);
    shuffle(vars, rng);
    vars.resize(static_cast<std::size_t>(a));
    std::sort(vars.begin(), vars.end());
    return vars;
}

std::vector<PathSkeleton> build_path_skeleton(const QuerySkeleton& skeleton, const QuerySize& size,
                                              RandomStream& rng) {
    std::vector<PathSkeleton> out(skeleton.conjuncts.size());
    for (auto& slots : out) {
        const int d = draw_int(rng, size.disjuncts.min, size.disjuncts.max);
        for (int i = 0; i < d; ++i) slots.push_back(draw_int(rng, size.path_length.min, size.path_length.max));
    }
    return out;
}

GenerationContext::GenerationContext(const GraphConfiguration& schema, Interval lengths, int relaxation_margin)
    : graph_(build_schema_graph(schema)),
      sel_(build_selectivity_graph(graph_, lengths)),
      lengths_(lengths),
      margin_(relaxation_margin) {
    for (std::uint32_t n = 0; n < graph_.size(); ++n) {
        std::vector<bool> mask(graph_.size(), false);
        mask[n] = true;
        to_node_.push_back(std::make_unique<PathCountTable>(saturate_path_counts(graph_, mask, max_length())));
    }
}

bool GenerationContext::star_capable(std::uint32_t type) const {
    const auto s = graph_.seed(type);
    return sel_.has_edge(s, s);
}

std::uint32_t GenerationContext::state_of(std::uint32_t type, const SelectivityTriple& t) const {
    return type * 8 + static_cast<std::uint32_t>(triple_index(t));
}

SelectivityTriple GenerationContext::state_triple(std::uint32_t state) const { return legal_triples()[state % 8]; }

std::vector<ConjunctType> assign_conjunct_types(const QuerySkeleton& skeleton,
                                                std::optional<SelectivityClass> target_class,
                                                const GenerationContext& ctx, double recursion_probability,
                                                RandomStream& rng) {
    const auto& g = ctx.schema_graph();
    const auto states = static_cast<std::uint32_t>(ctx.state_count());
    std::vector<bool> starred(skeleton.conjuncts.size());
    for (std::size_t i = 0; i < starred.size(); ++i) starred[i] = rng.uniform01() < recursion_probability;

    std::vector<std::optional<std::uint32_t>> var_type(static_cast<std::size_t>(skeleton.variable_count));
    std::vector<ConjunctType> out(skeleton.conjuncts.size());

    for (std::size_t ci = 0; ci < skeleton.chains.size(); ++ci) {
        const auto& chain = skeleton.chains[ci];
        const int start_var = skeleton.conjuncts[chain.front()].from;
        const int end_var = skeleton.conjuncts[chain.back()].to;
        const auto len = chain.size();

        auto accept = [&](std::uint32_t state) {
            if (ci == 0 && target_class) return in_class(ctx.state_triple(state), *target_class);
            if (var_type[end_var]) return ctx.state_type(state) == *var_type[end_var];
            return true;
        };

        // W[k][s]: number of ways to finish the last k conjuncts of the chain from state s.
        std::vector<std::vector<BigCount>> W(len + 1, std::vector<BigCount>(states));
        for (std::uint32_t s = 0; s < states; ++s) W[0][s] = accept(s) ? 1 : 0;
        for (std::size_t k = 1; k <= len; ++k) {
            const bool star = starred[chain[len - k]];
            for (std::uint32_t s = 0; s < states; ++s) {
                for (const auto& t : transitions(ctx, s, star)) W[k][s] += W[k - 1][t.next_state];
            }
        }

        std::uint32_t state;
        if (var_type[start_var]) {
            const auto t = *var_type[start_var];
            state = ctx.state_of(t, g.nodes()[g.seed(t)].triple);
            if (W[len][state] == 0) throw InstantiationError("no type assignment for a chain rooted at a typed variable");
        } else {
            std::vector<BigCount> w(g.type_count());
            for (std::uint32_t t = 0; t < g.type_count(); ++t) {
                w[t] = W[len][ctx.state_of(t, g.nodes()[g.seed(t)].triple)];
            }
            std::size_t t;
            try {
                t = weighted_index(w, rng);
            } catch (const NoPathError&) {
                throw InstantiationError("no type assignment reaches the requested class");
            }
            var_type[start_var] = static_cast<std::uint32_t>(t);
            state = ctx.state_of(static_cast<std::uint32_t>(t), g.nodes()[g.seed(static_cast<std::uint32_t>(t))].triple);
        }

        for (std::size_t p = 0; p < len; ++p) {
            const auto conj = static_cast<std::size_t>(chain[p]);
            const auto options = transitions(ctx, state, starred[conj]);
            std::vector<BigCount> w(options.size());
            for (std::size_t i = 0; i < options.size(); ++i) w[i] = W[len - p - 1][options[i].next_state];
            const auto& pick = options[weighted_index(w, rng)];
            const auto& m = g.nodes()[pick.target_node];
            auto& ct = out[conj];
            ct.source_type = ctx.state_type(state);
            ct.target_type = m.type;
            ct.triple = m.triple;
            ct.starred = starred[conj];
            ct.target_node = pick.target_node;
            var_type[skeleton.conjuncts[conj].to] = m.type;
            state = pick.next_state;
        }
    }
    return out;
}

InstantiatedRule instantiate_placeholders(const QuerySkeleton& skeleton, const std::vector<ConjunctType>& types,
                                          const std::vector<PathSkeleton>& paths, const std::vector<int>& head,
                                          const GenerationContext& ctx, RandomStream& rng) {
    const auto& g = ctx.schema_graph();
    const auto& schema = ctx.schema();
    InstantiatedRule result;
    for (int v : head) result.rule.head.push_back(var_name(v));
    const int max_len = static_cast<int>(ctx.max_length());

    for (std::size_t i = 0; i < skeleton.conjuncts.size(); ++i) {
        const auto& t = types.at(i);
        const auto start = g.seed(t.source_type);
        const auto& counts = ctx.counts_to(t.target_node);
        Conjunct c;
        c.from = var_name(skeleton.conjuncts[i].from);
        c.to = var_name(skeleton.conjuncts[i].to);
        c.regex.star = t.starred;
        for (int requested : paths.at(i)) {
            int chosen = -1;
            // Nearest feasible length, shorter first on ties.
            for (int d = 0; chosen < 0 && d <= max_len; ++d) {
                for (int len : {requested - d, requested + d}) {
                    if (len >= 1 && len <= max_len && counts(start, static_cast<std::uint32_t>(len)) > 0) {
                        chosen = len;
                        break;
                    }
                }
            }
            if (chosen < 0) {
                throw InstantiationError("no label path from " + describe(g, start) + " to " +
                                         describe(g, t.target_node));
            }
            if (chosen != requested) ++result.relaxations;
            // A few redraws keep disjuncts distinct when alternatives exist.
            LabelPath path;
            for (int attempt = 0; attempt < 8; ++attempt) {
                const auto drawn = draw_path(g, counts, static_cast<std::uint32_t>(chosen), rng, start);
                path.clear();
                for (const auto& s : drawn.labels) path.push_back({schema.predicates[s.predicate].name, s.inverse});
                const auto& ds = c.regex.disjuncts;
                if (std::find(ds.begin(), ds.end(), path) == ds.end()) break;
            }
            c.regex.disjuncts.push_back(std::move(path));
        }
        result.rule.body.push_back(std::move(c));
    }
    return result;
}

std::optional<int> audit_alpha_hat(const Query& q, const GraphConfiguration& schema) {
    const auto k = schema.node_types.size();
    std::optional<int> best;
    for (const auto& rule : q.rules) {
        if (rule.head.size() != 2) return std::nullopt;
        std::vector<bool> used(rule.body.size(), false);
        std::vector<std::size_t> path;
        if (!designated_path(rule, rule.head[0], rule.head[1], used, path)) return std::nullopt;
        Matrix m = regex_matrix(schema, rule.body[path.front()].regex);
        for (std::size_t i = 1; i < path.size(); ++i) m = multiply(m, regex_matrix(schema, rule.body[path[i]].regex), k);
        std::optional<int> rule_best;
        for (const auto& e : m) {
            if (e) rule_best = std::max(rule_best.value_or(0), alpha_hat(*e));
        }
        if (!rule_best) return std::nullopt;
        best = std::max(best.value_or(0), *rule_best);
    }
    return best;
}

WorkloadError::WorkloadError(std::vector<Query> partial, std::vector<std::uint64_t> failed)
    : Error([&] {
          std::string msg = "could not instantiate " + std::to_string(failed.size()) + " queries:";
          for (auto i : failed) msg += " " + std::to_string(i);
          return msg;
      }()),
      partial_(std::move(partial)),
      failed_(std::move(failed)) {}

std::vector<std::optional<SelectivityClass>> class_quotas(const WorkloadConfiguration& cfg) {
    std::vector<std::optional<SelectivityClass>> out(cfg.num_queries);
    if (!cfg.selectivity_enforced()) return out;
    auto classes = cfg.selectivities;
    std::sort(classes.begin(), classes.end());
    const auto k = classes.size();
    const auto base = cfg.num_queries / k;
    const auto extra = cfg.num_queries % k;
    std::size_t i = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const auto quota = base + (c < extra ? 1 : 0);
        for (std::uint64_t j = 0; j < quota; ++j) out[i++] = classes[c];
    }
    return out;
}

Query generate_query(const WorkloadConfiguration& cfg, const GenerationContext& ctx, std::uint64_t id,
                     std::optional<SelectivityClass> target, RandomStream& rng, int retries) {
    const bool enforced = target.has_value();
    std::vector<Shape> shapes;
    for (auto s : cfg.shapes) {
        if (cfg.size.conjuncts.max >= minimum_conjuncts(s)) shapes.push_back(s);
    }
    if (shapes.empty()) throw InstantiationError("no configured shape fits the conjunct interval");
    const Shape shape = shapes[static_cast<std::size_t>(rng.uniform_int(0, shapes.size() - 1))];

    std::string last_error = "retry budget exhausted";
    for (int attempt = 0; attempt <= retries; ++attempt) {
        try {
            const int rules = draw_int(rng, cfg.size.rules.min, cfg.size.rules.max);
            std::vector<QuerySkeleton> skeletons;
            int min_vars = 0;
            for (int r = 0; r < rules; ++r) {
                skeletons.push_back(get_query_skeleton(shape, cfg.size, rng));
                min_vars = r == 0 ? skeletons.back().variable_count
                                  : std::min(min_vars, skeletons.back().variable_count);
            }
            std::vector<int> arity{2};
            if (!enforced) {
                std::vector<int> allowed;
                for (int a : cfg.arity) {
                    if (a <= min_vars) allowed.push_back(a);
                }
                arity = {allowed.empty() ? min_vars
                                         : allowed[static_cast<std::size_t>(rng.uniform_int(0, allowed.size() - 1))]};
            }

            Query q;
            q.id = id;
            q.shape = shape;
            q.selectivity = target;
            for (const auto& sk : skeletons) {
                const auto types = assign_conjunct_types(sk, target, ctx, cfg.recursion_probability, rng);
                const auto paths = build_path_skeleton(sk, cfg.size, rng);
                const auto head = add_projection_variables(sk, arity, enforced, rng);
                auto inst = instantiate_placeholders(sk, types, paths, head, ctx, rng);
                if (!q.rules.empty()) align_head(inst.rule, q.rules.front().head);
                q.relaxations += inst.relaxations;
                q.rules.push_back(std::move(inst.rule));
            }
            if (enforced) {
                const auto audited = audit_alpha_hat(q, cfg.graph);
                if (!audited || *audited != alpha_hat(*target)) {
                    last_error = "audit rejected the drawn labels";
                    continue;
                }
            }
            return q;
        } catch (const InstantiationError& e) {
            last_error = e.what();
        } catch (const NoPathError& e) {
            last_error = e.what();
        }
    }
    throw InstantiationError("query " + std::to_string(id) + ": " + last_error);
}

std::vector<Query> generate_workload(const WorkloadConfiguration& cfg, std::uint64_t seed,
                                     const QueryGenOptions& options) {
    validate_workload_config(cfg);
    const GenerationContext ctx(cfg.graph, cfg.size.path_length, options.relaxation_margin);
    const auto quotas = class_quotas(cfg);
    const RandomStream root(seed);
    const auto n = static_cast<std::size_t>(cfg.num_queries);

    std::vector<std::optional<Query>> slots(n);
    auto work = [&](std::size_t begin, std::size_t step) {
        for (std::size_t i = begin; i < n; i += step) {
            auto rng = root.child(i);
            try {
                slots[i] = generate_query(cfg, ctx, i, quotas[i], rng, options.retries);
            } catch (const InstantiationError&) {
                slots[i].reset();
            }
        }
    };
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
        for (auto& t : pool) t.join();
    }

    std::vector<Query> queries;
    std::vector<std::uint64_t> failed;
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) {
            queries.push_back(std::move(*slots[i]));
        } else {
            failed.push_back(i);
        }
    }
    if (!failed.empty()) throw WorkloadError(std::move(queries), std::move(failed));
    return queries;
}

}  // namespace pathbench
