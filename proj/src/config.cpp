#include "pathbench/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include "pathbench/errors.hpp"
#include "xml_util.hpp"

namespace pathbench {

namespace {

constexpr double kProportionTolerance = 1e-9;

bool is_identifier(std::string_view name) {
    static const std::regex pattern("[A-Za-z_][A-Za-z0-9_]*");
    return std::regex_match(name.begin(), name.end(), pattern);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_csv(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        auto first = item.find_first_not_of(" \t\r\n");
        auto last = item.find_last_not_of(" \t\r\n");
        out.push_back(first == std::string_view::npos ? std::string_view{} : item.substr(first, last - first + 1));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

DegreeDistribution parse_distribution(const xml::Document& doc, const xml::Node& node) {
    doc.check_no_children(node);
    auto kind = doc.required(node, "kind");
    DegreeDistribution d;
    if (kind == "uniform") {
        doc.check_attributes(node, {"kind", "min", "max"});
        d = DegreeDistribution::uniform(doc.number<std::int64_t>(node, "min"), doc.number<std::int64_t>(node, "max"));
    } else if (kind == "gaussian") {
        doc.check_attributes(node, {"kind", "mu", "sigma"});
        d = DegreeDistribution::gaussian(doc.number<double>(node, "mu"), doc.number<double>(node, "sigma"));
    } else if (kind == "zipfian") {
        doc.check_attributes(node, {"kind", "s", "kmax"});
        d = DegreeDistribution::zipfian(doc.number<double>(node, "s"), doc.optional_number<std::uint64_t>(node, "kmax"));
    } else if (kind == "nonspecified") {
        doc.check_attributes(node, {"kind"});
        d = DegreeDistribution::non_specified();
    } else {
        doc.fail(node, "unknown distribution kind '" + std::string(kind) + "'");
    }
    return d;
}

void validate_distribution(const DegreeDistribution& d, const std::string& where) {
    switch (d.kind) {
        case DistributionKind::Uniform:
            if (d.min < 0 || d.max < d.min) {
                throw ValidationError(where + ": uniform distribution needs 0 <= min <= max");
            }
            break;
        case DistributionKind::Gaussian:
            if (!(d.mu >= 0.0) || !(d.sigma >= 0.0) || !std::isfinite(d.mu) || !std::isfinite(d.sigma)) {
                throw ValidationError(where + ": gaussian distribution needs mu >= 0 and sigma >= 0");
            }
            break;
        case DistributionKind::Zipfian:
            if (!(d.s > 0.0) || !std::isfinite(d.s)) {
                throw ValidationError(where + ": zipfian distribution needs s > 0");
            }
            if (d.kmax && *d.kmax == 0) throw ValidationError(where + ": zipfian kmax must be positive");
            break;
        case DistributionKind::NonSpecified:
            break;
    }
}

void validate_interval(const Interval& iv, const char* what) {
    if (iv.min < 1 || iv.max < iv.min) {
        throw ValidationError(std::string("size interval '") + what + "' needs 1 <= min <= max");
    }
}

Interval parse_interval(const xml::Document& doc, const xml::Node& node, std::string_view attr) {
    auto raw = doc.required(node, attr);
    auto parts = split_csv(raw);
    if (parts.size() != 2) doc.fail(node, "attribute '" + std::string(attr) + "' must be 'min,max'");
    return Interval{doc.parse_number<int>(node, attr, parts[0]), doc.parse_number<int>(node, attr, parts[1])};
}

void write_distribution(std::ostringstream& out, const char* tag, const DegreeDistribution& d) {
    out << "      <" << tag;
    switch (d.kind) {
        case DistributionKind::Uniform:
            out << " kind=\"uniform\" min=\"" << d.min << "\" max=\"" << d.max << "\"";
            break;
        case DistributionKind::Gaussian:
            out << " kind=\"gaussian\" mu=\"" << format_double(d.mu) << "\" sigma=\"" << format_double(d.sigma) << "\"";
            break;
        case DistributionKind::Zipfian:
            out << " kind=\"zipfian\" s=\"" << format_double(d.s) << "\"";
            if (d.kmax) out << " kmax=\"" << *d.kmax << "\"";
            break;
        case DistributionKind::NonSpecified:
            out << " kind=\"nonspecified\"";
            break;
    }
    out << "/>\n";
}

}  // namespace

namespace xml {

std::string escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace xml

DegreeDistribution DegreeDistribution::uniform(std::int64_t lo, std::int64_t hi) {
    DegreeDistribution d;
    d.kind = DistributionKind::Uniform;
    d.min = lo;
    d.max = hi;
    return d;
}

DegreeDistribution DegreeDistribution::gaussian(double mu, double sigma) {
    DegreeDistribution d;
    d.kind = DistributionKind::Gaussian;
    d.mu = mu;
    d.sigma = sigma;
    return d;
}

DegreeDistribution DegreeDistribution::zipfian(double s, std::optional<std::uint64_t> kmax) {
    DegreeDistribution d;
    d.kind = DistributionKind::Zipfian;
    d.s = s;
    d.kmax = kmax;
    return d;
}

DegreeDistribution DegreeDistribution::non_specified() { return DegreeDistribution{}; }

std::optional<std::size_t> GraphConfiguration::type_index(std::string_view name) const {
    for (std::size_t i = 0; i < node_types.size(); ++i) {
        if (node_types[i].name == name) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> GraphConfiguration::predicate_index(std::string_view name) const {
    for (std::size_t i = 0; i < predicates.size(); ++i) {
        if (predicates[i].name == name) return i;
    }
    return std::nullopt;
}

const TypeRange& NodeLayout::at(std::string_view type_name) const {
    for (const auto& r : ranges) {
        if (r.name == type_name) return r;
    }
    throw ContractError("unknown node type '" + std::string(type_name) + "'");
}

std::uint64_t NodeLayout::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& r : ranges) t += r.count;
    return t;
}

std::string_view to_string(Shape shape) {
    switch (shape) {
        case Shape::Chain: return "chain";
        case Shape::Star: return "star";
        case Shape::Cycle: return "cycle";
        case Shape::StarChain: return "starchain";
    }
    return "chain";
}

std::string_view to_string(SelectivityClass cls) {
    switch (cls) {
        case SelectivityClass::Constant: return "constant";
        case SelectivityClass::Linear: return "linear";
        case SelectivityClass::Quadratic: return "quadratic";
    }
    return "constant";
}

std::optional<Shape> parse_shape(std::string_view text) {
    for (auto s : {Shape::Chain, Shape::Star, Shape::Cycle, Shape::StarChain}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::optional<SelectivityClass> parse_selectivity_class(std::string_view text) {
    for (auto c : {SelectivityClass::Constant, SelectivityClass::Linear, SelectivityClass::Quadratic}) {
        if (to_string(c) == text) return c;
    }
    return std::nullopt;
}

void validate_graph_config(const GraphConfiguration& config) {
    if (config.n == 0) throw ValidationError("graph node count n must be positive");

    std::set<std::string> seen;
    for (const auto& p : config.predicates) {
        if (!is_identifier(p.name)) throw ValidationError("predicate name '" + p.name + "' is not an identifier");
        if (!seen.insert(p.name).second) throw ValidationError("duplicate predicate '" + p.name + "'");
    }

    seen.clear();
    double proportion_sum = 0.0;
    std::uint64_t fixed_sum = 0;
    for (const auto& t : config.node_types) {
        if (!is_identifier(t.name)) throw ValidationError("type name '" + t.name + "' is not an identifier");
        if (!seen.insert(t.name).second) throw ValidationError("duplicate node type '" + t.name + "'");
        if (const auto* p = std::get_if<Proportion>(&t.count_constraint)) {
            if (!(p->fraction > 0.0) || p->fraction > 1.0 + kProportionTolerance) {
                throw ValidationError("type '" + t.name + "': proportion must lie in (0, 1]");
            }
            proportion_sum += p->fraction;
        } else {
            const auto& f = std::get<Fixed>(t.count_constraint);
            if (f.count > config.n) {
                throw ValidationError("type '" + t.name + "': fixed count exceeds n");
            }
            fixed_sum += f.count;
        }
    }
    if (proportion_sum > 1.0 + kProportionTolerance) {
        throw ValidationError("type proportions sum to more than 1");
    }
    if (fixed_sum > config.n) {
        throw ValidationError("fixed type counts sum to " + std::to_string(fixed_sum) + ", more than n = " +
                              std::to_string(config.n));
    }

    std::set<std::tuple<std::string, std::string, std::string>> triples;
    for (const auto& c : config.constraints) {
        const std::string where = "constraint (" + c.source_type + ", " + c.predicate + ", " + c.target_type + ")";
        if (!config.type_index(c.source_type)) throw ValidationError(where + ": undeclared source type");
        if (!config.type_index(c.target_type)) throw ValidationError(where + ": undeclared target type");
        if (!config.predicate_index(c.predicate)) throw ValidationError(where + ": undeclared predicate");
        if (!triples.insert({c.source_type, c.target_type, c.predicate}).second) {
            throw ValidationError(where + ": duplicate constraint");
        }
        if (!c.d_in.specified() && !c.d_out.specified()) {
            throw ValidationError(where + ": in and out distributions are both nonspecified");
        }
        validate_distribution(c.d_in, where + " in-distribution");
        validate_distribution(c.d_out, where + " out-distribution");
    }

    resolve_node_counts(config);
}

NodeLayout resolve_node_counts(const GraphConfiguration& config) {
    NodeLayout layout;
    std::uint64_t next = 1;
    std::uint64_t fixed_sum = 0;
    for (const auto& t : config.node_types) {
        TypeRange r;
        r.name = t.name;
        if (const auto* p = std::get_if<Proportion>(&t.count_constraint)) {
            // The tolerance absorbs representation error such as 5 * 0.6.
            r.count = static_cast<std::uint64_t>(std::floor(static_cast<double>(config.n) * p->fraction + 1e-9));
        } else {
            r.count = std::get<Fixed>(t.count_constraint).count;
            fixed_sum += r.count;
        }
        r.first_id = next;
        r.last_id = next + r.count - 1;
        next += r.count;
        layout.ranges.push_back(std::move(r));
    }
    if (fixed_sum > config.n) {
        throw ValidationError("fixed type counts sum to more than n = " + std::to_string(config.n));
    }
    if (layout.total() == 0) throw ValidationError("configuration resolves to zero nodes");
    return layout;
}

GraphConfiguration parse_graph_config(std::string_view text) {
    xml::Document doc(text);
    const auto& root = doc.root("gmark");
    doc.check_attributes(root, {});

    GraphConfiguration config;
    bool have_graph = false;
    for (const auto* section : doc.children(root)) {
        auto name = xml::Document::name(*section);
        if (name == "graph") {
            if (have_graph) doc.fail(*section, "duplicate <graph> element");
            have_graph = true;
            doc.check_attributes(*section, {"n"});
            doc.check_no_children(*section);
            config.n = doc.number<std::uint64_t>(*section, "n");
        } else if (name == "types") {
            doc.check_attributes(*section, {});
            for (const auto* t : doc.children(*section)) {
                if (xml::Document::name(*t) != "type") doc.fail(*t, "expected <type>");
                doc.check_attributes(*t, {"name", "proportion", "fixed"});
                doc.check_no_children(*t);
                NodeType nt;
                nt.name = std::string(doc.required(*t, "name"));
                auto prop = doc.optional_number<double>(*t, "proportion");
                auto fixed = doc.optional_number<std::uint64_t>(*t, "fixed");
                if (prop.has_value() == fixed.has_value()) {
                    doc.fail(*t, "type needs exactly one of 'proportion' or 'fixed'");
                }
                if (prop) {
                    nt.count_constraint = Proportion{*prop};
                } else {
                    nt.count_constraint = Fixed{*fixed};
                }
                config.node_types.push_back(std::move(nt));
            }
        } else if (name == "predicates") {
            doc.check_attributes(*section, {});
            for (const auto* p : doc.children(*section)) {
                if (xml::Document::name(*p) != "predicate") doc.fail(*p, "expected <predicate>");
                doc.check_attributes(*p, {"name"});
                doc.check_no_children(*p);
                config.predicates.push_back(Predicate{std::string(doc.required(*p, "name"))});
            }
        } else if (name == "constraints") {
            doc.check_attributes(*section, {});
            for (const auto* c : doc.children(*section)) {
                if (xml::Document::name(*c) != "constraint") doc.fail(*c, "expected <constraint>");
                doc.check_attributes(*c, {"source", "target", "predicate"});
                EdgeConstraint ec;
                ec.source_type = std::string(doc.required(*c, "source"));
                ec.target_type = std::string(doc.required(*c, "target"));
                ec.predicate = std::string(doc.required(*c, "predicate"));
                bool have_in = false;
                bool have_out = false;
                for (const auto* d : doc.children(*c)) {
                    auto dn = xml::Document::name(*d);
                    if (dn == "in" && !have_in) {
                        ec.d_in = parse_distribution(doc, *d);
                        have_in = true;
                    } else if (dn == "out" && !have_out) {
                        ec.d_out = parse_distribution(doc, *d);
                        have_out = true;
                    } else {
                        doc.fail(*d, "unexpected element <" + std::string(dn) + "> in <constraint>");
                    }
                }
                if (!have_in || !have_out) doc.fail(*c, "constraint needs both <in> and <out>");
                config.constraints.push_back(std::move(ec));
            }
        } else {
            doc.fail(*section, "unexpected element <" + std::string(name) + ">");
        }
    }
    if (!have_graph) doc.fail(root, "missing <graph n=\"...\"/>");

    validate_graph_config(config);
    return config;
}

std::string serialize_graph_config(const GraphConfiguration& config) {
    std::ostringstream out;
    out << "<gmark>\n";
    out << "  <graph n=\"" << config.n << "\"/>\n";
    out << "  <types>\n";
    for (const auto& t : config.node_types) {
        out << "    <type name=\"" << xml::escape(t.name) << "\"";
        if (const auto* p = std::get_if<Proportion>(&t.count_constraint)) {
            out << " proportion=\"" << format_double(p->fraction) << "\"";
        } else {
            out << " fixed=\"" << std::get<Fixed>(t.count_constraint).count << "\"";
        }
        out << "/>\n";
    }
    out << "  </types>\n";
    out << "  <predicates>\n";
    for (const auto& p : config.predicates) out << "    <predicate name=\"" << xml::escape(p.name) << "\"/>\n";
    out << "  </predicates>\n";
    out << "  <constraints>\n";
    for (const auto& c : config.constraints) {
        out << "    <constraint source=\"" << xml::escape(c.source_type) << "\" target=\""
            << xml::escape(c.target_type) << "\" predicate=\"" << xml::escape(c.predicate) << "\">\n";
        write_distribution(out, "in", c.d_in);
        write_distribution(out, "out", c.d_out);
        out << "    </constraint>\n";
    }
    out << "  </constraints>\n";
    out << "</gmark>\n";
    return out.str();
}

void validate_workload_config(const WorkloadConfiguration& config) {
    if (config.num_queries == 0) throw ValidationError("workload needs at least one query");
    if (!(config.recursion_probability >= 0.0 && config.recursion_probability <= 1.0)) {
        throw ValidationError("recursion probability must lie in [0, 1]");
    }
    if (config.arity.empty()) throw ValidationError("arity set is empty");
    for (int a : config.arity) {
        if (a < 0) throw ValidationError("arity must be non-negative");
    }
    if (config.shapes.empty()) throw ValidationError("shape set is empty");
    validate_interval(config.size.rules, "rules");
    validate_interval(config.size.conjuncts, "conjuncts");
    validate_interval(config.size.disjuncts, "disjuncts");
    validate_interval(config.size.path_length, "length");
    if (config.selectivity_enforced() &&
        std::find(config.arity.begin(), config.arity.end(), 2) == config.arity.end()) {
        throw ValidationError("selectivity control requires the arity set to include 2");
    }
}

WorkloadConfiguration parse_workload_config(std::string_view text, const GraphConfiguration& graph) {
    xml::Document doc(text);
    const auto& root = doc.root("workload");
    doc.check_attributes(root, {"queries", "recursion"});

    WorkloadConfiguration config;
    config.graph = graph;
    config.num_queries = doc.number<std::uint64_t>(root, "queries");
    config.recursion_probability = doc.optional_number<double>(root, "recursion").value_or(0.0);

    bool have_arity = false;
    bool have_shapes = false;
    bool have_size = false;
    bool have_selectivities = false;
    for (const auto* child : doc.children(root)) {
        auto name = xml::Document::name(*child);
        if (name == "arity" && !have_arity) {
            have_arity = true;
            doc.check_attributes(*child, {"min", "max"});
            doc.check_no_children(*child);
            const int lo = doc.number<int>(*child, "min");
            const int hi = doc.number<int>(*child, "max");
            if (lo < 0 || hi < lo) throw ValidationError("arity interval needs 0 <= min <= max");
            for (int a = lo; a <= hi; ++a) config.arity.push_back(a);
        } else if (name == "shapes" && !have_shapes) {
            have_shapes = true;
            doc.check_attributes(*child, {});
            doc.check_no_children(*child);
            for (auto item : split_csv(xml::Document::text(*child))) {
                auto shape = parse_shape(item);
                if (!shape) doc.fail(*child, "unknown shape '" + std::string(item) + "'");
                if (std::find(config.shapes.begin(), config.shapes.end(), *shape) == config.shapes.end()) {
                    config.shapes.push_back(*shape);
                }
            }
        } else if (name == "selectivities" && !have_selectivities) {
            have_selectivities = true;
            doc.check_attributes(*child, {});
            doc.check_no_children(*child);
            for (auto item : split_csv(xml::Document::text(*child))) {
                auto cls = parse_selectivity_class(item);
                if (!cls) doc.fail(*child, "unknown selectivity class '" + std::string(item) + "'");
                if (std::find(config.selectivities.begin(), config.selectivities.end(), *cls) ==
                    config.selectivities.end()) {
                    config.selectivities.push_back(*cls);
                }
            }
            if (config.selectivities.empty()) doc.fail(*child, "empty selectivity list");
        } else if (name == "size" && !have_size) {
            have_size = true;
            doc.check_attributes(*child, {"rules", "conjuncts", "disjuncts", "length"});
            doc.check_no_children(*child);
            config.size.rules = parse_interval(doc, *child, "rules");
            config.size.conjuncts = parse_interval(doc, *child, "conjuncts");
            config.size.disjuncts = parse_interval(doc, *child, "disjuncts");
            config.size.path_length = parse_interval(doc, *child, "length");
        } else {
            doc.fail(*child, "unexpected element <" + std::string(name) + "> in <workload>");
        }
    }
    if (!have_arity) doc.fail(root, "missing <arity>");
    if (!have_shapes) doc.fail(root, "missing <shapes>");
    if (!have_size) doc.fail(root, "missing <size>");

    std::sort(config.selectivities.begin(), config.selectivities.end());
    validate_workload_config(config);
    return config;
}

std::string serialize_workload_config(const WorkloadConfiguration& config) {
    std::ostringstream out;
    out << "<workload queries=\"" << config.num_queries << "\" recursion=\""
        << format_double(config.recursion_probability) << "\">\n";
    out << "  <arity min=\"" << config.arity.front() << "\" max=\"" << config.arity.back() << "\"/>\n";
    out << "  <shapes>";
    for (std::size_t i = 0; i < config.shapes.size(); ++i) out << (i ? "," : "") << to_string(config.shapes[i]);
    out << "</shapes>\n";
    if (config.selectivity_enforced()) {
        out << "  <selectivities>";
        for (std::size_t i = 0; i < config.selectivities.size(); ++i) {
            out << (i ? "," : "") << to_string(config.selectivities[i]);
        }
        out << "</selectivities>\n";
    }
    const auto& s = config.size;
    out << "  <size rules=\"" << s.rules.min << "," << s.rules.max << "\" conjuncts=\"" << s.conjuncts.min << ","
        << s.conjuncts.max << "\" disjuncts=\"" << s.disjuncts.min << "," << s.disjuncts.max << "\" length=\""
        << s.path_length.min << "," << s.path_length.max << "\"/>\n";
    out << "</workload>\n";
    return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GraphConfiguration load_graph_config(const std::filesystem::path& path) {
    return parse_graph_config(read_text_file(path));
}

WorkloadConfiguration load_workload_config(const std::filesystem::path& path, const GraphConfiguration& graph) {
    return parse_workload_config(read_text_file(path), graph);
}

}  // namespace pathbench
