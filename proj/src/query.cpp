#include "pathbench/query.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pathbench/errors.hpp"
#include "xml_util.hpp"

namespace pathbench {

std::vector<std::string> QueryRule::variables() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (const auto& c : body) {
        add(c.from);
        add(c.to);
    }
    return out;
}

void validate_query(const Query& q) {
    if (q.rules.empty()) throw ValidationError("query " + std::to_string(q.id) + " has no rules");
    const auto arity = q.rules.front().head.size();
    for (const auto& r : q.rules) {
        if (r.body.empty()) throw ValidationError("query " + std::to_string(q.id) + " has an empty rule");
        if (r.head.size() != arity) throw ValidationError("query " + std::to_string(q.id) + " mixes arities");
        const auto vars = r.variables();
        for (const auto& h : r.head) {
            if (std::find(vars.begin(), vars.end(), h) == vars.end()) {
                throw ValidationError("head variable " + h + " does not occur in the body");
            }
        }
        for (const auto& c : r.body) {
            if (c.regex.disjuncts.empty()) throw ValidationError("conjunct without disjuncts");
            for (const auto& p : c.regex.disjuncts) {
                if (p.empty()) throw ValidationError("empty disjunct");
            }
        }
    }
}

std::string serialize_workload(const std::vector<Query>& queries) {
    std::ostringstream out;
    out << "<workload>\n";
    for (const auto& q : queries) {
        out << "  <query id=\"" << q.id << "\" shape=\"" << to_string(q.shape) << "\"";
        if (q.selectivity) out << " selectivity=\"" << to_string(*q.selectivity) << "\"";
        out << " relaxations=\"" << q.relaxations << "\">\n";
        if (q.rules.front().head.empty()) {
            out << "    <head/>\n";
        } else {
            out << "    <head>\n";
            for (const auto& v : q.head()) out << "      <var name=\"" << xml::escape(v) << "\"/>\n";
            out << "    </head>\n";
        }
        for (const auto& r : q.rules) {
            out << "    <rule>\n";
            for (const auto& c : r.body) {
                out << "      <conjunct from=\"" << xml::escape(c.from) << "\" to=\"" << xml::escape(c.to)
                    << "\" star=\"" << (c.regex.star ? 1 : 0) << "\">\n";
                for (const auto& p : c.regex.disjuncts) {
                    out << "        <disjunct>\n";
                    for (const auto& a : p) {
                        out << "          <symbol name=\"" << xml::escape(a.predicate) << "\" inverse=\""
                            << (a.inverse ? 1 : 0) << "\"/>\n";
                    }
                    out << "        </disjunct>\n";
                }
                out << "      </conjunct>\n";
            }
            out << "    </rule>\n";
        }
        out << "  </query>\n";
    }
    out << "</workload>\n";
    return out.str();
}

namespace {

bool parse_flag(const xml::Document& doc, const xml::Node& node, std::string_view attr) {
    auto v = doc.required(node, attr);
    if (v == "0") return false;
    if (v == "1") return true;
    doc.fail(node, "attribute '" + std::string(attr) + "' must be 0 or 1");
}

}  // namespace

std::vector<Query> parse_workload(std::string_view text) {
    xml::Document doc(text);
    const auto& root = doc.root("workload");
    doc.check_attributes(root, {});
    std::vector<Query> queries;
    for (const auto* qn : doc.children(root)) {
        if (xml::Document::name(*qn) != "query") doc.fail(*qn, "expected <query>");
        doc.check_attributes(*qn, {"id", "shape", "selectivity", "relaxations"});
        Query q;
        q.id = doc.number<std::uint64_t>(*qn, "id");
        auto shape = parse_shape(doc.required(*qn, "shape"));
        if (!shape) doc.fail(*qn, "unknown shape");
        q.shape = *shape;
        if (auto sel = xml::Document::attribute(*qn, "selectivity")) {
            auto cls = parse_selectivity_class(*sel);
            if (!cls) doc.fail(*qn, "unknown selectivity class");
            q.selectivity = *cls;
        }
        q.relaxations = doc.optional_number<int>(*qn, "relaxations").value_or(0);
        std::vector<std::string> head;
        bool have_head = false;
        for (const auto* part : doc.children(*qn)) {
            const auto name = xml::Document::name(*part);
            if (name == "head" && !have_head && q.rules.empty()) {
                have_head = true;
                doc.check_attributes(*part, {});
                for (const auto* v : doc.children(*part)) {
                    if (xml::Document::name(*v) != "var") doc.fail(*v, "expected <var>");
                    doc.check_attributes(*v, {"name"});
                    doc.check_no_children(*v);
                    head.emplace_back(doc.required(*v, "name"));
                }
            } else if (name == "rule") {
                doc.check_attributes(*part, {});
                QueryRule rule;
                rule.head = head;
                for (const auto* cn : doc.children(*part)) {
                    if (xml::Document::name(*cn) != "conjunct") doc.fail(*cn, "expected <conjunct>");
                    doc.check_attributes(*cn, {"from", "to", "star"});
                    Conjunct c;
                    c.from = std::string(doc.required(*cn, "from"));
                    c.to = std::string(doc.required(*cn, "to"));
                    c.regex.star = parse_flag(doc, *cn, "star");
                    for (const auto* dn : doc.children(*cn)) {
                        if (xml::Document::name(*dn) != "disjunct") doc.fail(*dn, "expected <disjunct>");
                        doc.check_attributes(*dn, {});
                        LabelPath path;
                        for (const auto* sn : doc.children(*dn)) {
                            if (xml::Document::name(*sn) != "symbol") doc.fail(*sn, "expected <symbol>");
                            doc.check_attributes(*sn, {"name", "inverse"});
                            doc.check_no_children(*sn);
                            path.push_back({std::string(doc.required(*sn, "name")), parse_flag(doc, *sn, "inverse")});
                        }
                        if (path.empty()) doc.fail(*dn, "empty <disjunct>");
                        c.regex.disjuncts.push_back(std::move(path));
                    }
                    if (c.regex.disjuncts.empty()) doc.fail(*cn, "conjunct without <disjunct>");
                    rule.body.push_back(std::move(c));
                }
                if (rule.body.empty()) doc.fail(*part, "empty <rule>");
                q.rules.push_back(std::move(rule));
            } else {
                doc.fail(*part, "unexpected element <" + std::string(name) + "> in <query>");
            }
        }
        if (q.rules.empty()) doc.fail(*qn, "query without <rule>");
        validate_query(q);
        queries.push_back(std::move(q));
    }
    return queries;
}

std::string to_string(const Query& q) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < q.head().size(); ++i) out << (i ? "," : "") << "?" << q.head()[i];
    out << ") <- ";
    for (std::size_t r = 0; r < q.rules.size(); ++r) {
        if (r) out << " | ";
        const auto& body = q.rules[r].body;
        for (std::size_t i = 0; i < body.size(); ++i) {
            const auto& c = body[i];
            out << (i ? ", " : "") << "(?" << c.from << ", ";
            if (c.regex.star) out << "(";
            for (std::size_t d = 0; d < c.regex.disjuncts.size(); ++d) {
                if (d) out << " + ";
                const auto& p = c.regex.disjuncts[d];
                for (std::size_t k = 0; k < p.size(); ++k) {
                    out << (k ? "." : "") << p[k].predicate << (p[k].inverse ? "-" : "");
                }
            }
            if (c.regex.star) out << ")*";
            out << ", ?" << c.to << ")";
        }
    }
    return out.str();
}

}  // namespace pathbench
