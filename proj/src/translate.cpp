#include "pathbench/translate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "pathbench/errors.hpp"

namespace pathbench {

std::string_view to_string(Dialect d) {
    switch (d) {
        case Dialect::Sparql: return "sparql";
        case Dialect::Cypher: return "cypher";
        case Dialect::Sql: return "sql";
        case Dialect::Datalog: return "datalog";
    }
    return "sparql";
}

std::string_view file_extension(Dialect d) {
    switch (d) {
        case Dialect::Sparql: return "sparql";
        case Dialect::Cypher: return "cypher";
        case Dialect::Sql: return "sql";
        case Dialect::Datalog: return "dl";
    }
    return "txt";
}

std::optional<Dialect> parse_dialect(std::string_view name) {
    for (auto d : {Dialect::Sparql, Dialect::Cypher, Dialect::Sql, Dialect::Datalog}) {
        if (to_string(d) == name) return d;
    }
    return std::nullopt;
}

std::vector<Dialect> parse_dialect_list(std::string_view csv) {
    std::vector<Dialect> out;
    while (!csv.empty()) {
        const auto comma = csv.find(',');
        const auto item = csv.substr(0, comma);
        auto d = parse_dialect(item);
        if (!d) throw ValidationError("unknown dialect '" + std::string(item) + "'");
        if (std::find(out.begin(), out.end(), *d) == out.end()) out.push_back(*d);
        if (comma == std::string_view::npos) break;
        csv.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ValidationError("no dialect given");
    return out;
}

namespace {

// ---------------------------------------------------------------- SPARQL

std::string sparql_path(const LabelPath& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += '/';
        if (p[i].inverse) out += '^';
        out += ':' + p[i].predicate;
    }
    return out;
}

std::string sparql_regex(const RegularExpression& re) {
    const bool single = re.disjuncts.size() == 1;
    std::string body;
    for (std::size_t i = 0; i < re.disjuncts.size(); ++i) {
        const auto& p = re.disjuncts[i];
        if (i) body += '|';
        const bool wrap = !single && (p.size() > 1 || p.front().inverse);
        body += wrap ? "(" + sparql_path(p) + ")" : sparql_path(p);
    }
    if (!re.star) return body;
    const bool atomic = single && re.disjuncts.front().size() == 1 && !re.disjuncts.front().front().inverse;
    return atomic ? body + "*" : "(" + body + ")*";
}

std::string sparql_rule_patterns(const QueryRule& r, const std::string& indent) {
    std::string out;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        const auto& c = r.body[i];
        out += indent + "?" + c.from + " " + sparql_regex(c.regex) + " ?" + c.to;
        out += i + 1 < r.body.size() ? " .\n" : "\n";
    }
    return out;
}

std::string translate_sparql(const Query& q) {
    std::ostringstream out;
    out << "PREFIX : <http://example.org/p/>\n";
    const auto& first = q.rules.front();
    auto vars = first.variables();
    auto head_sorted = first.head;
    std::sort(vars.begin(), vars.end());
    std::sort(head_sorted.begin(), head_sorted.end());
    if (q.rules.size() == 1 && !first.head.empty() && vars == head_sorted) {
        out << "SELECT (COUNT(DISTINCT *) AS ?c) WHERE {\n" << sparql_rule_patterns(first, "  ") << "}\n";
        return out.str();
    }
    auto union_body = [&](const std::string& indent) {
        std::string s;
        for (std::size_t i = 0; i < q.rules.size(); ++i) {
            if (q.rules.size() == 1) {
                s += sparql_rule_patterns(q.rules[i], indent);
                continue;
            }
            if (i) s += indent + "UNION\n";
            s += indent + "{\n" + sparql_rule_patterns(q.rules[i], indent + "  ") + indent + "}\n";
        }
        return s;
    };
    if (first.head.empty()) {
        out << "SELECT (COUNT(*) AS ?c) WHERE {\n  SELECT * WHERE {\n" << union_body("    ") << "  }\n  LIMIT 1\n}\n";
        return out.str();
    }
    out << "SELECT (COUNT(*) AS ?c) WHERE {\n  SELECT DISTINCT";
    for (const auto& h : first.head) out << " ?" << h;
    out << " WHERE {\n" << union_body("    ") << "  }\n}\n";
    return out.str();
}

// ---------------------------------------------------------------- Cypher

std::string cypher_hop(const Atom& a) {
    return a.inverse ? "<-[:" + a.predicate + "]-" : "-[:" + a.predicate + "]->";
}

std::string cypher_path(const std::string& from, const LabelPath& p, const std::string& to) {
    std::string out = "(" + from + ")";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out += cypher_hop(p[i]);
        out += i + 1 == p.size() ? "(" + to + ")" : "()";
    }
    return out;
}

// Star pattern; sets `lossy` when it has to approximate.
std::string cypher_star(const Conjunct& c, bool& lossy) {
    const auto& ds = c.regex.disjuncts;
    const bool all_single = std::all_of(ds.begin(), ds.end(), [](const LabelPath& p) { return p.size() == 1; });
    const bool all_fwd = all_single && std::all_of(ds.begin(), ds.end(), [](const LabelPath& p) { return !p[0].inverse; });
    const bool all_inv = all_single && std::all_of(ds.begin(), ds.end(), [](const LabelPath& p) { return p[0].inverse; });
    std::vector<std::string> labels;
    for (const auto& p : ds) {
        // First non-inverse symbol, else the first symbol with its direction dropped.
        auto it = std::find_if(p.begin(), p.end(), [](const Atom& a) { return !a.inverse; });
        const auto& name = it == p.end() ? p.front().predicate : it->predicate;
        if (std::find(labels.begin(), labels.end(), name) == labels.end()) labels.push_back(name);
    }
    std::string rel;
    for (std::size_t i = 0; i < labels.size(); ++i) rel += (i ? "|" : ":") + labels[i];
    if (all_fwd) return "(" + c.from + ")-[" + rel + "*0..]->(" + c.to + ")";
    if (all_inv) return "(" + c.from + ")<-[" + rel + "*0..]-(" + c.to + ")";
    lossy = true;
    return "(" + c.from + ")-[" + rel + "*0..]->(" + c.to + ")";
}

std::string translate_cypher(const Query& q) {
    bool lossy = false;
    std::vector<std::string> branches;
    const auto& head = q.head();
    std::string ret = "  RETURN DISTINCT ";
    if (head.empty()) {
        ret += "1 AS t";
    } else {
        for (std::size_t i = 0; i < head.size(); ++i) ret += (i ? ", " : "") + head[i];
    }
    for (const auto& rule : q.rules) {
        // Unstarred disjunctions expand into one branch per combination.
        std::vector<std::size_t> choice(rule.body.size(), 0);
        while (true) {
            std::string match = "  MATCH ";
            for (std::size_t i = 0; i < rule.body.size(); ++i) {
                const auto& c = rule.body[i];
                if (i) match += ", ";
                match += c.regex.star ? cypher_star(c, lossy) : cypher_path(c.from, c.regex.disjuncts[choice[i]], c.to);
            }
            branches.push_back(match + "\n" + ret + "\n");
            std::size_t k = 0;
            for (; k < rule.body.size(); ++k) {
                const auto& c = rule.body[k];
                const auto options = c.regex.star ? 1 : c.regex.disjuncts.size();
                if (++choice[k] < options) break;
                choice[k] = 0;
            }
            if (k == rule.body.size()) break;
        }
    }
    std::ostringstream out;
    if (lossy) out << "/* LOSSY */\n";
    out << "CALL {\n";
    for (std::size_t i = 0; i < branches.size(); ++i) {
        if (i) out << "  UNION\n";
        out << branches[i];
    }
    out << "}\nRETURN count(*) AS c\n";
    return out.str();
}

// ---------------------------------------------------------------- SQL

std::string sql_quote(const std::string& s) {
    std::string out = "'";
    for (char ch : s) {
        if (ch == '\'') out += '\'';
        out += ch;
    }
    return out + "'";
}

// Binary relation (s, t) of one label path.
std::string sql_path(const LabelPath& p) {
    std::ostringstream out;
    auto src = [&](std::size_t i) { return "e" + std::to_string(i) + (p[i].inverse ? ".trg" : ".src"); };
    auto trg = [&](std::size_t i) { return "e" + std::to_string(i) + (p[i].inverse ? ".src" : ".trg"); };
    out << "SELECT " << src(0) << " AS s, " << trg(p.size() - 1) << " AS t FROM ";
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << "edge e" << i;
    out << " WHERE ";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out << " AND " << trg(i - 1) << " = " << src(i) << " AND ";
        out << "e" << i << ".label = " << sql_quote(p[i].predicate);
    }
    return out.str();
}

std::string sql_disjunction(const RegularExpression& re) {
    std::string out;
    for (std::size_t i = 0; i < re.disjuncts.size(); ++i) {
        if (i) out += " UNION ";
        out += sql_path(re.disjuncts[i]);
    }
    return out;
}

std::string translate_sql(const Query& q) {
    std::vector<std::string> ctes;
    int star_count = 0;
    std::vector<std::string> rule_sql;
    for (const auto& rule : q.rules) {
        std::vector<std::string> sources;
        for (const auto& c : rule.body) {
            if (!c.regex.star) {
                sources.push_back("(" + sql_disjunction(c.regex) + ")");
                continue;
            }
            const std::string name = "tc_" + std::to_string(star_count++);
            ctes.push_back(name + "(s, t) AS (\n    SELECT n, n FROM nodes\n    UNION\n    SELECT " + name +
                           ".s, d.t FROM " + name + " JOIN (" + sql_disjunction(c.regex) + ") AS d ON " + name +
                           ".t = d.s\n  )");
            sources.push_back(name);
        }
        // First column holding each variable; later occurrences become equalities.
        std::map<std::string, std::string> first_col;
        std::vector<std::string> where;
        std::string from;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            const auto alias = "c" + std::to_string(i);
            from += (i ? ", " : "") + sources[i] + " AS " + alias;
            for (const auto& [var, col] : {std::pair{rule.body[i].from, alias + ".s"}, std::pair{rule.body[i].to, alias + ".t"}}) {
                auto [it, fresh] = first_col.try_emplace(var, col);
                if (!fresh) where.push_back(it->second + " = " + col);
            }
        }
        std::string sel = "SELECT DISTINCT ";
        if (rule.head.empty()) {
            sel += "1 AS one";
        } else {
            for (std::size_t i = 0; i < rule.head.size(); ++i) {
                sel += (i ? ", " : "") + first_col.at(rule.head[i]) + " AS " + rule.head[i];
            }
        }
        std::string s = sel + "\n  FROM " + from;
        if (!where.empty()) {
            s += "\n  WHERE ";
            for (std::size_t i = 0; i < where.size(); ++i) s += (i ? " AND " : "") + where[i];
        }
        rule_sql.push_back(s);
    }
    std::ostringstream out;
    out << "WITH RECURSIVE nodes(n) AS (\n    SELECT src FROM edge UNION SELECT trg FROM edge\n  )";
    for (const auto& c : ctes) out << ",\n  " << c;
    out << "\n";
    if (q.head().empty()) {
        out << "SELECT COUNT(*) FROM (SELECT 1 AS one WHERE ";
        for (std::size_t i = 0; i < rule_sql.size(); ++i) {
            out << (i ? " OR " : "") << "EXISTS (\n" << rule_sql[i] << "\n)";
        }
        out << ") AS r;\n";
        return out.str();
    }
    out << "SELECT COUNT(*) FROM (\n";
    for (std::size_t i = 0; i < rule_sql.size(); ++i) {
        if (i) out << "\nUNION\n";
        out << rule_sql[i];
    }
    out << "\n) AS r;\n";
    return out.str();
}

// ---------------------------------------------------------------- Datalog

std::string dl_quote(const std::string& s) { return "\"" + s + "\""; }

std::string translate_datalog(const Query& q) {
    std::ostringstream decl;
    std::ostringstream rules;
    decl << ".decl edge(s:symbol, p:symbol, t:symbol)\n"
         << ".input edge(IO=file, filename=\"graph.tsv\", delimiter=\" \")\n"
         << ".decl node(n:symbol)\n";
    rules << "node(x) :- edge(x, _, _).\nnode(x) :- edge(_, _, x).\n";
    const auto arity = q.arity();
    decl << ".decl answer(";
    for (std::size_t i = 0; i < arity; ++i) decl << (i ? ", " : "") << q.head()[i] << ":symbol";
    decl << ")\n";
    for (std::size_t r = 0; r < q.rules.size(); ++r) {
        const auto& rule = q.rules[r];
        std::string body;
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            const auto& c = rule.body[i];
            const std::string base = "c" + std::to_string(r) + "_" + std::to_string(i);
            const std::string path_rel = c.regex.star ? base + "_d" : base;
            decl << ".decl " << path_rel << "(s:symbol, t:symbol)\n";
            for (const auto& p : c.regex.disjuncts) {
                rules << path_rel << "(s, t) :- ";
                for (std::size_t k = 0; k < p.size(); ++k) {
                    const std::string a = k == 0 ? "s" : "v" + std::to_string(k);
                    const std::string b = k + 1 == p.size() ? "t" : "v" + std::to_string(k + 1);
                    rules << (k ? ", " : "") << "edge(" << (p[k].inverse ? b : a) << ", " << dl_quote(p[k].predicate)
                          << ", " << (p[k].inverse ? a : b) << ")";
                }
                rules << ".\n";
            }
            if (c.regex.star) {
                decl << ".decl " << base << "(s:symbol, t:symbol)\n";
                rules << base << "(s, s) :- node(s).\n";
                rules << base << "(s, t) :- " << base << "(s, m), " << path_rel << "(m, t).\n";
            }
            body += (i ? ", " : "") + base + "(" + c.from + ", " + c.to + ")";
        }
        rules << "answer(";
        for (std::size_t i = 0; i < arity; ++i) rules << (i ? ", " : "") << rule.head[i];
        rules << ") :- " << body << ".\n";
    }
    decl << ".decl result(n:number)\n.output result\n";
    rules << "result(n) :- n = count : { answer(";
    for (std::size_t i = 0; i < arity; ++i) rules << (i ? ", " : "") << "_";
    rules << ") }.\n";
    return decl.str() + rules.str();
}

}  // namespace

std::string translate(const Query& q, Dialect dialect) {
    validate_query(q);
    switch (dialect) {
        case Dialect::Sparql: return translate_sparql(q);
        case Dialect::Cypher: return translate_cypher(q);
        case Dialect::Sql: return translate_sql(q);
        case Dialect::Datalog: return translate_datalog(q);
    }
    throw UnsupportedFeature("unknown dialect");
}

std::string sql_loader_script(std::string_view graph_path) {
    std::ostringstream out;
    out << "CREATE TABLE edge (src TEXT NOT NULL, label TEXT NOT NULL, trg TEXT NOT NULL);\n"
        << "COPY edge (src, label, trg) FROM '" << graph_path << "' WITH (FORMAT text, DELIMITER ' ');\n"
        << "CREATE INDEX edge_label_src ON edge (label, src, trg);\n"
        << "CREATE INDEX edge_label_trg ON edge (label, trg, src);\n";
    return out.str();
}

std::size_t write_translations(const std::vector<Query>& queries, const std::vector<Dialect>& dialects,
                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IOError("cannot create '" + dir.string() + "': " + ec.message());
    std::size_t written = 0;
    auto write = [&](const std::filesystem::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) throw IOError("cannot write '" + path.string() + "'");
        ++written;
    };
    for (const auto& q : queries) {
        for (auto d : dialects) {
            write(dir / ("q" + std::to_string(q.id) + "." + std::string(file_extension(d))), translate(q, d));
        }
    }
    if (std::find(dialects.begin(), dialects.end(), Dialect::Sql) != dialects.end()) {
        write(dir / "load_edges.sql", sql_loader_script());
    }
    return written;
}

}  // namespace pathbench
