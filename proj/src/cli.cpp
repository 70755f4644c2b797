#include "pathbench/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "pathbench/config.hpp"
#include "pathbench/errors.hpp"
#include "pathbench/graphgen.hpp"
#include "pathbench/oracle.hpp"
#include "pathbench/querygen.hpp"
#include "pathbench/selstructs.hpp"
#include "pathbench/translate.hpp"

namespace pathbench::cli {

namespace {

struct Options {
    std::string graph_config;
    std::string workload_config;
    std::string output;
    std::string input;
    std::uint64_t nodes = 0;
    std::uint64_t seed = 0;
    std::string dialects = "sparql,cypher,sql,datalog";
    std::string sizes = "2000,4000,8000,16000";
    unsigned threads = 1;
    std::string format = "tsv";
    bool allow_multi_edges = false;
    bool gaussian_fast_path = false;
    bool dump_schema_graph = false;
};

// Opens `path` for writing; "-" selects `fallback`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw IOError("cannot open '" + path + "' for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }
    void finish() {
        stream_->flush();
        if (!*stream_) throw IOError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

std::vector<std::uint64_t> parse_sizes(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || p != item.data() + item.size() || v == 0) {
            throw ValidationError("bad size '" + item + "' in --sizes");
        }
        if (!out.empty() && v <= out.back()) throw ValidationError("--sizes must be strictly increasing");
        out.push_back(v);
    }
    if (out.size() < 2) throw ValidationError("--sizes needs at least two values");
    return out;
}

GraphConfiguration load_graph(const Options& o) {
    auto g = load_graph_config(o.graph_config);
    if (o.nodes > 0) {
        g.n = o.nodes;
        validate_graph_config(g);
    }
    return g;
}

int cmd_graph(const Options& o, std::ostream& out) {
    const auto cfg = load_graph(o);
    GraphFormat format;
    if (o.format == "tsv") {
        format = GraphFormat::TSV;
    } else if (o.format == "ntriples") {
        format = GraphFormat::NTriples;
    } else {
        throw ValidationError("unknown format '" + o.format + "'");
    }
    GenerationOptions opts;
    opts.allow_multi_edges = o.allow_multi_edges;
    opts.gaussian_fast_path = o.gaussian_fast_path;
    opts.threads = o.threads;
    std::vector<std::string> names;
    for (const auto& p : cfg.predicates) names.push_back(p.name);
    Sink sink(o.output, out);
    generate_graph(cfg, o.seed, opts, [&](std::span<const EdgeRecord> batch) { write_graph(batch, names, format, sink.get()); });
    sink.finish();
    return kOk;
}

// Generates the workload; partial results are returned with `partial` set.
std::vector<Query> make_workload(const Options& o, const WorkloadConfiguration& wl, std::ostream& err, bool& partial) {
    if (o.dump_schema_graph) {
        const auto g = build_schema_graph(wl.graph);
        dump_schema_graph(g, err);
        dump_selectivity_graph(g, build_selectivity_graph(g, wl.size.path_length), err);
    }
    QueryGenOptions qo;
    qo.threads = o.threads;
    partial = false;
    try {
        return generate_workload(wl, o.seed, qo);
    } catch (const WorkloadError& e) {
        err << "warning: " << e.what() << "\n";
        partial = true;
        return e.partial();
    }
}

int cmd_workload(const Options& o, std::ostream& out, std::ostream& err) {
    const auto graph = load_graph(o);
    const auto wl = load_workload_config(o.workload_config, graph);
    bool partial = false;
    const auto queries = make_workload(o, wl, err, partial);
    Sink sink(o.output, out);
    sink.get() << serialize_workload(queries);
    sink.finish();
    return partial ? kPartialWorkload : kOk;
}

int cmd_translate(const Options& o) {
    const auto queries = parse_workload(read_text_file(o.input));
    const auto dialects = parse_dialect_list(o.dialects);
    write_translations(queries, dialects, o.output.empty() ? std::string(".") : o.output);
    return kOk;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    const auto graph = load_graph(o);
    const auto sizes = parse_sizes(o.sizes);
    std::vector<Query> queries;
    bool partial = false;
    if (!o.input.empty()) {
        queries = parse_workload(read_text_file(o.input));
    } else {
        const auto wl = load_workload_config(o.workload_config, graph);
        queries = make_workload(o, wl, err, partial);
    }
    const auto counts = measure_counts(queries, graph, sizes, o.seed, o.threads);
    Sink sink(o.output, out);
    auto& csv = sink.get();
    csv << "query_id,target_class,alpha,beta,points_used\n";
    const std::vector<double> xs(sizes.begin(), sizes.end());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        std::vector<double> ys;
        for (const auto& row : counts) ys.push_back(static_cast<double>(row[i]));
        const auto& q = queries[i];
        csv << q.id << "," << (q.selectivity ? std::string(to_string(*q.selectivity)) : std::string()) << ",";
        try {
            const auto r = regress_log_log(xs, ys);
            csv << fmt(r.alpha) << "," << fmt(r.beta) << "," << r.points_used << "\n";
        } catch (const InsufficientData&) {
            int nonzero = 0;
            for (double y : ys) nonzero += y > 0 ? 1 : 0;
            csv << "NA,NA," << nonzero << "\n";
        }
    }
    sink.finish();
    return partial ? kPartialWorkload : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Schema-driven graph and path-query workload generator"};
    app.require_subcommand(1);
    Options o;

    auto* graph = app.add_subcommand("graph", "Generate a graph instance");
    graph->add_option("-c,--config", o.graph_config, "Graph configuration XML")->required();
    graph->add_option("-o,--output", o.output, "Output file ('-' for stdout)");
    graph->add_option("-n,--nodes", o.nodes, "Override the configured node count");
    graph->add_option("-s,--seed", o.seed, "Random seed");
    graph->add_option("--format", o.format, "tsv or ntriples");
    graph->add_option("--threads", o.threads, "Worker threads");
    graph->add_flag("--allow-multi-edges", o.allow_multi_edges, "Keep duplicate edges");
    graph->add_flag("--gaussian-fast-path", o.gaussian_fast_path, "Skip degree vectors for Gaussian sides");

    auto* workload = app.add_subcommand("workload", "Generate a query workload");
    workload->add_option("-c,--config", o.graph_config, "Graph configuration XML")->required();
    workload->add_option("-w,--workload", o.workload_config, "Workload configuration XML")->required();
    workload->add_option("-o,--output", o.output, "Output file ('-' for stdout)");
    workload->add_option("-s,--seed", o.seed, "Random seed");
    workload->add_option("--threads", o.threads, "Worker threads");
    workload->add_flag("--dump-schema-graph", o.dump_schema_graph, "Print schema and selectivity graphs to stderr");

    auto* translate_cmd = app.add_subcommand("translate", "Translate a workload into query languages");
    translate_cmd->add_option("-i,--input", o.input, "Workload XML")->required();
    translate_cmd->add_option("-d,--dialects", o.dialects, "Comma-separated: sparql,cypher,sql,datalog");
    translate_cmd->add_option("-o,--output", o.output, "Output directory");

    auto* verify = app.add_subcommand("verify", "Estimate selectivity exponents with the reference evaluator");
    verify->add_option("-c,--config", o.graph_config, "Graph configuration XML")->required();
    verify->add_option("-w,--workload", o.workload_config, "Workload configuration XML");
    verify->add_option("-i,--input", o.input, "Existing workload XML instead of generating one");
    verify->add_option("--sizes", o.sizes, "Comma-separated node counts");
    verify->add_option("-o,--output", o.output, "CSV output ('-' for stdout)");
    verify->add_option("-s,--seed", o.seed, "Random seed");
    verify->add_option("--threads", o.threads, "Worker threads");
    verify->add_flag("--dump-schema-graph", o.dump_schema_graph, "Print schema and selectivity graphs to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (o.threads == 0) throw ValidationError("--threads must be positive");
        if (graph->parsed()) return cmd_graph(o, out);
        if (workload->parsed()) return cmd_workload(o, out, err);
        if (translate_cmd->parsed()) return cmd_translate(o);
        if (verify->parsed()) {
            if (o.input.empty() && o.workload_config.empty()) throw ValidationError("verify needs -w or -i");
            return cmd_verify(o, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace pathbench::cli
