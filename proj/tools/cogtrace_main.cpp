#include <iostream>

#include <CLI11.hpp>

#include "../src/cli/commands.hpp"

namespace cli = cogtrace::cli;

int main(int argc, char** argv) {
    CLI::App app{"cogtrace: reasoning-trace analysis toolkit"};
    app.require_subcommand(1);

    // ingest
    cli::IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize a trace corpus");
    ingest_cmd->add_option("--input", ingest.input, "Trace records (JSONL)")->required();
    ingest_cmd->add_option("--out", ingest.out, "Output directory")->required();
    ingest_cmd->add_flag("--lenient", ingest.lenient, "Skip invalid records instead of aborting");

    // convert
    cli::ConvertArgs convert;
    auto* convert_cmd =
        app.add_subcommand("convert", "Map released-dataset column names onto the record format");
    convert_cmd->add_option("--input", convert.input, "Raw records (JSONL)")->required();
    convert_cmd->add_option("--out", convert.out, "Output directory")->required();
    convert_cmd->add_option("--map", convert.map_file, "JSON field-name mapping");

    // graph
    cli::GraphArgs graph;
    auto* graph_cmd = app.add_subcommand("graph", "Write per-trace transition graphs");
    graph_cmd->add_option("--input", graph.input, "Corpus (JSONL)")->required();
    graph_cmd->add_option("--out", graph.out, "Output directory")->required();
    graph_cmd->add_option("--filter", graph.filters, "key=value filter (repeatable)");
    graph_cmd->add_option("--tau-par", graph.tau_par, "PARALLEL distance threshold");
    graph_cmd->add_option("--tau-overlap", graph.tau_overlap, "CONTAINS overlap threshold");
    graph_cmd->add_option("--full-containment", graph.full_containment, "none|contains");
    graph_cmd->add_option("--min-score", graph.min_score, "Minimum span score (0-2)");
    graph_cmd->add_flag("--weighted", graph.weighted, "Attach NPMI weights from the slice table");
    graph_cmd->add_option("--jobs", graph.jobs, "Worker threads");

    // stats
    cli::StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "Write presence/PPMI/NPMI heatmap CSVs");
    stats_cmd->add_option("--input", stats.input, "Corpus (JSONL)")->required();
    stats_cmd->add_option("--out", stats.out, "Output directory")->required();
    stats_cmd->add_option("--by", stats.by, "Column grouping: problem_type|model");
    stats_cmd->add_option("--filter", stats.filters, "key=value filter (repeatable)");
    stats_cmd->add_option("--tau-par", stats.tau_par, "PARALLEL distance threshold");
    stats_cmd->add_option("--tau-overlap", stats.tau_overlap, "CONTAINS overlap threshold");
    stats_cmd->add_option("--full-containment", stats.full_containment, "none|contains");
    stats_cmd->add_option("--min-score", stats.min_score, "Minimum span score (0-2)");
    stats_cmd->add_option("--smoothing-k", stats.smoothing_k, "Add-k smoothing for tiny slices");
    stats_cmd->add_flag("--type-association", stats.type_association,
                        "Also write element/problem-type PPMI");
    stats_cmd->add_option("--jobs", stats.jobs, "Worker threads");

    // extract
    cli::ExtractArgs extract;
    auto* extract_cmd =
        app.add_subcommand("extract", "Extract prototype and successful structures per type");
    extract_cmd->add_option("--input", extract.input, "Corpus (JSONL)")->required();
    extract_cmd->add_option("--out", extract.out, "Output directory")->required();
    extract_cmd->add_option("--filter", extract.filters, "key=value filter (repeatable)");
    extract_cmd->add_option("--tau-par", extract.tau_par, "PARALLEL distance threshold");
    extract_cmd->add_option("--tau-overlap", extract.tau_overlap, "CONTAINS overlap threshold");
    extract_cmd->add_option("--full-containment", extract.full_containment, "none|contains");
    extract_cmd->add_option("--min-score", extract.min_score, "Minimum span score (0-2)");
    extract_cmd->add_option("--v-max", extract.v_max, "Node budget per structure");
    extract_cmd->add_option("--min-support", extract.min_support,
                            "Candidate edges must occur in this many traces (0 = paper rule)");
    extract_cmd->add_option("--jobs", extract.jobs, "Worker threads");

    // guide
    cli::GuideArgs guide;
    auto* guide_cmd =
        app.add_subcommand("guide", "Render guidance prompts from successful structures");
    guide_cmd->add_option("--structures", guide.structures, "Directory of structure files")
        ->required();
    guide_cmd->add_option("--out", guide.out, "Output directory")->required();
    guide_cmd->add_option("--template", guide.template_file, "Guidance template file");

    // eval
    cli::EvalArgs eval;
    auto* eval_cmd =
        app.add_subcommand("eval", "Matched before/after evaluation with a Table-3-style report");
    eval_cmd->add_option("--input", eval.input, "Corpus with problem/answer text (JSONL)")
        ->required();
    eval_cmd->add_option("--structures", eval.structures, "Directory of structure files")
        ->required();
    eval_cmd->add_option("--out", eval.out, "Output directory")->required();
    eval_cmd->add_option("--config", eval.config_file, "Endpoint configuration (JSON)");
    eval_cmd->add_option("--replay", eval.replay, "Replay log (offline mode)");
    eval_cmd->add_option("--record", eval.record, "Record interactions to this log");
    eval_cmd->add_option("--filter", eval.filters, "key=value filter (repeatable)");
    eval_cmd->add_option("--guidance-template", eval.guidance_template_file,
                         "Guidance template file");
    eval_cmd->add_option("--judge-template", eval.judge_template_file, "Judge template file");
    eval_cmd->add_option("--per-type", eval.per_type, "Problems sampled per type");
    eval_cmd->add_option("--seed", eval.seed, "Sampling seed");

    // annotate
    cli::AnnotateArgs annotate;
    auto* annotate_cmd =
        app.add_subcommand("annotate", "Span-annotate traces with an external model");
    annotate_cmd->add_option("--input", annotate.input, "Corpus with text (JSONL)")->required();
    annotate_cmd->add_option("--out", annotate.out, "Output directory")->required();
    annotate_cmd->add_option("--config", annotate.config_file, "Endpoint configuration (JSON)");
    annotate_cmd->add_option("--replay", annotate.replay, "Replay log (offline mode)");
    annotate_cmd->add_option("--record", annotate.record, "Record interactions to this log");
    annotate_cmd->add_option("--rubric", annotate.rubric_file, "Rubric template file");
    annotate_cmd->add_option("--elements", annotate.elements,
                             "Comma-separated element ids, or 'all'");
    annotate_cmd->add_flag("--lenient", annotate.lenient, "Skip invalid input records");

    // classify
    cli::ClassifyArgs classify;
    auto* classify_cmd =
        app.add_subcommand("classify", "Majority-vote problem-type classification");
    classify_cmd->add_option("--input", classify.input, "Problems (JSONL)")->required();
    classify_cmd->add_option("--out", classify.out, "Output directory")->required();
    classify_cmd->add_option("--config", classify.config_file, "Endpoint configuration (JSON)");
    classify_cmd->add_option("--replay", classify.replay, "Replay log (offline mode)");
    classify_cmd->add_option("--record", classify.record, "Record interactions to this log");
    classify_cmd->add_option("--template", classify.template_file, "Classification template");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        // CLI11's own exit codes for parse failures map onto the usage code;
        // --help stays 0.
        return code == 0 ? 0 : cli::kExitUsage;
    }

    if (ingest_cmd->parsed()) return cli::cmd_ingest(ingest, std::cout);
    if (convert_cmd->parsed()) return cli::cmd_convert(convert, std::cout);
    if (graph_cmd->parsed()) return cli::cmd_graph(graph, std::cout);
    if (stats_cmd->parsed()) return cli::cmd_stats(stats, std::cout);
    if (extract_cmd->parsed()) return cli::cmd_extract(extract, std::cout);
    if (guide_cmd->parsed()) return cli::cmd_guide(guide, std::cout);
    if (eval_cmd->parsed()) return cli::cmd_eval(eval, std::cout);
    if (annotate_cmd->parsed()) return cli::cmd_annotate(annotate, std::cout);
    if (classify_cmd->parsed()) return cli::cmd_classify(classify, std::cout);
    return cli::kExitUsage;
}
