#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cogtrace/annotate.hpp"
#include "cogtrace/classify.hpp"
#include "cogtrace/corpus.hpp"
#include "cogtrace/errors.hpp"
#include "cogtrace/graph.hpp"
#include "cogtrace/guidance.hpp"
#include "cogtrace/manifest.hpp"
#include "cogtrace/model_client.hpp"
#include "cogtrace/stats.hpp"
#include "cogtrace/structures.hpp"
#include "cogtrace/template.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TraceFilter parse_filters(const std::vector<std::string>& filters) {
    TraceFilter f;
    for (const std::string& item : filters) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw UsageError("filter must be key=value: '" + item + "'");
        }
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        if (key == "model" || key == "model_id") {
            f.model_id = value;
        } else if (key == "problem_type" || key == "type") {
            const ProblemTypeInfo* info = find_problem_type(value);
            if (info == nullptr) {
                throw UsageError("unknown problem_type filter value: '" + value + "'");
            }
            f.problem_type = info->type;
        } else if (key == "modality") {
            try {
                f.modality = parse_modality(value);
            } catch (const Error&) {
                throw UsageError("unknown modality filter value: '" + value + "'");
            }
        } else if (key == "correct") {
            if (value == "true" || value == "1") {
                f.correct = true;
            } else if (value == "false" || value == "0") {
                f.correct = false;
            } else {
                throw UsageError("correct filter value must be true/false: '" + value + "'");
            }
        } else {
            throw UsageError("unknown filter key: '" + key + "'");
        }
    }
    return f;
}

RelationConfig make_relation_config(int64_t tau_par, double tau_overlap,
                                    const std::string& containment, int min_score) {
    RelationConfig cfg;
    cfg.tau_par = tau_par;
    cfg.tau_overlap = tau_overlap;
    if (containment == "none") {
        cfg.full_containment_policy = FullContainmentPolicy::none;
    } else if (containment == "contains") {
        cfg.full_containment_policy = FullContainmentPolicy::contains;
    } else {
        throw UsageError("full containment policy must be none|contains: '" + containment + "'");
    }
    if (min_score < 0 || min_score > 2) {
        throw UsageError("min-score must be 0, 1 or 2");
    }
    cfg.min_score = static_cast<PresenceScore>(min_score);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

ordered_json relation_config_json(const RelationConfig& cfg) {
    ordered_json j;
    j["tau_par"] = cfg.tau_par;
    j["tau_overlap"] = cfg.tau_overlap;
    j["full_containment_policy"] =
        cfg.full_containment_policy == FullContainmentPolicy::none ? "none" : "contains";
    j["min_score"] = static_cast<int>(cfg.min_score);
    return j;
}

// Maps failures onto the documented exit codes.
int guarded(std::ostream& log, const std::function<int()>& body) {
    try {
        return body();
    } catch (const UsageError& e) {
        log << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const TemplateError& e) {
        log << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const EmptySliceError& e) {
        log << "error: " << e.what() << '\n';
        return kExitEmptySlice;
    } catch (const NoSuccessesError& e) {
        log << "error: " << e.what() << '\n';
        return kExitEmptySlice;
    } catch (const InsufficientDataError& e) {
        log << "error: " << e.what() << '\n';
        return kExitEmptySlice;
    } catch (const ClientError& e) {
        log << "endpoint error: " << e.what() << '\n';
        return kExitEndpoint;
    } catch (const MalformedRecordError& e) {
        log << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SpanOutOfBoundsError& e) {
        log << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UnknownElementError& e) {
        log << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UnknownProblemTypeError& e) {
        log << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DuplicateTraceIdError& e) {
        log << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const UnparseableReplyError& e) {
        log << "endpoint error: " << e.what() << '\n';
        return kExitEndpoint;
    } catch (const std::invalid_argument& e) {
        log << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitError;
    }
}

Corpus load_input_corpus(const std::string& input, bool lenient, LoadReport* report) {
    LoadOptions options;
    options.strict = !lenient;
    return load_corpus_file(input, options, report);
}

// --- Endpoint configuration ---

EndpointConfig parse_endpoint(const json& j) {
    EndpointConfig ep;
    ep.base_url = j.value("base_url", std::string{});
    ep.path = j.value("path", std::string{"/v1/chat/completions"});
    ep.api_key = j.value("api_key", std::string{});
    ep.model = j.value("model", std::string{});
    ep.temperature = j.value("temperature", 0.0);
    ep.timeout_s = j.value("timeout_s", 60);
    ep.retry.max_retries = j.value("max_retries", 2);
    ep.retry.backoff_ms = j.value("backoff_ms", 250);
    if (const char* key = std::getenv("COGTRACE_API_KEY"); key != nullptr && *key != '\0') {
        ep.api_key = key;  // environment overrides credentials only
    }
    return ep;
}

struct EndpointSet {
    std::map<std::string, EndpointConfig> roles;  // subject, judge, annotator
    std::vector<EndpointConfig> voters;
};

EndpointSet load_endpoints(const std::string& config_file) {
    if (config_file.empty()) {
        throw UsageError("--config <endpoints.json> is required for this command");
    }
    json obj;
    try {
        obj = json::parse(read_file(config_file));
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid endpoint config: ") + e.what());
    }
    EndpointSet set;
    for (const char* role : {"subject", "judge", "annotator"}) {
        if (obj.contains(role)) set.roles[role] = parse_endpoint(obj.at(role));
    }
    if (obj.contains("voters")) {
        for (const auto& v : obj.at("voters")) set.voters.push_back(parse_endpoint(v));
    }
    return set;
}

// Builds transports honoring --replay / --record. All clients of one command
// share a single replay transport over the same log.
class TransportFactory {
public:
    TransportFactory(const std::string& replay, const std::string& record)
        : record_(record) {
        if (!replay.empty()) {
            replay_transport_ = std::make_shared<ReplayTransport>(replay);
        }
    }

    ModelClient client(const EndpointConfig& ep, const std::string& tag) const {
        std::shared_ptr<Transport> t;
        if (replay_transport_) {
            t = replay_transport_;
        } else {
            t = std::make_shared<HttpTransport>(ep);
            if (!record_.empty()) {
                t = std::make_shared<RecordingTransport>(t, record_);
            }
        }
        return ModelClient(t, ep.model, ep.temperature, tag);
    }

private:
    std::shared_ptr<Transport> replay_transport_;
    std::string record_;
};

const EndpointConfig& require_role(const EndpointSet& set, const std::string& role) {
    auto it = set.roles.find(role);
    if (it == set.roles.end()) {
        throw UsageError("endpoint config is missing the '" + role + "' role");
    }
    return it->second;
}

std::string load_template(const std::string& file, const std::string& fallback) {
    return file.empty() ? fallback : read_file(file);
}

}  // namespace

// --- ingest ---

int cmd_ingest(const IngestArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        LoadReport report;
        Corpus corpus = load_input_corpus(args.input, args.lenient, &report);

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        save_corpus_file(corpus, outdir / "corpus.jsonl");

        ordered_json rj;
        rj["loaded"] = report.loaded;
        rj["skipped"] = report.skipped;
        rj["errors"] = report.errors;
        write_file(outdir / "report.json", rj.dump(2) + "\n");

        ordered_json config;
        config["strict"] = !args.lenient;
        write_manifest(outdir, "ingest", config, {args.input});

        log << report.loaded << " traces loaded\n";
        if (report.skipped > 0) log << report.skipped << " skipped\n";
        return kExitOk;
    });
}

// --- convert ---

namespace {

// Candidate source-column names per canonical field, tried in order.
const std::map<std::string, std::vector<std::string>>& default_field_map() {
    static const std::map<std::string, std::vector<std::string>> map = {
        {"trace_id", {"trace_id", "id", "uid", "trace_uid"}},
        {"model_id", {"model_id", "model", "model_name"}},
        {"modality", {"modality"}},
        {"problem_id", {"problem_id", "question_id", "qid"}},
        {"problem_type", {"problem_type", "type", "category"}},
        {"correct", {"correct", "is_correct", "success"}},
        {"text_length", {"text_length", "length", "num_chars"}},
        {"text", {"text", "trace", "reasoning", "reasoning_trace"}},
        {"problem_text", {"problem_text", "problem", "question"}},
        {"answer_text", {"answer_text", "answer", "reference", "ground_truth"}},
        {"spans", {"spans", "annotations"}},
    };
    return map;
}

const std::map<std::string, std::vector<std::string>>& default_span_field_map() {
    static const std::map<std::string, std::vector<std::string>> map = {
        {"element", {"element", "behavior", "capability"}},
        {"start", {"start", "begin", "start_char"}},
        {"end", {"end", "stop", "end_char"}},
        {"score", {"score", "label", "presence"}},
    };
    return map;
}

const json* lookup_field(const json& obj, const std::string& canonical,
                         const std::map<std::string, std::vector<std::string>>& defaults,
                         const std::map<std::string, std::string>& overrides) {
    if (auto it = overrides.find(canonical); it != overrides.end()) {
        auto fit = obj.find(it->second);
        return fit == obj.end() ? nullptr : &*fit;
    }
    auto dit = defaults.find(canonical);
    if (dit == defaults.end()) return nullptr;
    for (const std::string& name : dit->second) {
        auto fit = obj.find(name);
        if (fit != obj.end()) return &*fit;
    }
    return nullptr;
}

}  // namespace

int cmd_convert(const ConvertArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        std::map<std::string, std::string> overrides;
        if (!args.map_file.empty()) {
            json mj = json::parse(read_file(args.map_file));
            for (auto it = mj.begin(); it != mj.end(); ++it) {
                overrides[it.key()] = it.value().get<std::string>();
            }
        }

        std::ifstream in(args.input, std::ios::binary);
        if (!in) throw Error("cannot open input: " + args.input);

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        std::ofstream out(outdir / "converted.jsonl", std::ios::binary);

        const auto& fields = default_field_map();
        const auto& span_fields = default_span_field_map();
        size_t converted = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json src = json::parse(line);
            ordered_json dst;
            for (const char* name :
                 {"trace_id", "model_id", "modality", "problem_id", "problem_type",
                  "correct", "text_length", "text", "problem_text", "answer_text"}) {
                if (const json* v = lookup_field(src, name, fields, overrides)) {
                    dst[name] = *v;
                }
            }
            if (!dst.contains("modality")) dst["modality"] = "text";
            // Numeric/boolean coercions common in exported tables.
            if (dst.contains("correct") && dst["correct"].is_number()) {
                dst["correct"] = dst["correct"].get<int>() != 0;
            }
            if (dst.contains("correct") && dst["correct"].is_string()) {
                std::string v = dst["correct"].get<std::string>();
                dst["correct"] = v == "true" || v == "1" || v == "yes";
            }
            ordered_json spans = ordered_json::array();
            if (const json* sv = lookup_field(src, "spans", fields, overrides);
                sv != nullptr && sv->is_array()) {
                for (const auto& sj : *sv) {
                    ordered_json s;
                    for (const char* name : {"element", "start", "end", "score"}) {
                        if (const json* v = lookup_field(sj, name, span_fields, overrides)) {
                            s[name] = *v;
                        }
                    }
                    spans.push_back(std::move(s));
                }
            }
            dst["spans"] = std::move(spans);
            out << dst.dump() << '\n';
            ++converted;
        }

        ordered_json config;
        config["map_file"] = args.map_file;
        write_manifest(outdir, "convert", config, {args.input});
        log << converted << " records converted\n";
        return kExitOk;
    });
}

// --- graph ---

int cmd_graph(const GraphArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        RelationConfig rel = make_relation_config(args.tau_par, args.tau_overlap,
                                                  args.full_containment, args.min_score);
        TraceFilter filter = parse_filters(args.filters);
        Corpus corpus = load_input_corpus(args.input, false, nullptr);
        CorpusView view = corpus.slice(filter);
        if (view.empty()) {
            throw EmptySliceError("no traces match filter '" + slice_descriptor(filter) + "'");
        }

        std::vector<ReasoningGraph> graphs = build_graphs(view, rel, args.jobs);
        if (args.weighted) {
            StatsConfig scfg;
            scfg.relation = rel;
            AssociationTable table = build_association_table(view, graphs, scfg);
            table.slice_descriptor = slice_descriptor(filter);
            for (auto& g : graphs) g = weight_graph(std::move(g), table);
        }

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        for (const auto& g : graphs) {
            write_file(outdir / (g.trace_id + ".graph"), graph_to_json(g));
            write_file(outdir / (g.trace_id + ".dot"), graph_to_dot(g));
        }

        ordered_json config;
        config["relation"] = relation_config_json(rel);
        config["filter"] = slice_descriptor(filter);
        config["weighted"] = args.weighted;
        write_manifest(outdir, "graph", config, {args.input});
        log << graphs.size() << " graphs written\n";
        return kExitOk;
    });
}

// --- stats ---

int cmd_stats(const StatsArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        if (args.by != "problem_type" && args.by != "model") {
            throw UsageError("--by must be problem_type or model");
        }
        RelationConfig rel = make_relation_config(args.tau_par, args.tau_overlap,
                                                  args.full_containment, args.min_score);
        TraceFilter filter = parse_filters(args.filters);
        Corpus corpus = load_input_corpus(args.input, false, nullptr);
        CorpusView view = corpus.slice(filter);
        if (view.empty()) {
            throw EmptySliceError("no traces match filter '" + slice_descriptor(filter) + "'");
        }

        StatsConfig cfg;
        cfg.relation = rel;
        cfg.smoothing_k = args.smoothing_k;
        GroupBy by = args.by == "model" ? GroupBy::model : GroupBy::problem_type;
        write_heatmaps(view, cfg, by, args.out, args.jobs);
        if (args.type_association) {
            write_type_association(view, cfg, args.out);
        }

        ordered_json config;
        config["relation"] = relation_config_json(rel);
        config["by"] = args.by;
        config["filter"] = slice_descriptor(filter);
        config["smoothing_k"] = args.smoothing_k;
        config["type_association"] = args.type_association;
        write_manifest(args.out, "stats", config, {args.input});
        log << "heatmaps written for " << view.size() << " traces\n";
        return kExitOk;
    });
}

// --- extract ---

int cmd_extract(const ExtractArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        RelationConfig rel = make_relation_config(args.tau_par, args.tau_overlap,
                                                  args.full_containment, args.min_score);
        TraceFilter filter = parse_filters(args.filters);
        Corpus corpus = load_input_corpus(args.input, false, nullptr);
        CorpusView view = corpus.slice(filter);
        if (view.empty()) {
            throw EmptySliceError("no traces match filter '" + slice_descriptor(filter) + "'");
        }

        ExtractConfig ecfg;
        ecfg.v_max = args.v_max;
        ecfg.min_edge_support = args.min_support;
        if (ecfg.v_max < 1) throw UsageError("--v-max must be >= 1");

        fs::path outdir(args.out);
        fs::create_directories(outdir);

        bool degraded = false;
        for (ProblemType type : view.problem_types()) {
            TraceFilter tf;
            tf.problem_type = type;
            CorpusView type_view = view.where(tf);
            const std::string type_id(problem_type_info(type).id);

            TraceFilter slice_filter = filter;
            slice_filter.problem_type = type;
            StatsConfig scfg;
            scfg.relation = rel;
            AssociationTable table = build_association_table(type_view, scfg, args.jobs);
            table.slice_descriptor = slice_descriptor(slice_filter);

            StructureGraph proto;
            try {
                proto = extract_prototype(type_view, table, ecfg);
            } catch (const InsufficientDataError& e) {
                log << "warning: " << type_id << ": " << e.what()
                    << "; structures skipped\n";
                degraded = true;
                continue;
            }
            write_file(outdir / (type_id + ".prototype.structure"), linearize(proto));
            write_file(outdir / (type_id + ".prototype.dot"), structure_to_dot(proto));

            try {
                StructureGraph successful = extract_successful(type_view, table, ecfg);
                write_file(outdir / (type_id + ".successful.structure"),
                           linearize(successful));
                write_file(outdir / (type_id + ".successful.dot"),
                           structure_to_dot(successful));
            } catch (const NoSuccessesError&) {
                log << "warning: " << type_id
                    << ": no correct traces; successful structure skipped\n";
                degraded = true;
            }
        }

        ordered_json config;
        config["relation"] = relation_config_json(rel);
        config["filter"] = slice_descriptor(filter);
        config["v_max"] = ecfg.v_max;
        config["min_support"] = ecfg.min_edge_support;
        write_manifest(outdir, "extract", config, {args.input});
        log << "structures written\n";
        return degraded ? kExitEmptySlice : kExitOk;
    });
}

// --- guide ---

std::string default_guidance_template() {
    return "You are solving a {{problem_type}} problem.\n"
           "Successful solutions tend to move through these reasoning steps, in order:\n"
           "{{elements}}\n\n"
           "Structure your reasoning accordingly:\n"
           "{{structure}}\n"
           "Follow the steps above in order while solving the problem below.\n";
}

std::string default_judge_template() {
    return "Judge whether the response answers the problem correctly, using the "
           "reference answer.\n\nProblem:\n{{problem}}\n\nResponse:\n{{response}}\n\n"
           "Reference:\n{{reference}}\n\nReply with ###VERDICT on its own line, then "
           "'correct' or 'incorrect'.\n";
}

std::string default_classify_template() {
    return "Classify the following problem into exactly one of these categories:\n"
           "{{types}}\n\nProblem:\n{{problem}}\n\n"
           "Reply with the category id on the last line.\n";
}

std::string default_rubric_template() {
    return "You are annotating a reasoning trace for the cognitive element "
           "'{{element}}'.\nIdentify where the element manifests and how strongly "
           "(0=absent, 1=partially present, 2=present).\n\nTrace:\n{{trace}}\n\n"
           "Output format: write ###EXPLANATION on its own line followed by one "
           "sentence, then ###SCORE on its own line followed by 0, 1 or 2, then "
           "optionally ###SPANS on its own line followed by a JSON array of "
           "{\"start\": int, \"end\": int} objects using 0-based character "
           "positions.\n";
}

namespace {

// <type>.successful.structure -> problem type
std::optional<ProblemType> type_from_structure_filename(const fs::path& path) {
    std::string name = path.filename().string();
    auto dot = name.find('.');
    if (dot == std::string::npos) return std::nullopt;
    const ProblemTypeInfo* info = find_problem_type(name.substr(0, dot));
    return info == nullptr ? std::nullopt : std::make_optional(info->type);
}

std::map<ProblemType, StructureGraph> load_successful_structures(const std::string& dir) {
    std::map<ProblemType, StructureGraph> out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().string().ends_with(".successful.structure")) {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        auto type = type_from_structure_filename(path);
        if (!type) continue;
        out[*type] = parse_structure(read_file(path));
    }
    return out;
}

}  // namespace

int cmd_guide(const GuideArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        std::string tpl = load_template(args.template_file, default_guidance_template());
        std::map<ProblemType, StructureGraph> structures =
            load_successful_structures(args.structures);
        if (structures.empty()) {
            throw UsageError("no *.successful.structure files in '" + args.structures + "'");
        }

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        for (const auto& [type, structure] : structures) {
            GuidancePrompt prompt = build_guidance_prompt(structure, type, tpl);
            write_file(outdir / (std::string(problem_type_info(type).id) + ".guidance.txt"),
                       prompt.rendered_text);
        }

        ordered_json config;
        config["template"] = args.template_file.empty() ? "builtin" : args.template_file;
        write_manifest(outdir, "guide", config, {});
        log << structures.size() << " guidance prompts written\n";
        return kExitOk;
    });
}

// --- eval ---

int cmd_eval(const EvalArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        TraceFilter filter = parse_filters(args.filters);
        Corpus corpus = load_input_corpus(args.input, false, nullptr);
        CorpusView view = corpus.slice(filter);
        if (view.empty()) {
            throw EmptySliceError("no traces match filter '" + slice_descriptor(filter) + "'");
        }

        EndpointSet endpoints = load_endpoints(args.config_file);
        TransportFactory transports(args.replay, args.record);
        ModelClient subject = transports.client(require_role(endpoints, "subject"), "subject");
        ModelClient judge = transports.client(require_role(endpoints, "judge"), "judge");

        EvalTemplates templates;
        templates.judge = load_template(args.judge_template_file, default_judge_template());
        std::string guidance_tpl =
            load_template(args.guidance_template_file, default_guidance_template());

        std::map<ProblemType, GuidancePrompt> prompts;
        for (const auto& [type, structure] : load_successful_structures(args.structures)) {
            prompts.emplace(type, build_guidance_prompt(structure, type, guidance_tpl));
        }
        if (prompts.empty()) {
            throw UsageError("no *.successful.structure files in '" + args.structures + "'");
        }

        EvalConfig config;
        config.per_type = args.per_type;
        config.seed = args.seed;
        EvalResult result = run_guided_eval(view, prompts, subject, judge, templates, config);

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        write_file(outdir / "report.csv", render_delta_report(result.runs));

        std::ostringstream details;
        for (const auto& run : result.runs) {
            for (const auto& o : run.outcomes) {
                ordered_json dj;
                dj["model_id"] = o.model_id;
                dj["trace_id"] = o.trace_id;
                dj["problem_type"] = std::string(problem_type_info(o.problem_type).id);
                dj["before"] = ordered_json{{"correct", o.before_correct},
                                            {"response", o.before_response},
                                            {"judge_raw", o.before_judge_raw}};
                dj["after"] = ordered_json{{"correct", o.after_correct},
                                           {"response", o.after_response},
                                           {"judge_raw", o.after_judge_raw}};
                details << dj.dump() << '\n';
            }
        }
        write_file(outdir / "details.jsonl", details.str());

        ordered_json mconfig;
        mconfig["filter"] = slice_descriptor(filter);
        mconfig["per_type"] = args.per_type;
        mconfig["seed"] = args.seed;
        mconfig["replay"] = !args.replay.empty();
        mconfig["subject_model"] = subject.model();
        mconfig["subject_temperature"] = subject.temperature();
        mconfig["judge_model"] = judge.model();
        write_manifest(outdir, "eval", mconfig, {args.input});

        for (const auto& s : result.skipped_types) log << "warning: skipped " << s << '\n';
        log << "evaluation report written\n";
        return kExitOk;
    });
}

// --- annotate ---

int cmd_annotate(const AnnotateArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        std::vector<Element> elements;
        if (args.elements == "all") {
            for (const auto& info : all_elements()) elements.push_back(info.element);
        } else {
            std::istringstream ss(args.elements);
            std::string token;
            while (std::getline(ss, token, ',')) {
                elements.push_back(parse_element(token).element);
            }
        }
        if (elements.empty()) throw UsageError("no elements selected");

        EndpointSet endpoints = load_endpoints(args.config_file);
        TransportFactory transports(args.replay, args.record);
        ModelClient annotator =
            transports.client(require_role(endpoints, "annotator"), "annotate");
        std::string rubric = load_template(args.rubric_file, default_rubric_template());

        LoadReport report;
        Corpus corpus = load_input_corpus(args.input, args.lenient, &report);

        std::vector<Trace> annotated;
        size_t warnings = 0;
        for (const Trace& trace : corpus.traces()) {
            if (!trace.text) {
                log << "warning: " << trace.trace_id << " has no text; left unchanged\n";
                annotated.push_back(trace);
                continue;
            }
            Trace updated = trace;
            std::set<int> replaced;
            for (Element e : elements) replaced.insert(static_cast<int>(e));
            std::vector<Span> kept;
            for (const Span& s : updated.spans) {
                if (!replaced.contains(static_cast<int>(s.element))) kept.push_back(s);
            }
            updated.spans = std::move(kept);
            for (Element e : elements) {
                AnnotationResult res = annotate_trace(*trace.text, e, rubric, annotator);
                warnings += res.warnings.size();
                for (const Span& s : res.spans) updated.spans.push_back(s);
            }
            normalize_spans(updated.spans);
            annotated.push_back(std::move(updated));
        }

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        save_corpus_file(Corpus(std::move(annotated)), outdir / "annotated.jsonl");

        ordered_json config;
        config["elements"] = args.elements;
        config["replay"] = !args.replay.empty();
        config["annotator_model"] = annotator.model();
        config["annotator_temperature"] = annotator.temperature();
        write_manifest(outdir, "annotate", config, {args.input});
        log << corpus.size() << " traces annotated";
        if (warnings > 0) log << " (" << warnings << " spans dropped)";
        log << '\n';
        return kExitOk;
    });
}

// --- classify ---

int cmd_classify(const ClassifyArgs& args, std::ostream& log) {
    return guarded(log, [&]() -> int {
        EndpointSet endpoints = load_endpoints(args.config_file);
        if (endpoints.voters.size() != 3) {
            throw UsageError("classification requires exactly 3 voter endpoints");
        }
        TransportFactory transports(args.replay, args.record);
        std::array<ModelClient, 3> voters{
            transports.client(endpoints.voters[0], "classify"),
            transports.client(endpoints.voters[1], "classify"),
            transports.client(endpoints.voters[2], "classify"),
        };
        std::string tpl = load_template(args.template_file, default_classify_template());

        std::ifstream in(args.input, std::ios::binary);
        if (!in) throw Error("cannot open input: " + args.input);

        fs::path outdir(args.out);
        fs::create_directories(outdir);
        std::ostringstream out;
        size_t classified = 0, adjudications = 0;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json pj = json::parse(line);
            std::string problem_id = pj.at("problem_id").get<std::string>();
            std::string problem_text = pj.at("problem_text").get<std::string>();

            ClassificationResult res = classify_problem(problem_text, voters, tpl);
            ordered_json rj;
            rj["problem_id"] = problem_id;
            rj["label"] = res.label ? json(std::string(problem_type_info(*res.label).id))
                                    : json(nullptr);
            rj["needs_adjudication"] = res.needs_adjudication;
            ordered_json votes = ordered_json::array();
            for (const auto& v : res.votes) {
                ordered_json vj;
                vj["model"] = v.model;
                vj["vote"] = v.vote ? json(std::string(problem_type_info(*v.vote).id))
                                    : json(nullptr);
                vj["error"] = v.error;
                votes.push_back(std::move(vj));
            }
            rj["votes"] = std::move(votes);
            out << rj.dump() << '\n';
            ++classified;
            if (res.needs_adjudication) ++adjudications;
        }
        write_file(outdir / "labels.jsonl", out.str());

        ordered_json config;
        config["replay"] = !args.replay.empty();
        config["voters"] = ordered_json::array(
            {endpoints.voters[0].model, endpoints.voters[1].model, endpoints.voters[2].model});
        write_manifest(outdir, "classify", config, {args.input});
        log << classified << " problems classified";
        if (adjudications > 0) log << " (" << adjudications << " need adjudication)";
        log << '\n';
        return kExitOk;
    });
}

}  // namespace cogtrace::cli
