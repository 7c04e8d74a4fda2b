#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace cogtrace::cli {

// Exit-code scheme shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;       // unexpected failure
inline constexpr int kExitValidation = 2;  // record/format validation
inline constexpr int kExitEmptySlice = 3;  // empty slice / no successes
inline constexpr int kExitUsage = 4;       // bad flags, unknown filter values
inline constexpr int kExitEndpoint = 5;    // endpoint failure beyond retries

struct IngestArgs {
    std::string input;
    std::string out;
    bool lenient = false;
};

struct ConvertArgs {
    std::string input;
    std::string out;
    std::string map_file;  // optional JSON field mapping
};

struct GraphArgs {
    std::string input;
    std::string out;
    std::vector<std::string> filters;
    int64_t tau_par = 20;
    double tau_overlap = 0.8;
    std::string full_containment = "none";
    int min_score = 1;
    bool weighted = false;  // weight against the slice's own table
    int jobs = 1;
};

struct StatsArgs {
    std::string input;
    std::string out;
    std::string by = "problem_type";  // or "model"
    std::vector<std::string> filters;
    int64_t tau_par = 20;
    double tau_overlap = 0.8;
    std::string full_containment = "none";
    int min_score = 1;
    double smoothing_k = 0.0;
    bool type_association = false;
    int jobs = 1;
};

struct ExtractArgs {
    std::string input;
    std::string out;
    std::vector<std::string> filters;
    int64_t tau_par = 20;
    double tau_overlap = 0.8;
    std::string full_containment = "none";
    int min_score = 1;
    int v_max = 7;
    int min_support = 2;
    int jobs = 1;
};

struct GuideArgs {
    std::string structures;  // directory of *.successful.structure files
    std::string out;
    std::string template_file;  // empty selects the built-in template
};

struct EvalArgs {
    std::string input;       // corpus with problem_text/answer_text
    std::string structures;  // directory of *.successful.structure files
    std::string out;
    std::string config_file;  // endpoint configuration
    std::string replay;       // replay log path (offline mode)
    std::string record;       // record log path
    std::vector<std::string> filters;
    std::string guidance_template_file;
    std::string judge_template_file;
    int per_type = 50;
    uint64_t seed = 0;
};

struct AnnotateArgs {
    std::string input;  // corpus records carrying text
    std::string out;
    std::string config_file;
    std::string replay;
    std::string record;
    std::string rubric_file;   // empty selects the built-in rubric scaffold
    std::string elements = "all";  // comma-separated ids or "all"
    bool lenient = false;
};

struct ClassifyArgs {
    std::string input;  // JSONL of {problem_id, problem_text}
    std::string out;
    std::string config_file;
    std::string replay;
    std::string record;
    std::string template_file;
};

int cmd_ingest(const IngestArgs& args, std::ostream& log);
int cmd_convert(const ConvertArgs& args, std::ostream& log);
int cmd_graph(const GraphArgs& args, std::ostream& log);
int cmd_stats(const StatsArgs& args, std::ostream& log);
int cmd_extract(const ExtractArgs& args, std::ostream& log);
int cmd_guide(const GuideArgs& args, std::ostream& log);
int cmd_eval(const EvalArgs& args, std::ostream& log);
int cmd_annotate(const AnnotateArgs& args, std::ostream& log);
int cmd_classify(const ClassifyArgs& args, std::ostream& log);

// Built-in prompt templates used when no file is given.
std::string default_guidance_template();
std::string default_judge_template();
std::string default_classify_template();
std::string default_rubric_template();

}  // namespace cogtrace::cli
