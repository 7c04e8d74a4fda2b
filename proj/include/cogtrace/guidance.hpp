#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogtrace/classify.hpp"
#include "cogtrace/corpus.hpp"
#include "cogtrace/model_client.hpp"
#include "cogtrace/structures.hpp"

namespace cogtrace {

// A test-time guidance prompt rendered from a successful structure.
struct GuidancePrompt {
    ProblemType problem_type;
    StructureGraph structure;
    std::string rendered_text;
    std::string template_id;
};

// Renders the guidance template. Available placeholders: {{problem_type}},
// {{structure}} (the linearized walk), {{elements}} (display names joined by
// " -> " in extraction order). The rendered text must mention every node in
// extraction order; anything else raises TemplateError. Requires a successful
// structure with at least one node.
GuidancePrompt build_guidance_prompt(const StructureGraph& structure, ProblemType problem_type,
                                     std::string_view template_text,
                                     std::string_view template_id = "default");

struct StratifiedSample {
    // Positions into the sampled view, ordered by (problem type, trace id).
    std::vector<size_t> positions;
    struct TypeCounts {
        int correct = 0;
        int incorrect = 0;
    };
    std::map<ProblemType, TypeCounts> taken;
};

// Up to per_type problems per problem type, split as close to 50/50 between
// previously-correct and previously-incorrect as availability allows (an odd
// budget leaves the extra slot on the incorrect side). Seeded and
// reproducible; independent of input trace order.
StratifiedSample stratified_sample(const CorpusView& view, int per_type, uint64_t seed);

// (after - before) / before * 100. Throws ZeroBaselineError when before == 0.
double score_delta(double before_accuracy, double after_accuracy);

struct ProblemOutcome {
    std::string trace_id;
    std::string model_id;
    ProblemType problem_type = ProblemType::logical;
    bool before_correct = false;
    bool after_correct = false;
    std::string before_response;
    std::string after_response;
    std::string before_judge_raw;
    std::string after_judge_raw;
};

struct TypeDelta {
    ProblemType problem_type = ProblemType::logical;
    int n = 0;
    double before_accuracy = 0.0;
    double after_accuracy = 0.0;
    std::optional<double> delta_percent;  // unset when before_accuracy == 0 (excluded)
};

struct EvalRun {
    std::string model_id;
    std::vector<ProblemOutcome> outcomes;
    std::vector<TypeDelta> per_type;
};

struct EvalTemplates {
    std::string baseline = "{{problem}}";
    std::string guided = "{{guidance}}\n\n{{problem}}";
    std::string judge;
};

// Runs the matched before/after evaluation over a stratified sample: for each
// sampled problem the subject model answers the baseline prompt and the
// guided prompt, and the judge scores both against the reference answer
// (traces must carry problem_text and answer_text). Sampled types without a
// guidance prompt are skipped and reported.
struct EvalConfig {
    int per_type = 50;
    uint64_t seed = 0;
};

struct EvalResult {
    std::vector<EvalRun> runs;                 // one per model id, sorted
    std::vector<std::string> skipped_types;    // types without guidance or missing texts
};

EvalResult run_guided_eval(const CorpusView& view,
                           const std::map<ProblemType, GuidancePrompt>& prompts,
                           const ModelClient& subject, const ModelClient& judge,
                           const EvalTemplates& templates, const EvalConfig& config);

// Table-3-style CSV: rows = models, columns = problem types in canonical
// order, cells = delta percent at one decimal place, "excluded" for
// zero-baseline cells, empty when the model/type pair was not evaluated.
std::string render_delta_report(const std::vector<EvalRun>& runs);

}  // namespace cogtrace
