#include "cogtrace/guidance.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "cogtrace/errors.hpp"
#include "cogtrace/template.hpp"
#include "cogtrace/util.hpp"

namespace cogtrace {

GuidancePrompt build_guidance_prompt(const StructureGraph& structure, ProblemType problem_type,
                                     std::string_view template_text,
                                     std::string_view template_id) {
    if (structure.nodes.empty()) {
        throw TemplateError("cannot build guidance from an empty structure");
    }
    if (structure.kind != StructureKind::successful) {
        throw std::invalid_argument("guidance prompts are built from successful structures");
    }

    std::string elements;
    for (const auto& n : structure.nodes) {
        if (!elements.empty()) elements += " -> ";
        elements += element_info(n.element).display_name;
    }

    std::map<std::string, std::string> vars;
    vars["problem_type"] = std::string(problem_type_info(problem_type).display_name);
    vars["structure"] = linearize(structure);
    vars["elements"] = elements;

    GuidancePrompt prompt;
    prompt.problem_type = problem_type;
    prompt.structure = structure;
    prompt.template_id = std::string(template_id);
    prompt.rendered_text = render_template(template_text, vars);

    // The scaffold must walk the nodes in extraction order.
    size_t cursor = 0;
    for (const auto& n : structure.nodes) {
        std::string_view name = element_info(n.element).display_name;
        size_t pos = prompt.rendered_text.find(name, cursor);
        if (pos == std::string::npos) {
            pos = prompt.rendered_text.find(std::string(element_info(n.element).id), cursor);
        }
        if (pos == std::string::npos) {
            throw TemplateError("rendered guidance does not list element '" +
                                std::string(element_info(n.element).id) +
                                "' in extraction order");
        }
        cursor = pos;
    }
    return prompt;
}

StratifiedSample stratified_sample(const CorpusView& view, int per_type, uint64_t seed) {
    StratifiedSample sample;
    if (per_type <= 0) return sample;

    // Stable candidate pools per (type, correctness), keyed by trace id so the
    // sample never depends on input order.
    std::map<ProblemType, std::array<std::vector<size_t>, 2>> pools;
    for (size_t i = 0; i < view.size(); ++i) {
        const Trace& t = view[i];
        pools[t.problem_type][t.correct ? 0 : 1].push_back(i);
    }

    for (auto& [type, strata] : pools) {
        for (auto& stratum : strata) {
            std::sort(stratum.begin(), stratum.end(), [&](size_t a, size_t b) {
                return view[a].trace_id < view[b].trace_id;
            });
            // Per-stratum deterministic shuffle.
            std::seed_seq seq{seed, static_cast<uint64_t>(type),
                              static_cast<uint64_t>(&stratum - strata.data())};
            std::mt19937_64 rng(seq);
            std::shuffle(stratum.begin(), stratum.end(), rng);
        }

        const auto& correct_pool = strata[0];
        const auto& incorrect_pool = strata[1];
        int available = static_cast<int>(correct_pool.size() + incorrect_pool.size());
        int budget = std::min(per_type, available);
        int take_correct = std::min<int>(static_cast<int>(correct_pool.size()), budget / 2);
        int take_incorrect =
            std::min<int>(static_cast<int>(incorrect_pool.size()), budget - take_correct);
        take_correct = std::min<int>(static_cast<int>(correct_pool.size()),
                                     budget - take_incorrect);

        auto& counts = sample.taken[type];
        counts.correct = take_correct;
        counts.incorrect = take_incorrect;
        for (int i = 0; i < take_correct; ++i) sample.positions.push_back(correct_pool[i]);
        for (int i = 0; i < take_incorrect; ++i) sample.positions.push_back(incorrect_pool[i]);
    }

    std::sort(sample.positions.begin(), sample.positions.end(), [&](size_t a, size_t b) {
        const Trace& ta = view[a];
        const Trace& tb = view[b];
        if (ta.problem_type != tb.problem_type) return ta.problem_type < tb.problem_type;
        return ta.trace_id < tb.trace_id;
    });
    return sample;
}

double score_delta(double before_accuracy, double after_accuracy) {
    if (before_accuracy == 0.0) {
        throw ZeroBaselineError("percentage change is undefined for a zero baseline");
    }
    return (after_accuracy - before_accuracy) / before_accuracy * 100.0;
}

EvalResult run_guided_eval(const CorpusView& view,
                           const std::map<ProblemType, GuidancePrompt>& prompts,
                           const ModelClient& subject, const ModelClient& judge,
                           const EvalTemplates& templates, const EvalConfig& config) {
    EvalResult result;
    StratifiedSample sample = stratified_sample(view, config.per_type, config.seed);

    std::set<std::string> skipped;
    std::map<std::string, std::vector<ProblemOutcome>> by_model;

    for (size_t pos : sample.positions) {
        const Trace& t = view[pos];
        auto prompt_it = prompts.find(t.problem_type);
        if (prompt_it == prompts.end()) {
            skipped.insert(std::string(problem_type_info(t.problem_type).id) +
                           ": no guidance prompt");
            continue;
        }
        if (!t.problem_text || !t.answer_text) {
            skipped.insert(t.trace_id + ": missing problem_text/answer_text");
            continue;
        }

        std::map<std::string, std::string> base_vars{{"problem", *t.problem_text}};
        std::string baseline_prompt = render_template(templates.baseline, base_vars);
        std::map<std::string, std::string> guided_vars{
            {"problem", *t.problem_text}, {"guidance", prompt_it->second.rendered_text}};
        std::string guided_prompt = render_template(templates.guided, guided_vars);

        ProblemOutcome outcome;
        outcome.trace_id = t.trace_id;
        outcome.model_id = t.model_id;
        outcome.problem_type = t.problem_type;

        outcome.before_response = subject.complete(baseline_prompt);
        JudgeResult before = judge_correctness(*t.problem_text, outcome.before_response,
                                               *t.answer_text, judge, templates.judge);
        outcome.before_correct = before.correct;
        outcome.before_judge_raw = before.raw_reply;

        outcome.after_response = subject.complete(guided_prompt);
        JudgeResult after = judge_correctness(*t.problem_text, outcome.after_response,
                                              *t.answer_text, judge, templates.judge);
        outcome.after_correct = after.correct;
        outcome.after_judge_raw = after.raw_reply;

        by_model[t.model_id].push_back(std::move(outcome));
    }

    for (auto& [model_id, outcomes] : by_model) {
        EvalRun run;
        run.model_id = model_id;
        run.outcomes = std::move(outcomes);

        std::map<ProblemType, std::array<int, 3>> agg;  // n, before_correct, after_correct
        for (const auto& o : run.outcomes) {
            auto& a = agg[o.problem_type];
            a[0] += 1;
            a[1] += o.before_correct ? 1 : 0;
            a[2] += o.after_correct ? 1 : 0;
        }
        for (const auto& [type, a] : agg) {
            TypeDelta d;
            d.problem_type = type;
            d.n = a[0];
            d.before_accuracy = static_cast<double>(a[1]) / static_cast<double>(a[0]);
            d.after_accuracy = static_cast<double>(a[2]) / static_cast<double>(a[0]);
            if (d.before_accuracy > 0.0) {
                d.delta_percent = score_delta(d.before_accuracy, d.after_accuracy);
            }
            run.per_type.push_back(d);
        }
        result.runs.push_back(std::move(run));
    }
    result.skipped_types.assign(skipped.begin(), skipped.end());
    return result;
}

std::string render_delta_report(const std::vector<EvalRun>& runs) {
    // Columns: problem types that appear in any run, canonical order.
    std::set<ProblemType> present;
    for (const auto& run : runs) {
        for (const auto& d : run.per_type) present.insert(d.problem_type);
    }

    std::ostringstream out;
    out << "model";
    for (ProblemType t : present) out << ',' << problem_type_info(t).id;
    out << '\n';
    for (const auto& run : runs) {
        out << run.model_id;
        for (ProblemType t : present) {
            out << ',';
            auto it = std::find_if(run.per_type.begin(), run.per_type.end(),
                                   [&](const TypeDelta& d) { return d.problem_type == t; });
            if (it == run.per_type.end()) continue;
            if (!it->delta_percent) {
                out << "excluded";
            } else {
                double v = *it->delta_percent;
                out << (v >= 0 ? "+" : "") << format_fixed(v, 1);
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace cogtrace
